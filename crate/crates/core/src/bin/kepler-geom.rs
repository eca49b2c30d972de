fn main() {
    std::process::exit(kepler_geom::cli::main_with_args(std::env::args_os()));
}
