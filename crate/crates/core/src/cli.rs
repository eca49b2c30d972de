//! Command-line surface: the verification suite, single-orbit and family
//! reports, and figure data export.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numeric or
//! singularity error.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{
    bounding_envelope, bounding_scan, directrix_envelope, eccentricity_extremes, envelope_focus_u, family_member,
    focus_locus, minimize_eccentricity, psi_grid, reflected_focus_v, simultaneous_return_check, FamilySpec,
};
use crate::geom::{reflect_point_in_line, ConicKind, ConicSpec};
use crate::propagator::{detect_period, integrate_numeric, propagate_analytic, swept_area};
use crate::scenarios::random_bound_state;
use crate::state::{conserved_quantities, directrix, fall_point, geometric_second_focus, orbit_geometry, PhysParams};
use crate::vec3::Vec3;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const DEFAULT_SEED: u64 = 1970;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Command {
    Verify,
    Orbit,
    Family,
    Envelope,
    Figures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub mu: f64,
    pub k: f64,
    pub energy: f64,
    pub r: Vec3,
    pub psi: f64,
    pub samples: usize,
    pub dt_fraction: f64,
    pub tol_override: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            mu: 1.0,
            k: 1.0,
            energy: -0.28,
            r: Vec3::X,
            psi: FRAC_PI_2,
            samples: 256,
            dt_fraction: 1e-5,
            tol_override: None,
            out: None,
            format: Format::Json,
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 3 {
            return Err(Error::InvalidArgument(format!("--samples must be at least 3, got {}", self.samples)));
        }
        if !(self.dt_fraction > 0.0 && self.dt_fraction <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "--dt-fraction must lie in (0, 1e-2], got {}",
                self.dt_fraction
            )));
        }
        if let Some(x) = self.tol_override {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidArgument(format!("--tol-override must be positive, got {x}")));
            }
        }
        if !self.psi.is_finite() {
            return Err(Error::InvalidArgument("--psi must be finite".into()));
        }
        self.family_spec().map(|_| ())
    }

    pub fn params(&self) -> Result<PhysParams> {
        PhysParams::new(self.mu, self.k)
    }

    /// The family plane is the xy plane when the fixed point lies in it;
    /// otherwise the plane through the origin containing `r` and the z axis.
    pub fn plane_normal(&self) -> Vec3 {
        if self.r.z == 0.0 {
            return Vec3::Z;
        }
        self.r.cross(Vec3::Z).normalized().unwrap_or(Vec3::Y)
    }

    pub fn family_spec(&self) -> Result<FamilySpec> {
        FamilySpec::new(self.params()?, self.energy, self.r, self.plane_normal())
    }

    fn tolerance(&self, base: f64) -> f64 {
        base * self.tol_override.unwrap_or(1.0)
    }
}

/// Exit code for an error raised while running a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::AtOrigin
        | Error::Unbound { .. }
        | Error::OutOfRange(_)
        | Error::RadialDirection { .. }
        | Error::ParabolicEnvelope
        | Error::CircularOrbit
        | Error::UnsupportedKind(_)
        | Error::Io { .. } => EXIT_USAGE,
        Error::DegenerateOrbit
        | Error::NearlyRadial { .. }
        | Error::NonConvergence { .. }
        | Error::Singularity { .. }
        | Error::InsufficientCoverage => EXIT_NUMERIC,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerifyReport {
    fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        // NaN residuals fail
        let pass = residual <= tolerance;
        self.checks.push(Check { name: name.to_string(), residual, tolerance, pass });
        self.overall = self.checks.iter().all(|c| c.pass);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Number of random states for the mirror-construction check.
const RANDOM_STATES: usize = 1000;
/// Number of random states integrated for the oracle cross-check.
const ORACLE_STATES: usize = 100;

/// Run the full invariant suite for the configured family and member.
pub fn run_verify(config: &RunConfig) -> Result<VerifyReport> {
    config.validate()?;
    let spec = config.family_spec()?;
    let params = spec.params;
    let mut report = VerifyReport { checks: Vec::new(), overall: true };
    let tol = |base: f64| config.tolerance(base);

    // mirror construction of the empty focus against K/(mu H)
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut mirror, mut identity) = (0.0f64, 0.0f64);
    for _ in 0..RANDOM_STATES {
        let (p, st) = random_bound_state(&mut rng, 0.95);
        let cs = conserved_quantities(&st, &p)?;
        let t = geometric_second_focus(&st, &p)?.point;
        mirror = mirror.max(t.distance(cs.second_focus(&p)) / (-p.k / cs.energy));
        let kmu = p.k * p.mu;
        let rhs = 2.0 * p.mu * cs.energy * cs.angular_momentum.norm_squared() + kmu * kmu;
        identity = identity.max((cs.lenz.norm_squared() - rhs).abs() / (kmu * kmu));
    }
    report.push("second_focus_mirror_equals_lenz", mirror, tol(1e-12));
    report.push("lenz_square_identity", identity, tol(1e-12));

    // the configured member through the fixed point
    let member = family_member(&spec, config.psi)?;
    let g = member.geometry;
    let steps = (1.0 / config.dt_fraction).round() as usize;
    let dt = g.period / steps as f64;
    let traj = integrate_numeric(&member.state, &params, dt, steps + steps / 2)?;
    let one_period = crate::propagator::Trajectory { samples: traj.samples[..=steps].to_vec(), params };
    let drift = one_period.drift()?;
    report.push("rk4_lenz_drift", drift.lenz, tol(1e-8));
    report.push("rk4_energy_drift", drift.energy, tol(1e-8));
    report.push("rk4_angular_momentum_drift", drift.angular_momentum, tol(1e-8));
    let closure = one_period.samples.last().map_or(f64::NAN, |s| s.state.r.distance(member.state.r));
    report.push("rk4_period_closure", closure, tol(1e-8));

    let numeric_focal = traj.samples.iter().map(|s| (g.focal_sum(s.state.r) - g.fall_radius).abs()).fold(0.0, f64::max);
    report.push("ellipse_law_numeric", numeric_focal, tol(1e-8));
    let mut analytic_focal: f64 = 0.0;
    for i in 0..1000 {
        let q = propagate_analytic(&member.state, &params, g.period * i as f64 / 1000.0)?;
        analytic_focal = analytic_focal.max((g.focal_sum(q.r) - g.fall_radius).abs());
    }
    report.push("ellipse_law_analytic", analytic_focal, tol(1e-12));

    let detected = detect_period(&traj)?;
    report.push("harmonic_detected_period", (detected - g.period).abs() / g.period, tol(1e-6));
    let harmonic = g.a.powi(3) / (g.period * g.period);
    let expected = params.k / (4.0 * PI * PI * params.mu);
    report.push("harmonic_ratio", (harmonic - expected).abs() / expected, tol(1e-12));

    let tau = g.period / 3.0;
    let first = swept_area(&traj, 0.0, tau)?.area;
    let second = swept_area(&traj, tau, 2.0 * tau)?.area;
    report.push("area_law_equal_intervals", (first - second).abs(), tol(1e-6));
    let full = swept_area(&traj, 0.0, g.period)?.area;
    report.push("area_full_period", (full - PI * g.a * g.b).abs(), tol(1e-6));

    // independent engines on random orbits
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut oracle_gap: f64 = 0.0;
    for _ in 0..ORACLE_STATES {
        let (p, st) = random_bound_state(&mut rng, 0.9);
        let og = orbit_geometry(&st, &p)?;
        let t = integrate_numeric(&st, &p, og.period / steps as f64, steps)?;
        for s in t.samples.iter().step_by((steps / 50).max(1)) {
            let q = propagate_analytic(&st, &p, s.time)?;
            oracle_gap = oracle_gap.max(q.r.distance(s.state.r));
        }
    }
    report.push("analytic_vs_numeric_position", oracle_gap, tol(1e-6));

    // family loci
    let n = config.samples;
    let (a, r) = (spec.a(), spec.radius());
    let locus = focus_locus(&spec, n)?
        .into_iter()
        .map(|t| (t.distance(spec.r_fixed) - (2.0 * a - r)).abs())
        .fold(0.0, f64::max);
    report.push("focus_locus_circle", locus, tol(1e-12));

    let scan = bounding_scan(&spec, n, n)?;
    report.push("bounding_envelope_never_exceeded", (scan.max_focal_sum - scan.bound).max(0.0), tol(1e-9));
    report.push("bounding_envelope_attained", (scan.bound - scan.max_focal_sum).max(0.0), tol(1e-6));

    let envelope = directrix_envelope(&spec, n)?;
    let exact = envelope.envelope.kind == ConicKind::Ellipse;
    report.push(
        match envelope.envelope.kind {
            ConicKind::Ellipse => "directrix_envelope_ellipse",
            ConicKind::Parabola => "directrix_envelope_parabola",
            _ => "directrix_envelope_hyperbola",
        },
        envelope.max_residual(),
        tol(if exact { 1e-10 } else { 1e-8 }),
    );
    if envelope.envelope.kind != ConicKind::Parabola {
        let u = envelope_focus_u(&spec)?;
        let mut gap: f64 = 0.0;
        for psi in psi_grid(n) {
            let m = family_member(&spec, psi)?;
            let v = reflected_focus_v(&spec, &m)?;
            let mirrored = reflect_point_in_line(u, &directrix(&m.state, &params)?)?;
            gap = gap.max(v.distance(mirrored));
        }
        report.push("reflected_focus_v", gap, tol(1e-10));
    }

    report.push("simultaneous_return", simultaneous_return_check(&spec, 32)?, tol(1e-9));

    let (e_min, _) = eccentricity_extremes(&spec);
    let (_, sampled_min) = minimize_eccentricity(&spec, 4096)?;
    report.push("eccentricity_minimum", (sampled_min - e_min).abs(), tol(1e-6));

    Ok(report)
}

/// One row of figure data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub set: String,
    pub psi: Option<f64>,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub name: String,
    pub points: Vec<PointRow>,
    pub conics: BTreeMap<String, ConicSpec>,
    pub stats: BTreeMap<String, f64>,
}

impl Figure {
    fn new(name: &str) -> Self {
        Figure { name: name.into(), points: Vec::new(), conics: BTreeMap::new(), stats: BTreeMap::new() }
    }

    fn point(&mut self, set: &str, psi: Option<f64>, t: f64, q: Vec3) {
        self.points.push(PointRow { set: set.into(), psi, t, x: q.x, y: q.y, z: q.z });
    }

    pub fn set(&self, name: &str) -> impl Iterator<Item = &PointRow> {
        let name = name.to_string();
        self.points.iter().filter(move |p| p.set == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("set,psi,t,x,y,z\n");
        for p in &self.points {
            let psi = p.psi.map(|v| format!("{v:?}")).unwrap_or_default();
            let _ = writeln!(out, "{},{},{:?},{:?},{:?},{:?}", p.set, psi, p.t, p.x, p.y, p.z);
        }
        out
    }
}

const ORBIT_POINTS: usize = 256;
const FAMILY_ORBITS: usize = 12;

/// Data for the three figures: the mirror construction on one orbit, the
/// family with its focus circle and bounding ellipse, and the directrices
/// with their envelope.
pub fn figure_data(config: &RunConfig) -> Result<Vec<Figure>> {
    config.validate()?;
    let spec = config.family_spec()?;
    let params = spec.params;
    let n = config.samples;

    let mut fig1 = Figure::new("fig1");
    let member = family_member(&spec, config.psi)?;
    let g = member.geometry;
    for i in 0..ORBIT_POINTS {
        let time = g.period * i as f64 / ORBIT_POINTS as f64;
        fig1.point("orbit", Some(member.psi), time, propagate_analytic(&member.state, &params, time)?.r);
    }
    for i in 0..ORBIT_POINTS {
        let th = TAU * i as f64 / ORBIT_POINTS as f64;
        fig1.point("fall_circle", None, th, g.fall_radius * spec.direction(th));
    }
    let s = fall_point(&member.state, &params)?;
    let t = geometric_second_focus(&member.state, &params)?.point;
    fig1.point("position", Some(member.psi), 0.0, member.state.r);
    fig1.point("fall_point", Some(member.psi), 0.0, s);
    fig1.point("second_focus", Some(member.psi), 0.0, t);
    let along = member.state.p.normalized().unwrap_or(Vec3::ZERO);
    for (i, lambda) in [-1.0, 1.0].into_iter().enumerate() {
        fig1.point("tangent_line", Some(member.psi), i as f64, member.state.r + lambda * g.a * along);
    }
    fig1.conics.insert("orbit".into(), ConicSpec::from_foci(Vec3::ZERO, t, g.fall_radius, g.plane_normal)?);
    fig1.conics.insert(
        "fall_circle".into(),
        ConicSpec::from_foci(Vec3::ZERO, Vec3::ZERO, 2.0 * g.fall_radius, g.plane_normal)?,
    );
    fig1.stats.insert("fall_point_radius".into(), s.norm());
    fig1.stats.insert("eccentricity".into(), g.e);
    fig1.stats.insert("period".into(), g.period);

    let mut fig2 = Figure::new("fig2");
    for psi in psi_grid(FAMILY_ORBITS) {
        let m = family_member(&spec, psi)?;
        for k in 0..ORBIT_POINTS {
            let th = TAU * k as f64 / ORBIT_POINTS as f64;
            fig2.point("orbit", Some(psi), th, m.geometry.point_from_empty_focus(spec.direction(th)));
        }
    }
    let foci = focus_locus(&spec, n)?;
    let mut radii = Vec::with_capacity(foci.len());
    for (psi, t) in psi_grid(n).into_iter().zip(foci) {
        fig2.point("focus_locus", Some(psi), psi, t);
        radii.push(t.distance(spec.r_fixed));
    }
    let bounding = bounding_envelope(&spec)?;
    for (i, q) in bounding.sample_points(ORBIT_POINTS)?.into_iter().enumerate() {
        fig2.point("bounding", None, i as f64, q);
    }
    fig2.conics.insert("bounding".into(), bounding);
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    fig2.stats.insert("focus_circle_radius".into(), mean);
    fig2.stats.insert("focus_circle_radius_spread".into(), radii.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max));

    let mut fig3 = Figure::new("fig3");
    let report = directrix_envelope(&spec, n)?;
    let reach = 4.0 * spec.a();
    for tangency in &report.per_member {
        let m = family_member(&spec, tangency.psi)?;
        let d = directrix(&m.state, &params)?;
        let along = spec.plane_normal.cross(d.normal);
        for (i, lambda) in [-reach, reach].into_iter().enumerate() {
            fig3.point("directrix", Some(tangency.psi), i as f64, d.base + lambda * along);
        }
    }
    for (i, q) in report.envelope.sample_points(ORBIT_POINTS)?.into_iter().enumerate() {
        fig3.point("envelope", None, i as f64, q);
    }
    fig3.conics.insert("envelope".into(), report.envelope);
    fig3.stats.insert("max_tangency_residual".into(), report.max_residual());

    Ok(vec![fig1, fig2, fig3])
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Write the figure data under `dir`: `figN.json`, or `figN.csv` with a
/// `figN_conics.json` sidecar. Returns the written paths.
pub fn emit_figure_data(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let figures = figure_data(config)?;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for fig in &figures {
        match config.format {
            Format::Json => {
                let path = dir.join(format!("{}.json", fig.name));
                write_file(&path, &to_json(fig)?)?;
                written.push(path);
            }
            Format::Csv => {
                let path = dir.join(format!("{}.csv", fig.name));
                write_file(&path, &fig.to_csv())?;
                written.push(path);
                #[derive(Serialize)]
                struct Sidecar<'a> {
                    conics: &'a BTreeMap<String, ConicSpec>,
                    stats: &'a BTreeMap<String, f64>,
                }
                let path = dir.join(format!("{}_conics.json", fig.name));
                write_file(&path, &to_json(&Sidecar { conics: &fig.conics, stats: &fig.stats })?)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
}

#[derive(Serialize)]
struct OrbitReport {
    params: PhysParams,
    psi: f64,
    state: crate::state::PhaseState,
    conserved: crate::state::ConservedSet,
    fall_point: Vec3,
    second_focus: Vec3,
    geometry: crate::state::OrbitGeometry,
    directrix: Option<crate::geom::Line>,
}

#[derive(Serialize)]
struct FamilyReport {
    spec: FamilySpec,
    a: f64,
    period: f64,
    focus_circle_radius: f64,
    eccentricity_min: f64,
    eccentricity_sup: f64,
    focus_locus: Vec<Vec3>,
    bounding: ConicSpec,
    bounding_scan: crate::family::BoundingScan,
}

/// Produce the text output of a non-figure command.
pub fn render(config: &RunConfig) -> Result<(String, i32)> {
    config.validate()?;
    let spec = config.family_spec()?;
    match config.command {
        Command::Verify => {
            let report = run_verify(config)?;
            let code = if report.overall { EXIT_PASS } else { EXIT_FAIL };
            let text = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let mut s = String::from("name,residual,tolerance,pass\n");
                    for c in &report.checks {
                        let _ = writeln!(s, "{},{:?},{:?},{}", c.name, c.residual, c.tolerance, c.pass);
                    }
                    s
                }
            };
            Ok((text, code))
        }
        Command::Orbit => {
            let m = family_member(&spec, config.psi)?;
            match config.format {
                Format::Json => {
                    let report = OrbitReport {
                        params: spec.params,
                        psi: m.psi,
                        state: m.state,
                        conserved: m.conserved,
                        fall_point: fall_point(&m.state, &spec.params)?,
                        second_focus: geometric_second_focus(&m.state, &spec.params)?.point,
                        geometry: m.geometry,
                        directrix: directrix(&m.state, &spec.params).ok(),
                    };
                    Ok((to_json(&report)?, EXIT_PASS))
                }
                Format::Csv => Ok((figure_data(config)?[0].to_csv(), EXIT_PASS)),
            }
        }
        Command::Family => match config.format {
            Format::Json => {
                let (e_min, e_sup) = eccentricity_extremes(&spec);
                let report = FamilyReport {
                    spec,
                    a: spec.a(),
                    period: spec.period(),
                    focus_circle_radius: 2.0 * spec.a() - spec.radius(),
                    eccentricity_min: e_min,
                    eccentricity_sup: e_sup,
                    focus_locus: focus_locus(&spec, config.samples)?,
                    bounding: bounding_envelope(&spec)?,
                    bounding_scan: bounding_scan(&spec, config.samples, config.samples)?,
                };
                Ok((to_json(&report)?, EXIT_PASS))
            }
            Format::Csv => Ok((figure_data(config)?[1].to_csv(), EXIT_PASS)),
        },
        Command::Envelope => match config.format {
            Format::Json => Ok((to_json(&directrix_envelope(&spec, config.samples)?)?, EXIT_PASS)),
            Format::Csv => Ok((figure_data(config)?[2].to_csv(), EXIT_PASS)),
        },
        Command::Figures => {
            let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let written = emit_figure_data(config, &dir)?;
            let mut s = String::new();
            for p in written {
                let _ = writeln!(s, "{}", p.display());
            }
            Ok((s, EXIT_PASS))
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kepler-geom", version, about = "Kepler ellipses of fixed energy through a fixed point")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Run the invariant suite; exit 0 iff every check passes
    Verify(Flags),
    /// Conserved quantities and elements of the member at --psi
    Orbit(Flags),
    /// Focus circle, eccentricity range and bounding ellipse of the family
    Family(Flags),
    /// Conic enveloped by the directrices, with tangency residuals
    Envelope(Flags),
    /// Write data for the three figures to --out (default ./figures)
    Figures(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    k: f64,
    /// Total energy H (must be negative)
    #[arg(long = "H", default_value_t = -0.28, allow_hyphen_values = true)]
    energy: f64,
    /// Fixed point as x,y,z or a scalar radius along x
    #[arg(long, default_value = "1,0,0", value_parser = parse_point, allow_hyphen_values = true)]
    r: Vec3,
    /// Momentum direction at the fixed point, radians from the radial direction
    #[arg(long, default_value_t = FRAC_PI_2, allow_hyphen_values = true)]
    psi: f64,
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Integration step as a fraction of the period
    #[arg(long, default_value_t = 1e-5)]
    dt_fraction: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiply every check tolerance by this factor
    #[arg(long)]
    tol_override: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_point(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    match nums.as_slice() {
        [r] => Ok(Vec3::new(*r, 0.0, 0.0)),
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected x,y,z or a radius, got {s:?}")),
    }
}

/// Parse command-line arguments (including the program name).
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (command, f) = match cli.command {
        CliCommand::Verify(f) => (Command::Verify, f),
        CliCommand::Orbit(f) => (Command::Orbit, f),
        CliCommand::Family(f) => (Command::Family, f),
        CliCommand::Envelope(f) => (Command::Envelope, f),
        CliCommand::Figures(f) => (Command::Figures, f),
    };
    Ok(RunConfig {
        command,
        mu: f.mu,
        k: f.k,
        energy: f.energy,
        r: f.r,
        psi: f.psi,
        samples: f.samples,
        dt_fraction: f.dt_fraction,
        tol_override: f.tol_override,
        out: f.out,
        format: f.format,
        seed: f.seed,
    })
}

/// Entry point shared by the binary: parse, run, print, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match render(&config) {
        Ok((text, code)) => {
            let written = match (&config.out, config.command) {
                (Some(path), cmd) if cmd != Command::Figures => write_file(path, &text),
                _ => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source }),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
