use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("position at the origin: the force field is undefined there")]
    AtOrigin,

    #[error("unbound orbit: energy {energy} is not negative")]
    Unbound { energy: f64 },

    #[error("degenerate orbit: angular momentum vanishes (collinear motion)")]
    DegenerateOrbit,

    #[error("circular orbit: the Lenz vector vanishes and there is no directrix")]
    CircularOrbit,

    #[error("eccentricity {eccentricity} is too close to 1 for propagation")]
    NearlyRadial { eccentricity: f64 },

    #[error("Kepler equation did not converge (M = {mean_anomaly}, e = {eccentricity})")]
    NonConvergence { mean_anomaly: f64, eccentricity: f64 },

    #[error("trajectory approached the origin to {distance:e} at t = {time}")]
    Singularity { time: f64, distance: f64 },

    #[error("trajectory does not cover a full return to its initial position")]
    InsufficientCoverage,

    #[error("conic kind {0:?} is not supported by this operation")]
    UnsupportedKind(crate::geom::ConicKind),

    #[error("momentum direction psi = {psi} is radial; angular momentum would vanish")]
    RadialDirection { psi: f64 },

    #[error("fixed point lies on the circle r = a; the envelope is a parabola, use directrix_envelope")]
    ParabolicEnvelope,

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
