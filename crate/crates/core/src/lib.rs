//! Kepler ellipses of a fixed energy through a fixed point.
//!
//! The crate computes the conserved quantities of the inverse-square
//! problem, rebuilds the empty focus of an orbit by mirroring the fall point
//! in the tangent line, and studies the one-parameter family of equal-energy
//! orbits through a point: the circle of empty foci, the bounding ellipse,
//! and the conic enveloped by the directrices. An analytic Kepler-equation
//! propagator and a fixed-step RK4 integrator serve as independent oracles.

pub mod cli;
pub mod error;
pub mod family;
pub mod geom;
pub mod propagator;
pub mod scenarios;
pub mod state;
pub mod vec3;

pub use error::{Error, Result};
pub use geom::{conic_tangency_residual, point_line_distance, reflect_point_in_line, ConicKind, ConicSpec, Line};
pub use propagator::{
    detect_period, integrate_numeric, propagate_analytic, solve_kepler, swept_area, AreaSweep, Trajectory,
};
pub use state::{
    conserved_quantities, directrix, fall_point, geometric_second_focus, orbit_geometry, params_from_masses,
    ConservedSet, OrbitGeometry, PhaseState, PhysParams,
};
pub use vec3::Vec3;
