//! Reference configurations and seeded random bound states.
//!
//! The reference state has `mu = k = 1`, `r = (1,0,0)`, `p = (0,1.2,0)`,
//! so `H = -0.28`, `a = 25/14`, `e = 0.44` and the fixed point sits at
//! perihelion. The reference family fixes that energy and position.

use std::f64::consts::TAU;

use rand::Rng;

use crate::state::{PhaseState, PhysParams};
use crate::vec3::Vec3;

pub const REFERENCE_ENERGY: f64 = -0.28;

pub fn reference_state() -> PhaseState {
    PhaseState { r: Vec3::X, p: Vec3::new(0.0, 1.2, 0.0) }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..TAU);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
}

/// Random bound state built from orbital elements: `mu`, `k` in [0.5, 2],
/// `a` in [0.5, 3], `e` in [0, max_e], random plane, periapsis direction and
/// true anomaly. The construction uses the textbook perifocal formulas, so
/// it does not share code with the focal constructions it is used to test.
pub fn random_bound_state<R: Rng + ?Sized>(rng: &mut R, max_e: f64) -> (PhysParams, PhaseState) {
    let mu = rng.gen_range(0.5..2.0);
    let k = rng.gen_range(0.5..2.0);
    let a = rng.gen_range(0.5..3.0);
    let e = rng.gen_range(0.0..=max_e);
    let nu = rng.gen_range(0.0..TAU);
    state_from_elements(mu, k, a, e, nu, random_frame(rng))
}

fn random_frame<R: Rng + ?Sized>(rng: &mut R) -> (Vec3, Vec3) {
    let normal = random_unit_vector(rng);
    loop {
        let trial = random_unit_vector(rng);
        if let Some(peri) = (trial - trial.dot(normal) * normal).normalized() {
            return (peri, normal.cross(peri));
        }
    }
}

/// State at true anomaly `nu` on the orbit with the given elements, in the
/// frame spanned by the periapsis direction and its in-plane normal.
pub fn state_from_elements(mu: f64, k: f64, a: f64, e: f64, nu: f64, frame: (Vec3, Vec3)) -> (PhysParams, PhaseState) {
    let (peri, side) = frame;
    let semi_latus = a * (1.0 - e * e);
    let radius = semi_latus / (1.0 + e * nu.cos());
    let gm = k / mu;
    let speed_scale = (gm / semi_latus).sqrt();
    let r = radius * (nu.cos() * peri + nu.sin() * side);
    let v = speed_scale * (-nu.sin() * peri + (e + nu.cos()) * side);
    (PhysParams { mu, k }, PhaseState { r, p: mu * v })
}
