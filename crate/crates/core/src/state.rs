//! Conserved quantities of the inverse-square problem and the focal
//! construction of the orbit: fall circle, fall point, mirrored second focus,
//! ellipse elements and the directrix with respect to the attracting center.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{reflect_point_in_line, Line};
use crate::vec3::Vec3;

/// `L` is treated as zero when `|L|^2 <= ANGULAR_MOMENTUM_ZERO * (|r||p|)^2`.
pub const ANGULAR_MOMENTUM_ZERO: f64 = 1e-24;
/// `K` is treated as zero when `|K| < LENZ_ZERO * k * mu`.
pub const LENZ_ZERO: f64 = 1e-12;

/// Reduced mass `mu` and coupling constant `k` of the force `-k r / r^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub mu: f64,
    pub k: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams { mu: 1.0, k: 1.0 }
    }
}

impl PhysParams {
    pub fn new(mu: f64, k: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("k", k)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(PhysParams { mu, k })
    }

    /// Two-body reduction: `mu = mM/(m+M)`, `k = G m M`.
    pub fn from_masses(g: f64, m: f64, big_m: f64) -> Result<Self> {
        for (name, v) in [("G", g), ("m", m), ("M", big_m)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        PhysParams::new(m * big_m / (m + big_m), g * m * big_m)
    }

    pub fn potential(&self, r: f64) -> f64 {
        -self.k / r
    }
}

pub fn params_from_masses(g: f64, m: f64, big_m: f64) -> Result<PhysParams> {
    PhysParams::from_masses(g, m, big_m)
}

/// Position and momentum of the reduced body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub r: Vec3,
    pub p: Vec3,
}

impl PhaseState {
    pub fn new(r: Vec3, p: Vec3) -> Result<Self> {
        let s = PhaseState { r, p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || !self.p.is_finite() {
            return Err(Error::InvalidArgument("state has non-finite components".into()));
        }
        if self.r.norm() == 0.0 {
            return Err(Error::AtOrigin);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedSet {
    /// `L = r x p`
    pub angular_momentum: Vec3,
    /// `H = p^2/(2 mu) - k/r`
    pub energy: f64,
    /// `K = p x L - k mu r/|r|`
    pub lenz: Vec3,
}

impl ConservedSet {
    /// `K / (mu H)`, the second focus of a bound orbit.
    pub fn second_focus(&self, params: &PhysParams) -> Vec3 {
        self.lenz / (params.mu * self.energy)
    }

    pub fn eccentricity(&self, params: &PhysParams) -> f64 {
        self.lenz.norm() / (params.k * params.mu)
    }

    pub fn is_bound(&self) -> bool {
        self.energy < 0.0
    }

    pub fn lenz_is_zero(&self, params: &PhysParams) -> bool {
        self.lenz.norm() < LENZ_ZERO * params.k * params.mu
    }
}

fn angular_momentum_is_zero(state: &PhaseState, l: Vec3) -> bool {
    let scale = state.r.norm() * state.p.norm();
    l.norm_squared() <= ANGULAR_MOMENTUM_ZERO * scale * scale
}

pub fn conserved_quantities(state: &PhaseState, params: &PhysParams) -> Result<ConservedSet> {
    state.validate()?;
    let r = state.r.norm();
    let l = state.r.cross(state.p);
    let energy = state.p.norm_squared() / (2.0 * params.mu) + params.potential(r);
    let lenz = state.p.cross(l) - (params.k * params.mu / r) * state.r;
    Ok(ConservedSet { angular_momentum: l, energy, lenz })
}

fn bound_energy(state: &PhaseState, params: &PhysParams) -> Result<f64> {
    let h = conserved_quantities(state, params)?.energy;
    if h < 0.0 {
        Ok(h)
    } else {
        Err(Error::Unbound { energy: h })
    }
}

/// Central projection of the position onto the fall circle of radius `-k/H`.
pub fn fall_point(state: &PhaseState, params: &PhysParams) -> Result<Vec3> {
    let h = bound_energy(state, params)?;
    Ok((-params.k / (state.r.norm() * h)) * state.r)
}

/// Second focus obtained by mirroring the fall point in the tangent line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondFocus {
    pub point: Vec3,
    /// The body is at rest on the fall circle; the orbit is the radial
    /// segment and the second focus coincides with the fall point.
    pub at_rest: bool,
}

pub fn geometric_second_focus(state: &PhaseState, params: &PhysParams) -> Result<SecondFocus> {
    let s = fall_point(state, params)?;
    let momentum_scale = (2.0 * params.mu * params.k / state.r.norm()).sqrt();
    if state.p.norm() <= 1e-15 * momentum_scale {
        return Ok(SecondFocus { point: s, at_rest: true });
    }
    let l = state.r.cross(state.p);
    if angular_momentum_is_zero(state, l) {
        return Err(Error::DegenerateOrbit);
    }
    let tangent = Line::from_normal(state.r, state.p.cross(l))?;
    Ok(SecondFocus { point: reflect_point_in_line(s, &tangent)?, at_rest: false })
}

/// Elements of a bound orbit with foci at the origin and at `focus_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitGeometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
    pub focus_origin: Vec3,
    pub focus_t: Vec3,
    pub period: f64,
    /// `-k/H`, equal to `2a`.
    pub fall_radius: f64,
    pub plane_normal: Vec3,
}

impl OrbitGeometry {
    /// Point of the orbit seen from the empty focus `t` in direction `dir`
    /// (a unit vector in the orbit plane).
    pub fn point_from_empty_focus(&self, dir: Vec3) -> Vec3 {
        let axis = self.focus_t.normalized();
        let cos_angle = axis.map_or(0.0, |ax| dir.dot(ax));
        let rho = self.a * (1.0 - self.e * self.e) / (1.0 + self.e * cos_angle);
        self.focus_t + rho * dir
    }

    /// `|q| + |q - t|`, equal to `2a` on the orbit.
    pub fn focal_sum(&self, q: Vec3) -> f64 {
        q.norm() + q.distance(self.focus_t)
    }
}

/// Elements of a bound orbit.
///
/// A collinear orbit (`L = 0`) is rejected with `DegenerateOrbit`. Such a
/// body falls from rest at `-k/H` into the centre in `T/2`, where `T` is the
/// period of any ellipse of the same energy; this is the `e -> 1` limit and is
/// not computed here.
pub fn orbit_geometry(state: &PhaseState, params: &PhysParams) -> Result<OrbitGeometry> {
    let cs = conserved_quantities(state, params)?;
    if !cs.is_bound() {
        return Err(Error::Unbound { energy: cs.energy });
    }
    let l = cs.angular_momentum;
    if angular_momentum_is_zero(state, l) {
        return Err(Error::DegenerateOrbit);
    }
    let (mu, k, h) = (params.mu, params.k, cs.energy);
    let l_norm = l.norm();
    let a = -k / (2.0 * h);
    let b = (-l.norm_squared() / (2.0 * mu * h)).sqrt();
    let t = cs.second_focus(params);
    let c = 0.5 * t.norm();
    let e = cs.eccentricity(params);
    let period = 2.0 * PI * mu * a * b / l_norm;
    Ok(OrbitGeometry {
        a,
        b,
        c,
        e,
        focus_origin: Vec3::ZERO,
        focus_t: t,
        period,
        fall_radius: -k / h,
        plane_normal: l / l_norm,
    })
}

/// Directrix with respect to the origin focus: `L^2 K / K^2 + K^perp`.
pub fn directrix(state: &PhaseState, params: &PhysParams) -> Result<Line> {
    let cs = conserved_quantities(state, params)?;
    if cs.lenz_is_zero(params) {
        return Err(Error::CircularOrbit);
    }
    let k2 = cs.lenz.norm_squared();
    let base = (cs.angular_momentum.norm_squared() / k2) * cs.lenz;
    Line::from_normal(base, cs.lenz)
}
