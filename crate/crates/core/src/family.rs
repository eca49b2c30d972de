//! The one-parameter family of Kepler ellipses with a fixed energy `H < 0`
//! through a fixed point, and its loci.
//!
//! Members are charted by the direction `psi` of the momentum at the fixed
//! point, measured in the family plane from the radial direction. The
//! momentum magnitude is fixed by the energy. Radial directions
//! (`psi = 0, pi`) are excluded since the angular momentum would vanish.
//!
//! With `a = -k/(2H)` and `r = |r_fixed|`:
//!
//! * the empty foci `t` lie on the circle about `r_fixed` of radius `2a - r`;
//! * every orbit stays inside the ellipse with foci `0`, `r_fixed` and focal
//!   sum `4a - r`, and touches it;
//! * the directrices (with respect to the origin) envelope the conic with
//!   foci `r_fixed` and `u = a r_fixed / (a - r)`: an ellipse for `r < a`, a
//!   hyperbola for `a < r < 2a`, and a parabola at `r = a`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{conic_tangency_residual, ConicKind, ConicSpec, Line};
use crate::propagator::propagate_analytic;
use crate::state::{
    conserved_quantities, directrix, orbit_geometry, ConservedSet, OrbitGeometry, PhaseState, PhysParams,
};
use crate::vec3::Vec3;

/// Momentum directions within this angle of `0` or `pi` are rejected.
pub const RADIAL_TOLERANCE: f64 = 1e-9;
/// `r` counts as equal to `a` when `|r - a| <= SHELL_TOLERANCE * a`.
pub const SHELL_TOLERANCE: f64 = 1e-9;
/// Relative offset of the two near-limit envelopes used to fit the parabola.
pub const PARABOLA_FIT_OFFSET: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub params: PhysParams,
    pub energy: f64,
    pub r_fixed: Vec3,
    pub plane_normal: Vec3,
}

impl FamilySpec {
    /// Validates `H < 0`, `0 < r < 2a`, and that `r_fixed` lies in the plane
    /// through the origin with the given normal. The normal is normalized.
    pub fn new(params: PhysParams, energy: f64, r_fixed: Vec3, plane_normal: Vec3) -> Result<Self> {
        let params = PhysParams::new(params.mu, params.k)?;
        if !(energy < 0.0 && energy.is_finite()) {
            return Err(Error::Unbound { energy });
        }
        if !r_fixed.is_finite() {
            return Err(Error::InvalidArgument("fixed point has non-finite components".into()));
        }
        let plane_normal =
            plane_normal.normalized().ok_or_else(|| Error::InvalidArgument("plane normal is zero".into()))?;
        let r = r_fixed.norm();
        if r == 0.0 {
            return Err(Error::AtOrigin);
        }
        let fall = -params.k / energy;
        if r >= fall {
            return Err(Error::OutOfRange(format!("fixed point radius {r} must be below the fall radius {fall}")));
        }
        if r_fixed.dot(plane_normal).abs() > 1e-12 * r {
            return Err(Error::InvalidArgument("fixed point is not in the family plane".into()));
        }
        Ok(FamilySpec { params, energy, r_fixed, plane_normal })
    }

    /// Semi-major axis shared by all members.
    pub fn a(&self) -> f64 {
        -self.params.k / (2.0 * self.energy)
    }

    pub fn radius(&self) -> f64 {
        self.r_fixed.norm()
    }

    pub fn momentum_magnitude(&self) -> f64 {
        (2.0 * self.params.mu * (self.energy + self.params.k / self.radius())).sqrt()
    }

    pub fn radial_unit(&self) -> Vec3 {
        self.r_fixed / self.radius()
    }

    /// In-plane unit vector a quarter turn ahead of the radial direction.
    pub fn transverse_unit(&self) -> Vec3 {
        self.plane_normal.cross(self.radial_unit())
    }

    /// In-plane unit vector at angle `angle` from the radial direction.
    pub fn direction(&self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        c * self.radial_unit() + s * self.transverse_unit()
    }

    /// Common period `2 pi sqrt(mu a^3 / k)`.
    pub fn period(&self) -> f64 {
        TAU * (self.params.mu * self.a().powi(3) / self.params.k).sqrt()
    }

    pub fn envelope_kind(&self) -> ConicKind {
        let (a, r) = (self.a(), self.radius());
        if (r - a).abs() <= SHELL_TOLERANCE * a {
            ConicKind::Parabola
        } else if r < a {
            ConicKind::Ellipse
        } else {
            ConicKind::Hyperbola
        }
    }

    fn with_radius(&self, r: f64) -> Result<FamilySpec> {
        FamilySpec::new(self.params, self.energy, self.radial_unit() * r, self.plane_normal)
    }
}

/// Uniform grid of `n` momentum angles that never hits `0` or `pi`: offset
/// by half a step for even `n` and a quarter step for odd `n`.
pub fn psi_grid(n: usize) -> Vec<f64> {
    let offset = if n.is_multiple_of(2) { 0.5 } else { 0.25 };
    (0..n).map(|j| (j as f64 + offset) * TAU / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub psi: f64,
    pub state: PhaseState,
    pub conserved: ConservedSet,
    pub geometry: OrbitGeometry,
}

pub fn family_member(spec: &FamilySpec, psi: f64) -> Result<FamilyMember> {
    if !psi.is_finite() {
        return Err(Error::InvalidArgument(format!("psi must be finite, got {psi}")));
    }
    let wrapped = psi.rem_euclid(TAU);
    let off_radial = wrapped.min((wrapped - PI).abs()).min(TAU - wrapped);
    if off_radial <= RADIAL_TOLERANCE {
        return Err(Error::RadialDirection { psi });
    }
    let state = PhaseState::new(spec.r_fixed, spec.momentum_magnitude() * spec.direction(psi))?;
    let conserved = conserved_quantities(&state, &spec.params)?;
    let geometry = orbit_geometry(&state, &spec.params)?;
    Ok(FamilyMember { psi, state, conserved, geometry })
}

fn members(spec: &FamilySpec, n: usize) -> Result<Vec<FamilyMember>> {
    psi_grid(n).into_iter().map(|psi| family_member(spec, psi)).collect()
}

/// Empty foci of `n` members, all on the circle about `r_fixed` of radius `2a - r`.
pub fn focus_locus(spec: &FamilySpec, n: usize) -> Result<Vec<Vec3>> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {n}")));
    }
    Ok(members(spec, n)?.into_iter().map(|m| m.geometry.focus_t).collect())
}

/// Infimum and supremum of the member eccentricities: `|1 - r/a|` (attained
/// at `psi = pi/2`) and `1` (the radial fall, not a valid member).
pub fn eccentricity_extremes(spec: &FamilySpec) -> (f64, f64) {
    let e_min = (1.0 + 2.0 * spec.energy * spec.radius() / spec.params.k).abs();
    (e_min, 1.0)
}

/// Smallest and largest eccentricity over an `n`-point psi grid.
pub fn sampled_eccentricity_range(spec: &FamilySpec, n: usize) -> Result<(f64, f64)> {
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for psi in psi_grid(n) {
        let e = family_member(spec, psi)?.geometry.e;
        range = (range.0.min(e), range.1.max(e));
    }
    Ok(range)
}

/// Grid minimum of the member eccentricity, polished by golden-section
/// search between the neighbours of the best grid point.
pub fn minimize_eccentricity(spec: &FamilySpec, n: usize) -> Result<(f64, f64)> {
    let grid = psi_grid(n.max(4));
    let ecc = |psi: f64| family_member(spec, psi).map(|m| m.geometry.e);
    let mut best = (f64::NAN, f64::INFINITY);
    for &psi in &grid {
        let e = ecc(psi)?;
        if e < best.1 {
            best = (psi, e);
        }
    }
    let step = TAU / grid.len() as f64;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (ecc(x1)?, ecc(x2)?);
    for _ in 0..100 {
        if f1 < f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - ratio * (hi - lo);
            f1 = ecc(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + ratio * (hi - lo);
            f2 = ecc(x2)?;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let polished = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    Ok(if polished.1 < best.1 { polished } else { best })
}

/// Ellipse with foci `0`, `r_fixed` and focal sum `4a - r` that encloses every member.
pub fn bounding_envelope(spec: &FamilySpec) -> Result<ConicSpec> {
    ConicSpec::from_foci(Vec3::ZERO, spec.r_fixed, 4.0 * spec.a() - spec.radius(), spec.plane_normal)
}

/// Largest `|q| + |q - r_fixed|` found on a psi x phase grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingScan {
    pub max_focal_sum: f64,
    pub psi: f64,
    pub point: Vec3,
    pub bound: f64,
}

/// Scan `n_psi` members at `n_phase` orbit points each. The orbit phase is
/// the polar angle around the member's empty focus, measured from the radial
/// direction of the fixed point.
pub fn bounding_scan(spec: &FamilySpec, n_psi: usize, n_phase: usize) -> Result<BoundingScan> {
    if n_psi == 0 || n_phase == 0 {
        return Err(Error::InvalidArgument("bounding scan needs a non-empty grid".into()));
    }
    let dirs: Vec<Vec3> = (0..n_phase).map(|k| spec.direction(TAU * k as f64 / n_phase as f64)).collect();
    let mut best = BoundingScan {
        max_focal_sum: f64::NEG_INFINITY,
        psi: f64::NAN,
        point: Vec3::ZERO,
        bound: 4.0 * spec.a() - spec.radius(),
    };
    for m in members(spec, n_psi)? {
        for &dir in &dirs {
            let q = m.geometry.point_from_empty_focus(dir);
            let sum = q.norm() + q.distance(spec.r_fixed);
            if sum > best.max_focal_sum {
                best.max_focal_sum = sum;
                best.psi = m.psi;
                best.point = q;
            }
        }
    }
    Ok(best)
}

/// `u = a r_fixed / (a - r)`, the second focus of the directrix envelope.
pub fn envelope_focus_u(spec: &FamilySpec) -> Result<Vec3> {
    let (a, r) = (spec.a(), spec.radius());
    if spec.envelope_kind() == ConicKind::Parabola {
        return Err(Error::ParabolicEnvelope);
    }
    Ok((a / (a - r)) * spec.r_fixed)
}

/// Mirror image of `u` in the member's directrix, from the closed form
/// `v = (a r_fixed - r t) / (a - r)`.
pub fn reflected_focus_v(spec: &FamilySpec, member: &FamilyMember) -> Result<Vec3> {
    if spec.envelope_kind() == ConicKind::Parabola {
        return Err(Error::ParabolicEnvelope);
    }
    if member.conserved.lenz_is_zero(&spec.params) {
        return Err(Error::CircularOrbit);
    }
    let (a, r) = (spec.a(), spec.radius());
    Ok((a * spec.r_fixed - r * member.geometry.focus_t) / (a - r))
}

/// Closed-form envelope for `r != a`: foci `r_fixed` and `u`, focal
/// constant `|(2a - r) r / (a - r)|`.
fn focal_envelope(spec: &FamilySpec) -> Result<ConicSpec> {
    let (a, r) = (spec.a(), spec.radius());
    let u = envelope_focus_u(spec)?;
    ConicSpec::from_foci(spec.r_fixed, u, ((2.0 * a - r) * r / (a - r)).abs(), spec.plane_normal)
}

/// Parabola at `r = a`, focus `r_fixed`. Its directrix is the mean of the
/// focal directrices of the ellipse and hyperbola envelopes at
/// `r = a (1 -+ PARABOLA_FIT_OFFSET)`.
fn fitted_parabola(spec: &FamilySpec) -> Result<ConicSpec> {
    let a = spec.a();
    let inner = focal_envelope(&spec.with_radius(a * (1.0 - PARABOLA_FIT_OFFSET))?)?.focal_directrix()?;
    let outer = focal_envelope(&spec.with_radius(a * (1.0 + PARABOLA_FIT_OFFSET))?)?.focal_directrix()?;
    let base = 0.5 * (inner.base + outer.base);
    ConicSpec::parabola(spec.r_fixed, Line::new(base, spec.radial_unit())?, spec.plane_normal)
}

/// Which branch of a hyperbolic envelope a directrix touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// The branch wrapping the fixed point.
    FixedPoint,
    /// The branch wrapping `u`.
    FocusU,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberTangency {
    pub psi: f64,
    pub residual: f64,
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedMember {
    pub psi: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub envelope: ConicSpec,
    /// Second focus `u`; `None` for the parabola, whose directrix is in `envelope`.
    pub u_focus: Option<Vec3>,
    /// The parabola's directrix is fitted numerically rather than closed-form.
    pub fitted: bool,
    pub per_member: Vec<MemberTangency>,
    pub skipped: Vec<SkippedMember>,
}

impl EnvelopeReport {
    pub fn max_residual(&self) -> f64 {
        self.per_member.iter().map(|m| m.residual).fold(0.0, f64::max)
    }
}

/// The conic enveloped by the directrices of the family, with the tangency
/// residual of every sampled member's directrix against it.
pub fn directrix_envelope(spec: &FamilySpec, n: usize) -> Result<EnvelopeReport> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {n}")));
    }
    let (envelope, u_focus, fitted) = match spec.envelope_kind() {
        ConicKind::Parabola => (fitted_parabola(spec)?, None, true),
        _ => (focal_envelope(spec)?, Some(envelope_focus_u(spec)?), false),
    };

    let mut per_member = Vec::with_capacity(n);
    let mut skipped = Vec::new();
    for psi in psi_grid(n) {
        let member = match family_member(spec, psi) {
            Ok(m) => m,
            Err(e) => {
                skipped.push(SkippedMember { psi, reason: e.to_string() });
                continue;
            }
        };
        let line = match directrix(&member.state, &spec.params) {
            Ok(l) => l,
            Err(e) => {
                skipped.push(SkippedMember { psi, reason: e.to_string() });
                continue;
            }
        };
        let residual = conic_tangency_residual(&line, &envelope)?;
        let branch = if envelope.kind == ConicKind::Hyperbola {
            envelope.tangent_point(&line)?.map(|q| {
                if q.distance(envelope.focus1) < q.distance(envelope.focus2) {
                    Branch::FixedPoint
                } else {
                    Branch::FocusU
                }
            })
        } else {
            None
        };
        per_member.push(MemberTangency { psi, residual, branch });
    }
    Ok(EnvelopeReport { envelope, u_focus, fitted, per_member, skipped })
}

/// Directrix of the elliptic envelope with respect to its focus `r_fixed`:
/// the line through `-(2a - r) r_hat` normal to `r_hat`.
pub fn envelope_directrix_of_e(spec: &FamilySpec) -> Result<Line> {
    if spec.envelope_kind() != ConicKind::Ellipse {
        return Err(Error::OutOfRange(format!(
            "envelope directrix needs r < a (r = {}, a = {})",
            spec.radius(),
            spec.a()
        )));
    }
    let r = spec.radius();
    Line::new(-(2.0 * spec.a() - r) * spec.r_fixed / r, spec.radial_unit())
}

/// Propagate `n` members by the common period and return the largest
/// distance of any end point from the fixed point.
pub fn simultaneous_return_check(spec: &FamilySpec, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    let period = spec.period();
    let mut worst: f64 = 0.0;
    for m in members(spec, n)? {
        let end = propagate_analytic(&m.state, &spec.params, period)?;
        worst = worst.max(end.r.distance(spec.r_fixed));
    }
    Ok(worst)
}
