//! Two independent dynamics engines used as oracles for each other: an
//! analytic propagator that solves Kepler's equation, and a fixed-step
//! classical Runge-Kutta integrator of `mu r'' = -k r / r^3`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{conserved_quantities, orbit_geometry, ConservedSet, PhaseState, PhysParams};
use crate::vec3::Vec3;

/// Both engines refuse orbits with `e > 1 - MAX_ECCENTRICITY_MARGIN`.
pub const MAX_ECCENTRICITY_MARGIN: f64 = 1e-9;
/// Closest allowed approach to the origin during numerical integration.
pub const MIN_RADIUS: f64 = 1e-6;

const KEPLER_TOLERANCE: f64 = 1e-13;
const KEPLER_MAX_ITER: usize = 50;

/// Solve `M = E - e sin E` for the eccentric anomaly.
///
/// Newton iteration from `E0 = M + e sin M`; any step that leaves the current
/// bracket is replaced by bisection. The result is continuous in `M` (the
/// reduction to `(-pi, pi]` is added back).
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) || !mean_anomaly.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Kepler equation needs 0 <= e < 1 and finite M (e = {e}, M = {mean_anomaly})"
        )));
    }
    let turns = ((mean_anomaly + PI) / TAU).floor();
    let mut m = mean_anomaly - turns * TAU;
    if m > PI {
        m -= TAU;
    }
    let f = |x: f64| x - e * x.sin() - m;

    let (mut lo, mut hi) = (-PI, PI);
    let mut x = m + e * m.sin();
    for _ in 0..KEPLER_MAX_ITER {
        let fx = f(x);
        if fx.abs() <= 0.25 * KEPLER_TOLERANCE {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let next = x - fx / (1.0 - e * x.cos());
        x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    if f(x).abs() > KEPLER_TOLERANCE {
        return Err(Error::NonConvergence { mean_anomaly, eccentricity: e });
    }
    Ok(x + turns * TAU)
}

/// State after time `t` on the Kepler orbit through `state0`.
pub fn propagate_analytic(state0: &PhaseState, params: &PhysParams, t: f64) -> Result<PhaseState> {
    let g = orbit_geometry(state0, params)?;
    if g.e > 1.0 - MAX_ECCENTRICITY_MARGIN {
        return Err(Error::NearlyRadial { eccentricity: g.e });
    }
    let cs = conserved_quantities(state0, params)?;
    // periapsis lies along K; a circle has none, so use the start position
    let peri = if cs.lenz_is_zero(params) {
        state0.r.normalized().ok_or(Error::AtOrigin)?
    } else {
        cs.lenz.normalized().ok_or(Error::CircularOrbit)?
    };
    let side = g.plane_normal.cross(peri);

    let x0 = state0.r.dot(peri);
    let y0 = state0.r.dot(side);
    let e0 = (y0 / g.b).atan2(x0 / g.a + g.e);
    let mean_motion = TAU / g.period;
    let m = e0 - g.e * e0.sin() + mean_motion * t;
    let ecc = solve_kepler(m, g.e)?;

    let (sin_e, cos_e) = ecc.sin_cos();
    let rate = mean_motion / (1.0 - g.e * cos_e);
    let r = g.a * (cos_e - g.e) * peri + g.b * sin_e * side;
    let v = (-g.a * sin_e * rate) * peri + (g.b * cos_e * rate) * side;
    Ok(PhaseState { r, p: params.mu * v })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub state: PhaseState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub params: PhysParams,
}

/// Worst relative deviation of the conserved quantities from their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub energy: f64,
    pub angular_momentum: f64,
    pub lenz: f64,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.time)
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time)
    }

    pub fn initial(&self) -> &PhaseState {
        &self.samples[0].state
    }

    pub fn conserved(&self) -> Result<Vec<ConservedSet>> {
        self.samples.iter().map(|s| conserved_quantities(&s.state, &self.params)).collect()
    }

    pub fn drift(&self) -> Result<DriftReport> {
        let cs0 = conserved_quantities(self.initial(), &self.params)?;
        let s0 = self.initial();
        let h_scale = cs0.energy.abs().max(f64::MIN_POSITIVE);
        let l_scale = {
            let l = cs0.angular_momentum.norm();
            if l > 0.0 {
                l
            } else {
                s0.r.norm() * s0.p.norm()
            }
        };
        let k_scale = if cs0.lenz_is_zero(&self.params) { self.params.k * self.params.mu } else { cs0.lenz.norm() };
        let mut drift = DriftReport { energy: 0.0, angular_momentum: 0.0, lenz: 0.0 };
        for s in &self.samples {
            let cs = conserved_quantities(&s.state, &self.params)?;
            drift.energy = drift.energy.max((cs.energy - cs0.energy).abs() / h_scale);
            drift.angular_momentum =
                drift.angular_momentum.max(cs.angular_momentum.distance(cs0.angular_momentum) / l_scale);
            drift.lenz = drift.lenz.max(cs.lenz.distance(cs0.lenz) / k_scale);
        }
        Ok(drift)
    }
}

fn acceleration(r: Vec3, params: &PhysParams) -> Vec3 {
    let d = r.norm();
    (-params.k / (params.mu * d * d * d)) * r
}

fn rk4_step(s: &PhaseState, params: &PhysParams, dt: f64) -> PhaseState {
    let inv_mu = 1.0 / params.mu;
    let force = |r: Vec3| params.mu * acceleration(r, params);

    let k1r = s.p * inv_mu;
    let k1p = force(s.r);
    let k2r = (s.p + 0.5 * dt * k1p) * inv_mu;
    let k2p = force(s.r + 0.5 * dt * k1r);
    let k3r = (s.p + 0.5 * dt * k2p) * inv_mu;
    let k3p = force(s.r + 0.5 * dt * k2r);
    let k4r = (s.p + dt * k3p) * inv_mu;
    let k4p = force(s.r + dt * k3r);

    PhaseState {
        r: s.r + (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        p: s.p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    }
}

/// Closest approach to the origin along the straight step from `a` to `b`,
/// as (fraction of the step, distance).
fn closest_on_chord(a: Vec3, b: Vec3) -> (f64, f64) {
    let step = b - a;
    let len2 = step.norm_squared();
    let frac = if len2 > 0.0 { (-a.dot(step) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (frac, (a + frac * step).norm())
}

/// Fixed-step RK4 trajectory of `steps` steps of length `dt`, every step stored.
pub fn integrate_numeric(state0: &PhaseState, params: &PhysParams, dt: f64, steps: usize) -> Result<Trajectory> {
    state0.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {dt}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let first = state0.r.norm();
    if first < MIN_RADIUS {
        return Err(Error::Singularity { time: 0.0, distance: first });
    }
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(Sample { time: 0.0, state: *state0 });
    let mut state = *state0;
    for i in 1..=steps {
        let next = rk4_step(&state, params, dt);
        let (frac, d) = closest_on_chord(state.r, next.r);
        if !d.is_finite() || d < MIN_RADIUS {
            return Err(Error::Singularity { time: (i as f64 - 1.0 + frac) * dt, distance: d });
        }
        state = next;
        samples.push(Sample { time: i as f64 * dt, state });
    }
    Ok(Trajectory { samples, params: *params })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaSweep {
    pub t0: f64,
    pub t1: f64,
    pub area: f64,
}

/// Area swept by the radius vector over `[t0, t1]`: trapezoidal quadrature
/// of `|r x r'| / 2` over the stored samples, with linearly interpolated
/// end points.
pub fn swept_area(traj: &Trajectory, t0: f64, t1: f64) -> Result<AreaSweep> {
    let (start, end) = (traj.start_time(), traj.end_time());
    if traj.samples.len() < 2 || !(t0.is_finite() && t1.is_finite()) || t0 >= t1 || t0 < start || t1 > end {
        return Err(Error::InvalidArgument(format!(
            "area interval [{t0}, {t1}] not inside trajectory range [{start}, {end}]"
        )));
    }
    let mu = traj.params.mu;
    let rate = |s: &PhaseState| 0.5 * s.r.cross(s.p).norm() / mu;
    let samples = &traj.samples;
    let interp = |t: f64| -> f64 {
        let j = samples.partition_point(|s| s.time <= t).clamp(1, samples.len() - 1);
        let (a, b) = (&samples[j - 1], &samples[j]);
        let w = (t - a.time) / (b.time - a.time);
        (1.0 - w) * rate(&a.state) + w * rate(&b.state)
    };

    let mut area = 0.0;
    let mut prev = (t0, interp(t0));
    for s in samples.iter().filter(|s| s.time > t0 && s.time < t1) {
        let cur = (s.time, rate(&s.state));
        area += 0.5 * (cur.0 - prev.0) * (cur.1 + prev.1);
        prev = cur;
    }
    area += 0.5 * (t1 - prev.0) * (interp(t1) + prev.1);
    Ok(AreaSweep { t0, t1, area })
}

/// First return time to the initial position.
///
/// Watches `g(t) = (r(t) - r(0)) . p(0)/|p(0)|`, which crosses zero from
/// below when the body comes back past its start, and refines the crossing
/// with a cubic Hermite interpolant built from `g` and `g'`.
pub fn detect_period(traj: &Trajectory) -> Result<f64> {
    let s0 = traj.initial();
    let dir = s0.p.normalized().ok_or(Error::InsufficientCoverage)?;
    let mu = traj.params.mu;
    let g = |s: &PhaseState| (s.r - s0.r).dot(dir);
    let dg = |s: &PhaseState| s.p.dot(dir) / mu;

    let mut farthest: f64 = 0.0;
    for w in traj.samples.windows(2).skip(1) {
        let (a, b) = (&w[0], &w[1]);
        farthest = farthest.max(a.state.r.distance(s0.r));
        let (ga, gb) = (g(&a.state), g(&b.state));
        if !(ga < 0.0 && gb >= 0.0) {
            continue;
        }
        if b.state.r.distance(s0.r) > 0.25 * farthest {
            continue;
        }
        let h = b.time - a.time;
        let (da, db) = (dg(&a.state) * h, dg(&b.state) * h);
        let hermite = |u: f64| {
            let u2 = u * u;
            let u3 = u2 * u;
            (2.0 * u3 - 3.0 * u2 + 1.0) * ga + (u3 - 2.0 * u2 + u) * da + (-2.0 * u3 + 3.0 * u2) * gb + (u3 - u2) * db
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if hermite(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(a.time + 0.5 * (lo + hi) * h);
    }
    Err(Error::InsufficientCoverage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{random_bound_state, reference_state};
    use crate::state::orbit_geometry;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const UNIT: PhysParams = PhysParams { mu: 1.0, k: 1.0 };

    #[test]
    fn near_radial_fall_takes_half_period() {
        // from rest at the fall radius, with a sliver of transverse momentum
        let h = -0.28;
        let apo = -UNIT.k / h;
        for eps in [1e-2, 1e-4] {
            let v = (2.0 * (h + UNIT.k / apo)).sqrt();
            let st = PhaseState::new(Vec3::new(apo, 0.0, 0.0), Vec3::new(-v, eps, 0.0)).unwrap();
            let g = orbit_geometry(&st, &UNIT).unwrap();
            let half = propagate_analytic(&st, &UNIT, 0.5 * g.period).unwrap();
            assert!(half.r.norm() < 2.0 * g.a * (1.0 - g.e) + 1e-12);
            assert!(half.r.norm() < 1e-3 * apo);
        }
    }

    fn circular() -> PhaseState {
        PhaseState { r: Vec3::X, p: Vec3::Y }
    }

    #[test]
    fn kepler_solver_edge_cases() {
        assert_eq!(solve_kepler(0.0, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(solve_kepler(PI, 0.9).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(solve_kepler(1.0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        let e = solve_kepler(7.0 * TAU + 0.3, 0.2).unwrap();
        assert!((e - 7.0 * TAU).abs() < PI);
        assert!(solve_kepler(1.0, 1.0).is_err());
        assert!(solve_kepler(f64::NAN, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn kepler_residual_is_tiny(m in -50.0f64..50.0, e in 0.0f64..(1.0 - 1e-9)) {
            let big_e = solve_kepler(m, e).unwrap();
            prop_assert!((big_e - e * big_e.sin() - m).abs() <= 1e-13 * (1.0 + m.abs() / 10.0));
        }
    }

    #[test]
    fn analytic_is_periodic() {
        let start = reference_state();
        let g = orbit_geometry(&start, &UNIT).unwrap();
        let back = propagate_analytic(&start, &UNIT, g.period).unwrap();
        assert!(back.r.distance(start.r) < 1e-10);
        assert!(back.p.distance(start.p) < 1e-10);
    }

    #[test]
    fn analytic_half_period_reaches_aphelion() {
        let start = reference_state();
        let g = orbit_geometry(&start, &UNIT).unwrap();
        let q = propagate_analytic(&start, &UNIT, 0.5 * g.period).unwrap().r;
        assert_abs_diff_eq!(g.focal_sum(q), 2.0 * g.a, epsilon = 1e-12);
        // perihelion at (1,0,0), so aphelion is at -a(1+e) on the x axis
        assert!(q.distance(Vec3::new(-g.a * (1.0 + g.e), 0.0, 0.0)) < 1e-12);
        assert!(q.x * start.r.x < 0.0);
    }

    #[test]
    fn analytic_quarter_turn_of_unit_circle() {
        let q = propagate_analytic(&circular(), &UNIT, 0.25 * TAU).unwrap();
        assert!(q.r.distance(Vec3::Y) < 1e-14);
        assert!(q.p.distance(-Vec3::X) < 1e-14);
    }

    #[test]
    fn analytic_rejects_unbound_and_radial() {
        let fast = PhaseState { r: Vec3::X, p: Vec3::new(0.0, 2.0, 0.0) };
        assert!(matches!(propagate_analytic(&fast, &UNIT, 1.0), Err(Error::Unbound { .. })));
        let radial = PhaseState { r: Vec3::X, p: Vec3::new(0.3, 0.0, 0.0) };
        assert!(matches!(propagate_analytic(&radial, &UNIT, 1.0), Err(Error::DegenerateOrbit)));
        // tiny tangential speed: e within 1e-9 of 1
        let nearly = PhaseState { r: Vec3::X, p: Vec3::new(0.0, 1e-6, 0.0) };
        assert!(matches!(propagate_analytic(&nearly, &UNIT, 1.0), Err(Error::NearlyRadial { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn analytic_conserves_exactly(seed in any::<u64>(), frac in 0.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (params, st) = random_bound_state(&mut rng, 0.95);
            let g = orbit_geometry(&st, &params).unwrap();
            let q = propagate_analytic(&st, &params, frac * g.period).unwrap();
            let c0 = conserved_quantities(&st, &params).unwrap();
            let c1 = conserved_quantities(&q, &params).unwrap();
            let kmu = params.k * params.mu;
            prop_assert!((c1.energy - c0.energy).abs() <= 1e-12 * c0.energy.abs());
            prop_assert!(c1.angular_momentum.distance(c0.angular_momentum) <= 1e-12 * c0.angular_momentum.norm());
            prop_assert!(c1.lenz.distance(c0.lenz) <= 1e-11 * kmu);
            prop_assert!((g.focal_sum(q.r) - g.fall_radius).abs() <= 1e-12 * g.fall_radius);
        }
    }

    #[test]
    fn rk4_reference_period() {
        let start = reference_state();
        let g = orbit_geometry(&start, &UNIT).unwrap();
        let steps = 100_000;
        let traj = integrate_numeric(&start, &UNIT, g.period / steps as f64, steps).unwrap();
        assert_eq!(traj.samples.len(), steps + 1);
        let last = traj.samples.last().unwrap();
        assert_relative_eq!(last.time, g.period, max_relative = 1e-12);
        assert!(last.state.r.distance(start.r) < 1e-8);
        let drift = traj.drift().unwrap();
        assert!(drift.lenz <= 1e-8, "{drift:?}");
        assert!(drift.energy <= 1e-8, "{drift:?}");
        assert!(drift.angular_momentum <= 1e-8, "{drift:?}");
    }

    #[test]
    fn rk4_circle_keeps_radius() {
        let steps = 100_000;
        let traj = integrate_numeric(&circular(), &UNIT, TAU / steps as f64, steps).unwrap();
        let worst = traj.samples.iter().map(|s| (s.state.r.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn rk4_reports_singularity() {
        // nearly radial infall from rest reaches the origin in about T/2
        let st = PhaseState { r: Vec3::X, p: Vec3::new(0.0, 1e-9, 0.0) };
        let err = integrate_numeric(&st, &UNIT, 1e-3, 10_000).unwrap_err();
        match err {
            Error::Singularity { time, distance } => {
                assert!(distance < MIN_RADIUS);
                // free fall from rest at r = 1: pi / (2 sqrt(2))
                assert!((time - PI / 8f64.sqrt()).abs() < 0.01, "{time}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(integrate_numeric(&circular(), &UNIT, 0.0, 10).is_err());
        assert!(integrate_numeric(&circular(), &UNIT, 0.1, 0).is_err());
    }

    #[test]
    fn swept_areas() {
        let steps = 100_000;
        let traj = integrate_numeric(&circular(), &UNIT, TAU / steps as f64, steps).unwrap();
        let full = swept_area(&traj, 0.0, traj.end_time()).unwrap();
        assert_abs_diff_eq!(full.area, PI, epsilon = 1e-6);

        let start = reference_state();
        let g = orbit_geometry(&start, &UNIT).unwrap();
        let traj = integrate_numeric(&start, &UNIT, g.period / steps as f64, steps).unwrap();
        let full = swept_area(&traj, 0.0, traj.end_time()).unwrap();
        assert_abs_diff_eq!(full.area, PI * g.a * g.b, epsilon = 1e-6);
        assert_abs_diff_eq!(full.area, 1.2 * g.period / 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(full.area, 8.995_992_366_228_825, epsilon = 1e-6);

        let tau = 0.37 * g.period;
        let first = swept_area(&traj, 0.0, tau).unwrap().area;
        let second = swept_area(&traj, tau, 2.0 * tau).unwrap().area;
        assert_abs_diff_eq!(first, second, epsilon = 1e-6);
        // off-grid end points
        let a = swept_area(&traj, 0.123_456, 1.123_456).unwrap().area;
        assert_abs_diff_eq!(a, 0.6, epsilon = 1e-9);

        assert!(swept_area(&traj, -1.0, 1.0).is_err());
        assert!(swept_area(&traj, 2.0, 1.0).is_err());
        assert!(swept_area(&traj, 0.0, 2.0 * g.period).is_err());
    }

    #[test]
    fn period_detection() {
        let start = reference_state();
        let g = orbit_geometry(&start, &UNIT).unwrap();
        let dt = g.period / 1e5;
        let traj = integrate_numeric(&start, &UNIT, dt, 150_000).unwrap();
        let t = detect_period(&traj).unwrap();
        assert_relative_eq!(t, g.period, max_relative = 1e-6);
        assert_abs_diff_eq!(t, 14.993_320_610_381_375, epsilon = 2e-5);

        let traj = integrate_numeric(&circular(), &UNIT, TAU / 1e5, 150_000).unwrap();
        assert_abs_diff_eq!(detect_period(&traj).unwrap(), TAU, epsilon = 1e-8);

        let short = integrate_numeric(&start, &UNIT, dt, 90_000).unwrap();
        assert!(matches!(detect_period(&short), Err(Error::InsufficientCoverage)));
    }

    #[test]
    fn oracles_agree_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let (params, st) = random_bound_state(&mut rng, 0.9);
            let g = orbit_geometry(&st, &params).unwrap();
            let steps = 100_000;
            let traj = integrate_numeric(&st, &params, g.period / steps as f64, steps).unwrap();
            let drift = traj.drift().unwrap();
            assert!(drift.energy <= 1e-8 && drift.angular_momentum <= 1e-8 && drift.lenz <= 1e-8, "{drift:?}");
            for s in traj.samples.iter().step_by(997) {
                let q = propagate_analytic(&st, &params, s.time).unwrap();
                assert!(q.r.distance(s.state.r) <= 1e-6, "e = {}", g.e);
                assert!((g.focal_sum(s.state.r) - g.fall_radius).abs() <= 1e-8);
            }
        }
    }
}
