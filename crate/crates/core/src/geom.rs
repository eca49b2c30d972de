//! Planar primitives: lines stored by base point and unit normal, focal
//! descriptions of conics, and the focal-reflection tangency test.
//!
//! A line `Line { base, normal }` is the set of points `q` with
//! `(q - base) · normal = 0`. In three dimensions that is a plane; every
//! caller works inside an orbit plane containing `normal`, where it is the
//! usual line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Allowed deviation of a line normal from unit length.
pub const NORMAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub base: Vec3,
    pub normal: Vec3,
}

impl Line {
    /// Build a line from a base point and a normal that must already be unit.
    pub fn new(base: Vec3, normal: Vec3) -> Result<Self> {
        let line = Line { base, normal };
        line.validate()?;
        Ok(line)
    }

    /// Build a line from a base point and any nonzero normal, normalizing it.
    pub fn from_normal(base: Vec3, normal: Vec3) -> Result<Self> {
        let normal = normal.normalized().ok_or_else(|| Error::InvalidArgument("line normal is zero".into()))?;
        Line::new(base, normal)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.base.is_finite() || !self.normal.is_finite() {
            return Err(Error::InvalidArgument("line has non-finite components".into()));
        }
        let dev = (self.normal.norm() - 1.0).abs();
        if dev > NORMAL_TOLERANCE {
            return Err(Error::InvalidArgument(format!("line normal is not unit (|n| - 1 = {dev:e})")));
        }
        Ok(())
    }

    /// Signed offset of `p` along the normal.
    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.base).dot(self.normal)
    }
}

/// Mirror `p` in `line`: `p - 2((p - base)·n) n`.
pub fn reflect_point_in_line(p: Vec3, line: &Line) -> Result<Vec3> {
    line.validate()?;
    Ok(p - 2.0 * line.signed_distance(p) * line.normal)
}

pub fn point_line_distance(p: Vec3, line: &Line) -> Result<f64> {
    line.validate()?;
    Ok(line.signed_distance(p).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
    Circle,
    /// Degenerate ellipse of eccentricity 1.
    Segment,
}

/// A conic in focal form.
///
/// For ellipses, circles and segments `major_axis` is the focal sum; for
/// hyperbolas it is the absolute focal difference. A parabola keeps its
/// focus in `focus1` (mirrored into `focus2`), its directrix in `directrix`,
/// and the focus-to-directrix distance in `major_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicSpec {
    pub kind: ConicKind,
    pub focus1: Vec3,
    pub focus2: Vec3,
    pub major_axis: f64,
    pub eccentricity: f64,
    pub plane_normal: Vec3,
    pub directrix: Option<Line>,
}

/// Relative tolerance used when classifying a conic from its foci.
const CLASSIFY_TOLERANCE: f64 = 1e-12;

impl ConicSpec {
    /// Classify the conic with the given foci and focal constant.
    pub fn from_foci(focus1: Vec3, focus2: Vec3, major_axis: f64, plane_normal: Vec3) -> Result<Self> {
        if !(major_axis > 0.0 && major_axis.is_finite()) {
            return Err(Error::InvalidArgument(format!("major axis must be positive and finite, got {major_axis}")));
        }
        let plane_normal =
            plane_normal.normalized().ok_or_else(|| Error::InvalidArgument("conic plane normal is zero".into()))?;
        let focal = focus1.distance(focus2);
        let eccentricity = focal / major_axis;
        let kind = if focal <= CLASSIFY_TOLERANCE * major_axis {
            ConicKind::Circle
        } else if (eccentricity - 1.0).abs() <= CLASSIFY_TOLERANCE {
            ConicKind::Segment
        } else if eccentricity < 1.0 {
            ConicKind::Ellipse
        } else {
            ConicKind::Hyperbola
        };
        Ok(ConicSpec {
            kind,
            focus1,
            focus2,
            major_axis,
            eccentricity: if kind == ConicKind::Segment { 1.0 } else { eccentricity },
            plane_normal,
            directrix: None,
        })
    }

    pub fn parabola(focus: Vec3, directrix: Line, plane_normal: Vec3) -> Result<Self> {
        directrix.validate()?;
        let plane_normal =
            plane_normal.normalized().ok_or_else(|| Error::InvalidArgument("conic plane normal is zero".into()))?;
        let param = directrix.signed_distance(focus).abs();
        if param == 0.0 {
            return Err(Error::InvalidArgument("parabola focus lies on its directrix".into()));
        }
        Ok(ConicSpec {
            kind: ConicKind::Parabola,
            focus1: focus,
            focus2: focus,
            major_axis: param,
            eccentricity: 1.0,
            plane_normal,
            directrix: Some(directrix),
        })
    }

    pub fn center(&self) -> Vec3 {
        (self.focus1 + self.focus2) * 0.5
    }

    /// Directrix belonging to `focus1`.
    pub fn focal_directrix(&self) -> Result<Line> {
        match self.kind {
            ConicKind::Parabola => self.directrix.ok_or(Error::UnsupportedKind(self.kind)),
            ConicKind::Ellipse | ConicKind::Hyperbola => {
                let axis = (self.focus1 - self.focus2).normalized().ok_or(Error::UnsupportedKind(self.kind))?;
                let semi = 0.5 * self.major_axis;
                Line::new(self.center() + (semi / self.eccentricity) * axis, axis)
            }
            ConicKind::Circle | ConicKind::Segment => Err(Error::UnsupportedKind(self.kind)),
        }
    }

    /// Point where a tangent line touches the conic, found through the
    /// mirrored focus. `None` when the line is parallel to the focal ray
    /// (an asymptote of a hyperbola).
    pub fn tangent_point(&self, line: &Line) -> Result<Option<Vec3>> {
        let (from, mirrored) = match self.kind {
            ConicKind::Ellipse | ConicKind::Circle | ConicKind::Hyperbola => {
                (self.focus1, reflect_point_in_line(self.focus2, line)?)
            }
            ConicKind::Parabola => {
                let mirrored = reflect_point_in_line(self.focus1, line)?;
                let d = self.directrix.ok_or(Error::UnsupportedKind(self.kind))?;
                // the touching point sits on the perpendicular to the directrix through the mirror image
                (mirrored + d.normal, mirrored)
            }
            ConicKind::Segment => return Err(Error::UnsupportedKind(self.kind)),
        };
        let f0 = line.signed_distance(from);
        let f1 = line.signed_distance(mirrored);
        let denom = f1 - f0;
        if denom.abs() <= f64::EPSILON * (f0.abs() + f1.abs()).max(1.0) {
            return Ok(None);
        }
        let lambda = -f0 / denom;
        Ok(Some(from + lambda * (mirrored - from)))
    }

    /// Evenly spaced points for plotting. Hyperbolas get both branches,
    /// parabolas a symmetric arc around the vertex.
    pub fn sample_points(&self, n: usize) -> Result<Vec<Vec3>> {
        let n = n.max(2);
        let in_plane = |axis: Vec3| self.plane_normal.cross(axis);
        match self.kind {
            ConicKind::Circle | ConicKind::Ellipse | ConicKind::Segment => {
                let semi = 0.5 * self.major_axis;
                let axis =
                    (self.focus1 - self.focus2).normalized().unwrap_or_else(|| any_perpendicular(self.plane_normal));
                let minor = in_plane(axis);
                let b = semi * (1.0 - self.eccentricity * self.eccentricity).max(0.0).sqrt();
                let c0 = self.center();
                Ok((0..n)
                    .map(|i| {
                        let th = std::f64::consts::TAU * i as f64 / n as f64;
                        c0 + semi * th.cos() * axis + b * th.sin() * minor
                    })
                    .collect())
            }
            ConicKind::Hyperbola => {
                let semi = 0.5 * self.major_axis;
                let axis = (self.focus1 - self.focus2).normalized().ok_or(Error::UnsupportedKind(self.kind))?;
                let minor = in_plane(axis);
                let b = semi * (self.eccentricity * self.eccentricity - 1.0).sqrt();
                let c0 = self.center();
                let half = n / 2;
                let mut pts = Vec::with_capacity(2 * half);
                for sign in [1.0, -1.0] {
                    for i in 0..half {
                        let u = -2.0 + 4.0 * i as f64 / (half.max(2) - 1) as f64;
                        pts.push(c0 + sign * semi * u.cosh() * axis + b * u.sinh() * minor);
                    }
                }
                Ok(pts)
            }
            ConicKind::Parabola => {
                let d = self.directrix.ok_or(Error::UnsupportedKind(self.kind))?;
                let param = self.major_axis;
                // axis points from the directrix towards the focus
                let axis = d.normal * d.signed_distance(self.focus1).signum();
                let vertex = self.focus1 - 0.5 * param * axis;
                let side = in_plane(axis);
                let span = 4.0 * param;
                Ok((0..n)
                    .map(|i| {
                        let y = -span + 2.0 * span * i as f64 / (n - 1) as f64;
                        vertex + (y * y / (2.0 * param)) * axis + y * side
                    })
                    .collect())
            }
        }
    }
}

fn any_perpendicular(n: Vec3) -> Vec3 {
    let trial = if n.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
    n.cross(trial).normalized().unwrap_or(Vec3::X)
}

/// Distance from tangency of `line` against `conic`; zero iff tangent.
///
/// Focal conics mirror `focus2` in the line and compare its distance from
/// `focus1` with the focal constant. Parabolas mirror the focus and measure
/// how far the image lands from the directrix.
pub fn conic_tangency_residual(line: &Line, conic: &ConicSpec) -> Result<f64> {
    match conic.kind {
        ConicKind::Ellipse | ConicKind::Circle | ConicKind::Hyperbola => {
            let mirrored = reflect_point_in_line(conic.focus2, line)?;
            Ok((mirrored.distance(conic.focus1) - conic.major_axis).abs())
        }
        ConicKind::Parabola => {
            let d = conic.directrix.ok_or(Error::UnsupportedKind(conic.kind))?;
            let mirrored = reflect_point_in_line(conic.focus1, line)?;
            point_line_distance(mirrored, &d)
        }
        ConicKind::Segment => Err(Error::UnsupportedKind(conic.kind)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn vclose(a: Vec3, b: Vec3, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    fn unit_circle() -> ConicSpec {
        ConicSpec::from_foci(Vec3::ZERO, Vec3::ZERO, 2.0, Vec3::Z).unwrap()
    }

    #[test]
    fn reflects_origin_in_plane_x_equals_one() {
        let line = Line::new(Vec3::X, Vec3::X).unwrap();
        assert_eq!(reflect_point_in_line(Vec3::ZERO, &line).unwrap(), Vec3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn point_on_line_is_fixed() {
        let line = Line::new(Vec3::new(1.0, 0.0, 0.0), Vec3::X).unwrap();
        let p = Vec3::new(1.0, 3.5, 0.0);
        assert_eq!(reflect_point_in_line(p, &line).unwrap(), p);
    }

    #[test]
    fn reflects_u_to_v_for_the_reference_family() {
        // u = 25/11 mirrored in x = 36/11 gives 47/11
        let line = Line::new(Vec3::new(36.0 / 11.0, 0.0, 0.0), Vec3::X).unwrap();
        let v = reflect_point_in_line(Vec3::new(25.0 / 11.0, 0.0, 0.0), &line).unwrap();
        assert!(vclose(v, Vec3::new(47.0 / 11.0, 0.0, 0.0), 1e-14));
    }

    #[test]
    fn non_unit_normal_is_rejected() {
        let line = Line { base: Vec3::ZERO, normal: Vec3::new(1.0 + 1e-9, 0.0, 0.0) };
        assert!(matches!(reflect_point_in_line(Vec3::X, &line), Err(Error::InvalidArgument(_))));
        assert!(point_line_distance(Vec3::X, &line).is_err());
        assert!(Line::new(Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0)).is_err());
        assert!(Line::from_normal(Vec3::ZERO, Vec3::ZERO).is_err());
    }

    #[test]
    fn point_line_distances() {
        let d = Line::new(Vec3::new(36.0 / 11.0, 0.0, 0.0), Vec3::X).unwrap();
        assert_abs_diff_eq!(point_line_distance(Vec3::X, &d).unwrap(), 25.0 / 11.0, epsilon = 1e-15);
        assert_eq!(point_line_distance(d.base, &d).unwrap(), 0.0);
        let y_axis = Line::new(Vec3::ZERO, Vec3::X).unwrap();
        assert_eq!(point_line_distance(Vec3::Y, &y_axis).unwrap(), 0.0);
    }

    #[test]
    fn circle_tangency() {
        let circle = unit_circle();
        assert_eq!(circle.kind, ConicKind::Circle);
        let x1 = Line::new(Vec3::X, Vec3::X).unwrap();
        assert_eq!(conic_tangency_residual(&x1, &circle).unwrap(), 0.0);
        let x2 = Line::new(Vec3::new(2.0, 0.0, 0.0), Vec3::X).unwrap();
        assert_eq!(conic_tangency_residual(&x2, &circle).unwrap(), 2.0);
    }

    #[test]
    fn segment_is_unsupported() {
        let seg = ConicSpec::from_foci(Vec3::ZERO, Vec3::X, 1.0, Vec3::Z).unwrap();
        assert_eq!(seg.kind, ConicKind::Segment);
        assert_eq!(seg.eccentricity, 1.0);
        let line = Line::new(Vec3::ZERO, Vec3::Y).unwrap();
        assert!(matches!(conic_tangency_residual(&line, &seg), Err(Error::UnsupportedKind(ConicKind::Segment))));
    }

    #[test]
    fn classification_by_focal_distance() {
        let e = ConicSpec::from_foci(Vec3::ZERO, Vec3::X, 3.0, Vec3::Z).unwrap();
        assert_eq!(e.kind, ConicKind::Ellipse);
        assert_abs_diff_eq!(e.eccentricity, 1.0 / 3.0, epsilon = 1e-15);
        let h = ConicSpec::from_foci(Vec3::ZERO, Vec3::new(3.0, 0.0, 0.0), 1.0, Vec3::Z).unwrap();
        assert_eq!(h.kind, ConicKind::Hyperbola);
        assert!(ConicSpec::from_foci(Vec3::ZERO, Vec3::X, -1.0, Vec3::Z).is_err());
    }

    #[test]
    fn ellipse_tangent_at_vertex_and_secant() {
        // foci (±1, 0), focal sum 4: vertices at x = ±2, co-vertices at y = ±sqrt(3)
        let e = ConicSpec::from_foci(Vec3::X, -Vec3::X, 4.0, Vec3::Z).unwrap();
        let vertex = Line::new(Vec3::new(2.0, 0.0, 0.0), Vec3::X).unwrap();
        assert_abs_diff_eq!(conic_tangency_residual(&vertex, &e).unwrap(), 0.0, epsilon = 1e-15);
        let top = Line::new(Vec3::new(0.0, 3f64.sqrt(), 0.0), Vec3::Y).unwrap();
        assert_abs_diff_eq!(conic_tangency_residual(&top, &e).unwrap(), 0.0, epsilon = 1e-14);
        let secant = Line::new(Vec3::ZERO, Vec3::X).unwrap();
        assert!(conic_tangency_residual(&secant, &e).unwrap() > 0.1);
        let q = e.tangent_point(&top).unwrap().unwrap();
        assert!(vclose(q, Vec3::new(0.0, 3f64.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn focal_directrix_of_ellipse() {
        // a = 2, c = 1, e = 1/2: directrix of focus (1,0) is x = a/e = 4
        let e = ConicSpec::from_foci(Vec3::X, -Vec3::X, 4.0, Vec3::Z).unwrap();
        let d = e.focal_directrix().unwrap();
        assert_abs_diff_eq!(d.signed_distance(Vec3::new(4.0, 0.0, 0.0)), 0.0, epsilon = 1e-15);
        for q in e.sample_points(64).unwrap() {
            let ratio = q.distance(e.focus1) / point_line_distance(q, &d).unwrap();
            assert_abs_diff_eq!(ratio, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn parabola_tangency() {
        // focus (1,0), directrix x = -1: y^2 = 4x, tangent at (1, 2) is x - y + 1 = 0
        let d = Line::new(Vec3::new(-1.0, 0.0, 0.0), Vec3::X).unwrap();
        let p = ConicSpec::parabola(Vec3::X, d, Vec3::Z).unwrap();
        let tangent = Line::from_normal(Vec3::new(1.0, 2.0, 0.0), Vec3::new(1.0, -1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(conic_tangency_residual(&tangent, &p).unwrap(), 0.0, epsilon = 1e-14);
        let q = p.tangent_point(&tangent).unwrap().unwrap();
        assert!(vclose(q, Vec3::new(1.0, 2.0, 0.0), 1e-14));
        for q in p.sample_points(33).unwrap() {
            assert_abs_diff_eq!(q.distance(Vec3::X), q.x + 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hyperbola_tangent_and_samples() {
        // foci (±2, 0), focal difference 2: x^2 - y^2/3 = 1, vertex (1, 0)
        let h = ConicSpec::from_foci(Vec3::new(2.0, 0.0, 0.0), Vec3::new(-2.0, 0.0, 0.0), 2.0, Vec3::Z).unwrap();
        assert_eq!(h.kind, ConicKind::Hyperbola);
        let vertex = Line::new(Vec3::X, Vec3::X).unwrap();
        assert_abs_diff_eq!(conic_tangency_residual(&vertex, &h).unwrap(), 0.0, epsilon = 1e-15);
        for q in h.sample_points(40).unwrap() {
            let diff = (q.distance(h.focus1) - q.distance(h.focus2)).abs();
            assert_abs_diff_eq!(diff, 2.0, epsilon = 1e-10);
        }
        let d = h.focal_directrix().unwrap();
        assert_abs_diff_eq!(d.base.x, 0.5, epsilon = 1e-15);
    }

    fn planar() -> impl Strategy<Value = Vec3> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(x, y)| Vec3::new(x, y, 0.0))
    }

    fn line() -> impl Strategy<Value = Line> {
        (planar(), 0.0f64..std::f64::consts::TAU)
            .prop_map(|(base, th)| Line::new(base, Vec3::new(th.cos(), th.sin(), 0.0)).unwrap())
    }

    proptest! {
        #[test]
        fn reflection_is_an_involution(p in planar(), l in line()) {
            let back = reflect_point_in_line(reflect_point_in_line(p, &l).unwrap(), &l).unwrap();
            prop_assert!(back.distance(p) <= 1e-14 * (1.0 + p.norm() + l.base.norm()));
        }

        #[test]
        fn reflection_preserves_distance_to_line_points(p in planar(), l in line(), s in -20.0f64..20.0) {
            let on_line = l.base + s * Vec3::Z.cross(l.normal);
            let image = reflect_point_in_line(p, &l).unwrap();
            prop_assert!((image.distance(on_line) - p.distance(on_line)).abs() <= 1e-12 * (1.0 + p.distance(on_line)));
        }

        #[test]
        fn circle_residual_is_twice_the_gap(center in planar(), radius in 0.1f64..5.0, l in line()) {
            let circle = ConicSpec::from_foci(center, center, 2.0 * radius, Vec3::Z).unwrap();
            let residual = conic_tangency_residual(&l, &circle).unwrap();
            let gap = point_line_distance(center, &l).unwrap() - radius;
            prop_assert!((residual - 2.0 * gap.abs()).abs() <= 1e-12 * (1.0 + l.base.norm() + center.norm()));
            // tangent line built through the touching point
            let touching = center + radius * l.normal;
            let tangent = Line::new(touching, l.normal).unwrap();
            prop_assert!(conic_tangency_residual(&tangent, &circle).unwrap() <= 1e-12 * (1.0 + center.norm()));
        }
    }
}
