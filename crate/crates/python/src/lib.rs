//! Python bindings for `kepler_geom`. Vectors cross the boundary as
//! `(x, y, z)` tuples; composite reports are returned as JSON strings.

use ::kepler_geom as kg;
use kg::family::{self, FamilySpec};
use kg::Vec3;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(kepler_geom, KeplerError, PyException);

type V = (f64, f64, f64);

fn vec(v: V) -> Vec3 {
    Vec3::new(v.0, v.1, v.2)
}

fn tup(v: Vec3) -> V {
    (v.x, v.y, v.z)
}

fn err(e: kg::Error) -> PyErr {
    match e {
        kg::Error::InvalidArgument(_) | kg::Error::OutOfRange(_) | kg::Error::AtOrigin | kg::Error::Unbound { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => KeplerError::new_err(other.to_string()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| KeplerError::new_err(e.to_string()))
}

#[pyclass(name = "PhysParams", frozen)]
struct PyPhysParams(kg::PhysParams);

#[pymethods]
impl PyPhysParams {
    #[new]
    #[pyo3(signature = (mu = 1.0, k = 1.0))]
    fn new(mu: f64, k: f64) -> PyResult<Self> {
        kg::PhysParams::new(mu, k).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_masses(g: f64, m: f64, big_m: f64) -> PyResult<Self> {
        kg::params_from_masses(g, m, big_m).map(Self).map_err(err)
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k
    }

    fn __repr__(&self) -> String {
        format!("PhysParams(mu={:?}, k={:?})", self.0.mu, self.0.k)
    }
}

#[pyclass(name = "PhaseState", frozen)]
struct PyPhaseState(kg::PhaseState);

#[pymethods]
impl PyPhaseState {
    #[new]
    fn new(r: V, p: V) -> PyResult<Self> {
        kg::PhaseState::new(vec(r), vec(p)).map(Self).map_err(err)
    }

    #[getter]
    fn r(&self) -> V {
        tup(self.0.r)
    }

    #[getter]
    fn p(&self) -> V {
        tup(self.0.p)
    }

    fn __repr__(&self) -> String {
        format!("PhaseState(r={:?}, p={:?})", self.r(), self.p())
    }
}

#[pyclass(name = "Conserved", frozen)]
struct PyConserved(kg::ConservedSet);

#[pymethods]
impl PyConserved {
    #[getter]
    fn angular_momentum(&self) -> V {
        tup(self.0.angular_momentum)
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy
    }

    #[getter]
    fn lenz(&self) -> V {
        tup(self.0.lenz)
    }

    fn second_focus(&self, params: &PyPhysParams) -> V {
        tup(self.0.second_focus(&params.0))
    }

    fn eccentricity(&self, params: &PyPhysParams) -> f64 {
        self.0.eccentricity(&params.0)
    }

    fn is_bound(&self) -> bool {
        self.0.is_bound()
    }
}

#[pyclass(name = "OrbitGeometry", frozen)]
struct PyOrbitGeometry(kg::OrbitGeometry);

#[pymethods]
impl PyOrbitGeometry {
    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }
    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }
    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }
    #[getter]
    fn e(&self) -> f64 {
        self.0.e
    }
    #[getter]
    fn period(&self) -> f64 {
        self.0.period
    }
    #[getter]
    fn fall_radius(&self) -> f64 {
        self.0.fall_radius
    }
    #[getter]
    fn focus_t(&self) -> V {
        tup(self.0.focus_t)
    }
    #[getter]
    fn plane_normal(&self) -> V {
        tup(self.0.plane_normal)
    }

    fn focal_sum(&self, q: V) -> f64 {
        self.0.focal_sum(vec(q))
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }
}

#[pyclass(name = "Line", frozen)]
struct PyLine(kg::Line);

#[pymethods]
impl PyLine {
    #[new]
    fn new(base: V, normal: V) -> PyResult<Self> {
        kg::Line::from_normal(vec(base), vec(normal)).map(Self).map_err(err)
    }

    #[getter]
    fn base(&self) -> V {
        tup(self.0.base)
    }

    #[getter]
    fn normal(&self) -> V {
        tup(self.0.normal)
    }

    fn signed_distance(&self, p: V) -> f64 {
        self.0.signed_distance(vec(p))
    }

    fn reflect(&self, p: V) -> PyResult<V> {
        kg::reflect_point_in_line(vec(p), &self.0).map(tup).map_err(err)
    }
}

#[pyclass(name = "Conic", frozen)]
struct PyConic(kg::ConicSpec);

#[pymethods]
impl PyConic {
    #[staticmethod]
    #[pyo3(signature = (focus1, focus2, major_axis, plane_normal = (0.0, 0.0, 1.0)))]
    fn from_foci(focus1: V, focus2: V, major_axis: f64, plane_normal: V) -> PyResult<Self> {
        kg::ConicSpec::from_foci(vec(focus1), vec(focus2), major_axis, vec(plane_normal)).map(Self).map_err(err)
    }

    #[getter]
    fn kind(&self) -> String {
        format!("{:?}", self.0.kind)
    }
    #[getter]
    fn focus1(&self) -> V {
        tup(self.0.focus1)
    }
    #[getter]
    fn focus2(&self) -> V {
        tup(self.0.focus2)
    }
    #[getter]
    fn major_axis(&self) -> f64 {
        self.0.major_axis
    }
    #[getter]
    fn eccentricity(&self) -> f64 {
        self.0.eccentricity
    }

    fn tangency_residual(&self, line: &PyLine) -> PyResult<f64> {
        kg::conic_tangency_residual(&line.0, &self.0).map_err(err)
    }

    fn sample_points(&self, n: usize) -> PyResult<Vec<V>> {
        self.0.sample_points(n).map(|v| v.into_iter().map(tup).collect()).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }
}

#[pyclass(name = "Family", frozen)]
struct PyFamily(FamilySpec);

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (params, energy, r_fixed, plane_normal = (0.0, 0.0, 1.0)))]
    fn new(params: &PyPhysParams, energy: f64, r_fixed: V, plane_normal: V) -> PyResult<Self> {
        FamilySpec::new(params.0, energy, vec(r_fixed), vec(plane_normal)).map(Self).map_err(err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn period(&self) -> f64 {
        self.0.period()
    }

    #[getter]
    fn envelope_kind(&self) -> String {
        format!("{:?}", self.0.envelope_kind())
    }

    fn member(&self, psi: f64) -> PyResult<PyPhaseState> {
        family::family_member(&self.0, psi).map(|m| PyPhaseState(m.state)).map_err(err)
    }

    fn focus_locus(&self, n: usize) -> PyResult<Vec<V>> {
        family::focus_locus(&self.0, n).map(|v| v.into_iter().map(tup).collect()).map_err(err)
    }

    fn eccentricity_extremes(&self) -> (f64, f64) {
        family::eccentricity_extremes(&self.0)
    }

    fn bounding_envelope(&self) -> PyResult<PyConic> {
        family::bounding_envelope(&self.0).map(PyConic).map_err(err)
    }

    fn directrix_envelope(&self, n: usize) -> PyResult<PyConic> {
        family::directrix_envelope(&self.0, n).map(|r| PyConic(r.envelope)).map_err(err)
    }

    /// Full envelope report (per-member residuals, skipped members) as JSON.
    fn envelope_report_json(&self, n: usize) -> PyResult<String> {
        json(&family::directrix_envelope(&self.0, n).map_err(err)?)
    }

    fn simultaneous_return(&self, n: usize) -> PyResult<f64> {
        family::simultaneous_return_check(&self.0, n).map_err(err)
    }
}

#[pyfunction]
fn conserved_quantities(state: &PyPhaseState, params: &PyPhysParams) -> PyResult<PyConserved> {
    kg::conserved_quantities(&state.0, &params.0).map(PyConserved).map_err(err)
}

#[pyfunction]
fn fall_point(state: &PyPhaseState, params: &PyPhysParams) -> PyResult<V> {
    kg::fall_point(&state.0, &params.0).map(tup).map_err(err)
}

/// Empty focus by mirroring the fall point; `None` for a body at rest.
#[pyfunction]
fn geometric_second_focus(state: &PyPhaseState, params: &PyPhysParams) -> PyResult<Option<V>> {
    let sf = kg::geometric_second_focus(&state.0, &params.0).map_err(err)?;
    Ok((!sf.at_rest).then(|| tup(sf.point)))
}

#[pyfunction]
fn orbit_geometry(state: &PyPhaseState, params: &PyPhysParams) -> PyResult<PyOrbitGeometry> {
    kg::orbit_geometry(&state.0, &params.0).map(PyOrbitGeometry).map_err(err)
}

#[pyfunction]
fn directrix(state: &PyPhaseState, params: &PyPhysParams) -> PyResult<PyLine> {
    kg::directrix(&state.0, &params.0).map(PyLine).map_err(err)
}

#[pyfunction]
fn solve_kepler(mean_anomaly: f64, e: f64) -> PyResult<f64> {
    kg::solve_kepler(mean_anomaly, e).map_err(err)
}

#[pyfunction]
fn propagate_analytic(state: &PyPhaseState, params: &PyPhysParams, t: f64) -> PyResult<PyPhaseState> {
    kg::propagate_analytic(&state.0, &params.0, t).map(PyPhaseState).map_err(err)
}

/// RK4 trajectory as a list of `(t, r, p)`.
#[pyfunction]
fn integrate_numeric(state: &PyPhaseState, params: &PyPhysParams, dt: f64, steps: usize) -> PyResult<Vec<(f64, V, V)>> {
    let traj = kg::integrate_numeric(&state.0, &params.0, dt, steps).map_err(err)?;
    Ok(traj.samples.iter().map(|s| (s.time, tup(s.state.r), tup(s.state.p))).collect())
}

/// Period found by return-crossing detection on an RK4 run of `steps` steps.
#[pyfunction]
fn detect_period(state: &PyPhaseState, params: &PyPhysParams, dt: f64, steps: usize) -> PyResult<f64> {
    let traj = kg::integrate_numeric(&state.0, &params.0, dt, steps).map_err(err)?;
    kg::detect_period(&traj).map_err(err)
}

/// Runs the verification suite; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (mu = 1.0, k = 1.0, energy = -0.28, r = (1.0, 0.0, 0.0), samples = 256, tol_override = None))]
fn run_verify(
    mu: f64,
    k: f64,
    energy: f64,
    r: V,
    samples: usize,
    tol_override: Option<f64>,
) -> PyResult<(bool, String)> {
    let config = kg::cli::RunConfig { mu, k, energy, r: vec(r), samples, tol_override, ..Default::default() };
    config.validate().map_err(err)?;
    let report = kg::cli::run_verify(&config).map_err(err)?;
    Ok((report.overall, json(&report)?))
}

#[pymodule(name = "kepler_geom")]
fn kepler_geom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("KeplerError", m.py().get_type::<KeplerError>())?;
    m.add_class::<PyPhysParams>()?;
    m.add_class::<PyPhaseState>()?;
    m.add_class::<PyConserved>()?;
    m.add_class::<PyOrbitGeometry>()?;
    m.add_class::<PyLine>()?;
    m.add_class::<PyConic>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(conserved_quantities, m)?)?;
    m.add_function(wrap_pyfunction!(fall_point, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_second_focus, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(directrix, m)?)?;
    m.add_function(wrap_pyfunction!(solve_kepler, m)?)?;
    m.add_function(wrap_pyfunction!(propagate_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(detect_period, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
