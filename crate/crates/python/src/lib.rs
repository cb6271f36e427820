//! Python bindings for `wnl-core`.
//!
//! Settings and outcomes cross the boundary as strings (`"ZXX"`, `"++-"`);
//! core errors surface as `ValueError`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wnl_core::lhv::{EnumerationOptions, DEFAULT_ENUMERATION_CEILING};
use wnl_core::noise::{estimate_expression, EstimateOptions, IntervalMethod};
use wnl_core::{
    BellExpression, BoundCertificate, ExpressionEstimate, HardyReport, MeasurementSetting,
    NoiseKind, NoiseModel, NoisyW, OutcomeAssignment, OutcomeModel, PureState, WState,
};

fn err(e: wnl_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn setting(s: &str) -> PyResult<MeasurementSetting> {
    s.parse().map_err(err)
}

fn outcome(s: &str) -> PyResult<OutcomeAssignment> {
    s.parse().map_err(err)
}

fn noise_kind(kind: &str) -> PyResult<NoiseKind> {
    match kind {
        "white" | "white_noise" => Ok(NoiseKind::WhiteNoise),
        "loss" | "photon_loss" => Ok(NoiseKind::PhotonLoss),
        _ => Err(PyValueError::new_err(format!(
            "unknown noise kind {kind:?}; expected 'white' or 'loss'"
        ))),
    }
}

fn kind_name(kind: NoiseKind) -> &'static str {
    match kind {
        NoiseKind::WhiteNoise => "white",
        NoiseKind::PhotonLoss => "loss",
    }
}

fn enumeration(ceiling: Option<usize>) -> EnumerationOptions {
    EnumerationOptions::with_ceiling(ceiling.unwrap_or(DEFAULT_ENUMERATION_CEILING))
}

/// Dense statevector over the `2^n` occupation basis.
#[pyclass(name = "PureState", module = "wnl", frozen)]
pub struct PyPureState(PureState);

#[pymethods]
impl PyPureState {
    #[staticmethod]
    fn w_state(n: usize) -> PyResult<Self> {
        PureState::w_state(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn vacuum(n: usize) -> PyResult<Self> {
        PureState::vacuum(n).map(Self).map_err(err)
    }

    /// Amplitudes indexed by occupation bits; bit `i` is site `i`.
    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        PureState::from_amplitudes(amplitudes)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn modes(&self) -> usize {
        self.0.modes()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn probability(&self, setting_: &str, outcome_: &str) -> PyResult<f64> {
        self.0
            .outcome_probability(&setting(setting_)?, &outcome(outcome_)?)
            .map_err(err)
    }

    /// Outcome probabilities indexed by outcome mask (bit `i` set: site `i` is `-1`).
    fn distribution(&self, setting_: &str) -> PyResult<Vec<f64>> {
        self.0.distribution(&setting(setting_)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("PureState(modes={})", self.0.modes())
    }
}

/// Mixture of the W state with white noise or the vacuum.
#[pyclass(name = "NoiseModel", module = "wnl", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyNoiseModel(NoiseModel);

#[pymethods]
impl PyNoiseModel {
    #[new]
    fn new(kind: &str, p: f64) -> PyResult<Self> {
        NoiseModel::new(noise_kind(kind)?, p).map(Self).map_err(err)
    }

    #[staticmethod]
    fn ideal() -> Self {
        Self(NoiseModel::ideal())
    }

    #[getter]
    fn kind(&self) -> &'static str {
        kind_name(self.0.kind)
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }

    fn __repr__(&self) -> String {
        format!("NoiseModel('{}', {})", kind_name(self.0.kind), self.0.p)
    }
}

/// A signed sum of outcome probabilities with a local bound.
#[pyclass(name = "BellExpression", module = "wnl", frozen)]
pub struct PyBellExpression(BellExpression);

#[pymethods]
impl PyBellExpression {
    #[staticmethod]
    fn omega(n: usize) -> PyResult<Self> {
        wnl_core::build_omega(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(Self)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn modes(&self) -> usize {
        self.0.modes()
    }

    #[getter]
    fn classical_bound(&self) -> f64 {
        self.0.classical_bound()
    }

    /// `(sign, setting, outcome)` triples.
    fn terms(&self) -> Vec<(i8, String, String)> {
        self.0
            .terms()
            .iter()
            .map(|t| {
                (
                    t.weight() as i8,
                    t.setting.to_string(),
                    t.outcome.to_string(),
                )
            })
            .collect()
    }

    fn settings(&self) -> Vec<String> {
        self.0.settings().iter().map(|s| s.to_string()).collect()
    }

    /// Value on a statevector.
    fn evaluate(&self, state: &PyPureState) -> PyResult<f64> {
        wnl_core::evaluate_on_state(&self.0, &state.0).map_err(err)
    }

    /// Value on the (noisy) W state, from closed-form probabilities.
    #[pyo3(signature = (model = None))]
    fn evaluate_w(&self, model: Option<PyNoiseModel>) -> PyResult<f64> {
        let n = self.0.modes();
        match model {
            None => wnl_core::evaluate_on_state(&self.0, &WState::new(n).map_err(err)?),
            Some(m) => wnl_core::evaluate_on_state(&self.0, &NoisyW::new(n, m.0).map_err(err)?),
        }
        .map_err(err)
    }

    /// Value of the deterministic strategy answering `z[i]` / `x[i]` at site `i`.
    fn strategy_value(&self, z: &str, x: &str) -> PyResult<f64> {
        let s = wnl_core::DeterministicStrategy::parse(z, x).map_err(err)?;
        wnl_core::evaluate_strategy(&s, &self.0).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.terms().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "BellExpression(modes={}, terms={}, classical_bound={})",
            self.0.modes(),
            self.0.terms().len(),
            self.0.classical_bound()
        )
    }
}

#[pyclass(name = "BoundCertificate", module = "wnl", frozen)]
pub struct PyBoundCertificate(BoundCertificate);

#[pymethods]
impl PyBoundCertificate {
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn max_value(&self) -> f64 {
        self.0.max_value
    }

    /// `(encoding, z, x)` for the lowest-encoded maximizers.
    #[getter]
    fn argmax(&self) -> Vec<(u64, String, String)> {
        self.0
            .argmax
            .iter()
            .map(|s| {
                let signs = |v: &[wnl_core::Sign]| v.iter().map(|s| s.as_char()).collect();
                (s.encode(), signs(s.z_signs()), signs(s.x_signs()))
            })
            .collect()
    }

    #[getter]
    fn argmax_count(&self) -> u64 {
        self.0.argmax_count
    }

    #[getter]
    fn strategies_searched(&self) -> u64 {
        self.0.strategies_searched
    }

    #[getter]
    fn exhaustive(&self) -> bool {
        self.0.exhaustive
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.0.wall_time
    }

    fn __repr__(&self) -> String {
        format!(
            "BoundCertificate(n={}, max_value={}, strategies_searched={})",
            self.0.n, self.0.max_value, self.0.strategies_searched
        )
    }
}

#[pyclass(name = "HardyReport", module = "wnl", frozen)]
pub struct PyHardyReport(HardyReport);

#[pymethods]
impl PyHardyReport {
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn strategies_searched(&self) -> u64 {
        self.0.strategies_searched
    }

    #[getter]
    fn survivors(&self) -> u64 {
        self.0.survivors
    }

    #[getter]
    fn uniform_x_survivors(&self) -> u64 {
        self.0.uniform_x_survivors
    }

    #[getter]
    fn counterexamples(&self) -> Vec<u64> {
        self.0.counterexamples.iter().map(|s| s.encode()).collect()
    }

    #[getter]
    fn quantum_all_equal(&self) -> f64 {
        self.0.quantum_all_equal
    }

    #[getter]
    fn closed_form_all_equal(&self) -> f64 {
        self.0.closed_form_all_equal
    }

    #[getter]
    fn implication_holds(&self) -> bool {
        self.0.implication_holds
    }

    fn __repr__(&self) -> String {
        format!(
            "HardyReport(n={}, survivors={}, implication_holds={})",
            self.0.n,
            self.0.survivors,
            if self.0.implication_holds {
                "True"
            } else {
                "False"
            }
        )
    }
}

#[pyclass(name = "Estimate", module = "wnl", frozen)]
pub struct PyEstimate {
    est: ExpressionEstimate,
    bound: f64,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn value(&self) -> f64 {
        self.est.value
    }

    #[getter]
    fn std_error(&self) -> f64 {
        self.est.std_error
    }

    #[getter]
    fn lower(&self) -> f64 {
        self.est.lower
    }

    #[getter]
    fn upper(&self) -> f64 {
        self.est.upper
    }

    #[getter]
    fn confidence(&self) -> f64 {
        self.est.confidence
    }

    #[getter]
    fn shots_per_setting(&self) -> u64 {
        self.est.shots_per_setting
    }

    /// Whether the whole interval lies above the local bound.
    #[getter]
    fn violation(&self) -> bool {
        self.est.violates(self.bound)
    }

    /// `{setting: {outcome: count}}`, nonzero counts only.
    fn counts(&self) -> BTreeMap<String, BTreeMap<String, u64>> {
        self.est
            .records
            .iter()
            .map(|r| {
                let counts = r.counts.iter().map(|(o, &c)| (o.to_string(), c)).collect();
                (r.setting.to_string(), counts)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(value={}, interval=[{}, {}])",
            self.est.value, self.est.lower, self.est.upper
        )
    }
}

#[pyfunction]
fn build_w_state(n: usize) -> PyResult<PyPureState> {
    PyPureState::w_state(n)
}

#[pyfunction]
fn build_vacuum(n: usize) -> PyResult<PyPureState> {
    PyPureState::vacuum(n)
}

#[pyfunction]
fn outcome_probability(state: &PyPureState, setting_: &str, outcome_: &str) -> PyResult<f64> {
    state.probability(setting_, outcome_)
}

/// Closed-form W-state probability; works for any `n`.
#[pyfunction]
fn analytic_w_probability(n: usize, setting_: &str, outcome_: &str) -> PyResult<f64> {
    wnl_core::analytic_w_probability(n, &setting(setting_)?, &outcome(outcome_)?).map_err(err)
}

#[pyfunction]
fn build_omega(n: usize) -> PyResult<PyBellExpression> {
    PyBellExpression::omega(n)
}

#[pyfunction]
fn omega_closed_form(n: usize) -> PyResult<f64> {
    wnl_core::omega_closed_form(n).map_err(err)
}

#[pyfunction]
fn violation_probability(n: usize) -> PyResult<f64> {
    wnl_core::violation_probability(n).map_err(err)
}

/// Exhaustive maximum of `expr` over deterministic local strategies.
#[pyfunction]
#[pyo3(signature = (expr, ceiling = None))]
fn enumerate_bound(
    py: Python<'_>,
    expr: &PyBellExpression,
    ceiling: Option<usize>,
) -> PyResult<PyBoundCertificate> {
    let opts = enumeration(ceiling);
    py.detach(|| wnl_core::enumerate_bound_with(&expr.0, &opts))
        .map(PyBoundCertificate)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, ceiling = None))]
fn hardy_check(py: Python<'_>, n: usize, ceiling: Option<usize>) -> PyResult<PyHardyReport> {
    let opts = enumeration(ceiling);
    py.detach(|| wnl_core::hardy_implication_check_with(n, &opts))
        .map(PyHardyReport)
        .map_err(err)
}

#[pyfunction]
fn noisy_omega(n: usize, kind: &str, p: f64) -> PyResult<f64> {
    let model = NoiseModel::new(noise_kind(kind)?, p).map_err(err)?;
    wnl_core::noisy_omega(n, model).map_err(err)
}

/// Noise parameter at which Ω(n) of the noisy W state crosses 0.
#[pyfunction]
fn critical_parameter(n: usize, kind: &str) -> PyResult<f64> {
    wnl_core::critical_parameter(n, noise_kind(kind)?).map_err(err)
}

/// Finite-shot estimate of Ω(n) with a conservative interval.
#[pyfunction]
#[pyo3(signature = (n, shots, seed, model = None, confidence = 0.99, method = "normal"))]
fn estimate_omega(
    py: Python<'_>,
    n: usize,
    shots: u64,
    seed: u64,
    model: Option<PyNoiseModel>,
    confidence: f64,
    method: &str,
) -> PyResult<PyEstimate> {
    let method = match method {
        "normal" => IntervalMethod::Normal,
        "clopper_pearson" | "clopper-pearson" => IntervalMethod::ClopperPearson,
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown interval method {method:?}"
            )))
        }
    };
    let opts = EstimateOptions { confidence, method };
    let model = model.map_or_else(NoiseModel::ideal, |m| m.0);
    let expr = wnl_core::build_omega(n).map_err(err)?;
    let source = NoisyW::new(n, model).map_err(err)?;
    let est = py
        .detach(|| estimate_expression(&expr, &source, shots, seed, &opts))
        .map_err(err)?;
    Ok(PyEstimate {
        est,
        bound: expr.classical_bound(),
    })
}

#[pymodule]
fn wnl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", wnl_core::VERSION)?;
    m.add_class::<PyPureState>()?;
    m.add_class::<PyNoiseModel>()?;
    m.add_class::<PyBellExpression>()?;
    m.add_class::<PyBoundCertificate>()?;
    m.add_class::<PyHardyReport>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(build_w_state, m)?)?;
    m.add_function(wrap_pyfunction!(build_vacuum, m)?)?;
    m.add_function(wrap_pyfunction!(outcome_probability, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_w_probability, m)?)?;
    m.add_function(wrap_pyfunction!(build_omega, m)?)?;
    m.add_function(wrap_pyfunction!(omega_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(violation_probability, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_check, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_omega, m)?)?;
    m.add_function(wrap_pyfunction!(critical_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_omega, m)?)?;
    Ok(())
}
