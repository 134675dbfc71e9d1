//! Python bindings over the core analytic and Monte Carlo operations.
//!
//! Scalar expressions come back as floats, estimators as small dicts with
//! their standard errors, and every validation failure surfaces as a
//! `ValueError` carrying the offending field.

// The pyo3 macro expansion converts PyErr into PyErr on every fallible
// signature; the lint fires inside generated code.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use swipt_core::{altbeams, analytic, mcsim};
use swipt_core::{BeamScheme, McConfig, NetworkSpec, PointSource, SwitchPolicy, SystemParams};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// System-level constants, all in linear SI units.
#[pyclass(name = "SystemParams", frozen)]
#[derive(Clone, Copy)]
struct PySystemParams {
    inner: SystemParams,
}

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (p_tx, n_t, theta, sigma2, zeta=1.0))]
    fn new(p_tx: f64, n_t: u32, theta: f64, sigma2: f64, zeta: f64) -> PyResult<Self> {
        let inner = SystemParams { p_tx, n_t, theta, sigma2, zeta };
        inner.validate().map_err(value_err)?;
        Ok(PySystemParams { inner })
    }

    #[getter]
    fn p_tx(&self) -> f64 {
        self.inner.p_tx
    }

    #[getter]
    fn n_t(&self) -> u32 {
        self.inner.n_t
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2
    }

    #[getter]
    fn zeta(&self) -> f64 {
        self.inner.zeta
    }

    /// Mean received signal power before fading, theta * P [W].
    fn rx_power_w(&self) -> f64 {
        self.inner.rx_power_w()
    }

    /// Receive SNR scale theta * P / sigma2.
    fn snr_scale(&self) -> f64 {
        self.inner.snr_scale()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SystemParams(p_tx={}, n_t={}, theta={}, sigma2={}, zeta={})",
            p.p_tx, p.n_t, p.theta, p.sigma2, p.zeta
        )
    }
}

/// Beam construction family plus the per-block beam count N.
#[pyclass(name = "BeamScheme", frozen)]
#[derive(Clone, Copy)]
struct PyBeamScheme {
    inner: BeamScheme,
}

#[pymethods]
impl PyBeamScheme {
    #[staticmethod]
    fn gaussian(n_beams: u32) -> Self {
        PyBeamScheme { inner: BeamScheme::gaussian(n_beams) }
    }

    #[staticmethod]
    fn unitary(n_beams: u32) -> Self {
        PyBeamScheme { inner: BeamScheme::unitary(n_beams) }
    }

    #[staticmethod]
    fn binary(n_beams: u32) -> Self {
        PyBeamScheme { inner: BeamScheme::binary(n_beams) }
    }

    #[getter]
    fn n_beams(&self) -> u32 {
        self.inner.n_beams
    }

    fn __repr__(&self) -> String {
        format!("BeamScheme.{:?}(n_beams={})", self.inner.kind, self.inner.n_beams).to_lowercase()
    }
}

/// Receiver mode switching policy: threshold (TS) or periodic (PS).
#[pyclass(name = "SwitchPolicy", frozen)]
#[derive(Clone, Copy)]
struct PySwitchPolicy {
    inner: SwitchPolicy,
}

#[pymethods]
impl PySwitchPolicy {
    /// Threshold switching: decode a sub-block iff its power A <= a_bar.
    #[staticmethod]
    fn ts(a_bar: f64) -> PyResult<Self> {
        let inner = SwitchPolicy::Ts { a_bar };
        inner.validate().map_err(value_err)?;
        Ok(PySwitchPolicy { inner })
    }

    /// Periodic switching: decode a fixed fraction tau of every block.
    #[staticmethod]
    fn ps(tau: f64) -> PyResult<Self> {
        let inner = SwitchPolicy::Ps { tau };
        inner.validate().map_err(value_err)?;
        Ok(PySwitchPolicy { inner })
    }

    fn __repr__(&self) -> String {
        match self.inner {
            SwitchPolicy::Ts { a_bar } => format!("SwitchPolicy.ts({a_bar})"),
            SwitchPolicy::Ps { tau } => format!("SwitchPolicy.ps({tau})"),
        }
    }
}

/// Monte Carlo sizing: draw counts, base seed, and worker threads.
#[pyclass(name = "McConfig", frozen)]
#[derive(Clone, Copy)]
struct PyMcConfig {
    inner: McConfig,
}

#[pymethods]
impl PyMcConfig {
    #[new]
    #[pyo3(signature = (n_channel_draws=100_000, n_subblock_draws=16, base_seed=1, worker_count=1))]
    fn new(n_channel_draws: u64, n_subblock_draws: u64, base_seed: u64, worker_count: usize) -> PyResult<Self> {
        if n_channel_draws == 0 || n_subblock_draws == 0 {
            return Err(value_err("draw counts must be positive"));
        }
        if worker_count == 0 {
            return Err(value_err("worker_count must be positive"));
        }
        Ok(PyMcConfig {
            inner: McConfig { n_channel_draws, n_subblock_draws, base_seed, worker_count },
        })
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "McConfig(n_channel_draws={}, n_subblock_draws={}, base_seed={}, worker_count={})",
            c.n_channel_draws, c.n_subblock_draws, c.base_seed, c.worker_count
        )
    }
}

// ---------------------------------------------------------------------------
// periodic switching
// ---------------------------------------------------------------------------

#[pyfunction]
fn ps_rate(params: &PySystemParams, h: f64, tau: f64) -> f64 {
    analytic::ps_rate(&params.inner, h, tau)
}

#[pyfunction]
fn ps_power(params: &PySystemParams, h: f64, tau: f64) -> f64 {
    analytic::ps_power(&params.inner, h, tau)
}

#[pyfunction]
fn avg_rate_ps(params: &PySystemParams, tau: f64) -> PyResult<f64> {
    analytic::avg_rate_ps(&params.inner, tau).map_err(value_err)
}

#[pyfunction]
fn avg_power_ps(params: &PySystemParams, tau: f64) -> f64 {
    analytic::avg_power_ps(&params.inner, tau)
}

#[pyfunction]
fn ps_outage(params: &PySystemParams, tau: f64, q_hat_w: f64) -> f64 {
    analytic::ps_outage(&params.inner, tau, q_hat_w)
}

// ---------------------------------------------------------------------------
// threshold switching, gaussian beams
// ---------------------------------------------------------------------------

#[pyfunction]
fn ts_power(params: &PySystemParams, h: f64, n_beams: u32, a_bar: f64) -> f64 {
    analytic::ts_power(&params.inner, h, n_beams, a_bar)
}

/// Block rate at a fixed channel: closed forms for N in {1, 2} with a
/// quadrature fallback, plain quadrature otherwise.
#[pyfunction]
fn ts_rate(params: &PySystemParams, h: f64, n_beams: u32, a_bar: f64) -> PyResult<f64> {
    let p = &params.inner;
    match n_beams {
        1 => Ok(analytic::ts_rate_closed_n1(p, h, a_bar)),
        2 => analytic::ts_rate_closed_n2(p, h, a_bar)
            .or_else(|_| analytic::ts_rate_quadrature(p, h, 2, a_bar))
            .map_err(value_err),
        n => analytic::ts_rate_quadrature(p, h, n, a_bar).map_err(value_err),
    }
}

#[pyfunction]
fn ts_rate_quadrature(params: &PySystemParams, h: f64, n_beams: u32, a_bar: f64) -> PyResult<f64> {
    analytic::ts_rate_quadrature(&params.inner, h, n_beams, a_bar).map_err(value_err)
}

#[pyfunction]
fn avg_rate_ts(params: &PySystemParams, n_beams: u32, a_bar: f64) -> PyResult<f64> {
    analytic::avg_rate_ts(&params.inner, n_beams, a_bar).map_err(value_err)
}

#[pyfunction]
fn avg_power_ts(params: &PySystemParams, n_beams: u32, a_bar: f64) -> PyResult<f64> {
    analytic::avg_power_ts(&params.inner, n_beams, a_bar).map_err(value_err)
}

#[pyfunction]
fn ts_outage_exact(params: &PySystemParams, n_beams: u32, a_bar: f64, q_hat_w: f64) -> PyResult<f64> {
    analytic::ts_outage_exact(&params.inner, n_beams, a_bar, q_hat_w).map_err(value_err)
}

/// High-power outage law; returns (value, in_regime).
#[pyfunction]
fn ts_outage_asymptotic(
    params: &PySystemParams,
    n_beams: u32,
    a_bar: f64,
    q_hat_w: f64,
) -> (f64, bool) {
    let a = analytic::ts_outage_asymptotic(&params.inner, n_beams, a_bar, q_hat_w);
    (a.value, a.in_regime)
}

#[pyfunction]
fn ts_rate_scaling(n_t: u32, n_beams: u32, a_bar: f64) -> PyResult<f64> {
    analytic::ts_rate_scaling(n_t, n_beams, a_bar).map_err(value_err)
}

#[pyfunction]
fn ts_power_scaling(n_t: u32, n_beams: u32, a_bar: f64) -> PyResult<f64> {
    analytic::ts_power_scaling(n_t, n_beams, a_bar).map_err(value_err)
}

#[pyfunction]
fn solve_a_bar_for_power_scaling(n_t: u32, n_beams: u32, pi_target: f64) -> PyResult<f64> {
    if !(pi_target > 0.0 && pi_target < 1.0) {
        return Err(value_err(format!("pi_target must lie in (0, 1), got {pi_target}")));
    }
    analytic::solve_a_bar_for_power_scaling(n_t, n_beams, pi_target).map_err(value_err)
}

#[pyfunction]
fn solve_a_bar_for_block_power(
    params: &PySystemParams,
    h: f64,
    n_beams: u32,
    q_target_w: f64,
) -> PyResult<f64> {
    analytic::solve_a_bar_for_block_power(&params.inner, h, n_beams, q_target_w).map_err(value_err)
}

// ---------------------------------------------------------------------------
// unitary and binary beams (n_t = 2, N = 1 analytics)
// ---------------------------------------------------------------------------

#[pyfunction]
fn urb_avg_rate(params: &PySystemParams, a_bar: f64) -> PyResult<f64> {
    altbeams::urb_avg_rate(&params.inner, a_bar).map_err(value_err)
}

#[pyfunction]
fn urb_avg_power(params: &PySystemParams, a_bar: f64) -> PyResult<f64> {
    altbeams::urb_avg_power(&params.inner, a_bar).map_err(value_err)
}

#[pyfunction]
fn brb_avg_rate_orderstat(params: &PySystemParams, a_bar: f64) -> PyResult<f64> {
    altbeams::brb_avg_rate_orderstat(&params.inner, a_bar).map_err(value_err)
}

#[pyfunction]
fn brb_avg_power(params: &PySystemParams, a_bar: f64) -> PyResult<f64> {
    altbeams::brb_avg_power(&params.inner, a_bar).map_err(value_err)
}

// ---------------------------------------------------------------------------
// Monte Carlo estimators
// ---------------------------------------------------------------------------

fn check_mc_inputs(params: &SystemParams, scheme: BeamScheme) -> PyResult<()> {
    params.validate().map_err(value_err)?;
    scheme.validate(params.n_t).map_err(value_err)
}

/// Fading-averaged rate and harvested power with standard errors.
#[pyfunction]
fn estimate_avg_re(
    py: Python<'_>,
    params: &PySystemParams,
    scheme: &PyBeamScheme,
    policy: &PySwitchPolicy,
    cfg: &PyMcConfig,
) -> PyResult<Py<PyDict>> {
    check_mc_inputs(&params.inner, scheme.inner)?;
    let (p, s, pol, c) = (params.inner, scheme.inner, policy.inner, cfg.inner);
    let pt = py.allow_threads(move || mcsim::estimate_avg_re(&p, s, pol, &c));
    let (se_r, se_q) = match pt.source {
        PointSource::MonteCarlo { stderr_rate, stderr_power } => (stderr_rate, stderr_power),
        PointSource::Analytic => (0.0, 0.0),
    };
    let d = PyDict::new_bound(py);
    d.set_item("rate", pt.rate)?;
    d.set_item("power", pt.power)?;
    d.set_item("stderr_rate", se_r)?;
    d.set_item("stderr_power", se_q)?;
    Ok(d.into())
}

/// Power outage frequency at threshold `q_hat_w` with its standard error.
#[pyfunction]
fn estimate_power_outage(
    py: Python<'_>,
    params: &PySystemParams,
    scheme: &PyBeamScheme,
    policy: &PySwitchPolicy,
    q_hat_w: f64,
    cfg: &PyMcConfig,
) -> PyResult<Py<PyDict>> {
    check_mc_inputs(&params.inner, scheme.inner)?;
    let (p, s, pol, c) = (params.inner, scheme.inner, policy.inner, cfg.inner);
    let est = py
        .allow_threads(move || mcsim::estimate_power_outage(&p, s, pol, q_hat_w, &c))
        .map_err(value_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("mean", est.mean)?;
    d.set_item("stderr", est.stderr)?;
    d.set_item("n", est.n)?;
    Ok(d.into())
}

/// Multicast network throughput and harvested sum power at one rate target.
#[pyfunction]
#[pyo3(signature = (params, beam, n_users, dist_range, pathloss_ref_db, pathloss_exp, shadow_sigma_db, rate_target, cfg))]
#[allow(clippy::too_many_arguments)]
fn simulate_network(
    py: Python<'_>,
    params: &PySystemParams,
    beam: &PyBeamScheme,
    n_users: u32,
    dist_range: (f64, f64),
    pathloss_ref_db: f64,
    pathloss_exp: f64,
    shadow_sigma_db: f64,
    rate_target: f64,
    cfg: &PyMcConfig,
) -> PyResult<Py<PyDict>> {
    check_mc_inputs(&params.inner, beam.inner)?;
    let spec = NetworkSpec {
        n_users,
        dist_range,
        pathloss_ref_db,
        pathloss_exp,
        shadow_sigma_db,
        rate_target,
        beam: beam.inner,
        params: params.inner,
    };
    spec.validate().map_err(value_err)?;
    let c = cfg.inner;
    let res = py.allow_threads(move || mcsim::simulate_network(&spec, &c)).map_err(value_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("throughput", res.throughput)?;
    d.set_item("avg_sum_power_w", res.avg_sum_power_w)?;
    d.set_item("per_user_outage", res.per_user_outage)?;
    Ok(d.into())
}

#[pymodule]
fn swipt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyBeamScheme>()?;
    m.add_class::<PySwitchPolicy>()?;
    m.add_class::<PyMcConfig>()?;

    m.add_function(wrap_pyfunction!(ps_rate, m)?)?;
    m.add_function(wrap_pyfunction!(ps_power, m)?)?;
    m.add_function(wrap_pyfunction!(avg_rate_ps, m)?)?;
    m.add_function(wrap_pyfunction!(avg_power_ps, m)?)?;
    m.add_function(wrap_pyfunction!(ps_outage, m)?)?;

    m.add_function(wrap_pyfunction!(ts_power, m)?)?;
    m.add_function(wrap_pyfunction!(ts_rate, m)?)?;
    m.add_function(wrap_pyfunction!(ts_rate_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(avg_rate_ts, m)?)?;
    m.add_function(wrap_pyfunction!(avg_power_ts, m)?)?;
    m.add_function(wrap_pyfunction!(ts_outage_exact, m)?)?;
    m.add_function(wrap_pyfunction!(ts_outage_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(ts_rate_scaling, m)?)?;
    m.add_function(wrap_pyfunction!(ts_power_scaling, m)?)?;
    m.add_function(wrap_pyfunction!(solve_a_bar_for_power_scaling, m)?)?;
    m.add_function(wrap_pyfunction!(solve_a_bar_for_block_power, m)?)?;

    m.add_function(wrap_pyfunction!(urb_avg_rate, m)?)?;
    m.add_function(wrap_pyfunction!(urb_avg_power, m)?)?;
    m.add_function(wrap_pyfunction!(brb_avg_rate_orderstat, m)?)?;
    m.add_function(wrap_pyfunction!(brb_avg_power, m)?)?;

    m.add_function(wrap_pyfunction!(estimate_avg_re, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_power_outage, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_network, m)?)?;
    Ok(())
}
