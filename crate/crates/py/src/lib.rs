//! Python bindings: the covariance constructors, classical sampling oracles,
//! and the simulated quantum pipelines, exposed with plain Python types.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gaussqpipe_core::covariance::{self, CovKind, GridSpec, ProcessKind, ProcessSpec};
use gaussqpipe_core::linalg;
use gaussqpipe_core::pipeline::{self, EstimateMode, NormErrorMode, RouteKind, SpectralEstimates};
use gaussqpipe_core::qroutines::{self, QaeMode};
use gaussqpipe_core::sampler::{self, RBergomiSpec, SampleRoute};
use gaussqpipe_core::scaling;
use nalgebra::DMatrix;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_process(process: &str, hurst: f64, lambda: f64, sigma: f64) -> PyResult<ProcessSpec> {
    match process {
        "rlfbm" => ProcessSpec::rlfbm(hurst).map_err(err),
        "stdfbm" => ProcessSpec::stdfbm(hurst).map_err(err),
        "fou" => ProcessSpec::fou(hurst, lambda, sigma).map_err(err),
        other => Err(PyValueError::new_err(format!(
            "unknown process '{other}': expected rlfbm, stdfbm, or fou"
        ))),
    }
}

fn parse_kind(kind: &str) -> PyResult<CovKind> {
    match kind {
        "pv" => Ok(CovKind::PathValues),
        "ns" => Ok(CovKind::Noises),
        other => Err(PyValueError::new_err(format!("unknown kind '{other}': expected pv or ns"))),
    }
}

fn parse_route(route: &str) -> PyResult<RouteKind> {
    match route {
        "x" => Ok(RouteKind::X),
        "y" => Ok(RouteKind::Y),
        other => Err(PyValueError::new_err(format!("unknown route '{other}': expected x or y"))),
    }
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

fn rows_to_matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix rows must all have the same length"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Dense covariance matrix with its process/grid/kind provenance.
#[pyclass(name = "CovMatrix")]
#[derive(Clone)]
struct PyCovMatrix {
    inner: covariance::CovMatrix,
}

#[pymethods]
impl PyCovMatrix {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.label().to_string()
    }

    #[getter]
    fn process(&self) -> String {
        self.inner.process.kind.label().to_string()
    }

    fn entries(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.inner.entries)
    }

    /// {lambda_min, lambda_max, frob, kappa}.
    fn characteristics(&self) -> PyResult<(f64, f64, f64, f64)> {
        let c = linalg::cov_characteristics(&self.inner).map_err(err)?;
        Ok((c.lambda_min, c.lambda_max, c.frob, c.kappa))
    }
}

#[pyfunction]
fn eval_2f1(a: f64, b: f64, c: f64, z: f64) -> PyResult<f64> {
    covariance::eval_2f1(a, b, c, z).map_err(err)
}

#[pyfunction]
fn eval_1f2(a: f64, b1: f64, b2: f64, z: f64) -> PyResult<f64> {
    covariance::eval_1f2(a, b1, b2, z).map_err(err)
}

#[pyfunction]
fn rlfbm_cov(h: f64, u: f64, v: f64) -> PyResult<f64> {
    covariance::rlfbm_cov(h, u, v).map_err(err)
}

#[pyfunction]
fn stdfbm_cov(h: f64, t: f64, s: f64) -> f64 {
    covariance::stdfbm_cov(h, t, s)
}

#[pyfunction]
fn fou_cov(h: f64, lambda: f64, sigma: f64, s: f64) -> PyResult<f64> {
    covariance::fou_cov(h, lambda, sigma, s).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (process, hurst, n, kind, horizon=1.0, lambda=1.0, sigma=1.0))]
fn build_cov(
    process: &str,
    hurst: f64,
    n: usize,
    kind: &str,
    horizon: f64,
    lambda: f64,
    sigma: f64,
) -> PyResult<PyCovMatrix> {
    let spec = parse_process(process, hurst, lambda, sigma)?;
    let grid = GridSpec::uniform(horizon, n).map_err(err)?;
    let inner = covariance::build_cov(&spec, &grid, parse_kind(kind)?).map_err(err)?;
    Ok(PyCovMatrix { inner })
}

#[pyfunction]
fn sqrtm_psd(rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let m = rows_to_matrix(rows)?;
    Ok(matrix_to_rows(&linalg::sqrtm_psd(&m).map_err(err)?))
}

#[pyfunction]
fn cholesky(rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let m = rows_to_matrix(rows)?;
    Ok(matrix_to_rows(&linalg::cholesky(&m).map_err(err)?))
}

/// Analytic singular values of the cumulative-sum matrix L_N (ascending),
/// plus (sigma_min, sigma_max).
#[pyfunction]
fn ln_spectrum(n: usize) -> PyResult<(Vec<f64>, f64, f64)> {
    let s = linalg::ln_spectrum(n).map_err(err)?;
    Ok((s.sigmas, s.sigma_min, s.sigma_max))
}

#[pyfunction]
fn sample_std_normal(dim: usize, seed: u64) -> (Vec<f64>, f64) {
    sampler::sample_std_normal(dim, seed)
}

/// Exact Gaussian path sample: returns (x, path, direction) where path is
/// x itself on route "x" and the cumulative sum on route "y".
#[pyfunction]
fn sample_path(cov: &PyCovMatrix, z: Vec<f64>, route: &str) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let r = match route {
        "x" => SampleRoute::PathValues,
        "y" => SampleRoute::Noises,
        other => return Err(PyValueError::new_err(format!("unknown route '{other}'"))),
    };
    let rec = sampler::sample_path(&cov.inner, &z, r).map_err(err)?;
    let path = rec.path().to_vec();
    Ok((rec.x, path, rec.direction))
}

#[pyfunction]
#[pyo3(signature = (process, hurst, beta, lambda=1.0, sigma=1.0))]
fn xi_bound(process: &str, hurst: f64, beta: f64, lambda: f64, sigma: f64) -> PyResult<f64> {
    let spec = parse_process(process, hurst, lambda, sigma)?;
    sampler::xi_bound(&spec, beta).map_err(err)
}

/// Deterministic rBergomi prefactor on the uniform grid: (f, c).
#[pyfunction]
#[pyo3(signature = (xi0, eta, hurst, c_tilde, n, horizon=1.0))]
fn rbergomi_prefactor(
    xi0: f64,
    eta: f64,
    hurst: f64,
    c_tilde: f64,
    n: usize,
    horizon: f64,
) -> PyResult<(Vec<f64>, f64)> {
    let spec = RBergomiSpec::flat(xi0, eta, hurst, c_tilde).map_err(err)?;
    let grid = GridSpec::uniform(horizon, n).map_err(err)?;
    Ok(sampler::rbergomi_prefactor(&spec, &grid))
}

#[pyfunction]
fn riemann_sum(f: Vec<f64>, c: f64, x: Vec<f64>, horizon: f64) -> PyResult<f64> {
    sampler::riemann_sum(&f, c, &x, horizon).map_err(err)
}

fn estimates(cov: &PyCovMatrix, est_mode: &str) -> PyResult<SpectralEstimates> {
    match est_mode {
        "oracle" => SpectralEstimates::oracle(&cov.inner).map_err(err),
        "powerlaw" => {
            let n = cov.inner.grid.blocks;
            let ladder = [n, n * 2, n * 4, n * 8, n * 16];
            SpectralEstimates::power_law(&cov.inner.process, cov.inner.kind, n, &ladder)
                .map_err(err)
        }
        other => Err(PyValueError::new_err(format!(
            "unknown est_mode '{other}': expected oracle or powerlaw"
        ))),
    }
}

/// Simulated |x> preparation: returns (fidelity, state_amplitudes, qaa_rounds).
#[pyfunction]
#[pyo3(signature = (cov, z, eps, est_mode="oracle"))]
fn prepare_x(
    cov: &PyCovMatrix,
    z: Vec<f64>,
    eps: f64,
    est_mode: &str,
) -> PyResult<(f64, Vec<f64>, u64)> {
    let est = estimates(cov, est_mode)?;
    let res = pipeline::prepare_x(&cov.inner, &z, eps, &est).map_err(err)?;
    let amps: Vec<f64> = res.state.amps.iter().map(|a| a.re).collect();
    Ok((res.fidelity, amps, res.qaa_rounds))
}

/// Simulated |y> preparation from a noise covariance.
#[pyfunction]
#[pyo3(signature = (cov, z, eps, est_mode="oracle"))]
fn prepare_y(
    cov: &PyCovMatrix,
    z: Vec<f64>,
    eps: f64,
    est_mode: &str,
) -> PyResult<(f64, Vec<f64>, u64)> {
    let est = estimates(cov, est_mode)?;
    let res = pipeline::prepare_y(&cov.inner, &z, eps, &est).map_err(err)?;
    let amps: Vec<f64> = res.state.amps.iter().map(|a| a.re).collect();
    Ok((res.fidelity, amps, res.qaa_rounds))
}

/// QAE norm estimate: returns (estimate, implied_eps_hat).
#[pyfunction]
#[pyo3(signature = (cov, z, eps_hat, route="x", seed=1, est_mode="oracle"))]
fn estimate_norm(
    cov: &PyCovMatrix,
    z: Vec<f64>,
    eps_hat: f64,
    route: &str,
    seed: u64,
    est_mode: &str,
) -> PyResult<(f64, f64)> {
    let est = estimates(cov, est_mode)?;
    let ne = pipeline::estimate_norm(
        &cov.inner,
        &z,
        NormErrorMode::Absolute(eps_hat),
        parse_route(route)?,
        &est,
        seed,
    )
    .map_err(err)?;
    Ok((ne.estimate, ne.eps_hat))
}

/// Exponentiated-state preparation. Returns a dict with either
/// {"skipped": reason} or {"fidelity", "eta_tilde", "eta_ok", "poly_degree",
/// "state"}.
#[pyfunction]
#[pyo3(signature = (cov, z, f, c, xi, eps, route="x", seed=1, est_mode="oracle"))]
#[allow(clippy::too_many_arguments)]
fn exponentiate(
    py: Python<'_>,
    cov: &PyCovMatrix,
    z: Vec<f64>,
    f: Vec<f64>,
    c: f64,
    xi: f64,
    eps: f64,
    route: &str,
    seed: u64,
    est_mode: &str,
) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let est = estimates(cov, est_mode)?;
    let run =
        pipeline::exponentiate(&cov.inner, &z, &f, c, xi, eps, parse_route(route)?, &est, seed)
            .map_err(err)?;
    let dict = PyDict::new(py);
    match run {
        pipeline::ExpRun::Skipped(reason) => {
            dict.set_item("skipped", format!("{reason:?}"))?;
        }
        pipeline::ExpRun::Done(res) => {
            dict.set_item("fidelity", res.fidelity)?;
            dict.set_item("eta_tilde", res.eta.calibration.eta_tilde)?;
            dict.set_item("eta_ok", res.eta.final_ok)?;
            dict.set_item("poly_degree", res.poly_degree)?;
            let amps: Vec<f64> = res.state.amps.iter().map(|a| a.re).collect();
            dict.set_item("state", amps)?;
        }
    }
    Ok(dict.into())
}

/// Discrete-sum QAE estimate of (1/N) sum f_i exp(c w_i). Returns a dict
/// with either {"skipped": reason} or {"estimate"}.
#[pyfunction]
#[pyo3(signature = (cov, z, f, c, xi, eps_hat, route="x", seed=1, est_mode="oracle"))]
#[allow(clippy::too_many_arguments)]
fn discrete_sum(
    py: Python<'_>,
    cov: &PyCovMatrix,
    z: Vec<f64>,
    f: Vec<f64>,
    c: f64,
    xi: f64,
    eps_hat: f64,
    route: &str,
    seed: u64,
    est_mode: &str,
) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let est = estimates(cov, est_mode)?;
    let run = pipeline::discrete_sum(
        &cov.inner,
        &z,
        &f,
        c,
        xi,
        eps_hat,
        parse_route(route)?,
        &est,
        seed,
    )
    .map_err(err)?;
    let dict = PyDict::new(py);
    match run {
        pipeline::SumRun::Skipped(reason) => {
            dict.set_item("skipped", format!("{reason:?}"))?;
        }
        pipeline::SumRun::Done(res) => {
            dict.set_item("estimate", res.estimate)?;
        }
    }
    Ok(dict.into())
}

/// Phase-estimation QAE simulation: returns (estimate, grover_queries).
#[pyfunction]
#[pyo3(signature = (a_true, eps_qae, mode="amplitude", seed=1))]
fn qae(a_true: f64, eps_qae: f64, mode: &str, seed: u64) -> PyResult<(f64, u64)> {
    let m = match mode {
        "amplitude" => QaeMode::Amplitude,
        "probability" => QaeMode::Probability,
        other => return Err(PyValueError::new_err(format!("unknown QAE mode '{other}'"))),
    };
    let out = qroutines::qae(a_true, eps_qae, m, seed).map_err(err)?;
    Ok((out.estimate, out.grover_queries))
}

#[pyfunction]
fn expected_exponent(process: &str, kind: &str, characteristic: &str, h: f64) -> PyResult<f64> {
    let p = match process {
        "rlfbm" => ProcessKind::RlFbm,
        "stdfbm" => ProcessKind::StdFbm,
        "fou" => ProcessKind::Fou,
        other => return Err(PyValueError::new_err(format!("unknown process '{other}'"))),
    };
    let c = match characteristic {
        "lambda_min" => scaling::Characteristic::LambdaMin,
        "lambda_max" => scaling::Characteristic::LambdaMax,
        "frob" => scaling::Characteristic::Frobenius,
        other => return Err(PyValueError::new_err(format!("unknown characteristic '{other}'"))),
    };
    scaling::expected_exponent(p, parse_kind(kind)?, c, h).map_err(err)
}

#[pyfunction]
fn complexity_exponent(process: &str, h: f64, route: &str) -> PyResult<f64> {
    let p = match process {
        "rlfbm" => ProcessKind::RlFbm,
        "stdfbm" => ProcessKind::StdFbm,
        "fou" => ProcessKind::Fou,
        other => return Err(PyValueError::new_err(format!("unknown process '{other}'"))),
    };
    let kind = match route {
        "x" | "pv" => CovKind::PathValues,
        "y" | "ns" => CovKind::Noises,
        other => return Err(PyValueError::new_err(format!("unknown route '{other}'"))),
    };
    scaling::complexity_exponent(p, h, kind).map_err(err)
}

#[pyfunction]
fn p_tilde(h: f64) -> PyResult<f64> {
    scaling::p_tilde(h).map_err(err)
}

/// Log-log power-law fit: returns (exponent, coefficient_endpoint, r2).
#[pyfunction]
#[pyo3(signature = (points, tail_fraction=0.5))]
fn fit_power_law(points: Vec<(f64, f64)>, tail_fraction: f64) -> PyResult<(f64, f64, f64)> {
    let fit = scaling::fit_power_law(&points, tail_fraction).map_err(err)?;
    Ok((fit.exponent, fit.coefficient, fit.r2))
}

#[pymodule]
fn gaussqpipe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCovMatrix>()?;
    m.add_function(wrap_pyfunction!(eval_2f1, m)?)?;
    m.add_function(wrap_pyfunction!(eval_1f2, m)?)?;
    m.add_function(wrap_pyfunction!(rlfbm_cov, m)?)?;
    m.add_function(wrap_pyfunction!(stdfbm_cov, m)?)?;
    m.add_function(wrap_pyfunction!(fou_cov, m)?)?;
    m.add_function(wrap_pyfunction!(build_cov, m)?)?;
    m.add_function(wrap_pyfunction!(sqrtm_psd, m)?)?;
    m.add_function(wrap_pyfunction!(cholesky, m)?)?;
    m.add_function(wrap_pyfunction!(ln_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(sample_std_normal, m)?)?;
    m.add_function(wrap_pyfunction!(sample_path, m)?)?;
    m.add_function(wrap_pyfunction!(xi_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rbergomi_prefactor, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_sum, m)?)?;
    m.add_function(wrap_pyfunction!(prepare_x, m)?)?;
    m.add_function(wrap_pyfunction!(prepare_y, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_norm, m)?)?;
    m.add_function(wrap_pyfunction!(exponentiate, m)?)?;
    m.add_function(wrap_pyfunction!(discrete_sum, m)?)?;
    m.add_function(wrap_pyfunction!(qae, m)?)?;
    m.add_function(wrap_pyfunction!(expected_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(complexity_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(p_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    Ok(())
}
