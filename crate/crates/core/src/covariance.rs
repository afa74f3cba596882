//! Auto-covariance structures of the three Gaussian processes under study
//! (Riemann-Liouville fBM, standard fBM, stationary fOU) and assembly of the
//! path-value / noise covariance matrices on a time grid.
//!
//! The RL-fBM covariance is evaluated through the Gauss hypergeometric
//! function ₂F₁ and the stationary fOU covariance through the generalised
//! hypergeometric ₁F₂; both are computed by direct term recurrence of the
//! defining series.

use nalgebra::DMatrix;
use rayon::prelude::*;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::{Error, Result};

/// Relative stop tolerance for hypergeometric partial sums.
const SERIES_TOL: f64 = 1e-13;
/// Hard cap on the number of series terms.
const MAX_TERMS: usize = 1_000_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-12
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for z ∈ [0, 1].
///
/// The series is summed with a term recurrence until the last term drops
/// below `1e-13` relative to the partial sum. At z = 1 the series is
/// special-cased through Gauss's summation theorem, which requires
/// c − a − b > 0.
pub fn eval_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::InvalidInput(format!(
            "2F1 undefined for c = {c} (nonpositive integer)"
        )));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidInput(format!(
            "2F1 series evaluation requires z in [0, 1], got {z}"
        )));
    }
    if z == 1.0 {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "2F1 at z = 1 requires c - a - b > 0, got {s}"
            )));
        }
        // Gauss summation: 2F1(a,b;c;1) = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b)).
        // Γ can pole on the denominator side; ln_gamma keeps intermediate
        // magnitudes in range. All our call sites have c−a, c−b > 0.
        if c - a <= 0.0 || c - b <= 0.0 {
            return Ok(gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b)));
        }
        let ln = ln_gamma(c) + ln_gamma(s) - ln_gamma(c - a) - ln_gamma(c - b);
        return Ok(ln.exp());
    }

    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() < SERIES_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::IterationLimit {
        max_terms: MAX_TERMS,
        last_term: term,
    })
}

/// Generalised hypergeometric function ₁F₂(a; b₁, b₂; z).
///
/// Entire in z; summed by term recurrence with the same stop rule as
/// [`eval_2f1`].
pub fn eval_1f2(a: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b1) || is_nonpositive_integer(b2) {
        return Err(Error::InvalidInput(format!(
            "1F2 undefined for b1 = {b1}, b2 = {b2} (nonpositive integer)"
        )));
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / ((b1 + nf) * (b2 + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() < SERIES_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::IterationLimit {
        max_terms: MAX_TERMS,
        last_term: term,
    })
}

/// Auto-covariance E[W̃ᴴᵤ W̃ᴴᵥ] of Riemann-Liouville fBM, normalised so that
/// the variance at t = 1 equals 1.
///
/// For u ≤ v this is u^{2H} G(v/u) with
/// G(x) = 2H/(1/2+H) · (1/x)^{1/2−H} ₂F₁(1/2−H, 1; 3/2+H; 1/x).
pub fn rlfbm_cov(h: f64, u: f64, v: f64) -> Result<f64> {
    check_hurst(h)?;
    if u < 0.0 || v < 0.0 {
        return Err(Error::InvalidInput("rlfbm_cov requires u, v >= 0".into()));
    }
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    if lo == 0.0 {
        return Ok(0.0);
    }
    let z = lo / hi; // = 1/x in (0, 1]
    let g = 2.0 * h / (0.5 + h) * z.powf(0.5 - h) * eval_2f1(0.5 - h, 1.0, 1.5 + h, z)?;
    Ok(lo.powf(2.0 * h) * g)
}

/// Auto-covariance of standard fBM: ½(|t|^{2H} + |s|^{2H} − |t−s|^{2H}).
pub fn stdfbm_cov(h: f64, t: f64, s: f64) -> f64 {
    let h2 = 2.0 * h;
    0.5 * (t.abs().powf(h2) + s.abs().powf(h2) - (t - s).abs().powf(h2))
}

/// Auto-covariance E[Yᴴₜ Yᴴₜ₊ₛ] of the stationary fOU process at lag s ≥ 0.
///
/// Closed form via ₁F₂:
/// σ²/2 · { Γ(2H+1) λ^{−2H} cosh(λs) − s^{2H} ₁F₂(1; H+1/2, H+1; λ²s²/4) }.
pub fn fou_cov(h: f64, lambda: f64, sigma: f64, s: f64) -> Result<f64> {
    check_hurst(h)?;
    if lambda <= 0.0 || sigma <= 0.0 {
        return Err(Error::InvalidInput("fou_cov requires lambda, sigma > 0".into()));
    }
    let s = s.abs();
    let g2h1 = gamma(2.0 * h + 1.0);
    let term1 = g2h1 * lambda.powf(-2.0 * h) * (lambda * s).cosh();
    let term2 = if s == 0.0 {
        0.0
    } else {
        let z = lambda * lambda * s * s / 4.0;
        s.powf(2.0 * h) * eval_1f2(1.0, h + 0.5, h + 1.0, z)?
    };
    Ok(0.5 * sigma * sigma * (term1 - term2))
}

fn check_hurst(h: f64) -> Result<()> {
    if h <= 0.0 || h >= 1.0 {
        return Err(Error::InvalidInput(format!("Hurst index must lie in (0,1), got {h}")));
    }
    Ok(())
}

/// Time discretisation 0 = t₀ < t₁ < … < t_N = T of [0, T].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub horizon: f64,
    pub blocks: usize,
    pub points: Vec<f64>,
}

impl GridSpec {
    /// Uniform grid with tᵢ = iT/N exactly.
    pub fn uniform(horizon: f64, blocks: usize) -> Result<Self> {
        if horizon <= 0.0 {
            return Err(Error::InvalidInput("horizon must be > 0".into()));
        }
        if blocks == 0 {
            return Err(Error::InvalidInput("block count must be >= 1".into()));
        }
        let points = (0..=blocks)
            .map(|i| i as f64 * horizon / blocks as f64)
            .collect();
        Ok(Self { horizon, blocks, points })
    }

    /// Arbitrary strictly increasing grid starting at 0 and ending at T.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 {
            return Err(Error::InvalidInput("grid must start at t0 = 0 and have N >= 1".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid points must be strictly increasing".into()));
        }
        Ok(Self {
            horizon: *points.last().unwrap(),
            blocks: points.len() - 1,
            points,
        })
    }
}

/// Which Gaussian process drives the covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessKind {
    RlFbm,
    StdFbm,
    Fou,
}

impl ProcessKind {
    pub fn label(self) -> &'static str {
        match self {
            ProcessKind::RlFbm => "rlfbm",
            ProcessKind::StdFbm => "stdfbm",
            ProcessKind::Fou => "fou",
        }
    }
}

/// Process selector plus parameters (λ, σ used only for fOU).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub hurst: f64,
    pub lambda: f64,
    pub sigma: f64,
}

impl ProcessSpec {
    pub fn rlfbm(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self { kind: ProcessKind::RlFbm, hurst, lambda: 1.0, sigma: 1.0 })
    }

    pub fn stdfbm(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self { kind: ProcessKind::StdFbm, hurst, lambda: 1.0, sigma: 1.0 })
    }

    pub fn fou(hurst: f64, lambda: f64, sigma: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if lambda <= 0.0 || sigma <= 0.0 {
            return Err(Error::InvalidInput("fOU requires lambda, sigma > 0".into()));
        }
        Ok(Self { kind: ProcessKind::Fou, hurst, lambda, sigma })
    }

    /// Pointwise covariance E[G_t G_s].
    pub fn cov(&self, t: f64, s: f64) -> Result<f64> {
        match self.kind {
            ProcessKind::RlFbm => rlfbm_cov(self.hurst, t, s),
            ProcessKind::StdFbm => Ok(stdfbm_cov(self.hurst, t, s)),
            ProcessKind::Fou => fou_cov(self.hurst, self.lambda, self.sigma, t - s),
        }
    }
}

/// Path-value (Σᵖᵛ) vs noise/increment (Σⁿˢ) covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovKind {
    PathValues,
    Noises,
}

impl CovKind {
    pub fn label(self) -> &'static str {
        match self {
            CovKind::PathValues => "pv",
            CovKind::Noises => "ns",
        }
    }
}

/// Dense symmetric positive-definite covariance matrix with its provenance.
///
/// For fBM kinds the matrix covers t₁..t_N (dimension N, the process starts
/// at 0 a.s.); for fOU it covers t₀..t_N (dimension N+1) with the convention
/// ΔY_{t₀} ≡ Y_{t₀} in the noise case.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    pub entries: DMatrix<f64>,
    pub dim: usize,
    pub process: ProcessSpec,
    pub grid: GridSpec,
    pub kind: CovKind,
}

/// Assemble the covariance matrix of a process on a grid.
///
/// Noise covariances are always derived from the path-value covariances via
/// the four-term difference identity, never re-derived analytically; the
/// cumulative-sum identity L Σⁿˢ Lᵀ = Σᵖᵛ is then exact up to rounding.
pub fn build_cov(process: &ProcessSpec, grid: &GridSpec, kind: CovKind) -> Result<CovMatrix> {
    let pv = path_value_matrix(process, grid)?;
    let entries = match kind {
        CovKind::PathValues => pv,
        CovKind::Noises => difference_transform(&pv),
    };
    // Symmetrize away floating-point asymmetry before the PD check.
    let entries = symmetrized(&entries);
    assert_positive_definite(&entries)?;
    Ok(CovMatrix {
        dim: entries.nrows(),
        entries,
        process: *process,
        grid: grid.clone(),
        kind,
    })
}

fn path_value_matrix(process: &ProcessSpec, grid: &GridSpec) -> Result<DMatrix<f64>> {
    let times: Vec<f64> = match process.kind {
        // fBM kinds start at t1: G_0 = 0 a.s.
        ProcessKind::RlFbm | ProcessKind::StdFbm => grid.points[1..].to_vec(),
        ProcessKind::Fou => grid.points.clone(),
    };
    let d = times.len();

    if process.kind == ProcessKind::Fou {
        // Stationary: only |t_i - t_j| matters. On uniform grids this cuts the
        // hypergeometric calls from O(N^2) to O(N); on non-uniform grids we
        // still deduplicate identical lags.
        let mut lags: Vec<f64> = Vec::new();
        let mut idx = vec![vec![0usize; d]; d];
        for i in 0..d {
            for j in 0..=i {
                let lag = times[i] - times[j];
                let pos = lags.iter().position(|&l| (l - lag).abs() < 1e-15 * times[d - 1].max(1.0));
                let p = match pos {
                    Some(p) => p,
                    None => {
                        lags.push(lag);
                        lags.len() - 1
                    }
                };
                idx[i][j] = p;
            }
        }
        let vals: Vec<f64> = lags
            .par_iter()
            .map(|&lag| fou_cov(process.hurst, process.lambda, process.sigma, lag))
            .collect::<Result<Vec<_>>>()?;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                m[(i, j)] = vals[idx[i][j]];
                m[(j, i)] = vals[idx[i][j]];
            }
        }
        return Ok(m);
    }

    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; d];
            for (j, &tj) in times.iter().enumerate().take(i + 1) {
                row[j] = process.cov(times[i], tj)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            m[(i, j)] = rows[i][j];
            m[(j, i)] = rows[i][j];
        }
    }
    Ok(m)
}

/// Four-term identity Σⁿˢᵢⱼ = Σᵖᵛᵢⱼ − Σᵖᵛᵢ₋₁,ⱼ − Σᵖᵛᵢ,ⱼ₋₁ + Σᵖᵛᵢ₋₁,ⱼ₋₁
/// with out-of-range indices treated as zero; equivalently D Σᵖᵛ Dᵀ for the
/// bidiagonal difference matrix D = L⁻¹.
fn difference_transform(pv: &DMatrix<f64>) -> DMatrix<f64> {
    let d = pv.nrows();
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 {
            0.0
        } else {
            pv[(i as usize, j as usize)]
        }
    };
    DMatrix::from_fn(d, d, |i, j| {
        let (i, j) = (i as isize, j as isize);
        at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1)
    })
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

fn assert_positive_definite(m: &DMatrix<f64>) -> Result<()> {
    // Cholesky is the cheap PD certificate; on failure fall back to the
    // spectrum so the error can report the offending eigenvalue.
    if nalgebra::Cholesky::new(m.clone()).is_some() {
        return Ok(());
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(1e-13, 10_000)
        .ok_or(Error::EigenFailure)?;
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Err(Error::NotPositiveDefinite { eigenvalue: min })
}

/// All-ones lower-triangular cumulative-sum matrix L_N.
///
/// Materialised only for block-encodings and test oracles; matrix-vector
/// products elsewhere go through [`crate::linalg::cumulative_sum`].
pub fn lower_cumsum_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if j <= i { 1.0 } else { 0.0 })
}
