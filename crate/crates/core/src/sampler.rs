//! Classical oracle: exact Gaussian path sampling, exponentiated paths,
//! rough Bergomi prefactors, Riemann sums, and the high-probability sup-norm
//! bound Ξ. Everything here is ground truth for the quantum-pipeline
//! fidelity tests.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::gamma;

use crate::covariance::{CovKind, CovMatrix, GridSpec, ProcessKind, ProcessSpec};
use crate::linalg::{cumulative_sum, sqrtm_psd};
use crate::{Error, Result};

/// Counter-based uniform generator: the splitmix64 output function applied
/// to an incrementing counter seeded once. Deterministic per seed, trivially
/// reproducible, and adequate for the Monte-Carlo checks in this crate.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in (0, 1]; never returns 0 so that ln() below is safe.
    pub fn next_uniform(&mut self) -> f64 {
        let bits = self.next_u64() >> 11; // 53 bits
        (bits as f64 + 1.0) / 9_007_199_254_740_992.0
    }

    /// Standard normal via the basic Box-Muller transform; consumes exactly
    /// two uniforms per pair of normals.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// Derive a stage sub-seed from a master seed; splitmix-style mixing of
/// (master, stage_id) so independent pipeline stages draw from independent
/// streams.
pub fn sub_seed(master: u64, stage_id: u64) -> u64 {
    let mut z = master ^ stage_id.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw a standard normal vector of the given dimension; returns the vector
/// and its Euclidean norm. Deterministic per (seed, dim).
pub fn sample_std_normal(dim: usize, seed: u64) -> (Vec<f64>, f64) {
    let mut rng = CounterRng::new(seed);
    let mut z = Vec::with_capacity(dim);
    while z.len() < dim {
        let (a, b) = rng.next_normal_pair();
        z.push(a);
        if z.len() < dim {
            z.push(b);
        }
    }
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    (z, norm)
}

/// Sampling route: path values directly, or noises followed by a cumulative
/// sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRoute {
    PathValues,
    Noises,
}

/// One exact Gaussian sample: the driving normal vector, the correlated
/// vector x = Σ^{1/2} z, optionally its cumulative sum y = L x, and the
/// normalised direction of the route's final vector.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    pub seed: u64,
    pub z: Vec<f64>,
    pub z_norm: f64,
    pub x: Vec<f64>,
    pub x_norm: f64,
    pub y: Option<Vec<f64>>,
    pub direction: Vec<f64>,
}

impl SampleRecord {
    /// The route's final vector (x for PV, y for NS).
    pub fn path(&self) -> &[f64] {
        self.y.as_deref().unwrap_or(&self.x)
    }

    pub fn path_norm(&self) -> f64 {
        self.path().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Apply Σ^{1/2} (and L for the noise route) to a standard normal vector.
///
/// The route must match the covariance kind: PV expects Σᵖᵛ and returns x;
/// NS expects Σⁿˢ and returns y = L (Σⁿˢ)^{1/2} z, which has the law of the
/// path values.
pub fn sample_path(cov: &CovMatrix, z: &[f64], route: SampleRoute) -> Result<SampleRecord> {
    let expected_kind = match route {
        SampleRoute::PathValues => CovKind::PathValues,
        SampleRoute::Noises => CovKind::Noises,
    };
    if cov.kind != expected_kind {
        return Err(Error::InvalidInput(format!(
            "route {:?} requires covariance kind {:?}, got {:?}",
            route, expected_kind, cov.kind
        )));
    }
    if z.len() != cov.dim {
        return Err(Error::DimensionMismatch { expected: cov.dim, got: z.len() });
    }
    let s = sqrtm_psd(&cov.entries)?;
    sample_path_with_sqrt(&s, z, route)
}

/// Same as [`sample_path`] with a precomputed Σ^{1/2}, for batched sampling.
pub fn sample_path_with_sqrt(
    sqrt_cov: &DMatrix<f64>,
    z: &[f64],
    route: SampleRoute,
) -> Result<SampleRecord> {
    if z.len() != sqrt_cov.nrows() {
        return Err(Error::DimensionMismatch { expected: sqrt_cov.nrows(), got: z.len() });
    }
    let zv = DVector::from_column_slice(z);
    let x: Vec<f64> = (sqrt_cov * &zv).iter().cloned().collect();
    let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let y = match route {
        SampleRoute::PathValues => None,
        SampleRoute::Noises => Some(cumulative_sum(&x)),
    };
    let finalv: &[f64] = y.as_deref().unwrap_or(&x);
    let fnorm = finalv.iter().map(|v| v * v).sum::<f64>().sqrt();
    let direction = finalv.iter().map(|v| v / fnorm).collect();
    let z_norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SampleRecord {
        seed: 0,
        z: z.to_vec(),
        z_norm,
        x,
        x_norm,
        y,
        direction,
    })
}

/// High-probability uniform bound Ξ on sup |G_t| over [0, 1]:
/// Ξ = m̂ + σ̂ √(2 log(2/(1−β))), with the expected-supremum bound
/// m̂ < 16.3 C/√H from the generic chaining estimate and σ̂ the supremum of
/// the marginal standard deviation.
pub fn xi_bound(process: &ProcessSpec, beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidInput("beta must lie in [0, 1)".into()));
    }
    let h = process.hurst;
    let c = match process.kind {
        ProcessKind::StdFbm => 1.0,
        ProcessKind::RlFbm => rlfbm_holder_constant(h)?,
        ProcessKind::Fou => fou_holder_constant(process)?,
    };
    let sigma_hat = match process.kind {
        ProcessKind::StdFbm | ProcessKind::RlFbm => 1.0,
        ProcessKind::Fou => {
            let s2 = process.sigma * process.sigma
                * process.lambda.powf(-2.0 * h)
                * gamma(2.0 * h + 1.0)
                / 2.0;
            s2.sqrt()
        }
    };
    let m_hat = 16.3 * c / h.sqrt();
    let tail = (2.0 * (2.0 / (1.0 - beta)).ln()).sqrt();
    Ok(m_hat + sigma_hat * tail)
}

/// Hölder constant C for RL-fBM: maximise E[(W̃_t − W̃_s)²]/|t−s|^{2H} on a
/// 100×100 grid of [0,1]². The paper cites the bound's existence without a
/// value, so it is computed numerically once per call.
fn rlfbm_holder_constant(h: f64) -> Result<f64> {
    use crate::covariance::rlfbm_cov;
    let n = 100;
    let mut best: f64 = 1.0; // ratio -> 1 for (t, 0) pairs as t -> 0
    for i in 0..=n {
        let t = i as f64 / n as f64;
        for j in 0..i {
            let s = j as f64 / n as f64;
            let var = rlfbm_cov(h, t, t)? + rlfbm_cov(h, s, s)? - 2.0 * rlfbm_cov(h, t, s)?;
            let ratio = var / (t - s).powf(2.0 * h);
            best = best.max(ratio);
        }
    }
    Ok(best.sqrt())
}

/// Hölder constant C for stationary fOU: C² = sup r̃(τ) over τ ∈ (0, 1],
/// where r̃(τ) = 2(r(0) − r(τ))/τ^{2H} and r is the auto-covariance. The
/// limit r̃(0⁺) = σ² seeds the maximisation.
fn fou_holder_constant(process: &ProcessSpec) -> Result<f64> {
    use crate::covariance::fou_cov;
    let (h, lambda, sigma) = (process.hurst, process.lambda, process.sigma);
    let r0 = fou_cov(h, lambda, sigma, 0.0)?;
    let mut best = sigma * sigma;
    let n = 10_000;
    for i in 1..=n {
        let tau = i as f64 / n as f64;
        let r = fou_cov(h, lambda, sigma, tau)?;
        let ratio = 2.0 * (r0 - r) / tau.powf(2.0 * h);
        best = best.max(ratio);
    }
    Ok(best.sqrt())
}

/// Rough Bergomi model parameters. The forward variance curve is a table of
/// (t, ξ₀(t)) knots, linearly interpolated; a single knot means a flat curve.
#[derive(Debug, Clone)]
pub struct RBergomiSpec {
    pub xi0: Vec<(f64, f64)>,
    pub eta: f64,
    pub hurst: f64,
    /// 1 for the variance process V, 1/2 for the volatility process √V.
    pub c_tilde: f64,
}

impl RBergomiSpec {
    pub fn flat(xi0: f64, eta: f64, hurst: f64, c_tilde: f64) -> Result<Self> {
        Self::new(vec![(0.0, xi0)], eta, hurst, c_tilde)
    }

    pub fn new(xi0: Vec<(f64, f64)>, eta: f64, hurst: f64, c_tilde: f64) -> Result<Self> {
        if xi0.is_empty() || xi0.iter().any(|&(_, v)| v <= 0.0) {
            return Err(Error::InvalidInput("xi0 must be positive on the grid".into()));
        }
        if eta <= 0.0 {
            return Err(Error::InvalidInput("eta must be > 0".into()));
        }
        if hurst <= 0.0 || hurst >= 1.0 {
            return Err(Error::InvalidInput("Hurst index must lie in (0,1)".into()));
        }
        if c_tilde != 1.0 && c_tilde != 0.5 {
            return Err(Error::InvalidInput("c_tilde must be 1 or 1/2".into()));
        }
        Ok(Self { xi0, eta, hurst, c_tilde })
    }

    pub fn xi0_at(&self, t: f64) -> f64 {
        let knots = &self.xi0;
        if t <= knots[0].0 {
            return knots[0].1;
        }
        for w in knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                let frac = (t - t0) / (t1 - t0);
                return v0 + frac * (v1 - v0);
            }
        }
        knots.last().unwrap().1
    }
}

/// Deterministic prefactor of the rBergomi variance/volatility path:
/// fᵢ = ξ₀(tᵢ)^c̃ exp(−c̃ η²/2 · tᵢ^{2H}), with exponent scale c = c̃ η, so
/// that V^c̃ = f ⊙ exp(c W̃ᴴ) on the grid t₁..t_N.
pub fn rbergomi_prefactor(spec: &RBergomiSpec, grid: &GridSpec) -> (Vec<f64>, f64) {
    let f = grid.points[1..]
        .iter()
        .map(|&t| {
            spec.xi0_at(t).powf(spec.c_tilde)
                * (-spec.c_tilde * spec.eta * spec.eta / 2.0 * t.powf(2.0 * spec.hurst)).exp()
        })
        .collect();
    (f, spec.c_tilde * spec.eta)
}

/// Componentwise exponentiated path vᵢ = fᵢ e^{c xᵢ}.
pub fn classical_exp_path(f: &[f64], c: f64, x: &[f64]) -> Result<Vec<f64>> {
    if c == 0.0 {
        return Err(Error::InvalidInput("exponent scale c must be nonzero".into()));
    }
    if f.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), got: x.len() });
    }
    Ok(f.iter().zip(x).map(|(&fi, &xi)| fi * (c * xi).exp()).collect())
}

/// Riemann sum (T/N) Σᵢ fᵢ e^{c xᵢ}. Callers using the abstract 1/N form
/// pass T = 1 and fold any horizon into f.
pub fn riemann_sum(f: &[f64], c: f64, x: &[f64], horizon: f64) -> Result<f64> {
    let v = classical_exp_path(f, c, x)?;
    Ok(horizon / f.len() as f64 * v.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::build_cov;

    #[test]
    fn normals_deterministic_per_seed() {
        let (a, na) = sample_std_normal(4, 42);
        let (b, nb) = sample_std_normal(4, 42);
        assert_eq!(a, b);
        assert_eq!(na, nb);
        let (c, _) = sample_std_normal(4, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn normals_mean_square_norm() {
        let dim = 8;
        let runs = 100_000;
        let mut acc = 0.0;
        for seed in 0..runs {
            let (_, n) = sample_std_normal(dim, seed);
            acc += n * n;
        }
        let mean = acc / runs as f64;
        // E||Z||^2 = dim, Var(||Z||^2) = 2 dim
        let se = (2.0 * dim as f64 / runs as f64).sqrt();
        assert!((mean - dim as f64).abs() < 5.0 * se, "mean {mean}");
    }

    #[test]
    fn normals_marginal_ks() {
        use statrs::distribution::{ContinuousCDF, Normal};
        let runs = 100_000;
        let mut xs: Vec<f64> = (0..runs).map(|s| sample_std_normal(1, 900 + s).0[0]).collect();
        xs.sort_by(f64::total_cmp);
        let phi = Normal::new(0.0, 1.0).unwrap();
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = phi.cdf(x);
            d = d.max((cdf - i as f64 / runs as f64).abs());
            d = d.max(((i + 1) as f64 / runs as f64 - cdf).abs());
        }
        // 1% critical value 1.63 / sqrt(n)
        assert!(d < 1.63 / (runs as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn direction_norm_independence() {
        // empirical correlation between ||z|| and each unit-vector component
        let dim = 4;
        let runs = 100_000;
        let mut sum_n = 0.0;
        let mut sum_c = vec![0.0; dim];
        let mut sum_nc = vec![0.0; dim];
        let mut sum_n2 = 0.0;
        let mut sum_c2 = vec![0.0; dim];
        for seed in 0..runs {
            let (z, n) = sample_std_normal(dim, 31_000 + seed);
            sum_n += n;
            sum_n2 += n * n;
            for (k, &zk) in z.iter().enumerate() {
                let c = zk / n;
                sum_c[k] += c;
                sum_c2[k] += c * c;
                sum_nc[k] += n * c;
            }
        }
        let m = runs as f64;
        let var_n = sum_n2 / m - (sum_n / m).powi(2);
        for k in 0..dim {
            let cov = sum_nc[k] / m - sum_n / m * sum_c[k] / m;
            let var_c = sum_c2[k] / m - (sum_c[k] / m).powi(2);
            let corr = cov / (var_n * var_c).sqrt();
            // SE of a sample correlation under independence is 1/sqrt(m)
            assert!(corr.abs() < 5.0 / m.sqrt(), "component {k}: corr {corr}");
        }
    }

    #[test]
    fn sample_path_identity_covariance() {
        let p = ProcessSpec::stdfbm(0.5).unwrap();
        let g = GridSpec::uniform(1.0, 3).unwrap();
        let mut cov = build_cov(&p, &g, CovKind::PathValues).unwrap();
        cov.entries = DMatrix::identity(3, 3);
        let z = vec![0.3, -1.2, 0.5];
        let rec = sample_path(&cov, &z, SampleRoute::PathValues).unwrap();
        for (a, b) in rec.x.iter().zip(z.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((rec.direction.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_bound_holds_deterministically() {
        let p = ProcessSpec::rlfbm(0.3).unwrap();
        let g = GridSpec::uniform(1.0, 8).unwrap();
        let cov = build_cov(&p, &g, CovKind::PathValues).unwrap();
        let chars = crate::linalg::cov_characteristics(&cov).unwrap();
        let s = sqrtm_psd(&cov.entries).unwrap();
        for seed in 0..1000 {
            let (z, zn) = sample_std_normal(8, seed);
            let rec = sample_path_with_sqrt(&s, &z, SampleRoute::PathValues).unwrap();
            let ratio = rec.x_norm / zn;
            assert!(ratio >= chars.lambda_min.sqrt() * (1.0 - 1e-12));
            assert!(ratio <= chars.lambda_max.sqrt() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn pv_and_ns_routes_same_law() {
        let p = ProcessSpec::stdfbm(0.7).unwrap();
        let g = GridSpec::uniform(1.0, 4).unwrap();
        let pv = build_cov(&p, &g, CovKind::PathValues).unwrap();
        let ns = build_cov(&p, &g, CovKind::Noises).unwrap();
        let s_pv = sqrtm_psd(&pv.entries).unwrap();
        let s_ns = sqrtm_psd(&ns.entries).unwrap();
        let runs = 100_000;
        let mut acc_pv = DMatrix::<f64>::zeros(4, 4);
        let mut acc_ns = DMatrix::<f64>::zeros(4, 4);
        for seed in 0..runs {
            let (z, _) = sample_std_normal(4, 5_000_000 + seed);
            let a = sample_path_with_sqrt(&s_pv, &z, SampleRoute::PathValues).unwrap();
            let b = sample_path_with_sqrt(&s_ns, &z, SampleRoute::Noises).unwrap();
            let av = DVector::from_column_slice(&a.x);
            let bv = DVector::from_column_slice(b.path());
            acc_pv += &av * av.transpose();
            acc_ns += &bv * bv.transpose();
        }
        acc_pv /= runs as f64;
        acc_ns /= runs as f64;
        let max_entry = pv.entries.amax();
        let tol = 5.0 * (2.0 * 2.0 * max_entry * max_entry / runs as f64).sqrt();
        assert!((acc_pv.clone() - &pv.entries).amax() < tol);
        assert!((acc_ns - &pv.entries).amax() < tol);
    }

    #[test]
    fn xi_bound_stdfbm_closed_form() {
        let p = ProcessSpec::stdfbm(0.25).unwrap();
        let xi = xi_bound(&p, 0.0).unwrap();
        let want = 16.3 / 0.25_f64.sqrt() + (2.0 * 2.0_f64.ln()).sqrt();
        assert!((xi - want).abs() < 1e-12, "{xi} vs {want}");
    }

    #[test]
    fn xi_bound_tail_term() {
        let p = ProcessSpec::stdfbm(0.5).unwrap();
        let at_0 = xi_bound(&p, 0.0).unwrap();
        let at_beta = xi_bound(&p, 0.9999).unwrap();
        let tail = (2.0 * (2.0_f64 / (1.0 - 0.9999)).ln()).sqrt();
        assert!((tail - 4.4505).abs() < 1e-3);
        assert!((at_beta - at_0 - (tail - (2.0 * 2.0_f64.ln()).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn xi_bound_fou_sigma_hat() {
        let p = ProcessSpec::fou(0.5, 1.0, 1.0).unwrap();
        let xi0 = xi_bound(&p, 0.0).unwrap();
        let xi9 = xi_bound(&p, 0.9999).unwrap();
        let sigma_hat = (xi9 - xi0)
            / ((2.0 * (2.0 / 1e-4_f64).ln()).sqrt() - (2.0 * 2.0_f64.ln()).sqrt());
        assert!((sigma_hat - 0.5_f64.sqrt()).abs() < 1e-10, "sigma_hat {sigma_hat}");
    }

    #[test]
    fn sup_norm_bound_holds_with_high_probability() {
        let p = ProcessSpec::rlfbm(0.3).unwrap();
        let g = GridSpec::uniform(1.0, 8).unwrap();
        let cov = build_cov(&p, &g, CovKind::PathValues).unwrap();
        let s = sqrtm_psd(&cov.entries).unwrap();
        let xi = xi_bound(&p, 0.9999).unwrap();
        let runs = 100_000;
        let mut ok_inf = 0usize;
        let mut ok_two = 0usize;
        for seed in 0..runs {
            let (z, _) = sample_std_normal(8, 77_000_000 + seed);
            let rec = sample_path_with_sqrt(&s, &z, SampleRoute::PathValues).unwrap();
            let inf = rec.x.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
            if inf <= xi {
                ok_inf += 1;
            }
            if rec.x_norm <= xi * (8.0_f64).sqrt() {
                ok_two += 1;
            }
        }
        assert!(ok_inf as f64 >= 0.999 * runs as f64, "{ok_inf}/{runs}");
        assert!(ok_two as f64 >= 0.999 * runs as f64, "{ok_two}/{runs}");
    }

    #[test]
    fn rbergomi_prefactor_substitution() {
        // f_i = xi0^ct * exp(-ct (eta^2/2) t^{2H}); at H = 1/2 the exponent
        // is -ct (eta^2/2) t
        let spec = RBergomiSpec::flat(1.0, 1.0, 0.5, 1.0).unwrap();
        let g = GridSpec::uniform(1.0, 2).unwrap();
        let (f, c) = rbergomi_prefactor(&spec, &g);
        assert!((f[0] - (-0.25_f64).exp()).abs() < 1e-15);
        assert!((f[1] - (-0.5_f64).exp()).abs() < 1e-15);
        assert_eq!(c, 1.0);

        let half = RBergomiSpec::flat(1.0, 1.0, 0.5, 0.5).unwrap();
        let (f, c) = rbergomi_prefactor(&half, &g);
        assert!((f[0] - (-0.125_f64).exp()).abs() < 1e-15);
        assert!((f[1] - (-0.25_f64).exp()).abs() < 1e-15);
        assert_eq!(c, 0.5);
    }

    #[test]
    fn rbergomi_prefactor_market_preset_decreasing() {
        let spec = RBergomiSpec::flat(0.04, 1.9, 0.1, 1.0).unwrap();
        let g = GridSpec::uniform(1.0, 16).unwrap();
        let (f, _) = rbergomi_prefactor(&spec, &g);
        assert!(f.iter().all(|&v| v > 0.0));
        assert!(f.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rbergomi_mean_matches_forward_variance() {
        // E[V_t] = xi0(t) since Var(W̃_t) = t^{2H}
        let spec = RBergomiSpec::flat(0.04, 1.5, 0.3, 1.0).unwrap();
        let g = GridSpec::uniform(1.0, 4).unwrap();
        let p = ProcessSpec::rlfbm(0.3).unwrap();
        let cov = build_cov(&p, &g, CovKind::PathValues).unwrap();
        let s = sqrtm_psd(&cov.entries).unwrap();
        let (f, c) = rbergomi_prefactor(&spec, &g);
        let runs = 100_000;
        let mut acc = vec![0.0; 4];
        let mut acc2 = vec![0.0; 4];
        for seed in 0..runs {
            let (z, _) = sample_std_normal(4, 13_000_000 + seed);
            let rec = sample_path_with_sqrt(&s, &z, SampleRoute::PathValues).unwrap();
            let v = classical_exp_path(&f, c, &rec.x).unwrap();
            for i in 0..4 {
                acc[i] += v[i];
                acc2[i] += v[i] * v[i];
            }
        }
        for i in 0..4 {
            let mean = acc[i] / runs as f64;
            let var = acc2[i] / runs as f64 - mean * mean;
            let se = (var / runs as f64).sqrt();
            assert!((mean - 0.04).abs() < 5.0 * se, "t{i}: mean {mean}, se {se}");
        }
    }

    #[test]
    fn exp_path_and_riemann_sum_basics() {
        assert!(classical_exp_path(&[1.0], 0.0, &[1.0]).is_err());
        let v = classical_exp_path(&[1.0, -1.0], 1.0, &[2.0_f64.ln(), 3.0_f64.ln()]).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-14 && (v[1] + 3.0).abs() < 1e-14);
        let ones = vec![1.0; 4];
        let zeros = vec![0.0; 4];
        assert!((riemann_sum(&ones, 1.0, &zeros, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let s = riemann_sum(&[1.0, -1.0], 1.0, &[2.0_f64.ln(), 3.0_f64.ln()], 1.0).unwrap();
        assert!((s + 0.5).abs() < 1e-14);
    }
}
