//! Covariance scaling study: sweep (process, kind, H, N), compute the
//! characteristics λ_min, λ_max, ‖Σ‖_F, κ, fit power laws y ~ A N^p, and
//! evaluate the closed-form exponents the study establishes for each
//! characteristic and for the end-to-end preparation complexity.

use rayon::prelude::*;

use crate::covariance::{build_cov, CovKind, GridSpec, ProcessKind, ProcessSpec};
use crate::linalg::cov_characteristics;
use crate::{Error, Result};

/// One sweep cell: the characteristics of Σ for a given (H, N).
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub process: String,
    pub kind: String,
    pub hurst: f64,
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub frob: f64,
    pub kappa: f64,
}

/// Compute characteristics for every (H, N) cell; cells are independent and
/// evaluated in parallel, output order is deterministic.
pub fn sweep_characteristics(
    process_kind: ProcessKind,
    kind: CovKind,
    h_list: &[f64],
    n_list: &[usize],
) -> Result<Vec<SweepRow>> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("N list must be ascending".into()));
    }
    let cells: Vec<(f64, usize)> = h_list
        .iter()
        .flat_map(|&h| n_list.iter().map(move |&n| (h, n)))
        .collect();
    cells
        .par_iter()
        .map(|&(h, n)| {
            let process = match process_kind {
                ProcessKind::RlFbm => ProcessSpec::rlfbm(h)?,
                ProcessKind::StdFbm => ProcessSpec::stdfbm(h)?,
                ProcessKind::Fou => ProcessSpec::fou(h, 1.0, 1.0)?,
            };
            let grid = GridSpec::uniform(1.0, n)?;
            let cov = build_cov(&process, &grid, kind)?;
            let c = cov_characteristics(&cov)?;
            Ok(SweepRow {
                process: process_kind.label().to_string(),
                kind: kind.label().to_string(),
                hurst: h,
                n,
                lambda_min: c.lambda_min,
                lambda_max: c.lambda_max,
                frob: c.frob,
                kappa: c.kappa,
            })
        })
        .collect()
}

/// Fitted power law y ~ A N^p.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingFit {
    /// Log-log OLS slope on the top tail of the N ladder.
    pub exponent: f64,
    /// Endpoint coefficient: A = ((y_r^{1/p} − y_ℓ^{1/p})/(N_r − N_ℓ))^p for
    /// p ≠ 0, else y_r.
    pub coefficient: f64,
    /// Intercept-based coefficient from the OLS fit.
    pub coefficient_ols: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

impl ScalingFit {
    /// Evaluate the endpoint-rule fit at a given N.
    pub fn predict_endpoint(&self, n: f64) -> f64 {
        self.coefficient * n.powf(self.exponent)
    }
}

/// Log-log OLS on the top `tail_fraction` of the N ladder; the endpoint
/// coefficient uses the full data's leftmost and rightmost points.
pub fn fit_power_law(points: &[(f64, f64)], tail_fraction: f64) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("power-law fit needs at least 2 points".into()));
    }
    if !(0.0..=1.0).contains(&tail_fraction) || tail_fraction == 0.0 {
        return Err(Error::InvalidInput("tail_fraction must lie in (0, 1]".into()));
    }
    if points.iter().any(|&(n, y)| n <= 0.0 || y <= 0.0) {
        return Err(Error::InvalidInput("power-law fit requires positive data".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let take = ((sorted.len() as f64 * tail_fraction).ceil() as usize).clamp(2, sorted.len());
    let tail = &sorted[sorted.len() - take..];

    let m = tail.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, y) in tail {
        let (lx, ly) = (n.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InvalidInput("degenerate N ladder".into()));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;

    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mean_y = sy / m;
    for &(n, y) in tail {
        let pred = intercept + slope * n.ln();
        ss_res += (y.ln() - pred).powi(2);
        ss_tot += (y.ln() - mean_y).powi(2);
    }
    let r2 = if ss_tot < 1e-300 { 1.0 } else { 1.0 - ss_res / ss_tot };

    let (n_l, y_l) = sorted[0];
    let (n_r, y_r) = *sorted.last().unwrap();
    let coefficient = if slope.abs() < 1e-12 {
        y_r
    } else {
        ((y_r.powf(1.0 / slope) - y_l.powf(1.0 / slope)) / (n_r - n_l)).powf(slope)
    };
    Ok(ScalingFit {
        exponent: slope,
        coefficient,
        coefficient_ols: intercept.exp(),
        r2,
        points: sorted,
    })
}

/// Characteristic selector for the exponent tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Characteristic {
    LambdaMin,
    LambdaMax,
    Frobenius,
}

impl Characteristic {
    pub fn label(self) -> &'static str {
        match self {
            Characteristic::LambdaMin => "lambda_min",
            Characteristic::LambdaMax => "lambda_max",
            Characteristic::Frobenius => "frob",
        }
    }

    pub fn of(self, row: &SweepRow) -> f64 {
        match self {
            Characteristic::LambdaMin => row.lambda_min,
            Characteristic::LambdaMax => row.lambda_max,
            Characteristic::Frobenius => row.frob,
        }
    }
}

/// Tabulated asymptotic exponent of a covariance characteristic in N.
///
/// Path values (all three processes): λ_min ~ N^{−2H}, λ_max ~ N,
/// ‖Σ‖_F ~ N. Noises: λ_min ~ N^{−1} (H < 1/2) / N^{−2H} (H ≥ 1/2) for all
/// processes; λ_max ~ N^{−2H}/N^{−1} with the same split for the fBM kinds
/// and ~ 1 for fOU; ‖Σ‖_F ~ N^{1/2−2H} below the process-specific threshold
/// (3/4 for fBM, 1/4 for fOU) and ~ N^{−1} (fBM) / ~ 1 (fOU) above it.
pub fn expected_exponent(
    process: ProcessKind,
    kind: CovKind,
    characteristic: Characteristic,
    h: f64,
) -> Result<f64> {
    if h <= 0.0 || h >= 1.0 {
        return Err(Error::InvalidInput("H must lie in (0,1)".into()));
    }
    let fbm = matches!(process, ProcessKind::RlFbm | ProcessKind::StdFbm);
    Ok(match (kind, characteristic) {
        (CovKind::PathValues, Characteristic::LambdaMin) => -2.0 * h,
        (CovKind::PathValues, Characteristic::LambdaMax) => 1.0,
        (CovKind::PathValues, Characteristic::Frobenius) => 1.0,
        (CovKind::Noises, Characteristic::LambdaMin) => {
            if h < 0.5 {
                -1.0
            } else {
                -2.0 * h
            }
        }
        (CovKind::Noises, Characteristic::LambdaMax) => {
            if fbm {
                if h < 0.5 {
                    -2.0 * h
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        }
        (CovKind::Noises, Characteristic::Frobenius) => {
            if fbm {
                if h < 0.75 {
                    0.5 - 2.0 * h
                } else {
                    -1.0
                }
            } else if h < 0.25 {
                0.5 - 2.0 * h
            } else {
                0.0
            }
        }
    })
}

/// H values at which a table exponent switches branches, for flagging cells
/// where convergence in N is slow.
pub fn regime_boundaries(
    process: ProcessKind,
    kind: CovKind,
    characteristic: Characteristic,
) -> Vec<f64> {
    let fbm = matches!(process, ProcessKind::RlFbm | ProcessKind::StdFbm);
    match (kind, characteristic) {
        (CovKind::PathValues, _) => vec![],
        (CovKind::Noises, Characteristic::Frobenius) => {
            if fbm {
                vec![0.75]
            } else {
                vec![0.25]
            }
        }
        (CovKind::Noises, _) => {
            if fbm {
                vec![0.5]
            } else if characteristic == Characteristic::LambdaMin {
                vec![0.5]
            } else {
                vec![]
            }
        }
    }
}

/// Composite preparation-complexity exponent p₁ + 1.5 p₂ + c in N, where
/// ‖Σ‖_F/λ_max ~ N^{p₁}, κ ~ N^{p₂}, and c = 0 for the path-value route or
/// 1 for the noise route.
pub fn complexity_exponent(process: ProcessKind, h: f64, route: CovKind) -> Result<f64> {
    if h <= 0.0 || h >= 1.0 {
        return Err(Error::InvalidInput("H must lie in (0,1)".into()));
    }
    let fbm = matches!(process, ProcessKind::RlFbm | ProcessKind::StdFbm);
    Ok(match route {
        CovKind::PathValues => 1.5 + 3.0 * h,
        CovKind::Noises => {
            if fbm {
                if h < 0.5 {
                    3.0 - 3.0 * h
                } else if h < 0.75 {
                    1.0 + h
                } else {
                    -0.5 + 3.0 * h
                }
            } else if h < 0.25 {
                3.0 - 2.0 * h
            } else if h < 0.5 {
                2.5
            } else {
                1.0 + 3.0 * h
            }
        }
    })
}

/// Best-route preparation exponent for the fBM kinds:
/// min{3/2+3H, 3−3H} for H ≤ 1/2, max{1+H, −1/2+3H} for H ≥ 1/2; always in
/// [1.5, 2.5].
pub fn p_tilde(h: f64) -> Result<f64> {
    if h <= 0.0 || h >= 1.0 {
        return Err(Error::InvalidInput("H must lie in (0,1)".into()));
    }
    Ok(if h <= 0.5 {
        (1.5 + 3.0 * h).min(3.0 - 3.0 * h)
    } else {
        (1.0 + h).max(-0.5 + 3.0 * h)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_power_law() {
        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n * n))
            .collect();
        let fit = fit_power_law(&pts, 1.0).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.coefficient - 3.0).abs() < 1e-9);
        assert!(fit.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn fit_constant_data() {
        let pts: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0].iter().map(|&n| (n, 5.0)).collect();
        let fit = fit_power_law(&pts, 1.0).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert_eq!(fit.coefficient, 5.0);
    }

    #[test]
    fn fit_with_log_correction() {
        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0]
            .iter()
            .map(|&n: &f64| (n, n.powf(1.5) * (1.0 + 1.0 / n.ln())))
            .collect();
        let fit = fit_power_law(&pts, 0.5).unwrap();
        assert!(
            fit.exponent >= 1.45 && fit.exponent <= 1.55,
            "exponent {}",
            fit.exponent
        );
    }

    #[test]
    fn fit_rejects_bad_data() {
        assert!(fit_power_law(&[(1.0, 1.0)], 1.0).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -1.0)], 1.0).is_err());
    }

    #[test]
    fn endpoint_rule_passes_through_endpoints() {
        // for p != 0 the dotted line hits both endpoints of the data
        let pts: Vec<(f64, f64)> = vec![(16.0, 2.0), (64.0, 9.0), (256.0, 40.0)];
        let fit = fit_power_law(&pts, 1.0).unwrap();
        let p = fit.exponent;
        let a = fit.coefficient;
        // endpoint rule: y^{1/p} is linear through both endpoints up to the
        // intercept; verify the slope reproduces A
        let slope = (40.0_f64.powf(1.0 / p) - 2.0_f64.powf(1.0 / p)) / (256.0 - 16.0);
        assert!((a - slope.powf(p)).abs() < 1e-12);
    }

    #[test]
    fn sweep_small_stdfbm() {
        let rows = sweep_characteristics(
            ProcessKind::StdFbm,
            CovKind::PathValues,
            &[0.5],
            &[2, 4],
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        let r2 = &rows[0];
        let lo = (3.0 - 5.0_f64.sqrt()) / 4.0;
        let hi = (3.0 + 5.0_f64.sqrt()) / 4.0;
        assert!((r2.lambda_min - lo).abs() < 1e-10);
        assert!((r2.lambda_max - hi).abs() < 1e-10);
    }

    #[test]
    fn sweep_fou_dimension_and_norm_equivalence() {
        let rows =
            sweep_characteristics(ProcessKind::Fou, CovKind::Noises, &[0.3], &[4, 8]).unwrap();
        for row in &rows {
            let dim = (row.n + 1) as f64;
            assert!(row.lambda_max <= row.frob * (1.0 + 1e-12));
            assert!(row.frob <= dim.sqrt() * row.lambda_max * (1.0 + 1e-12));
        }
    }

    #[test]
    fn table_exponent_values() {
        use Characteristic::*;
        use ProcessKind::*;
        assert_eq!(
            expected_exponent(StdFbm, CovKind::PathValues, LambdaMax, 0.3).unwrap(),
            1.0
        );
        assert_eq!(
            expected_exponent(StdFbm, CovKind::Noises, LambdaMin, 0.3).unwrap(),
            -1.0
        );
        assert_eq!(expected_exponent(Fou, CovKind::Noises, LambdaMax, 0.7).unwrap(), 0.0);
        assert_eq!(
            expected_exponent(RlFbm, CovKind::Noises, Frobenius, 0.8).unwrap(),
            -1.0
        );
        assert_eq!(
            expected_exponent(Fou, CovKind::Noises, Frobenius, 0.2).unwrap(),
            0.5 - 0.4
        );
    }

    #[test]
    fn complexity_exponent_values() {
        assert!((complexity_exponent(ProcessKind::StdFbm, 0.5, CovKind::PathValues).unwrap()
            - 3.0)
            .abs()
            < 1e-15);
        assert!((complexity_exponent(ProcessKind::RlFbm, 0.8, CovKind::Noises).unwrap() - 1.9)
            .abs()
            < 1e-12);
        assert!((complexity_exponent(ProcessKind::Fou, 0.3, CovKind::Noises).unwrap() - 2.5)
            .abs()
            < 1e-15);
    }

    #[test]
    fn p_tilde_values_and_range() {
        assert!((p_tilde(0.5).unwrap() - 1.5).abs() < 1e-15);
        assert!((p_tilde(0.25).unwrap() - 2.25).abs() < 1e-15);
        assert!((p_tilde(0.9).unwrap() - 2.2).abs() < 1e-12);
        let mut h = 0.05;
        while h < 1.0 {
            let p = p_tilde(h).unwrap();
            assert!((1.5..=2.5).contains(&p), "H={h}: p={p}");
            h += 0.05;
        }
    }

    #[test]
    fn min_route_complexity_matches_p_tilde() {
        // fBM best route equals p_tilde everywhere; crossover at H = 0.25
        let mut h = 0.05;
        while h < 1.0 {
            let pv = complexity_exponent(ProcessKind::StdFbm, h, CovKind::PathValues).unwrap();
            let ns = complexity_exponent(ProcessKind::StdFbm, h, CovKind::Noises).unwrap();
            let best = pv.min(ns);
            assert!((best - p_tilde(h).unwrap()).abs() < 1e-12, "H={h}");
            if h < 0.25 - 1e-9 {
                assert!(pv < ns, "PV preferred below 0.25, H={h}");
            }
            if h > 0.25 + 1e-9 {
                assert!(ns < pv, "NS preferred above 0.25, H={h}");
            }
            h += 0.05;
        }
    }
}
