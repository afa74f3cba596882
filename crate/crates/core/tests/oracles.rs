//! Independent-oracle cross-checks: the hypergeometric series against
//! quadrature of their integral representations, and the covariance
//! evaluators against direct numeric integration.

mod common;

use common::{fou_fourier_integral, gauss_2f1_euler, tanh_sinh};
use gaussqpipe_core::covariance::{eval_2f1, fou_cov, rlfbm_cov};
use statrs::function::gamma::gamma;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn f21_matches_euler_integral_on_grid() {
    // 20 parameter points with c > b > 0
    let grid = [
        (0.2, 1.0, 1.8, 0.5),
        (0.2, 1.0, 1.8, 0.1),
        (0.2, 1.0, 1.8, 0.9),
        (0.5, 0.5, 1.5, 0.3),
        (0.5, 0.5, 1.5, 0.7),
        (-0.3, 1.2, 2.4, 0.5),
        (-0.3, 1.2, 2.4, 0.85),
        (0.45, 1.0, 1.55, 0.6),
        (0.45, 1.0, 1.55, 0.95),
        (1.5, 2.0, 4.0, 0.5),
        (1.5, 2.0, 4.0, 0.2),
        (0.1, 0.9, 2.1, 0.4),
        (0.1, 0.9, 2.1, 0.8),
        (0.35, 1.0, 1.65, 0.25),
        (0.35, 1.0, 1.65, 0.75),
        (0.8, 1.5, 3.0, 0.45),
        (0.8, 1.5, 3.0, 0.9),
        (0.05, 1.0, 1.95, 0.5),
        (2.2, 1.1, 3.6, 0.35),
        (2.2, 1.1, 3.6, 0.65),
    ];
    for &(a, b, c, z) in &grid {
        let series = eval_2f1(a, b, c, z).unwrap();
        let quad = gauss_2f1_euler(a, b, c, z);
        assert!(
            rel_err(series, quad) <= 1e-6,
            "2F1({a},{b};{c};{z}): series {series} vs quadrature {quad}"
        );
    }
}

#[test]
fn rlfbm_cov_matches_direct_quadrature() {
    // E[W_u W_v] = ∫₀^u 2H (v−s)^{H−1/2} (u−s)^{H−1/2} ds, singular at
    // s → u for H < 1/2
    for &(h, u, v) in &[(0.3, 0.5, 1.0), (0.2, 0.25, 0.75), (0.7, 0.5, 2.0), (0.45, 1.0, 1.5)] {
        let series = rlfbm_cov(h, u, v).unwrap();
        let quad = tanh_sinh(
            |s: f64| 2.0 * h * (v - s).powf(h - 0.5) * (u - s).powf(h - 0.5),
            0.0,
            u,
        );
        assert!(
            rel_err(series, quad) <= 1e-6,
            "rlfbm_cov({h},{u},{v}): {series} vs quadrature {quad}"
        );
    }
}

#[test]
fn fou_cov_matches_fourier_oracle() {
    // covariance = σ² Γ(2H+1) sin(πH)/(2π) · ∫ e^{isx}|x|^{1−2H}/(λ²+x²) dx
    for &(h, s) in &[(0.3, 0.5), (0.3, 1.0), (0.6, 0.5)] {
        let (lambda, sigma) = (1.0, 1.0);
        let closed = fou_cov(h, lambda, sigma, s).unwrap();
        let prefactor = sigma * sigma * gamma(2.0 * h + 1.0) * (std::f64::consts::PI * h).sin()
            / (2.0 * std::f64::consts::PI);
        let oracle = prefactor * fou_fourier_integral(h, lambda, s);
        assert!(
            rel_err(closed, oracle) <= 1e-5,
            "fou_cov(H={h}, s={s}): closed {closed} vs oracle {oracle}"
        );
    }
}

#[test]
fn tanh_sinh_handles_known_integrals() {
    // ∫₀¹ 1/√t dt = 2 (endpoint singularity)
    let v = tanh_sinh(|t: f64| t.powf(-0.5), 0.0, 1.0);
    assert!((v - 2.0).abs() < 1e-10, "{v}");
    // ∫₀^π sin = 2
    let v = tanh_sinh(|t: f64| t.sin(), 0.0, std::f64::consts::PI);
    assert!((v - 2.0).abs() < 1e-12, "{v}");
}
