//! Desk-scale simulation of quantum algorithms for exact preparation of
//! correlated Gaussian states and their exponentiation.
//!
//! The crate is organised around a classical/quantum split. Classical ground
//! truth lives in [`covariance`], [`linalg`] and [`sampler`]: hypergeometric
//! auto-covariances of RL-fBM, std-fBM and stationary fOU processes, matrix
//! square roots, and exact Gaussian path sampling. The quantum side is
//! simulated at matrix level: [`blockenc`] builds explicit block-encoding
//! unitaries, [`polyapprox`] constructs the bounded transformation
//! polynomials, [`qroutines`] provides QSVT, matrix powers, fixed-point
//! amplitude amplification and phase-estimation QAE with faithful query
//! accounting, and [`pipeline`] chains them into the end-to-end state
//! preparation, norm estimation, exponentiation and discrete-sum routines.
//! [`scaling`] reproduces the covariance power-law study and [`resource`]
//! evaluates the symbolic cost formulas against measured tallies.

pub mod blockenc;
pub mod covariance;
pub mod linalg;
pub mod pipeline;
pub mod polyapprox;
pub mod qroutines;
pub mod resource;
pub mod sampler;
pub mod scaling;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series did not converge within {max_terms} terms (last term {last_term:e})")]
    IterationLimit { max_terms: usize, last_term: f64 },

    #[error("matrix is not positive definite: offending eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("matrix is not SPD: Cholesky pivot failed")]
    NotSpd,

    #[error("eigensolver failed to converge")]
    EigenFailure,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("contraction violation: spectral norm {norm} exceeds 1")]
    ContractionViolation { norm: f64 },

    #[error("block-encoding verification failed: {0}")]
    EncodingInvariant(String),

    #[error(
        "spectrum outside [{lo:e}, {hi:e}]: eigenvalue {eigenvalue:e} violates the declared range"
    )]
    SpectrumRange { eigenvalue: f64, lo: f64, hi: f64 },

    #[error("amplitude {amplitude:e} below declared lower bound {bound:e}")]
    AmplitudeBound { amplitude: f64, bound: f64 },

    #[error("polynomial construction failed: {0}")]
    ConstructionFailure(String),

    #[error("composition domain violation: inner polynomial range [{lo}, {hi}] leaves [-1, 1]")]
    CompositionDomain { lo: f64, hi: f64 },

    #[error("norm calibration failed: eta_tilde/|x| = {ratio} outside [1/2, 1]")]
    Calibration { ratio: f64 },

    #[error("unknown cost formula id: {0}")]
    UnknownFormula(String),
}

pub type Result<T> = std::result::Result<T, Error>;
