//! Qubit residence-time measurement with a Bose-Einstein-condensate meter.
//!
//! A two-level system (qubit) gates the tunnelling of `N` non-interacting
//! bosons between the wells of a symmetric double-well trap. Counting the
//! atoms that have tunnelled by time `T` measures the net duration the qubit
//! spent in its first state — a functional of the whole path, not an
//! instantaneous observable. This crate computes the residence-time amplitude
//! distribution by two independent methods ([`respath`]), folds it with the
//! meter response ([`meter`], [`measure`]), provides closed-form regime
//! asymptotics ([`regimes`]), a classical-fluctuator baseline ([`fluct`]),
//! and a brute-force joint-evolution oracle ([`oracle`]) that validates the
//! whole pipeline.
//!
//! All quantities are dimensionless; the qubit Rabi frequency is fixed to 1
//! and times are measured in its inverse.

// `!(x > 0.0)` is used throughout validation: unlike `x <= 0.0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fluct;
pub mod measure;
pub mod meter;
pub mod oracle;
pub mod regimes;
pub mod respath;
pub mod suite;
pub mod timegrid;

mod special;

pub use num_complex::Complex64;

/// Errors reported by the toolkit.
///
/// Advisory conditions (regime classification, cutoff convergence) are
/// returned as flags on result types, not as errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error(
        "grid spacing {spacing:.3e} under-resolves kernel width {width:.3e} \
         (need spacing <= width / 4)"
    )]
    GridResolution { spacing: f64, width: f64 },
    #[error("normalization |integral| = {magnitude:.3e} is too close to zero")]
    NearZeroNormalization { magnitude: f64 },
    #[error("atom count {n} outside 0..={n_atoms}")]
    AtomIndexOutOfRange { n: u64, n_atoms: u64 },
    #[error("invalid meter configuration: {0}")]
    InvalidMeter(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "weak value diverges near T = (k + 1/2)\u{3c0}: |<f|U|i>| = {magnitude:.3e}"
    )]
    WeakValueDivergence { magnitude: f64 },
    #[error("joint-state norm drifted by {defect:.3e} (tolerance {tolerance:.3e})")]
    NormDrift { defect: f64, tolerance: f64 },
    #[error("time stepping did not converge: residual {residual:.3e} after {rounds} halvings")]
    StepHalvingExhausted { residual: f64, rounds: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
