//! Closed-form regime formulas: large-time stationary-phase asymptotes of the
//! amplitude distribution, the Gaussian measured-time densities of the medium
//! regime, the strong-coupling density, the finite-time Zeno limit with its
//! Poisson atom-count tail, and weak values.
//!
//! Regime boundaries are order-of-magnitude statements; classification here
//! is advisory and nothing refuses to evaluate outside its nominal regime.

use num_complex::Complex64;

use crate::respath::{u_matrix, QubitState};
use crate::special::poisson_ln_pmf;
use crate::timegrid::AmplitudeDistribution;
use crate::{Error, Result};

/// Measurement regimes by quantum accuracy `1/alpha` against the time scales
/// `sqrt(T)` and `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `1/alpha >= T`: the meter reads moments of the amplitude distribution.
    Weak,
    /// `sqrt(T) < 1/alpha < T`: only the stationary region contributes.
    Medium,
    /// `1/alpha <= sqrt(T)`: the oscillation pattern of `|Phi|^2` is resolved.
    Strong,
    /// Deep strong coupling, `alpha sqrt(T) >= 10`: the qubit is trapped in
    /// its initial state.
    Zeno,
}

pub fn classify(alpha: f64, t_total: f64) -> Regime {
    let accuracy = 1.0 / alpha;
    if accuracy >= t_total {
        Regime::Weak
    } else if accuracy >= t_total.sqrt() {
        Regime::Medium
    } else if alpha * t_total.sqrt() < 10.0 {
        Regime::Strong
    } else {
        Regime::Zeno
    }
}

pub fn medium_regime_holds(alpha: f64, t_total: f64) -> bool {
    classify(alpha, t_total) == Regime::Medium
}

/// Half-width of the reduced-time window `|tau/T - 1/2| <= 0.48` on which the
/// stationary-phase forms are exposed; the diagonal prefactor diverges at the
/// window ends, an artifact of the asymptotics rather than of the
/// distribution itself.
pub const STATIONARY_WINDOW: f64 = 0.48;

fn reduced_time(tau: f64, t_total: f64) -> Result<f64> {
    let xi = tau / t_total - 0.5;
    // small allowance so grid points landing on the window edge stay inside
    if !(xi.abs() <= STATIONARY_WINDOW + 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "tau/T = {} outside the stationary-phase window [0.02, 0.98]",
            tau / t_total
        )));
    }
    Ok(xi)
}

/// Large-time asymptote of the smooth same-state distribution:
/// `(2/pi T)^(1/2) (1+2xi)^(1/4) (1-2xi)^(-3/4) cos[(1-4xi^2)^(1/2) T + pi/4]`.
pub fn phi11_stationary(tau: f64, t_total: f64) -> Result<Complex64> {
    let xi = reduced_time(tau, t_total)?;
    let root = (1.0 - 4.0 * xi * xi).sqrt();
    let value = (2.0 / (std::f64::consts::PI * t_total)).sqrt()
        * (1.0 + 2.0 * xi).powf(0.25)
        * (1.0 - 2.0 * xi).powf(-0.75)
        * (root * t_total + std::f64::consts::FRAC_PI_4).cos();
    Ok(Complex64::new(value, 0.0))
}

/// Large-time asymptote of the crossed distribution:
/// `-i (2/pi T)^(1/2) (1-4xi^2)^(1/2) sin[(1-4xi^2)^(1/2) T + pi/4]`.
pub fn phi12_stationary(tau: f64, t_total: f64) -> Result<Complex64> {
    let xi = reduced_time(tau, t_total)?;
    let root = (1.0 - 4.0 * xi * xi).sqrt();
    let value = (2.0 / (std::f64::consts::PI * t_total)).sqrt()
        * root
        * (root * t_total + std::f64::consts::FRAC_PI_4).sin();
    Ok(Complex64::new(0.0, -value))
}

/// Medium-accuracy measured-time density: a Gaussian of width `1/(2 alpha)`
/// at `T/2`, weighted `cos^2 T` when the qubit is post-selected in its
/// initial state and `sin^2 T` otherwise. The two final-state channels sum
/// to unit mass exactly.
pub fn w_medium(same_state: bool, tau: f64, t_total: f64, alpha: f64) -> f64 {
    let weight = if same_state {
        t_total.cos().powi(2)
    } else {
        t_total.sin().powi(2)
    };
    (2.0 / std::f64::consts::PI).sqrt()
        * alpha
        * weight
        * (-2.0 * alpha * alpha * (tau - 0.5 * t_total).powi(2)).exp()
}

/// Strong-coupling measured-time density `(2 pi)^(1/2) |phi|^2 / alpha` at a
/// point where the smooth distribution takes the value `phi_value`.
pub fn w_strong(alpha: f64, phi_value: Complex64) -> f64 {
    (2.0 * std::f64::consts::PI).sqrt() / alpha * phi_value.norm_sqr()
}

/// [`w_strong`] mapped over the interior samples of a distribution.
pub fn w_strong_profile(alpha: f64, phi: &AmplitudeDistribution) -> Vec<(f64, f64)> {
    let grid = phi.grid();
    (1..grid.steps())
        .map(|j| (grid.tau(j), w_strong(alpha, phi.density()[j])))
        .collect()
}

/// Zeno-limit measured-time density: the Gaussian representation of the
/// delta-peak pinning the residence time to `T` (initial state 1) or to `0`
/// (initial state 2).
pub fn w_zeno(initial: QubitState, tau: f64, t_total: f64, alpha: f64) -> f64 {
    let center = match initial {
        QubitState::One => t_total,
        QubitState::Two => 0.0,
    };
    (2.0 / std::f64::consts::PI).sqrt()
        * alpha
        * (-2.0 * alpha * alpha * (tau - center).powi(2)).exp()
}

/// Zeno-limit atom-count tail for a qubit trapped in state 1: Poisson with
/// mean `(alpha T)^2`.
pub fn poisson_pn(n: u64, alpha: f64, t_total: f64) -> f64 {
    poisson_ln_pmf(n, (alpha * t_total).powi(2)).exp()
}

/// Zeno-limit atom-count distribution for either initial state: the Poisson
/// tail for state 1, no tunnelled atoms at all for state 2.
pub fn zeno_pn(initial: QubitState, n: u64, alpha: f64, t_total: f64) -> f64 {
    match initial {
        QubitState::One => poisson_pn(n, alpha, t_total),
        QubitState::Two => {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Magnitude below which the post-selected propagator counts as a Rabi node
/// and the weak value is flagged divergent.
const DIVERGENCE_GUARD: f64 = 1e-8;

/// Closed-form weak value of the residence time for the symmetric qubit with
/// equal pre- and post-selection in state 1: `T/2 + tan(T)/2`.
///
/// Diverges whenever free Rabi evolution puts the qubit in state 2 at the
/// post-selection time, `T = (k + 1/2) pi`; may exceed `T` near those points
/// and is then not interpretable as a residence time.
pub fn weak_value(t_total: f64) -> Result<Complex64> {
    let c = t_total.cos();
    if c.abs() < DIVERGENCE_GUARD {
        return Err(Error::WeakValueDivergence { magnitude: c.abs() });
    }
    Ok(Complex64::new(0.5 * t_total + 0.5 * t_total.tan(), 0.0))
}

/// Weak value for general pre/post-selection as the logarithmic derivative of
/// the post-selected propagator along the auxiliary energy shift, evaluated
/// by central differences with one Richardson step.
///
/// Equals the normalized first moment of the amplitude distribution; also a
/// numerical cross-check of the closed form and of `u_matrix` itself.
pub fn weak_value_numeric(f: QubitState, i: QubitState, t_total: f64) -> Result<Complex64> {
    let at = |lambda: f64| u_matrix(lambda, t_total).element(f, i);
    let base = at(0.0).norm();
    if base < DIVERGENCE_GUARD {
        return Err(Error::WeakValueDivergence { magnitude: base });
    }
    // log of a near-unity ratio avoids branch-cut jumps
    let log_derivative = |h: f64| (at(h) / at(-h)).ln() / (2.0 * h);
    let h = 1e-5;
    let d = (log_derivative(0.5 * h) * 4.0 - log_derivative(h)) / 3.0;
    Ok(Complex64::new(0.0, 1.0) * d)
}

/// Weak-measurement outcome ratio `P_1 / P_0 = alpha^2 |tau-bar|^2` for the
/// symmetric same-state channel.
pub fn weak_ratio(alpha: f64, t_total: f64) -> Result<f64> {
    Ok(alpha * alpha * weak_value(t_total)?.norm_sqr())
}
