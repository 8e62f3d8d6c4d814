//! BEC meter amplitudes: the probability amplitude for `n` of `N` atoms to
//! have tunnelled into the right well after an effective exposure `tau`.
//!
//! With the background rate switched off, `N` identical non-interacting atoms
//! each rotate independently, so the amplitude is an exactly normalized
//! binomial form evaluated here in log space. The large-`N` scaling limit
//! (fixed `alpha = delta_omega * sqrt(N)`) gives the Poissonian asymptotic
//! form used in the analytic regime formulas.

use num_complex::Complex64;

use crate::special::{ln_binomial_pmf, ln_factorial};
use crate::{Error, Result};

/// Above this value of `delta_omega * T` the per-atom rotation leaves the
/// linear regime the scaling limit assumes; flagged as a warning, not an error.
pub const LINEAR_REGIME_THRESHOLD: f64 = 0.1;

/// Meter parameters: atom count and coupling, with the per-atom rate derived
/// as `alpha / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterConfig {
    n_atoms: u64,
    alpha: f64,
}

impl MeterConfig {
    pub fn new(n_atoms: u64, alpha: f64) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::InvalidMeter("need at least one atom".into()));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidMeter(format!(
                "coupling must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self { n_atoms, alpha })
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Per-atom tunnelling rate `alpha / sqrt(N)`.
    pub fn delta_omega(&self) -> f64 {
        self.alpha / (self.n_atoms as f64).sqrt()
    }

    /// Returns `delta_omega * t_total` when it exceeds
    /// [`LINEAR_REGIME_THRESHOLD`], i.e. when the scaling-limit assumption is
    /// strained at this observation time.
    pub fn linear_regime_violation(&self, t_total: f64) -> Option<f64> {
        let x = self.delta_omega() * t_total;
        (x > LINEAR_REGIME_THRESHOLD).then_some(x)
    }

    /// Smallest atom count that keeps `delta_omega * t_total` at or below the
    /// linear-regime threshold for the given coupling.
    pub fn atoms_for_linear_regime(alpha: f64, t_total: f64) -> u64 {
        ((alpha * t_total / LINEAR_REGIME_THRESHOLD).powi(2).ceil() as u64).max(1)
    }
}

/// Exact amplitude for `n` atoms in the right well after exposure `tau`.
///
/// Log-space binomial evaluation; the complement of `sin^2` is taken as an
/// exact f64 subtraction so that the family stays normalized to round-off for
/// any atom count. The overall phase is `(-i)^n`, fixed once against the
/// matrix-exponential oracle (see tests) so amplitudes can be combined
/// coherently with the joint-evolution check.
pub fn g_exact(n: u64, tau: f64, cfg: &MeterConfig) -> Result<Complex64> {
    let n_total = cfg.n_atoms;
    if n > n_total {
        return Err(Error::AtomIndexOutOfRange { n, n_atoms: n_total });
    }
    let theta = cfg.delta_omega() * tau;
    let s = theta.sin();
    let c = theta.cos();
    let a = (s * s).min(1.0);
    let magnitude = (0.5 * ln_binomial_pmf(n_total, n, a)).exp();
    let mut sign = 1.0;
    if s < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    if c < 0.0 && (n_total - n) % 2 == 1 {
        sign = -sign;
    }
    Ok(minus_i_pow(n) * (sign * magnitude))
}

/// Scaling-limit amplitude `(alpha tau)^n exp(-alpha^2 tau^2 / 2) / sqrt(n!)`.
///
/// Carries the same coherent `(-i)^n` phase as [`g_exact`], which the
/// magnitude-level asymptotic formula drops; with it, this is a drop-in
/// replacement for the exact meter in amplitude integrals and converges to
/// [`g_exact`] as `N -> infinity` at fixed `alpha`.
pub fn g_asymptotic(n: u64, tau: f64, alpha: f64) -> Complex64 {
    debug_assert!(tau >= 0.0 && alpha > 0.0);
    let x = alpha * tau;
    if n == 0 {
        return Complex64::new((-0.5 * x * x).exp(), 0.0);
    }
    if x == 0.0 {
        return Complex64::ZERO;
    }
    let magnitude = (n as f64 * x.ln() - 0.5 * x * x - 0.5 * ln_factorial(n)).exp();
    minus_i_pow(n) * magnitude
}

/// Large-`n` Gaussian form `(2 pi n)^(-1/4) exp[-alpha^2 (tau - tau_n)^2]`,
/// same phase convention as [`g_asymptotic`]. Defined for `n >= 1`.
pub fn g_asymptotic_gaussian(n: u64, tau: f64, alpha: f64) -> Complex64 {
    debug_assert!(n >= 1);
    let d = tau - tau_n(n, alpha);
    let magnitude = (2.0 * std::f64::consts::PI * n as f64).powf(-0.25)
        * (-alpha * alpha * d * d).exp();
    minus_i_pow(n) * magnitude
}

/// Exposure after which on average `n` atoms have tunnelled: `sqrt(n)/alpha`.
pub fn tau_n(n: u64, alpha: f64) -> f64 {
    (n as f64).sqrt() / alpha
}

/// Quantum accuracy of the residence-time measurement, `1/alpha`.
///
/// The classical-fluctuator convention differs by `sqrt(2)`; see
/// [`crate::fluct::classical_accuracy_width`]. Both appear in the analysis and
/// are exposed separately rather than reconciled.
pub fn quantum_accuracy_width(alpha: f64) -> f64 {
    1.0 / alpha
}

fn minus_i_pow(n: u64) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    /// Brute-force oracle: exponentiate the (N+1)-dimensional tridiagonal
    /// generator of the two-mode rotation and read off column 0.
    fn g_oracle(n_total: u64, theta: f64) -> Vec<Complex64> {
        let dim = (n_total + 1) as usize;
        let mut c = DMatrix::<f64>::zeros(dim, dim);
        for k in 0..dim - 1 {
            let v = ((k as f64 + 1.0) * (n_total as f64 - k as f64)).sqrt();
            c[(k, k + 1)] = v;
            c[(k + 1, k)] = v;
        }
        let eig = c.symmetric_eigen();
        let coeffs: DVector<f64> = eig.eigenvectors.row(0).transpose().into_owned();
        (0..dim)
            .map(|row| {
                (0..dim)
                    .map(|m| {
                        let phase = Complex64::new(0.0, -theta * eig.eigenvalues[m]).exp();
                        phase * (eig.eigenvectors[(row, m)] * coeffs[m])
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn no_evolution_leaves_all_atoms_left() {
        let cfg = MeterConfig::new(50, 1.0).unwrap();
        assert_eq!(g_exact(0, 0.0, &cfg).unwrap(), Complex64::new(1.0, 0.0));
        for n in 1..=50 {
            assert_eq!(g_exact(n, 0.0, &cfg).unwrap(), Complex64::ZERO);
        }
    }

    #[test]
    fn rejects_out_of_range_n() {
        let cfg = MeterConfig::new(3, 1.0).unwrap();
        assert!(matches!(
            g_exact(4, 1.0, &cfg),
            Err(Error::AtomIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn two_atom_amplitude_at_quarter_turn() {
        // N = 2, delta_omega * tau = pi/4, n = 1: magnitude sqrt(2)/2, phase -i
        let cfg = MeterConfig::new(2, 1.0).unwrap();
        let tau = std::f64::consts::FRAC_PI_4 / cfg.delta_omega();
        let g = g_exact(1, tau, &cfg).unwrap();
        let expect = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
        assert!((g - expect).norm() < 1e-14);
    }

    #[test]
    fn phase_convention_matches_matrix_exponential_oracle() {
        for n_total in [1u64, 2, 5, 13, 20] {
            for &theta in &[0.17, 0.9, 2.3, 4.0] {
                let oracle = g_oracle(n_total, theta);
                let cfg = MeterConfig::new(n_total, 1.0).unwrap();
                let tau = theta / cfg.delta_omega();
                for n in 0..=n_total {
                    let got = g_exact(n, tau, &cfg).unwrap();
                    assert!(
                        (got - oracle[n as usize]).norm() < 1e-11,
                        "N={n_total} theta={theta} n={n}: {got} vs {}",
                        oracle[n as usize]
                    );
                }
            }
        }
    }

    #[test]
    fn exact_family_is_normalized() {
        for &n_total in &[10u64, 100, 10_000] {
            let cfg = MeterConfig::new(n_total, 1.0).unwrap();
            for &tau in &[0.3, 1.0, 2.7] {
                let sum: f64 = (0..=n_total)
                    .map(|n| g_exact(n, tau, &cfg).unwrap().norm_sqr())
                    .sum();
                assert!(
                    (sum - 1.0).abs() < 1e-12,
                    "N={n_total} tau={tau}: sum-1 = {:.3e}",
                    sum - 1.0
                );
            }
        }
    }

    #[test]
    fn asymptotic_converges_to_exact() {
        let alpha = 1.0;
        let tau = 2.0;
        let n_max = (3.0 * alpha * alpha * tau * tau) as u64;
        let mut last = f64::INFINITY;
        for &n_total in &[100u64, 10_000, 1_000_000] {
            let cfg = MeterConfig::new(n_total, alpha).unwrap();
            let err = (0..=n_max)
                .map(|n| {
                    (g_exact(n, tau, &cfg).unwrap() - g_asymptotic(n, tau, alpha)).norm()
                })
                .fold(0.0, f64::max);
            assert!(err < last, "error must decrease with N, got {err} after {last}");
            last = err;
        }
        assert!(last < 1e-2, "final error {last}");
    }

    #[test]
    fn asymptotic_reference_values() {
        let alpha = 1.3;
        let tau = 0.7;
        let g0 = g_asymptotic(0, tau, alpha);
        assert!((g0.re - (-0.5 * (alpha * tau).powi(2)).exp()).abs() < 1e-15);
        assert_eq!(g0.im, 0.0);

        let g1 = g_asymptotic(1, 1.0, 1.0);
        assert!((g1.norm() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((g1 - Complex64::new(0.0, -(-0.5f64).exp())).norm() < 1e-15);
        assert!((g1.norm() - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn asymptotic_peaks_at_tau_n() {
        let alpha = 1.0;
        let n = 100u64;
        let mut best = (0.0, 0.0);
        let mut t = 5.0;
        while t <= 15.0 {
            let v = g_asymptotic(n, t, alpha).norm();
            if v > best.1 {
                best = (t, v);
            }
            t += 1e-3;
        }
        let expect = tau_n(n, alpha);
        assert!((best.0 - expect).abs() / expect < 0.01);
        assert!((expect - 10.0).abs() < 1e-12);
    }

    #[test]
    fn tau_n_values() {
        assert_eq!(tau_n(0, 2.0), 0.0);
        assert!((tau_n(9, 3.0) - 1.0).abs() < 1e-15);
        assert!((tau_n(100, 0.1) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_e_width_tracks_quantum_accuracy() {
        // |g| falls to 1/e of its peak at |tau - tau_n| ~ 1/alpha
        let alpha = 1.7;
        for &n in &[25u64, 100, 400] {
            let peak_tau = tau_n(n, alpha);
            let peak = g_asymptotic(n, peak_tau, alpha).norm();
            let target = peak / std::f64::consts::E;
            let mut lo = peak_tau;
            let mut hi = peak_tau + 5.0 / alpha;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if g_asymptotic(n, mid, alpha).norm() > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let width = 0.5 * (lo + hi) - peak_tau;
            let expect = quantum_accuracy_width(alpha);
            assert!(
                (width - expect).abs() / expect < 0.2,
                "n={n}: width {width} vs {expect}"
            );
        }
    }

    #[test]
    fn linear_regime_warning_threshold() {
        let cfg = MeterConfig::new(100, 1.0).unwrap(); // delta_omega = 0.1
        assert!(cfg.linear_regime_violation(0.9).is_none());
        let x = cfg.linear_regime_violation(2.0).unwrap();
        assert!((x - 0.2).abs() < 1e-15);
        let n = MeterConfig::atoms_for_linear_regime(1.0, 2.0);
        let cfg2 = MeterConfig::new(n, 1.0).unwrap();
        assert!(cfg2.linear_regime_violation(2.0).is_none());
    }
}
