//! Classical two-state fluctuator baseline: a continuous-time Markov
//! telegraph process whose residence time in the barrier-lowering state is
//! sampled exactly at event times.
//!
//! The meter sees the same amplitudes as in the quantum pipeline, but the
//! average here is incoherent — probabilities, not amplitudes — which is the
//! central classical/quantum contrast of the whole artifact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::Histogram;
use crate::meter::{tau_n, MeterConfig};
use crate::special::ln_binomial_pmf;
use crate::{Error, Result};

/// Two-state Markov switching rates and the initial-state law for classical
/// paths taking values 0 (barrier up) and 1 (barrier down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuatorSpec {
    /// Switching rate 0 -> 1.
    pub rate_up: f64,
    /// Switching rate 1 -> 0.
    pub rate_down: f64,
    /// Probability to start in state 1.
    pub p1_init: f64,
    pub seed: u64,
}

impl FluctuatorSpec {
    pub fn new(rate_up: f64, rate_down: f64, p1_init: f64, seed: u64) -> Result<Self> {
        if !(rate_up >= 0.0) || !(rate_down >= 0.0) {
            return Err(Error::InvalidParameter(
                "switching rates must be non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&p1_init) {
            return Err(Error::InvalidParameter(format!(
                "initial-state probability must lie in [0, 1], got {p1_init}"
            )));
        }
        Ok(Self {
            rate_up,
            rate_down,
            p1_init,
            seed,
        })
    }

    pub fn symmetric(rate: f64, seed: u64) -> Result<Self> {
        Self::new(rate, rate, 0.5, seed)
    }
}

/// Sampled residence times plus the exactly known atomic weights of the
/// never-switching paths.
#[derive(Debug, Clone)]
pub struct ResidenceSamples {
    pub t_total: f64,
    pub taus: Vec<f64>,
    /// Probability to start in 0 and never switch: mass at tau = 0 exactly.
    pub analytic_weight_origin: f64,
    /// Probability to start in 1 and never switch: mass at tau = T exactly.
    pub analytic_weight_end: f64,
}

impl ResidenceSamples {
    pub fn mean(&self) -> f64 {
        self.taus.iter().sum::<f64>() / self.taus.len() as f64
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.taus.iter().map(|t| t.powi(k as i32)).sum::<f64>() / self.taus.len() as f64
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        (self.moment(2) - m * m).max(0.0).sqrt()
    }

    /// Empirical fraction of paths with residence time exactly `x` (event
    /// times are exact, so the atoms at 0 and `t_total` are exact floats).
    pub fn fraction_at(&self, x: f64) -> f64 {
        self.taus.iter().filter(|&&t| t == x).count() as f64 / self.taus.len() as f64
    }

    /// Histogram density, same schema as the measurement histograms.
    pub fn histogram(&self, n_bin: usize) -> Result<Histogram> {
        if n_bin < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 bins, got {n_bin}"
            )));
        }
        let mut hist = Histogram {
            t_total: self.t_total,
            densities: vec![0.0; n_bin],
        };
        let weight = 1.0 / (self.taus.len() as f64 * hist.bin_width());
        for &tau in &self.taus {
            if let Some(i) = hist.bin_of(tau) {
                hist.densities[i] += weight;
            }
        }
        Ok(hist)
    }
}

/// Sample the residence time in state 1 over `[0, t_total]` for `n_paths`
/// independent telegraph paths with exact exponential waiting times.
///
/// Each path draws from its own counter-mode stream of the seeded generator,
/// so results are reproducible and independent of any batching.
pub fn sample_residence(
    spec: &FluctuatorSpec,
    t_total: f64,
    n_paths: usize,
) -> Result<ResidenceSamples> {
    if n_paths < 1 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    if !(t_total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "total time must be positive, got {t_total}"
        )));
    }
    let taus = (0..n_paths)
        .map(|path| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(path as u64 + 1);
            sample_one(spec, t_total, &mut rng)
        })
        .collect();
    Ok(ResidenceSamples {
        t_total,
        taus,
        analytic_weight_origin: (1.0 - spec.p1_init) * (-spec.rate_up * t_total).exp(),
        analytic_weight_end: spec.p1_init * (-spec.rate_down * t_total).exp(),
    })
}

fn sample_one(spec: &FluctuatorSpec, t_total: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut in_one = rng.random::<f64>() < spec.p1_init;
    let mut clock = 0.0;
    let mut residence = 0.0;
    loop {
        let rate = if in_one { spec.rate_down } else { spec.rate_up };
        let dwell = if rate > 0.0 {
            -(1.0 - rng.random::<f64>()).ln() / rate
        } else {
            f64::INFINITY
        };
        if clock + dwell >= t_total {
            if in_one {
                residence += t_total - clock;
            }
            // a path that never leaves its initial state lands exactly on 0 or T
            return if residence >= t_total { t_total } else { residence };
        }
        if in_one {
            residence += dwell;
        }
        clock += dwell;
        in_one = !in_one;
    }
}

/// Classical outcome probabilities: the incoherent Monte Carlo average of the
/// meter response `|G_n(tau)|^2` over sampled paths, with standard errors.
#[derive(Debug, Clone)]
pub struct ClassicalPn {
    pub p: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_paths: usize,
}

impl ClassicalPn {
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Monte Carlo estimate of the classical atom-count distribution.
pub fn p_n_classical(
    spec: &FluctuatorSpec,
    cfg: &MeterConfig,
    t_total: f64,
    n_paths: usize,
) -> Result<ClassicalPn> {
    let samples = sample_residence(spec, t_total, n_paths)?;
    p_n_from_samples(&samples, cfg)
}

/// The same estimate from pre-drawn samples.
pub fn p_n_from_samples(samples: &ResidenceSamples, cfg: &MeterConfig) -> Result<ClassicalPn> {
    let delta = cfg.delta_omega();
    let peak = cfg.n_atoms() as f64
        * (delta * samples.t_total)
            .min(std::f64::consts::FRAC_PI_2)
            .sin()
            .powi(2);
    let n_cap = cfg
        .n_atoms()
        .min((peak + 30.0 * cfg.alpha() * samples.t_total.sqrt() + 100.0) as u64);

    // per-sample meter argument sin^2(delta_omega tau)
    let args: Vec<f64> = samples
        .taus
        .iter()
        .map(|&tau| {
            let s = (delta * tau).sin();
            (s * s).min(1.0)
        })
        .collect();
    let inv = 1.0 / samples.taus.len() as f64;
    let mut p = Vec::new();
    let mut std_err = Vec::new();
    let mut cumulative = 0.0;
    for n in 0..=n_cap {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for &a in &args {
            let v = ln_binomial_pmf(cfg.n_atoms(), n, a).exp();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum * inv;
        let var = (sum_sq * inv - mean * mean).max(0.0);
        p.push(mean);
        std_err.push((var * inv).sqrt());
        cumulative += mean;
        if cumulative >= 1.0 - crate::measure::CUMULATIVE_CUTOFF {
            break;
        }
    }
    Ok(ClassicalPn {
        p,
        std_err,
        n_paths: samples.taus.len(),
    })
}

/// Fluctuator-side measurement accuracy: finding `n` atoms brackets the
/// residence time within `1/(sqrt(2) alpha)` of `tau_n`.
pub fn classical_accuracy(n: u64, alpha: f64) -> (f64, f64) {
    let center = tau_n(n, alpha);
    let half = classical_accuracy_width(alpha);
    (center - half, center + half)
}

/// `1/(sqrt(2) alpha)`; compare [`crate::meter::quantum_accuracy_width`].
pub fn classical_accuracy_width(alpha: f64) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * alpha)
}

/// Weak-coupling moment extraction: sampled even moments against the
/// outcome ratio `P_1 / P_0 ~ alpha^2 <tau^2>`.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalWeakMoments {
    pub mean_tau: f64,
    pub mean_tau_sq: f64,
    pub mean_tau_4: f64,
    /// `P_1 / P_0` from the sampled meter response.
    pub ratio: f64,
    /// The weak-coupling prediction `alpha^2 <tau^2>` from the same samples.
    pub predicted_ratio: f64,
}

pub fn weak_moments_classical(
    spec: &FluctuatorSpec,
    cfg: &MeterConfig,
    t_total: f64,
    n_paths: usize,
) -> Result<ClassicalWeakMoments> {
    let samples = sample_residence(spec, t_total, n_paths)?;
    let pn = p_n_from_samples(&samples, cfg)?;
    if pn.p.len() < 2 {
        return Err(Error::InvalidParameter(
            "meter produced no n = 1 outcome; cannot form the weak ratio".into(),
        ));
    }
    let mean_tau_sq = samples.moment(2);
    Ok(ClassicalWeakMoments {
        mean_tau: samples.mean(),
        mean_tau_sq,
        mean_tau_4: samples.moment(4),
        ratio: pn.p[1] / pn.p[0],
        predicted_ratio: cfg.alpha() * cfg.alpha() * mean_tau_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meter::g_exact;

    #[test]
    fn frozen_paths_pin_the_residence_time() {
        let stay_one = FluctuatorSpec::new(0.0, 0.0, 1.0, 3).unwrap();
        let s = sample_residence(&stay_one, 7.0, 500).unwrap();
        assert!(s.taus.iter().all(|&t| t == 7.0));
        assert_eq!(s.fraction_at(7.0), 1.0);
        assert_eq!(s.analytic_weight_end, 1.0);

        let stay_zero = FluctuatorSpec::new(0.0, 0.0, 0.0, 3).unwrap();
        let s = sample_residence(&stay_zero, 7.0, 500).unwrap();
        assert!(s.taus.iter().all(|&t| t == 0.0));
        assert_eq!(s.analytic_weight_origin, 1.0);
    }

    #[test]
    fn samples_stay_in_range_and_reproduce() {
        let spec = FluctuatorSpec::new(2.0, 0.7, 0.3, 42).unwrap();
        let a = sample_residence(&spec, 5.0, 2000).unwrap();
        assert!(a.taus.iter().all(|&t| (0.0..=5.0).contains(&t)));
        let b = sample_residence(&spec, 5.0, 2000).unwrap();
        assert_eq!(a.taus, b.taus);
        let other = FluctuatorSpec::new(2.0, 0.7, 0.3, 43).unwrap();
        let c = sample_residence(&other, 5.0, 2000).unwrap();
        assert_ne!(a.taus, c.taus);
    }

    #[test]
    fn symmetric_telegraph_mean_is_half_the_window() {
        // stationary symmetric process: <tau> = T/2; oracle is the analytic
        // mean, tested within 3 sigma of the Monte Carlo error
        let spec = FluctuatorSpec::symmetric(1.0, 11).unwrap();
        let s = sample_residence(&spec, 10.0, 200_000).unwrap();
        let sigma = s.std_dev() / (s.taus.len() as f64).sqrt();
        assert!(
            (s.mean() - 5.0).abs() < 3.0 * sigma,
            "mean {} +- {}",
            s.mean(),
            sigma
        );
    }

    #[test]
    fn atomic_weights_match_no_switch_probabilities() {
        let spec = FluctuatorSpec::new(0.25, 0.4, 0.35, 5).unwrap();
        let t = 3.0;
        let n = 400_000;
        let s = sample_residence(&spec, t, n).unwrap();
        for (observed, expect) in [
            (s.fraction_at(0.0), s.analytic_weight_origin),
            (s.fraction_at(t), s.analytic_weight_end),
        ] {
            let sigma = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!(
                (observed - expect).abs() < 3.0 * sigma,
                "atom: {observed} vs {expect} +- {sigma}"
            );
        }
    }

    #[test]
    fn frozen_fluctuator_reproduces_the_meter_response() {
        let cfg = MeterConfig::new(400, 1.0).unwrap();
        let t = 3.0;
        let stay_one = FluctuatorSpec::new(0.0, 0.0, 1.0, 1).unwrap();
        let pn = p_n_classical(&stay_one, &cfg, t, 50).unwrap();
        for (n, &p) in pn.p.iter().enumerate() {
            let expect = g_exact(n as u64, t, &cfg).unwrap().norm_sqr();
            assert!((p - expect).abs() < 1e-12, "n={n}: {p} vs {expect}");
        }

        let stay_zero = FluctuatorSpec::new(0.0, 0.0, 0.0, 1).unwrap();
        let pn = p_n_classical(&stay_zero, &cfg, t, 50).unwrap();
        assert_eq!(pn.p[0], 1.0);
    }

    #[test]
    fn classical_counts_form_a_probability_distribution() {
        let spec = FluctuatorSpec::symmetric(1.0, 9).unwrap();
        let cfg = MeterConfig::new(10_000, 0.5).unwrap();
        let pn = p_n_classical(&spec, &cfg, 10.0, 5000).unwrap();
        assert!(pn.p.iter().all(|&p| p >= 0.0));
        let total = pn.total();
        assert!(total <= 1.0 + 1e-12);
        assert!(total >= 1.0 - 1e-6, "total {total}");
    }

    #[test]
    fn accuracy_interval() {
        let (lo, hi) = classical_accuracy(9, 3.0);
        let w = 1.0 / (3.0 * std::f64::consts::SQRT_2);
        assert!((lo - (1.0 - w)).abs() < 1e-15);
        assert!((hi - (1.0 + w)).abs() < 1e-15);
        // collapses onto tau_n as the coupling grows
        let (lo, hi) = classical_accuracy(9, 3e6);
        assert!(hi - lo < 1e-6);
        // sqrt(2) narrower than the quantum accuracy
        let ratio =
            classical_accuracy_width(1.7) / crate::meter::quantum_accuracy_width(1.7);
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn weak_coupling_ratio_reads_the_second_moment() {
        let spec = FluctuatorSpec::symmetric(1.0, 71).unwrap();
        let cfg = MeterConfig::new(100, 1e-3).unwrap();
        let m = weak_moments_classical(&spec, &cfg, 10.0, 100_000).unwrap();
        assert!(
            (m.ratio / m.predicted_ratio - 1.0).abs() < 0.02,
            "ratio {} vs predicted {}",
            m.ratio,
            m.predicted_ratio
        );
        // Jensen: <tau> <= sqrt(<tau^2>)
        assert!(m.mean_tau <= m.mean_tau_sq.sqrt());
        // frozen path: <tau^2> = T^2 and the ratio is alpha^2 T^2
        let frozen = FluctuatorSpec::new(0.0, 0.0, 1.0, 2).unwrap();
        let m = weak_moments_classical(&frozen, &cfg, 10.0, 100).unwrap();
        assert!((m.mean_tau_sq - 100.0).abs() < 1e-10);
        assert!((m.ratio - m.predicted_ratio).abs() / m.predicted_ratio < 1e-4);
    }
}
