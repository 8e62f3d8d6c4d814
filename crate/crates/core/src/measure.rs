//! The measurement pipeline: fold the residence-time amplitude distribution
//! with the meter response to get atom-count probabilities, convert counts to
//! a measured-time density, and reproduce the histogram binning used for the
//! reference datasets.
//!
//! Probabilities here are coherent: amplitudes are integrated first and
//! squared after, which is what separates the qubit from the classical
//! fluctuator baseline in [`crate::fluct`] (same meter, incoherent average).

use std::io::{self, Write};

use num_complex::Complex64;

use crate::meter::{g_asymptotic, g_exact, tau_n, MeterConfig};
use crate::respath::{phi_pathsum_pair, QubitSpec, QubitState};
use crate::timegrid::{AmplitudeDistribution, SingularPoint};
use crate::{Error, Result};

/// Which meter amplitude backs the convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeterKind {
    /// Exact finite-`N` amplitude; default, and required by the
    /// joint-evolution oracle comparison.
    Exact,
    /// Scaling-limit form, opt-in.
    Asymptotic,
}

impl MeterKind {
    pub fn label(&self) -> &'static str {
        match self {
            MeterKind::Exact => "exact",
            MeterKind::Asymptotic => "asymptotic",
        }
    }
}

/// Pipeline controls: path-sum resolution and meter choice.
#[derive(Debug, Clone, Copy)]
pub struct MeasureParams {
    pub steps: usize,
    pub meter: MeterKind,
}

impl MeasureParams {
    pub fn new(steps: usize, meter: MeterKind) -> Self {
        Self { steps, meter }
    }
}

/// Keep extending the outcome table until this little probability is left.
pub const CUMULATIVE_CUTOFF: f64 = 1e-8;

/// Provenance of a [`MeasurementOutcome`].
#[derive(Debug, Clone, Copy)]
pub struct OutcomeMeta {
    pub t_total: f64,
    pub epsilon: f64,
    pub initial: QubitState,
    pub final_state: QubitState,
    pub alpha: f64,
    pub n_atoms: u64,
    pub meter: MeterKind,
    pub steps: usize,
    /// `delta_omega * T` when it exceeds the linear-regime threshold.
    pub linear_regime_violation: Option<f64>,
}

/// Atom-count probabilities `P_n` for one pre/post-selected channel,
/// truncated where the initial state's cumulative probability over both
/// final-state channels exceeds `1 - `[`CUMULATIVE_CUTOFF`].
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub probabilities: Vec<f64>,
    pub meta: OutcomeMeta,
}

impl MeasurementOutcome {
    pub fn n_max(&self) -> u64 {
        self.probabilities.len() as u64 - 1
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// CSV rows `n,tau_n,P,w` with the Jacobian density `w = 2 alpha sqrt(n) P`
    /// (reported as 0 at `n = 0`, where the count-to-time Jacobian is
    /// undefined).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,tau_n,P,w")?;
        for (n, p) in self.probabilities.iter().enumerate() {
            let tau = tau_n(n as u64, self.meta.alpha);
            let w = if n == 0 {
                0.0
            } else {
                2.0 * self.meta.alpha * (n as f64).sqrt() * p
            };
            writeln!(out, "{n},{tau:.16e},{p:.16e},{w:.16e}")?;
        }
        Ok(())
    }
}

/// Amplitude for `n` tunnelled atoms given an amplitude distribution:
/// quadrature of the meter amplitude against the smooth density plus the
/// exact meter value at each point mass.
pub fn amplitude_n(
    n: u64,
    phi: &AmplitudeDistribution,
    cfg: &MeterConfig,
    kind: MeterKind,
) -> Result<Complex64> {
    let grid = phi.grid();
    let width = 1.0 / cfg.alpha();
    if grid.spacing() > width / 4.0 {
        return Err(Error::GridResolution {
            spacing: grid.spacing(),
            width,
        });
    }
    let g = |n: u64, tau: f64| -> Result<Complex64> {
        match kind {
            MeterKind::Exact => g_exact(n, tau, cfg),
            MeterKind::Asymptotic => Ok(g_asymptotic(n, tau, cfg.alpha())),
        }
    };
    if kind == MeterKind::Exact && n > cfg.n_atoms() {
        return Err(Error::AtomIndexOutOfRange {
            n,
            n_atoms: cfg.n_atoms(),
        });
    }

    // The meter amplitude is concentrated within ~1/alpha of its peak
    // exposure; restrict the quadrature to that window.
    let (lo, hi) = meter_window(n, grid.t_total(), cfg, kind);
    let j_lo = (lo / grid.spacing()).floor().max(0.0) as usize;
    let j_hi = ((hi / grid.spacing()).ceil() as usize).min(grid.steps());
    let mut acc = Complex64::ZERO;
    if j_lo <= j_hi {
        for j in j_lo..=j_hi {
            let w = if j == 0 || j == grid.steps() { 0.5 } else { 1.0 };
            let z = phi.density()[j];
            if z != Complex64::ZERO {
                acc += g(n, grid.tau(j))? * z * w;
            }
        }
        acc *= grid.spacing();
    }
    for point in SingularPoint::ALL {
        let weight = phi.singular_weight(point);
        if weight != Complex64::ZERO {
            acc += g(n, point.location(grid))? * weight;
        }
    }
    Ok(acc)
}

/// Exposure window outside which `|G_n|` is negligible (< e^-100 of peak).
fn meter_window(n: u64, t_total: f64, cfg: &MeterConfig, kind: MeterKind) -> (f64, f64) {
    let alpha = cfg.alpha();
    let center = match kind {
        MeterKind::Asymptotic => tau_n(n, alpha),
        MeterKind::Exact => {
            let delta = cfg.delta_omega();
            if delta * t_total > std::f64::consts::FRAC_PI_2 {
                // meter past its first rotation node: no single peak
                return (0.0, t_total);
            }
            let ratio = (n as f64 / cfg.n_atoms() as f64).sqrt().min(1.0);
            ratio.asin() / delta
        }
    };
    let half = 10.0 / alpha;
    ((center - half).max(0.0), (center + half).min(t_total))
}

/// Outcome tables for both final states from one path-sum pass, index order
/// [One, Two]. The table is extended until the combined cumulative
/// probability leaves less than [`CUMULATIVE_CUTOFF`] unaccounted for.
pub fn probability_pair(
    epsilon: f64,
    initial: QubitState,
    cfg: &MeterConfig,
    t_total: f64,
    params: &MeasureParams,
) -> Result<[MeasurementOutcome; 2]> {
    let pair = phi_pathsum_pair(epsilon, initial, t_total, params.steps)?;
    let hard_cap = match params.meter {
        MeterKind::Exact => {
            let peak = cfg.n_atoms() as f64
                * (cfg.delta_omega() * t_total).min(std::f64::consts::FRAC_PI_2).sin().powi(2);
            (cfg.n_atoms()).min((peak + 30.0 * cfg.alpha() * t_total.sqrt() + 100.0) as u64)
        }
        MeterKind::Asymptotic => ((cfg.alpha() * t_total + 30.0).powi(2) + 100.0) as u64,
    };

    let mut tables = [Vec::new(), Vec::new()];
    let mut cumulative = 0.0;
    for n in 0..=hard_cap {
        for (f, table) in tables.iter_mut().enumerate() {
            let p = amplitude_n(n, &pair[f], cfg, params.meter)?.norm_sqr();
            table.push(p);
            cumulative += p;
        }
        if cumulative >= 1.0 - CUMULATIVE_CUTOFF {
            break;
        }
    }

    let meta = |final_state: QubitState| OutcomeMeta {
        t_total,
        epsilon,
        initial,
        final_state,
        alpha: cfg.alpha(),
        n_atoms: cfg.n_atoms(),
        meter: params.meter,
        steps: params.steps,
        linear_regime_violation: cfg.linear_regime_violation(t_total),
    };
    let [one, two] = tables;
    Ok([
        MeasurementOutcome {
            probabilities: one,
            meta: meta(QubitState::One),
        },
        MeasurementOutcome {
            probabilities: two,
            meta: meta(QubitState::Two),
        },
    ])
}

/// Outcome table `P_n = |A_n|^2` for the channel selected by `spec`.
pub fn probability_table(
    spec: &QubitSpec,
    cfg: &MeterConfig,
    t_total: f64,
    params: &MeasureParams,
) -> Result<MeasurementOutcome> {
    let pair = probability_pair(spec.epsilon, spec.initial, cfg, t_total, params)?;
    Ok(pair[spec.final_state.index()].clone())
}

/// Measured-time density by the count-to-time Jacobian:
/// points `(tau_n, 2 alpha sqrt(n) P_n)` for `n >= 1`.
#[derive(Debug, Clone)]
pub struct WDensity {
    pub points: Vec<(f64, f64)>,
    /// Set when `alpha^2 T^2 < 10`: too few distinguishable counts for the
    /// density picture to be meaningful.
    pub low_resolution: bool,
}

pub fn density_w(outcome: &MeasurementOutcome) -> WDensity {
    let alpha = outcome.meta.alpha;
    let points = outcome
        .probabilities
        .iter()
        .enumerate()
        .skip(1) // Jacobian undefined at n = 0
        .map(|(n, p)| {
            (
                tau_n(n as u64, alpha),
                2.0 * alpha * (n as f64).sqrt() * p,
            )
        })
        .collect();
    WDensity {
        points,
        low_resolution: (alpha * outcome.meta.t_total).powi(2) < 10.0,
    }
}

/// Histogram density over `[0, T]` with uniform bins.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub t_total: f64,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn n_bins(&self) -> usize {
        self.densities.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.t_total / self.n_bins() as f64
    }

    pub fn bin_left(&self, i: usize) -> f64 {
        i as f64 * self.bin_width()
    }

    pub fn bin_right(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.bin_width()
    }

    /// Index of the bin containing `x`; bins are left-closed, the last bin
    /// also absorbs `x = T` exactly.
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(0.0..=self.t_total).contains(&x) {
            return None;
        }
        Some(((x / self.bin_width()) as usize).min(self.n_bins() - 1))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "bin_left,bin_right,density")?;
        for (i, d) in self.densities.iter().enumerate() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.bin_left(i),
                self.bin_right(i),
                d
            )?;
        }
        Ok(())
    }
}

/// The reference binning procedure: split `[0, T]` into `n_bin` equal
/// subintervals, place each outcome at `tau_n = sqrt(n)/alpha` exactly, sum
/// the probabilities inside each subinterval and divide by the width.
/// Outcomes with `tau_n > T` are dropped.
pub fn bin_density(outcome: &MeasurementOutcome, n_bin: usize) -> Result<Histogram> {
    if n_bin < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 bins, got {n_bin}"
        )));
    }
    let mut hist = Histogram {
        t_total: outcome.meta.t_total,
        densities: vec![0.0; n_bin],
    };
    let width = hist.bin_width();
    for (n, p) in outcome.probabilities.iter().enumerate() {
        if let Some(i) = hist.bin_of(tau_n(n as u64, outcome.meta.alpha)) {
            hist.densities[i] += p / width;
        }
    }
    Ok(hist)
}
