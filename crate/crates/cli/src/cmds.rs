//! Subcommand implementations: every run writes CSV files with a provenance
//! header (`# key=value` lines) so each dataset can be regenerated from its
//! own first lines. Outputs are deterministic for a fixed configuration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use restime::measure::{
    bin_density, density_w, probability_pair, Histogram, MeasureParams, MeterKind,
};
use restime::meter::{g_asymptotic, g_exact, quantum_accuracy_width, tau_n, MeterConfig};
use restime::regimes::{self, w_medium, w_strong};
use restime::respath::{
    phi_fourier, phi_pathsum_pair, FourierSettings, QubitSpec, QubitState,
};
use restime::suite;
use restime::timegrid::TimeGrid;
use restime::fluct::{p_n_from_samples, sample_residence, FluctuatorSpec};

pub fn parse_state(label: u8) -> Result<QubitState> {
    match label {
        1 => Ok(QubitState::One),
        2 => Ok(QubitState::Two),
        other => bail!("qubit state must be 1 or 2, got {other}"),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| {
        format!("creating {}", path.display())
    })?))
}

fn header<W: Write>(w: &mut W, command: &str, params: &[(&str, String)]) -> Result<()> {
    writeln!(w, "# restime {command}")?;
    for (key, value) in params {
        writeln!(w, "# {key}={value}")?;
    }
    Ok(())
}

fn histogram_csv(
    dir: &Path,
    name: &str,
    command: &str,
    params: &[(&str, String)],
    hist: &Histogram,
) -> Result<()> {
    let mut w = create(dir, name)?;
    header(&mut w, command, params)?;
    hist.write_csv(&mut w)?;
    Ok(())
}

pub struct PhiRun {
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub epsilon: f64,
    pub steps_per_time: f64,
    pub method: String,
    pub cutoff: f64,
    pub quad_points: usize,
    pub out_dir: PathBuf,
}

/// Amplitude-distribution surfaces over a (T, tau/T) lattice on the plot
/// window 0.02..0.98, for both channels, plus the stationary-phase overlay
/// and (with `--method both`) a per-T method-deviation summary.
pub fn run_phi(run: &PhiRun) -> Result<()> {
    if run.t_count < 1 || run.t_max < run.t_min {
        bail!("need t-min <= t-max and at least one T value");
    }
    if !["pathsum", "fourier", "both"].contains(&run.method.as_str()) {
        bail!("method must be pathsum, fourier or both");
    }
    let params = vec![
        ("t_min", format!("{}", run.t_min)),
        ("t_max", format!("{}", run.t_max)),
        ("t_count", format!("{}", run.t_count)),
        ("epsilon", format!("{}", run.epsilon)),
        ("steps_per_time", format!("{}", run.steps_per_time)),
        ("method", run.method.clone()),
        ("cutoff", format!("{}", run.cutoff)),
        ("quad_points", format!("{}", run.quad_points)),
        ("window", "0.02..0.98".into()),
    ];
    let mut surfaces = [
        create(&run.out_dir, "phi_surface_11.csv")?,
        create(&run.out_dir, "phi_surface_21.csv")?,
    ];
    let mut asymptote = create(&run.out_dir, "phi_asymptote.csv")?;
    for w in &mut surfaces {
        header(w, "phi", &params)?;
    }
    header(&mut asymptote, "phi", &params)?;

    let mut deviations = Vec::new();
    let mut t_values = Vec::new();
    for k in 0..run.t_count {
        let t = if run.t_count == 1 {
            run.t_min
        } else {
            run.t_min + (run.t_max - run.t_min) * k as f64 / (run.t_count - 1) as f64
        };
        t_values.push(t);
        if run.method == "both" {
            let steps = ((run.steps_per_time * t).ceil() as usize).max(100);
            let pair = phi_pathsum_pair(run.epsilon, QubitState::One, t, steps)?;
            let grid = *pair[0].grid();
            let settings = FourierSettings {
                cutoff: run.cutoff,
                quad_points: run.quad_points,
                tolerance: 1e-2,
            };
            let lo = (0.02 * steps as f64).ceil() as usize;
            let hi = (0.98 * steps as f64).floor() as usize;
            let mut worst = 0.0f64;
            for (channel, final_state) in [(0, QubitState::One), (1, QubitState::Two)] {
                let spec = QubitSpec {
                    epsilon: run.epsilon,
                    initial: QubitState::One,
                    final_state,
                };
                let fourier = phi_fourier(&spec, &grid, &settings)?;
                for j in lo..=hi {
                    worst = worst
                        .max((pair[channel].density()[j] - fourier.dist.density()[j]).norm());
                }
            }
            deviations.push(worst);
        }
    }
    if run.method == "both" {
        for w in &mut surfaces {
            for (t, dev) in t_values.iter().zip(&deviations) {
                writeln!(w, "# method_deviation T={t} max={dev:.6e}")?;
            }
        }
    }

    for w in &mut surfaces {
        writeln!(w, "T,tau_frac,tau,re,im")?;
    }
    writeln!(asymptote, "T,tau_frac,tau,re_11,im_11,re_12,im_12")?;
    for &t in &t_values {
        let steps = ((run.steps_per_time * t).ceil() as usize).max(100);
        let lo = (0.02 * steps as f64).ceil() as usize;
        let hi = (0.98 * steps as f64).floor() as usize;
        let channels: [Vec<restime::Complex64>; 2] = if run.method == "fourier" {
            let grid = TimeGrid::new(t, steps)?;
            let settings = FourierSettings {
                cutoff: run.cutoff,
                quad_points: run.quad_points,
                tolerance: 1e-2,
            };
            let mut out = Vec::new();
            for final_state in [QubitState::One, QubitState::Two] {
                let spec = QubitSpec {
                    epsilon: run.epsilon,
                    initial: QubitState::One,
                    final_state,
                };
                out.push(phi_fourier(&spec, &grid, &settings)?.dist.density().to_vec());
            }
            [out.remove(0), out.remove(0)]
        } else {
            let pair = phi_pathsum_pair(run.epsilon, QubitState::One, t, steps)?;
            [pair[0].density().to_vec(), pair[1].density().to_vec()]
        };
        let dt = t / steps as f64;
        for j in lo..=hi {
            let tau = j as f64 * dt;
            let frac = tau / t;
            for (w, channel) in surfaces.iter_mut().zip(&channels) {
                writeln!(
                    w,
                    "{t},{frac:.6},{tau:.6e},{:.16e},{:.16e}",
                    channel[j].re, channel[j].im
                )?;
            }
            let a11 = regimes::phi11_stationary(tau, t)?;
            let a12 = regimes::phi12_stationary(tau, t)?;
            writeln!(
                asymptote,
                "{t},{frac:.6},{tau:.6e},{:.16e},{:.16e},{:.16e},{:.16e}",
                a11.re, a11.im, a12.re, a12.im
            )?;
        }
    }
    Ok(())
}

pub struct MeterRun {
    pub n_atoms: u64,
    pub alpha: f64,
    pub tau_max: f64,
    pub samples: usize,
    pub n_list: Vec<u64>,
    pub out_dir: PathBuf,
}

/// Meter response curves for selected counts, exact against the scaling form,
/// plus the characteristic-exposure table.
pub fn run_meter(run: &MeterRun) -> Result<()> {
    let cfg = MeterConfig::new(run.n_atoms, run.alpha)?;
    let params = vec![
        ("n_atoms", format!("{}", run.n_atoms)),
        ("alpha", format!("{}", run.alpha)),
        ("tau_max", format!("{}", run.tau_max)),
        ("samples", format!("{}", run.samples)),
        (
            "n_list",
            run.n_list
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
    ];
    let mut w = create(&run.out_dir, "meter_response.csv")?;
    header(&mut w, "meter", &params)?;
    writeln!(w, "n,tau,re_exact,im_exact,re_asymptotic,im_asymptotic")?;
    for &n in &run.n_list {
        for k in 0..=run.samples {
            let tau = run.tau_max * k as f64 / run.samples as f64;
            let exact = g_exact(n, tau, &cfg)?;
            let asymptotic = g_asymptotic(n, tau, run.alpha);
            writeln!(
                w,
                "{n},{tau:.6e},{:.16e},{:.16e},{:.16e},{:.16e}",
                exact.re, exact.im, asymptotic.re, asymptotic.im
            )?;
        }
    }
    let mut w = create(&run.out_dir, "meter_tau_n.csv")?;
    header(&mut w, "meter", &params)?;
    writeln!(w, "n,tau_n,quantum_width")?;
    for &n in &run.n_list {
        writeln!(
            w,
            "{n},{:.16e},{:.16e}",
            tau_n(n, run.alpha),
            quantum_accuracy_width(run.alpha)
        )?;
    }
    Ok(())
}

pub struct MeasureRun {
    pub t_total: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub initial: QubitState,
    pub n_atoms: Option<u64>,
    pub steps: usize,
    pub n_bin: usize,
    pub meter: MeterKind,
    pub out_dir: PathBuf,
}

/// The full measurement dataset for one initial state: outcome tables and
/// histograms for both post-selections plus the regime-formula overlay.
pub fn run_measure(run: &MeasureRun) -> Result<()> {
    let n_atoms = run
        .n_atoms
        .unwrap_or_else(|| MeterConfig::atoms_for_linear_regime(run.alpha, run.t_total));
    let cfg = MeterConfig::new(n_atoms, run.alpha)?;
    if let Some(x) = cfg.linear_regime_violation(run.t_total) {
        eprintln!("warning: delta_omega * T = {x:.3} strains the scaling-limit assumption");
    }
    let regime = regimes::classify(run.alpha, run.t_total);
    let params = vec![
        ("t", format!("{}", run.t_total)),
        ("alpha", format!("{}", run.alpha)),
        ("epsilon", format!("{}", run.epsilon)),
        ("initial", format!("{}", run.initial.label())),
        ("n_atoms", format!("{n_atoms}")),
        ("steps", format!("{}", run.steps)),
        ("n_bin", format!("{}", run.n_bin)),
        ("meter", run.meter.label().into()),
        ("regime", format!("{regime:?}").to_lowercase()),
    ];
    let pair = probability_pair(
        run.epsilon,
        run.initial,
        &cfg,
        run.t_total,
        &MeasureParams::new(run.steps, run.meter),
    )?;
    for (outcome, final_state) in pair.iter().zip([QubitState::One, QubitState::Two]) {
        let f = final_state.label();
        let mut w = create(&run.out_dir, &format!("outcome_f{f}.csv"))?;
        header(&mut w, "measure", &params)?;
        writeln!(w, "# final_state={f}")?;
        let density = density_w(outcome);
        if density.low_resolution {
            writeln!(w, "# warning=alpha^2 T^2 < 10, too few counts for a density")?;
        }
        outcome.write_csv(&mut w)?;

        let hist = bin_density(outcome, run.n_bin)?;
        histogram_csv(
            &run.out_dir,
            &format!("histogram_f{f}.csv"),
            "measure",
            &params,
            &hist,
        )?;
    }

    // regime-formula overlay on the bin centers
    let phi_pair = phi_pathsum_pair(run.epsilon, run.initial, run.t_total, run.steps)?;
    let mut w = create(&run.out_dir, "overlay.csv")?;
    header(&mut w, "measure", &params)?;
    writeln!(w, "tau,w_medium_same,w_medium_cross,w_strong_same,w_strong_cross")?;
    let width = run.t_total / run.n_bin as f64;
    for b in 0..run.n_bin {
        let tau = (b as f64 + 0.5) * width;
        writeln!(
            w,
            "{tau:.6e},{:.16e},{:.16e},{:.16e},{:.16e}",
            w_medium(true, tau, run.t_total, run.alpha),
            w_medium(false, tau, run.t_total, run.alpha),
            w_strong(run.alpha, phi_pair[run.initial.index()].density_at(tau)),
            w_strong(run.alpha, phi_pair[run.initial.other().index()].density_at(tau)),
        )?;
    }
    Ok(())
}

pub struct ZenoRun {
    pub t_total: f64,
    pub alpha: f64,
    pub initial: QubitState,
    pub n_atoms: Option<u64>,
    pub steps: usize,
    pub out_dir: PathBuf,
}

/// Strong-coupling count statistics against the limiting Poisson tail.
pub fn run_zeno(run: &ZenoRun) -> Result<()> {
    let n_atoms = run
        .n_atoms
        .unwrap_or_else(|| MeterConfig::atoms_for_linear_regime(run.alpha, run.t_total));
    let cfg = MeterConfig::new(n_atoms, run.alpha)?;
    let pair = probability_pair(
        0.0,
        run.initial,
        &cfg,
        run.t_total,
        &MeasureParams::new(run.steps, MeterKind::Exact),
    )?;
    let same = &pair[run.initial.index()];
    let total: f64 = same.probabilities.iter().sum();
    let span = same
        .probabilities
        .len()
        .max((1.5 * (run.alpha * run.t_total).powi(2)) as usize);
    let tv = 0.5
        * (0..span)
            .map(|n| {
                let p = same.probabilities.get(n).copied().unwrap_or(0.0) / total;
                (p - regimes::zeno_pn(run.initial, n as u64, run.alpha, run.t_total)).abs()
            })
            .sum::<f64>();
    let params = vec![
        ("t", format!("{}", run.t_total)),
        ("alpha", format!("{}", run.alpha)),
        ("initial", format!("{}", run.initial.label())),
        ("n_atoms", format!("{n_atoms}")),
        ("steps", format!("{}", run.steps)),
        ("tv_vs_limit", format!("{tv:.6e}")),
        ("channel_mass", format!("{total:.6e}")),
    ];
    let mut w = create(&run.out_dir, "zeno.csv")?;
    header(&mut w, "zeno", &params)?;
    writeln!(w, "n,P_same,P_cross,P_limit")?;
    for n in 0..span {
        writeln!(
            w,
            "{n},{:.16e},{:.16e},{:.16e}",
            same.probabilities.get(n).copied().unwrap_or(0.0),
            pair[run.initial.other().index()]
                .probabilities
                .get(n)
                .copied()
                .unwrap_or(0.0),
            regimes::zeno_pn(run.initial, n as u64, run.alpha, run.t_total)
        )?;
    }
    println!("zeno: TV against the limiting tail = {tv:.4}, channel mass {total:.4}");
    Ok(())
}

pub struct WeakRun {
    pub alpha: f64,
    pub t_list: Vec<f64>,
    pub n_atoms: u64,
    pub steps: usize,
    pub out_dir: PathBuf,
}

/// Weak-coupling outcome ratios against the weak value of the residence time.
pub fn run_weak(run: &WeakRun) -> Result<()> {
    let cfg = MeterConfig::new(run.n_atoms, run.alpha)?;
    let params = vec![
        ("alpha", format!("{}", run.alpha)),
        (
            "t_list",
            run.t_list
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
        ("n_atoms", format!("{}", run.n_atoms)),
        ("steps", format!("{}", run.steps)),
    ];
    let mut w = create(&run.out_dir, "weak.csv")?;
    header(&mut w, "weak", &params)?;
    writeln!(w, "T,p1_over_p0,weak_value,predicted_ratio,divergent")?;
    for &t in &run.t_list {
        let pair = probability_pair(
            0.0,
            QubitState::One,
            &cfg,
            t,
            &MeasureParams::new(run.steps, MeterKind::Exact),
        )?;
        let ratio = pair[0].probabilities[1] / pair[0].probabilities[0];
        match regimes::weak_value(t) {
            Ok(tau_bar) => writeln!(
                w,
                "{t},{ratio:.16e},{:.16e},{:.16e},0",
                tau_bar.re,
                run.alpha * run.alpha * tau_bar.norm_sqr()
            )?,
            Err(_) => writeln!(w, "{t},{ratio:.16e},nan,nan,1")?,
        }
    }
    Ok(())
}

pub struct FluctRun {
    pub rate_up: f64,
    pub rate_down: f64,
    pub p1_init: f64,
    pub seed: u64,
    pub n_paths: usize,
    pub t_total: f64,
    pub n_bin: usize,
    pub alpha: Option<f64>,
    pub n_atoms: Option<u64>,
    pub out_dir: PathBuf,
}

/// Classical fluctuator: residence-time histogram and, when a meter is
/// given, the incoherent count statistics.
pub fn run_fluct(run: &FluctRun) -> Result<()> {
    let spec = FluctuatorSpec::new(run.rate_up, run.rate_down, run.p1_init, run.seed)?;
    let samples = sample_residence(&spec, run.t_total, run.n_paths)?;
    let mut params = vec![
        ("k01", format!("{}", run.rate_up)),
        ("k10", format!("{}", run.rate_down)),
        ("p1_init", format!("{}", run.p1_init)),
        ("seed", format!("{}", run.seed)),
        ("paths", format!("{}", run.n_paths)),
        ("t", format!("{}", run.t_total)),
        ("n_bin", format!("{}", run.n_bin)),
    ];
    params.push((
        "analytic_weight_origin",
        format!("{:.16e}", samples.analytic_weight_origin),
    ));
    params.push((
        "analytic_weight_end",
        format!("{:.16e}", samples.analytic_weight_end),
    ));
    let hist = samples.histogram(run.n_bin)?;
    histogram_csv(
        &run.out_dir,
        "fluct_histogram.csv",
        "fluct",
        &params,
        &hist,
    )?;

    if let Some(alpha) = run.alpha {
        let n_atoms = run
            .n_atoms
            .unwrap_or_else(|| MeterConfig::atoms_for_linear_regime(alpha, run.t_total));
        let cfg = MeterConfig::new(n_atoms, alpha)?;
        let pn = p_n_from_samples(&samples, &cfg)?;
        let mut w = create(&run.out_dir, "fluct_pn.csv")?;
        params.push(("alpha", format!("{alpha}")));
        params.push(("n_atoms", format!("{n_atoms}")));
        header(&mut w, "fluct", &params)?;
        writeln!(w, "n,tau_n,P,std_err")?;
        for (n, (p, se)) in pn.p.iter().zip(&pn.std_err).enumerate() {
            writeln!(
                w,
                "{n},{:.16e},{p:.16e},{se:.16e}",
                tau_n(n as u64, alpha)
            )?;
        }
    }
    Ok(())
}

/// Run the verification suite; returns false when any criterion failed.
pub fn run_verify(quick: bool, only: Option<&[u32]>) -> Result<bool> {
    let ids: Vec<u32> = match only {
        Some(ids) => ids.to_vec(),
        None => suite::CRITERION_IDS.to_vec(),
    };
    let mut all_passed = true;
    for id in ids {
        let outcome = suite::run_criterion(id, quick)?;
        println!("{}", outcome.line());
        all_passed &= outcome.passed;
    }
    Ok(all_passed)
}

/// Fig.-style presets for the measurement datasets.
pub fn measure_preset(name: &str) -> Result<(f64, f64)> {
    match name {
        // (T, alpha): quantum accuracy over T of 0.1 and 0.005
        "medium" => Ok((100.0, 0.1)),
        "strong" => Ok((100.0, 2.0)),
        other => bail!("unknown preset {other}; expected medium or strong"),
    }
}
