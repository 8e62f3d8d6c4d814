//! Command-line front end for the residence-time measurement toolkit.
//!
//! Exit codes: 0 on success, 2 on validation or I/O errors, 3 when the
//! verification suite reports a failing criterion.

mod cmds;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use restime::measure::MeterKind;
use restime::timegrid::DEFAULT_STEPS_PER_UNIT_TIME;

use crate::config::Config;

#[derive(Parser)]
#[command(
    name = "restime",
    version,
    about = "Qubit residence-time measurement with a condensate meter: \
             amplitude distributions, outcome statistics, verification"
)]
struct Cli {
    /// Optional key=value defaults file; explicit flags win on conflict.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude-distribution surfaces over a range of total times
    Phi(PhiArgs),
    /// Meter response curves and characteristic exposures
    Meter(MeterArgs),
    /// Outcome tables, measured-time histograms and regime overlays
    Measure(MeasureArgs),
    /// Strong-coupling count statistics against the limiting Poisson tail
    Zeno(ZenoArgs),
    /// Weak-coupling outcome ratios against the weak value
    Weak(WeakArgs),
    /// Classical fluctuator sampling and incoherent count statistics
    Fluct(FluctArgs),
    /// Run the verification suite (exit 3 on failure)
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of total-time values on the lattice
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Path-sum steps per unit time
    #[arg(long)]
    steps_per_time: Option<f64>,
    /// pathsum, fourier or both (both adds a method-deviation summary)
    #[arg(long)]
    method: Option<String>,
    /// Frequency cutoff of the inversion route
    #[arg(long)]
    cutoff: Option<f64>,
    /// Quadrature nodes for the inversion route (0 = automatic)
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct MeterArgs {
    #[arg(long)]
    n_atoms: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Samples along the exposure axis
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated atom counts to tabulate
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Initial qubit state, 1 or 2
    #[arg(long)]
    initial: Option<u8>,
    /// Atom count; defaults to the smallest count in the linear regime
    #[arg(long)]
    n_atoms: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    n_bin: Option<usize>,
    /// exact or asymptotic meter amplitudes
    #[arg(long)]
    meter: Option<String>,
    /// medium (T=100, alpha=0.1) or strong (T=100, alpha=2) dataset preset;
    /// explicit --t/--alpha still win
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ZenoArgs {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial qubit state, 1 or 2
    #[arg(long)]
    initial: Option<u8>,
    #[arg(long)]
    n_atoms: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct WeakArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated total times
    #[arg(long)]
    t_list: Option<String>,
    #[arg(long)]
    n_atoms: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FluctArgs {
    /// Switching rate 0 -> 1
    #[arg(long)]
    k01: Option<f64>,
    /// Switching rate 1 -> 0
    #[arg(long)]
    k10: Option<f64>,
    /// Probability to start in state 1
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n_bin: Option<usize>,
    /// Meter coupling; when given, incoherent count statistics are emitted too
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n_atoms: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smaller parameter sets, same checks
    #[arg(long)]
    quick: bool,
    /// Comma-separated criterion ids to run (default: all)
    #[arg(long)]
    only: Option<String>,
}

fn parse_list<T: std::str::FromStr>(raw: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad list entry {s}: {e}"))
        })
        .collect()
}

fn optional_u64(flag: Option<u64>, cfg: &Config, key: &str) -> anyhow::Result<Option<u64>> {
    match flag {
        Some(v) => {
            cfg.resolve(Some(v), key, 0)?;
            Ok(Some(v))
        }
        None => Ok(match cfg.resolve(None::<i64>, key, -1)? {
            v if v < 0 => None,
            v => Some(v as u64),
        }),
    }
}

fn optional_f64(flag: Option<f64>, cfg: &Config, key: &str) -> anyhow::Result<Option<f64>> {
    Ok(match cfg.resolve(flag, key, f64::NAN)? {
        v if v.is_nan() => None,
        v => Some(v),
    })
}

/// Ok(false) = verification failure (exit 3), Ok(true) = success.
fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Phi(a) => {
            let run = cmds::PhiRun {
                t_min: cfg.resolve(a.t_min, "t_min", 5.0)?,
                t_max: cfg.resolve(a.t_max, "t_max", 100.0)?,
                t_count: cfg.resolve(a.t_count, "t_count", 20)?,
                epsilon: cfg.resolve(a.epsilon, "epsilon", 0.0)?,
                steps_per_time: cfg.resolve(
                    a.steps_per_time,
                    "steps_per_time",
                    DEFAULT_STEPS_PER_UNIT_TIME,
                )?,
                method: cfg.resolve(a.method, "method", "both".into())?,
                cutoff: cfg.resolve(a.cutoff, "cutoff", 200.0)?,
                quad_points: cfg.resolve(a.quad_points, "quad_points", 0)?,
                out_dir: cfg.resolve(a.out_dir, "out_dir", PathBuf::from("out/phi"))?,
            };
            cfg.finish()?;
            cmds::run_phi(&run)?;
        }
        Command::Meter(a) => {
            let alpha = cfg.resolve(a.alpha, "alpha", 1.0)?;
            let run = cmds::MeterRun {
                n_atoms: cfg.resolve(a.n_atoms, "n_atoms", 10_000)?,
                alpha,
                tau_max: cfg.resolve(a.tau_max, "tau_max", 12.0 / alpha)?,
                samples: cfg.resolve(a.samples, "samples", 600)?,
                n_list: parse_list(&cfg.resolve(a.n_list, "n_list", "0,1,4,25,100".into())?)?,
                out_dir: cfg.resolve(a.out_dir, "out_dir", PathBuf::from("out/meter"))?,
            };
            cfg.finish()?;
            cmds::run_meter(&run)?;
        }
        Command::Measure(a) => {
            let (preset_t, preset_alpha) = match cfg.resolve(a.preset, "preset", String::new())? {
                s if s.is_empty() => (100.0, 0.1),
                s => cmds::measure_preset(&s)?,
            };
            let meter = match cfg.resolve(a.meter, "meter", "exact".into())?.as_str() {
                "exact" => MeterKind::Exact,
                "asymptotic" => MeterKind::Asymptotic,
                other => anyhow::bail!("meter must be exact or asymptotic, got {other}"),
            };
            let run = cmds::MeasureRun {
                t_total: cfg.resolve(a.t, "t", preset_t)?,
                alpha: cfg.resolve(a.alpha, "alpha", preset_alpha)?,
                epsilon: cfg.resolve(a.epsilon, "epsilon", 0.0)?,
                initial: cmds::parse_state(cfg.resolve(a.initial, "initial", 1)?)?,
                n_atoms: optional_u64(a.n_atoms, &cfg, "n_atoms")?,
                steps: cfg.resolve(a.steps, "steps", 4000)?,
                n_bin: cfg.resolve(a.n_bin, "n_bin", 100)?,
                meter,
                out_dir: cfg.resolve(a.out_dir, "out_dir", PathBuf::from("out/measure"))?,
            };
            cfg.finish()?;
            cmds::run_measure(&run)?;
        }
        Command::Zeno(a) => {
            let run = cmds::ZenoRun {
                t_total: cfg.resolve(a.t, "t", 10.0)?,
                alpha: cfg.resolve(a.alpha, "alpha", 2.0)?,
                initial: cmds::parse_state(cfg.resolve(a.initial, "initial", 1)?)?,
                n_atoms: optional_u64(a.n_atoms, &cfg, "n_atoms")?,
                steps: cfg.resolve(a.steps, "steps", 8000)?,
                out_dir: cfg.resolve(a.out_dir, "out_dir", PathBuf::from("out/zeno"))?,
            };
            cfg.finish()?;
            cmds::run_zeno(&run)?;
        }
        Command::Weak(a) => {
            let run = cmds::WeakRun {
                alpha: cfg.resolve(a.alpha, "alpha", 1e-3)?,
                t_list: parse_list(&cfg.resolve(a.t_list, "t_list", "3,7,10".into())?)?,
                n_atoms: cfg.resolve(a.n_atoms, "n_atoms", 400)?,
                steps: cfg.resolve(a.steps, "steps", 4000)?,
                out_dir: cfg.resolve(a.out_dir, "out_dir", PathBuf::from("out/weak"))?,
            };
            cfg.finish()?;
            cmds::run_weak(&run)?;
        }
        Command::Fluct(a) => {
            let run = cmds::FluctRun {
                rate_up: cfg.resolve(a.k01, "k01", 1.0)?,
                rate_down: cfg.resolve(a.k10, "k10", 1.0)?,
                p1_init: cfg.resolve(a.p1, "p1", 0.5)?,
                seed: cfg.resolve(a.seed, "seed", 1)?,
                n_paths: cfg.resolve(a.paths, "paths", 100_000)?,
                t_total: cfg.resolve(a.t, "t", 10.0)?,
                n_bin: cfg.resolve(a.n_bin, "n_bin", 100)?,
                alpha: optional_f64(a.alpha, &cfg, "alpha")?,
                n_atoms: optional_u64(a.n_atoms, &cfg, "n_atoms")?,
                out_dir: cfg.resolve(a.out_dir, "out_dir", PathBuf::from("out/fluct"))?,
            };
            cfg.finish()?;
            cmds::run_fluct(&run)?;
        }
        Command::Verify(a) => {
            let only = match cfg.resolve(a.only, "only", String::new())? {
                s if s.is_empty() => None,
                s => Some(parse_list::<u32>(&s)?),
            };
            let quick = a.quick || cfg.resolve(None::<bool>, "quick", false)?;
            cfg.finish()?;
            return cmds::run_verify(quick, only.as_deref());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
