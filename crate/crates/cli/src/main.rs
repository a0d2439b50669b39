//! `mollow`: spectra, correlations, photon-stream simulation and fits for a
//! driven two-level atom.

mod config;
mod table;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mollow_core::dynamics::{g2_analytic, g2_numeric, spectrum_numeric};
use mollow_core::filtered::{
    build_composite, filtered_cross_correlation, fit_two_exponentials, two_exponential, SensorConfig,
};
use mollow_core::fit::{
    fit_g2, fit_saturation, fit_spectrum, g2_model, measured_triplet, DataSeries, FitResult,
    G2FitConfig, SaturationFitConfig, SpectrumFitConfig,
};
use mollow_core::instrument::{add_reflection, convolve_with_cavity, triangle_window, ReflectionBackground};
use mollow_core::montecarlo::{
    apply_detectors, correlate, hbt_split, read_timetag, simulate_stream, write_timetag, DetectorConfig,
    SimConfig, TimetagHeader,
};
use mollow_core::numerics::linspace;
use mollow_core::units::{self, mhz_to_angular};
use mollow_core::AtomParams;

use table::{write_csv, write_jsonl, Table};

/// Seed offsets so the beam splitter and detector noise draw from streams
/// unrelated to the trajectories.
const SPLIT_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;
const DETECTOR_SEED_MIX: u64 = 0xD1B5_4A32_D192_ED03;

#[derive(Parser)]
#[command(name = "mollow", version, about, args_override_self = true)]
#[command(after_help = "Any flag can be preset in a key=value file passed with --config <file>; \
                        flags given on the command line take precedence.")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ideal and instrument-convolved fluorescence spectra.
    Spectrum(SpectrumArgs),
    /// Analytic and numeric g²(τ), with and without the pulse-overlap triangle.
    G2(G2Args),
    /// Simulate a detected photon stream into a time-tag file.
    Simulate(SimulateArgs),
    /// Normalized coincidence histogram of a time-tag file.
    Correlate(CorrelateArgs),
    /// Cross-correlation of the two frequency-filtered sidebands.
    Cross(CrossArgs),
    /// Fit a model to CSV data.
    #[command(subcommand)]
    Fit(FitCommand),
}

#[derive(Args)]
struct AtomArgs {
    /// Natural linewidth Γ/2π, MHz.
    #[arg(long, default_value_t = units::RB87_D2_LINEWIDTH_MHZ)]
    gamma_mhz: f64,
    /// Rabi frequency Ω/2π, MHz.
    #[arg(long)]
    omega_mhz: f64,
    /// Laser detuning Δ/2π = (ω_L − ω_A)/2π, MHz.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta_mhz: f64,
}

impl AtomArgs {
    fn params(&self) -> Result<AtomParams> {
        Ok(AtomParams::from_mhz(self.gamma_mhz, self.omega_mhz, self.delta_mhz)?)
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    atom: AtomArgs,
    /// Cavity FWHM, MHz.
    #[arg(long, default_value_t = units::SPECTROSCOPY_CAVITY_FWHM_MHZ)]
    cavity_mhz: f64,
    /// Fraction of detected power that is reflected laser light.
    #[arg(long, default_value_t = units::LASER_REFLECTION_FRACTION)]
    reflection: f64,
    /// Half-width of the frequency grid, MHz [default: 2Ω′ + 10Γ].
    #[arg(long)]
    span_mhz: Option<f64>,
    /// Grid step, MHz.
    #[arg(long, default_value_t = 0.1)]
    step_mhz: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct G2Args {
    #[command(flatten)]
    atom: AtomArgs,
    /// Probe pulse length, µs.
    #[arg(long, default_value_t = units::PROBE_PULSE_S * 1e6)]
    pulse_us: f64,
    #[arg(long, default_value_t = 200.0)]
    taumax_ns: f64,
    #[arg(long, default_value_t = 0.5)]
    step_ns: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    atom: AtomArgs,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Total detection efficiency.
    #[arg(long, default_value_t = units::DETECTION_EFFICIENCY)]
    eta: f64,
    #[arg(long, default_value_t = units::PROBE_PULSE_S * 1e6)]
    pulse_us: f64,
    /// Detector dead time, ns.
    #[arg(long, default_value_t = 0.0)]
    dead_ns: f64,
    /// Dark count rate per detector, counts/s.
    #[arg(long, default_value_t = 0.0)]
    dark_cps: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    bin_ns: f64,
    #[arg(long)]
    taumax_ns: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CrossArgs {
    #[command(flatten)]
    atom: AtomArgs,
    /// Filter FWHM, MHz.
    #[arg(long, default_value_t = units::SIDEBAND_FILTER_FWHM_MHZ)]
    filter_mhz: f64,
    /// Sensor coupling as a fraction of the filter width.
    #[arg(long, default_value_t = 1e-3)]
    coupling_frac: f64,
    #[arg(long, default_value_t = 150.0)]
    taumax_ns: f64,
    #[arg(long, default_value_t = 0.5)]
    step_ns: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitIo {
    #[arg(long = "in")]
    input: PathBuf,
    /// JSON-lines result file.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV with the fitted model on a dense grid.
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FitCommand {
    /// Closed-form triplet through cavity and reflection; columns
    /// `freq_mhz` and `signal` (or `convolved_per_mhz`), optional `signal_err`.
    Spectrum {
        #[command(flatten)]
        io: FitIo,
        #[arg(long, default_value_t = units::RB87_D2_LINEWIDTH_MHZ)]
        gamma_mhz: f64,
        #[arg(long, default_value_t = units::SPECTROSCOPY_CAVITY_FWHM_MHZ)]
        cavity_mhz: f64,
        #[arg(long, default_value_t = units::LASER_REFLECTION_FRACTION)]
        reflection: f64,
    },
    /// Closed-form g² times the triangle; columns `tau_ns`, `g2`, and
    /// `g2_err` or `counts`.
    G2 {
        #[command(flatten)]
        io: FitIo,
        #[arg(long, default_value_t = units::RB87_D2_LINEWIDTH_MHZ)]
        gamma_mhz: f64,
        #[arg(long, default_value_t = units::PROBE_PULSE_S * 1e6)]
        pulse_us: f64,
    },
    /// Saturation curve; columns `power_pw`, `rate_cps`, optional `rate_err`.
    Saturation {
        #[command(flatten)]
        io: FitIo,
        #[arg(long, default_value_t = units::RB87_D2_LINEWIDTH_MHZ)]
        gamma_mhz: f64,
    },
    /// Two-sided exponential; columns `tau_ns`, `g_cross`.
    Twoexp {
        #[command(flatten)]
        io: FitIo,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = config::expand_args(std::env::args().collect())
        .map(Cli::parse_from)
        .and_then(run);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::G2(a) => cmd_g2(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Correlate(a) => cmd_correlate(&a),
        Command::Cross(a) => cmd_cross(&a),
        Command::Fit(f) => cmd_fit(f),
    }
}

/// Densities per rad/s to per MHz.
const PER_MHZ: f64 = 2.0 * PI * 1e6;

fn cmd_spectrum(a: &SpectrumArgs) -> Result<()> {
    let p = a.atom.params()?;
    let span = a
        .span_mhz
        .unwrap_or(2.0 * a.atom.omega_mhz.hypot(a.atom.delta_mhz) + 10.0 * a.atom.gamma_mhz);
    if !(span > 0.0 && a.step_mhz > 0.0) {
        bail!("span and step must be positive");
    }
    let half = (span / a.step_mhz).round() as i64;
    let freq_mhz: Vec<f64> = (-half..=half).map(|k| k as f64 * a.step_mhz).collect();
    let grid: Vec<f64> = freq_mhz.iter().map(|&f| mhz_to_angular(f)).collect();
    let ideal = spectrum_numeric(&p, &grid)?;
    let total = ideal.total_power();
    let measured = convolve_with_cavity(
        &add_reflection(&ideal, &ReflectionBackground::new(a.reflection)?)?,
        mhz_to_angular(a.cavity_mhz),
    )?;
    let scale = PER_MHZ / total;
    let ideal_col: Vec<f64> = ideal.density.iter().map(|d| d * scale).collect();
    let conv_col: Vec<f64> = measured.density.iter().map(|d| d * scale).collect();
    write_csv(
        &a.out,
        &["freq_mhz", "ideal_per_mhz", "convolved_per_mhz"],
        &[&freq_mhz, &ideal_col, &conv_col],
    )
}

fn cmd_g2(a: &G2Args) -> Result<()> {
    let p = a.atom.params()?;
    if !(a.taumax_ns > 0.0 && a.step_ns > 0.0) {
        bail!("taumax and step must be positive");
    }
    let half = (a.taumax_ns / a.step_ns).round() as i64;
    let tau_ns: Vec<f64> = (-half..=half).map(|k| k as f64 * a.step_ns).collect();
    let taus: Vec<f64> = tau_ns.iter().map(|&t| units::ns_to_s(t)).collect();
    let pulse = a.pulse_us * 1e-6;
    // detuned drive: the closed form is evaluated at the generalized Rabi frequency
    let eff = AtomParams::new(p.gamma, p.generalized_rabi(), 0.0)?;
    let analytic = taus.iter().map(|&t| g2_analytic(&eff, t)).collect::<Result<Vec<_>, _>>()?;
    let numeric = g2_numeric(&p, &taus)?;
    let tri: Vec<f64> = taus.iter().map(|&t| triangle_window(t, pulse)).collect();
    let aw: Vec<f64> = analytic.iter().zip(&tri).map(|(g, w)| g * w).collect();
    let nw: Vec<f64> = numeric.iter().zip(&tri).map(|(g, w)| g * w).collect();
    write_csv(
        &a.out,
        &["tau_ns", "g2_analytic", "g2_numeric", "g2_analytic_windowed", "g2_numeric_windowed"],
        &[&tau_ns, &analytic, &numeric, &aw, &nw],
    )
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = SimConfig {
        params: a.atom.params()?,
        pulse_length: a.pulse_us * 1e-6,
        n_trials: a.trials,
        detection_efficiency: a.eta,
        rng_seed: a.seed,
    };
    let stream = simulate_stream(&cfg)?;
    let split = hbt_split(&stream, a.seed ^ SPLIT_SEED_MIX);
    let det = DetectorConfig { dead_time: a.dead_ns * 1e-9, dark_rate: a.dark_cps };
    let records = apply_detectors(&split, &det, a.trials, cfg.pulse_length, a.seed ^ DETECTOR_SEED_MIX)?;
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let header = TimetagHeader { pulse_length: cfg.pulse_length, seed: a.seed, n_trials: Some(a.trials) };
    write_timetag(BufWriter::new(file), &header, &records)?;
    log::info!("{} detections in {} trials", records.len(), a.trials);
    Ok(())
}

fn cmd_correlate(a: &CorrelateArgs) -> Result<()> {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let (header, records) = read_timetag(BufReader::new(file))?;
    let n_trials = header
        .n_trials
        .unwrap_or_else(|| records.iter().map(|r| r.trial_id + 1).max().unwrap_or(0));
    let hist = correlate(
        &records,
        units::ns_to_s(a.bin_ns),
        units::ns_to_s(a.taumax_ns),
        n_trials,
        header.pulse_length,
    )?;
    let zero = hist.zero_bin() as f64;
    let tau_ns: Vec<f64> = (0..hist.counts.len()).map(|i| (i as f64 - zero) * a.bin_ns).collect();
    let counts: Vec<f64> = hist.counts.iter().map(|&c| c as f64).collect();
    let g2 = hist.normalized()?;
    let err = hist.normalized_errors()?;
    write_csv(&a.out, &["tau_ns", "counts", "g2", "g2_err"], &[&tau_ns, &counts, &g2, &err])
}

fn cmd_cross(a: &CrossArgs) -> Result<()> {
    let p = a.atom.params()?;
    let fwhm = mhz_to_angular(a.filter_mhz);
    let w = p.generalized_rabi();
    let cfg = SensorConfig::new([-w, w], fwhm, a.coupling_frac * fwhm)?;
    let sys = build_composite(&p, &cfg)?;
    if !(a.taumax_ns > 0.0 && a.step_ns > 0.0) {
        bail!("taumax and step must be positive");
    }
    let half = (a.taumax_ns / a.step_ns).round() as i64;
    let tau_ns: Vec<f64> = (-half..=half).map(|k| k as f64 * a.step_ns).collect();
    let taus: Vec<f64> = tau_ns.iter().map(|&t| units::ns_to_s(t)).collect();
    let cc = filtered_cross_correlation(&sys, &taus)?;
    write_csv(&a.out, &["tau_ns", "g_cross"], &[&tau_ns, &cc.g])
}

/// Fit result with values rescaled to reporting units.
fn fit_json(model: &str, fit: &FitResult, scales: &[f64], units: &[&str]) -> serde_json::Value {
    let n = fit.values.len();
    let values: Vec<f64> = (0..n).map(|i| fit.values[i] * scales[i]).collect();
    let sigmas: Vec<f64> = (0..n).map(|i| fit.sigmas[i] * scales[i].abs()).collect();
    let cov: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| fit.covariance[i][j] * scales[i] * scales[j]).collect())
        .collect();
    json!({
        "model": model,
        "names": fit.names,
        "values": values,
        "sigmas": sigmas,
        "units": units,
        "reduced_chi2": fit.reduced_chi2,
        "dof": fit.dof,
        "covariance": cov,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "flags": fit.flags,
    })
}

fn dense(x: &[f64]) -> Vec<f64> {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    linspace(lo, hi, 2001)
}

fn write_curve(path: Option<&Path>, names: [&str; 2], x: &[f64], f: impl Fn(f64) -> f64) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let xs = dense(x);
    let ys: Vec<f64> = xs.iter().map(|&v| f(v)).collect();
    write_csv(path, &names, &[&xs, &ys])
}

fn cmd_fit(cmd: FitCommand) -> Result<()> {
    match cmd {
        FitCommand::Spectrum { io, gamma_mhz, cavity_mhz, reflection } => {
            let t = Table::read(&io.input)?;
            let x = t.pick(&["freq_mhz"])?.to_vec();
            let y = t.pick(&["signal", "convolved_per_mhz", "counts"])?.to_vec();
            let err = t.pick(&["signal_err", "counts_err"]).ok().map(<[f64]>::to_vec);
            // homogeneous in frequency units: fit directly in MHz
            let cfg = SpectrumFitConfig { gamma: gamma_mhz, cavity_fwhm: cavity_mhz, reflection_fraction: reflection };
            let fit = fit_spectrum(&DataSeries::new(x.clone(), y, err)?, &cfg)?;
            write_jsonl(&io.out, &[fit_json("spectrum", &fit, &[1.0; 3], &["MHz", "signal*MHz", "signal"])])?;
            let v = fit.values.clone();
            write_curve(io.curve.as_deref(), ["freq_mhz", "model"], &x, |f| {
                v[1] * measured_triplet(&cfg, v[0], f) + v[2]
            })
        }
        FitCommand::G2 { io, gamma_mhz, pulse_us } => {
            let t = Table::read(&io.input)?;
            let x = t.pick(&["tau_ns"])?.to_vec();
            let y = t.pick(&["g2"])?.to_vec();
            let err = match t.pick(&["g2_err"]) {
                Ok(e) => Some(e.to_vec()),
                Err(_) => t.column("counts").map(|c| poisson_errors(c, &y)).transpose()?,
            };
            // time in ns, rates in rad/ns
            let cfg = G2FitConfig { gamma: 2.0 * PI * gamma_mhz * 1e-3, pulse_length: pulse_us * 1e3 };
            let fit = fit_g2(&DataSeries::new(x.clone(), y, err)?, &cfg)?;
            let to_mhz = 1e3 / (2.0 * PI);
            write_jsonl(&io.out, &[fit_json("g2", &fit, &[to_mhz, 1.0], &["MHz", "1"])])?;
            let v = fit.values.clone();
            write_curve(io.curve.as_deref(), ["tau_ns", "model"], &x, |tau| g2_model(&cfg, v[0], v[1], tau))
        }
        FitCommand::Saturation { io, gamma_mhz } => {
            let t = Table::read(&io.input)?;
            let x = t.pick(&["power_pw"])?.to_vec();
            let y = t.pick(&["rate_cps"])?.to_vec();
            let err = t.pick(&["rate_err"]).ok().map(<[f64]>::to_vec);
            let cfg = SaturationFitConfig { gamma: mhz_to_angular(gamma_mhz) };
            let fit = fit_saturation(&DataSeries::new(x.clone(), y, err)?, &cfg)?;
            write_jsonl(&io.out, &[fit_json("saturation", &fit, &[1.0, 1.0], &["pW", "1"])])?;
            let (psat, eta, g) = (fit.values[0], fit.values[1], cfg.gamma);
            write_curve(io.curve.as_deref(), ["power_pw", "model_cps"], &x, |p| 0.5 * eta * g * p / (p + psat))
        }
        FitCommand::Twoexp { io } => {
            let t = Table::read(&io.input)?;
            let x = t.pick(&["tau_ns"])?.to_vec();
            let y = t.pick(&["g_cross", "g"])?.to_vec();
            let fit = fit_two_exponentials(&mollow_core::filtered::CrossCorrelation { tau: x.clone(), g: y })?;
            let mut obj = fit_json("twoexp", &fit.fit, &[1.0; 4], &["1", "1", "ns", "ns"]);
            obj["tau_peak_ns"] = json!(fit.tau_peak);
            write_jsonl(&io.out, &[obj])?;
            let (tp, v) = (fit.tau_peak, fit.fit.values.clone());
            write_curve(io.curve.as_deref(), ["tau_ns", "model"], &x, |tau| two_exponential(tau, tp, &v))
        }
    }
}

/// `√counts` errors mapped through the histogram normalization `g2 = counts/norm`.
fn poisson_errors(counts: &[f64], g2: &[f64]) -> Result<Vec<f64>> {
    let (sc, sg): (f64, f64) = counts.iter().zip(g2).fold((0.0, 0.0), |a, (c, g)| (a.0 + c, a.1 + g));
    if !(sc > 0.0 && sg > 0.0) {
        bail!("cannot infer histogram normalization from an empty histogram");
    }
    let norm = sc / sg;
    Ok(counts.iter().map(|&c| c.max(1.0).sqrt() / norm).collect())
}
