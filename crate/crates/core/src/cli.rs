use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymmetry;
use crate::bounds::{self, BoundPreset, PriorDistribution};
use crate::error::{Error, Result};
use crate::estimator::{self, scheme, FitKind, PointEstimate, Policy, ScanConfig, SimulationConfig};
use crate::grammar::{GeneratorSpec, StateSpec};
use crate::output;
use crate::spectra::EigenvalueSummary;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_PRESET: i32 = 4;
pub const EXIT_SAMPLES: i32 = 5;

/// Entropic bounds and Monte Carlo simulation for phase-shift estimation.
///
/// Entropies are in nats unless --bits is given. Exit codes: 0 success,
/// 1 numerical failure, 2 bad flags or spec, 3 dimension mismatch,
/// 4 unknown preset, 5 too few trials for the requested information bins.
#[derive(Debug, Parser)]
#[command(name = "phasebound", version)]
pub struct Cli {
    /// Worker threads for Monte Carlo trials (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Report entropies and information in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// G-asymmetry, generator entropy and variance of a probe state.
    Asymmetry(AsymmetryArgs),
    /// Closed-form lower bounds for a preset scheme.
    Bounds(BoundsArgs),
    /// Monte Carlo simulation of an iterative scheme.
    Simulate(SimulateArgs),
    /// Simulate a range of K and fit the error scaling.
    Scan(ScanArgs),
    /// Canonical phase measurement on 2^K equally weighted eigenvalues.
    Canonical(CanonicalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymmetryArgs {
    /// State spec, e.g. ghz:4, plus_product:3, coherent:4,cutoff=40, minmax, or @file.json.
    #[arg(long)]
    pub state: String,
    /// Generator spec, e.g. jz:4, jz_pow:4,2, roy_h:3, number_fn:40,2, sum:jz:1+jz:2, or @file.json.
    #[arg(long)]
    pub generator: String,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutputFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    /// linear_multipass, quadratic_iterative, power_q_iterative, roy_iterative,
    /// qubit_universal or optical_universal.
    #[arg(long)]
    pub preset: String,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<u32>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<u32>,
    /// Power for power_q_iterative.
    #[arg(long)]
    pub q: Option<u32>,
    /// Qubit count for qubit_universal.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub modes: Option<u32>,
    #[arg(long = "meanN")]
    #[serde(rename = "meanN")]
    pub mean_n: Option<f64>,
    /// uniform, gauss:<sigma>[,<mean>], or @file.json.
    #[arg(long, default_value = "uniform")]
    pub prior: String,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Adaptive,
    Slope,
    Nonadaptive,
    Bitwise,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Adaptive => Policy::Adaptive,
            PolicyArg::Slope => Policy::Slope,
            PolicyArg::Nonadaptive => Policy::Nonadaptive,
            PolicyArg::Bitwise => Policy::Bitwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateArg {
    Mean,
    Map,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// linear_multipass, quadratic_iterative, power_q_iterative, roy_iterative or none.
    #[arg(long)]
    pub preset: String,
    #[arg(long = "K", default_value_t = 1)]
    #[serde(rename = "K")]
    pub k: u32,
    #[arg(long = "M", default_value_t = 1)]
    #[serde(rename = "M")]
    pub m: u32,
    /// Power for power_q_iterative.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "adaptive")]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value = "mean")]
    pub estimate: EstimateArg,
    /// Posterior grid size, a power of two (default: 2^14, or larger if the
    /// largest gap needs it).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Histogram bins per axis for the mutual-information estimate; needs
    /// at least 10·bins² trials.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value = "uniform")]
    pub prior: String,
    /// Per-trial CSV with columns trial,phi,phi_hat,wrapped_error,n_outcomes.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// A simulate preset, or canonical for the exact canonical measurement.
    #[arg(long)]
    pub preset: String,
    /// Inclusive range a..b.
    #[arg(long = "K-range")]
    #[serde(rename = "K_range")]
    pub k_range: String,
    #[arg(long = "M", default_value_t = 1)]
    #[serde(rename = "M")]
    pub m: u32,
    /// Power for power_q_iterative.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// power, exp or exp-sqrt (default: the form the preset's bound predicts).
    #[arg(long)]
    pub fit: Option<String>,
    #[arg(long, value_enum, default_value = "adaptive")]
    pub policy: PolicyArg,
    /// Posterior grid size, a power of two (default: chosen per K).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value = "uniform")]
    pub prior: String,
    /// One row per K with columns
    /// bits,qubits,passes,epsilon,epsilon_se,holevo_variance,error_lower,closed_form.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CanonicalArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: u32,
    #[arg(long, default_value_t = 10000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value = "uniform")]
    pub prior: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DimensionMismatch { .. } | Error::BasisMismatch { .. } => EXIT_DIMENSION,
        Error::UnknownPreset(_) => EXIT_PRESET,
        Error::InsufficientSamples { .. } => EXIT_SAMPLES,
        Error::NoConvergence { .. } | Error::NegativeEigenvalue { .. } | Error::NotUnitary { .. } => EXIT_RUNTIME,
        _ => EXIT_USAGE,
    }
}

pub fn parse_prior(text: &str) -> Result<PriorDistribution> {
    let p = if text == "uniform" {
        PriorDistribution::Uniform2Pi
    } else if let Some(rest) = text.strip_prefix("gauss:") {
        let mut parts = rest.split(',');
        let num = |v: Option<&str>, name: &str| -> Result<f64> {
            v.ok_or_else(|| Error::InvalidValue(format!("prior: missing {name}")))?
                .trim()
                .parse()
                .map_err(|_| Error::InvalidValue(format!("prior: {name} is not a number")))
        };
        let sigma = num(parts.next(), "sigma")?;
        let mean = match parts.next() {
            Some(m) => num(Some(m), "mean")?,
            None => 0.0,
        };
        PriorDistribution::WrappedGaussian { mean, sigma }
    } else if let Some(path) = text.strip_prefix('@') {
        let s = std::fs::read_to_string(path).map_err(|e| Error::InvalidValue(format!("prior {path}: {e}")))?;
        serde_json::from_str(&s).map_err(|e| Error::InvalidValue(format!("prior {path}: {e}")))?
    } else {
        return Err(Error::InvalidValue(format!(
            "prior: '{text}' is not uniform, gauss:<sigma>[,<mean>] or @file.json"
        )));
    };
    p.validate()?;
    Ok(p)
}

fn parse_range(text: &str) -> Result<Vec<u32>> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| Error::InvalidValue(format!("K-range: '{text}' is not a..b")))?;
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|_| Error::InvalidValue(format!("K-range: '{a}'")))?;
    let b: u32 = b
        .trim()
        .parse()
        .map_err(|_| Error::InvalidValue(format!("K-range: '{b}'")))?;
    if a > b {
        return Err(Error::InvalidValue(format!("K-range: {a} > {b}")));
    }
    Ok((a..=b).collect())
}

#[derive(Debug, Serialize)]
pub struct AsymmetryReport {
    pub dimension: usize,
    pub generator: String,
    pub asymmetry: f64,
    pub generator_entropy: f64,
    pub state_entropy: f64,
    pub generator_rms: f64,
    pub distinct_eigenvalues: usize,
    pub spectrum: EigenvalueSummary,
    /// Error bound for a uniformly random shift.
    pub error_lower_uniform: f64,
    pub local_precision_lower: Option<f64>,
}

const ENTROPY_KEYS: [&str; 9] = [
    "asymmetry",
    "generator_entropy",
    "state_entropy",
    "prior_entropy",
    "mi_upper_asymmetry",
    "mi_upper_entropy",
    "mutual_information",
    "rate_distortion_floor",
    "information",
];

struct Output {
    json: serde_json::Value,
    text: Option<String>,
}

fn finish<C: Serialize, R: Serialize>(command: &str, config: &C, report: &R, bits: bool) -> Result<serde_json::Value> {
    let mut v = output::envelope(command, config, report).map_err(|e| Error::InvalidValue(e.to_string()))?;
    if bits {
        if let Some(r) = v.get_mut("report") {
            output::to_bits(r, &ENTROPY_KEYS);
        }
    }
    v.as_object_mut().expect("envelope is an object").insert(
        "units".into(),
        serde_json::Value::from(if bits { "bits" } else { "nats" }),
    );
    Ok(v)
}

fn cmd_asymmetry(a: &AsymmetryArgs, bits: bool) -> Result<Output> {
    let g = GeneratorSpec::parse(&a.generator)?.build()?;
    let probe = StateSpec::parse(&a.state)?.build(Some(&g))?;
    let asym = asymmetry::g_asymmetry(&probe, &g)?;
    let h = asymmetry::generator_entropy(&probe, &g)?;
    let s = asymmetry::probe_entropy(&probe)?;
    let rms = asymmetry::generator_variance(&probe, &g)?;
    let spectrum = g.summarize();
    let report = AsymmetryReport {
        dimension: g.dim(),
        generator: g.description().to_string(),
        asymmetry: asym,
        generator_entropy: h,
        state_entropy: s,
        generator_rms: rms,
        distinct_eigenvalues: spectrum.distinct_count,
        error_lower_uniform: bounds::error_lower_bound(asym, &PriorDistribution::Uniform2Pi),
        local_precision_lower: bounds::local_precision_lower(rms).ok(),
        spectrum,
    };
    let json = finish("asymmetry", a, &report, bits)?;
    let unit = if bits { "bits" } else { "nats" };
    let scale = if bits { std::f64::consts::LN_2.recip() } else { 1.0 };
    let text = format!(
        "A_G = {:.6} {unit}\nH(G|rho) = {:.6} {unit}\nS(rho) = {:.6} {unit}\nDelta G = {:.6}\ndistinct eigenvalues = {}\n",
        asym * scale,
        h * scale,
        s * scale,
        rms,
        report.distinct_eigenvalues
    );
    Ok(Output { json, text: Some(text) })
}

fn required<T: Copy>(v: Option<T>, name: &str, preset: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidValue(format!("--{name} is required for preset {preset}")))
}

#[derive(Serialize)]
struct BoundsOutput {
    #[serde(flatten)]
    bound: bounds::BoundReport,
    rate_distortion_floor: f64,
}

fn cmd_bounds(a: &BoundsArgs, bits: bool) -> Result<Output> {
    let prior = parse_prior(&a.prior)?;
    let preset = match a.preset.as_str() {
        "qubit_universal" => BoundPreset::QubitUniversal {
            qubits: required(a.n, "n", &a.preset)?,
        },
        "optical_universal" => BoundPreset::OpticalUniversal {
            modes: required(a.modes, "modes", &a.preset)?,
            mean_photons: required(a.mean_n, "meanN", &a.preset)?,
        },
        "none" => return Err(Error::UnknownPreset(a.preset.clone())),
        name => {
            if !scheme::PRESETS.contains(&name) {
                return Err(Error::UnknownPreset(name.to_string()));
            }
            let k = required(a.k, "K", name)?;
            let m = required(a.m, "M", name)?;
            BoundPreset::Scheme(scheme::preset(name, k, m, a.q)?)
        }
    };
    let bound = bounds::scheme_bound(&preset, &prior)?;
    let text = {
        let mut t = format!("preset {}\nerror_lower = {:.6e}\n", bound.preset, bound.error_lower);
        for c in &bound.closed_forms {
            t.push_str(&format!("{} = {:.6e}    {}\n", c.name, c.value, c.formula));
        }
        t
    };
    let out = BoundsOutput {
        rate_distortion_floor: bounds::rate_distortion_floor(&prior, bound.error_lower)?,
        bound,
    };
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a BoundsArgs,
        resolved_prior: &'a PriorDistribution,
    }
    let json = finish(
        "bounds",
        &Config {
            args: a,
            resolved_prior: &prior,
        },
        &out,
        bits,
    )?;
    Ok(Output { json, text: Some(text) })
}

#[derive(Serialize)]
struct CsvTrial {
    trial: usize,
    phi: f64,
    phi_hat: f64,
    wrapped_error: f64,
    n_outcomes: usize,
}

fn write_csv<T: Serialize>(path: &PathBuf, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidValue(format!("csv {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidValue(format!("csv {}: {e}", path.display())))?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, bits: bool, threads: usize) -> Result<Output> {
    let prior = parse_prior(&a.prior)?;
    let spec = scheme::preset(&a.preset, a.k, a.m, a.q)?;
    let cfg = SimulationConfig {
        trials: a.trials,
        seed: a.seed,
        policy: a.policy.into(),
        estimate: match a.estimate {
            EstimateArg::Mean => PointEstimate::CircularMean,
            EstimateArg::Map => PointEstimate::Map,
        },
        grid: a.grid,
        mi_bins: a.bins,
        detailed_records: false,
    };
    let (report, records) = estimator::simulate(&spec, &prior, &cfg)?;
    if let Some(path) = &a.csv {
        write_csv(
            path,
            records.iter().map(|r| CsvTrial {
                trial: r.trial,
                phi: output::round_sig(r.phi),
                phi_hat: output::round_sig(r.phi_hat),
                wrapped_error: output::round_sig(r.wrapped_error),
                n_outcomes: r.n_outcomes,
            }),
        )?;
    }
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a SimulateArgs,
        threads: usize,
        resolved_grid: usize,
        resolved_prior: &'a PriorDistribution,
        scheme: &'a scheme::SchemeSpec,
    }
    let json = finish(
        "simulate",
        &Config {
            args: a,
            threads,
            resolved_grid: report.grid,
            resolved_prior: &prior,
            scheme: &spec,
        },
        &report,
        bits,
    )?;
    Ok(Output { json, text: None })
}

#[derive(Serialize)]
struct CsvScanRow {
    bits: u32,
    qubits: u64,
    passes: u64,
    epsilon: f64,
    epsilon_se: f64,
    holevo_variance: f64,
    error_lower: f64,
    closed_form: Option<f64>,
}

fn cmd_scan(a: &ScanArgs, bits: bool, threads: usize) -> Result<Output> {
    let prior = parse_prior(&a.prior)?;
    let ks = parse_range(&a.k_range)?;
    if a.preset != "canonical" && !scheme::PRESETS.contains(&a.preset.as_str()) {
        return Err(Error::UnknownPreset(a.preset.clone()));
    }
    let fit: FitKind = match &a.fit {
        Some(f) => f.parse()?,
        None if a.preset == "canonical" => FitKind::Exp,
        None => FitKind::for_preset(&a.preset),
    };
    let cfg = ScanConfig {
        preset: a.preset.clone(),
        power: a.q,
        bits: ks,
        copies: a.m,
        fit,
        sim: SimulationConfig {
            trials: a.trials,
            seed: a.seed,
            policy: a.policy.into(),
            grid: a.grid,
            ..Default::default()
        },
    };
    let report = estimator::scaling_scan(&cfg, &prior)?;
    if let Some(path) = &a.csv {
        write_csv(
            path,
            report.points.iter().map(|p| CsvScanRow {
                bits: p.bits,
                qubits: p.qubits,
                passes: p.passes,
                epsilon: output::round_sig(p.epsilon.value),
                epsilon_se: output::round_sig(p.epsilon.se),
                holevo_variance: output::round_sig(p.holevo_variance.value),
                error_lower: output::round_sig(p.error_lower),
                closed_form: p.closed_form.map(output::round_sig),
            }),
        )?;
    }
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a ScanArgs,
        threads: usize,
        resolved: &'a ScanConfig,
        resolved_prior: &'a PriorDistribution,
    }
    let json = finish(
        "scan",
        &Config {
            args: a,
            threads,
            resolved: &cfg,
            resolved_prior: &prior,
        },
        &report,
        bits,
    )?;
    Ok(Output { json, text: None })
}

fn cmd_canonical(a: &CanonicalArgs, bits: bool, threads: usize) -> Result<Output> {
    let prior = parse_prior(&a.prior)?;
    let report = estimator::canonical_sample(a.k, &prior, a.trials, a.seed, a.bins)?;
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        args: &'a CanonicalArgs,
        threads: usize,
        resolved_prior: &'a PriorDistribution,
    }
    let json = finish(
        "canonical",
        &Config {
            args: a,
            threads,
            resolved_prior: &prior,
        },
        &report,
        bits,
    )?;
    Ok(Output { json, text: None })
}

/// Runs one command, writing the result to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    let result = match &cli.command {
        Command::Asymmetry(a) => cmd_asymmetry(a, cli.bits).map(|o| (o, a.out)),
        Command::Bounds(a) => cmd_bounds(a, cli.bits).map(|o| (o, a.out)),
        Command::Simulate(a) => cmd_simulate(a, cli.bits, threads).map(|o| (o, OutputFormat::Json)),
        Command::Scan(a) => cmd_scan(a, cli.bits, threads).map(|o| (o, OutputFormat::Json)),
        Command::Canonical(a) => cmd_canonical(a, cli.bits, threads).map(|o| (o, OutputFormat::Json)),
    };
    match result {
        Ok((o, format)) => {
            let text = match (format, o.text) {
                (OutputFormat::Text, Some(t)) => t,
                _ => output::to_pretty(&o.json) + "\n",
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_RUNTIME;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs; usage errors exit 2.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    run(&cli, out, err)
}
