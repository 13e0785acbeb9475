// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! `dissipator-lab` command line: certification runs, spectra, trajectories
//! and the `Δ` witnesses.
//!
//! Every subcommand accepts `--config <file.toml>`, a flat table whose keys
//! are the long flag names (`n-levels = 8`, `omega-c = 1.0`, ...). Flags given
//! on the command line override the file.
//!
//! Exit codes: 0 success / all properties pass, 1 a property failed,
//! 2 configuration error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dissipator::{dissipator_matrix, kernel_basis, spectrum_of, DissipatorKind, DEFAULT_KERNEL_TOL};
use crate::error::{LabError, Result};
use crate::evolution::{evolve, IntegratorConfig, Method, Observables};
use crate::fock::{LadderOps, Spin, SystemOperator, TruncationConfig};
use crate::hamiltonian::{LiouvillianSpec, PhysicalParams, PumpingProfile};
use crate::hs::{random_density, standard_hermitian_basis, HermitianPoint};
use crate::verification::{
    check_delta_witnesses, delta_witness_values, run_full_certification, DeltaWitnessValues, MatrixRecord,
    PropertyReport, SampleCounts, DEFAULT_LEVELS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the rayon worker count.
pub const THREADS_ENV: &str = "DISSIPATOR_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dissipator-lab", version, about = "Certify and simulate truncated Jaynes-Cummings dissipators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every property check and write a JSON report.
    Verify(VerifyArgs),
    /// Eigenvalues of a dissipator superoperator (CSV) and a JSON summary.
    Spectrum(SpectrumArgs),
    /// Integrate the master equation and write observables as CSV.
    Evolve(EvolveArgs),
    /// Write the Δ asymmetry and positivity witnesses as JSON.
    Witness(WitnessArgs),
}

fn parse_levels(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Comma-separated truncations [default: 2,4,8,16].
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "deserialize_levels")]
    pub n_levels: Option<Vec<usize>>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples per random check [default: 1000, 500 for closed forms].
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SpectrumArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// full | delta [default: full]
    #[arg(long)]
    pub dissipator: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EvolveArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub omega_c: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub omega_a: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    pub p: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// none | cavity | atom | scalar [default: none]
    #[arg(long)]
    pub pumping: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub drive_amp: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    pub drive_freq: Option<f64>,
    /// full | delta [default: full]
    #[arg(long)]
    pub dissipator: Option<String>,
    /// vacuum | fock:<n>[:+|:-] | random:<seed> [default: vacuum]
    #[arg(long)]
    pub initial: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// [default: 0.001]
    #[arg(long)]
    pub step: Option<f64>,
    /// rk4 | expm [default: rk4]
    #[arg(long)]
    pub method: Option<String>,
    /// Record every k-th step [default: 1].
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run metadata [default: <out> with extension .json].
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    /// Comma-separated times at which to dump the full state.
    #[arg(long, value_delimiter = ',')]
    pub dump_times: Option<Vec<f64>>,
    /// State dump file [default: <out> with extension .states.json].
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct WitnessArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_levels: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Levels may be given in a config file as an array or a comma string.
#[derive(Deserialize)]
#[serde(untagged)]
enum LevelsValue {
    List(Vec<usize>),
    Text(String),
}

fn deserialize_levels<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<usize>>, D::Error> {
    match LevelsValue::deserialize(d)? {
        LevelsValue::List(v) => Ok(Some(v)),
        LevelsValue::Text(s) => parse_levels(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| LabError::config(format!("config {}: {}", path.display(), e.message())))
}

macro_rules! overlay {
    ($flags:expr, $file:expr, [$($field:ident),* $(,)?]) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.take(); } )*
    };
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| LabError::config(format!("missing --{flag}")))
}

fn truncation(n: Option<usize>) -> Result<TruncationConfig> {
    TruncationConfig::new(required(n, "n-levels")?)
}

fn dissipator_kind(s: Option<&str>) -> Result<DissipatorKind> {
    s.unwrap_or("full").parse()
}

/// Writes `bytes` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| LabError::Io(e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

/// Parses `vacuum`, `fock:<n>` (optionally `fock:<n>:-` for the lower spin
/// state) or `random:<seed>`.
pub fn parse_initial(s: &str, cfg: TruncationConfig) -> Result<HermitianPoint> {
    let fock = |n: usize, spin: Spin| -> Result<HermitianPoint> {
        HermitianPoint::from_operator(&SystemOperator::projector(cfg, n, spin)?)
    };
    if s == "vacuum" {
        return fock(0, Spin::Up);
    }
    if let Some(rest) = s.strip_prefix("fock:") {
        let (level, spin) = match rest.split_once(':') {
            None => (rest, Spin::Up),
            Some((l, "+")) => (l, Spin::Up),
            Some((l, "-")) => (l, Spin::Down),
            Some((_, other)) => return Err(LabError::config(format!("bad spin {other:?} in --initial"))),
        };
        let n = level
            .parse::<usize>()
            .map_err(|e| LabError::config(format!("bad level in --initial {s:?}: {e}")))?;
        return fock(n, spin);
    }
    if let Some(seed) = s.strip_prefix("random:") {
        let seed = seed
            .parse::<u64>()
            .map_err(|e| LabError::config(format!("bad seed in --initial {s:?}: {e}")))?;
        return Ok(random_density(cfg.system_dim(), seed));
    }
    Err(LabError::config(format!(
        "unknown --initial {s:?} (expected vacuum, fock:<n> or random:<seed>)"
    )))
}

pub fn cmd_verify(mut args: VerifyArgs) -> Result<i32> {
    let mut file: VerifyArgs = load_config(args.config.as_deref())?;
    overlay!(args, file, [n_levels, seed, samples, out]);
    let out = required(args.out, "out")?;
    let levels = args.n_levels.unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    if levels.is_empty() {
        return Err(LabError::config("--n-levels is empty"));
    }
    let seed = args.seed.unwrap_or(0);
    let counts = match args.samples {
        Some(0) => return Err(LabError::config("--samples must be at least 1")),
        Some(n) => SampleCounts {
            symmetry: n,
            nonpositivity: n,
            closed_form: n,
            trace: n,
        },
        None => SampleCounts::default(),
    };
    let summary = run_full_certification(&levels, seed, counts)?;
    write_json(&out, &summary)?;
    for r in &summary.reports {
        eprintln!(
            "N={:<3} {:<28} {} max_violation={:e} threshold={:e}",
            r.truncation,
            r.property_id,
            if r.passed() { "pass" } else { "FAIL" },
            r.max_violation,
            r.threshold
        );
    }
    Ok(if summary.all_pass { EXIT_OK } else { EXIT_PROPERTY_FAILURE })
}

#[derive(Serialize)]
struct SpectrumSummary {
    n_levels: usize,
    dissipator: DissipatorKind,
    superoperator_dim: usize,
    zero_threshold: f64,
    zero_eigenvalue_count: usize,
    spectral_gap: Option<f64>,
    max_real_part: f64,
    symmetrized_max_eigenvalue: f64,
    transpose_residual: f64,
    kernel_tol: f64,
    kernel_dimension: usize,
}

pub fn cmd_spectrum(mut args: SpectrumArgs) -> Result<i32> {
    let mut file: SpectrumArgs = load_config(args.config.as_deref())?;
    overlay!(args, file, [n_levels, dissipator, out, summary]);
    let cfg = truncation(args.n_levels)?;
    let kind = dissipator_kind(args.dissipator.as_deref())?;
    let out = required(args.out, "out")?;
    let summary_path = required(args.summary, "summary")?;

    let basis = Arc::new(standard_hermitian_basis(cfg.system_dim())?);
    let m = dissipator_matrix(kind, &LadderOps::new(cfg), &basis)?;
    let spectrum = spectrum_of(&m)?;
    let kernel = kernel_basis(&m, DEFAULT_KERNEL_TOL)?;

    let mut csv = String::from("index,re,im\n");
    for (i, z) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(csv, "{i},{},{}", fmt_f64(z.re), fmt_f64(z.im)).expect("writing to a String");
    }
    write_atomic(&out, csv.as_bytes())?;
    write_json(
        &summary_path,
        &SpectrumSummary {
            n_levels: cfg.n_levels(),
            dissipator: kind,
            superoperator_dim: basis.len(),
            zero_threshold: spectrum.zero_threshold,
            zero_eigenvalue_count: spectrum.zero_count,
            spectral_gap: spectrum.spectral_gap,
            max_real_part: spectrum.max_real_part,
            symmetrized_max_eigenvalue: spectrum.symmetrized_max,
            transpose_residual: spectrum.transpose_residual,
            kernel_tol: DEFAULT_KERNEL_TOL,
            kernel_dimension: kernel.len(),
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PumpingRecord {
    name: &'static str,
    amplitude: f64,
    frequency: f64,
}

#[derive(Serialize)]
struct ModelRecord {
    n_levels: usize,
    params: PhysicalParams,
    pumping: PumpingRecord,
    dissipator: DissipatorKind,
}

#[derive(Serialize)]
struct EvolveMetadata {
    model: ModelRecord,
    integrator: IntegratorConfig,
    initial: String,
    n_steps: usize,
    effective_step: f64,
    recorded_rows: usize,
    max_hermiticity_residual: f64,
    initial_observables: Observables,
    final_observables: Observables,
    csv_columns: [&'static str; 7],
}

#[derive(Serialize)]
struct StateDump {
    requested_time: f64,
    time: f64,
    state: MatrixRecord,
}

const TRAJECTORY_COLUMNS: [&str; 7] = [
    "t",
    "trace",
    "purity",
    "hs_norm",
    "photon_number",
    "inversion",
    "min_eigenvalue",
];

pub fn cmd_evolve(mut args: EvolveArgs) -> Result<i32> {
    let mut file: EvolveArgs = load_config(args.config.as_deref())?;
    overlay!(
        args,
        file,
        [
            n_levels, omega_c, omega_a, p, gamma, pumping, drive_amp, drive_freq, dissipator, initial, t_start,
            t_end, step, method, record_every, out, metadata, dump_times, dump,
        ]
    );
    let cfg = truncation(args.n_levels)?;
    let params = PhysicalParams::new(
        args.omega_c.unwrap_or(1.0),
        args.omega_a.unwrap_or(1.0),
        args.p.unwrap_or(0.0),
        args.gamma.unwrap_or(1.0),
    )?;
    let amplitude = args.drive_amp.unwrap_or(0.0);
    let frequency = args.drive_freq.unwrap_or(0.0);
    let pumping_name = args.pumping.unwrap_or_else(|| "none".to_owned());
    let pumping = PumpingProfile::from_name(&pumping_name, amplitude, frequency)?;
    let kind = dissipator_kind(args.dissipator.as_deref())?;
    let initial = args.initial.unwrap_or_else(|| "vacuum".to_owned());
    let rho0 = parse_initial(&initial, cfg)?;
    let step = args.step.unwrap_or(1e-3);
    let method = match args.method.as_deref().unwrap_or("rk4") {
        "rk4" => Method::Rk4 { step },
        "expm" => Method::Expm { step },
        other => return Err(LabError::config(format!("unknown --method {other:?} (expected rk4 or expm)"))),
    };
    let integrator = IntegratorConfig {
        method,
        t_start: args.t_start.unwrap_or(0.0),
        t_end: required(args.t_end, "t-end")?,
        record_every: args.record_every.unwrap_or(1),
    };
    integrator.validate()?;
    let out = required(args.out, "out")?;
    let metadata_path = args.metadata.unwrap_or_else(|| with_extension(&out, "json"));
    let dump_times = args.dump_times.unwrap_or_default();
    if dump_times.iter().any(|t| !t.is_finite()) {
        return Err(LabError::config("--dump-times must be finite"));
    }

    let spec = LiouvillianSpec::new(params, pumping, kind, cfg);
    let traj = evolve(&spec, &rho0, &integrator)?;
    let (n_steps, effective_step) = integrator.schedule();

    let mut csv = TRAJECTORY_COLUMNS.join(",");
    csv.push('\n');
    for (t, o) in traj.times.iter().zip(&traj.observables) {
        let fields = [*t, o.trace, o.purity, o.hs_norm, o.photon_number, o.inversion, o.min_eigenvalue];
        let row: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_atomic(&out, csv.as_bytes())?;

    if !dump_times.is_empty() {
        let dumps: Vec<StateDump> = dump_times
            .iter()
            .map(|&req| {
                let idx = nearest_index(&traj.times, req);
                StateDump {
                    requested_time: req,
                    time: traj.times[idx],
                    state: MatrixRecord::from(&traj.states[idx]),
                }
            })
            .collect();
        let dump_path = args.dump.unwrap_or_else(|| with_extension(&out, "states.json"));
        write_json(&dump_path, &dumps)?;
    }

    let metadata = EvolveMetadata {
        model: ModelRecord {
            n_levels: cfg.n_levels(),
            params,
            pumping: PumpingRecord {
                name: spec.pumping().name(),
                amplitude,
                frequency,
            },
            dissipator: kind,
        },
        integrator,
        initial,
        n_steps,
        effective_step,
        recorded_rows: traj.len(),
        max_hermiticity_residual: traj.max_hermiticity_residual(),
        initial_observables: traj.observables[0],
        final_observables: *traj.observables.last().expect("trajectory is never empty"),
        csv_columns: TRAJECTORY_COLUMNS,
    };
    write_json(&metadata_path, &metadata)?;
    Ok(EXIT_OK)
}

fn nearest_index(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (i, &s) in times.iter().enumerate() {
        if (s - t).abs() < (times[best] - t).abs() {
            best = i;
        }
    }
    best
}

#[derive(Serialize)]
struct WitnessOutput {
    n_levels: usize,
    values: DeltaWitnessValues,
    report: PropertyReport,
}

pub fn cmd_witness(mut args: WitnessArgs) -> Result<i32> {
    let mut file: WitnessArgs = load_config(args.config.as_deref())?;
    overlay!(args, file, [n_levels, out]);
    let cfg = truncation(args.n_levels)?;
    let out = required(args.out, "out")?;
    let report = check_delta_witnesses(cfg)?;
    let passed = report.passed();
    write_json(
        &out,
        &WitnessOutput {
            n_levels: cfg.n_levels(),
            values: delta_witness_values(cfg)?,
            report,
        },
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_PROPERTY_FAILURE })
}

pub fn exit_code_for(err: &LabError) -> i32 {
    match err {
        LabError::Numerical(_) | LabError::Instability { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Installs the global rayon pool according to [`THREADS_ENV`].
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<i32> {
    configure_threads()?;
    match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Witness(a) => cmd_witness(a),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
