//! Batch driver behind the `pwdual` binary.
//!
//! A run is described by a [`RunConfig`], read from a TOML file and then
//! overridden by command-line flags. Exit codes: 0 success, 1 usage or
//! configuration error, 2 numerical failure in strict mode, 3 verification
//! failure.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_suite_with_matrices, factorize, BoundMethod, BoundOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{CoefficientMatrices, SystemSpec};
use crate::io::{
    dump_coefficients, row_key, size_label, write_csv, write_json, BoundRow, FactorDump,
    ResourceRow, TelemetryRow,
};
use crate::oracle::{check_all, soundness_grid};
use crate::resources::{estimate_for_spec, StepOptions, SynthesisModel};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "PWDUAL_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Build,
    Bounds,
    Resources,
    Verify,
    Sweep,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// CSV destination; standard output when absent.
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    /// Timing and memory columns, kept apart from the reproducible CSV.
    pub telemetry: Option<PathBuf>,
    /// Directory for matrix and factor dumps of `build`.
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub eta: Vec<usize>,
    pub sides: Vec<Vec<usize>>,
    pub wigner_seitz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub max_modes: usize,
    pub wigner_seitz: Vec<f64>,
    pub times: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_modes: 12,
            wigner_seitz: vec![1.0, 5.0, 10.0],
            times: vec![0.01, 0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub system: SystemSpec,
    pub methods: Vec<BoundMethod>,
    /// Energy error target per electron, in milli-Hartree.
    pub mha_per_electron: f64,
    /// Exit with status 2 when any row fails numerically.
    pub strict: bool,
    pub threads: Option<usize>,
    pub bounds: BoundOptions,
    pub step: StepOptions,
    pub synthesis: SynthesisModel,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            system: SystemSpec::jellium(&[8, 8], 49, 5.0),
            methods: BoundMethod::ALL.to_vec(),
            mha_per_electron: 1.0,
            strict: false,
            threads: None,
            bounds: BoundOptions::default(),
            step: StepOptions::default(),
            synthesis: SynthesisModel::default(),
            output: OutputConfig::default(),
            sweep: SweepConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_none() {
            return Err(Error::Config("no command given".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("empty method list".into()));
        }
        if !(self.mha_per_electron > 0.0) {
            return Err(Error::Config("mha_per_electron must be positive".into()));
        }
        if !(self.synthesis.a > 0.0 && self.synthesis.b >= 0.0) {
            return Err(Error::Config("synthesis model needs a > 0 and b ≥ 0".into()));
        }
        if self.command == Some(Command::Sweep) {
            if self.sweep.eta.is_empty() && self.sweep.sides.is_empty() && self.sweep.wigner_seitz.is_empty() {
                return Err(Error::Config("sweep needs at least one axis".into()));
            }
            for spec in self.sweep_specs() {
                spec.validate()?;
            }
        } else if self.command != Some(Command::Verify) {
            self.system.validate()?;
        }
        Ok(())
    }

    /// Cross product of the sweep axes; empty axes fall back to the system.
    pub fn sweep_specs(&self) -> Vec<SystemSpec> {
        let sides = if self.sweep.sides.is_empty() {
            vec![self.system.sides.clone()]
        } else {
            self.sweep.sides.clone()
        };
        let radii = if self.sweep.wigner_seitz.is_empty() {
            vec![self.system.wigner_seitz]
        } else {
            self.sweep.wigner_seitz.clone()
        };
        let etas = if self.sweep.eta.is_empty() {
            vec![self.system.eta]
        } else {
            self.sweep.eta.clone()
        };
        let mut out = Vec::new();
        for s in &sides {
            for &rs in &radii {
                for &eta in &etas {
                    let mut spec = self.system.clone();
                    spec.dimension = s.len();
                    spec.sides = s.clone();
                    spec.wigner_seitz = rs;
                    spec.eta = eta;
                    out.push(spec);
                }
            }
        }
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "pwdual", version, about = "Trotter error bounds and resource estimates for plane-wave dual Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Build T, U, V and write matrix and factor dumps.
    Build(CommonArgs),
    /// Evaluate Trotter bounds for every method.
    Bounds(CommonArgs),
    /// Turn the bounds into phase-estimation gate counts.
    Resources(CommonArgs),
    /// Check bounds against exact small-system oracles.
    Verify(CommonArgs),
    /// Cross η, lattice and r_s axes, streaming resumable CSV.
    Sweep(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lattice sides, e.g. `8,8`.
    #[arg(long, value_delimiter = ',')]
    pub sides: Option<Vec<usize>>,
    #[arg(long)]
    pub eta: Option<usize>,
    /// Wigner–Seitz radius in Bohr.
    #[arg(long)]
    pub rs: Option<f64>,
    /// Comma-separated subset of spectral,cholesky,cosine,shc.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<BoundMethod>>,
    #[arg(long)]
    pub mha_per_electron: Option<f64>,
    #[arg(long)]
    pub basis_change: Option<crate::resources::BasisChange>,
    #[arg(long)]
    pub hwp_cap: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub telemetry: Option<PathBuf>,
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub strict: bool,
    /// Sweep axis: electron counts.
    #[arg(long = "sweep-eta", value_delimiter = ',')]
    pub sweep_eta: Option<Vec<usize>>,
    /// Sweep axis: lattices such as `8x8,12x12`.
    #[arg(long = "sweep-sides", value_delimiter = ',')]
    pub sweep_sides: Option<Vec<String>>,
    /// Sweep axis: Wigner–Seitz radii.
    #[arg(long = "sweep-rs", value_delimiter = ',')]
    pub sweep_rs: Option<Vec<f64>>,
    /// Largest spin-orbital count checked by `verify`.
    #[arg(long)]
    pub max_modes: Option<usize>,
}

fn parse_lattice(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad lattice `{s}`")))
        })
        .collect()
}

/// Merges a parsed command line into a configuration.
pub fn config_from_cli(cli: Cli) -> Result<RunConfig> {
    let (command, args) = match cli.command {
        CliCommand::Build(a) => (Command::Build, a),
        CliCommand::Bounds(a) => (Command::Bounds, a),
        CliCommand::Resources(a) => (Command::Resources, a),
        CliCommand::Verify(a) => (Command::Verify, a),
        CliCommand::Sweep(a) => (Command::Sweep, a),
    };
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.command = Some(command);
    if let Some(s) = args.sides {
        cfg.system.dimension = s.len();
        cfg.system.sides = s;
    }
    if let Some(e) = args.eta {
        cfg.system.eta = e;
    }
    if let Some(r) = args.rs {
        cfg.system.wigner_seitz = r;
    }
    if let Some(m) = args.methods {
        cfg.methods = m;
    }
    if let Some(x) = args.mha_per_electron {
        cfg.mha_per_electron = x;
    }
    if let Some(b) = args.basis_change {
        cfg.step.basis_change = b;
    }
    if let Some(c) = args.hwp_cap {
        cfg.step.hwp_cap = c;
    }
    if args.csv.is_some() {
        cfg.output.csv = args.csv;
    }
    if args.json.is_some() {
        cfg.output.json = args.json;
    }
    if args.telemetry.is_some() {
        cfg.output.telemetry = args.telemetry;
    }
    if args.dump_dir.is_some() {
        cfg.output.dump_dir = args.dump_dir;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.strict |= args.strict;
    if let Some(e) = args.sweep_eta {
        cfg.sweep.eta = e;
    }
    if let Some(s) = args.sweep_sides {
        cfg.sweep.sides = s.iter().map(|x| parse_lattice(x)).collect::<Result<_>>()?;
    }
    if let Some(r) = args.sweep_rs {
        cfg.sweep.wigner_seitz = r;
    }
    if let Some(m) = args.max_modes {
        cfg.verify.max_modes = m;
    }
    Ok(cfg)
}

/// Thread count from the environment, then the config.
pub fn thread_count(cfg: &RunConfig) -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .or(cfg.threads)
}

fn progress(msg: &str) {
    eprintln!("[pwdual] {msg}");
}

fn csv_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout()),
    })
}

fn write_telemetry(path: &Option<PathBuf>, rows: &[TelemetryRow], append: bool) -> Result<()> {
    let Some(p) = path else { return Ok(()) };
    let exists = p.exists() && std::fs::metadata(p)?.len() > 0;
    let file = OpenOptions::new()
        .create(true)
        .append(append)
        .write(true)
        .truncate(!append)
        .open(p)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(!(append && exists))
        .from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluates the configured methods on one spec.
fn bound_rows(cfg: &RunConfig, spec: &SystemSpec) -> (Vec<BoundRow>, Vec<TelemetryRow>, Vec<crate::bounds::BoundReport>) {
    let key = format!("{}|{}|{}", size_label(&spec.sides), spec.wigner_seitz, spec.eta);
    let m = match CoefficientMatrices::build(spec) {
        Ok(m) => m,
        Err(e) => {
            let rows = cfg
                .methods
                .iter()
                .map(|mth| BoundRow::failed(spec, spec.eta, mth.as_str(), &e.to_string()))
                .collect();
            return (rows, vec![], vec![]);
        }
    };
    let mut rows = Vec::new();
    let mut tele = Vec::new();
    let mut reports = Vec::new();
    for o in bound_suite_with_matrices(spec, &m, &cfg.methods, spec.eta, &cfg.bounds) {
        match o.result {
            Ok(r) => {
                tele.push(TelemetryRow {
                    key: key.clone(),
                    method: r.method.to_string(),
                    wall_time_s: r.wall_time_s,
                    peak_mem_bytes: r.peak_mem_bytes,
                });
                rows.push(BoundRow::from_report(spec, &r));
                reports.push(r);
            }
            Err(msg) => {
                progress(&format!("{key} {}: {msg}", o.method));
                rows.push(BoundRow::failed(spec, spec.eta, o.method.as_str(), &msg));
            }
        }
    }
    (rows, tele, reports)
}

fn run_build(cfg: &RunConfig) -> Result<i32> {
    let spec = &cfg.system;
    let m = CoefficientMatrices::build(spec)?;
    progress(&format!("built N = {} for {} with r_s = {}", m.n, size_label(&spec.sides), spec.wigner_seitz));
    let dir = cfg.output.dump_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    for d in dump_coefficients(spec, &m) {
        write_json(&dir.join(format!("{}.json", d.header.name)), &d)?;
    }
    for method in &cfg.methods {
        if let Some(fac) = factorize(*method, spec, &m.v, &cfg.bounds)? {
            write_json(&dir.join(format!("factors_{method}.json")), &FactorDump::from(&fac))?;
        }
    }
    println!("wrote dumps to {}", dir.display());
    Ok(EXIT_OK)
}

fn run_bounds(cfg: &RunConfig) -> Result<i32> {
    let spec = &cfg.system;
    progress(&format!("bounds for {} η = {} r_s = {}", size_label(&spec.sides), spec.eta, spec.wigner_seitz));
    let (rows, tele, reports) = bound_rows(cfg, spec);
    write_csv(csv_sink(&cfg.output.csv)?, &rows)?;
    if let Some(p) = &cfg.output.json {
        write_json(p, &reports)?;
    }
    write_telemetry(&cfg.output.telemetry, &tele, false)?;
    let failed = rows.iter().any(|r| r.error.is_some());
    Ok(if failed && cfg.strict { EXIT_NUMERICAL } else { EXIT_OK })
}

fn run_resources(cfg: &RunConfig) -> Result<i32> {
    let spec = &cfg.system;
    let m = CoefficientMatrices::build(spec)?;
    let (_, tele, reports) = bound_rows(cfg, spec);
    let mut rows = Vec::new();
    let mut failed = reports.len() < cfg.methods.len();
    let mut best: Option<(f64, String)> = None;
    for r in &reports {
        if best.as_ref().is_none_or(|b| r.w2_best < b.0) {
            best = Some((r.w2_best, r.method.to_string()));
        }
    }
    let mut targets: Vec<(String, f64)> = reports
        .iter()
        .map(|r| (r.method.to_string(), r.w2_best))
        .collect();
    if let Some((w2, method)) = best {
        targets.push((format!("best:{method}"), w2));
    }
    for (label, w2) in targets {
        match estimate_for_spec(spec, &m, w2, cfg.mha_per_electron, &cfg.step, &cfg.synthesis) {
            Ok(e) => rows.push(ResourceRow::new(spec, &label, &e)),
            Err(e) => {
                failed = true;
                progress(&format!("resources for {label}: {e}"));
            }
        }
    }
    write_csv(csv_sink(&cfg.output.csv)?, &rows)?;
    if let Some(p) = &cfg.output.json {
        write_json(p, &rows)?;
    }
    write_telemetry(&cfg.output.telemetry, &tele, false)?;
    Ok(if failed && cfg.strict { EXIT_NUMERICAL } else { EXIT_OK })
}

fn run_verify(cfg: &RunConfig) -> Result<i32> {
    let specs = soundness_grid(cfg.verify.max_modes, &cfg.verify.wigner_seitz);
    progress(&format!("checking {} specs", specs.len()));
    let mut violations = 0;
    let mut errors = 0;
    let mut checks = 0;
    for (spec, rec) in specs.iter().zip(check_all(&specs, &cfg.verify.times)) {
        match rec {
            Ok(r) => {
                checks += r.checks;
                for v in &r.violations {
                    progress(&format!("violation: {v:?}"));
                }
                if r.worst_residual > 1e-8 {
                    progress(&format!("reconstruction residual {:e} for {:?}", r.worst_residual, spec));
                    violations += 1;
                }
                violations += r.violations.len();
            }
            Err(e) => {
                errors += 1;
                progress(&format!("{}: {e}", size_label(&spec.sides)));
            }
        }
    }
    println!("verify: {} specs, {checks} checks, {violations} violations, {errors} errors", specs.len());
    Ok(if violations > 0 || errors > 0 { EXIT_VERIFY } else { EXIT_OK })
}

/// Keys of rows already present in a sweep output file.
pub fn completed_keys(path: &Path) -> Result<HashSet<String>> {
    let mut keys = HashSet::new();
    if !path.exists() {
        return Ok(keys);
    }
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    for row in rdr.deserialize::<BoundRow>() {
        match row {
            Ok(r) => {
                keys.insert(r.key());
            }
            // a partially written final line is recomputed
            Err(_) => break,
        }
    }
    Ok(keys)
}

fn file_ends_with_newline(path: &Path) -> Result<bool> {
    let data = std::fs::read(path)?;
    Ok(data.last().is_none_or(|&b| b == b'\n'))
}

fn truncate_partial_line(path: &Path) -> Result<()> {
    if !path.exists() || file_ends_with_newline(path)? {
        return Ok(());
    }
    let mut kept = Vec::new();
    let reader = BufReader::new(File::open(path)?);
    let mut lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
    lines.pop();
    for l in lines {
        kept.extend_from_slice(l.as_bytes());
        kept.push(b'\n');
    }
    std::fs::write(path, kept)?;
    Ok(())
}

fn run_sweep(cfg: &RunConfig) -> Result<i32> {
    let path = cfg
        .output
        .csv
        .clone()
        .ok_or_else(|| Error::Config("sweep requires an output CSV path".into()))?;
    truncate_partial_line(&path)?;
    let done = completed_keys(&path)?;
    let fresh = !path.exists() || std::fs::metadata(&path)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(&path)?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    let specs = cfg.sweep_specs();
    let mut failed = false;
    let mut skipped = 0;
    for (i, spec) in specs.iter().enumerate() {
        let size = size_label(&spec.sides);
        let pending: Vec<BoundMethod> = cfg
            .methods
            .iter()
            .copied()
            .filter(|m| !done.contains(&row_key(&size, spec.wigner_seitz, spec.eta, m.as_str())))
            .collect();
        if pending.is_empty() {
            skipped += 1;
            continue;
        }
        progress(&format!("[{}/{}] {size} η = {} r_s = {}", i + 1, specs.len(), spec.eta, spec.wigner_seitz));
        let sub = RunConfig {
            methods: pending,
            ..cfg.clone()
        };
        let (rows, tele, _) = bound_rows(&sub, spec);
        for r in &rows {
            failed |= r.error.is_some();
            w.serialize(r)?;
        }
        w.flush()?;
        write_telemetry(&cfg.output.telemetry, &tele, true)?;
    }
    progress(&format!("sweep finished, {skipped} points already complete"));
    Ok(if failed && cfg.strict { EXIT_NUMERICAL } else { EXIT_OK })
}

/// Executes a validated configuration and returns the exit status.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    cfg.validate()?;
    match cfg.command.expect("validated") {
        Command::Build => run_build(cfg),
        Command::Bounds => run_bounds(cfg),
        Command::Resources => run_resources(cfg),
        Command::Verify => run_verify(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}

/// Entry point used by the binary: parses arguments, applies the thread
/// override and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let cfg = match config_from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(n) = thread_count(&cfg) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cfg) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::InvalidSystem(_) | Error::EtaOutOfRange { .. } | Error::UnsupportedDimension(_))) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_NUMERICAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("[system]\ndimension = 2\nsides = [2, 2]\neta = 2\nwigner_seitz = 5.0\nextra = 1").is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = RunConfig {
            command: Some(Command::Bounds),
            ..RunConfig::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn sweep_cross_product() {
        let mut cfg = RunConfig::default();
        cfg.sweep.eta = vec![2, 3];
        cfg.sweep.wigner_seitz = vec![1.0, 5.0, 10.0];
        cfg.sweep.sides = vec![vec![2, 2]];
        assert_eq!(cfg.sweep_specs().len(), 6);
    }

    #[test]
    fn lattice_parsing() {
        assert_eq!(parse_lattice("8x8").unwrap(), vec![8, 8]);
        assert!(parse_lattice("8xa").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["pwdual", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["pwdual", "bounds", "--eta", "0", "--sides", "2,2"]), EXIT_USAGE);
    }
}
