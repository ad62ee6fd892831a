//! Batch driver for firmlab experiments.
//!
//! A run reads one JSON config, dispatches the named task and writes a JSON
//! report plus optional CSV plot data. Exit codes: 0 task ran and passed,
//! 1 task ran and refuted (or was inconclusive), 2 usage or config error,
//! 3 numerical divergence.

pub mod config;
pub mod error;
pub mod report;
pub mod tasks;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Task};
pub use error::CliError;
pub use report::{Report, Verdict, ARTIFACT_VERSION};

pub const SEED_ENV: &str = "FIRMLAB_SEED";

/// Seed precedence: flag, then environment, then config, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(raw) = env {
        return raw
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={raw:?} is not an unsigned integer")));
    }
    Ok(config.unwrap_or(0))
}

/// Runs a parsed config; returns the report and any CSV payload.
pub fn run_config(config: &ExperimentConfig, seed: u64) -> Result<(Report, Option<Vec<u8>>), CliError> {
    let out = tasks::dispatch(config, seed)?;
    let mut warnings = out.warnings;
    let wants_csv = config.output.as_ref().is_some_and(|o| o.csv.is_some());
    if wants_csv && out.csv.is_none() {
        warnings.push(format!("task {} produces no CSV; output.csv ignored", config.task));
    }
    let report = Report {
        artifact_version: ARTIFACT_VERSION,
        config: config.clone(),
        task: config.task,
        verdict: out.verdict,
        metrics: out.metrics,
        warnings,
    };
    Ok((report, out.csv))
}

#[derive(Debug, Default, Clone)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub seed_env: Option<String>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub json: String,
    /// `None` when the report went to stdout.
    pub json_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
}

fn place(out_dir: Option<&Path>, configured: Option<&str>, fallback: Option<&str>) -> Option<PathBuf> {
    match (out_dir, configured.or(fallback)) {
        (Some(dir), Some(name)) => Some(dir.join(name)),
        (None, Some(name)) if configured.is_some() => Some(PathBuf::from(name)),
        _ => None,
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads, runs and writes outputs for one config file.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = ExperimentConfig::from_json(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let seed = resolve_seed(opts.seed, opts.seed_env.as_deref(), config.params.seed)?;
    let (report, csv) = run_config(&config, seed)?;
    let json = report.to_json();
    let output = config.output.clone().unwrap_or(config::OutputConfig { json: None, csv: None });
    let out_dir = opts.out_dir.as_deref();
    let json_path = place(out_dir, output.json.as_deref(), Some("report.json"));
    if let Some(p) = &json_path {
        write(p, json.as_bytes())?;
    }
    let csv_path = match (&csv, place(out_dir, output.csv.as_deref(), None)) {
        (Some(bytes), Some(p)) => {
            write(&p, bytes)?;
            Some(p)
        }
        _ => None,
    };
    Ok(RunOutcome { report, json, json_path, csv_path })
}

/// Human-readable catalogue of spaces, maps and tasks.
pub fn list_builtins() -> String {
    let mut s = String::new();
    s.push_str("spaces (space.kind):\n");
    for line in [
        "real_line_abs                      d(x,y) = |y - x|",
        "asym_r(alpha,beta)                 d(x,y) = max(-alpha (y-x), beta (y-x)); alpha, beta > 0",
        "rn_lp(p,dimension)                 p in {1, 2, \"inf\"}",
        "polyhedral(generators)             d(x,y) = max_i <a_i, y - x>; generators = [[a_i]...]",
    ] {
        s.push_str(&format!("  {line}\n"));
    }
    s.push_str("maps (map.kind):\n");
    for line in [
        "identity",
        "abs_plus_one                       x -> |x| + 1 (1-D)",
        "reflect_exp                        x -> 1 - x for x < 0, x + exp(-x) otherwise (1-D)",
        "translation(offset)",
        "affine(matrix,offset)              x -> A x + b",
        "scaling(factor)",
        "piecewise_linear(knots,left_slope,right_slope)   knots = [[x, y]...] (1-D)",
        "averaged(inner,lambda)             (1 - lambda) I + lambda T",
        "virtual_pair(x,y[,tx,ty])          images at two points; default Tx = y, Ty = z_xy",
    ] {
        s.push_str(&format!("  {line}\n"));
    }
    s.push_str("tasks (task) and their params:\n");
    for t in Task::ALL {
        s.push_str(&format!("  {:<12} {}\n", t.name(), t.params().join(", ")));
    }
    s.push_str("output: {\"json\": path, \"csv\": path}; seed precedence: --seed > FIRMLAB_SEED > params.seed\n");
    s
}
