//! The CLI commands: config-driven runs, the built-in figure
//! reproductions, the verification suites, and the counterexample sweep.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use poleplace::analysis;
use poleplace::config::ExperimentConfig;
use poleplace::error::Error;
use poleplace::figures;
use poleplace::simulation::simulate;

use crate::checks::{self, Check};
use crate::csvout;

#[derive(Debug)]
pub enum CommandError {
    /// Unreadable, unparseable, or invalid configuration (exit code 2).
    Config(String),
    /// A runtime invariant failed (exit code 1).
    Invariant(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Invariant(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CommandError::Config(m) | CommandError::Invariant(m) => m,
        }
    }
}

fn classify(err: Error) -> CommandError {
    match err {
        Error::ConfigInvalid(_) | Error::DimensionMismatch(_) => {
            CommandError::Config(err.to_string())
        }
        // UnstableTarget, ZeroAtOne, SingularSylvester, ... name the failed
        // invariant directly.
        other => CommandError::Invariant(other.to_string()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CommandError> {
    fs::write(path, contents)
        .map_err(|e| CommandError::Invariant(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CommandError> {
    fs::create_dir_all(dir)
        .map_err(|e| CommandError::Invariant(format!("cannot create {}: {e}", dir.display())))
}

pub struct RunOutput {
    pub trace_path: PathBuf,
    pub analysis_path: PathBuf,
    pub warnings: Vec<String>,
}

/// Simulate a user config and write trace.csv + analysis.csv. Nothing is
/// written unless the whole run succeeds.
pub fn cmd_run(config_path: &Path, out_dir: &Path) -> Result<RunOutput, CommandError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CommandError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = ExperimentConfig::from_json(&text).map_err(classify)?;
    let warnings = cfg.validate().map_err(classify)?;
    let trace = simulate(&cfg).map_err(classify)?;

    let trace_csv = csvout::trace_csv(&trace);
    let analysis_csv = csvout::analysis_csv(&trace);
    ensure_dir(out_dir)?;
    let trace_path = out_dir.join("trace.csv");
    let analysis_path = out_dir.join("analysis.csv");
    write_file(&trace_path, &trace_csv)?;
    write_file(&analysis_path, &analysis_csv)?;
    Ok(RunOutput {
        trace_path,
        analysis_path,
        warnings,
    })
}

/// The built-in figure configs; figure 1 runs both estimator variants.
pub fn figure_series(id: &str) -> Option<Vec<(&'static str, ExperimentConfig)>> {
    match id {
        "1a" => Some(vec![
            ("fig1a_ideal", figures::fig1a(figures::ideal())),
            ("fig1a_classical", figures::fig1a(figures::classical())),
        ]),
        "1b" => Some(vec![
            ("fig1b_ideal", figures::fig1b(figures::ideal())),
            ("fig1b_classical", figures::fig1b(figures::classical())),
        ]),
        "2" => Some(vec![("fig2", figures::fig2())]),
        "3" => Some(vec![("fig3", figures::fig3())]),
        _ => None,
    }
}

/// Write one trace CSV per plotted series of the named figure.
pub fn cmd_figure(id: &str, out_dir: &Path) -> Result<Vec<PathBuf>, CommandError> {
    let series = figure_series(id).ok_or_else(|| {
        CommandError::Config(format!(
            "unknown figure id {id:?} (expected 1a, 1b, 2, or 3)"
        ))
    })?;
    // Simulate everything before writing anything.
    let mut rendered = Vec::new();
    for (name, cfg) in &series {
        let trace = simulate(cfg).map_err(classify)?;
        rendered.push((*name, csvout::trace_csv(&trace)));
    }
    ensure_dir(out_dir)?;
    let mut paths = Vec::new();
    for (name, csv) in rendered {
        let path = out_dir.join(format!("{name}.csv"));
        write_file(&path, &csv)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Run a verification suite; the bool is true when every check passed.
pub fn cmd_verify(suite: &str) -> Result<(Vec<Check>, bool), CommandError> {
    let results = checks::suite(suite).ok_or_else(|| {
        CommandError::Config(format!(
            "unknown suite {suite:?} (expected prop1, charpoly, envelope, remark2, or all)"
        ))
    })?;
    let ok = results.iter().all(|c| c.pass);
    Ok((results, ok))
}

/// Counterexample sweep: one CSV-style row per epsilon on stdout.
pub fn cmd_remark2(eps_list: &[f64]) -> Result<String, CommandError> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(CommandError::Config("eps values must lie in (0, 1)".into()));
    }
    let rows = analysis::remark2_experiment(eps_list);
    let mut out = String::from("eps,n_eps,classical_ratio,ideal_c_star\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csvout::fmt_f64(row.eps),
            row.n_eps,
            csvout::fmt_f64(row.classical_ratio),
            csvout::fmt_f64(row.ideal_c_star),
        );
    }
    Ok(out)
}
