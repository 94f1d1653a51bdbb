//! Command-line driver: `maslov-stab <wave|curves|stability|krein|check>`.

mod check;
mod config;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use check::{run_checks, CheckResult};
pub use config::{Builtin, Output, Problem, Resolution, RunConfig, Tolerances, Window};

use crate::error::{Error, Result};
use crate::spectra::{self, EigenvalueCurve, OracleEigenvalue};
use crate::stability::{self, KreinOptions};

#[derive(Debug, Parser)]
#[command(name = "maslov-stab", version, about = "Maslov-index spectral stability of NLS standing waves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Solve for the standing wave and write its profile.
    Wave,
    /// Trace eigenvalue curves over the window.
    Curves,
    /// Stability verdict with its evidence.
    Stability,
    /// Krein-index comparison at the corner.
    Krein,
    /// Invariant suite on the built-in problems (and the configured one, if any).
    Check,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_UNRESOLVED_CORNER: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
        Error::UnresolvedCorner { .. } => EXIT_UNRESOLVED_CORNER,
        _ => EXIT_NUMERICAL,
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cfg = match &cli.config {
        Some(path) => Some(RunConfig::load(path)?),
        None if matches!(cli.command, Command::Check) => None,
        None => return Err(Error::Config(format!("--config is required for {:?}", cli.command).to_lowercase())),
    };
    fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Check => check_cmd(cfg.as_ref(), &cli.out),
        cmd => run_config(cmd, cfg.as_ref().expect("checked above"), &cli.out),
    }
}

pub fn run_config(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let wants = |o: Output| cfg.outputs.contains(&o);
    match cmd {
        Command::Wave => {
            let (wave, _) = cfg.build()?;
            let w = wave.ok_or_else(|| Error::Config("wave: the problem has no standing wave".into()))?;
            write_json(&out.join("wave.json"), &w.to_json())?;
            if wants(Output::Plotdata) {
                let mut csv = csv::Writer::from_path(out.join("wave.csv")).map_err(csv_err)?;
                csv.write_record(["x", "phi", "dphi"]).map_err(csv_err)?;
                for i in 0..=w.grid() {
                    csv.serialize((w.profile.x(i), w.profile.val[i], w.profile.der[i])).map_err(csv_err)?;
                }
                csv.flush()?;
            }
            println!("wave: beta={} ell={} amplitude={:.12}", w.beta, w.ell, w.amplitude());
            Ok(EXIT_OK)
        }
        Command::Curves => {
            let (_, p) = cfg.build()?;
            let rect = cfg.rect(&p);
            let curves = spectra::trace_curves(&p, rect, &cfg.curve_options())?;
            if wants(Output::CurvesCsv) {
                write_curves_csv(&out.join("curves.csv"), &curves)?;
            }
            if wants(Output::ReportJson) {
                write_json(&out.join("curves.json"), &curves)?;
            }
            if wants(Output::Plotdata) {
                let n = cfg.resolution.plot_grid;
                let grid = spectra::det_grid(&p, rect, n, n, crate::ode::Tolerance::new(cfg.tolerances.sweep))?;
                let mut csv = csv::Writer::from_path(out.join("grid.csv")).map_err(csv_err)?;
                csv.write_record(["lambda", "s", "detX"]).map_err(csv_err)?;
                for [l, s, d] in grid {
                    csv.serialize((l, s, d)).map_err(csv_err)?;
                }
                csv.flush()?;
            }
            let tangencies: usize = curves.iter().map(|c| c.tangency_flags.len()).sum();
            println!("curves: {} branches, {} tangencies", curves.len(), tangencies);
            Ok(EXIT_OK)
        }
        Command::Stability => {
            let (wave, p) = cfg.build()?;
            let opts = cfg.spectra_options();
            let report = match &wave {
                Some(w) => stability::stability_report_with(w, &opts)?,
                None => stability::stability_report_for_potentials(&p, &opts)?,
            };
            if wants(Output::ReportJson) {
                write_json(&out.join("stability.json"), &report)?;
            }
            if wants(Output::OracleCsv) {
                write_oracle_csv(&out.join("oracle.csv"), &spectra::fd_spectrum(&p, 1.0, cfg.resolution.fd_n)?)?;
            }
            println!("stability: {:?} ({})", report.verdict, report.evidence.join(", "));
            Ok(if report.corner_interval.is_some() { EXIT_UNRESOLVED_CORNER } else { EXIT_OK })
        }
        Command::Krein => {
            let (_, p) = cfg.build()?;
            let opts = KreinOptions { fd_n: cfg.resolution.fd_n, spectra: cfg.spectra_options(), ..Default::default() };
            let report = stability::krein_analysis_with(&p, &opts)?;
            if wants(Output::ReportJson) {
                write_json(&out.join("krein.json"), &report)?;
            }
            if wants(Output::OracleCsv) {
                write_oracle_csv(&out.join("oracle.csv"), &report.spectrum)?;
            }
            let k = &report.kks_balance;
            println!(
                "krein: k_r={} k_c={} k_i-={} rhs={} balance={} identity_c={:?}",
                k.k_r, k.k_c, k.k_i_minus, k.rhs, k.balance, report.identity_c
            );
            Ok(EXIT_OK)
        }
        Command::Check => check_cmd(Some(cfg), out),
    }
}

fn check_cmd(cfg: Option<&RunConfig>, out: &Path) -> Result<i32> {
    let results = run_checks(cfg)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        passed: bool,
        checks: &'a [CheckResult],
    }
    let passed = results.iter().all(|r| r.passed);
    write_json(&out.join("check.json"), &Summary { passed, checks: &results })?;
    for r in &results {
        println!("{} {}/{}: {}", if r.passed { "PASS" } else { "FAIL" }, r.target, r.name, r.detail);
    }
    Ok(if passed { EXIT_OK } else { EXIT_NUMERICAL })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.into()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn write_curves_csv(path: &Path, curves: &[EigenvalueCurve]) -> Result<()> {
    let mut csv = csv::Writer::from_path(path).map_err(csv_err)?;
    csv.write_record(["branch_id", "lambda", "s"]).map_err(csv_err)?;
    for c in curves {
        for [l, s] in &c.points {
            csv.serialize((c.branch_id, l, s)).map_err(csv_err)?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn write_oracle_csv(path: &Path, spectrum: &[OracleEigenvalue]) -> Result<()> {
    let mut csv = csv::Writer::from_path(path).map_err(csv_err)?;
    csv.write_record(["re", "im", "krein_value"]).map_err(csv_err)?;
    for e in spectrum {
        let k = e.krein.map(|k| k.to_string()).unwrap_or_default();
        csv.write_record([e.re.to_string(), e.im.to_string(), k]).map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}
