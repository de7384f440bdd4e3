//! Command-line front end: `run` and `validate` a JSON config, write CSV and
//! JSON results.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid config, 3 numerical
//! invariant violated during the run (nothing is written).

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::experiments::{
    chsh, hom_bell_state, max_chsh, run_gedanken, run_hom, run_mz, ChshAngles, ExperimentResult,
};
use crate::fock::BASIS_ORDERING_VERSION;
use crate::thermal::g2_scan;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, Prepared};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "photon-interference", version, about = "Photon interference and correlation simulator")]
pub struct Cli {
    /// Output directory (default: `output.dir` from the config).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for sweeps; 0 picks the machine default.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Recorded in the manifest. All computations are expectation values, so
    /// it changes nothing.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the full default config and exit.
    #[arg(long)]
    pub print_config_defaults: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Parse and check a config file without computing anything.
    Validate { config: PathBuf },
}

/// Parses `args` (including the program name) and runs. Returns the exit code.
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
    if cli.print_config_defaults {
        let text = serde_json::to_string_pretty(&ExperimentConfig::default()).expect("default config serializes");
        println!("{text}");
        return EXIT_OK;
    }
    match &cli.command {
        None => {
            eprintln!("error: expected a subcommand (run, validate) or --print-config-defaults");
            EXIT_CONFIG
        }
        Some(Command::Validate { config }) => match load(config) {
            Ok((cfg, _)) => match cfg.prepare() {
                Ok(_) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            },
            Err(code) => code,
        },
        Some(Command::Run { config }) => run(&cli, config),
    }
}

fn load(path: &FsPath) -> Result<(ExperimentConfig, String), i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })?;
    let cfg = ExperimentConfig::from_json(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_CONFIG
    })?;
    Ok((cfg, text))
}

/// Runs a prepared experiment and applies the post-run invariant checks.
pub fn execute(prepared: &Prepared, tol: f64) -> Result<ExperimentResult, Error> {
    let result = match prepared {
        Prepared::Hom(cfg, delays) => {
            let mut r = run_hom(cfg, delays)?;
            let total = r
                .column("p_coincidence")
                .unwrap_or(&[])
                .iter()
                .zip(r.column("p_bunch").unwrap_or(&[]))
                .map(|(a, b)| (a + b - 1.0).abs())
                .fold(0.0, f64::max);
            if total > tol {
                return Err(Error::InvariantViolation(format!("detection probabilities sum off by {total:e}")));
            }
            match hom_bell_state(cfg, 0.0) {
                Ok(bell) => {
                    r = r
                        .with_metric("bell_concurrence", bell.concurrence)
                        .with_metric("bell_fidelity", bell.bell_fidelity)
                        .with_metric("chsh_optimal_angles", chsh(&bell.polarization, &ChshAngles::optimal()))
                        .with_metric("chsh_max", max_chsh(&bell.polarization));
                }
                Err(Error::HeraldFailure) => {}
                Err(e) => return Err(e),
            }
            r
        }
        Prepared::Mz(cfg, phases) => {
            let r = run_mz(cfg, phases)?;
            let drift = r.metric("probability_conservation_error").unwrap_or(0.0);
            if drift > tol {
                return Err(Error::InvariantViolation(format!("detector probabilities sum off by {drift:e}")));
            }
            r
        }
        Prepared::Gedanken { cfg, phi, herald, overlaps } => run_gedanken(cfg, *phi, *herald, overlaps)?.0,
        Prepared::ThermalG2 { field, x1, x2 } => {
            let r = g2_scan(field, *x1, x2)?.into_experiment_result();
            let dev = r.metric("max_route_deviation").unwrap_or(0.0);
            if dev > tol {
                return Err(Error::InvariantViolation(format!("G2 routes disagree by {dev:e}")));
            }
            r
        }
    };
    result.check()?;
    Ok(result)
}

fn run(cli: &Cli, path: &FsPath) -> i32 {
    let started = Instant::now();
    let (cfg, _) = match load(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let prepared = match cfg.prepare() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_IO;
        }
    };
    let result = match pool.install(|| execute(&prepared, cfg.numeric.invariant_tol)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: run aborted: {e}");
            return EXIT_INVARIANT;
        }
    };

    let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let echo = serde_json::to_value(&cfg).expect("config serializes");
    let config_hash = output::sha256_hex(echo.to_string().as_bytes());
    let csv_name = cfg.experiment.csv_name();
    let summary = json!({
        "experiment": cfg.experiment,
        "observable": result.observable,
        "csv": csv_name,
        "rows": result.rows(),
        "columns": result.columns.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        "metrics": result.metrics,
        "metadata": result.metadata,
        "config": echo,
        "config_sha256": config_hash,
        "basis_ordering_version": BASIS_ORDERING_VERSION,
        "software_version": env!("CARGO_PKG_VERSION"),
    });
    let written = fs::create_dir_all(&out_dir)
        .and_then(|_| fs::write(out_dir.join(csv_name), output::to_csv(&result)))
        .and_then(|_| output::write_json(&out_dir.join("summary.json"), &summary))
        .and_then(|_| {
            let manifest = json!({
                "config": summary["config"],
                "config_sha256": config_hash,
                "software_version": env!("CARGO_PKG_VERSION"),
                "basis_ordering_version": BASIS_ORDERING_VERSION,
                "metrics": result.metrics,
                "files": [csv_name, "summary.json"],
                "threads": pool.current_num_threads(),
                "seed": cli.seed.map_or(Value::Null, Value::from),
                "duration_seconds": started.elapsed().as_secs_f64(),
            });
            output::write_json(&out_dir.join("manifest.json"), &manifest)
        });
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: cannot write results to {}: {e}", out_dir.display());
            EXIT_IO
        }
    }
}
