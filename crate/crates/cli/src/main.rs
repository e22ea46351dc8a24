//! `casimir`: batch runner for the lattice Casimir experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use casimir_lattice::runner::{
    emit_outputs, execute_experiment, load_config, parse_config, render_record, ExecOptions, OutputSet, RunConfig,
};
use casimir_lattice::Error;
use clap::{Parser, Subcommand};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

/// Resolved config of a run, kept next to its outputs for `resume`.
const RUN_FILE: &str = "run.toml";
const CHECKPOINT_DIR: &str = "checkpoints";

/// Largest |z-score| the oracle check tolerates.
const ORACLE_Z_LIMIT: f64 = 5.0;

const DEFAULT_ORACLE: &str = r#"
experiment = "oracle_check"
seed = 1

[sampler]
measurements = 4000
interval = 1

[oracle]
extents = [2, 2, 4, 2]
plate_z = 0
"#;

#[derive(Parser)]
#[command(name = "casimir", version, about = "Monte-Carlo Casimir energies from lattice gauge theory")]
struct Cli {
    /// Worker threads (one scene chain per task).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Continue an interrupted run from its checkpoint file or directory.
    Resume { checkpoint: PathBuf },
    /// Compare the sampler with exact Gaussian moments on a small lattice.
    OracleCheck {
        /// Optional oracle_check config; a 2x2x4x2 lattice with one plate otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => load_config(config)
            .map_err(config_failure)
            .and_then(|cfg| run(&cli, cfg)),
        Command::Resume { checkpoint } => resume(&cli, checkpoint),
        Command::OracleCheck { config } => oracle(&cli, config.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

/// An unreadable config file counts as a config error.
fn config_failure(e: Error) -> Failure {
    match e {
        Error::Io { .. } | Error::Config { .. } => Failure::Config(e.to_string()),
        e => Failure::Runtime(e.to_string()),
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) -> Result<(), Failure> {
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Config("--workers must be >= 1".into()));
        }
        cfg.workers = Some(w);
    }
    Ok(())
}

fn run(cli: &Cli, mut cfg: RunConfig) -> Result<(), Failure> {
    apply_overrides(cli, &mut cfg)?;
    let out = cfg.output_dir();
    std::fs::create_dir_all(&out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let run_file = out.join(RUN_FILE);
    std::fs::write(&run_file, cfg.to_toml()).map_err(|e| Failure::Runtime(format!("{}: {e}", run_file.display())))?;
    let opts = ExecOptions {
        workers: None,
        checkpoint_dir: Some(out.join(CHECKPOINT_DIR)),
        progress: !cli.quiet,
    };
    let set = execute_experiment(&cfg, &opts)?;
    write_outputs(cli, &set, &out)?;
    finish(&set)
}

/// Locates `run.toml` from a checkpoint file, the checkpoint directory or
/// the run directory.
fn find_run_dir(path: &Path) -> Option<PathBuf> {
    path.ancestors()
        .take(3)
        .find(|p| p.is_dir() && p.join(RUN_FILE).is_file())
        .map(Path::to_path_buf)
}

fn resume(cli: &Cli, checkpoint: &Path) -> Result<(), Failure> {
    if !checkpoint.exists() {
        return Err(Failure::Runtime(format!("{}: no such checkpoint", checkpoint.display())));
    }
    let dir = find_run_dir(checkpoint).ok_or_else(|| {
        Failure::Runtime(format!("no {RUN_FILE} found next to {}", checkpoint.display()))
    })?;
    let mut cfg = load_config(&dir.join(RUN_FILE)).map_err(config_failure)?;
    // Keep writing into the run being resumed unless told otherwise.
    cfg.output_dir = Some(dir);
    run(cli, cfg)
}

fn oracle(cli: &Cli, config: Option<&Path>) -> Result<(), Failure> {
    let mut cfg = match config {
        Some(p) => load_config(p).map_err(config_failure)?,
        None => parse_config(DEFAULT_ORACLE)?,
    };
    if cfg.oracle.is_none() {
        return Err(Failure::Config("oracle-check needs an oracle_check config".into()));
    }
    apply_overrides(cli, &mut cfg)?;
    let set = execute_experiment(&cfg, &ExecOptions::default())?;
    let table = &set.records[0];
    print!("{}", render_record(&set, table));
    if cli.out.is_some() {
        write_outputs(cli, &set, &cfg.output_dir())?;
    }
    let worst = table
        .column("z_score")
        .into_iter()
        .flatten()
        .flatten()
        .fold(0.0_f64, |m, z| m.max(z.abs()));
    if worst > ORACLE_Z_LIMIT {
        return Err(Failure::Runtime(format!(
            "sampler disagrees with the exact moments: max |z| = {worst:.2}"
        )));
    }
    if !cli.quiet {
        eprintln!("oracle check passed: max |z| = {worst:.2}");
    }
    Ok(())
}

fn write_outputs(cli: &Cli, set: &OutputSet, out: &Path) -> Result<(), Failure> {
    let paths = emit_outputs(set, out)?;
    if !cli.quiet {
        for p in paths {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn finish(set: &OutputSet) -> Result<(), Failure> {
    match &set.status {
        casimir_lattice::runner::RunStatus::Complete => Ok(()),
        casimir_lattice::runner::RunStatus::Incomplete(why) => {
            Err(Failure::Runtime(format!("run incomplete, partial outputs written: {why}")))
        }
    }
}
