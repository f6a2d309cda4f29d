//! `bcsim`: runs Borel–Cantelli experiments from config files and writes
//! reproducible CSV/JSON artifacts.

mod config;
mod experiments;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig, KINDS};

/// Default output directory when neither `--out` nor the config sets one.
pub const OUT_DIR_ENV: &str = "BCSIM_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) | CliError::Verify(_) => 1,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Resource(_) => "resource",
            CliError::Io(_) => "io",
            CliError::Verify(_) => "verify",
        }
    }
}

impl From<bcsim::Error> for CliError {
    fn from(e: bcsim::Error) -> Self {
        match e {
            bcsim::Error::Resource(_) => CliError::Resource(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bcsim", version, about = "Borel–Cantelli experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct Overrides {
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KindArgs {
    /// Config file; the built-in example is used when absent.
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file (TOML, or JSON by extension).
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print an example config for an experiment kind.
    Init {
        kind: String,
        /// Emit JSON instead of TOML.
        #[arg(long)]
        json: bool,
    },
    /// Check an output directory against its manifest.
    Verify {
        dir: PathBuf,
        /// Also rerun the recorded config and compare every artifact byte for byte.
        #[arg(long)]
        rerun: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    WalkAslclt(KindArgs),
    WalkOracles(KindArgs),
    DbcRun(KindArgs),
    DecayEstimate(KindArgs),
    ConditionA(KindArgs),
    RecurrenceRun(KindArgs),
    CheckSeq(KindArgs),
}

fn example_config(kind: &str) -> Result<ExperimentConfig, CliError> {
    let experiment = Experiment::example(kind)
        .ok_or_else(|| CliError::Config(format!("unknown experiment kind `{kind}`; expected one of {KINDS:?}")))?;
    Ok(ExperimentConfig { master_seed: 0, workers: 0, output_dir: None, experiment })
}

fn apply(mut cfg: ExperimentConfig, o: &Overrides) -> ExperimentConfig {
    if let Some(s) = o.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = o.workers {
        cfg.workers = w;
    }
    if let Some(out) = &o.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| {
        let base = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("bcsim-out"), PathBuf::from);
        base.join(format!("{}-{}", cfg.experiment.kind(), &cfg.hash()[..12]))
    })
}

fn execute(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let out = experiments::run(cfg)?;
    let files = output::render(cfg, &out);
    let dir = output_dir(cfg);
    let manifest = output::write_all(&dir, cfg, &files, started, clock.elapsed().as_secs_f64())?;
    let warnings = out.checks.iter().filter(|c| c.status == output::Status::Warn).count();
    println!(
        "{}",
        json!({
            "kind": cfg.experiment.kind(),
            "config_hash": cfg.hash(),
            "manifest": manifest,
            "files": files.iter().map(|f| &f.0).collect::<Vec<_>>(),
            "warnings": warnings,
        })
    );
    Ok(())
}

fn verify(dir: &Path, rerun: bool, workers: Option<usize>) -> Result<(), CliError> {
    let manifest = output::read_manifest(dir)?;
    let mut problems = Vec::new();
    let hash = manifest.config.hash();
    if hash != manifest.config_hash {
        problems.push(format!("config hash {} does not match recorded {}", hash, manifest.config_hash));
    }
    let tag = format!("master_seed={} config_hash={}", manifest.master_seed, manifest.config_hash);
    let mut on_disk = Vec::with_capacity(manifest.files.len());
    for f in &manifest.files {
        match std::fs::read_to_string(dir.join(&f.name)) {
            Ok(text) => {
                if output::sha256_hex(text.as_bytes()) != f.sha256 {
                    problems.push(format!("{}: digest mismatch", f.name));
                }
                if f.name.ends_with(".csv") && !text.lines().next().is_some_and(|l| l.contains(&tag)) {
                    problems.push(format!("{}: header does not carry the seed and config hash", f.name));
                }
                on_disk.push((f.name.clone(), text));
            }
            Err(e) => problems.push(format!("{}: {e}", f.name)),
        }
    }
    if rerun {
        let mut cfg = manifest.config.clone();
        if let Some(w) = workers {
            cfg.workers = w;
        }
        let fresh = output::render(&cfg, &experiments::run(&cfg)?);
        if fresh.len() != on_disk.len() {
            problems.push(format!("rerun produced {} files, manifest lists {}", fresh.len(), on_disk.len()));
        }
        for (name, text) in &fresh {
            match on_disk.iter().find(|f| &f.0 == name) {
                Some((_, old)) if old == text => {}
                Some(_) => problems.push(format!("{name}: rerun differs")),
                None => problems.push(format!("{name}: produced by rerun but not recorded")),
            }
        }
    }
    println!(
        "{}",
        json!({ "dir": dir, "files": manifest.files.len(), "rerun": rerun, "ok": problems.is_empty(), "problems": problems })
    );
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!("{} problem(s) in {}", problems.len(), dir.display())))
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = match cli.command {
        Command::Run { config, overrides } => return execute(&apply(ExperimentConfig::load(&config)?, &overrides)),
        Command::Init { kind, json } => {
            let cfg = example_config(&kind)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            } else {
                print!("{}", cfg.to_toml()?);
            }
            return Ok(());
        }
        Command::Verify { dir, rerun, workers } => return verify(&dir, rerun, workers),
        Command::WalkAslclt(a) => ("walk-aslclt", a),
        Command::WalkOracles(a) => ("walk-oracles", a),
        Command::DbcRun(a) => ("dbc-run", a),
        Command::DecayEstimate(a) => ("decay-estimate", a),
        Command::ConditionA(a) => ("condition-a", a),
        Command::RecurrenceRun(a) => ("recurrence-run", a),
        Command::CheckSeq(a) => ("check-seq", a),
    };
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => example_config(kind)?,
    };
    if cfg.experiment.kind() != kind {
        return Err(CliError::Config(format!("config describes `{}`, not `{kind}`", cfg.experiment.kind())));
    }
    execute(&apply(cfg, &args.overrides))
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.label(), "message": e.to_string(), "exit_code": e.code() }));
            ExitCode::from(e.code())
        }
    }
}
