//! Artifact writing: versioned CSV tables, the summary and the manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A CSV table with a fixed, versioned column schema.
///
/// The first line is a comment carrying the schema, master seed and config
/// hash, so every file can be traced back to the run that produced it.
#[derive(Debug, Clone)]
pub struct Table {
    name: String,
    schema: &'static str,
    columns: &'static [&'static str],
    body: String,
}

impl Table {
    pub fn new(name: impl Into<String>, schema: &'static str, columns: &'static [&'static str]) -> Self {
        Self { name: name.into(), schema, columns, body: String::new() }
    }

    /// Appends a row of preformatted cells.
    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns.len(), "{}", self.schema);
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn render(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        writeln!(out, "# schema={}/1 master_seed={} config_hash={}", self.schema, cfg.master_seed, cfg.hash())
            .expect("string write");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        out.push_str(&self.body);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warn,
    /// Informational: nothing to pass or fail.
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: serde_json::Value,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Serialize) -> Self {
        let status = if ok { Status::Pass } else { Status::Warn };
        Self { name: name.into(), status, detail: serde_json::to_value(detail).expect("serializable detail") }
    }

    pub fn info(name: impl Into<String>, detail: impl Serialize) -> Self {
        Self {
            name: name.into(),
            status: Status::Info,
            detail: serde_json::to_value(detail).expect("serializable detail"),
        }
    }
}

/// Everything an experiment produces before it touches the disk.
#[derive(Debug, Default)]
pub struct Outputs {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub results: serde_json::Map<String, serde_json::Value>,
}

impl Outputs {
    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_owned(), serde_json::to_value(value).expect("serializable result"));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub master_seed: u64,
    pub config_hash: String,
    pub workers: usize,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub config: ExperimentConfig,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Renders every artifact except the manifest, in a fixed order.
pub fn render(cfg: &ExperimentConfig, out: &Outputs) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = out.tables.iter().map(|t| (t.name().to_owned(), t.render(cfg))).collect();
    #[derive(Serialize)]
    struct Summary<'a> {
        kind: &'a str,
        master_seed: u64,
        config_hash: String,
        checks: &'a [Check],
        results: &'a serde_json::Map<String, serde_json::Value>,
    }
    let summary = Summary {
        kind: cfg.experiment.kind(),
        master_seed: cfg.master_seed,
        config_hash: cfg.hash(),
        checks: &out.checks,
        results: &out.results,
    };
    files.push((SUMMARY.to_owned(), serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"));
    files
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes the artifacts and a manifest listing their digests.
pub fn write_all(
    dir: &Path,
    cfg: &ExperimentConfig,
    files: &[(String, String)],
    started_unix: u64,
    elapsed_seconds: f64,
) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut entries = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        entries.push(FileEntry { name: name.clone(), bytes: text.len() as u64, sha256: sha256_hex(text.as_bytes()) });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        kind: cfg.experiment.kind().to_owned(),
        master_seed: cfg.master_seed,
        config_hash: cfg.hash(),
        workers: cfg.workers,
        started_unix,
        elapsed_seconds,
        config: cfg.clone(),
        files: entries,
    };
    let path = dir.join(MANIFEST);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")
        .map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join(MANIFEST);
    let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
