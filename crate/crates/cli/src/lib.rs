//! Command-line orchestration for the holographic LWE laboratory.
//!
//! A run resolves a [`RunConfig`], executes the requested experiments, writes
//! one JSON and/or CSV file per output table, and finishes with
//! `manifest.json`. Output bytes depend only on the resolved config (seed
//! included): there are no timestamps, and rows follow grid order.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use config::{Format, RunConfig};
pub use error::CliError;
use report::{sha256_hex, write_atomic, Table};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Etcf,
    Entropy,
    Geodesic,
    Bulk,
    Costs,
    Protocol,
    All,
}

impl Subcommand {
    fn experiments(self) -> Vec<Subcommand> {
        use Subcommand::*;
        match self {
            All => vec![Etcf, Entropy, Geodesic, Bulk, Protocol, Costs],
            one => vec![one],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Subcommand::Etcf => "etcf",
            Subcommand::Entropy => "entropy",
            Subcommand::Geodesic => "geodesic",
            Subcommand::Bulk => "bulk",
            Subcommand::Costs => "costs",
            Subcommand::Protocol => "protocol",
            Subcommand::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "holo-lwe-lab",
    version,
    about = "Seeded experiments on LWE entropy gaps and holographic measurement cost"
)]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Args {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(format) = self.format {
            cfg.format = format;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentStatus {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub subcommand: Subcommand,
    pub seed: u64,
    pub format: Format,
    pub config_sha256: String,
    pub experiments: Vec<ExperimentStatus>,
}

impl Manifest {
    pub fn failures(&self) -> usize {
        self.experiments.iter().filter(|e| e.status != "ok").count()
    }
}

fn write_tables(out: &Path, tables: &[Table], format: Format) -> Result<Vec<Artifact>, CliError> {
    let mut artifacts = Vec::new();
    for t in tables {
        let mut files = Vec::new();
        if format.json() {
            files.push((format!("{}.json", t.name), t.to_json()));
        }
        if format.csv() {
            files.push((format!("{}.csv", t.name), t.to_csv()?));
        }
        for (file, body) in files {
            write_atomic(&out.join(&file), &body)?;
            artifacts.push(Artifact { sha256: sha256_hex(body.as_bytes()), file });
        }
    }
    Ok(artifacts)
}

/// Runs `subcommand` and writes its outputs plus `manifest.json` into `out`.
///
/// An experiment that fails numerically is recorded in the manifest and the
/// run continues; only I/O and internal failures abort.
pub fn run(subcommand: Subcommand, cfg: &RunConfig, out: &Path) -> Result<Manifest, CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
    let mut experiments = Vec::new();
    for exp in subcommand.experiments() {
        let result = match exp {
            Subcommand::Etcf => experiments::etcf(cfg),
            Subcommand::Entropy => experiments::entropy(cfg),
            Subcommand::Geodesic => experiments::geodesic(cfg),
            Subcommand::Bulk => experiments::bulk(cfg),
            Subcommand::Costs => experiments::costs(cfg),
            Subcommand::Protocol => experiments::protocol(cfg),
            Subcommand::All => return Err(CliError::Internal("nested 'all'".into())),
        };
        let status = match result {
            Ok(tables) => ExperimentStatus {
                name: exp.name().into(),
                status: "ok".into(),
                error: None,
                artifacts: write_tables(out, &tables, cfg.format)?,
            },
            Err(e) => ExperimentStatus {
                name: exp.name().into(),
                status: "failed".into(),
                error: Some(e.to_string()),
                artifacts: Vec::new(),
            },
        };
        experiments.push(status);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema_version: SCHEMA_VERSION,
        subcommand,
        seed: cfg.seed,
        format: cfg.format,
        config_sha256: sha256_hex(cfg.canonical_json().as_bytes()),
        experiments,
    };
    let mut body = serde_json::to_string_pretty(&json!(manifest)).map_err(|e| CliError::Internal(e.to_string()))?;
    body.push('\n');
    write_atomic(&out.join("manifest.json"), &body)?;
    Ok(manifest)
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = args.resolve().and_then(|cfg| run(args.subcommand, &cfg, &args.out));
    match outcome {
        Ok(manifest) => {
            for e in manifest.experiments.iter().filter(|e| e.status != "ok") {
                eprintln!("{}: {}", e.name, e.error.as_deref().unwrap_or("failed"));
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
