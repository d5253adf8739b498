//! Append-only run directories. Every invocation gets a fresh
//! `<out_dir>/<subcommand>-NNNN`; files inside are created once and never
//! reopened for writing.

use serde::Serialize;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{RunConfig, Subcommand};
use crate::{hex_sha256, CliError};

pub struct RunDir {
    pub path: PathBuf,
    started: Instant,
    artifacts: Vec<String>,
}

#[derive(Serialize)]
struct ArtifactEntry {
    file: String,
    sha256: String,
    bytes: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: String,
    code_version: &'static str,
    status: &'static str,
    error: Option<String>,
    config_sha256: String,
    config: &'a RunConfig,
    /// rule for every random stream in the run
    seeding: &'static str,
    wall_time_s: f64,
    artifacts: Vec<ArtifactEntry>,
    summary: serde_json::Value,
}

const SEEDING: &str = "stream(seed, name) = ChaCha8 seeded with the first 8 bytes (LE) of sha256(seed_le || name); \
potential: stream(seed, \"potential\"), second coupled potential: seed' = stream-seed(seed, \"potential/second\"), \
Monte Carlo sample i: stream-seed(seed, \"monte-carlo/i\"), initial data for drift seed k: stream(k, \"initial\")";

impl RunDir {
    pub fn create(out_dir: &Path, cmd: Subcommand) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir).map_err(|e| CliError::Validation(format!("out_dir: {}: {e}", out_dir.display())))?;
        for n in 1..100_000 {
            let path = out_dir.join(format!("{cmd}-{n:04}"));
            match std::fs::create_dir(&path) {
                Ok(()) => return Ok(RunDir { path, started: Instant::now(), artifacts: Vec::new() }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(CliError::Validation(format!("out_dir: {}: {e}", path.display()))),
            }
        }
        Err(CliError::Validation(format!("out_dir: {} has no free run slot", out_dir.display())))
    }

    /// New file in the run directory; fails if it already exists.
    pub fn create_file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let f = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(self.path.join(name))
            .map_err(|e| CliError::Compute(format!("{name}: {e}")))?;
        self.artifacts.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn write_file(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let mut w = self.create_file(name)?;
        w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| CliError::Compute(format!("{name}: {e}")))
    }

    /// Write `manifest.json`; a failed run records its error so any
    /// artifacts already written are marked partial.
    pub fn finish(mut self, cmd: Subcommand, cfg: &RunConfig, outcome: &Result<serde_json::Value, CliError>) -> Result<PathBuf, CliError> {
        let mut artifacts = Vec::new();
        for name in &self.artifacts {
            let bytes = std::fs::read(self.path.join(name)).map_err(|e| CliError::Compute(format!("{name}: {e}")))?;
            artifacts.push(ArtifactEntry { file: name.clone(), sha256: hex_sha256(&bytes), bytes: bytes.len() as u64 });
        }
        let (status, error, summary) = match outcome {
            Ok(s) => ("ok", None, s.clone()),
            Err(e) => ("failed: artifacts are partial", Some(e.to_string()), serde_json::Value::Null),
        };
        let m = Manifest {
            subcommand: cmd.to_string(),
            code_version: concat!("bnf ", env!("CARGO_PKG_VERSION")),
            status,
            error,
            config_sha256: cfg.sha256(),
            config: cfg,
            seeding: SEEDING,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            artifacts,
            summary,
        };
        let json = serde_json::to_vec_pretty(&m).expect("manifest serializes");
        self.artifacts.clear();
        self.write_file("manifest.json", &json)?;
        Ok(self.path)
    }
}
