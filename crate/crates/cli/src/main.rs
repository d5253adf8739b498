//! `bnf`: normal forms, resonance scans and drift experiments from a flat
//! TOML config.
//!
//! Exit status: 0 on success, 2 when the config fails validation (nothing is
//! written), 1 when a computation fails (the manifest marks the run partial).

mod commands;
mod config;
mod pipeline;
mod report;
mod rundir;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{parse_override, parse_value, RawConfig, Subcommand};
use rundir::RunDir;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Compute(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Parser)]
#[command(name = "bnf", version, about = "Birkhoff normal forms and long-time drift experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Compute the normal form; writes nf.json
    Normalize(Common),
    /// Enumerate near resonances; writes hits.csv
    ScanResonances(Common),
    /// Monte Carlo non-resonance estimate; writes measure.csv
    MeasureEstimate(Common),
    /// Integrate one trajectory; writes frames.csv
    Simulate(Common),
    /// Action drift over an eps grid and seeds; writes drift.csv
    DriftExperiment(Common),
    /// Summarize earlier runs; writes report.txt and prints it
    Report {
        #[command(flatten)]
        common: Common,
        /// run directories (default: every run under out_dir)
        runs: Vec<PathBuf>,
    },
    /// List the config keys
    Keys,
}

/// Options shared by every subcommand. The named flags are shorthands for
/// `--set key=value`.
#[derive(Args)]
struct Common {
    /// TOML config file with flat keys
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// override a config key, e.g. --set gamma=0.01
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// file name of the main artifact inside the run directory
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    r_star: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    jmax: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// comma-separated
    #[arg(long)]
    gamma_grid: Option<String>,
}

impl Common {
    fn raw(&self) -> Result<RawConfig, CliError> {
        let mut raw = RawConfig::load(self.config.as_deref())?;
        let flags = [
            ("out_dir", &self.out_dir),
            ("model", &self.model),
            ("r_star", &self.r_star),
            ("gamma", &self.gamma),
            ("alpha", &self.alpha),
            ("N", &self.n),
            ("jmax", &self.jmax),
            ("mode", &self.mode),
            ("r", &self.r),
            ("samples", &self.samples),
            ("seed", &self.seed),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                raw.set(k.to_string(), parse_value(v));
            }
        }
        if let Some(g) = &self.gamma_grid {
            raw.set("gamma_grid".into(), parse_value(&format!("[{g}]")));
        }
        for o in &self.overrides {
            let (k, v) = parse_override(o)?;
            raw.set(k, v);
        }
        Ok(raw)
    }
}

fn execute(cmd: Subcommand, common: &Common, runs: &[PathBuf]) -> Result<PathBuf, CliError> {
    let cfg = common.raw()?.resolve(cmd)?;
    let default_out = match cmd {
        Subcommand::Normalize => "nf.json",
        Subcommand::ScanResonances => "hits.csv",
        Subcommand::MeasureEstimate => "measure.csv",
        Subcommand::Simulate => "frames.csv",
        Subcommand::DriftExperiment => "drift.csv",
        Subcommand::Report => "report.txt",
    };
    let out = common.out.as_deref().unwrap_or(default_out);
    if out.is_empty() || out == "manifest.json" || out.contains(['/', '\\']) {
        return Err(CliError::Validation(format!("out: `{out}` must be a plain file name other than manifest.json")));
    }
    commands::preflight(&cfg, cmd)?;
    let runs = if cmd == Subcommand::Report { report::collect_runs(runs, &cfg.out_dir)? } else { Vec::new() };
    let mut dir = RunDir::create(&cfg.out_dir, cmd)?;
    let outcome = match cmd {
        Subcommand::Normalize => commands::normalize_cmd(&cfg, &mut dir, out),
        Subcommand::ScanResonances => commands::scan_cmd(&cfg, &mut dir, out),
        Subcommand::MeasureEstimate => commands::measure_cmd(&cfg, &mut dir, out),
        Subcommand::Simulate => commands::simulate_cmd(&cfg, &mut dir, out),
        Subcommand::DriftExperiment => commands::drift_cmd(&cfg, &mut dir, out),
        Subcommand::Report => report::render(&runs).and_then(|text| {
            print!("{text}");
            dir.write_file(out, text.as_bytes()).map(|_| serde_json::json!({ "runs": runs.len() }))
        }),
    };
    let path = dir.finish(cmd, &cfg, &outcome)?;
    outcome.map(|_| path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common, runs) = match &cli.command {
        Command::Normalize(c) => (Subcommand::Normalize, c, &[][..]),
        Command::ScanResonances(c) => (Subcommand::ScanResonances, c, &[][..]),
        Command::MeasureEstimate(c) => (Subcommand::MeasureEstimate, c, &[][..]),
        Command::Simulate(c) => (Subcommand::Simulate, c, &[][..]),
        Command::DriftExperiment(c) => (Subcommand::DriftExperiment, c, &[][..]),
        Command::Report { common, runs } => (Subcommand::Report, common, runs.as_slice()),
        Command::Keys => {
            for (k, d) in config::KEYS {
                println!("{k:<18} {d}");
            }
            return ExitCode::SUCCESS;
        }
    };
    match execute(cmd, common, runs) {
        Ok(path) => {
            eprintln!("{cmd}: wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(CliError::Validation(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(m)) => {
            eprintln!("{cmd} failed: {m}");
            ExitCode::from(1)
        }
    }
}
