//! `motzkin`: exact laws, exact sampling, limit chains, spectral certificates and
//! convergence ladders for weighted Motzkin paths.
//!
//! Exit codes: 0 success, 1 configuration or model error, 2 failed certificate.
//! Errors are printed to stderr as JSON.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{parse_ini, CommandKind, RunConfig};

#[derive(Parser)]
#[command(name = "motzkin", version, about = "Weighted Motzkin paths: exact laws, sampling, limit chains, certificates")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact finite-L laws, weight tables and the end-point pgf.
    Exact(Flags),
    /// Exact sampling of paths with empirical and exact tables.
    Sample(Flags),
    /// Limit-chain kernel rows, initial laws and trajectories.
    Limit(Flags),
    /// Spectral certificates with JSON verdicts.
    Verify(Flags),
    /// Total-variation ladders along increasing L.
    Converge(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// INI file with [common] and per-command sections; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Level weight σ as an exact decimal or p/q (a comma list for `verify`).
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Left boundary measure, e.g. finite:1,1 or geom:0.5.
    #[arg(long)]
    alpha: Option<String>,
    /// Right boundary measure, e.g. finite:1,1 or geom:0.5.
    #[arg(long)]
    beta: Option<String>,
    /// Path length L.
    #[arg(long)]
    length: Option<String>,
    /// Comma-separated increasing lengths.
    #[arg(long)]
    ladder: Option<String>,
    /// Number of steps K in finite-dimensional laws.
    #[arg(long = "K")]
    k: Option<String>,
    /// Right geometric ratio ρ1 (a comma list of ρ for `verify`).
    #[arg(long)]
    rho1: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Certificate tolerance override.
    #[arg(long)]
    tol: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Ladder for `converge`: theorem1, theorem2 or zero-sigma.
    #[arg(long)]
    theorem: Option<String>,
    /// Comma-separated certificate names for `verify` (default: all).
    #[arg(long)]
    certificates: Option<String>,
    /// Level C of the tightness probe Pr(γ_L <= C).
    #[arg(long)]
    tightness_level: Option<String>,
}

impl Flags {
    fn to_kv(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("sigma", &self.sigma),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("length", &self.length),
            ("ladder", &self.ladder),
            ("k", &self.k),
            ("rho1", &self.rho1),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("tol", &self.tol),
            ("out", &self.out),
            ("format", &self.format),
            ("theorem", &self.theorem),
            ("certificates", &self.certificates),
            ("tightness_level", &self.tightness_level),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

fn fail(code: u8, value: serde_json::Value) -> ExitCode {
    eprintln!("{value}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(1, json!({ "error": { "kind": "usage", "detail": e.to_string().trim_end() } }));
        }
    };
    let (command, flags) = match cli.command {
        Cmd::Exact(f) => (CommandKind::Exact, f),
        Cmd::Sample(f) => (CommandKind::Sample, f),
        Cmd::Limit(f) => (CommandKind::Limit, f),
        Cmd::Verify(f) => (CommandKind::Verify, f),
        Cmd::Converge(f) => (CommandKind::Converge, f),
    };
    let file = match &flags.config {
        None => None,
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match parse_ini(&text) {
                Ok(s) => Some(s),
                Err(e) => return fail(1, json!({ "error": { "kind": "config", "detail": format!("{}: {e}", path.display()) } })),
            },
            Err(e) => return fail(1, json!({ "error": { "kind": "config", "detail": format!("{}: {e}", path.display()) } })),
        },
    };
    let config = match RunConfig::from_layers(command, file.as_ref(), &flags.to_kv()) {
        Ok(c) => c,
        Err(e) => return fail(1, json!({ "error": { "kind": "config", "detail": e.0 } })),
    };
    match commands::run(&config) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.exit_code() as u8, e.to_json()),
    }
}
