mod commands;
mod config;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use commands::{Failure, Outcome, EXIT_INPUT};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "bidisc", version, about = "Γ-contractions and the symmetrized bidisc")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Numerical tolerance for certificates and boundary tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Relative rank cutoff for defect spaces, ranges and kernels.
    #[arg(long, global = true, default_value_t = 1e-8)]
    rank_tol: f64,
    /// Boundary samples used when classifying polynomials.
    #[arg(long, global = true, default_value_t = 512)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Truncation depth n of dilations and block-Toeplitz models.
    #[arg(long, global = true, default_value_t = 6)]
    truncation: usize,
    /// Probe degree for banded checks on truncated models.
    #[arg(long, global = true, default_value_t = 2)]
    probe_degree: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Locate a point "(s,p)" relative to Γ.
    ClassifyPoint { point: String },
    /// Sample the zero set of a polynomial ("-" reads stdin).
    ClassifyPoly { poly: String },
    /// Certify a pair file as a Γ-contraction, or a Γ-unitary with --unitary.
    Certify {
        pair: String,
        #[arg(long)]
        unitary: bool,
    },
    /// Fundamental operator of a pair, or of its adjoint with --adjoint.
    Fundamental {
        pair: String,
        #[arg(long)]
        adjoint: bool,
    },
    /// Truncated minimal Γ-isometric dilation with a compression certificate.
    Dilate { pair: String },
    /// Split a Γ-unitary, or a pure model given by --symbol, by factors.
    Decompose {
        #[arg(required_unless_present = "symbol", conflicts_with = "symbol")]
        pair: Option<String>,
        /// JSON object {"C0": matrix, "C1": matrix}.
        #[arg(long)]
        symbol: Option<String>,
        /// Polynomial file; repeat once per factor.
        #[arg(long = "factor", required = true)]
        factors: Vec<String>,
    },
    /// Write the reference fixtures into a directory.
    Fixtures { dir: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ClassifyPoint { .. } => "classify-point",
            Command::ClassifyPoly { .. } => "classify-poly",
            Command::Certify { .. } => "certify",
            Command::Fundamental { .. } => "fundamental",
            Command::Dilate { .. } => "dilate",
            Command::Decompose { .. } => "decompose",
            Command::Fixtures { .. } => "fixtures",
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cmd {
        Command::ClassifyPoint { point } => commands::classify_point_cmd(point, cfg),
        Command::ClassifyPoly { poly } => commands::classify_poly_cmd(poly, cfg),
        Command::Certify { pair, unitary } => commands::certify_cmd(pair, *unitary, cfg),
        Command::Fundamental { pair, adjoint } => commands::fundamental_cmd(pair, *adjoint, cfg),
        Command::Dilate { pair } => commands::dilate_cmd(pair, cfg),
        Command::Decompose { pair, symbol, factors } => {
            commands::decompose_cmd(pair.as_deref(), symbol.as_deref(), factors, cfg)
        }
        Command::Fixtures { dir } => commands::fixtures_cmd(dir),
    }
}

fn emit(report: &Report, out: Option<&str>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let g = &cli.global;
    let cfg = RunConfig {
        tol: g.tol,
        rank_tol: g.rank_tol,
        samples: g.samples,
        seed: g.seed,
        truncation: g.truncation,
        probe_degree: g.probe_degree,
        output_path: g.out.clone(),
    };
    let command = cli.command.name();
    let outcome = match cfg.validate() {
        Ok(()) => run(&cli.command, &cfg),
        Err(m) => Err(Failure::Input(m)),
    };
    let (report, code) = match &outcome {
        Ok(o) => (
            Report {
                command,
                config: &cfg,
                result: Some(o.result.clone()),
                error: None,
            },
            o.code,
        ),
        Err(f) => {
            eprintln!("bidisc {command}: {}", f.message());
            (
                Report {
                    command,
                    config: &cfg,
                    result: None,
                    error: Some(f.message()),
                },
                f.code(),
            )
        }
    };
    if let Err(e) = emit(&report, cfg.output_path.as_deref()) {
        eprintln!("bidisc {command}: writing report: {e}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    ExitCode::from(code as u8)
}
