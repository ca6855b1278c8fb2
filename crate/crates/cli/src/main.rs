//! `magneto`: frustration, isoperimetric and spectral computations on
//! magnetic graphs from the command line.
//!
//! Every invocation prints one line of JSON on stdout:
//! `{"command", "inputs", "results", "status", "wall_time"}`, and a short
//! human summary on stderr. Exit status is 0 for OK, 2 when a verification
//! suite finds a violated inequality and 1 on any error.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Parser)]
#[command(name = "magneto", version, about = "Frustration, isoperimetry and spectra of magnetic graphs")]
pub struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Record elapsed seconds in `wall_time` (otherwise null, keeping output reproducible).
    #[arg(long, global = true)]
    timing: bool,

    /// Evaluation budget for exact frustration enumeration.
    #[arg(long, global = true, env = "MAGNETO_BUDGET")]
    budget: Option<u128>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    /// Use coordinate descent instead of exact enumeration (upper bounds only).
    #[arg(long)]
    heuristic: bool,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frustration index of the whole graph or of a vertex subset.
    Frustration {
        graph: PathBuf,
        /// Hexadecimal vertex bitmask, or `V` for all vertices.
        #[arg(long)]
        subset: Option<String>,
        #[command(flatten)]
        heuristic: HeuristicArgs,
        /// Round circle signatures to the K-th roots of unity and enumerate there (uncertified).
        #[arg(long, value_name = "K")]
        discretize: Option<u32>,
    },
    /// Signed Cheeger constant h by subset enumeration.
    Cheeger {
        graph: PathBuf,
        /// Report the quotient of every subset.
        #[arg(long)]
        profile: bool,
        #[arg(long, default_value_t = magneto::isoperimetry::DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
        #[command(flatten)]
        heuristic: HeuristicArgs,
    },
    /// Isoperimetric constant c_δ for a dimension δ > 1 (`inf` gives h).
    Isoperimetric {
        graph: PathBuf,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        profile: bool,
        #[arg(long, default_value_t = magneto::isoperimetry::DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
        #[command(flatten)]
        heuristic: HeuristicArgs,
    },
    /// Signed Cartesian product of two or more graphs.
    Product {
        #[arg(required = true, num_args = 2..)]
        graphs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Eigenvalues of the normalized magnetic Laplacian.
    Spectrum { graph: PathBuf },
    /// Heat kernel e^{-tΔ}.
    Heat {
        graph: PathBuf,
        #[arg(long)]
        t: f64,
        /// Drop the signature first.
        #[arg(long)]
        unsigned: bool,
    },
    /// Check the inequalities numerically on random functions.
    Verify {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value = "3")]
        delta: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed forms for reference families.
    Oracle {
        #[command(subcommand)]
        family: Oracle,
    },
}

#[derive(Debug, Subcommand)]
pub enum Oracle {
    /// Unit-weight cycle C_n, μ ≡ 1, with signature ξ_k^j.
    Cycle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        j: i64,
        #[arg(long, default_value = "3")]
        delta: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Coarea,
    Sobolev,
    Kato,
    Domination,
    Trace,
    Product,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Ok,
    Violation,
    Error,
}

impl Status {
    fn exit_code(self) -> ExitCode {
        match self {
            Status::Ok => ExitCode::SUCCESS,
            Status::Violation => ExitCode::from(2),
            Status::Error => ExitCode::from(1),
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    inputs: String,
    results: Value,
    status: Status,
    wall_time: Option<f64>,
}

/// What a subcommand hands back to the driver.
pub struct Outcome {
    pub results: Value,
    pub summary: String,
    pub status: Status,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Frustration { .. } => "frustration",
            Command::Cheeger { .. } => "cheeger",
            Command::Isoperimetric { .. } => "isoperimetric",
            Command::Product { .. } => "product",
            Command::Spectrum { .. } => "spectrum",
            Command::Heat { .. } => "heat",
            Command::Verify { .. } => "verify",
            Command::Oracle { .. } => "oracle",
        }
    }

    fn files(&self) -> Vec<&PathBuf> {
        match self {
            Command::Frustration { graph, .. }
            | Command::Cheeger { graph, .. }
            | Command::Isoperimetric { graph, .. }
            | Command::Spectrum { graph }
            | Command::Heat { graph, .. }
            | Command::Verify { graph, .. } => vec![graph],
            Command::Product { graphs, .. } => graphs.iter().collect(),
            Command::Oracle { .. } => vec![],
        }
    }
}

/// SHA-256 over the parsed arguments and the bytes of every input file.
fn digest(cli: &Cli) -> String {
    let mut h = Sha256::new();
    h.update(format!("{:?}", cli.command).as_bytes());
    h.update(format!("{:?}", cli.budget).as_bytes());
    for path in cli.command.files() {
        h.update(b"\0");
        if let Ok(bytes) = std::fs::read(path) {
            h.update(&bytes);
        }
    }
    format!("sha256:{:x}", h.finalize())
}

fn emit(report: &RunReport, summary: &str) -> ExitCode {
    println!("{}", serde_json::to_string(report).expect("report serializes"));
    eprintln!("{summary}");
    report.status.exit_code()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let report = RunReport {
                command: "",
                inputs: String::new(),
                results: serde_json::json!({ "error": format!("PARSE_ERROR: {}", message.trim()) }),
                status: Status::Error,
                wall_time: None,
            };
            return emit(&report, &message);
        }
    };
    let start = Instant::now();
    if let Some(n) = cli.threads {
        // the global pool can only be set once per process; a failure just keeps the default
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let outcome = commands::run(&cli).unwrap_or_else(|e| Outcome {
        results: serde_json::json!({ "error": e.to_string() }),
        summary: format!("error: {e}"),
        status: Status::Error,
    });
    let report = RunReport {
        command: cli.command.name(),
        inputs: digest(&cli),
        results: outcome.results,
        status: outcome.status,
        wall_time: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    emit(&report, &outcome.summary)
}
