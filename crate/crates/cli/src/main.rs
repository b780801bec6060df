use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Ricci flow and bracket flow on nilpotent metric Lie algebras.
#[derive(Debug, Parser)]
#[command(name = "nilflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the Jacobi identity and nilpotency.
    Validate(Opts),
    /// Print the index set, Y, U, the Ricci vector and soliton data.
    Info(Opts),
    /// Search for a soliton metric, or report why none exists.
    Soliton(Opts),
    /// Integrate the Ricci flow and the bracket flow.
    Flow(Opts),
    /// Integrate the projectivized bracket flow.
    Projective(Opts),
    /// Enumerate equilibria of the projectivized bracket flow.
    Equilibria(Opts),
    /// List conserved monomials of the Ricci flow.
    Invariants(Opts),
    /// List catalog entries, or export one as JSON.
    Catalog(CatalogOpts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false, args = ["catalog", "algebra", "gram"])]
struct Source {
    /// Catalog entry, e.g. h3, p5, r6, heisenberg(4), l4b_gram.
    #[arg(long)]
    catalog: Option<String>,
    /// Algebra JSON file.
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Gram matrix JSON file ({"U": [[...]]}).
    #[arg(long)]
    gram: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Opts {
    #[command(flatten)]
    source: Source,
    /// Metric JSON file ({"q": [...]}); defaults to the catalog soliton metric or all ones.
    #[arg(long, conflicts_with = "gram")]
    metric: Option<PathBuf>,
    /// Structure constants for r6, comma separated, in dictionary order.
    #[arg(long, value_delimiter = ',', requires = "catalog")]
    alphas: Vec<String>,
    /// Final time (time-changed time for projective runs).
    #[arg(long, default_value_t = 10.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Relative tolerance of the soliton criterion.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Number of evenly spaced output samples.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Initial projective coordinates, comma separated.
    #[arg(long, value_delimiter = ',')]
    s0: Vec<f64>,
    /// Run the bracket flow normalized to the simplex instead of the Ricci flow.
    #[arg(long)]
    normalized: bool,
    /// Largest m - 1 for equilibrium enumeration.
    #[arg(long, default_value_t = 20)]
    max_m: usize,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Number of random initial conditions.
    #[arg(long, requires = "seed")]
    sweep: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct CatalogOpts {
    /// Entry to export; lists all entries when absent.
    name: Option<String>,
    /// Directory receiving NAME.algebra.json, NAME.metric.json and NAME.gram.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn configure_threads() {
    if let Some(n) = std::env::var("NILFLOW_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Validate(o) => commands::validate(o),
        Command::Info(o) => commands::info(o),
        Command::Soliton(o) => commands::soliton(o),
        Command::Flow(o) => commands::flow(o),
        Command::Projective(o) => commands::projective(o),
        Command::Equilibria(o) => commands::equilibria(o),
        Command::Invariants(o) => commands::invariants(o),
        Command::Catalog(o) => commands::catalog(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
