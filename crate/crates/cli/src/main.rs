mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mexlab::Rational;

use output::Failure;

/// Exact analysis of DSIC mechanisms on finite type spaces.
///
/// Verdicts are printed as JSON certificates on stdout and summarized on
/// stderr. Exit status: 0 when the property holds, 1 when it fails (with a
/// certificate), 2 on usage or validation errors.
#[derive(Debug, Parser)]
#[command(name = "mexlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate an instance file.
    Validate { file: PathBuf },
    /// Check an incentive property of an instance.
    Check {
        #[arg(value_enum)]
        property: Property,
        file: PathBuf,
    },
    /// Payment synthesis.
    Payments {
        #[command(subcommand)]
        action: PaymentsAction,
    },
    /// Range of p(a) - p(b) over all payments implementing one column.
    Paylock {
        file: PathBuf,
        #[arg(long)]
        agent: usize,
        /// Two own-type indices, `a,b`.
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
        /// Opponent type indices in agent order, comma separated.
        #[arg(long, value_parser = parse_list, default_value = "")]
        opp: Indices,
    },
    /// Answer one query of the hull extension.
    Extend {
        #[arg(value_enum)]
        method: Method,
        file: PathBuf,
        /// JSON list with one entry per agent: a type index or {"hull": [...]}.
        #[arg(long)]
        query: PathBuf,
    },
    /// Check the hull extension on random witnesses.
    Spotcheck {
        #[arg(value_enum)]
        method: Method,
        file: PathBuf,
        /// Random witnesses per agent, in addition to all pairwise midpoints.
        #[arg(long, default_value_t = 20)]
        witnesses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether the rule extends to a set of hull witnesses.
    Inext(InextArgs),
    /// Single-agent optimal revenue.
    Revenue {
        #[command(subcommand)]
        action: RevenueAction,
    },
    /// Build a hard-coded fixture and report its sanity checks.
    Fixtures {
        #[arg(value_enum)]
        id: FixtureKind,
        /// Write the instance file here.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        eps: Rational,
    },
    /// Linear programs in the text format.
    Lp {
        #[command(subcommand)]
        action: LpAction,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Property {
    Wm,
    Cm,
    Dsic,
    Ir,
}

#[derive(Debug, Subcommand)]
enum PaymentsAction {
    /// Payments from shortest-path potentials.
    Synth {
        file: PathBuf,
        /// Maximal payments subject to individual rationality.
        #[arg(long)]
        ir: bool,
        /// Write the instance with the synthesized payments here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Zero,
    Ssf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InextMode {
    /// Enumerate every deterministic assignment.
    Det,
    /// Solve the randomized-extension LP.
    RandLp,
}

#[derive(Debug, Args)]
struct InextArgs {
    #[arg(value_enum)]
    mode: InextMode,
    file: PathBuf,
    /// JSON list with one list per agent of {"hull": [...]} entries.
    #[arg(
        long,
        conflicts_with = "paper_witness",
        required_unless_present = "paper_witness"
    )]
    witness: Option<PathBuf>,
    /// Barycenter of the first, second and fourth type of a fixture.
    #[arg(long)]
    paper_witness: bool,
    /// Put the fixture witness on the second agent instead of the first.
    #[arg(long, requires = "paper_witness")]
    symmetric: bool,
    /// Largest number of deterministic assignments to enumerate.
    #[arg(long, default_value_t = mexlab::inextensibility::DEFAULT_CAP)]
    cap: u64,
    /// Write every rejection certificate (det) or the LP (rand-lp) here.
    #[arg(long)]
    evidence: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum RevenueAction {
    /// Optimal revenue for the single agent of an instance file.
    Opt {
        file: PathBuf,
        /// JSON list with one probability per type.
        #[arg(long)]
        dist: PathBuf,
    },
    /// Revenue on the support against the support plus the barycenter.
    Gap {
        /// One or more values, comma separated.
        #[arg(long, value_parser = parse_list, default_value = "2,5,10,50,100")]
        k: Indices,
        #[arg(long, value_parser = parse_rational, default_value = "1/200")]
        eps: Rational,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixtureKind {
    Det,
    Rand,
    Revenue,
}

#[derive(Debug, Subcommand)]
enum LpAction {
    Solve { file: PathBuf },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

/// Comma-separated indices, kept as one clap value.
#[derive(Debug, Clone)]
struct Indices(Vec<usize>);

fn parse_list(s: &str) -> Result<Indices, String> {
    if s.trim().is_empty() {
        return Ok(Indices(Vec::new()));
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Indices)
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    match parse_list(s)?.0.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err("expected two indices, `a,b`".into()),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("MEXLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "MEXLAB_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(cli.command));
    match result {
        Ok(out) => out.emit(),
        Err(f) => f.emit(),
    }
}
