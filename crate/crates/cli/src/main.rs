//! `covertab` command-line front end.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covertab::{Equivalence, Shape, Verdict};

#[derive(Debug, Parser)]
#[command(name = "covertab", version, about = "Analyse and tabulate abelian covers of the projective line")]
struct Cli {
    /// Worker threads (overrides COVERTAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Genus, group, eigenspace table and verdict of one datum.
    Analyze(AnalyzeArgs),
    /// Sweep a box of data and write one CSV row per isomorphism class.
    Enumerate(EnumerateArgs),
    /// Special single-row families up to the given bounds.
    CyclicTable(CyclicTableArgs),
    /// Classify every 2x5 datum of shapes I-IV and list those not excluded.
    ScanTheorem2(ScanArgs),
    /// Hasse-Witt blocks and ordinarity in characteristic p.
    Hw(HwArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct DatumInput {
    /// Datum as `N:row/row` text or `{"N":..,"A":..}` JSON.
    datum: Option<String>,
    /// Read the datum from a file instead.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Both,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: DatumInput,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Debug, Args)]
struct MetaArgs {
    /// Omit the timestamp so output is byte-identical across runs.
    #[arg(long)]
    no_meta: bool,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    /// Modulus; repeat or comma-separate for several.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    moduli: Vec<u32>,
    /// Row count or inclusive range `a..b`.
    #[arg(long, default_value = "1")]
    m: Span,
    /// Branch point count or inclusive range `a..b`.
    #[arg(long)]
    s: Span,
    #[arg(long)]
    shape: Option<Shape>,
    /// Genus or inclusive range `a..b`.
    #[arg(long)]
    genus: Option<Span>,
    /// Keep only data whose rows are (or with `false`, are not) independent.
    #[arg(long)]
    independent: Option<bool>,
    #[arg(long)]
    verdict: Option<Verdict>,
    #[arg(long, default_value_t = Equivalence::RowSpanColumns)]
    equivalence: Equivalence,
    /// Refuse boxes with more raw matrices than this.
    #[arg(long, default_value_t = 50_000_000)]
    max_raw: u128,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Manifest destination; defaults to `<output>.manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    meta: MetaArgs,
}

#[derive(Debug, Args)]
struct CyclicTableArgs {
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(2..=200))]
    nmax: u32,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(4..=12))]
    smax: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    meta: MetaArgs,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Moduli to scan.
    #[arg(long = "N", value_delimiter = ',', default_values_t = [3, 4, 5, 6])]
    moduli: Vec<u32>,
    /// Also scan data with a row sharing a factor with N.
    #[arg(long)]
    all_rows: bool,
    #[arg(long, default_value_t = Equivalence::RowSpanColumns)]
    equivalence: Equivalence,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    meta: MetaArgs,
}

#[derive(Debug, Args)]
struct HwArgs {
    #[command(flatten)]
    input: DatumInput,
    /// Prime with p = 1 mod N.
    #[arg(long)]
    p: u64,
    /// Comma-separated distinct residues, one per branch point.
    #[arg(long, value_delimiter = ',', conflicts_with = "scan")]
    points: Option<Vec<u64>>,
    /// Ordinarity over many point tuples.
    #[arg(long)]
    scan: bool,
    /// Tuples drawn when the scan is not exhaustive.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Force an exhaustive scan regardless of size.
    #[arg(long)]
    exhaustive: bool,
    /// Polynomial entries with the points left as unknowns.
    #[arg(long)]
    symbolic: bool,
    /// Largest number of monomials a symbolic block may have.
    #[arg(long, default_value_t = 1_000_000)]
    term_limit: u128,
    /// Restrict to one character, comma-separated.
    #[arg(long, value_delimiter = ',')]
    character: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// `a` or `a..b`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    lo: u64,
    hi: u64,
}

impl std::str::FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => (parse(s)?, parse(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Span { lo, hi })
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), commands::CliError> {
    let from_env = std::env::var("COVERTAB_THREADS").ok().map(|v| {
        v.parse::<usize>().map_err(|_| commands::CliError::Usage(format!("COVERTAB_THREADS={v:?} is not a count")))
    });
    let threads = match (flag, from_env) {
        (Some(n), _) => Some(n),
        (None, Some(parsed)) => Some(parsed?),
        (None, None) => None,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(commands::CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| commands::CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| match cli.command {
        Command::Analyze(args) => commands::analyze(args),
        Command::Enumerate(args) => commands::enumerate(args),
        Command::CyclicTable(args) => commands::cyclic_table(args),
        Command::ScanTheorem2(args) => commands::scan_theorem2(args),
        Command::Hw(args) => commands::hw(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.name(), e);
            ExitCode::from(e.exit_code())
        }
    }
}
