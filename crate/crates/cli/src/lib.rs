//! Command-line front end. Every subcommand runs one computation and
//! appends one JSONL record to the ledger (stdout unless `--out` is given).

mod commands;
pub mod ledger;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kwise_core::ratio::parse_rational;
use kwise_core::{KwiseMode, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn parse_mode(s: &str) -> Result<KwiseMode, String> {
    s.parse().map_err(|e: kwise_core::Error| e.to_string())
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Comma separated 1-based elements, e.g. `1,2,4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elements(pub Vec<usize>);

fn parse_elements(s: &str) -> Result<Elements, String> {
    if s.trim().is_empty() {
        return Ok(Elements(Vec::new()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad element {t:?}")))
        .collect::<Result<_, _>>()
        .map(Elements)
}

#[derive(Parser, Debug)]
#[command(name = "kwise", version, about = "Experiments on maximal k-wise intersecting families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Append records to this file instead of printing them.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Omit timestamps and wall-clock timings.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// k-wise intersecting and maximality verdicts for a family.
    Check(FamilyArgs),
    /// Greedy extension to a maximal family, smallest addable mask first.
    Closure(FamilyArgs),
    /// Build a construction or evaluate the size formulas.
    Construct(ConstructArgs),
    /// Count the subsets covered by disjoint unions of at most k members.
    GenCoverage(CoverageArgs),
    /// Disjointness graph, optionally made bipartite by deleting edges.
    Disjointness(DisjointnessArgs),
    /// Stability statistics of a pair of families.
    Stats(StatsArgs),
    /// Exact minimum size of a maximal family for small n.
    SearchMin(SearchArgs),
    /// Counting claims for a family against the pair of cubes on S.
    Audit(AuditArgs),
    /// CSV tables from a ledger file.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "distinct", value_parser = parse_mode)]
    pub mode: KwiseMode,
    /// Hex bitmap, or `@path` to read it from a file.
    #[arg(long)]
    pub family: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    LinkedCubes,
    PairOfCubes,
    SeriesOfCubes,
    Bounds,
}

impl ConstructKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstructKind::LinkedCubes => "linked-cubes",
            ConstructKind::PairOfCubes => "pair-of-cubes",
            ConstructKind::SeriesOfCubes => "series-of-cubes",
            ConstructKind::Bounds => "bounds",
        }
    }
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: ConstructKind,
    #[arg(long)]
    pub n: usize,
    /// Elements of S; defaults to 1..=floor(n/2).
    #[arg(long, value_parser = parse_elements)]
    pub s: Option<Elements>,
    /// Number of blocks for a series, or k for the bounds.
    #[arg(long)]
    pub k: Option<usize>,
    /// Blocks such as `1,2|3,4`; defaults to the balanced partition.
    #[arg(long)]
    pub partition: Option<String>,
    /// Also run the k-wise and maximality checks with this k.
    #[arg(long)]
    pub check_k: Option<usize>,
    #[arg(long, default_value = "distinct", value_parser = parse_mode)]
    pub mode: KwiseMode,
    /// Constants of the lower and upper reference curves.
    #[arg(long, default_value = "1", value_parser = parse_rat)]
    pub c: Rational,
    #[arg(long, default_value = "1", value_parser = parse_rat)]
    pub d: Rational,
}

#[derive(Args, Debug)]
pub struct CoverageArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub family: String,
    /// Also decide whether the family is a (1-eps)-k-generator.
    #[arg(long, value_parser = parse_rat)]
    pub eps: Option<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BipartizeMode {
    Exact,
    Heuristic,
}

#[derive(Args, Debug)]
pub struct DisjointnessArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub family: String,
    /// Second side; builds the bipartite graph between the two families.
    #[arg(long)]
    pub family2: Option<String>,
    #[arg(long, value_enum)]
    pub bipartize: Option<BipartizeMode>,
    #[arg(long, default_value_t = 100_000)]
    pub max_moves: usize,
    /// Write the edge list to this file.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub elem: usize,
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, default_value = "1/3", value_parser = parse_rat)]
    pub threshold: Rational,
    /// Also audit the size premises with this relative slack.
    #[arg(long, value_parser = parse_rat)]
    pub slack: Option<Rational>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "distinct", value_parser = parse_mode)]
    pub mode: KwiseMode,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 3600.0)]
    pub budget: f64,
    #[arg(long)]
    pub no_symmetry: bool,
    /// Report every minimum witness up to isomorphism.
    #[arg(long)]
    pub all: bool,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = parse_elements)]
    pub s: Elements,
    #[arg(long, value_parser = parse_rat)]
    pub eps: Rational,
    /// Defaults to the linked cubes on S.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    pub ledger: PathBuf,
    #[arg(long, default_value = "tables")]
    pub tables_dir: PathBuf,
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    match commands::execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_DOMAIN
        }
    }
}
