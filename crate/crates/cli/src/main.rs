mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use heron_descent::localsolve::{oracle_check, LocalConfig};
use heron_descent::pointsearch::{search_points, verify_descent_image, SearchConfig};
use heron_descent::selmer::{classify_theorem, compare, compute_selmer, SelmerConfig, SelmerError};
use heron_descent::tables::{check_row, TableError, TableFile};
use heron_descent::HeronCurve;

#[derive(Parser)]
#[command(name = "heron-descent", version, about = "2-descent for y^2 = x(x - 2^m n^2)(x + 2^m)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum residue-disc depth at every prime.
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl RunArgs {
    fn selmer_config(&self) -> SelmerConfig {
        SelmerConfig {
            local: LocalConfig { seed: self.seed, depth_override: self.depth, ..LocalConfig::default() },
            workers: self.workers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Selmer group, rank bound and theorem comparison for one curve.
    Compute {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Recompute every fixture row and compare with the stored tables.
    VerifyTables {
        /// Restrict to one row, e.g. `n=79,m-parity=odd`.
        #[arg(long)]
        row: Option<String>,
        /// Table file to use instead of the built-in one.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// One CSV row per admissible n in a range.
    Scan {
        #[arg(long)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Search rational points and sandwich the rank.
    Points {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 10_000)]
        num_bound: u64,
        #[arg(long, default_value_t = 100)]
        den_bound: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the local solver with the brute-force lifting oracle.
    OracleCheck {
        /// Defaults to every fixture curve.
        #[arg(long, requires = "m")]
        n: Option<u64>,
        #[arg(long, requires = "n")]
        m: Option<u32>,
        #[arg(long, default_value_t = 50)]
        max_prime: u64,
        #[command(flatten)]
        run: RunArgs,
    },
}

const EXIT_INVALID: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INVALID, message: e.to_string() }
    }
}

impl From<SelmerError> for Failure {
    fn from(e: SelmerError) -> Self {
        let code = match e {
            SelmerError::UndecidedVerdict { .. } => EXIT_UNDECIDED,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<TableError> for Failure {
    fn from(e: TableError) -> Self {
        match e {
            TableError::Selmer(s) => s.into(),
            other => Failure::invalid(other),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::invalid(format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn curve(n: u64, m: u32) -> Result<HeronCurve, Failure> {
    HeronCurve::new(n, m).map_err(Failure::invalid)
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Compute { n, m, run } => {
            let c = curve(n, m)?;
            let selmer = compute_selmer(&c, &run.selmer_config())?;
            let theorem = classify_theorem(&c);
            let cmp = compare(&selmer, &theorem);
            print!("{}", report::compute(&selmer, &theorem, &cmp, run.format));
            Ok(0)
        }
        Command::VerifyTables { row, fixtures, run } => {
            let file = match fixtures {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    TableFile::parse(&text)?
                }
                None => TableFile::builtin(),
            };
            let filter = row.as_deref().map(parse_row_filter).transpose()?;
            let mut checks = Vec::new();
            for r in &file.row {
                if let Some((fn_, fp)) = &filter {
                    if r.n != *fn_ || fp.as_deref().is_some_and(|p| p != r.parity()) {
                        continue;
                    }
                }
                for m in r.exponents() {
                    checks.push(check_row(r, m, &run.selmer_config())?);
                }
            }
            if checks.is_empty() {
                return Err(Failure::invalid("no fixture row matches the filter"));
            }
            print!("{}", report::tables(&checks, run.format));
            Ok(if checks.iter().all(|c| c.matches()) { 0 } else { EXIT_INVALID })
        }
        Command::Scan { n_min, n_max, m, run } => {
            if n_min > n_max {
                return Err(Failure::invalid(format!("empty range: n-min {n_min} > n-max {n_max}")));
            }
            if !(1..=40).contains(&m) {
                return Err(Failure::invalid(heron_descent::CurveError::MRange(m)));
            }
            let mut out = String::from("n,q,k,dimension,rank_bound,theorem_applicable,agrees\n");
            let mut code = 0;
            let first = n_min.max(3) | 1;
            for n in (first..=n_max).step_by(2) {
                let Ok(c) = HeronCurve::new(n, m) else { continue };
                let theorem = classify_theorem(&c);
                match compute_selmer(&c, &run.selmer_config()) {
                    Ok(s) => {
                        let cmp = compare(&s, &theorem);
                        let agrees = cmp.agrees.map_or("".to_string(), |a| a.to_string());
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            n, c.q(), c.k(), s.dimension, s.rank_upper_bound, theorem.applicable, agrees
                        ));
                    }
                    Err(SelmerError::UndecidedVerdict { pair, place }) => {
                        eprintln!("n={n}: undecided verdict for {pair} at {place}");
                        out.push_str(&format!("{},{},{},undecided,undecided,{},\n", n, c.q(), c.k(), theorem.applicable));
                        code = EXIT_UNDECIDED;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            print!("{out}");
            Ok(code)
        }
        Command::Points { n, m, num_bound, den_bound, run } => {
            let c = curve(n, m)?;
            if num_bound == 0 || den_bound == 0 {
                return Err(Failure::invalid("bounds must be at least 1"));
            }
            let cfg = SearchConfig { numerator_bound: num_bound, denominator_bound: den_bound, workers: run.workers };
            let points = search_points(&c, &cfg);
            let selmer = compute_selmer(&c, &run.selmer_config())?;
            let rep = verify_descent_image(&c, &points, &selmer).map_err(Failure::invalid)?;
            print!("{}", report::points(&c, &rep, run.format));
            Ok(0)
        }
        Command::OracleCheck { n, m, max_prime, run } => {
            let curves: Vec<HeronCurve> = match (n, m) {
                (Some(n), Some(m)) => vec![curve(n, m)?],
                _ => {
                    let file = TableFile::builtin();
                    let mut v = Vec::new();
                    for r in &file.row {
                        for m in r.exponents() {
                            v.push(r.curve(m)?);
                        }
                    }
                    v
                }
            };
            let local = run.selmer_config().local;
            let mut rows = Vec::new();
            for c in &curves {
                rows.extend(oracle_check(c, &local, max_prime, run.workers));
            }
            print!("{}", report::oracle(&rows, run.format));
            Ok(if rows.iter().any(|r| r.undecided > 0) {
                EXIT_UNDECIDED
            } else if rows.iter().all(|r| r.ok()) {
                0
            } else {
                EXIT_INVALID
            })
        }
    }
}

/// `n=79,m-parity=odd` into `(79, Some("odd"))`.
fn parse_row_filter(s: &str) -> Result<(u64, Option<String>), Failure> {
    let mut n = None;
    let mut parity = None;
    for part in s.split(',') {
        match part.split_once('=') {
            Some(("n", v)) => n = Some(v.trim().parse::<u64>().map_err(Failure::invalid)?),
            Some(("m-parity", v)) if v == "odd" || v == "even" => parity = Some(v.to_string()),
            _ => return Err(Failure::invalid(format!("bad row filter component `{part}`"))),
        }
    }
    let n = n.ok_or_else(|| Failure::invalid("row filter needs n=<value>"))?;
    Ok((n, parity))
}
