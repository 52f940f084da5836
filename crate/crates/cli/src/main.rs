use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use brieskorn_core::commands::{self, DMethod, OracleCheckOptions};
use brieskorn_core::oracle::{DEFAULT_ENUMERATION_BUDGET, DEFAULT_STEP_BUDGET};
use brieskorn_core::{builtin_family, verify_family, Error, FamilySpec, OracleConfig, Triplet};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "brieskorn", version, about = "d-invariants of Brieskorn spheres Sigma(p,q,r) with pq + pr - qr = 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// d-invariant of one triplet
    D {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// All triplets with smallest entry p, with their d-invariants
    Triplets {
        p: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a built-in or configured family against its closed form
    Family {
        /// Built-in family: 1..5, consecutive, fibonacci
        #[arg(required_unless_present = "config", conflicts_with = "config")]
        name: Option<String>,
        /// JSON family config {name, p, q, r, expected_d?, n_min?}
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inclusive range such as 1..50
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<i64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Per-m slices of the maximizing region (odd p)
    Region {
        #[command(flatten)]
        triplet: TripletArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// The plumbing graph of Sigma(p,q,r)
    Graph {
        #[command(flatten)]
        triplet: TripletArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fast method against the oracle over all feasible triplets with p <= 5
    OracleCheck {
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Perturb the -p weight before running the oracle
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct TripletArgs {
    p: u64,
    q: u64,
    r: u64,
}

impl TripletArgs {
    fn triplet(&self) -> Result<Triplet, Error> {
        Triplet::new(self.p, self.q, self.r)
    }
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Cap on the number of initial classes the oracle may enumerate
    #[arg(long, env = "BRIESKORN_ORACLE_BUDGET", default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    /// Cap on the number of moves in one full path
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    step_budget: u64,
}

impl BudgetArgs {
    fn config(&self) -> OracleConfig {
        OracleConfig { enumeration_budget: self.budget, step_budget: self.step_budget }
    }
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fast,
    Oracle,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Table,
}

fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    Ok(a..=b)
}

enum Failure {
    Core(Error),
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::StepBudgetExceeded(_) => EXIT_BUDGET,
        Error::Mismatch(_) => EXIT_MISMATCH,
        Error::Io(_) | Error::Overflow(_) => EXIT_FAILURE,
        _ => EXIT_INVALID,
    }
}

fn emit(out: &OutArg, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Core(e.into())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Core(e.into())),
    }
}

fn json_text<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::D { triplet, method, budgets, format, out } => {
            let t = triplet.triplet()?;
            let method = match method {
                MethodArg::Fast => DMethod::Fast,
                MethodArg::Oracle => DMethod::Oracle,
                MethodArg::Both => DMethod::Both,
            };
            let (res, agreement) = commands::compute_d(&t, method, &budgets.config())?;
            let text = match format {
                Format::Json => json_text(&commands::d_json(&res, agreement))?,
                Format::Table => commands::d_table(&res),
                _ => return Err(Failure::Usage("d supports --format json or table".into())),
            };
            emit(&out, &text)
        }
        Command::Triplets { p, format, out } => {
            let rows = commands::triplet_rows(p)?;
            let text = match format {
                Format::Csv => commands::triplets_csv(&rows)?,
                Format::Json => json_text(&rows)?,
                Format::Table => commands::triplets_table(&rows),
                Format::Dot => return Err(Failure::Usage("triplets has no dot output".into())),
            };
            emit(&out, &text)
        }
        Command::Family { name, config, n, format, out } => {
            let spec = match (name, config) {
                (_, Some(path)) => {
                    let text = fs::read_to_string(&path).map_err(Error::from)?;
                    FamilySpec::from_json(&text)?
                }
                (Some(name), None) => builtin_family(&name)
                    .ok_or_else(|| Failure::Usage(format!("unknown family {name:?}")))?,
                (None, None) => unreachable!("clap requires a name or --config"),
            };
            let report = verify_family(&spec, n)?;
            let text = match format {
                Format::Csv => commands::family_csv(&report)?,
                Format::Json => json_text(&report)?,
                _ => return Err(Failure::Usage("family supports --format csv or json".into())),
            };
            emit(&out, &text)?;
            let summary = commands::family_summary(&report);
            eprintln!("{summary}");
            if report.mismatches() > 0 {
                return Err(Failure::Mismatch(summary));
            }
            Ok(())
        }
        Command::Region { triplet, out } => {
            let (csv, summary) = commands::region_report(&triplet.triplet()?)?;
            emit(&out, &csv)?;
            eprintln!("{summary}");
            Ok(())
        }
        Command::Graph { triplet, format, out } => {
            let t = triplet.triplet()?;
            let text = match format {
                Format::Json => commands::graph_json(&t)? + "\n",
                Format::Dot => commands::graph_dot(&t)?,
                _ => return Err(Failure::Usage("graph supports --format json or dot".into())),
            };
            emit(&out, &text)
        }
        Command::OracleCheck { budgets, inject_fault, out } => {
            let opts = OracleCheckOptions {
                config: budgets.config(),
                inject_fault,
                ..OracleCheckOptions::default()
            };
            let report = commands::oracle_check(&opts)?;
            emit(&out, &json_text(&report)?)?;
            if report.failures > 0 {
                return Err(Failure::Mismatch(format!("{} checks failed", report.failures)));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
