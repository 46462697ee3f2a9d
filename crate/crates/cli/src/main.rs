use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use projclass_core::classify::{self, DEFAULT_L_BOUND, DEFAULT_M_MAX};
use projclass_core::cohom::{euler_class, ChernVector};
use projclass_core::endo::{self, SimConfig, DEFAULT_DEPTH, DEFAULT_ENTRY_CAP, DEFAULT_WINDOW};
use projclass_core::oracle::{self, Mode, OracleBounds};
use projclass_core::{decide_trivial_minorization, Error, ProjectionFamily};

mod render;

#[derive(Parser)]
#[command(name = "projclass", version, about = "Decide minorization, fullness and finiteness of diagonal multiplier projections")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decide m·g ≼ n·Q and print the surplus certificate.
    Analyze {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Full / non-full classification with its certificate.
    Classify {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: usize,
    },
    /// Minimal N(m) with m|F| < |⋃ I_j| + N(m) for all finite F.
    Nbound {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Euler class of a sum of line bundles, e.g. --bundles '[[1],[1,2],{"3":-1}]'.
    Euler {
        #[arg(long)]
        bundles: String,
    },
    /// Simulate the index-set dynamics and check the transversal.
    EndoSim {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
        #[arg(long, default_value_t = 6)]
        prefix: usize,
        /// Pool size, or "auto" for the maximal trivial multiplicity.
        #[arg(long, default_value = "auto", value_parser = parse_k)]
        k: Auto,
        /// Include the full assignment in the report.
        #[arg(long)]
        dump: bool,
        #[arg(long, env = "PROJCLASS_ENTRY_CAP", default_value_t = DEFAULT_ENTRY_CAP)]
        entry_cap: usize,
    },
    /// The gap N(m)·g ⋠ m·Q but N(m)·g ≼ l·Q for m = 1..m_max.
    Pattern {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 4)]
        m_max: usize,
        #[arg(long, default_value_t = DEFAULT_L_BOUND)]
        l_bound: usize,
    },
    /// Cross-check matching, Euler class, SDR count and brute force.
    OracleCheck {
        #[arg(long, value_enum, default_value_t = OracleMode::Exhaustive)]
        mode: OracleMode,
        #[arg(long, default_value_t = 3)]
        max_sets: usize,
        #[arg(long, default_value_t = 3)]
        max_ground: usize,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug)]
struct Auto(Option<usize>);

fn parse_k(s: &str) -> Result<Auto, String> {
    if s == "auto" {
        Ok(Auto(None))
    } else {
        s.parse().map(|k| Auto(Some(k))).map_err(|_| format!("expected \"auto\" or an integer, got {s:?}"))
    }
}

/// Failure with its process exit status.
struct Failure {
    code: u8,
    message: String,
    report: Option<Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into(), report: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WindowTooLarge { .. } | Error::HallViolation(_) | Error::PatternNotFound { .. } | Error::Overflow(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string(), report: None }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load_family(path: &Path) -> Result<ProjectionFamily, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    ProjectionFamily::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_bundles(text: &str) -> Result<Vec<ChernVector>, Failure> {
    let value: Value = serde_json::from_str(text).map_err(|e| Failure::input(format!("bundles: {e}")))?;
    let Value::Array(items) = value else {
        return Err(Failure::input("bundles: expected a JSON array"));
    };
    let bad = |what: &Value| Failure::input(format!("bundles: cannot read {what} as a line bundle"));
    items
        .iter()
        .map(|item| match item {
            Value::Array(ids) => ids
                .iter()
                .map(|id| id.as_u64().filter(|&i| i > 0).map(|i| (i, 1)).ok_or_else(|| bad(id)))
                .collect::<Result<Vec<_>, _>>()
                .map(ChernVector::from_pairs),
            Value::Object(map) => map
                .iter()
                .map(|(k, v)| match (k.parse::<u64>(), v.as_i64()) {
                    (Ok(i), Some(c)) if i > 0 => Ok((i, c)),
                    _ => Err(bad(item)),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(ChernVector::from_pairs),
            other => Err(bad(other)),
        })
        .collect()
}

fn run(command: Command) -> Result<Value, Failure> {
    match command {
        Command::Analyze { family, m, n } => {
            if m == 0 || n == 0 {
                return Err(Failure::input("--m and --n must be positive"));
            }
            let fam = load_family(&family)?;
            Ok(to_value(&decide_trivial_minorization(&fam, m, n)?))
        }
        Command::Classify { family, m_max } => {
            let fam = load_family(&family)?;
            Ok(to_value(&classify::classify(&fam, m_max)?))
        }
        Command::Nbound { family, m } => {
            if m == 0 {
                return Err(Failure::input("--m must be positive"));
            }
            let fam = load_family(&family)?;
            Ok(json!({ "m": m, "N": to_value(&classify::compute_n(&fam, m)?) }))
        }
        Command::Euler { bundles } => Ok(to_value(&euler_class(&parse_bundles(&bundles)?))),
        Command::EndoSim { family, depth, window, prefix, k, dump, entry_cap } => {
            if window < 0 {
                return Err(Failure::input("--window must be nonnegative"));
            }
            let fam = load_family(&family)?;
            let cfg = SimConfig { depth, window, prefix_len: prefix, k: k.0, entry_cap, dump };
            let report = endo::simulate(&fam, &cfg)?;
            let ok = report.transversal_ok && report.hall_ok;
            let value = to_value(&report);
            if ok {
                Ok(value)
            } else {
                Err(Failure { code: 1, message: "transversal check failed".into(), report: Some(value) })
            }
        }
        Command::Pattern { family, m_max, l_bound } => {
            let fam = load_family(&family)?;
            Ok(to_value(&classify::minorization_pattern(&fam, m_max, l_bound)?))
        }
        Command::OracleCheck { mode, max_sets, max_ground, cases, seed } => {
            let mode = match mode {
                OracleMode::Exhaustive => Mode::Exhaustive,
                OracleMode::Random => Mode::Random,
            };
            let report = oracle::run(&OracleBounds { mode, max_sets, max_ground, cases, seed })?;
            let value = to_value(&report);
            if report.disagreements == 0 {
                Ok(value)
            } else {
                Err(Failure { code: 1, message: format!("{} disagreements", report.disagreements), report: Some(value) })
            }
        }
    }
}

fn emit(format: Format, value: &Value) {
    match format {
        Format::Json => println!("{value}"),
        Format::Text => print!("{}", render::text(value)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(value) => {
            emit(cli.format, &value);
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(report) = &f.report {
                emit(cli.format, report);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
