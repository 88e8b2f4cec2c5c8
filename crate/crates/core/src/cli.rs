//! Command-line driver. Exit codes: 0 success, 1 validation or solver
//! failure, 2 usage error. Diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agent::{agent_best_response, classify_risk, BestResponse, RiskClassification};
use crate::analyses::{
    classical_assumptions_report, detect_invisible_effort, two_outcome_linear_analysis,
    ClassicalAssumptionsReport, InvisibleEffortReport, TwoOutcomeLinearReport,
};
use crate::config::TieBreak;
use crate::document::{parse_scenario, DocumentError, LoadedScenario};
use crate::model::Contract;
use crate::oracle::monte_carlo_payoffs_sharded;
use crate::principal::{solve_game, ContractFamily};
use crate::report::{render, sweep, write_file, ReportFormat};

#[derive(Debug, Parser)]
#[command(
    name = "contract-game",
    version,
    about = "Principal-agent contract game solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ContractArg {
    /// Index into the document's `contracts`, or inline wages such as `4,0`.
    #[arg(long, default_value = "0")]
    contract: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TieBreakArg {
    PrincipalFavorable,
    AgentLowestEffort,
    AgentHighestEffort,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::PrincipalFavorable => TieBreak::PrincipalFavorable,
            TieBreakArg::AgentLowestEffort => TieBreak::AgentLowestEffort,
            TieBreakArg::AgentHighestEffort => TieBreak::AgentHighestEffort,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a scenario document.
    Validate { file: PathBuf },
    /// Solve the agent's effort problem for one contract.
    SolveAgent {
        file: PathBuf,
        #[command(flatten)]
        contract: ContractArg,
    },
    /// Classify the risk posture a contract induces.
    ClassifyRisk {
        file: PathBuf,
        #[command(flatten)]
        contract: ContractArg,
    },
    /// Run the closed-form special-case analyses.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        contract: ContractArg,
    },
    /// Backward induction over the document's contract family.
    SolveGame {
        file: PathBuf,
        #[arg(long, value_enum)]
        tie_break: Option<TieBreakArg>,
    },
    /// Tabulate expectation, motivation and persistence over effort.
    Sweep {
        file: PathBuf,
        #[command(flatten)]
        contract: ContractArg,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// CSV destination; `-` writes to stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo simulation of nature's draw and the resulting payments.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        contract: ContractArg,
        #[arg(long)]
        effort: f64,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// Defaults to the document's `options.seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        shards: u64,
    },
}

enum Failure {
    Usage(String),
    Solver(String),
    Document(DocumentError),
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<crate::report::EmitError> for Failure {
    fn from(e: crate::report::EmitError) -> Self {
        Failure::Solver(e.to_string())
    }
}

#[derive(Serialize)]
struct ValidationReport {
    valid: bool,
    errors: Vec<serde_json::Value>,
}

#[derive(Serialize)]
struct AgentReport {
    contract: Contract,
    #[serde(flatten)]
    best_response: BestResponse,
    risk: RiskClassification,
}

#[derive(Serialize)]
struct AnalysisReport {
    contract: Contract,
    invisible_effort: InvisibleEffortReport,
    two_outcome_linear: Option<TwoOutcomeLinearReport>,
    two_outcome_linear_skipped: Option<String>,
    classical_assumptions: ClassicalAssumptionsReport,
}

/// Runs the CLI on `argv` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Solver(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Document(d)) => {
            let _ = writeln!(err, "error: {d}");
            1
        }
    }
}

fn load(path: &Path) -> Result<LoadedScenario, Failure> {
    parse_scenario(path).map_err(Failure::Document)
}

fn resolve_contract(loaded: &LoadedScenario, spec: &str) -> Result<Contract, Failure> {
    let spec = spec.trim();
    let w = if spec.contains(',') || spec.starts_with('[') {
        let inner = spec.trim_start_matches('[').trim_end_matches(']');
        let wages = inner
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("bad inline contract `{spec}`: {e}")))?;
        let w = Contract::new(wages);
        loaded
            .scenario
            .validate(std::slice::from_ref(&w))
            .map_err(|v| Failure::Document(DocumentError::Validation(v)))?;
        w
    } else {
        let idx: usize = spec.parse().map_err(|_| {
            Failure::Usage(format!(
                "--contract expects an index or inline wages, got `{spec}`"
            ))
        })?;
        loaded.contracts.get(idx).cloned().ok_or_else(|| {
            Failure::Usage(format!(
                "contract index {idx} out of range; the document has {} contract(s)",
                loaded.contracts.len()
            ))
        })?
    };
    Ok(w)
}

fn print_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    out.write_all(crate::report::to_json(value).as_bytes())
        .map_err(|e| Failure::Solver(format!("<stdout>: {e}")))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { file } => match parse_scenario(&file) {
            Ok(_) => {
                print_json(
                    out,
                    &ValidationReport {
                        valid: true,
                        errors: vec![],
                    },
                )?;
                Ok(0)
            }
            Err(e) => {
                print_json(
                    out,
                    &ValidationReport {
                        valid: false,
                        errors: e.error_list(),
                    },
                )?;
                Err(Failure::Document(e))
            }
        },
        Command::SolveAgent { file, contract } => {
            let loaded = load(&file)?;
            let w = resolve_contract(&loaded, &contract.contract)?;
            let best_response = agent_best_response(&loaded.scenario, &w, &loaded.config)?;
            let risk = classify_risk(&loaded.scenario, &w, &loaded.config)?;
            print_json(
                out,
                &AgentReport {
                    contract: w,
                    best_response,
                    risk,
                },
            )?;
            Ok(0)
        }
        Command::ClassifyRisk { file, contract } => {
            let loaded = load(&file)?;
            let w = resolve_contract(&loaded, &contract.contract)?;
            print_json(out, &classify_risk(&loaded.scenario, &w, &loaded.config)?)?;
            Ok(0)
        }
        Command::Analyze { file, contract } => {
            let loaded = load(&file)?;
            let w = resolve_contract(&loaded, &contract.contract)?;
            let cfg = &loaded.config;
            let s = &loaded.scenario;
            let invisible_effort = detect_invisible_effort(s, cfg.invisible_eps, cfg)?;
            let (two_outcome_linear, two_outcome_linear_skipped) =
                match two_outcome_linear_analysis(s, &w, cfg) {
                    Ok(r) => (Some(r), None),
                    Err(crate::error::Error::NotTwoOutcomeLinear(why)) => (None, Some(why)),
                    Err(e) => return Err(e.into()),
                };
            let wage_range = match loaded.options.wage_range {
                Some([lo, hi]) => (lo, hi),
                None => {
                    let wages = loaded
                        .contracts
                        .iter()
                        .chain([&w])
                        .flat_map(|c| c.wages().iter().copied());
                    wages.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                        (a.min(x), b.max(x))
                    })
                }
            };
            let classical_assumptions = classical_assumptions_report(s, wage_range, cfg)?;
            print_json(
                out,
                &AnalysisReport {
                    contract: w,
                    invisible_effort,
                    two_outcome_linear,
                    two_outcome_linear_skipped,
                    classical_assumptions,
                },
            )?;
            Ok(0)
        }
        Command::SolveGame { file, tie_break } => {
            let loaded = load(&file)?;
            let family = match &loaded.family {
                Some(f) => f.clone(),
                None if !loaded.contracts.is_empty() => {
                    ContractFamily::explicit(loaded.contracts.clone())
                }
                None => {
                    return Err(Failure::Solver(
                        "document has neither a `family` nor any `contracts`".into(),
                    ))
                }
            };
            let policy = tie_break
                .map(TieBreak::from)
                .unwrap_or(loaded.config.tie_break);
            print_json(
                out,
                &solve_game(&loaded.scenario, &family, policy, &loaded.config)?,
            )?;
            Ok(0)
        }
        Command::Sweep {
            file,
            contract,
            points,
            out: dest,
        } => {
            if points < 2 {
                return Err(Failure::Usage("--points must be at least 2".into()));
            }
            let loaded = load(&file)?;
            let w = resolve_contract(&loaded, &contract.contract)?;
            let table = sweep(&loaded.scenario, &w, points)?;
            let csv = render(&table, ReportFormat::Csv)?;
            if dest.as_os_str() == "-" {
                out.write_all(csv.as_bytes())
                    .map_err(|e| Failure::Solver(format!("<stdout>: {e}")))?;
            } else {
                write_file(&dest, &csv)?;
            }
            Ok(0)
        }
        Command::Simulate {
            file,
            contract,
            effort,
            n,
            seed,
            shards,
        } => {
            if n == 0 || shards == 0 {
                return Err(Failure::Usage("--n and --shards must be positive".into()));
            }
            let loaded = load(&file)?;
            let w = resolve_contract(&loaded, &contract.contract)?;
            let seed = seed.unwrap_or(loaded.config.seed);
            let result =
                monte_carlo_payoffs_sharded(&loaded.scenario, &w, effort, n, seed, shards)?;
            print_json(out, &result)?;
            Ok(0)
        }
    }
}
