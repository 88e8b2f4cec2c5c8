//! JSON and CSV emission.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::agent::AgentObjective;
use crate::error::Result;
use crate::model::{Contract, Scenario};
use crate::search::uniform_grid;

pub const SWEEP_HEADER: &str = "e,expectation,motivation,persistence";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} has no CSV form")]
    NoCsv(&'static str),
}

/// Anything the CLI can print. Only tabular results have a CSV form.
pub trait Report: Serialize {
    fn name(&self) -> &'static str;

    fn to_csv(&self) -> Option<String> {
        None
    }
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same `f64`; keys follow field
/// declaration order.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn render<R: Report + ?Sized>(report: &R, format: ReportFormat) -> Result<String, EmitError> {
    match format {
        ReportFormat::Json => Ok(to_json(report)),
        ReportFormat::Csv => report.to_csv().ok_or(EmitError::NoCsv(report.name())),
    }
}

pub fn emit_report<R: Report + ?Sized>(
    report: &R,
    format: ReportFormat,
    destination: &Destination,
) -> Result<(), EmitError> {
    let text = render(report, format)?;
    match destination {
        Destination::Stdout => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| EmitError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
        Destination::File(path) => write_file(path, &text),
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), EmitError> {
    std::fs::write(path, text).map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub e: f64,
    pub expectation: f64,
    pub motivation: f64,
    pub persistence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
}

/// Expectation, motivation and persistence on `points` uniform efforts.
pub fn sweep(s: &Scenario, w: &Contract, points: usize) -> Result<Sweep> {
    let obj = AgentObjective::new(s, w)?;
    let rows = uniform_grid(s.effort.min, s.effort.max, points.max(2))
        .into_iter()
        .take(points)
        .map(|e| {
            Ok(SweepRow {
                e,
                expectation: obj.expectation(e)?,
                motivation: obj.motivation(e)?,
                persistence: obj.persistence(e)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { rows })
}

impl Report for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn to_csv(&self) -> Option<String> {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(SWEEP_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.e, r.expectation, r.motivation, r.persistence
            );
        }
        Some(out)
    }
}

macro_rules! json_report {
    ($($ty:ty => $name:literal),* $(,)?) => {
        $(impl Report for $ty {
            fn name(&self) -> &'static str {
                $name
            }
        })*
    };
}

json_report! {
    crate::agent::BestResponse => "best response",
    crate::agent::RiskClassification => "risk classification",
    crate::analyses::InvisibleEffortReport => "invisible-effort report",
    crate::analyses::TwoOutcomeLinearReport => "two-outcome linear report",
    crate::analyses::ClassicalAssumptionsReport => "classical assumptions report",
    crate::principal::GameSolution => "game solution",
    crate::oracle::SimulationResult => "simulation result",
    serde_json::Value => "report",
}
