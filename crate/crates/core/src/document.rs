//! JSON scenario documents.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "outcomes": [10, 2],
//!   "effort": {"min": 0, "max": 1},
//!   "profile": [{"family": "polynomial", "coefficients": [0.2, 0.5]}],
//!   "agent": {
//!     "u": {"family": "polynomial", "coefficients": [0, 1]},
//!     "v": {"family": "polynomial", "coefficients": [0, 0, 2]},
//!     "reservation_utility": 0
//!   },
//!   "principal": {"b": {"family": "polynomial", "coefficients": [0, 1]}},
//!   "contracts": [[4, 0]],
//!   "family": {"grid": [{"min": 0, "max": 6, "step": 1}, {"min": 0, "max": 0, "step": 1}]},
//!   "options": {"tie_break": "principal_favorable", "seed": 7}
//! }
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{SolverConfig, TieBreak};
use crate::curve::Curve;
use crate::error::{Error as ModelError, ValidationErrors};
use crate::model::{
    AgentPreferences, Contract, EffortInterval, EffortProfile, OutcomeSet, PrincipalPreferences,
    Scenario,
};
use crate::principal::{ContractFamily, FamilySource};

pub const SCHEMA_VERSION: u32 = 1;

/// Solver overrides; anything omitted keeps its default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effort_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invisible_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<TieBreak>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Wage interval for the classical-assumptions report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wage_range: Option<[f64; 2]>,
}

impl SolverOptions {
    pub fn to_config(&self) -> Result<SolverConfig, DocumentError> {
        let mut cfg = SolverConfig::default();
        let grid = |name: &str, v: Option<usize>, slot: &mut usize| {
            if let Some(n) = v {
                if n < 3 {
                    return Err(DocumentError::Options(format!("{name} must be at least 3")));
                }
                *slot = n;
            }
            Ok(())
        };
        grid("root_grid", self.root_grid, &mut cfg.search.root_grid)?;
        grid("scan_grid", self.scan_grid, &mut cfg.search.scan_grid)?;
        grid("sample_grid", self.sample_grid, &mut cfg.sample_grid)?;
        let tol = |name: &str, v: Option<f64>, slot: &mut f64| {
            if let Some(x) = v {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(DocumentError::Options(format!(
                        "{name} must be a non-negative number"
                    )));
                }
                *slot = x;
            }
            Ok(())
        };
        tol("x_tol", self.x_tol, &mut cfg.search.x_tol)?;
        tol("effort_tol", self.effort_tol, &mut cfg.search.dedup_tol)?;
        tol("tie_tol", self.tie_tol, &mut cfg.search.tie_rel_tol)?;
        tol("risk_tol", self.risk_tol, &mut cfg.risk_tol)?;
        tol("invisible_eps", self.invisible_eps, &mut cfg.invisible_eps)?;
        if let Some(t) = self.tie_break {
            cfg.tie_break = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some([lo, hi]) = self.wage_range {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(DocumentError::Options(
                    "wage_range must be [lo, hi] with lo <= hi".into(),
                ));
            }
        }
        Ok(cfg)
    }
}

/// On-disk form of a scenario plus the contracts to study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub schema: u32,
    pub outcomes: Vec<f64>,
    pub effort: EffortInterval,
    /// `p_1..p_{n-1}`.
    pub profile: Vec<Curve>,
    pub agent: AgentPreferences,
    pub principal: PrincipalPreferences,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contracts: Vec<Contract>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ContractFamily>,
    #[serde(default, skip_serializing_if = "is_default_options")]
    pub options: SolverOptions,
}

fn is_default_options(o: &SolverOptions) -> bool {
    *o == SolverOptions::default()
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),

    #[error("invalid options: {0}")]
    Options(String),

    #[error("{0}")]
    Validation(ValidationErrors),
}

impl DocumentError {
    /// Individual errors in machine-readable form.
    pub fn error_list(&self) -> Vec<serde_json::Value> {
        match self {
            DocumentError::Validation(v) => v
                .errors()
                .iter()
                .map(|e| {
                    let mut obj = serde_json::to_value(e).unwrap_or(serde_json::Value::Null);
                    if let Some(map) = obj.as_object_mut() {
                        map.insert("message".into(), e.to_string().into());
                    }
                    obj
                })
                .collect(),
            DocumentError::Parse {
                line,
                column,
                message,
            } => vec![serde_json::json!({
                "kind": "parse",
                "line": line,
                "column": column,
                "message": message,
            })],
            other => vec![serde_json::json!({
                "kind": match other {
                    DocumentError::Io { .. } => "io",
                    DocumentError::Schema(_) => "schema",
                    _ => "options",
                },
                "message": other.to_string(),
            })],
        }
    }
}

/// A parsed, validated document.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub contracts: Vec<Contract>,
    pub family: Option<ContractFamily>,
    pub options: SolverOptions,
    pub config: SolverConfig,
}

impl ScenarioDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: ScenarioDocument =
            serde_json::from_str(text).map_err(|e| DocumentError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        if doc.schema != SCHEMA_VERSION {
            return Err(DocumentError::Schema(doc.schema));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_scenario(
        s: &Scenario,
        contracts: Vec<Contract>,
        family: Option<ContractFamily>,
        options: SolverOptions,
    ) -> Self {
        ScenarioDocument {
            schema: SCHEMA_VERSION,
            outcomes: s.outcomes.values().to_vec(),
            effort: s.effort,
            profile: s.profile.components.clone(),
            agent: s.agent.clone(),
            principal: s.principal.clone(),
            contracts,
            family,
            options,
        }
    }

    /// Builds and validates the scenario against every contract the document
    /// names.
    pub fn load(self) -> Result<LoadedScenario, DocumentError> {
        let config = self.options.to_config()?;
        let outcomes = OutcomeSet::new(self.outcomes.clone())
            .map_err(|e| DocumentError::Validation(ValidationErrors(vec![e])))?;
        let scenario = Scenario {
            outcomes,
            effort: self.effort,
            profile: EffortProfile::new(self.profile),
            agent: self.agent,
            principal: self.principal,
        };
        let mut probe = self.contracts.clone();
        let mut family_errors = Vec::new();
        if let Some(fam) = &self.family {
            match &fam.source {
                FamilySource::Contracts(c) => probe.extend(c.iter().cloned()),
                FamilySource::Grid(axes) => match axis_probes(axes) {
                    Ok(p) => probe.extend(p),
                    Err(e) => family_errors.push(e),
                },
            }
        }
        match scenario.validate(&probe) {
            Ok(()) if family_errors.is_empty() => Ok(LoadedScenario {
                scenario,
                contracts: self.contracts,
                family: self.family,
                options: self.options,
                config,
            }),
            Ok(()) => Err(DocumentError::Validation(ValidationErrors(family_errors))),
            Err(ValidationErrors(mut errs)) => {
                errs.extend(family_errors);
                Err(DocumentError::Validation(ValidationErrors(errs)))
            }
        }
    }
}

/// Contracts that together visit every value of every wage axis, so `u` and
/// `B` are checked on all wages a grid family can produce.
fn axis_probes(axes: &[crate::principal::WageAxis]) -> Result<Vec<Contract>, ModelError> {
    let lens = axes
        .iter()
        .map(|a| a.point_count())
        .collect::<Result<Vec<_>, _>>()?;
    let longest = lens.iter().copied().max().unwrap_or(0);
    if longest > SolverConfig::default().enumeration_cap as u128 {
        return Err(ModelError::InvalidFamily(format!(
            "wage axis with {longest} values is too long"
        )));
    }
    Ok((0..longest as u64)
        .map(|k| {
            Contract::new(
                axes.iter()
                    .zip(&lens)
                    .map(|(a, &l)| a.value(k.min(l as u64 - 1)))
                    .collect(),
            )
        })
        .collect())
}

/// Reads, parses and validates a scenario document.
pub fn parse_scenario(path: &Path) -> Result<LoadedScenario, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|e| DocumentError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    ScenarioDocument::from_json(&text)?.load()
}
