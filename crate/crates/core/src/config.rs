use serde::{Deserialize, Serialize};

use crate::search::SearchSettings;

/// How the principal resolves an agent who is indifferent between several
/// efforts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// The effort that is best for the principal.
    #[default]
    PrincipalFavorable,
    AgentLowestEffort,
    AgentHighestEffort,
}

/// Every numeric tunable of the solvers, with the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub search: SearchSettings,
    /// Absolute threshold on persistence when classifying risk posture.
    pub risk_tol: f64,
    /// Effort grid used for risk classification and curve sampling.
    pub sample_grid: usize,
    /// Largest profile deviation still treated as effort-independent.
    pub invisible_eps: f64,
    pub tie_break: TieBreak,
    /// Maximum number of contracts a family may enumerate.
    pub enumeration_cap: u64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            search: SearchSettings::default(),
            risk_tol: 1e-9,
            sample_grid: 2049,
            invisible_eps: 1e-9,
            tie_break: TieBreak::PrincipalFavorable,
            enumeration_cap: 1_000_000,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Distance under which an effort counts as sitting on an interval end.
    pub fn effort_tol(&self) -> f64 {
        self.search.dedup_tol
    }
}
