//! The agent's side of the game: payment expectation and its derivatives,
//! the effort best response, and the contract-dependent risk posture.

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::Result;
use crate::model::{Contract, EffortInterval, Scenario};
use crate::search::{self, Objective, SearchOutcome};

/// Where a maximizing effort sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximizerKind {
    /// Interior point with zero motivation and non-positive persistence.
    InteriorCritical,
    BoundaryMin,
    BoundaryMax,
}

impl MaximizerKind {
    pub fn is_boundary(self) -> bool {
        !matches!(self, MaximizerKind::InteriorCritical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximizer {
    pub effort: f64,
    pub kind: MaximizerKind,
    pub expectation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    /// All tied maximizers, ascending in effort.
    pub maximizers: Vec<Maximizer>,
    pub optimal_expectation: f64,
    /// Whether the optimal expectation reaches the reservation utility.
    pub accepted: bool,
    /// The expectation is flat on the whole interval; the maximizers are the
    /// two interval ends standing in for every effort.
    pub constant_expectation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskClass {
    Averse,
    Seeking,
    Neutral,
    /// Persistence changes sign over the interval.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskClassification {
    pub class: RiskClass,
    pub persistence_min: f64,
    pub persistence_max: f64,
}

/// Payment expectation `E(e) = Σ p_i(e)·u(w_i) − v(e)` for a fixed contract,
/// with the wage utilities evaluated once.
#[derive(Debug, Clone)]
pub struct AgentObjective<'a> {
    scenario: &'a Scenario,
    utilities: Vec<f64>,
}

impl<'a> AgentObjective<'a> {
    pub fn new(scenario: &'a Scenario, contract: &Contract) -> Result<Self> {
        scenario.check_contract(contract)?;
        let utilities = contract
            .wages()
            .iter()
            .map(|&w| scenario.agent.u.eval(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(AgentObjective {
            scenario,
            utilities,
        })
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn expectation(&self, e: f64) -> Result<f64> {
        Ok(self.scenario.profile_dot(e, &self.utilities)? - self.scenario.agent.v.eval(e)?)
    }

    pub fn motivation(&self, e: f64) -> Result<f64> {
        Ok(
            self.scenario.profile_deriv_dot(e, 1, &self.utilities)?
                - self.scenario.agent.v.d1(e)?,
        )
    }

    pub fn persistence(&self, e: f64) -> Result<f64> {
        Ok(
            self.scenario.profile_deriv_dot(e, 2, &self.utilities)?
                - self.scenario.agent.v.d2(e)?,
        )
    }
}

impl Objective for AgentObjective<'_> {
    fn value(&self, t: f64) -> Result<f64> {
        self.expectation(t)
    }

    fn slope(&self, t: f64) -> Result<f64> {
        self.motivation(t)
    }

    fn curvature(&self, t: f64) -> Result<f64> {
        self.persistence(t)
    }
}

pub fn agent_expectation(s: &Scenario, w: &Contract, e: f64) -> Result<f64> {
    AgentObjective::new(s, w)?.expectation(e)
}

/// Derivative of the payment expectation with respect to effort.
pub fn motivation(s: &Scenario, w: &Contract, e: f64) -> Result<f64> {
    AgentObjective::new(s, w)?.motivation(e)
}

/// Derivative of the motivation with respect to effort.
pub fn persistence(s: &Scenario, w: &Contract, e: f64) -> Result<f64> {
    AgentObjective::new(s, w)?.persistence(e)
}

pub fn transience(s: &Scenario, w: &Contract, e: f64) -> Result<f64> {
    Ok(-persistence(s, w, e)?)
}

/// Solves `max_{e ∈ [e_min, e_max]} E(e)` for the given contract.
pub fn agent_best_response(s: &Scenario, w: &Contract, cfg: &SolverConfig) -> Result<BestResponse> {
    let obj = AgentObjective::new(s, w)?;
    let outcome = search::maximize(&obj, s.effort.min, s.effort.max, &cfg.search)?;
    assemble_best_response(outcome, &s.effort, s.agent.reservation_utility, cfg, |e| {
        obj.persistence(e)
    })
}

/// Labels the raw search result with maximizer kinds and the participation
/// decision.
pub(crate) fn assemble_best_response<F>(
    outcome: SearchOutcome,
    effort: &EffortInterval,
    reservation_utility: f64,
    cfg: &SolverConfig,
    persistence: F,
) -> Result<BestResponse>
where
    F: Fn(f64) -> Result<f64>,
{
    let tol = cfg.effort_tol();
    let kind_of = |e: f64| {
        if (e - effort.min).abs() <= tol {
            MaximizerKind::BoundaryMin
        } else if (e - effort.max).abs() <= tol {
            MaximizerKind::BoundaryMax
        } else {
            MaximizerKind::InteriorCritical
        }
    };
    let mut maximizers = Vec::with_capacity(outcome.maximizers.len());
    let mut non_concave = Vec::new();
    for c in &outcome.maximizers {
        let kind = kind_of(c.t);
        let m = Maximizer {
            effort: c.t,
            kind,
            expectation: c.value,
        };
        if kind == MaximizerKind::InteriorCritical && persistence(c.t)? >= cfg.risk_tol {
            // Convex at an interior tie: an inflection or local minimum that
            // only ties numerically.
            non_concave.push(m);
        } else {
            maximizers.push(m);
        }
    }
    if maximizers.is_empty() {
        maximizers = non_concave;
    }
    Ok(BestResponse {
        maximizers,
        optimal_expectation: outcome.best,
        accepted: outcome.best >= reservation_utility,
        constant_expectation: outcome.constant,
    })
}

/// Classifies sampled persistence values with the absolute threshold `tol`.
pub fn classify_persistence(min: f64, max: f64, tol: f64) -> RiskClass {
    if max < -tol {
        RiskClass::Averse
    } else if min > tol {
        RiskClass::Seeking
    } else if min >= -tol && max <= tol {
        RiskClass::Neutral
    } else {
        RiskClass::Mixed
    }
}

/// Samples the persistence over the effort interval and reads off the risk
/// posture the contract induces.
pub fn classify_risk(s: &Scenario, w: &Contract, cfg: &SolverConfig) -> Result<RiskClassification> {
    let obj = AgentObjective::new(s, w)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in search::uniform_grid(s.effort.min, s.effort.max, cfg.sample_grid) {
        let p = obj.persistence(e)?;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    Ok(RiskClassification {
        class: classify_persistence(lo, hi, cfg.risk_tol),
        persistence_min: lo,
        persistence_max: hi,
    })
}
