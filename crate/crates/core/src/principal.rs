//! The principal's side: expected payoff and backward induction over a
//! finite family of contracts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{agent_best_response, BestResponse};
use crate::config::{SolverConfig, TieBreak};
use crate::error::{Error, Result};
use crate::model::{Contract, Scenario};

/// Expected principal utility `Σ p_i(e)·B(x_i - w_i)`.
pub fn principal_expectation(s: &Scenario, w: &Contract, e: f64) -> Result<f64> {
    s.check_contract(w)?;
    let probs = s.profile_probs(e)?;
    let mut total = 0.0;
    for ((p, x), wi) in probs.iter().zip(s.outcomes.values()).zip(w.wages()) {
        total += p * s.principal.b.eval(x - wi)?;
    }
    Ok(total)
}

/// Inclusive arithmetic range of wages for one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WageAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl WageAxis {
    pub fn point_count(&self) -> Result<u128> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite())
            || self.min > self.max
        {
            return Err(Error::InvalidFamily(format!(
                "wage axis [{}, {}] step {} is not a finite range",
                self.min, self.max, self.step
            )));
        }
        if self.min == self.max {
            return Ok(1);
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidFamily(format!(
                "wage axis step must be positive, got {}",
                self.step
            )));
        }
        let span = ((self.max - self.min) / self.step + 1e-9).floor();
        if span >= u64::MAX as f64 {
            return Ok(u128::MAX);
        }
        Ok(span as u128 + 1)
    }

    pub fn value(&self, k: u64) -> f64 {
        self.min + k as f64 * self.step
    }
}

/// Where the candidate contracts come from.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySource {
    /// An explicit list.
    Contracts(Vec<Contract>),
    /// The Cartesian product of one wage axis per outcome, first axis slowest.
    Grid(Vec<WageAxis>),
}

/// A finite set of candidate contracts. In JSON exactly one of `contracts`
/// or `grid` is given, with an optional `cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpec", into = "FamilySpec")]
pub struct ContractFamily {
    pub source: FamilySource,
    pub cap: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contracts: Option<Vec<Contract>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<Vec<WageAxis>>,
    #[serde(default = "default_cap")]
    cap: u64,
}

impl TryFrom<FamilySpec> for ContractFamily {
    type Error = Error;

    fn try_from(spec: FamilySpec) -> Result<Self> {
        let source = match (spec.contracts, spec.grid) {
            (Some(c), None) => FamilySource::Contracts(c),
            (None, Some(g)) => FamilySource::Grid(g),
            _ => {
                return Err(Error::InvalidFamily(
                    "a family needs exactly one of `contracts` or `grid`".into(),
                ))
            }
        };
        Ok(ContractFamily {
            source,
            cap: spec.cap,
        })
    }
}

impl From<ContractFamily> for FamilySpec {
    fn from(f: ContractFamily) -> Self {
        let (contracts, grid) = match f.source {
            FamilySource::Contracts(c) => (Some(c), None),
            FamilySource::Grid(g) => (None, Some(g)),
        };
        FamilySpec {
            contracts,
            grid,
            cap: f.cap,
        }
    }
}

fn default_cap() -> u64 {
    SolverConfig::default().enumeration_cap
}

impl ContractFamily {
    pub fn explicit(contracts: Vec<Contract>) -> Self {
        ContractFamily {
            source: FamilySource::Contracts(contracts),
            cap: default_cap(),
        }
    }

    pub fn grid(axes: Vec<WageAxis>) -> Self {
        ContractFamily {
            source: FamilySource::Grid(axes),
            cap: default_cap(),
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn count(&self) -> Result<u128> {
        match &self.source {
            FamilySource::Contracts(c) => Ok(c.len() as u128),
            FamilySource::Grid(axes) => axes
                .iter()
                .try_fold(1u128, |acc, a| Ok(acc.saturating_mul(a.point_count()?))),
        }
    }

    /// All candidate contracts, in a fixed order.
    pub fn enumerate(&self) -> Result<Vec<Contract>> {
        let count = self.count()?;
        if count == 0 {
            return Err(Error::InvalidFamily("contract family is empty".into()));
        }
        if count > self.cap as u128 {
            return Err(Error::EnumerationCapExceeded {
                count,
                cap: self.cap,
            });
        }
        match &self.source {
            FamilySource::Contracts(c) => Ok(c.clone()),
            FamilySource::Grid(axes) => {
                let lens = axes
                    .iter()
                    .map(|a| a.point_count().map(|l| l as u64))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Vec::with_capacity(count as usize);
                let mut idx = vec![0u64; axes.len()];
                loop {
                    out.push(Contract::new(
                        axes.iter().zip(&idx).map(|(a, &k)| a.value(k)).collect(),
                    ));
                    let mut pos = axes.len();
                    loop {
                        if pos == 0 {
                            return Ok(out);
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < lens[pos] {
                            break;
                        }
                        idx[pos] = 0;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedContract {
    pub contract: Contract,
    pub best_response: BestResponse,
    /// Effort picked from the agent's maximizers by the tie-break policy.
    pub effort: f64,
    pub principal_payoff: f64,
    pub agent_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    /// `None` when the agent rejects every candidate.
    pub selected: Option<SelectedContract>,
    pub all_rejected: bool,
    pub tie_break: TieBreak,
    pub candidates: usize,
    pub accepted_candidates: usize,
}

/// Picks the agent's effort among tied maximizers and returns it with the
/// principal's payoff there and the agent's expectation.
pub fn select_effort(
    s: &Scenario,
    w: &Contract,
    br: &BestResponse,
    tie_break: TieBreak,
) -> Result<(f64, f64, f64)> {
    let first = br
        .maximizers
        .first()
        .ok_or_else(|| Error::InvalidArgument("best response has no maximizer".into()))?;
    let pick = match tie_break {
        TieBreak::AgentLowestEffort => *first,
        TieBreak::AgentHighestEffort => *br.maximizers.last().unwrap_or(first),
        TieBreak::PrincipalFavorable => {
            let mut best = (*first, principal_expectation(s, w, first.effort)?);
            for m in &br.maximizers[1..] {
                let p = principal_expectation(s, w, m.effort)?;
                if p > best.1 {
                    best = (*m, p);
                }
            }
            return Ok((best.0.effort, best.1, best.0.expectation));
        }
    };
    Ok((
        pick.effort,
        principal_expectation(s, w, pick.effort)?,
        pick.expectation,
    ))
}

/// Backward induction: the agent best-responds to every candidate, rejected
/// candidates are dropped, and the principal takes the candidate with the
/// highest expected payoff. Payoffs within the tie tolerance of the best are
/// resolved in favour of the lexicographically smallest wage vector, so the
/// result does not depend on evaluation order.
pub fn solve_game(
    s: &Scenario,
    family: &ContractFamily,
    tie_break: TieBreak,
    cfg: &SolverConfig,
) -> Result<GameSolution> {
    let candidates = family.enumerate()?;
    let evaluated: Vec<Result<Option<SelectedContract>>> = candidates
        .par_iter()
        .map(|w| {
            let br = agent_best_response(s, w, cfg)?;
            if !br.accepted {
                return Ok(None);
            }
            let (effort, principal_payoff, agent_payoff) = select_effort(s, w, &br, tie_break)?;
            Ok(Some(SelectedContract {
                contract: w.clone(),
                best_response: br,
                effort,
                principal_payoff,
                agent_payoff,
            }))
        })
        .collect();
    let mut accepted = Vec::new();
    for r in evaluated {
        if let Some(sel) = r? {
            accepted.push(sel);
        }
    }
    let best = accepted
        .iter()
        .map(|c| c.principal_payoff)
        .fold(f64::NEG_INFINITY, f64::max);
    let accepted_candidates = accepted.len();
    let selected = accepted
        .into_iter()
        .filter(|c| cfg.search.ties(c.principal_payoff, best))
        .min_by(|a, b| a.contract.lex_cmp(&b.contract));
    Ok(GameSolution {
        all_rejected: selected.is_none(),
        selected,
        tie_break,
        candidates: candidates.len(),
        accepted_candidates,
    })
}
