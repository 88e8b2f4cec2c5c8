//! Closed-form analyzers for two special cases of the game (effort that does
//! not move the outcome distribution, and two outcomes with a linear profile)
//! and a report on the classical shape assumptions for `u` and `v`.

use serde::{Deserialize, Serialize};

use crate::agent::{
    assemble_best_response, classify_persistence, BestResponse, MaximizerKind, RiskClassification,
};
use crate::config::SolverConfig;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::model::{Contract, Scenario};
use crate::search::{self, bracketed_roots, uniform_grid, Candidate, Objective, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisutilityMinimizer {
    pub effort: f64,
    pub kind: MaximizerKind,
    pub disutility: f64,
}

/// Effort chosen when the outcome distribution ignores effort: the agent
/// simply minimizes `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortChoice {
    pub minimizers: Vec<DisutilityMinimizer>,
    pub min_disutility: f64,
    pub constant_disutility: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvisibleEffortReport {
    pub is_invisible: bool,
    /// Largest `|p_i(e) - p_i(e_mid)|` over the sample grid and outcomes.
    pub max_deviation: f64,
    pub threshold: f64,
    /// Present only when the effort is invisible.
    pub effort_choice: Option<EffortChoice>,
    /// Posture read off `-v''`; present only when the effort is invisible.
    pub risk: Option<RiskClassification>,
    /// `v'' < 0` somewhere, contradicting the convex-cost premise.
    pub concave_disutility: bool,
}

struct NegatedCost<'a>(&'a Curve);

impl Objective for NegatedCost<'_> {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(-self.0.eval(t)?)
    }
    fn slope(&self, t: f64) -> Result<f64> {
        Ok(-self.0.d1(t)?)
    }
    fn curvature(&self, t: f64) -> Result<f64> {
        Ok(-self.0.d2(t)?)
    }
}

/// Measures how far the profile moves with effort and, when it stays within
/// `eps`, solves the agent's problem as minimization of `v` alone.
pub fn detect_invisible_effort(
    s: &Scenario,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<InvisibleEffortReport> {
    let grid = uniform_grid(s.effort.min, s.effort.max, cfg.sample_grid);
    let reference = s.profile_probs(s.effort.midpoint())?;
    let mut deviation: f64 = 0.0;
    let mut v2_min = f64::INFINITY;
    let mut v2_max = f64::NEG_INFINITY;
    for &e in &grid {
        let probs = s.profile_probs(e)?;
        for (p, q) in probs.iter().zip(&reference) {
            deviation = deviation.max((p - q).abs());
        }
        let v2 = s.agent.v.d2(e)?;
        v2_min = v2_min.min(v2);
        v2_max = v2_max.max(v2);
    }
    let is_invisible = deviation <= eps;
    let (effort_choice, risk) = if is_invisible {
        let out = search::maximize(
            &NegatedCost(&s.agent.v),
            s.effort.min,
            s.effort.max,
            &cfg.search,
        )?;
        let br = assemble_best_response(out, &s.effort, f64::NEG_INFINITY, cfg, |e| {
            Ok(-s.agent.v.d2(e)?)
        })?;
        let choice = EffortChoice {
            minimizers: br
                .maximizers
                .iter()
                .map(|m| DisutilityMinimizer {
                    effort: m.effort,
                    kind: m.kind,
                    disutility: -m.expectation,
                })
                .collect(),
            min_disutility: -br.optimal_expectation,
            constant_disutility: br.constant_expectation,
        };
        let risk = RiskClassification {
            class: classify_persistence(-v2_max, -v2_min, cfg.risk_tol),
            persistence_min: -v2_max,
            persistence_max: -v2_min,
        };
        (Some(choice), Some(risk))
    } else {
        (None, None)
    };
    Ok(InvisibleEffortReport {
        is_invisible,
        max_deviation: deviation,
        threshold: eps,
        effort_choice,
        risk,
        concave_disutility: v2_min < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocSolution {
    pub effort: f64,
    /// `C·(u(w_1) - u(w_2)) - v'(e)` at the solution.
    pub residual: f64,
    pub expectation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoOutcomeLinearReport {
    /// Slope `C` of `p_1(e) = C·e + h`.
    pub slope: f64,
    /// Intercept `h`.
    pub intercept: f64,
    pub utility_spread: f64,
    /// Marginal benefit of effort `C·(u(w_1) - u(w_2))`.
    pub foc_target: f64,
    /// Efforts with `v'(e)` equal to the target, ascending.
    pub foc_solutions: Vec<FocSolution>,
    pub expectation_at_min: f64,
    pub expectation_at_max: f64,
    pub best_response: BestResponse,
    /// Present when `C = 0`, where the case reduces to invisible effort.
    pub invisible: Option<InvisibleEffortReport>,
}

/// Closed-form treatment of two outcomes with `p_1` affine in effort: the
/// motivation is `C·(u(w_1) - u(w_2)) - v'(e)`, so interior optima solve
/// `v'(e) = C·(u(w_1) - u(w_2))`.
pub fn two_outcome_linear_analysis(
    s: &Scenario,
    w: &Contract,
    cfg: &SolverConfig,
) -> Result<TwoOutcomeLinearReport> {
    if s.n_outcomes() != 2 || s.profile.components.len() != 1 {
        return Err(Error::NotTwoOutcomeLinear(format!(
            "expected 2 outcomes, found {}",
            s.n_outcomes()
        )));
    }
    let (slope, intercept) = match &s.profile.components[0] {
        Curve::Polynomial { coefficients }
            if s.profile.components[0].polynomial_degree() <= Some(1) =>
        {
            (coefficients.get(1).copied().unwrap_or(0.0), coefficients[0])
        }
        other => {
            return Err(Error::NotTwoOutcomeLinear(format!(
                "p_1 must be a polynomial of degree at most 1, got {}",
                match other.polynomial_degree() {
                    Some(d) => format!("degree {d}"),
                    None => other.family().to_string(),
                }
            )))
        }
    };
    s.check_contract(w)?;
    let u1 = s.agent.u.eval(w.wages()[0])?;
    let u2 = s.agent.u.eval(w.wages()[1])?;
    let spread = u1 - u2;
    let target = slope * spread;
    let v = &s.agent.v;
    let expectation =
        |e: f64| -> Result<f64> { Ok(u2 + (slope * e + intercept) * spread - v.eval(e)?) };

    let grid = uniform_grid(s.effort.min, s.effort.max, cfg.search.root_grid);
    let roots = bracketed_roots(|e| Ok(target - v.d1(e)?), &grid, cfg.search.x_tol)?;
    let foc_solutions = roots
        .iter()
        .map(|&e| {
            Ok(FocSolution {
                effort: e,
                residual: target - v.d1(e)?,
                expectation: expectation(e)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let on_grid = grid
        .iter()
        .map(|&e| expectation(e))
        .collect::<Result<Vec<_>>>()?;
    let (gmin, gmax) = on_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let at_min = expectation(s.effort.min)?;
    let at_max = expectation(s.effort.max)?;

    let outcome = if cfg.search.ties(gmin, gmax) {
        SearchOutcome {
            maximizers: vec![
                Candidate {
                    t: s.effort.min,
                    value: at_min,
                },
                Candidate {
                    t: s.effort.max,
                    value: at_max,
                },
            ],
            best: at_min.max(at_max),
            constant: true,
        }
    } else {
        let mut candidates = vec![
            Candidate {
                t: s.effort.min,
                value: at_min,
            },
            Candidate {
                t: s.effort.max,
                value: at_max,
            },
        ];
        candidates.extend(foc_solutions.iter().map(|f| Candidate {
            t: f.effort,
            value: f.expectation,
        }));
        candidates.sort_by(|a, b| a.t.total_cmp(&b.t));
        let mut merged: Vec<Candidate> = Vec::new();
        for c in candidates {
            match merged.last_mut() {
                Some(prev) if c.t - prev.t <= cfg.search.dedup_tol => {
                    let prev_is_end = prev.t == s.effort.min || prev.t == s.effort.max;
                    if c.value > prev.value || (c.value == prev.value && !prev_is_end) {
                        *prev = c;
                    }
                }
                _ => merged.push(c),
            }
        }
        let best = merged
            .iter()
            .map(|c| c.value)
            .fold(f64::NEG_INFINITY, f64::max);
        SearchOutcome {
            maximizers: merged
                .into_iter()
                .filter(|c| cfg.search.ties(c.value, best))
                .collect(),
            best,
            constant: false,
        }
    };
    let best_response =
        assemble_best_response(outcome, &s.effort, s.agent.reservation_utility, cfg, |e| {
            Ok(-v.d2(e)?)
        })?;
    let invisible = if slope == 0.0 {
        Some(detect_invisible_effort(s, cfg.invisible_eps, cfg)?)
    } else {
        None
    };
    Ok(TwoOutcomeLinearReport {
        slope,
        intercept,
        utility_spread: spread,
        foc_target: target,
        foc_solutions,
        expectation_at_min: at_min,
        expectation_at_max: at_max,
        best_response,
        invisible,
    })
}

/// Sampled check of one sign condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub holds: bool,
    pub min: f64,
    pub max: f64,
    /// First sample point where the condition fails.
    pub first_violation: Option<f64>,
}

impl AssumptionCheck {
    fn sample<F, P>(grid: &[f64], f: F, ok: P) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
        P: Fn(f64) -> bool,
    {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut first_violation = None;
        for &t in grid {
            let y = f(t)?;
            min = min.min(y);
            max = max.max(y);
            if first_violation.is_none() && !ok(y) {
                first_violation = Some(t);
            }
        }
        Ok(AssumptionCheck {
            holds: first_violation.is_none(),
            min,
            max,
            first_violation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalAssumptionsReport {
    pub wage_range: [f64; 2],
    /// `u' > 0`
    pub u_increasing: AssumptionCheck,
    /// `u'' <= 0`
    pub u_concave: AssumptionCheck,
    /// `v' > 0`
    pub v_increasing: AssumptionCheck,
    /// `v'' >= 0`
    pub v_convex: AssumptionCheck,
    /// `v'' > 0`, the one shape requirement kept by the generalized agent.
    pub v_strictly_convex: AssumptionCheck,
    /// All four classical conditions hold.
    pub classical: bool,
    /// `v' < 0` somewhere: the agent loses utility by not working.
    pub inner_need_of_working: bool,
    /// `v < 0` somewhere: some efforts are a source of utility.
    pub utility_from_effort: bool,
    /// `v'' < 0` somewhere.
    pub concave_disutility: bool,
}

pub fn classical_assumptions_report(
    s: &Scenario,
    wage_range: (f64, f64),
    cfg: &SolverConfig,
) -> Result<ClassicalAssumptionsReport> {
    let (lo, hi) = wage_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "wage range [{lo}, {hi}] is not a finite interval"
        )));
    }
    let wages = if lo < hi {
        uniform_grid(lo, hi, cfg.sample_grid)
    } else {
        vec![lo]
    };
    let efforts = uniform_grid(s.effort.min, s.effort.max, cfg.sample_grid);
    let u = &s.agent.u;
    let v = &s.agent.v;
    let u_increasing = AssumptionCheck::sample(&wages, |w| u.d1(w), |y| y > 0.0)?;
    let u_concave = AssumptionCheck::sample(&wages, |w| u.d2(w), |y| y <= 0.0)?;
    let v_increasing = AssumptionCheck::sample(&efforts, |e| v.d1(e), |y| y > 0.0)?;
    let v_convex = AssumptionCheck::sample(&efforts, |e| v.d2(e), |y| y >= 0.0)?;
    let v_strictly_convex = AssumptionCheck::sample(&efforts, |e| v.d2(e), |y| y > 0.0)?;
    let v_values = AssumptionCheck::sample(&efforts, |e| v.eval(e), |y| y >= 0.0)?;
    Ok(ClassicalAssumptionsReport {
        wage_range: [lo, hi],
        classical: u_increasing.holds && u_concave.holds && v_increasing.holds && v_convex.holds,
        inner_need_of_working: v_increasing.min < 0.0,
        utility_from_effort: !v_values.holds,
        concave_disutility: !v_convex.holds,
        u_increasing,
        u_concave,
        v_increasing,
        v_convex,
        v_strictly_convex,
    })
}
