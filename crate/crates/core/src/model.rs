//! Data model of the game: outcomes, contracts, effort profile, preferences.

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result, ValidationErrors};
use crate::search::uniform_grid;

/// Tolerance on probability bounds before a profile value is rejected.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Number of effort points used by [`Scenario::validate`].
pub const VALIDATION_GRID: usize = 2049;

/// Monetary outcomes `x_1..x_n` the principal may receive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeSet(Vec<f64>);

impl OutcomeSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Dimension(format!(
                "outcome set needs at least 2 outcomes, got {}",
                values.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("outcomes must be finite".into()));
        }
        Ok(OutcomeSet(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Wage vector, one wage per outcome.
#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Contract(pub Vec<f64>);

impl Contract {
    pub fn new(wages: Vec<f64>) -> Self {
        Contract(wages)
    }

    pub fn wages(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lexicographic order on wages using the IEEE total order.
    pub fn lex_cmp(&self, other: &Contract) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl From<Vec<f64>> for Contract {
    fn from(w: Vec<f64>) -> Self {
        Contract(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffortInterval {
    pub min: f64,
    pub max: f64,
}

impl EffortInterval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        let iv = EffortInterval { min, max };
        iv.check()?;
        Ok(iv)
    }

    pub fn check(&self) -> Result<()> {
        if self.min.is_finite() && self.max.is_finite() && self.min < self.max {
            Ok(())
        } else {
            Err(Error::InvalidInterval {
                min: self.min,
                max: self.max,
            })
        }
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.min && e <= self.max
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }
}

/// Component curves `p_1..p_{n-1}`; `p_n` is their complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EffortProfile {
    pub components: Vec<Curve>,
}

impl EffortProfile {
    pub fn new(components: Vec<Curve>) -> Self {
        EffortProfile { components }
    }

    /// Two-outcome profile with `p_1(e) = slope·e + intercept`.
    pub fn two_outcome_linear(slope: f64, intercept: f64) -> Self {
        EffortProfile::new(vec![Curve::linear(intercept, slope)])
    }

    /// Effort-independent profile; `probs` has all `n` entries and the last
    /// one is implied by the others.
    pub fn constant(probs: &[f64]) -> Self {
        let n = probs.len();
        EffortProfile::new(
            probs[..n.saturating_sub(1)]
                .iter()
                .map(|&p| Curve::constant(p))
                .collect(),
        )
    }

    pub fn outcome_count(&self) -> usize {
        self.components.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentPreferences {
    /// Utility of the wage.
    pub u: Curve,
    /// Disutility (or utility, where negative) of effort.
    pub v: Curve,
    #[serde(default)]
    pub reservation_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrincipalPreferences {
    /// Utility of the net result `x - w`.
    pub b: Curve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub outcomes: OutcomeSet,
    pub effort: EffortInterval,
    pub profile: EffortProfile,
    pub agent: AgentPreferences,
    pub principal: PrincipalPreferences,
}

impl Scenario {
    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// Outcome probabilities at effort `e`. Entries within [`PROB_TOLERANCE`]
    /// of 0 or 1 are clamped; anything further out is an error.
    pub fn profile_probs(&self, e: f64) -> Result<Vec<f64>> {
        self.check_effort(e)?;
        let mut probs = Vec::with_capacity(self.profile.components.len() + 1);
        let mut sum = 0.0;
        for (i, c) in self.profile.components.iter().enumerate() {
            let p = clamp_prob(c.eval(e)?, i + 1, e)?;
            sum += p;
            probs.push(p);
        }
        let last = clamp_prob(1.0 - sum, probs.len() + 1, e)?;
        probs.push(last);
        Ok(probs)
    }

    /// `Σ p_i(e)·weights[i]` without materializing the probability vector;
    /// same clamping and errors as [`Scenario::profile_probs`].
    pub fn profile_dot(&self, e: f64, weights: &[f64]) -> Result<f64> {
        self.check_effort(e)?;
        let k = self.profile.components.len();
        let mut sum = 0.0;
        let mut acc = 0.0;
        for (i, c) in self.profile.components.iter().enumerate() {
            let p = clamp_prob(c.eval(e)?, i + 1, e)?;
            sum += p;
            acc += p * weights[i];
        }
        let last = clamp_prob(1.0 - sum, k + 1, e)?;
        Ok(acc + last * weights[k])
    }

    /// `Σ p_i^(order)(e)·weights[i]` for derivative order 1 or 2.
    pub fn profile_deriv_dot(&self, e: f64, order: u8, weights: &[f64]) -> Result<f64> {
        self.check_effort(e)?;
        let k = self.profile.components.len();
        let last = weights[k];
        let mut acc = 0.0;
        for (i, c) in self.profile.components.iter().enumerate() {
            acc += c.derivative(e, order)? * (weights[i] - last);
        }
        Ok(acc)
    }

    /// First derivatives `p_i'(e)`, with `p_n' = -Σ p_i'`.
    pub fn profile_d1(&self, e: f64) -> Result<Vec<f64>> {
        self.profile_derivs(e, 1)
    }

    /// Second derivatives `p_i''(e)`, with `p_n'' = -Σ p_i''`.
    pub fn profile_d2(&self, e: f64) -> Result<Vec<f64>> {
        self.profile_derivs(e, 2)
    }

    fn profile_derivs(&self, e: f64, order: u8) -> Result<Vec<f64>> {
        self.check_effort(e)?;
        let mut out = Vec::with_capacity(self.profile.components.len() + 1);
        let mut sum = 0.0;
        for c in &self.profile.components {
            let d = c.derivative(e, order)?;
            sum += d;
            out.push(d);
        }
        out.push(-sum);
        Ok(out)
    }

    pub fn check_effort(&self, e: f64) -> Result<()> {
        if self.effort.contains(e) {
            Ok(())
        } else {
            Err(Error::domain(
                "effort",
                e,
                format!("outside [{}, {}]", self.effort.min, self.effort.max),
            ))
        }
    }

    pub fn check_contract(&self, w: &Contract) -> Result<()> {
        if w.len() != self.n_outcomes() {
            return Err(Error::Dimension(format!(
                "contract has {} wages but there are {} outcomes",
                w.len(),
                self.n_outcomes()
            )));
        }
        if w.wages().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("wages must be finite".into()));
        }
        Ok(())
    }

    /// Checks dimensions, curve parameters, profile probabilities and curve
    /// domains on a uniform effort grid, plus `u(w_i)` and `B(x_i - w_i)` for
    /// every supplied contract. Collects every failing constraint, reporting
    /// the first offending point of each.
    pub fn validate(&self, contracts: &[Contract]) -> Result<(), ValidationErrors> {
        let mut errors = Vec::new();
        let n = self.n_outcomes();

        if self.outcomes.len() < 2 {
            errors.push(Error::Dimension(format!(
                "outcome set needs at least 2 outcomes, got {}",
                self.outcomes.len()
            )));
        }
        if self.outcomes.values().iter().any(|x| !x.is_finite()) {
            errors.push(Error::InvalidArgument("outcomes must be finite".into()));
        }
        if self.profile.outcome_count() != n {
            errors.push(Error::Dimension(format!(
                "profile has {} components, expected {} for {} outcomes",
                self.profile.components.len(),
                n.saturating_sub(1),
                n
            )));
        }
        if !self.agent.reservation_utility.is_finite() {
            errors.push(Error::InvalidArgument(
                "reservation utility must be finite".into(),
            ));
        }
        let curves_ok = {
            let mut ok = true;
            for c in self.profile.components.iter().chain([
                &self.agent.u,
                &self.agent.v,
                &self.principal.b,
            ]) {
                if let Err(e) = c.check() {
                    errors.push(e);
                    ok = false;
                }
            }
            ok
        };
        let interval_ok = match self.effort.check() {
            Ok(()) => true,
            Err(e) => {
                errors.push(e);
                false
            }
        };

        if curves_ok && interval_ok {
            let grid = uniform_grid(self.effort.min, self.effort.max, VALIDATION_GRID);
            let mut seen = Vec::new();
            let mut record = |key: (usize, u8, usize), err: Error, errors: &mut Vec<Error>| {
                if !seen.contains(&key) {
                    seen.push(key);
                    errors.push(err);
                }
            };
            for &e in &grid {
                let mut sum = 0.0;
                let mut complement_ok = true;
                for (i, c) in self.profile.components.iter().enumerate() {
                    for order in 0..=2u8 {
                        match c.derivative(e, order) {
                            Ok(p) if order == 0 => {
                                sum += p;
                                if !prob_in_range(p) {
                                    record(
                                        (i, 3, 0),
                                        Error::ProbabilityRange {
                                            index: i + 1,
                                            effort: e,
                                            value: p,
                                        },
                                        &mut errors,
                                    );
                                }
                            }
                            Ok(_) => {}
                            Err(err) => {
                                complement_ok = false;
                                record((i, order, 0), err, &mut errors);
                            }
                        }
                    }
                }
                let last = 1.0 - sum;
                if complement_ok && self.profile.outcome_count() == n && !prob_in_range(last) {
                    record(
                        (n - 1, 3, 0),
                        Error::ProbabilityRange {
                            index: n,
                            effort: e,
                            value: last,
                        },
                        &mut errors,
                    );
                }
                for order in 0..=2u8 {
                    if let Err(err) = self.agent.v.derivative(e, order) {
                        record((usize::MAX, order, 1), err, &mut errors);
                    }
                }
            }
        }

        for (k, w) in contracts.iter().enumerate() {
            if w.len() != n {
                errors.push(Error::Dimension(format!(
                    "contract {k} has {} wages but there are {n} outcomes",
                    w.len()
                )));
                continue;
            }
            if w.wages().iter().any(|x| !x.is_finite()) {
                errors.push(Error::InvalidArgument(format!(
                    "contract {k} has non-finite wages"
                )));
                continue;
            }
            if !curves_ok {
                continue;
            }
            for (i, &wi) in w.wages().iter().enumerate() {
                if let Err(err) = self.agent.u.eval(wi) {
                    errors.push(err);
                }
                if let Some(&x) = self.outcomes.values().get(i) {
                    if let Err(err) = self.principal.b.eval(x - wi) {
                        errors.push(err);
                    }
                }
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(ValidationErrors(errors))
        }
    }

    /// Consumes the scenario and returns it only if [`Scenario::validate`]
    /// passes.
    pub fn validated(self, contracts: &[Contract]) -> Result<Self, ValidationErrors> {
        self.validate(contracts)?;
        Ok(self)
    }
}

fn prob_in_range(p: f64) -> bool {
    (-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&p)
}

fn clamp_prob(p: f64, index: usize, effort: f64) -> Result<f64> {
    if prob_in_range(p) {
        Ok(p.clamp(0.0, 1.0))
    } else {
        Err(Error::ProbabilityRange {
            index,
            effort,
            value: p,
        })
    }
}
