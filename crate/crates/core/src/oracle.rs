//! Independent verification oracles (dense-grid argmax, central finite
//! differences) and Monte Carlo simulation of nature's draw.
//!
//! Nothing here calls into the agent solver's search code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Contract, Scenario};

/// Generator behind every simulation; recorded in each [`SimulationResult`].
pub const GENERATOR: &str = "chacha8/rand_chacha-0.9/stream=shard";

/// Maximum of `f` over `points` equally spaced abscissae of `[lo, hi]`.
/// Ties keep the smallest abscissa.
pub fn grid_argmax<F>(mut f: F, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points < 2 {
        return Err(Error::InvalidArgument(
            "grid_argmax needs at least 2 points".into(),
        ));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (lo, f(lo)?);
    for i in 1..points {
        let t = if i == points - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        let y = f(t)?;
        if y > best.1 {
            best = (t, y);
        }
    }
    Ok(best)
}

/// `(f(t+h) - f(t-h)) / 2h`
pub fn finite_diff_d1<F>(mut f: F, t: f64, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(t + step)? - f(t - step)?) / (2.0 * step))
}

/// `(f(t+h) - 2f(t) + f(t-h)) / h²`
pub fn finite_diff_d2<F>(mut f: F, t: f64, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(t + step)? - 2.0 * f(t)? + f(t - step)?) / (step * step))
}

/// Generator for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Inverse-CDF draw of an outcome index (0-based) from `probs`.
fn draw_index<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

/// Nature's move: draws an outcome index (0-based) with probability
/// `p_i(e)`.
pub fn sample_outcome<R: Rng + ?Sized>(s: &Scenario, e: f64, rng: &mut R) -> Result<usize> {
    let probs = s.profile_probs(e)?;
    Ok(draw_index(&cumulative(&probs), rng))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub draws: u64,
    pub effort: f64,
    pub agent_mean: f64,
    pub principal_mean: f64,
    pub agent_sd: f64,
    pub principal_sd: f64,
    /// Draw count per outcome, in outcome order.
    pub frequencies: Vec<u64>,
    pub seed: u64,
    pub shards: u64,
    pub generator: String,
}

/// Outcome counts for `n` draws split over `shards` independent streams.
/// Shard `k` draws `n / shards` times, plus one for `k < n % shards`.
pub fn outcome_counts(
    s: &Scenario,
    e: f64,
    n: u64,
    seed: u64,
    shards: u64,
    parallel: bool,
) -> Result<Vec<u64>> {
    if shards == 0 {
        return Err(Error::InvalidArgument(
            "shard count must be positive".into(),
        ));
    }
    let cum = cumulative(&s.profile_probs(e)?);
    let run_shard = |k: u64| {
        let draws = n / shards + u64::from(k < n % shards);
        let mut rng = shard_rng(seed, k);
        let mut counts = vec![0u64; cum.len()];
        for _ in 0..draws {
            counts[draw_index(&cum, &mut rng)] += 1;
        }
        counts
    };
    let per_shard: Vec<Vec<u64>> = if parallel {
        (0..shards).into_par_iter().map(run_shard).collect()
    } else {
        (0..shards).map(run_shard).collect()
    };
    let mut total = vec![0u64; cum.len()];
    for counts in per_shard {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    Ok(total)
}

/// Simulates `n` rounds of nature's draw at effort `e` under contract `w`;
/// the agent receives `u(w_i) - v(e)` and the principal `B(x_i - w_i)`.
pub fn monte_carlo_payoffs(
    s: &Scenario,
    w: &Contract,
    e: f64,
    n: u64,
    seed: u64,
) -> Result<SimulationResult> {
    monte_carlo_payoffs_sharded(s, w, e, n, seed, 1)
}

/// As [`monte_carlo_payoffs`], with the draws split over `shards` streams
/// that run in parallel. The result depends only on `(seed, shards)`.
pub fn monte_carlo_payoffs_sharded(
    s: &Scenario,
    w: &Contract,
    e: f64,
    n: u64,
    seed: u64,
    shards: u64,
) -> Result<SimulationResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    s.check_contract(w)?;
    let cost = s.agent.v.eval(e)?;
    let agent_pay = w
        .wages()
        .iter()
        .map(|&wi| Ok(s.agent.u.eval(wi)? - cost))
        .collect::<Result<Vec<_>>>()?;
    let principal_pay = s
        .outcomes
        .values()
        .iter()
        .zip(w.wages())
        .map(|(x, wi)| s.principal.b.eval(x - wi))
        .collect::<Result<Vec<_>>>()?;
    let counts = outcome_counts(s, e, n, seed, shards, shards > 1)?;
    let (agent_mean, agent_sd) = moments(&counts, &agent_pay, n);
    let (principal_mean, principal_sd) = moments(&counts, &principal_pay, n);
    Ok(SimulationResult {
        draws: n,
        effort: e,
        agent_mean,
        principal_mean,
        agent_sd,
        principal_sd,
        frequencies: counts,
        seed,
        shards,
        generator: GENERATOR.to_string(),
    })
}

/// Mean and sample standard deviation of a payoff that takes value
/// `values[i]` on `counts[i]` draws.
fn moments(counts: &[u64], values: &[f64], n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = counts
        .iter()
        .zip(values)
        .map(|(&c, v)| c as f64 * v)
        .sum::<f64>()
        / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = counts
        .iter()
        .zip(values)
        .map(|(&c, v)| c as f64 * (v - mean) * (v - mean))
        .sum();
    (mean, (ss / (nf - 1.0)).sqrt())
}
