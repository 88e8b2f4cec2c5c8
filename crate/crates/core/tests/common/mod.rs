//! Seeded scenario generators shared by the integration suites.
#![allow(dead_code)]

use contract_game::{
    AgentPreferences, Contract, Curve, EffortInterval, EffortProfile, OutcomeSet,
    PrincipalPreferences, Scenario,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poly(c: &[f64]) -> Curve {
    Curve::polynomial(c.to_vec()).unwrap()
}

/// Two outcomes x = (10, 2), p1 = 0.5e + 0.2, u(w) = w, v(e) = 2e², B(y) = y
/// on [0, 1].
pub fn reference() -> Scenario {
    Scenario {
        outcomes: OutcomeSet::new(vec![10.0, 2.0]).unwrap(),
        effort: EffortInterval::new(0.0, 1.0).unwrap(),
        profile: EffortProfile::two_outcome_linear(0.5, 0.2),
        agent: AgentPreferences {
            u: Curve::linear(0.0, 1.0),
            v: poly(&[0.0, 0.0, 2.0]),
            reservation_utility: 0.0,
        },
        principal: PrincipalPreferences {
            b: Curve::linear(0.0, 1.0),
        },
    }
}

pub fn reference_contract() -> Contract {
    Contract::new(vec![4.0, 0.0])
}

pub const REFERENCE_JSON: &str = include_str!("../fixtures/reference.json");

/// Coefficients in `e` of the polynomial whose coefficients in
/// `t = (e - lo) / width` are `ct`.
pub fn poly_in_unit(ct: &[f64], lo: f64, width: f64) -> Vec<f64> {
    // Expand Σ c_j ((e - lo)/width)^j by repeated multiplication.
    let mut out = vec![0.0; ct.len()];
    let mut basis = vec![1.0]; // ((e - lo)/width)^j
    for (j, &c) in ct.iter().enumerate() {
        if j > 0 {
            let mut next = vec![0.0; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] += b / width;
                next[k] -= b * lo / width;
            }
            basis = next;
        }
        for (k, &b) in basis.iter().enumerate() {
            out[k] += c * b;
        }
    }
    out
}

/// A curve `g` with `|g| ≤ 1` on the interval, scaled by `amp` and shifted by
/// `base`.
pub fn bounded_shape(r: &mut ChaCha8Rng, lo: f64, width: f64, base: f64, amp: f64) -> Curve {
    match r.random_range(0..4) {
        0 => {
            let c = poly_in_unit(&[-1.0, 2.0], lo, width);
            Curve::polynomial(vec![base + amp * c[0], amp * c[1]]).unwrap()
        }
        1 => {
            // 2(t - m)² - 1 with m in [0, 1]
            let m: f64 = r.random();
            let c = poly_in_unit(&[2.0 * m * m - 1.0, -4.0 * m, 2.0], lo, width);
            Curve::polynomial(vec![base + amp * c[0], amp * c[1], amp * c[2]]).unwrap()
        }
        2 => {
            // 2(exp(kt) - 1)/(exp(k) - 1) - 1
            let mut k: f64 = r.random_range(-3.0..3.0);
            if k.abs() < 0.2 {
                k = 0.2f64.copysign(k);
            }
            let denom = k.exp_m1();
            let c = k / width;
            let b = amp * 2.0 / denom * (-k * lo / width).exp();
            let a = base + amp * (-2.0 / denom - 1.0);
            Curve::exp_affine(a, b, c).unwrap()
        }
        _ => {
            let knots: Vec<f64> = (0..5).map(|i| lo + width * i as f64 / 4.0).collect();
            let values: Vec<f64> = (0..5)
                .map(|_| base + amp * r.random_range(-1.0..1.0))
                .collect();
            Curve::tabulated(knots, values).unwrap()
        }
    }
}

pub fn random_u(r: &mut ChaCha8Rng) -> Curve {
    match r.random_range(0..4) {
        0 => Curve::linear(r.random_range(-1.0..1.0), r.random_range(0.5..2.0)),
        1 => Curve::log_affine(0.0, r.random_range(0.5..3.0), r.random_range(1.0..3.0)).unwrap(),
        2 => Curve::power(
            r.random_range(0.5..2.0),
            r.random_range(0.3..0.9),
            r.random_range(0.5..2.0),
        )
        .unwrap(),
        _ => Curve::exp_affine(1.0, -1.0, -r.random_range(0.1..0.5)).unwrap(),
    }
}

/// Effort cost with `v'' > 0` on the interval.
pub fn random_convex_v(r: &mut ChaCha8Rng, lo: f64, width: f64) -> Curve {
    let m = lo + width * r.random_range(-0.5..1.5);
    let k = r.random_range(0.5..8.0);
    match r.random_range(0..4) {
        0 => poly(&[k * m * m, -2.0 * k * m, k]),
        1 => {
            // k(e - m)^4 + q(e - m)^2
            let q = r.random_range(0.2..4.0);
            let c = [
                k * m.powi(4) + q * m * m,
                -4.0 * k * m.powi(3) - 2.0 * q * m,
                6.0 * k * m * m + q,
                -4.0 * k * m,
                k,
            ];
            poly(&c)
        }
        2 => Curve::exp_affine(
            0.0,
            r.random_range(0.2..2.0),
            r.random_range(-2.0..2.0) / width,
        )
        .unwrap(),
        _ => Curve::power(
            r.random_range(0.5..4.0),
            r.random_range(1.3..3.0),
            -lo + r.random_range(0.0..1.0),
        )
        .unwrap(),
    }
}

/// Any cost shape, including concave and non-monotone ones.
pub fn random_v(r: &mut ChaCha8Rng, lo: f64, width: f64) -> Curve {
    match r.random_range(0..5) {
        0..=2 => random_convex_v(r, lo, width),
        3 => {
            let c = poly_in_unit(
                &[
                    0.0,
                    r.random_range(-3.0..3.0),
                    r.random_range(-6.0..6.0),
                    r.random_range(-6.0..6.0),
                ],
                lo,
                width,
            );
            poly(&c)
        }
        _ => Curve::linear(0.0, r.random_range(-2.0..2.0)),
    }
}

pub fn random_b(r: &mut ChaCha8Rng) -> Curve {
    if r.random_bool(0.5) {
        Curve::linear(0.0, 1.0)
    } else {
        Curve::exp_affine(1.0, -1.0, -r.random_range(0.05..0.3)).unwrap()
    }
}

pub fn random_interval(r: &mut ChaCha8Rng) -> EffortInterval {
    let lo = r.random_range(-1.0..1.0);
    EffortInterval::new(lo, lo + r.random_range(0.5..3.0)).unwrap()
}

/// A general validated scenario with `n ∈ [2, 4]` outcomes and a contract.
pub fn random_scenario(r: &mut ChaCha8Rng) -> (Scenario, Contract) {
    let n = r.random_range(2..=4usize);
    let effort = random_interval(r);
    let width = effort.width();
    let amp_cap = 0.9 / (n as f64 * (n - 1) as f64);
    let components = (0..n - 1)
        .map(|_| {
            let amp = amp_cap * r.random_range(0.2..1.0);
            bounded_shape(r, effort.min, width, 1.0 / n as f64, amp)
        })
        .collect();
    let s = Scenario {
        outcomes: OutcomeSet::new((0..n).map(|_| r.random_range(0.0..20.0)).collect()).unwrap(),
        effort,
        profile: EffortProfile::new(components),
        agent: AgentPreferences {
            u: random_u(r),
            v: random_v(r, effort.min, width),
            reservation_utility: r.random_range(-1.0..1.0),
        },
        principal: PrincipalPreferences { b: random_b(r) },
    };
    let w = Contract::new((0..n).map(|_| r.random_range(0.0..10.0)).collect());
    let s = s
        .validated(std::slice::from_ref(&w))
        .expect("generated scenario is valid");
    (s, w)
}

/// Effort-independent profile with a strictly convex cost, returned with the
/// closed-form argmin of `v` on the interval.
pub fn constant_profile_scenario(r: &mut ChaCha8Rng) -> (Scenario, Contract, f64) {
    let n = r.random_range(2..=4usize);
    let effort = random_interval(r);
    let (lo, hi, width) = (effort.min, effort.max, effort.width());
    let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let m = lo + width * r.random_range(-0.3..1.3);
    let k = r.random_range(0.5..8.0);
    let (v, argmin) = match r.random_range(0..4) {
        0 => (poly(&[k * m * m, -2.0 * k * m, k]), m.clamp(lo, hi)),
        1 => {
            let q = r.random_range(0.2..4.0);
            let c = [
                k * m.powi(4) + q * m * m,
                -4.0 * k * m.powi(3) - 2.0 * q * m,
                6.0 * k * m * m + q,
                -4.0 * k * m,
                k,
            ];
            (poly(&c), m.clamp(lo, hi))
        }
        2 => {
            let c = r.random_range(0.3..2.0) / width * if r.random_bool(0.5) { 1.0 } else { -1.0 };
            let v = Curve::exp_affine(0.0, r.random_range(0.2..2.0), c).unwrap();
            (v, if c > 0.0 { lo } else { hi })
        }
        _ => {
            // -b ln(e + c): convex and decreasing
            let v = Curve::log_affine(
                0.0,
                -r.random_range(0.2..2.0),
                -lo + r.random_range(0.1..1.0),
            )
            .unwrap();
            (v, hi)
        }
    };
    let s = Scenario {
        outcomes: OutcomeSet::new((0..n).map(|_| r.random_range(0.0..20.0)).collect()).unwrap(),
        effort,
        profile: EffortProfile::constant(&probs),
        agent: AgentPreferences {
            u: random_u(r),
            v,
            reservation_utility: 0.0,
        },
        principal: PrincipalPreferences { b: random_b(r) },
    };
    let w = Contract::new((0..n).map(|_| r.random_range(0.0..10.0)).collect());
    let s = s
        .validated(std::slice::from_ref(&w))
        .expect("generated scenario is valid");
    (s, w, argmin)
}

/// Two outcomes, `p_1` affine in effort with values in [0, 1], strictly
/// convex cost.
pub fn two_outcome_linear_scenario(r: &mut ChaCha8Rng) -> (Scenario, Contract) {
    let effort = random_interval(r);
    let (lo, width) = (effort.min, effort.width());
    let (a, b): (f64, f64) = (r.random(), r.random());
    let slope = (b - a) / width;
    let intercept = a - slope * lo;
    let s = Scenario {
        outcomes: OutcomeSet::new(vec![r.random_range(5.0..20.0), r.random_range(0.0..5.0)])
            .unwrap(),
        effort,
        profile: EffortProfile::two_outcome_linear(slope, intercept),
        agent: AgentPreferences {
            u: random_u(r),
            v: random_convex_v(r, lo, width),
            reservation_utility: 0.0,
        },
        principal: PrincipalPreferences { b: random_b(r) },
    };
    let w = Contract::new(vec![r.random_range(0.0..10.0), r.random_range(0.0..10.0)]);
    let s = s
        .validated(std::slice::from_ref(&w))
        .expect("generated scenario is valid");
    (s, w)
}

/// Linear profile components `1/n + a_i(2t - 1)`.
pub fn linear_profile(r: &mut ChaCha8Rng, n: usize, lo: f64, width: f64) -> EffortProfile {
    let amp_cap = 0.9 / (n as f64 * (n - 1) as f64);
    let c = poly_in_unit(&[-1.0, 2.0], lo, width);
    EffortProfile::new(
        (0..n - 1)
            .map(|_| {
                let amp = amp_cap * r.random_range(-1.0..1.0);
                Curve::polynomial(vec![1.0 / n as f64 + amp * c[0], amp * c[1]]).unwrap()
            })
            .collect(),
    )
}
