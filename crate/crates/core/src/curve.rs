//! One-dimensional parametric curves with analytic first and second derivatives.
//!
//! Every scalar function in a scenario (wage utility, effort disutility, the
//! principal's utility of the net result and each profile component) is a
//! [`Curve`]. Derivatives come from the closed form of each family, never
//! from numerical differentiation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real function of one variable drawn from a small set of families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    /// `Σ c_j t^j`
    Polynomial { coefficients: Vec<f64> },
    /// `a + b·exp(c·t)`
    ExpAffine { a: f64, b: f64, c: f64 },
    /// `a + b·ln(t + c)`, defined for `t + c > 0`
    LogAffine { a: f64, b: f64, c: f64 },
    /// `a·(t + c)^gamma`, defined for `t + c ≥ 0`
    Power { a: f64, gamma: f64, c: f64 },
    /// Monotone cubic Hermite interpolant through the knots.
    Tabulated(Tabulated),
}

impl Curve {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let c = Curve::Polynomial { coefficients };
        c.check()?;
        Ok(c)
    }

    pub fn linear(intercept: f64, slope: f64) -> Self {
        Curve::Polynomial {
            coefficients: vec![intercept, slope],
        }
    }

    pub fn constant(value: f64) -> Self {
        Curve::Polynomial {
            coefficients: vec![value],
        }
    }

    pub fn exp_affine(a: f64, b: f64, c: f64) -> Result<Self> {
        let curve = Curve::ExpAffine { a, b, c };
        curve.check()?;
        Ok(curve)
    }

    pub fn log_affine(a: f64, b: f64, c: f64) -> Result<Self> {
        let curve = Curve::LogAffine { a, b, c };
        curve.check()?;
        Ok(curve)
    }

    pub fn power(a: f64, gamma: f64, c: f64) -> Result<Self> {
        let curve = Curve::Power { a, gamma, c };
        curve.check()?;
        Ok(curve)
    }

    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Curve::Tabulated(Tabulated::new(knots, values)?))
    }

    pub fn family(&self) -> &'static str {
        match self {
            Curve::Polynomial { .. } => "polynomial",
            Curve::ExpAffine { .. } => "exp_affine",
            Curve::LogAffine { .. } => "log_affine",
            Curve::Power { .. } => "power",
            Curve::Tabulated(_) => "tabulated",
        }
    }

    /// Parameter sanity: finite parameters, non-empty coefficient list.
    pub fn check(&self) -> Result<()> {
        let finite = |name: &str, xs: &[f64]| {
            if xs.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::InvalidCurve(format!(
                    "{name} parameters must be finite"
                )))
            }
        };
        match self {
            Curve::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidCurve(
                        "polynomial needs at least one coefficient".into(),
                    ));
                }
                finite("polynomial", coefficients)
            }
            Curve::ExpAffine { a, b, c } => finite("exp_affine", &[*a, *b, *c]),
            Curve::LogAffine { a, b, c } => finite("log_affine", &[*a, *b, *c]),
            Curve::Power { a, gamma, c } => finite("power", &[*a, *gamma, *c]),
            Curve::Tabulated(t) => Tabulated::new(t.knots.clone(), t.values.clone()).map(|_| ()),
        }
    }

    /// Polynomial degree after dropping trailing zero coefficients; `None` for
    /// non-polynomial families.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            Curve::Polynomial { coefficients } => {
                Some(coefficients.iter().rposition(|&c| c != 0.0).unwrap_or(0))
            }
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.derivative(t, 0)
    }

    pub fn d1(&self, t: f64) -> Result<f64> {
        self.derivative(t, 1)
    }

    pub fn d2(&self, t: f64) -> Result<f64> {
        self.derivative(t, 2)
    }

    /// Value (`order = 0`) or analytic derivative (`order` 1 or 2) at `t`.
    pub fn derivative(&self, t: f64, order: u8) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(self.family(), t, "argument is not finite"));
        }
        let value = match self {
            Curve::Polynomial { coefficients } => poly_derivative(coefficients, t, order),
            Curve::ExpAffine { a, b, c } => {
                let ex = (c * t).exp();
                match order {
                    0 => a + b * ex,
                    1 => b * c * ex,
                    _ => b * c * c * ex,
                }
            }
            Curve::LogAffine { a, b, c } => {
                let s = t + c;
                if s <= 0.0 {
                    return Err(Error::domain("log_affine", t, "requires t + c > 0"));
                }
                match order {
                    0 => a + b * s.ln(),
                    1 => b / s,
                    _ => -b / (s * s),
                }
            }
            Curve::Power { a, gamma, c } => {
                let s = t + c;
                if s < 0.0 {
                    return Err(Error::domain("power", t, "requires t + c >= 0"));
                }
                power_derivative(*a, *gamma, s, order)
            }
            Curve::Tabulated(tab) => tab.derivative(t, order)?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::domain(
                self.family(),
                t,
                format!("derivative of order {order} is not finite"),
            ))
        }
    }
}

fn poly_derivative(coefficients: &[f64], t: f64, order: u8) -> f64 {
    // Horner over the differentiated coefficients.
    let k = order as usize;
    let mut acc = 0.0;
    for j in (k..coefficients.len()).rev() {
        let factor = match k {
            0 => 1.0,
            1 => j as f64,
            _ => (j * (j - 1)) as f64,
        };
        acc = acc * t + factor * coefficients[j];
    }
    acc
}

fn power_derivative(a: f64, gamma: f64, s: f64, order: u8) -> f64 {
    match order {
        0 => {
            if gamma == 0.0 {
                a
            } else {
                a * s.powf(gamma)
            }
        }
        1 => {
            if gamma == 0.0 {
                0.0
            } else if gamma == 1.0 {
                a
            } else {
                a * gamma * s.powf(gamma - 1.0)
            }
        }
        _ => {
            if gamma == 0.0 || gamma == 1.0 {
                0.0
            } else if gamma == 2.0 {
                2.0 * a
            } else {
                a * gamma * (gamma - 1.0) * s.powf(gamma - 2.0)
            }
        }
    }
}

/// Knot data for a tabulated curve together with the Fritsch–Carlson
/// (PCHIP) slopes that make the cubic Hermite interpolant shape-preserving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabulatedSpec", into = "TabulatedSpec")]
pub struct Tabulated {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedSpec {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<TabulatedSpec> for Tabulated {
    type Error = Error;

    fn try_from(spec: TabulatedSpec) -> Result<Self> {
        Tabulated::new(spec.knots, spec.values)
    }
}

impl From<Tabulated> for TabulatedSpec {
    fn from(t: Tabulated) -> Self {
        TabulatedSpec {
            knots: t.knots,
            values: t.values,
        }
    }
}

impl Tabulated {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::InvalidCurve(format!(
                "tabulated curve has {} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.len() < 3 {
            return Err(Error::InvalidCurve(
                "tabulated curve needs at least 3 knots".into(),
            ));
        }
        if knots.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidCurve("tabulated data must be finite".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve(
                "tabulated knots must be strictly increasing".into(),
            ));
        }
        let slopes = pchip_slopes(&knots, &values);
        Ok(Tabulated {
            knots,
            values,
            slopes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn derivative(&self, t: f64, order: u8) -> Result<f64> {
        let n = self.knots.len();
        let (lo, hi) = (self.knots[0], self.knots[n - 1]);
        if t < lo || t > hi {
            return Err(Error::domain(
                "tabulated",
                t,
                format!("outside knot range [{lo}, {hi}]"),
            ));
        }
        let k = self.knots.partition_point(|&x| x <= t).clamp(1, n - 1) - 1;
        let h = self.knots[k + 1] - self.knots[k];
        let delta = (self.values[k + 1] - self.values[k]) / h;
        let (d0, d1) = (self.slopes[k], self.slopes[k + 1]);
        let c2 = (3.0 * delta - 2.0 * d0 - d1) / h;
        let c3 = (d0 + d1 - 2.0 * delta) / (h * h);
        let s = t - self.knots[k];
        Ok(match order {
            0 => self.values[k] + s * (d0 + s * (c2 + s * c3)),
            1 => d0 + s * (2.0 * c2 + 3.0 * c3 * s),
            _ => 2.0 * c2 + 6.0 * c3 * s,
        })
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}
