//! Closed-form capture-fraction bounds.

use serde::{Deserialize, Serialize};

use crate::environment::EnvParams;
use crate::error::{Error, Result};

/// Beardwood-Halton-Hammersley constant for Euclidean tours in the plane.
pub const BETA_TSP: f64 = 0.7120;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// The error function `(2 / sqrt(pi)) * integral_0^x exp(-t^2) dt`.
///
/// For `|x| <= 3` uses the everywhere-positive series
/// `exp(-x^2) * sum 2^n x^(2n+1) / (1 * 3 * ... * (2n+1))`; beyond that
/// `1 - erfc(x)` with erfc from its continued fraction. Absolute error stays
/// below `1e-15` on the series branch and `1e-14` on the other.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let r = if a <= 3.0 {
        erf_series(a)
    } else {
        1.0 - erfc_cf(a)
    };
    r.copysign(x)
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfc for `x >= 3` by the modified Lentz evaluation of
/// `erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..200 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
}

/// Greedy (hence longest-path) capture-fraction lower bound for `L >= vW`:
/// `1 / (sqrt(pi a) erf(sqrt(a)) + exp(-a))` with `a = lambda W / 2`.
pub fn lp_lower_bound(lambda: f64, width: f64) -> f64 {
    let alpha = lambda * width / 2.0;
    let s = alpha.sqrt();
    1.0 / ((std::f64::consts::PI * alpha).sqrt() * erf(s) + (-alpha).exp())
}

/// Guarantee `F(LP) >= (1 - vW/L) F(NCLP)`, clamped at zero.
pub fn lp_competitive_factor(v: f64, width: f64, length: f64) -> f64 {
    (1.0 - v * width / length).max(0.0)
}

fn slow_regime(bound: &'static str, v: f64) -> Result<()> {
    if v < 1.0 {
        Ok(())
    } else {
        Err(Error::Regime {
            policy: bound,
            required: "v < 1",
            v,
        })
    }
}

/// Upper bound `min(1, 2 / sqrt(v lambda W))` on any causal policy, `v < 1`.
pub fn causal_upper_bound(v: f64, lambda: f64, width: f64) -> Result<f64> {
    slow_regime("causal upper bound", v)?;
    Ok((2.0 / (v * lambda * width).sqrt()).min(1.0))
}

/// Asymptotic TMHP-fraction lower bound `min(1, 1 / (beta sqrt(v lambda W)))`.
pub fn tf_lower_bound(v: f64, lambda: f64, width: f64, beta_tsp: f64) -> Result<f64> {
    slow_regime("TF lower bound", v)?;
    Ok((1.0 / (beta_tsp * (v * lambda * width).sqrt())).min(1.0))
}

/// Every bound that applies to an environment, `None` where it does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    #[serde(rename = "v")]
    pub speed: f64,
    pub lambda: f64,
    #[serde(rename = "W")]
    pub width: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub alpha: f64,
    pub beta_tsp: f64,
    pub lp_lower_bound: Option<f64>,
    pub lp_competitive_factor: Option<f64>,
    pub causal_upper_bound: Option<f64>,
    pub tf_lower_bound: Option<f64>,
}

impl BoundsReport {
    /// `lp_lower_bound` is only reported when `v >= 1` and `L >= vW`.
    pub fn new(env: &EnvParams, beta_tsp: f64) -> Result<Self> {
        if !(beta_tsp.is_finite() && beta_tsp > 0.0) {
            return Err(Error::Parameter {
                field: "beta_tsp",
                value: beta_tsp,
            });
        }
        let (v, lambda, w, l) = (env.speed(), env.rate(), env.width(), env.length());
        let fast = v >= 1.0;
        Ok(Self {
            speed: v,
            lambda,
            width: w,
            length: l,
            alpha: lambda * w / 2.0,
            beta_tsp,
            lp_lower_bound: (fast && l >= v * w).then(|| lp_lower_bound(lambda, w)),
            lp_competitive_factor: fast.then(|| lp_competitive_factor(v, w, l)),
            causal_upper_bound: causal_upper_bound(v, lambda, w).ok(),
            tf_lower_bound: tf_lower_bound(v, lambda, w, beta_tsp).ok(),
        })
    }
}
