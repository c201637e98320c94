//! The `c2(sigma1)` trade-off at fixed `lambda_u` and the inverse problem of
//! which speed pairs can be produced by exponentially decaying data.

use serde::{Deserialize, Serialize};

use super::{hat_c_nlp, tilde_lambda_nlp, ModelParams, NlpCase};
use crate::error::{Error, Result};

/// Smaller root of `l + (1-a)/l = c`, i.e. the decay rate of a front of speed
/// `c >= 2 sqrt(1-a)` into a state with linear growth `1-a`.
///
/// Written in the cancellation-free form.
pub(crate) fn slow_rate(c: f64, a: f64) -> f64 {
    let disc = (c * c - 4.0 * (1.0 - a)).max(0.0);
    2.0 * (1.0 - a) / (c + disc.sqrt())
}

/// `f`, `g`, their inverses and `g_inf` for fixed `a` and `lambda_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurves {
    pub a: f64,
    pub lambda_u: f64,
}

pub fn tradeoff_curves(params: &ModelParams, lambda_u: f64) -> Result<TradeoffCurves> {
    params.validate()?;
    if params.a >= 1.0 {
        return Err(Error::invalid("a", "trade-off curves need a < 1"));
    }
    if !(lambda_u.is_finite() && lambda_u > 0.0) {
        return Err(Error::invalid("lambda_u", format!("must be > 0, got {lambda_u}")));
    }
    Ok(TradeoffCurves {
        a: params.a,
        lambda_u,
    })
}

impl TradeoffCurves {
    /// `c2` when the faster species' front is the one pulling.
    pub fn f(&self, sigma1: f64) -> f64 {
        let s = 0.5 * sigma1 - self.a.sqrt();
        s + (1.0 - self.a) / s
    }

    pub fn f_inv(&self, c2: f64) -> f64 {
        2.0 * slow_rate(c2, self.a) + 2.0 * self.a.sqrt()
    }

    /// `c2` when the inherited decay rate `lambda~_nlp` is the one pulling.
    pub fn g(&self, sigma1: f64) -> f64 {
        let l = tilde_lambda_nlp(sigma1, self.lambda_u, self.a);
        l + (1.0 - self.a) / l
    }

    /// Defined for `c2 >= 2 sqrt(1-a)` with `lambda_u` above the matching
    /// decay rate.
    pub fn g_inv(&self, c2: f64) -> f64 {
        let l = slow_rate(c2, self.a);
        self.lambda_u + l + self.a / (self.lambda_u - l)
    }

    /// Limit of `g` as `sigma1 -> inf`.
    pub fn g_infinity(&self) -> f64 {
        self.lambda_u + (1.0 - self.a) / self.lambda_u
    }

    /// `sigma1` interval `(lo, hi]` on which `f` is decreasing and one-to-one
    /// onto `[2 sqrt(1-a), inf)`.
    pub fn f_domain(&self) -> (f64, f64) {
        let sa = self.a.sqrt();
        (2.0 * sa, 2.0 * (sa + (1.0 - self.a).sqrt()))
    }

    /// `sigma1` interval `(lo, hi]` on which `g` is decreasing and one-to-one.
    /// `hi` is infinite when `lambda_u <= sqrt(1-a)`.
    pub fn g_domain(&self) -> (f64, f64) {
        let lo = self.lambda_u + self.a / self.lambda_u;
        let s = (1.0 - self.a).sqrt();
        let hi = if self.lambda_u > s {
            self.lambda_u + s + self.a / (self.lambda_u - s)
        } else {
            f64::INFINITY
        };
        (lo, hi)
    }
}

/// Which mechanism sets `c2 = max(c_LLW, c^_nlp)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C2Branch {
    Llw,
    PulledByFaster,
    NonlocalLambda,
    LocallyPulled,
}

impl C2Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            C2Branch::Llw => "llw",
            C2Branch::PulledByFaster => "pulled_by_faster",
            C2Branch::NonlocalLambda => "nonlocal_lambda",
            C2Branch::LocallyPulled => "locally_pulled",
        }
    }
}

/// `c2 = max(c_llw, c^_nlp(sigma1, lambda_u, a))` together with the branch
/// that attains the maximum. Ties go to the LLW speed.
pub fn c2_profile(sigma1: f64, lambda_u: f64, a: f64, c_llw: f64) -> (f64, C2Branch) {
    let (nlp, case) = hat_c_nlp(sigma1, lambda_u, a);
    if c_llw >= nlp {
        (c_llw, C2Branch::Llw)
    } else {
        let branch = match case {
            NlpCase::PulledByFaster => C2Branch::PulledByFaster,
            NlpCase::NonlocalLambda => C2Branch::NonlocalLambda,
            NlpCase::LocallyPulled => C2Branch::LocallyPulled,
        };
        (nlp, branch)
    }
}

/// Shape class of `sigma1 -> c2` in the mixed case `a < 1 < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedSubcase {
    /// `g_inf <= c^_LLW`, `lambda_u >= sqrt a + sqrt(1-a)`: f then plateau.
    A1,
    /// `g_inf <= c^_LLW`, `sqrt(dr) <= lambda_u < sqrt a + sqrt(1-a)`,
    /// `g^-1(c^_LLW) > 2 lambda_u`: f, g, plateau.
    A2,
    /// `g_inf <= c^_LLW`, `lambda_u < sqrt(dr)`: g then plateau.
    A3,
    /// `g_inf > c^_LLW`, `lambda_u >= sqrt a + sqrt(1-a)`: f then plateau.
    B1,
    /// `g_inf > c^_LLW`, `sqrt(dr) <= lambda_u < sqrt a + sqrt(1-a)`: f then g.
    B2,
    /// `g_inf > c^_LLW`, `lambda_u < sqrt(dr)`: g only.
    B3,
    /// Falls between the listed cases (the extra `g^-1` condition of A2
    /// fails).
    Unclassified,
}

pub fn mixed_subcase(params: &ModelParams, lambda_u: f64, hat_c_llw: f64) -> Result<MixedSubcase> {
    let curves = tradeoff_curves(params, lambda_u)?;
    let a = params.a;
    let split = a.sqrt() + (1.0 - a).sqrt();
    let sdr = (params.d * params.r).sqrt();
    let below = curves.g_infinity() <= hat_c_llw;
    Ok(if lambda_u >= split {
        if below {
            MixedSubcase::A1
        } else {
            MixedSubcase::B1
        }
    } else if lambda_u >= sdr {
        if !below {
            MixedSubcase::B2
        } else if lambda_u > slow_rate(hat_c_llw, a)
            && curves.g_inv(hat_c_llw) > 2.0 * lambda_u
        {
            MixedSubcase::A2
        } else {
            MixedSubcase::Unclassified
        }
    } else if below {
        MixedSubcase::A3
    } else {
        MixedSubcase::B3
    })
}

/// Answer to: which decay rates produce the speed pair `(c_bar, c_under)`?
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Realizability {
    NotRealizable,
    /// Unique `lambda_v^+`; every `lambda_u >= lambda_u_min` works.
    UniqueLambdaVPlus {
        lambda_v_plus: f64,
        lambda_u_min: f64,
    },
    UniquePair {
        lambda_v_plus: f64,
        lambda_u: f64,
    },
}

/// Relative tolerance for the boundary case `c_under == f(c_bar)`.
pub const REALIZABILITY_RTOL: f64 = 1e-12;

/// Classifies `(c_bar, c_under)` with `c_bar > c_under`, `c_bar > 2 sqrt(dr)`
/// and `c_under > c^_LLW`.
///
/// The lowest reachable `c2` at `sigma1 = c_bar` is `f(c_bar)` while `f` is
/// defined there and `2 sqrt(1-a)` beyond.
pub fn realizability(
    c_bar: f64,
    c_under: f64,
    params: &ModelParams,
    hat_c_llw: f64,
) -> Result<Realizability> {
    params.validate()?;
    let ModelParams { d, r, a, .. } = *params;
    if a >= 1.0 {
        return Err(Error::invalid("a", "realizability needs a < 1"));
    }
    let sdr = (d * r).sqrt();
    if !(c_bar > 2.0 * sdr) {
        return Err(Error::invalid(
            "c_bar",
            format!("must exceed 2 sqrt(dr) = {}, got {c_bar}", 2.0 * sdr),
        ));
    }
    if !(c_under > hat_c_llw) {
        return Err(Error::invalid(
            "c_under",
            format!("must exceed c^_LLW = {hat_c_llw}, got {c_under}"),
        ));
    }
    if !(c_bar > c_under) {
        return Err(Error::invalid(
            "c_under",
            format!("must be below c_bar = {c_bar}, got {c_under}"),
        ));
    }

    let lambda_v_plus = 2.0 * r / (c_bar + (c_bar * c_bar - 4.0 * d * r).sqrt());
    let sa = a.sqrt();
    let s1a = (1.0 - a).sqrt();
    let f_defined = c_bar <= 2.0 * (sa + s1a);
    let envelope = if f_defined {
        let s = 0.5 * c_bar - sa;
        s + (1.0 - a) / s
    } else {
        2.0 * s1a
    };
    let tol = REALIZABILITY_RTOL * envelope.max(1.0);
    if c_under < envelope - tol {
        return Ok(Realizability::NotRealizable);
    }
    if (c_under - envelope).abs() <= tol {
        return Ok(Realizability::UniqueLambdaVPlus {
            lambda_v_plus,
            lambda_u_min: 0.5 * c_bar,
        });
    }

    // g(c_bar) as a function of lambda_u decreases from +inf at `lo` to the
    // envelope at `hi`.
    let lo = 0.5 * (c_bar - (c_bar * c_bar - 4.0 * a).sqrt());
    let hi = if f_defined {
        0.5 * c_bar
    } else {
        let shifted = c_bar - 2.0 * s1a;
        0.5 * (c_bar - (shifted * shifted - 4.0 * a).max(0.0).sqrt())
    };
    let g = |lu: f64| {
        let l = tilde_lambda_nlp(c_bar, lu, a);
        l + (1.0 - a) / l
    };
    let (mut left, mut right) = (lo, hi);
    let mut converged = false;
    for _ in 0..200 {
        let mid = 0.5 * (left + right);
        let gm = g(mid);
        // Non-positive lambda~ means mid is still left of the pole.
        if !(gm.is_finite() && tilde_lambda_nlp(c_bar, mid, a) > 0.0) || gm > c_under {
            left = mid;
        } else {
            right = mid;
        }
        if right - left <= 1e-12 * right.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(
            "lambda_u bisection did not converge in 200 iterations".into(),
        ));
    }
    Ok(Realizability::UniquePair {
        lambda_v_plus,
        lambda_u: 0.5 * (left + right),
    })
}
