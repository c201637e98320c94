use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::speeds::{hat_c_nlp, kpp_speed, tilde_lambda_nlp, NlpCase};

/// Closed-form viscosity super- and sub-solutions of the limiting equations.
///
/// Every variant is one-homogeneous, `w(s t, s x) = s w(t, x)`, and
/// continuous on `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ExplicitSolution {
    /// `v` exponent on `x >= 0` when `lambda_v^+ <= sqrt(r/d)`.
    SuperW1SmallLambda { lambda_v_plus: f64, d: f64, r: f64 },
    /// `v` exponent on `x >= 0` when `lambda_v^+ > sqrt(r/d)`.
    SuperW1LargeLambda { lambda_v_plus: f64, d: f64, r: f64 },
    /// `u` exponent when `sigma1 < 2 lambda_u` and
    /// `sigma1 < 2 (sqrt a + sqrt(1-a))`.
    SuperW2CaseA { sigma1: f64, lambda_u: f64, a: f64 },
    /// `u` exponent when `sigma1 >= 2 lambda_u` and `lambda~ <= sqrt(1-a)`.
    SuperW2CaseB { sigma1: f64, lambda_u: f64, a: f64 },
    /// Lower `u` exponent when `lambda_u > 1`.
    SubW2LargeLambdaU { lambda_u: f64 },
    /// Lower `u` exponent when `lambda_u <= 1`.
    SubW2SmallLambdaU { lambda_u: f64 },
    /// Lower exponent of `v` at `-inf`, in the reflected variable `x >= 0`.
    SubW3 { lambda_v_minus: f64, d: f64, r: f64 },
}

impl ExplicitSolution {
    pub fn super_w1(lambda_v_plus: f64, d: f64, r: f64) -> Self {
        if lambda_v_plus <= (r / d).sqrt() {
            ExplicitSolution::SuperW1SmallLambda { lambda_v_plus, d, r }
        } else {
            ExplicitSolution::SuperW1LargeLambda { lambda_v_plus, d, r }
        }
    }

    /// Requires `sigma1` above the free speed of `u`. Fails in the locally
    /// pulled case, which has no explicit form.
    pub fn super_w2(sigma1: f64, lambda_u: f64, a: f64) -> Result<Self> {
        let sigma2 = kpp_speed(1.0, 1.0, lambda_u);
        if !(sigma1 > sigma2) {
            return Err(Error::SpeciesOrder { sigma1, sigma2 });
        }
        let sa = a.sqrt();
        let s1a = (1.0 - a).sqrt();
        if sigma1 < 2.0 * lambda_u && sigma1 < 2.0 * (sa + s1a) {
            return Ok(ExplicitSolution::SuperW2CaseA { sigma1, lambda_u, a });
        }
        if sigma1 >= 2.0 * lambda_u && tilde_lambda_nlp(sigma1, lambda_u, a) <= s1a {
            return Ok(ExplicitSolution::SuperW2CaseB { sigma1, lambda_u, a });
        }
        let (_, case) = hat_c_nlp(sigma1, lambda_u, a);
        debug_assert!(case != NlpCase::NonlocalLambda);
        Err(Error::Degenerate(format!(
            "no explicit upper exponent for sigma1 = {sigma1}, lambda_u = {lambda_u}, a = {a}"
        )))
    }

    pub fn sub_w2(lambda_u: f64) -> Self {
        if lambda_u > 1.0 {
            ExplicitSolution::SubW2LargeLambdaU { lambda_u }
        } else {
            ExplicitSolution::SubW2SmallLambdaU { lambda_u }
        }
    }

    pub fn sub_w3(lambda_v_minus: f64, d: f64, r: f64) -> Self {
        ExplicitSolution::SubW3 { lambda_v_minus, d, r }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ExplicitSolution::SuperW1SmallLambda { .. } => "super_w1_small_lambda",
            ExplicitSolution::SuperW1LargeLambda { .. } => "super_w1_large_lambda",
            ExplicitSolution::SuperW2CaseA { .. } => "super_w2_case_a",
            ExplicitSolution::SuperW2CaseB { .. } => "super_w2_case_b",
            ExplicitSolution::SubW2LargeLambdaU { .. } => "sub_w2_large_lambda_u",
            ExplicitSolution::SubW2SmallLambdaU { .. } => "sub_w2_small_lambda_u",
            ExplicitSolution::SubW3 { .. } => "sub_w3",
        }
    }

    /// Slope of the initial datum `lambda max(x, 0)`.
    pub fn initial_slope(&self) -> f64 {
        match *self {
            ExplicitSolution::SuperW1SmallLambda { lambda_v_plus, .. }
            | ExplicitSolution::SuperW1LargeLambda { lambda_v_plus, .. } => lambda_v_plus,
            ExplicitSolution::SuperW2CaseA { lambda_u, .. }
            | ExplicitSolution::SuperW2CaseB { lambda_u, .. }
            | ExplicitSolution::SubW2LargeLambdaU { lambda_u }
            | ExplicitSolution::SubW2SmallLambdaU { lambda_u } => lambda_u,
            ExplicitSolution::SubW3 { lambda_v_minus, .. } => lambda_v_minus,
        }
    }

    /// Speeds `x/t` at which the formula changes branch, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ExplicitSolution::SuperW1SmallLambda { lambda_v_plus: l, d, r } => {
                vec![d * l + r / l]
            }
            ExplicitSolution::SuperW1LargeLambda { lambda_v_plus: l, d, r } => {
                vec![2.0 * (d * r).sqrt(), 2.0 * d * l]
            }
            ExplicitSolution::SuperW2CaseA { sigma1, lambda_u, a } => {
                let s = 0.5 * sigma1 - a.sqrt();
                vec![s + (1.0 - a) / s, sigma1, 2.0 * lambda_u]
            }
            ExplicitSolution::SuperW2CaseB { sigma1, lambda_u, a } => {
                let l = tilde_lambda_nlp(sigma1, lambda_u, a);
                vec![l + (1.0 - a) / l, sigma1]
            }
            ExplicitSolution::SubW2LargeLambdaU { lambda_u } => vec![2.0, 2.0 * lambda_u],
            ExplicitSolution::SubW2SmallLambdaU { lambda_u } => vec![lambda_u + 1.0 / lambda_u],
            ExplicitSolution::SubW3 { lambda_v_minus: l, d, r } => vec![d * l + r / l],
        }
    }

    /// Right edge of the zero set in units of speed.
    pub fn zero_set_speed(&self) -> f64 {
        self.breakpoints()[0]
    }

    /// Evaluates at `(t, x)`. At `t = 0` this is the initial datum.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if t <= 0.0 {
            return self.initial_slope() * x.max(0.0);
        }
        let z = x / t;
        match *self {
            ExplicitSolution::SuperW1SmallLambda { lambda_v_plus: l, d, r } => {
                let c = d * l + r / l;
                if z > c {
                    l * (x - c * t)
                } else {
                    0.0
                }
            }
            ExplicitSolution::SuperW1LargeLambda { lambda_v_plus: l, d, r } => {
                if z > 2.0 * d * l {
                    l * (x - (d * l + r / l) * t)
                } else if z > 2.0 * (d * r).sqrt() {
                    t / (4.0 * d) * (z * z - 4.0 * d * r)
                } else {
                    0.0
                }
            }
            ExplicitSolution::SuperW2CaseA { sigma1, lambda_u: l, a } => {
                let s = 0.5 * sigma1 - a.sqrt();
                let c_bar = s + (1.0 - a) / s;
                if z >= 2.0 * l {
                    l * (x - (l + 1.0 / l) * t)
                } else if z >= sigma1 {
                    0.25 * t * (z * z - 4.0)
                } else if z > c_bar {
                    s * (x - c_bar * t)
                } else {
                    0.0
                }
            }
            ExplicitSolution::SuperW2CaseB { sigma1, lambda_u: l, a } => {
                let lt = tilde_lambda_nlp(sigma1, l, a);
                let c_tilde = lt + (1.0 - a) / lt;
                if z >= sigma1 {
                    l * (x - (l + 1.0 / l) * t)
                } else if z > c_tilde {
                    lt * (x - c_tilde * t)
                } else {
                    0.0
                }
            }
            ExplicitSolution::SubW2LargeLambdaU { lambda_u: l } => {
                if z >= 2.0 * l {
                    l * (x - (l + 1.0 / l) * t)
                } else if z >= 2.0 {
                    0.25 * t * (z * z - 4.0)
                } else {
                    0.0
                }
            }
            ExplicitSolution::SubW2SmallLambdaU { lambda_u: l } => {
                l * (x - (l + 1.0 / l) * t).max(0.0)
            }
            ExplicitSolution::SubW3 { lambda_v_minus: l, d, r } => {
                l * (x - (d * l + r / l) * t).max(0.0)
            }
        }
    }
}
