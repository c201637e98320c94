//! Closed-form spreading speeds for the two-species competition system
//!
//! ```text
//! u_t - u_xx   = u (1 - u - a v)
//! v_t - d v_xx = r v (1 - b u - v)
//! ```
//!
//! with initial data decaying like `e^{-lambda_u x}` (u, at +inf) and
//! `e^{-lambda_v^+ x}`, `e^{lambda_v^- x}` (v, at +inf and -inf).
//!
//! Everything here is a pure function of its arguments. The two traveling-wave
//! speeds `c_LLW` and `c~_LLW` have no closed form; they enter
//! [`assemble_speeds`] as explicit inputs carrying their provenance.

mod tradeoff;

pub use tradeoff::{
    c2_profile, mixed_subcase, realizability, tradeoff_curves, C2Branch, MixedSubcase,
    Realizability, TradeoffCurves, REALIZABILITY_RTOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide `sigma1 == sigma2`.
pub const SIGMA_TIE_RTOL: f64 = 1e-12;

/// Diffusion, growth and competition coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Diffusion ratio of `v`.
    pub d: f64,
    /// Growth-rate ratio of `v`.
    pub r: f64,
    /// Competition pressure of `v` on `u`.
    pub a: f64,
    /// Competition pressure of `u` on `v`.
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompetitionRegime {
    /// `a < 1` and `b < 1`: a stable coexistence state exists.
    WeakCompetition,
    /// `a < 1 < b`.
    MixedCase,
    /// Anything else (`a >= 1` or `b == 1`); no speed theory is provided.
    Unsupported,
}

impl ModelParams {
    pub fn new(d: f64, r: f64, a: f64, b: f64) -> Result<Self> {
        let p = ModelParams { d, r, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("d", self.d)?;
        positive("r", self.r)?;
        nonnegative("a", self.a)?;
        nonnegative("b", self.b)?;
        Ok(())
    }

    pub fn regime(&self) -> CompetitionRegime {
        if self.a < 1.0 && self.b < 1.0 {
            CompetitionRegime::WeakCompetition
        } else if self.a < 1.0 && self.b > 1.0 {
            CompetitionRegime::MixedCase
        } else {
            CompetitionRegime::Unsupported
        }
    }
}

/// Exponential decay rates of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayRates {
    pub lambda_u: f64,
    pub lambda_v_plus: f64,
    pub lambda_v_minus: f64,
}

impl DecayRates {
    pub fn new(lambda_u: f64, lambda_v_plus: f64, lambda_v_minus: f64) -> Result<Self> {
        let rates = DecayRates {
            lambda_u,
            lambda_v_plus,
            lambda_v_minus,
        };
        rates.validate()?;
        Ok(rates)
    }

    pub fn validate(&self) -> Result<()> {
        positive("lambda_u", self.lambda_u)?;
        positive("lambda_v_plus", self.lambda_v_plus)?;
        positive("lambda_v_minus", self.lambda_v_minus)?;
        Ok(())
    }
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

fn nonnegative(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {value}")))
    }
}

/// Spreading speed of a single KPP front `phi_t = D phi_xx + R phi(1 - phi)`
/// started from data decaying at rate `lambda`: `D l + R / l` with
/// `l = min(lambda, sqrt(R / D))`.
pub fn kpp_speed(diffusion: f64, growth: f64, lambda: f64) -> f64 {
    let l = lambda.min((growth / diffusion).sqrt());
    diffusion * l + growth / l
}

/// The coexistence state `(k1, k2)`.
pub fn coexistence_equilibrium(params: &ModelParams) -> Result<(f64, f64)> {
    let denom = 1.0 - params.a * params.b;
    if denom.abs() < 1e-14 {
        return Err(Error::Degenerate(format!(
            "a*b = {} makes the coexistence state undefined",
            params.a * params.b
        )));
    }
    Ok(((1.0 - params.a) / denom, (1.0 - params.b) / denom))
}

/// Linear spreading speeds of the three fronts plus the forced-system
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSet {
    /// Rightward speed of `v` without competitor.
    pub sigma1: f64,
    /// Rightward speed of `u` without competitor.
    pub sigma2: f64,
    /// Leftward speed of `v` invading `(1, 0)`; only defined for `b < 1`.
    pub sigma3: Option<f64>,
    /// Threshold on the forcing cone speed; only defined for `a < 1`.
    pub sigma2_prime: Option<f64>,
}

pub fn sigma_set(params: &ModelParams, decay: &DecayRates) -> SigmaSet {
    let ModelParams { d, r, a, b } = *params;
    SigmaSet {
        sigma1: kpp_speed(d, r, decay.lambda_v_plus),
        sigma2: kpp_speed(1.0, 1.0, decay.lambda_u),
        sigma3: (b < 1.0).then(|| kpp_speed(d, r * (1.0 - b), decay.lambda_v_minus)),
        sigma2_prime: (a < 1.0).then(|| kpp_speed(1.0, 1.0 - a, decay.lambda_u)),
    }
}

/// Which branch of the nonlocally pulled speed formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NlpCase {
    /// `sigma1 < 2 lambda_u`, `sigma1 <= 2(sqrt a + sqrt(1-a))`: pulled by the
    /// faster species' front.
    PulledByFaster,
    /// `sigma1 >= 2 lambda_u`, `lambda~ <= sqrt(1-a)`: pulled through the
    /// decay rate `lambda~` inherited from the initial data.
    NonlocalLambda,
    /// Locally pulled, `2 sqrt(1-a)`.
    LocallyPulled,
}

/// `lambda~_nlp = (sigma1 - sqrt((sigma1 - 2 lambda_u)^2 + 4a)) / 2`,
/// evaluated after rationalizing so that small values keep full precision.
pub fn tilde_lambda_nlp(sigma1: f64, lambda_u: f64, a: f64) -> f64 {
    let shift = sigma1 - 2.0 * lambda_u;
    let root = (shift * shift + 4.0 * a).sqrt();
    2.0 * (lambda_u * sigma1 - lambda_u * lambda_u - a) / (sigma1 + root)
}

/// `s + (1-a)/s`, the speed of a front with leading-edge decay `s`.
#[inline]
fn speed_of_rate(s: f64, a: f64) -> f64 {
    s + (1.0 - a) / s
}

/// The nonlocally pulled speed and the branch that produced it.
pub fn hat_c_nlp(sigma1: f64, lambda_u: f64, a: f64) -> (f64, NlpCase) {
    let sa = a.sqrt();
    let s1a = (1.0 - a).sqrt();
    if sigma1 < 2.0 * lambda_u && sigma1 <= 2.0 * (sa + s1a) {
        (speed_of_rate(0.5 * sigma1 - sa, a), NlpCase::PulledByFaster)
    } else {
        let lt = tilde_lambda_nlp(sigma1, lambda_u, a);
        if sigma1 >= 2.0 * lambda_u && lt <= s1a {
            (speed_of_rate(lt, a), NlpCase::NonlocalLambda)
        } else {
            (2.0 * s1a, NlpCase::LocallyPulled)
        }
    }
}

/// Decay exponent of `u` along the ray `x = sigma1 t`, i.e. the value of the
/// explicit sub-solution `w_2(1, sigma1)`, written through the nlp speeds.
pub fn mu_hat(sigma1: f64, lambda_u: f64, a: f64) -> f64 {
    if sigma1 < 2.0 * lambda_u {
        let s = 0.5 * sigma1 - a.sqrt();
        s * (sigma1 - speed_of_rate(s, a))
    } else {
        let lt = tilde_lambda_nlp(sigma1, lambda_u, a);
        lt * (sigma1 - speed_of_rate(lt, a))
    }
}

/// Interval known to contain a traveling-wave speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlwBounds {
    pub lower: f64,
    pub upper: f64,
}

impl LlwBounds {
    pub fn contains(&self, c: f64) -> bool {
        self.lower <= c && c <= self.upper
    }

    /// The interval widened by a relative slack on both ends.
    pub fn widened(&self, slack: f64) -> LlwBounds {
        LlwBounds {
            lower: self.lower * (1.0 - slack),
            upper: self.upper * (1.0 + slack),
        }
    }

    pub fn clamp(&self, c: f64) -> f64 {
        c.clamp(self.lower, self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlwBoundPair {
    /// Bounds on `c_LLW`, the `(k1,k2) -> (0,1)` front. In the mixed case this
    /// is the `(1,0) -> (0,1)` front speed `c^_LLW`.
    pub c_llw: LlwBounds,
    /// Bounds on `c~_LLW`, the `(k1,k2) -> (1,0)` front.
    pub tilde_c_llw: LlwBounds,
    pub regime: CompetitionRegime,
}

/// `c_LLW in [2 sqrt(1-a), 2]` and `c~_LLW in [2 sqrt(dr(1-b)), 2 sqrt(dr)]`.
///
/// For `b >= 1` the `c~_LLW` interval degenerates to `[0, 2 sqrt(dr)]` and the
/// pair is tagged [`CompetitionRegime::MixedCase`].
pub fn llw_bounds(params: &ModelParams) -> Result<LlwBoundPair> {
    params.validate()?;
    let ModelParams { d, r, a, b } = *params;
    if a >= 1.0 {
        return Err(Error::invalid("a", "LLW bounds need a < 1"));
    }
    let c_llw = LlwBounds {
        lower: 2.0 * (1.0 - a).sqrt(),
        upper: 2.0,
    };
    let full = 2.0 * (d * r).sqrt();
    let (tilde_c_llw, regime) = if b < 1.0 {
        (
            LlwBounds {
                lower: 2.0 * (d * r * (1.0 - b)).sqrt(),
                upper: full,
            },
            CompetitionRegime::WeakCompetition,
        )
    } else {
        (
            LlwBounds {
                lower: 0.0,
                upper: full,
            },
            CompetitionRegime::MixedCase,
        )
    };
    Ok(LlwBoundPair {
        c_llw,
        tilde_c_llw,
        regime,
    })
}

/// Where a traveling-wave speed fed to [`assemble_speeds`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlwProvenance {
    Measured,
    LowerBound,
    UpperBound,
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlwInput {
    pub value: f64,
    pub provenance: LlwProvenance,
}

impl LlwInput {
    pub fn measured(value: f64) -> Self {
        LlwInput {
            value,
            provenance: LlwProvenance::Measured,
        }
    }

    pub fn lower(bounds: &LlwBounds) -> Self {
        LlwInput {
            value: bounds.lower,
            provenance: LlwProvenance::LowerBound,
        }
    }

    pub fn upper(bounds: &LlwBounds) -> Self {
        LlwInput {
            value: bounds.upper,
            provenance: LlwProvenance::UpperBound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadingRegime {
    /// `sigma1 > sigma2`, weak competition: four zones, `c3 < 0 < c2 < c1`.
    Separated,
    /// `sigma1 = sigma2`: the two rightward fronts merge into a single
    /// `(k1,k2) -> (0,0)` transition; three zones.
    TangFife,
    /// `a < 1 < b`: three zones `(0,0)`, `(0,1)`, `(1,0)`.
    MixedCase,
}

/// Predicted spreading speeds with every intermediate quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub regime: SpreadingRegime,
    pub params: ModelParams,
    pub decay: DecayRates,
    pub sigma: SigmaSet,
    /// `(k1, k2)`, absent in the mixed case.
    pub coexistence: Option<(f64, f64)>,
    pub c1: f64,
    /// Rightward speed of `u`; absent in the Tang-Fife regime.
    pub c2: Option<f64>,
    /// Leftward speed of `v`; absent in the mixed case.
    pub c3: Option<f64>,
    pub hat_c_nlp: Option<f64>,
    pub tilde_lambda_nlp: f64,
    pub mu_hat: Option<f64>,
    pub case_tag: Option<NlpCase>,
    /// `c_LLW` (weak competition) or `c^_LLW` (mixed case) as used.
    pub c_llw_input: LlwInput,
    pub tilde_c_llw_input: Option<LlwInput>,
    pub warnings: Vec<String>,
}

fn clamp_input(
    name: &str,
    input: LlwInput,
    bounds: &LlwBounds,
    warnings: &mut Vec<String>,
) -> LlwInput {
    if bounds.contains(input.value) {
        return input;
    }
    let clamped = bounds.clamp(input.value);
    let msg = format!(
        "{name} = {} outside [{}, {}], clamped to {clamped}",
        input.value, bounds.lower, bounds.upper
    );
    log::warn!("{msg}");
    warnings.push(msg);
    LlwInput {
        value: clamped,
        provenance: input.provenance,
    }
}

/// `c1 = sigma1`, `c2 = max(c_LLW, c^_nlp)`, `c3 = -max(c~_LLW, sigma3)`.
///
/// In the mixed case `c_llw` is the `(1,0) -> (0,1)` speed and
/// `tilde_c_llw` is ignored. Inputs outside the known bounds are clamped and
/// reported in [`SpeedReport::warnings`].
pub fn assemble_speeds(
    params: &ModelParams,
    decay: &DecayRates,
    c_llw: LlwInput,
    tilde_c_llw: Option<LlwInput>,
) -> Result<SpeedReport> {
    params.validate()?;
    decay.validate()?;
    let sigma = sigma_set(params, decay);
    let SigmaSet { sigma1, sigma2, .. } = sigma;
    let tie = (sigma1 - sigma2).abs() <= SIGMA_TIE_RTOL * sigma1.max(1.0);
    if sigma1 < sigma2 && !tie {
        return Err(Error::SpeciesOrder { sigma1, sigma2 });
    }
    let bounds = llw_bounds(params)?;
    let mut warnings = Vec::new();
    let a = params.a;
    let lambda_u = decay.lambda_u;
    let tilde_lambda = tilde_lambda_nlp(sigma1, lambda_u, a);

    match params.regime() {
        CompetitionRegime::Unsupported => Err(Error::invalid(
            "b",
            format!(
                "no speed theory for a = {}, b = {}; need a < 1 and b != 1",
                params.a, params.b
            ),
        )),
        CompetitionRegime::MixedCase => {
            if tie {
                return Err(Error::Degenerate(
                    "sigma1 = sigma2 is not covered in the mixed case".into(),
                ));
            }
            let c_llw = clamp_input("c^_LLW", c_llw, &bounds.c_llw, &mut warnings);
            let (nlp, case) = hat_c_nlp(sigma1, lambda_u, a);
            Ok(SpeedReport {
                regime: SpreadingRegime::MixedCase,
                params: *params,
                decay: *decay,
                sigma,
                coexistence: None,
                c1: sigma1,
                c2: Some(c_llw.value.max(nlp)),
                c3: None,
                hat_c_nlp: Some(nlp),
                tilde_lambda_nlp: tilde_lambda,
                mu_hat: Some(mu_hat(sigma1, lambda_u, a)),
                case_tag: Some(case),
                c_llw_input: c_llw,
                tilde_c_llw_input: None,
                warnings,
            })
        }
        CompetitionRegime::WeakCompetition => {
            let tilde = tilde_c_llw.ok_or_else(|| {
                Error::invalid("tilde_c_llw", "required in the weak competition case")
            })?;
            let c_llw = clamp_input("c_LLW", c_llw, &bounds.c_llw, &mut warnings);
            let tilde = clamp_input("c~_LLW", tilde, &bounds.tilde_c_llw, &mut warnings);
            let sigma3 = sigma.sigma3.expect("b < 1");
            let c3 = -tilde.value.max(sigma3);
            let coexistence = Some(coexistence_equilibrium(params)?);
            if tie {
                return Ok(SpeedReport {
                    regime: SpreadingRegime::TangFife,
                    params: *params,
                    decay: *decay,
                    sigma,
                    coexistence,
                    c1: sigma1,
                    c2: None,
                    c3: Some(c3),
                    hat_c_nlp: None,
                    tilde_lambda_nlp: tilde_lambda,
                    mu_hat: None,
                    case_tag: None,
                    c_llw_input: c_llw,
                    tilde_c_llw_input: Some(tilde),
                    warnings,
                });
            }
            let (nlp, case) = hat_c_nlp(sigma1, lambda_u, a);
            Ok(SpeedReport {
                regime: SpreadingRegime::Separated,
                params: *params,
                decay: *decay,
                sigma,
                coexistence,
                c1: sigma1,
                c2: Some(c_llw.value.max(nlp)),
                c3: Some(c3),
                hat_c_nlp: Some(nlp),
                tilde_lambda_nlp: tilde_lambda,
                mu_hat: Some(mu_hat(sigma1, lambda_u, a)),
                case_tag: Some(case),
                c_llw_input: c_llw,
                tilde_c_llw_input: Some(tilde),
                warnings,
            })
        }
    }
}

/// Decay rate of a traveling wave with speed `c` into an unstable state with
/// linear growth `growth` and diffusion `diffusion`: the smaller root of
/// `diffusion l^2 - c l + growth = 0`.
fn wave_decay_rate(c: f64, diffusion: f64, growth: f64) -> f64 {
    let disc = (c * c - 4.0 * diffusion * growth).max(0.0);
    (c - disc.sqrt()) / (2.0 * diffusion)
}

fn capped_speed(
    c_hat: f64,
    mu_hat: f64,
    c_llw: f64,
    diffusion: f64,
    growth: f64,
) -> Result<f64> {
    let lambda_llw = wave_decay_rate(c_llw, diffusion, growth);
    if mu_hat >= lambda_llw * (c_hat - c_llw) {
        return Ok(c_llw);
    }
    let mut disc = c_hat * c_hat - 4.0 * diffusion * (mu_hat + growth);
    if disc < 0.0 {
        // Allow rounding noise when the root is double.
        if disc > -1e-12 * c_hat * c_hat {
            disc = 0.0;
        } else {
            return Err(Error::Numerical(format!(
                "negative discriminant {disc} (c^ = {c_hat}, mu^ = {mu_hat})"
            )));
        }
    }
    Ok(c_hat - 2.0 * diffusion * mu_hat / (c_hat - disc.sqrt()))
}

/// Upper bound on the speed of `u` given that `u` decays like
/// `e^{-mu^ t}` along the ray `x = c^ t` which separates a coexistence
/// region from a `v`-dominated one.
pub fn lemma_b2_speed_cap(c_hat: f64, mu_hat: f64, c_llw: f64, a: f64) -> Result<f64> {
    if !(c_hat > 2.0) {
        return Err(Error::invalid("c_hat", format!("must exceed 2, got {c_hat}")));
    }
    if !(mu_hat > 0.0) {
        return Err(Error::invalid("mu_hat", format!("must be > 0, got {mu_hat}")));
    }
    capped_speed(c_hat, mu_hat, c_llw, 1.0, 1.0 - a)
}

/// Mirror of [`lemma_b2_speed_cap`] for `v` invading `(1, 0)` leftwards.
pub fn lemma_b2_speed_cap_tilde(
    c_hat: f64,
    mu_hat: f64,
    tilde_c_llw: f64,
    d: f64,
    r: f64,
    b: f64,
) -> Result<f64> {
    if !(c_hat > 2.0 * (d * r).sqrt()) {
        return Err(Error::invalid(
            "c_hat",
            format!("must exceed 2 sqrt(dr), got {c_hat}"),
        ));
    }
    if !(mu_hat > 0.0) {
        return Err(Error::invalid("mu_hat", format!("must be > 0, got {mu_hat}")));
    }
    capped_speed(c_hat, mu_hat, tilde_c_llw, d, r * (1.0 - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference() -> (ModelParams, DecayRates) {
        (
            ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap(),
            DecayRates::new(1.0, 0.5, 0.5).unwrap(),
        )
    }

    #[test]
    fn coexistence_values() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(coexistence_equilibrium(&p).unwrap(), (1.0, 1.0));
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let (k1, k2) = coexistence_equilibrium(&p).unwrap();
        assert_abs_diff_eq!(k1, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k2, 2.0 / 3.0, epsilon = 1e-15);
        let p = ModelParams::new(1.0, 1.0, 0.3, 0.3).unwrap();
        let (k1, k2) = coexistence_equilibrium(&p).unwrap();
        assert_eq!(k1, k2);
        let p = ModelParams::new(1.0, 1.0, 2.0, 0.5).unwrap();
        assert!(matches!(
            coexistence_equilibrium(&p),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn sigma_examples() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let s = sigma_set(&p, &DecayRates::new(1.0, 1.0, 1.0).unwrap());
        assert_abs_diff_eq!(s.sigma1, 2.0, epsilon = 1e-15);
        let s = sigma_set(&p, &DecayRates::new(1.0, 0.5, 1.0).unwrap());
        assert_abs_diff_eq!(s.sigma1, 2.5, epsilon = 1e-15);
        let s = sigma_set(&p, &DecayRates::new(1e6, 0.5, 1.0).unwrap());
        assert_abs_diff_eq!(s.sigma2, 2.0, epsilon = 1e-15);
        // sigma2' = min(1, sqrt .5) + .5 / min(1, sqrt .5) = 2 sqrt .5
        assert_abs_diff_eq!(s.sigma2_prime.unwrap(), 2.0 * 0.5f64.sqrt(), epsilon = 1e-15);
        let mixed = ModelParams::new(1.0, 1.0, 0.5, 1.5).unwrap();
        assert!(sigma_set(&mixed, &DecayRates::new(1.0, 0.5, 1.0).unwrap())
            .sigma3
            .is_none());
    }

    #[test]
    fn sigma_lower_bounds() {
        for &lam in &[0.05, 0.3, 0.7, 1.0, 3.0] {
            let p = ModelParams::new(2.0, 0.7, 0.4, 0.6).unwrap();
            let s = sigma_set(&p, &DecayRates::new(lam, lam, lam).unwrap());
            assert!(s.sigma1 >= 2.0 * (p.d * p.r).sqrt() - 1e-14);
            assert!(s.sigma2 >= 2.0 - 1e-14);
            assert!(s.sigma3.unwrap() >= 2.0 * (p.d * p.r * (1.0 - p.b)).sqrt() - 1e-14);
        }
    }

    #[test]
    fn tilde_lambda_examples() {
        assert_abs_diff_eq!(tilde_lambda_nlp(2.5, 1.0, 0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(tilde_lambda_nlp(3.0, 1.2, 0.0), 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            tilde_lambda_nlp(2.5, 0.5, 0.5),
            0.5 * (2.5 - 4.25f64.sqrt()),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(tilde_lambda_nlp(2.5, 0.5, 0.5), 0.219224, epsilon = 1e-6);
    }

    #[test]
    fn hat_c_nlp_branches() {
        let (c, case) = hat_c_nlp(2.5, 2.0, 0.5);
        assert_eq!(case, NlpCase::PulledByFaster);
        let s = 1.25 - 0.5f64.sqrt();
        assert_abs_diff_eq!(c, s + 0.5 / s, epsilon = 1e-14);
        assert_abs_diff_eq!(c, 1.463885, epsilon = 1e-6);

        let (c, case) = hat_c_nlp(2.5, 1.0, 0.5);
        assert_eq!(case, NlpCase::NonlocalLambda);
        assert_abs_diff_eq!(c, 1.5, epsilon = 1e-14);

        let (c, case) = hat_c_nlp(2.9, 2.0, 0.5);
        assert_eq!(case, NlpCase::LocallyPulled);
        assert_abs_diff_eq!(c, 2.0 * 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn hat_c_nlp_tie_goes_to_second_branch() {
        // sigma1 == 2 lambda_u
        let (_, case) = hat_c_nlp(2.4, 1.2, 0.5);
        assert_eq!(case, NlpCase::NonlocalLambda);
    }

    #[test]
    fn mu_hat_examples() {
        assert_abs_diff_eq!(mu_hat(2.5, 2.0, 0.5), 0.5625, epsilon = 1e-12);
        assert_abs_diff_eq!(mu_hat(2.5, 1.0, 0.5), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mu_hat(2.0, 1.5, 0.5), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn llw_bound_examples() {
        let b = llw_bounds(&ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(b.c_llw.lower, 2.0f64.sqrt(), epsilon = 1e-15);
        assert_eq!(b.c_llw.upper, 2.0);
        assert_abs_diff_eq!(b.tilde_c_llw.lower, 2.0f64.sqrt(), epsilon = 1e-15);
        assert_eq!(b.tilde_c_llw.upper, 2.0);
        let b = llw_bounds(&ModelParams::new(1.0, 1.0, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!((b.c_llw.lower, b.c_llw.upper), (2.0, 2.0));
        let b = llw_bounds(&ModelParams::new(1.0, 1.0, 0.5, 1.5).unwrap()).unwrap();
        assert_eq!(b.regime, CompetitionRegime::MixedCase);
        assert_eq!((b.tilde_c_llw.lower, b.tilde_c_llw.upper), (0.0, 2.0));
        assert!(llw_bounds(&ModelParams::new(1.0, 1.0, 1.0, 0.5).unwrap()).is_err());
    }

    #[test]
    fn assemble_reference() {
        let (p, dr) = reference();
        let bounds = llw_bounds(&p).unwrap();
        let rep = assemble_speeds(
            &p,
            &dr,
            LlwInput::lower(&bounds.c_llw),
            Some(LlwInput::lower(&bounds.tilde_c_llw)),
        )
        .unwrap();
        assert_eq!(rep.regime, SpreadingRegime::Separated);
        assert_abs_diff_eq!(rep.c1, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.c2.unwrap(), 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.sigma.sigma3.unwrap(), 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.c3.unwrap(), -1.5, epsilon = 1e-14);
        assert_eq!(rep.case_tag, Some(NlpCase::NonlocalLambda));
        assert!(rep.warnings.is_empty());
        let c3 = rep.c3.unwrap();
        let c2 = rep.c2.unwrap();
        assert!(c3 < 0.0 && 0.0 < c2 && c2 < rep.c1);
    }

    #[test]
    fn assemble_tang_fife() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let dr = DecayRates::new(0.5, 0.5, 0.5).unwrap();
        let bounds = llw_bounds(&p).unwrap();
        let rep = assemble_speeds(
            &p,
            &dr,
            LlwInput::lower(&bounds.c_llw),
            Some(LlwInput::lower(&bounds.tilde_c_llw)),
        )
        .unwrap();
        assert_eq!(rep.regime, SpreadingRegime::TangFife);
        assert_eq!(rep.c2, None);
        assert_abs_diff_eq!(rep.c1, 2.5, epsilon = 1e-14);
        assert!(rep.c3.unwrap() < 0.0);
    }

    #[test]
    fn assemble_rejects_slower_v() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let dr = DecayRates::new(0.4, 1.0, 0.5).unwrap();
        let bounds = llw_bounds(&p).unwrap();
        let err = assemble_speeds(
            &p,
            &dr,
            LlwInput::lower(&bounds.c_llw),
            Some(LlwInput::lower(&bounds.tilde_c_llw)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SpeciesOrder { .. }));
        assert!(err.to_string().contains("swap"));
    }

    #[test]
    fn assemble_clamps_out_of_bound_input() {
        let (p, dr) = reference();
        let rep = assemble_speeds(
            &p,
            &dr,
            LlwInput::measured(2.5),
            Some(LlwInput::measured(1.0)),
        )
        .unwrap();
        assert_eq!(rep.c_llw_input.value, 2.0);
        assert_abs_diff_eq!(rep.tilde_c_llw_input.unwrap().value, 2.0f64.sqrt());
        assert_eq!(rep.warnings.len(), 2);
    }

    #[test]
    fn assemble_decoupled() {
        // a = b = 0 with sigma1 > 2 and sigma1 < 2 lambda_u: branch 3 gives 2.
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let dr = DecayRates::new(2.0, 0.5, 0.5).unwrap();
        let rep = assemble_speeds(
            &p,
            &dr,
            LlwInput::measured(2.0),
            Some(LlwInput::measured(2.0)),
        )
        .unwrap();
        assert_eq!(rep.case_tag, Some(NlpCase::LocallyPulled));
        assert_abs_diff_eq!(rep.hat_c_nlp.unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.c2.unwrap(), rep.sigma.sigma2, epsilon = 1e-15);
    }

    #[test]
    fn assemble_mixed_case() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 1.5).unwrap();
        let dr = DecayRates::new(1.0, 0.5, 0.5).unwrap();
        let rep = assemble_speeds(&p, &dr, LlwInput::measured(1.45), None).unwrap();
        assert_eq!(rep.regime, SpreadingRegime::MixedCase);
        assert_eq!(rep.c3, None);
        assert_abs_diff_eq!(rep.c2.unwrap(), 1.5, epsilon = 1e-14);
    }

    #[test]
    fn speed_cap_example() {
        let c = lemma_b2_speed_cap(2.5, 0.5, 2.0f64.sqrt(), 0.5).unwrap();
        assert_abs_diff_eq!(c, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn speed_cap_at_threshold_returns_llw() {
        let c_llw = 1.6;
        let a = 0.5;
        let lambda = wave_decay_rate(c_llw, 1.0, 1.0 - a);
        let threshold = lambda * (2.5 - c_llw);
        assert_eq!(lemma_b2_speed_cap(2.5, threshold, c_llw, a).unwrap(), c_llw);
        assert_eq!(lemma_b2_speed_cap(2.5, 1e6, c_llw, a).unwrap(), c_llw);
    }

    #[test]
    fn speed_cap_errors() {
        assert!(lemma_b2_speed_cap(1.9, 0.5, 1.5, 0.5).is_err());
        assert!(lemma_b2_speed_cap(2.5, 0.0, 1.5, 0.5).is_err());
        // Only reachable with c_LLW below its admissible range.
        assert!(matches!(
            lemma_b2_speed_cap(2.01, 0.2, 1.5, 0.0),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn tilde_speed_cap_matches_sigma3_limit() {
        // Far ray, small lambda_v^-: the cap approaches sigma3.
        let (d, r, b) = (1.0f64, 1.0f64, 0.5f64);
        let lam = 0.4;
        let c_hat = 400.0;
        let mu2 = lam * (c_hat - (d * lam + r / lam));
        let tilde_llw = 2.0 * (d * r * (1.0 - b)).sqrt();
        let cap = lemma_b2_speed_cap_tilde(c_hat, mu2, tilde_llw, d, r, b).unwrap();
        let sigma3 = kpp_speed(d, r * (1.0 - b), lam);
        assert!((cap - sigma3).abs() < 1e-2, "{cap} vs {sigma3}");
    }
}
