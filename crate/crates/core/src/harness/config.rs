use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rd_sim::ConeForcing;
use crate::speeds::{CompetitionRegime, DecayRates, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Speeds,
    Simulate,
    MeasureLlw,
    Hj,
    Tangfife,
    Mixedcase,
    Forced,
    Sweep,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Speeds => "speeds",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::MeasureLlw => "measure_llw",
            ExperimentKind::Hj => "hj",
            ExperimentKind::Tangfife => "tangfife",
            ExperimentKind::Mixedcase => "mixedcase",
            ExperimentKind::Forced => "forced",
            ExperimentKind::Sweep => "sweep",
        }
    }

    /// Whether the kind runs the reaction-diffusion solver.
    pub fn simulates(&self) -> bool {
        matches!(
            self,
            ExperimentKind::Simulate
                | ExperimentKind::Tangfife
                | ExperimentKind::Mixedcase
                | ExperimentKind::Forced
        )
    }
}

/// Spatial grid of the reaction-diffusion runs. Missing ends are sized from
/// the predicted speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub dx: f64,
    /// Interval between front samples.
    pub sample_dt: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            x_min: None,
            x_max: None,
            dx: 0.1,
            sample_dt: 1.0,
        }
    }
}

/// How the traveling-wave speeds without closed form are supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlwMode {
    Measure,
    LowerBound,
    UpperBound,
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlwSettings {
    /// Defaults to `measure` for simulations and `lower_bound` otherwise.
    pub mode: Option<LlwMode>,
    /// `c_LLW`, or `c^_LLW` in the mixed case, for mode `given`.
    pub c_llw: Option<f64>,
    /// `c~_LLW` for mode `given`.
    pub tilde_c_llw: Option<f64>,
    /// Horizon of the measurement runs; defaults to the experiment `t_end`.
    pub t_end: Option<f64>,
    /// Grid step of the measurement runs; defaults to the experiment `dx`.
    pub dx: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSettings {
    pub enabled: bool,
    pub eta: f64,
    pub tol: f64,
}

impl Default for ProfileSettings {
    fn default() -> Self {
        ProfileSettings {
            enabled: true,
            eta: 0.15,
            tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HjSettings {
    pub dx: f64,
    pub t_end: f64,
    /// Right end of the HJ grid is at least this.
    pub x_max: f64,
    /// Relative tolerance on the zero-set speed.
    pub zero_set_rtol: f64,
}

impl Default for HjSettings {
    fn default() -> Self {
        HjSettings {
            dx: 0.05,
            t_end: 1.0,
            x_max: 6.0,
            zero_set_rtol: 0.02,
        }
    }
}

/// Relative tolerances of the predicted-versus-measured checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            c1: 0.03,
            c2: 0.05,
            c3: 0.05,
        }
    }
}

/// Names accepted by [`SweepAxis::param`].
pub const SWEEP_PARAMS: &[&str] = &[
    "d",
    "r",
    "a",
    "b",
    "lambda_u",
    "lambda_v_plus",
    "lambda_v_minus",
    "sigma1",
    "dx",
    "t_end",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl SweepAxis {
    /// `count` evenly spaced values from `start` to `end`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    /// Kind run at every point.
    pub base: ExperimentKind,
    /// The sweep is the Cartesian product of all axes.
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: ModelParams,
    pub decay: DecayRates,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub llw: LlwSettings,
    #[serde(default)]
    pub profile: ProfileSettings,
    /// Used by kind `forced`; defaults to the built-in cone forcing.
    #[serde(default)]
    pub forcing: Option<ConeForcing>,
    #[serde(default)]
    pub hj: HjSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sweep: Option<SweepSettings>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Recorded for provenance; every run is deterministic.
    #[serde(default)]
    pub seed: u64,
}

fn default_t_end() -> f64 {
    300.0
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

impl ExperimentConfig {
    /// Minimal config of `kind` with every optional field at its default.
    pub fn new(kind: ExperimentKind, params: ModelParams, decay: DecayRates) -> Self {
        ExperimentConfig {
            kind,
            params,
            decay,
            grid: GridSettings::default(),
            t_end: default_t_end(),
            llw: LlwSettings::default(),
            profile: ProfileSettings::default(),
            forcing: None,
            hj: HjSettings::default(),
            tolerances: Tolerances::default(),
            sweep: None,
            output_dir: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.decay.validate()?;
        positive("t_end", self.t_end)?;
        positive("grid.dx", self.grid.dx)?;
        positive("grid.sample_dt", self.grid.sample_dt)?;
        if let (Some(lo), Some(hi)) = (self.grid.x_min, self.grid.x_max) {
            if !(lo < hi) {
                return Err(Error::invalid("grid.x_max", "must exceed grid.x_min"));
            }
        }
        positive("hj.dx", self.hj.dx)?;
        positive("hj.t_end", self.hj.t_end)?;
        positive("hj.zero_set_rtol", self.hj.zero_set_rtol)?;
        positive("profile.eta", self.profile.eta)?;
        positive("profile.tol", self.profile.tol)?;
        positive("tolerances.c1", self.tolerances.c1)?;
        positive("tolerances.c2", self.tolerances.c2)?;
        positive("tolerances.c3", self.tolerances.c3)?;
        if let Some(t) = self.llw.t_end {
            positive("llw.t_end", t)?;
        }
        if let Some(dx) = self.llw.dx {
            positive("llw.dx", dx)?;
        }
        if self.llw.mode == Some(LlwMode::Given) && self.llw.c_llw.is_none() {
            return Err(Error::invalid("llw.c_llw", "required when llw.mode is `given`"));
        }
        if let Some(f) = &self.forcing {
            if !(f.h0.is_finite() && f.h0 >= 0.0) {
                return Err(Error::invalid("forcing.h0", "must be finite and >= 0"));
            }
            if !f.c0.is_finite() {
                return Err(Error::invalid("forcing.c0", "must be finite"));
            }
        }
        match self.kind {
            ExperimentKind::Mixedcase
                if self.params.regime() != CompetitionRegime::MixedCase =>
            {
                Err(Error::invalid("b", "kind `mixedcase` needs a < 1 < b"))
            }
            ExperimentKind::Tangfife | ExperimentKind::MeasureLlw | ExperimentKind::Simulate
            | ExperimentKind::Forced
                if self.params.regime() == CompetitionRegime::Unsupported =>
            {
                Err(Error::invalid("b", "need a < 1 and b != 1"))
            }
            ExperimentKind::Sweep => self.validate_sweep(),
            _ => Ok(()),
        }
    }

    fn validate_sweep(&self) -> Result<()> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::invalid("sweep", "required for kind `sweep`"))?;
        if sweep.base == ExperimentKind::Sweep {
            return Err(Error::invalid("sweep.base", "sweeps cannot nest"));
        }
        if sweep.axes.is_empty() {
            return Err(Error::invalid("sweep.axes", "at least one axis is required"));
        }
        for (i, ax) in sweep.axes.iter().enumerate() {
            if !SWEEP_PARAMS.contains(&ax.param.as_str()) {
                return Err(Error::invalid(
                    format!("sweep.axes[{i}].param"),
                    format!("unknown parameter `{}`; expected one of {SWEEP_PARAMS:?}", ax.param),
                ));
            }
            if ax.count == 0 {
                return Err(Error::invalid(format!("sweep.axes[{i}].count"), "must be >= 1"));
            }
            if !(ax.start.is_finite() && ax.end.is_finite()) {
                return Err(Error::invalid(format!("sweep.axes[{i}]"), "start and end must be finite"));
            }
        }
        Ok(())
    }

    /// Copy with one named parameter replaced.
    ///
    /// `sigma1` is reached by moving `lambda_v_plus` onto the decreasing
    /// branch of `d l + r / l`.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match name {
            "d" => c.params.d = value,
            "r" => c.params.r = value,
            "a" => c.params.a = value,
            "b" => c.params.b = value,
            "lambda_u" => c.decay.lambda_u = value,
            "lambda_v_plus" => c.decay.lambda_v_plus = value,
            "lambda_v_minus" => c.decay.lambda_v_minus = value,
            "sigma1" => {
                let (d, r) = (c.params.d, c.params.r);
                let disc = value * value - 4.0 * d * r;
                if !(disc >= 0.0) {
                    return Err(Error::invalid(
                        "sigma1",
                        format!("{value} is below the minimal speed {}", 2.0 * (d * r).sqrt()),
                    ));
                }
                c.decay.lambda_v_plus = (value - disc.sqrt()) / (2.0 * d);
            }
            "dx" => c.grid.dx = value,
            "t_end" => c.t_end = value,
            other => return Err(Error::invalid("param", format!("unknown parameter `{other}`"))),
        }
        Ok(c)
    }
}

/// Reads and validates a JSON config. Unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| e.context(format!("loading {}", path.display())))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "kind": "speeds",
        "params": {"d": 1, "r": 1, "a": 0.5, "b": 0.5},
        "decay": {"lambda_u": 1, "lambda_v_plus": 0.5, "lambda_v_minus": 0.5}
    }"#;

    #[test]
    fn defaults_filled() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.t_end, 300.0);
        assert_eq!(c.grid.dx, 0.1);
        assert_eq!(c.profile.eta, 0.15);
        assert_eq!(c.hj.dx, 0.05);
        assert!(c.sweep.is_none());
    }

    #[test]
    fn negative_d_names_field() {
        let text = MINIMAL.replace("\"d\": 1", "\"d\": -1");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(&err, Error::InvalidParameter { field, .. } if field == "d"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace("\"kind\"", "\"colour\": 1, \"kind\"");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn empty_sweep_rejected() {
        let text = MINIMAL.replace(
            "\"kind\": \"speeds\"",
            r#""kind": "sweep", "sweep": {"base": "speeds", "axes": [{"param": "lambda_u", "start": 0.5, "end": 2, "count": 0}]}"#,
        );
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(&err, Error::InvalidParameter { field, .. } if field.contains("count")), "{err}");
    }

    #[test]
    fn sigma1_axis_inverts_speed() {
        let c = parse_config(MINIMAL).unwrap();
        let c2 = c.with_param("sigma1", 2.9).unwrap();
        let l = c2.decay.lambda_v_plus;
        assert!((l + 1.0 / l - 2.9).abs() < 1e-12);
        assert!(l < 1.0);
        assert!(c.with_param("sigma1", 1.5).is_err());
    }

    #[test]
    fn axis_values() {
        let ax = SweepAxis {
            param: "a".into(),
            start: 0.0,
            end: 1.0,
            count: 5,
        };
        assert_eq!(ax.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
