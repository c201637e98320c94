use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::hj::SandwichReport;
use crate::rd_sim::{LlwKind, LlwMeasurement, MeasuredSpeed, ProfileVerdict, SpeedEstimate};
use crate::speeds::{LlwBounds, SpeedReport};

/// One pass/fail comparison of a number with its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    /// Relative tolerance, or absolute when `expected == 0`.
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn relative(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        let err = if expected == 0.0 {
            value.abs()
        } else {
            (value - expected).abs() / expected.abs()
        };
        Check {
            name: name.into(),
            value,
            expected,
            tol,
            pass: err <= tol,
        }
    }

    /// Passes when `value < tol`.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            expected: 0.0,
            tol,
            pass: value < tol,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            value: pass as u8 as f64,
            expected: 1.0,
            tol: 0.0,
            pass,
        }
    }
}

/// An LLW measurement without its full trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlwSummary {
    pub kind: LlwKind,
    pub speed: f64,
    pub bounds: LlwBounds,
    pub fit: SpeedEstimate,
}

impl From<&LlwMeasurement> for LlwSummary {
    fn from(m: &LlwMeasurement) -> Self {
        LlwSummary {
            kind: m.kind,
            speed: m.speed,
            bounds: m.bounds,
            fit: m.fit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjSummary {
    pub sigma1: f64,
    pub lambda_u: f64,
    pub a: f64,
    pub dx: f64,
    pub steps: usize,
    pub zero_set_speed: f64,
    pub predicted_zero_set_speed: f64,
    /// Absent when the upper exponent has no closed form.
    pub sandwich: Option<SandwichReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    pub failed: usize,
    pub errored: usize,
}

/// Everything a run produced. Identical configs give identical records up
/// to the two timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: ExperimentKind,
    /// SHA-256 of the serialized config.
    pub config_hash: String,
    pub seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub report: Option<SpeedReport>,
    pub llw: Vec<LlwSummary>,
    pub measured: Vec<MeasuredSpeed>,
    pub missing_samples: Vec<(String, usize)>,
    pub profile: Option<ProfileVerdict>,
    pub hj: Option<HjSummary>,
    pub sweep: Option<SweepSummary>,
    pub checks: Vec<Check>,
    /// Files written next to `report.json`, relative to the output directory.
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl RunRecord {
    pub(crate) fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(RunRecord {
            kind: cfg.kind,
            config_hash: config_hash(cfg)?,
            seed: cfg.seed,
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            report: None,
            llw: Vec::new(),
            measured: Vec::new(),
            missing_samples: Vec::new(),
            profile: None,
            hj: None,
            sweep: None,
            checks: Vec::new(),
            artifacts: Vec::new(),
            pass: true,
        })
    }

    pub(crate) fn finish(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass)
            && self.profile.as_ref().is_none_or(|p| p.pass)
            && self.sweep.as_ref().is_none_or(|s| s.failed == 0 && s.errored == 0);
        self.finished_unix_ms = now_ms();
    }

    /// Copy with the timestamps zeroed, for reproducibility comparisons.
    pub fn without_timestamps(&self) -> Self {
        let mut r = self.clone();
        r.started_unix_ms = 0;
        r.finished_unix_ms = 0;
        r
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}
