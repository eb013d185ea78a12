//! Scenario files. Every section and key is optional; unknown keys are
//! rejected so that typos surface as configuration errors.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fail::Failure;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    pub profile: ProfileSection,
    pub time: TimeSection,
    pub analysis: AnalysisSection,
    pub jc: JcSection,
    pub fidelity: FidelitySection,
    pub sweep: SweepSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Bath size N.
    pub n: usize,
    /// Central spin field B.
    pub field: f64,
    /// Transverse coupling A.
    pub coupling: f64,
    /// Longitudinal coupling Δ.
    pub longitudinal: f64,
    /// Coherent bath angle θ.
    pub theta: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            n: 12,
            field: 1.0,
            coupling: 1.0,
            longitudinal: 1.0,
            theta: PI / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Uniform,
    Exponential,
    Integrable,
    Explicit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSection {
    pub kind: ProfileName,
    pub alpha: f64,
    /// Δ_j² − A_j² for the integrable profile.
    pub constant: f64,
    pub transverse: Vec<f64>,
    pub longitudinal: Vec<f64>,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            kind: ProfileName::Uniform,
            alpha: 0.0,
            constant: 0.0,
            transverse: Vec::new(),
            longitudinal: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub start: f64,
    pub end: f64,
    /// Sample count; derived from the fastest oscillation when absent.
    pub points: Option<usize>,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: 100.0,
            points: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub min_prominence: f64,
    pub smooth_window: usize,
    pub collapse_gap: Option<f64>,
    /// Number of revivals to report and predict.
    pub revivals: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            min_prominence: central_spin::analysis::DEFAULT_MIN_PROMINENCE,
            smooth_window: central_spin::analysis::DEFAULT_SMOOTH_WINDOW,
            collapse_gap: None,
            revivals: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JcSection {
    pub eps_tail: f64,
    pub light_shift: f64,
}

impl Default for JcSection {
    fn default() -> Self {
        Self {
            eps_tail: central_spin::jc::DEFAULT_TAIL,
            light_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelitySection {
    /// Equally spaced phases φ ∈ [0, 2π).
    pub phases: usize,
}

impl Default for FidelitySection {
    fn default() -> Self {
        Self { phases: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    N,
    Alpha,
    Theta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::N,
            values: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub threads: Option<usize>,
    pub ed_cap: usize,
    pub out: String,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            threads: None,
            ed_cap: central_spin::ed::DEFAULT_ED_CAP,
            out: "out".into(),
        }
    }
}

fn bad(path: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("{path}: {msg}"))
}

fn finite(path: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("{v} is not finite")))
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Failure::Config(m) => Failure::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let m = &self.model;
        if m.n == 0 {
            return Err(bad("model.n", "bath size must be at least 1"));
        }
        finite("model.field", m.field)?;
        finite("model.coupling", m.coupling)?;
        finite("model.longitudinal", m.longitudinal)?;
        finite("model.theta", m.theta)?;
        if !(0.0..=PI).contains(&m.theta) {
            return Err(bad("model.theta", format!("{} outside [0, π]", m.theta)));
        }

        let p = &self.profile;
        finite("profile.alpha", p.alpha)?;
        finite("profile.constant", p.constant)?;
        if p.kind == ProfileName::Explicit {
            if p.transverse.len() != m.n {
                return Err(bad(
                    "profile.transverse",
                    format!("{} entries for a bath of {}", p.transverse.len(), m.n),
                ));
            }
            if p.longitudinal.len() != m.n {
                return Err(bad(
                    "profile.longitudinal",
                    format!("{} entries for a bath of {}", p.longitudinal.len(), m.n),
                ));
            }
        }

        let t = &self.time;
        finite("time.start", t.start)?;
        finite("time.end", t.end)?;
        if t.end <= t.start {
            return Err(bad("time.end", format!("{} must exceed time.start = {}", t.end, t.start)));
        }
        if let Some(n) = t.points {
            if n < 2 {
                return Err(bad("time.points", "need at least 2 samples"));
            }
        }

        let a = &self.analysis;
        if !(a.min_prominence >= 0.0) {
            return Err(bad("analysis.min_prominence", "must be ≥ 0"));
        }
        if a.smooth_window == 0 {
            return Err(bad("analysis.smooth_window", "must be ≥ 1"));
        }
        if let Some(g) = a.collapse_gap {
            if !(g > 0.0) || !g.is_finite() {
                return Err(bad("analysis.collapse_gap", "must be positive"));
            }
        }
        if a.revivals == 0 {
            return Err(bad("analysis.revivals", "must be ≥ 1"));
        }
        if !(self.jc.eps_tail > 0.0 && self.jc.eps_tail < 1.0) {
            return Err(bad("jc.eps_tail", "must lie in (0, 1)"));
        }
        finite("jc.light_shift", self.jc.light_shift)?;
        if self.fidelity.phases == 0 {
            return Err(bad("fidelity.phases", "must be ≥ 1"));
        }
        for (i, v) in self.sweep.values.iter().enumerate() {
            finite(&format!("sweep.values[{i}]"), *v)?;
        }
        if self.run.threads == Some(0) {
            return Err(bad("run.threads", "must be ≥ 1"));
        }
        Ok(())
    }

    /// Samples over the time window: the configured count, or enough for
    /// 16 per period of the fastest flip-flop frequency (~N|A| at resonance).
    pub fn sample_count(&self) -> usize {
        if let Some(n) = self.time.points {
            return n;
        }
        let m = &self.model;
        let n = m.n as f64;
        let fastest = (m.field.abs() + n * (m.longitudinal.abs() + m.coupling.abs())).max(1e-300);
        let span = self.time.end - self.time.start;
        let needed = (span * fastest * 16.0 / (2.0 * PI)).ceil() as usize + 1;
        needed.clamp(2001, 4_000_001)
    }
}
