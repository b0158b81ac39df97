//! Run configuration: a strict JSON document with optional sections and
//! `--set section.key=value` overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use oamch::azimuthal::{Orientation, StepIndex};
use oamch::ch::{ChSettings, ThetaQuad};
use oamch::coincidence::{AuxPhases, ExperimentSettings};
use oamch::interferometer::BeamSplitterAngle;
use oamch::montecarlo::McConfig;
use oamch::search::{ScanGrid, ThetaPolicy, DEFAULT_THRESHOLD};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// An angle in radians. Accepts a bare number (radians) or a string with an
/// explicit unit suffix: `"22.5deg"`, `"22.5°"` or `"0.39rad"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Angle(pub f64);

impl Angle {
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let (number, scale) = if let Some(v) = t.strip_suffix("deg").or_else(|| t.strip_suffix('°')) {
            (v, PI / 180.0)
        } else if let Some(v) = t.strip_suffix("rad") {
            (v, 1.0)
        } else {
            (t, 1.0)
        };
        let value: f64 = number
            .trim()
            .parse()
            .map_err(|_| format!("invalid angle '{text}' (use radians, or a 'deg' / 'rad' suffix)"))?;
        if !value.is_finite() {
            return Err(format!("angle '{text}' is not finite"));
        }
        Ok(Angle(value * scale))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle in radians or a string such as \"45deg\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                Angle::parse(v).map_err(E::custom)
            }
        }

        d.deserialize_any(AngleVisitor)
    }
}

fn default_step() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxSection {
    #[serde(default)]
    pub a1: Angle,
    #[serde(default)]
    pub a2: Angle,
    #[serde(default)]
    pub b1: Angle,
    #[serde(default)]
    pub b2: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default)]
    pub alpha: Angle,
    #[serde(default)]
    pub beta: Angle,
    #[serde(default)]
    pub theta_a: Angle,
    #[serde(default)]
    pub theta_b: Angle,
    #[serde(default = "default_step")]
    pub step_index: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_phases: Option<AuxSection>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            alpha: Angle(0.0),
            beta: Angle(0.0),
            theta_a: Angle(0.0),
            theta_b: Angle(0.0),
            step_index: default_step(),
            aux_phases: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChSection {
    #[serde(default)]
    pub alpha: Angle,
    /// Defaults to `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Angle>,
    #[serde(default = "ChSection::default_theta_a")]
    pub theta_a: Angle,
    #[serde(default = "ChSection::default_theta_a_prime")]
    pub theta_a_prime: Angle,
    #[serde(default = "ChSection::default_theta_b")]
    pub theta_b: Angle,
    #[serde(default = "ChSection::default_theta_b_prime")]
    pub theta_b_prime: Angle,
    #[serde(default = "default_step")]
    pub step_index: f64,
}

impl ChSection {
    fn default_theta_a() -> Angle {
        Angle(ThetaQuad::CANONICAL.theta_a)
    }
    fn default_theta_a_prime() -> Angle {
        Angle(ThetaQuad::CANONICAL.theta_a_prime)
    }
    fn default_theta_b() -> Angle {
        Angle(ThetaQuad::CANONICAL.theta_b)
    }
    fn default_theta_b_prime() -> Angle {
        Angle(ThetaQuad::CANONICAL.theta_b_prime)
    }
}

impl Default for ChSection {
    fn default() -> Self {
        Self {
            alpha: Angle(0.0),
            beta: None,
            theta_a: Self::default_theta_a(),
            theta_a_prime: Self::default_theta_a_prime(),
            theta_b: Self::default_theta_b(),
            theta_b_prime: Self::default_theta_b_prime(),
            step_index: default_step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "McSection::default_trials")]
    pub trials: u64,
    #[serde(default = "McSection::default_efficiency")]
    pub efficiency_a: f64,
    #[serde(default = "McSection::default_efficiency")]
    pub efficiency_b: f64,
    #[serde(default = "McSection::default_seed")]
    pub seed: u64,
}

impl McSection {
    fn default_trials() -> u64 {
        100_000
    }
    fn default_efficiency() -> f64 {
        1.0
    }
    fn default_seed() -> u64 {
        42
    }
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            trials: Self::default_trials(),
            efficiency_a: 1.0,
            efficiency_b: 1.0,
            seed: Self::default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(default = "ScanSection::default_steps")]
    pub alpha_steps: usize,
    #[serde(default = "ScanSection::default_steps")]
    pub beta_steps: usize,
    #[serde(default = "ScanSection::default_policy")]
    pub theta_policy: ThetaPolicy,
    #[serde(default = "ScanSection::default_threshold")]
    pub threshold: f64,
    #[serde(default = "ScanSection::default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub origin: Angle,
    #[serde(default = "default_step")]
    pub step_index: f64,
}

impl ScanSection {
    fn default_steps() -> usize {
        17
    }
    fn default_policy() -> ThetaPolicy {
        ThetaPolicy::FixedCanonical
    }
    fn default_threshold() -> f64 {
        DEFAULT_THRESHOLD
    }
    fn default_tol() -> f64 {
        1e-9
    }
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            alpha_steps: Self::default_steps(),
            beta_steps: Self::default_steps(),
            theta_policy: Self::default_policy(),
            threshold: Self::default_threshold(),
            tol: Self::default_tol(),
            origin: Angle(0.0),
            step_index: default_step(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub ch: ChSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: ExperimentSection::default(),
            ch: ChSection::default(),
            mc: McSection::default(),
            scan: ScanSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Loads the configuration file (if any), applies `section.key=value`
/// overrides and parses the result strictly.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Config(format!("malformed config {}: {e}", p.display())))?
        }
        None => serde_json::json!({ "schema_version": SCHEMA_VERSION }),
    };
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg: RunConfig =
        serde_json::from_value(doc).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}

/// Applies one `a.b.c=value` override. The value is read as JSON when it
/// parses as JSON and as a plain string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{assignment}' must look like section.key=value")))?;
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key '{key}' is malformed")));
    }
    let mut node = doc;
    for part in &parts[..parts.len() - 1] {
        let map = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("override '{key}' descends into a non-object")))?;
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    let map = node
        .as_object_mut()
        .ok_or_else(|| CliError::Config(format!("override '{key}' descends into a non-object")))?;
    map.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn step(value: f64) -> Result<StepIndex, CliError> {
    StepIndex::new(value).map_err(|e| CliError::Config(e.to_string()))
}

fn orientation(a: Angle) -> Result<Orientation, CliError> {
    Orientation::new(a.0).map_err(|e| CliError::Config(e.to_string()))
}

fn splitter(a: Angle) -> Result<BeamSplitterAngle, CliError> {
    BeamSplitterAngle::new(a.0).map_err(|e| CliError::Config(e.to_string()))
}

impl RunConfig {
    pub fn experiment_settings(&self) -> Result<ExperimentSettings, CliError> {
        let e = &self.experiment;
        let mut s = ExperimentSettings::new(
            orientation(e.alpha)?,
            orientation(e.beta)?,
            splitter(e.theta_a)?,
            splitter(e.theta_b)?,
            step(e.step_index)?,
        );
        if let Some(aux) = &e.aux_phases {
            for a in [aux.a1, aux.a2, aux.b1, aux.b2] {
                if !a.0.is_finite() {
                    return Err(CliError::Config("auxiliary phases must be finite".into()));
                }
            }
            s = s.with_aux_phases(AuxPhases {
                a1: aux.a1.0,
                a2: aux.a2.0,
                b1: aux.b1.0,
                b2: aux.b2.0,
            });
        }
        Ok(s)
    }

    pub fn ch_settings(&self) -> Result<ChSettings, CliError> {
        let c = &self.ch;
        Ok(ChSettings {
            theta_a: splitter(c.theta_a)?,
            theta_a_prime: splitter(c.theta_a_prime)?,
            theta_b: splitter(c.theta_b)?,
            theta_b_prime: splitter(c.theta_b_prime)?,
            alpha: orientation(c.alpha)?,
            beta: orientation(c.beta.unwrap_or(c.alpha))?,
            step_index: step(c.step_index)?,
        })
    }

    pub fn mc_config(&self) -> Result<McConfig, CliError> {
        let m = &self.mc;
        McConfig::new(m.trials, m.efficiency_a, m.efficiency_b, m.seed).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn scan_grid(&self) -> Result<(ScanGrid, StepIndex), CliError> {
        let s = &self.scan;
        let grid = ScanGrid {
            alpha_steps: s.alpha_steps,
            beta_steps: s.beta_steps,
            theta_policy: s.theta_policy,
            threshold: s.threshold,
            origin: s.origin.0,
            tol: s.tol,
        };
        grid.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok((grid, step(s.step_index)?))
    }
}
