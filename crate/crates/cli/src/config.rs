//! Run configuration: one JSON file, every key optional, unknown keys
//! rejected. Geometry is in millimetres, material constants in pascals,
//! loads in newtons and newton-metres.

use std::path::Path;

use ftkit::beam_model::{DesignParams, LoadEnvelope, MaterialSpec};
use ftkit::calibration::CalibrationOptions;
use ftkit::optimizer::SearchConfig;
use ftkit::reference::SELECTED_DESIGN;
use ftkit::simulator::{GaitSpec, SimConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Full-scale ramps on each axis in turn.
    StaticRamp,
    /// Stepping on a flat surface.
    Gait,
    /// Stepping with an accumulating offset, plus the same walk without it.
    GravelDrift,
}

impl Scenario {
    pub const NAMES: [&'static str; 3] = ["static-ramp", "gait", "gravel-drift"];

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "static-ramp" => Ok(Scenario::StaticRamp),
            "gait" => Ok(Scenario::Gait),
            "gravel-drift" => Ok(Scenario::GravelDrift),
            _ => Err(CliError::Input(format!(
                "unknown scenario `{s}` (expected one of {})",
                Scenario::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub scenario: Scenario,
    pub sensor: SimConfig,
    /// Output sample rate, Hz.
    pub rate_hz: f64,
    /// Unloaded time before and after each profile, s.
    pub rest_s: f64,
    /// Duration of one ramp leg, s.
    pub ramp_leg_s: f64,
    /// Ramp peak as a fraction of the rated envelope.
    pub ramp_fraction: f64,
    pub gait: GaitSpec,
    /// Stepping time for the gait scenarios, s.
    pub walk_s: f64,
    /// Named offset preset for the drift scenario.
    pub drift_preset: String,
    /// Points per channel in the bench sweep.
    pub sweep_points: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::StaticRamp,
            sensor: SimConfig::default(),
            rate_hz: 100.0,
            rest_s: 1.0,
            ramp_leg_s: 4.0,
            ramp_fraction: 1.0,
            gait: GaitSpec::default(),
            walk_s: 30.0,
            drift_preset: "commercial_lf".into(),
            sweep_points: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub options: CalibrationOptions,
    /// Largest acceptable per-axis max error, % FS.
    pub error_budget_pct: f64,
    /// Full scale per axis for percentages; the rated envelope if absent.
    pub full_scale: Option<[f64; 6]>,
    /// Window at the end of each test trace used for the final offset, s.
    pub offset_window_s: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            options: CalibrationOptions::default(),
            error_budget_pct: 1.0,
            full_scale: None,
            offset_window_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds the optimizer starts and every simulated noise stream.
    pub seed: u64,
    pub material: MaterialSpec,
    pub envelope: LoadEnvelope,
    /// Design used by `evaluate` and `simulate`, mm.
    pub design: DesignParams,
    /// Optimizer settings. Its own `seed` key is ignored in favour of the
    /// top-level one.
    pub search: SearchConfig,
    pub simulation: SimulationConfig,
    pub calibration: CalibrationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            material: MaterialSpec::default(),
            envelope: LoadEnvelope::default(),
            design: SELECTED_DESIGN.params(),
            search: SearchConfig::default(),
            simulation: SimulationConfig::default(),
            calibration: CalibrationConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parse a config file; errors name the offending key and position.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Input(format!(
                "config: at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                Self::from_json(&text)
            }
        }
    }

    /// Copy the top-level seed into the sections that use one and check
    /// what the core types do not.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        self.search.seed = self.seed;
        self.material.validate()?;
        self.search.validate()?;
        self.simulation.sensor.validate()?;
        self.design.validate()?;
        let e = &self.envelope;
        if !(e.force_rated > 0.0 && e.moment_rated > 0.0) {
            return Err(CliError::Input("envelope ratings must be positive".into()));
        }
        let s = &self.simulation;
        if !(s.rate_hz > 0.0 && s.rest_s >= 0.0 && s.ramp_leg_s > 0.0 && s.walk_s > 0.0) {
            return Err(CliError::Input(
                "simulation rate, ramp_leg_s and walk_s must be positive, rest_s non-negative".into(),
            ));
        }
        if s.sweep_points < 2 {
            return Err(CliError::Input("simulation.sweep_points must be at least 2".into()));
        }
        if ftkit::reference::drift_preset(&s.drift_preset).is_none() {
            let names: Vec<&str> = ftkit::reference::DRIFT_PRESETS.iter().map(|p| p.name).collect();
            return Err(CliError::Input(format!(
                "unknown drift preset `{}` (expected one of {})",
                s.drift_preset,
                names.join(", ")
            )));
        }
        if let Some(fs) = self.calibration.full_scale {
            if fs.iter().any(|v| !(*v > 0.0)) {
                return Err(CliError::Input("calibration.full_scale entries must be positive".into()));
            }
        }
        Ok(self)
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn full_scale(&self) -> [f64; 6] {
        self.calibration.full_scale.unwrap_or(self.envelope.per_axis())
    }
}
