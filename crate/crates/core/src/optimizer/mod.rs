//! Constrained global search over the seven design variables.
//!
//! Multi-start: scrambled Halton points in the bounds box seed box-clamped
//! Nelder–Mead runs on a quadratic-penalty objective. Each run restarts its
//! simplex at the incumbent until the improvement stalls. The answer is the
//! best strictly feasible point seen by any run.

mod constraints;
mod halton;
mod local;
mod search;

pub use constraints::{
    feasibility, feasibility_with, Slack, ViolationReport, ENVELOPE_RADIUS, STRICT_EPS,
};
pub use halton::halton_points;
pub use local::{nelder_mead, NmOutcome};
pub use search::{
    candidate, evaluation_point, global_search, penalized_objective, raw_objective, reproduce_table,
    Candidate, OptimizationResult, StartRecord, TableRow,
};

use serde::{Deserialize, Serialize};

use crate::beam_model::{DesignParams, DEFAULT_RS1_MM};
use crate::sensitivity::{Normalization, ObjectiveId};
use crate::{Error, Result};

/// Inclusive box for each design variable, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bounds {
    pub l1: [f64; 2],
    pub l2: [f64; 2],
    pub b1: [f64; 2],
    pub b2: [f64; 2],
    pub h: [f64; 2],
    pub r: [f64; 2],
    pub rs2: [f64; 2],
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            l1: [1.0, 20.0],
            l2: [11.0, 30.0],
            b1: [1.0, 10.0],
            b2: [0.5, 1.0],
            h: [1.0, 15.0],
            r: [1.0, 8.0],
            rs2: [2.0, 15.0],
        }
    }
}

impl Bounds {
    fn pairs(&self) -> [[f64; 2]; 7] {
        [self.l1, self.l2, self.b1, self.b2, self.h, self.r, self.rs2]
    }

    pub fn lo(&self) -> [f64; 7] {
        self.pairs().map(|p| p[0])
    }

    pub fn hi(&self) -> [f64; 7] {
        self.pairs().map(|p| p[1])
    }

    pub fn contains(&self, x: &[f64; 7]) -> bool {
        self.pairs()
            .iter()
            .zip(x)
            .all(|(b, v)| *v >= b[0] && *v <= b[1])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in DesignParams::VARIABLE_NAMES.iter().zip(self.pairs()) {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "bounds for {name} must satisfy 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Height of the horizontal photocouplers above the beam mid-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorOffset {
    /// Fixed offset, mm.
    Mm(f64),
    /// Offset as a fraction of the beam height.
    FracOfH(f64),
}

impl Default for SensorOffset {
    fn default() -> Self {
        SensorOffset::Mm(0.0)
    }
}

impl SensorOffset {
    pub fn resolve(&self, h: f64) -> f64 {
        match *self {
            SensorOffset::Mm(c) => c,
            SensorOffset::FracOfH(f) => f * h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub objective: ObjectiveId,
    pub n_starts: usize,
    /// Nelder–Mead iterations per local run.
    pub max_iters: usize,
    /// Simplex restarts at the incumbent after the first local run.
    pub max_restarts: usize,
    pub penalty_weight: f64,
    pub convergence_tol: f64,
    pub seed: u64,
    pub bounds: Bounds,
    /// Vertical photocoupler radius, mm.
    pub rs1: f64,
    pub sensor_offset: SensorOffset,
    pub normalization: Normalization,
    /// Which of the seven variables are searched.
    pub free: [bool; 7],
    /// Values for variables that are not free; the box midpoint if absent.
    pub anchor: Option<DesignParams>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            objective: ObjectiveId::CONDxS2_over_NUC2,
            n_starts: 64,
            max_iters: 2000,
            max_restarts: 5,
            penalty_weight: 1e6,
            convergence_tol: 1e-10,
            seed: 0,
            bounds: Bounds::default(),
            rs1: DEFAULT_RS1_MM,
            sensor_offset: SensorOffset::default(),
            normalization: Normalization::default(),
            free: [true; 7],
            anchor: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if self.n_starts == 0 {
            return Err(Error::InvalidConfig("n_starts must be at least 1".into()));
        }
        if !self.free.iter().any(|f| *f) {
            return Err(Error::InvalidConfig("no free variable".into()));
        }
        if !(self.penalty_weight >= 0.0 && self.penalty_weight.is_finite()) {
            return Err(Error::InvalidConfig("penalty_weight must be finite and >= 0".into()));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::InvalidConfig("convergence_tol must be >= 0".into()));
        }
        if !(self.rs1 > 0.0) {
            return Err(Error::InvalidConfig("rs1 must be positive".into()));
        }
        Ok(())
    }

    /// Full design for the seven variables `x`, with `rs1` and `c` applied.
    pub fn design(&self, x: &[f64; 7]) -> DesignParams {
        DesignParams::from_variables(x, self.rs1, self.sensor_offset.resolve(x[4]))
    }

    /// Values used for variables that are not free.
    pub fn anchor_variables(&self) -> [f64; 7] {
        match &self.anchor {
            Some(p) => p.variables(),
            None => {
                let (lo, hi) = (self.bounds.lo(), self.bounds.hi());
                std::array::from_fn(|i| 0.5 * (lo[i] + hi[i]))
            }
        }
    }
}
