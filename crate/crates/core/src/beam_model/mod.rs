//! Closed-form Timoshenko compliance model of the three-spoke T-beam elastomer.
//!
//! Geometry is specified in millimetres ([`DesignParams`]) and converted to SI
//! exactly once, in [`derive_sections`]. Everything downstream works in
//! metres, newtons, pascals and radians.
//!
//! Each spoke of length `l1` and width `b1` joins the loading table (radius
//! `r`) to a thin cross member of length `l2` and width `b2`; all members share
//! the height `h`. Vertical photocouplers sit at radius `rs1`, horizontal ones
//! at `rs2`, both measured from the sensor centre. A sensor at radius `rs`
//! observes the spoke at distance `u = l1' + r - rs` from the spoke root.

mod sections;
mod springs;
mod stress;

pub use sections::{derive_sections, SectionSet};
pub use springs::{
    deflection_profile, fx_force_split, fx_point_deflections, sensor_compliances, spring_k_fx,
    spring_k_fz, spring_k_my, spring_k_mz, unit_load_deformations, FxForceSplit, LoadCase,
    SpringConstants, UnitLoadDeformations,
};
pub use stress::{stress_check, StressReport};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default radius of the vertical photocouplers, mm.
pub const DEFAULT_RS1_MM: f64 = 12.0;

/// A point in design space. Lengths in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignParams {
    /// Spoke length.
    pub l1: f64,
    /// Cross-member length.
    pub l2: f64,
    /// Spoke width.
    pub b1: f64,
    /// Cross-member width.
    pub b2: f64,
    /// Beam height.
    pub h: f64,
    /// Loading-table radius.
    pub r: f64,
    /// Horizontal photocoupler radius.
    pub rs2: f64,
    /// Vertical photocoupler radius (not optimized).
    #[serde(default = "default_rs1")]
    pub rs1: f64,
    /// Height of the horizontal photocoupler above the beam mid-plane.
    #[serde(default)]
    pub c: f64,
}

fn default_rs1() -> f64 {
    DEFAULT_RS1_MM
}

impl DesignParams {
    pub const VARIABLE_NAMES: [&'static str; 7] = ["l1", "l2", "b1", "b2", "h", "r", "rs2"];

    pub fn new(l1: f64, l2: f64, b1: f64, b2: f64, h: f64, r: f64, rs2: f64) -> Self {
        Self {
            l1,
            l2,
            b1,
            b2,
            h,
            r,
            rs2,
            rs1: DEFAULT_RS1_MM,
            c: 0.0,
        }
    }

    pub fn with_rs1(mut self, rs1: f64) -> Self {
        self.rs1 = rs1;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    /// The seven optimization variables in canonical order.
    pub fn variables(&self) -> [f64; 7] {
        [self.l1, self.l2, self.b1, self.b2, self.h, self.r, self.rs2]
    }

    /// Rebuild from the seven optimization variables, keeping `rs1` and `c`.
    pub fn from_variables(x: &[f64; 7], rs1: f64, c: f64) -> Self {
        Self {
            l1: x[0],
            l2: x[1],
            b1: x[2],
            b2: x[3],
            h: x[4],
            r: x[5],
            rs2: x[6],
            rs1,
            c,
        }
    }

    /// Compensated spoke length `l1 + b2/2`, mm.
    pub fn l1_comp(&self) -> f64 {
        self.l1 + self.b2 / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("l1", self.l1),
            ("l2", self.l2),
            ("b1", self.b1),
            ("b2", self.b2),
            ("h", self.h),
            ("r", self.r),
            ("rs2", self.rs2),
            ("rs1", self.rs1),
        ];
        for (name, value) in named {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveDimension { name, value });
            }
        }
        if !self.c.is_finite() {
            return Err(Error::DegenerateSection(format!("c = {}", self.c)));
        }
        Ok(())
    }
}

/// Isotropic elastic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    /// Young's modulus, Pa.
    pub elastic_modulus: f64,
    /// Shear modulus, Pa.
    pub shear_modulus: f64,
    /// Allowable stress, Pa.
    pub sigma_allowable: f64,
}

impl MaterialSpec {
    /// AL7075-T6 handbook values with a safety factor of two on yield.
    pub const AL7075_T6: MaterialSpec = MaterialSpec {
        elastic_modulus: 71.7e9,
        shear_modulus: 26.9e9,
        sigma_allowable: 250.0e6,
    };

    pub fn validate(&self) -> Result<()> {
        let (e, g, s) = (self.elastic_modulus, self.shear_modulus, self.sigma_allowable);
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidMaterial(format!("E = {e}")));
        }
        if !(g > 0.0 && g < e) {
            return Err(Error::InvalidMaterial(format!("G = {g} must lie in (0, E)")));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidMaterial(format!("sigma_allowable = {s}")));
        }
        Ok(())
    }

    /// Both moduli scaled by `s`; allowable stress unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            elastic_modulus: self.elastic_modulus * s,
            shear_modulus: self.shear_modulus * s,
            ..*self
        }
    }
}

impl Default for MaterialSpec {
    fn default() -> Self {
        Self::AL7075_T6
    }
}

/// Full-scale load per axis used for normalization and stress screening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadEnvelope {
    /// Force full scale, N.
    pub force_rated: f64,
    /// Moment full scale, N·m.
    pub moment_rated: f64,
}

impl LoadEnvelope {
    pub const fn new(force_rated: f64, moment_rated: f64) -> Self {
        Self {
            force_rated,
            moment_rated,
        }
    }

    /// Rated value per wrench axis (Fx, Fy, Fz, Mx, My, Mz).
    pub fn per_axis(&self) -> [f64; 6] {
        let (f, m) = (self.force_rated, self.moment_rated);
        [f, f, f, m, m, m]
    }
}

impl Default for LoadEnvelope {
    fn default() -> Self {
        Self::new(520.0, 15.6)
    }
}
