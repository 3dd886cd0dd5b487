use serde::{Deserialize, Serialize};

use super::Bounds;
use crate::beam_model::{derive_sections, stress_check, DesignParams, LoadEnvelope, MaterialSpec};
use crate::MM;

/// Margin that turns a strict inequality `g < 0` into `g <= -STRICT_EPS`.
/// Applied in SI units.
pub const STRICT_EPS: f64 = 1e-9;

/// Radius of the sensor envelope, m.
pub const ENVELOPE_RADIUS: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub name: String,
    /// Signed slack in SI units (m or Pa); negative is satisfied.
    pub value: f64,
    /// Normalizing scale used by the penalty.
    pub scale: f64,
    /// Strict rows need `value <= -STRICT_EPS`, the others `value <= 0`.
    pub strict: bool,
}

impl Slack {
    fn new(name: &str, value: f64, scale: f64, strict: bool) -> Self {
        Self {
            name: name.to_string(),
            value,
            scale,
            strict,
        }
    }

    pub fn satisfied(&self) -> bool {
        if self.strict {
            self.value <= -STRICT_EPS
        } else {
            self.value <= 0.0
        }
    }

    /// Amount by which the row misses its requirement, scaled; zero when satisfied.
    pub fn normalized_violation(&self) -> f64 {
        let margin = if self.strict { STRICT_EPS } else { 0.0 };
        let v = (self.value + margin) / self.scale;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v.max(0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub slacks: Vec<Slack>,
    pub feasible: bool,
}

impl ViolationReport {
    pub fn get(&self, name: &str) -> Option<&Slack> {
        self.slacks.iter().find(|s| s.name == name)
    }

    /// Names of the rows that are not satisfied.
    pub fn violated(&self) -> Vec<&str> {
        self.slacks
            .iter()
            .filter(|s| !s.satisfied())
            .map(|s| s.name.as_str())
            .collect()
    }

    pub fn penalty_sum(&self) -> f64 {
        self.slacks.iter().map(|s| s.normalized_violation().powi(2)).sum()
    }
}

/// Constraint slacks with the default bounds.
pub fn feasibility(p: &DesignParams, m: &MaterialSpec, env: &LoadEnvelope) -> ViolationReport {
    feasibility_with(p, m, env, &Bounds::default())
}

/// Signed slack of every constraint: the geometric rows, the envelope, the
/// two stress rows, the sensor windows and one clamp distance per bounded
/// variable.
pub fn feasibility_with(
    p: &DesignParams,
    m: &MaterialSpec,
    env: &LoadEnvelope,
    bounds: &Bounds,
) -> ViolationReport {
    let geo = ENVELOPE_RADIUS;
    let l1p = p.l1_comp() * MM;
    let mut slacks = vec![
        Slack::new("spoke_aspect", (-p.l1 + 3.0 * p.b1) * MM, geo, true),
        Slack::new("cross_aspect", (-p.l2 + 3.0 * p.b2) * MM, geo, true),
        Slack::new(
            "envelope",
            -ENVELOPE_RADIUS + ((p.r + p.l1 + p.b2).powi(2) + (p.l2 / 2.0).powi(2)).sqrt() * MM,
            geo,
            true,
        ),
        Slack::new("cross_free_length", (p.b1 - p.l2) * MM, geo, true),
    ];

    let sigma_scale = if m.sigma_allowable > 0.0 {
        m.sigma_allowable
    } else {
        1e6
    };
    let (bend, torsion) = match derive_sections(p, m) {
        Ok(s) => {
            let r = stress_check(&s, env, m);
            (r.sigma_bend - r.sigma_allowable, r.sigma_torsion - r.sigma_allowable)
        }
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    slacks.push(Slack::new("stress_bend", bend, sigma_scale, true));
    slacks.push(Slack::new("stress_torsion", torsion, sigma_scale, true));

    for (name, rs) in [("rs2", p.rs2), ("rs1", p.rs1)] {
        slacks.push(Slack::new(&format!("{name}_over_table"), (p.r - rs) * MM, geo, false));
        slacks.push(Slack::new(&format!("{name}_on_beam"), rs * MM - (p.r * MM + l1p), geo, true));
    }

    for (i, (name, x)) in DesignParams::VARIABLE_NAMES
        .iter()
        .zip(p.variables())
        .enumerate()
    {
        let (lo, hi) = (bounds.lo()[i], bounds.hi()[i]);
        slacks.push(Slack::new(
            &format!("bound_{name}"),
            (lo - x).max(x - hi) * MM,
            (hi - lo) * MM,
            false,
        ));
    }

    let feasible = slacks.iter().all(Slack::satisfied);
    ViolationReport { slacks, feasible }
}
