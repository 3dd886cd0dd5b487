use serde::{Deserialize, Serialize};

use super::{LoadEnvelope, MaterialSpec, SectionSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    /// Root bending stress of one spoke, Pa.
    pub sigma_bend: f64,
    /// Torsional shear stress in the cross member, Pa.
    pub sigma_torsion: f64,
    pub sigma_allowable: f64,
    pub feasible: bool,
}

/// Screen the worst single-spoke stresses under the rated vertical force.
///
/// Each spoke carries a third of the load. Bending uses the root moment
/// `(F/3) l1'` on the out-of-plane section; torsion uses the moment
/// `(F/3)(l1' - a1)` passed into the cross member with the thin-rectangle
/// coefficient 1/3.
pub fn stress_check(s: &SectionSet, env: &LoadEnvelope, m: &MaterialSpec) -> StressReport {
    let f = env.force_rated / 3.0;
    let sigma_bend = f * s.l1p * (s.h / 2.0) / s.i12;
    let torque = f * (s.l1p - s.fz_arm);
    let sigma_torsion = 3.0 * torque / (s.h * s.b2 * s.b2);
    let sigma_allowable = m.sigma_allowable;
    StressReport {
        sigma_bend,
        sigma_torsion,
        sigma_allowable,
        feasible: sigma_bend < sigma_allowable && sigma_torsion < sigma_allowable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam_model::{derive_sections, DesignParams};

    fn selected() -> SectionSet {
        let p = DesignParams::new(14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.716);
        derive_sections(&p, &MaterialSpec::default()).unwrap()
    }

    #[test]
    fn unloaded_is_stress_free() {
        let r = stress_check(&selected(), &LoadEnvelope::new(0.0, 0.0), &MaterialSpec::default());
        assert_eq!(r.sigma_bend, 0.0);
        assert_eq!(r.sigma_torsion, 0.0);
        assert!(r.feasible);
    }

    #[test]
    fn zero_allowable_is_infeasible() {
        let m = MaterialSpec {
            sigma_allowable: 0.0,
            ..MaterialSpec::default()
        };
        assert!(!stress_check(&selected(), &LoadEnvelope::default(), &m).feasible);
    }

    #[test]
    fn selected_design_at_rating() {
        let r = stress_check(&selected(), &LoadEnvelope::default(), &MaterialSpec::default());
        // About 111 MPa bending and 24 MPa torsion.
        assert!((r.sigma_bend / 1e6 - 111.0).abs() < 2.0, "{}", r.sigma_bend);
        assert!((r.sigma_torsion / 1e6 - 24.0).abs() < 2.0, "{}", r.sigma_torsion);
        assert!(r.feasible);
    }
}
