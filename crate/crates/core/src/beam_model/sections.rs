use serde::Serialize;

use super::{DesignParams, MaterialSpec};
use crate::{Error, Result, MM};

/// Section properties and load-sharing coefficients of one spoke/cross-member
/// pair, all in SI units.
///
/// Moments of inertia follow the `I<member><axis>` convention: member 1 is the
/// spoke, member 2 the cross member; axis 1 is in-plane (horizontal) bending,
/// axis 2 out-of-plane (vertical) bending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionSet {
    /// Compensated spoke length `l1 + b2/2`, m.
    pub l1p: f64,
    /// Free cross-member length `l2 - b1`, m.
    pub l2p: f64,
    /// Spoke area `b1 h`, m².
    pub s1: f64,
    /// Cross-member area `b2 h`, m².
    pub s2: f64,
    /// Spoke in-plane second moment `h b1³/12`, m⁴.
    pub i11: f64,
    /// Spoke out-of-plane second moment `b1 h³/12`, m⁴.
    pub i12: f64,
    /// Cross-member in-plane second moment `h b2³/12`, m⁴.
    pub i21: f64,
    /// Cross-member out-of-plane second moment `b2 h³/12`, m⁴.
    pub i22: f64,
    /// Cross-member torsion constant `beta h b2³`, m⁴.
    pub it: f64,
    /// Rectangular torsion coefficient.
    pub beta: f64,
    /// Shear correction coefficient.
    pub k_shear: f64,
    /// Young's modulus, Pa.
    pub e: f64,
    /// Shear modulus, Pa.
    pub g: f64,
    /// Loading-table radius, m.
    pub r: f64,
    /// Beam height, m.
    pub h: f64,
    /// Cross-member width, m.
    pub b2: f64,
    /// Root moment per unit tip force under vertical force (`M_C = a1 F_C`), m.
    pub fz_arm: f64,
    /// `l1'/r`.
    pub lambda_spoke: f64,
    /// `l2'/r`.
    pub lambda_bar: f64,
    /// Numerator of the tip moment arm under tilting moment, 1/N.
    pub my_arm_num: f64,
    /// Denominator of the tip moment arm under tilting moment, 1/(N·m).
    pub my_arm_den: f64,
    /// Rotation coupling numerator of the lateral case (E cancels), m⁻².
    pub fx_rot_num: f64,
    /// Rotation coupling denominator of the lateral case, m⁻³.
    pub fx_rot_den: f64,
    /// Tangential tip compliance of the lateral case, m/N.
    pub fx_tangential: f64,
    /// `sqrt(3)` times the normal tip compliance of the lateral case, m/N.
    pub fx_normal: f64,
    /// Lateral force share divisor (`F_A = Fx / fx_split`).
    pub fx_split: f64,
    /// Tip force per tip moment under twisting moment (`M_C = F_C / mz_ratio`), 1/m.
    pub mz_ratio: f64,
}

impl SectionSet {
    /// Tip moment arm under tilting moment, `M_C / F_C`, m.
    pub fn my_arm(&self) -> f64 {
        self.my_arm_num / self.my_arm_den
    }
}

/// Derive section properties from a design. The only mm → m conversion in
/// the model happens here.
pub fn derive_sections(p: &DesignParams, m: &MaterialSpec) -> Result<SectionSet> {
    p.validate()?;
    m.validate()?;

    let l1 = p.l1 * MM;
    let l2 = p.l2 * MM;
    let b1 = p.b1 * MM;
    let b2 = p.b2 * MM;
    let h = p.h * MM;
    let r = p.r * MM;
    let e = m.elastic_modulus;
    let g = m.shear_modulus;

    let l1p = l1 + b2 / 2.0;
    let l2p = l2 - b1;
    if !(l2p > 0.0) {
        return Err(Error::DegenerateSection(format!(
            "free cross-member length l2 - b1 = {:.6} mm is not positive",
            l2p / MM
        )));
    }

    let s1 = b1 * h;
    let s2 = b2 * h;
    let i11 = h * b1.powi(3) / 12.0;
    let i12 = b1 * h.powi(3) / 12.0;
    let i21 = h * b2.powi(3) / 12.0;
    let i22 = b2 * h.powi(3) / 12.0;

    let ratio = b2 / h;
    let beta = (16.0 / 3.0 - 3.36 * ratio * (1.0 - b2.powi(4) / (12.0 * h.powi(4)))) / 16.0;
    if !(beta > 0.0) {
        return Err(Error::DegenerateSection(format!(
            "torsion coefficient {beta} not positive (b2/h = {ratio})"
        )));
    }
    let it = beta * h * b2.powi(3);
    let k_shear = 10.0 / (12.0 + ratio);

    let git = g * it;
    let ei12 = e * i12;
    let fz_arm = l1p * (2.0 * l1p * git + l2p * ei12) / (4.0 * l1p * git + l2p * ei12);

    let lambda_spoke = l1p / r;
    let lambda_bar = l2p / r;
    let kgs1 = k_shear * g * s1;
    let kgs2 = k_shear * g * s2;

    let my_arm_num = (l1p * l1p / (3.0 * ei12) + l1p * l2p / (4.0 * git) + 1.0 / kgs1) * lambda_spoke
        + (1.0 / (4.0 * kgs2) + l2p * l2p / (192.0 * e * i22)) * lambda_bar
        + (l1p * l1p / (2.0 * ei12) + l1p * l2p / (4.0 * git));
    let my_arm_den = (l1p / (2.0 * ei12) + l2p / (4.0 * git)) * lambda_spoke
        + (l1p / ei12 + l2p / (4.0 * git));

    let ei11 = e * i11;
    let ei21 = e * i21;
    let fx_rot_num = l1p * l1p / (2.0 * i11) + l1p * l2p / (16.0 * i21);
    let fx_rot_den = l1p / i11 + l2p / (16.0 * i21);
    let fx_tangential = l1p.powi(3) / (3.0 * ei11) + l1p * l1p * l2p / (16.0 * ei21) + l1p / kgs1
        - fx_rot_num * (l1p * l1p / (2.0 * ei11) + l1p * l2p / (16.0 * ei21)) / fx_rot_den;
    let fx_normal = 3f64.sqrt() * (l1p.powi(3) / (192.0 * ei11) + l1p / (e * s1) + l2p / (4.0 * kgs2));
    let fx_split = 1.5 + 3f64.sqrt() * fx_normal / (2.0 * fx_tangential);

    let mz_ratio = (l1p / ei11 + l2p / (16.0 * ei21) + (l1p / (2.0 * ei11) + l2p / (16.0 * ei21)) * lambda_spoke)
        / (l1p * l1p / (2.0 * ei11)
            + l1p * l2p / (16.0 * ei21)
            + (l1p * l1p / (3.0 * ei11) + l1p * l2p / (16.0 * ei21) + 1.0 / kgs1) * lambda_spoke);

    Ok(SectionSet {
        l1p,
        l2p,
        s1,
        s2,
        i11,
        i12,
        i21,
        i22,
        it,
        beta,
        k_shear,
        e,
        g,
        r,
        h,
        b2,
        fz_arm,
        lambda_spoke,
        lambda_bar,
        my_arm_num,
        my_arm_den,
        fx_rot_num,
        fx_rot_den,
        fx_tangential,
        fx_normal,
        fx_split,
        mz_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn selected() -> DesignParams {
        DesignParams::new(14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.716)
    }

    #[test]
    fn compensated_lengths() {
        let s = derive_sections(&selected(), &MaterialSpec::default()).unwrap();
        assert_relative_eq!(s.l1p / MM, 14.51675, max_relative = 1e-12);
        assert_relative_eq!(s.l2p / MM, 7.961, max_relative = 1e-12);
    }

    #[test]
    fn torsion_coefficient_limits() {
        let m = MaterialSpec::default();
        let mut p = selected();
        p.b2 = 1e-6;
        p.h = 10.0;
        let s = derive_sections(&p, &m).unwrap();
        assert_relative_eq!(s.beta, 1.0 / 3.0, max_relative = 1e-6);
        for (b2, h) in [(0.5, 1.0), (1.0, 1.0), (0.5, 15.0), (0.7, 3.0)] {
            p.b2 = b2;
            p.h = h;
            let s = derive_sections(&p, &m).unwrap();
            assert!(s.beta > 0.0 && s.beta < 1.0 / 3.0, "beta {}", s.beta);
        }
    }

    #[test]
    fn shear_coefficient_as_printed() {
        let s = derive_sections(&selected(), &MaterialSpec::default()).unwrap();
        assert_relative_eq!(s.k_shear, 10.0 / (12.0 + 0.5535 / 6.690), max_relative = 1e-14);
    }

    #[test]
    fn rejects_non_positive_lengths() {
        let mut p = selected();
        p.h = 0.0;
        assert!(matches!(
            derive_sections(&p, &MaterialSpec::default()),
            Err(Error::NonPositiveDimension { name: "h", .. })
        ));
        let mut p = selected();
        p.b1 = -1.0;
        assert!(matches!(
            derive_sections(&p, &MaterialSpec::default()),
            Err(Error::NonPositiveDimension { name: "b1", .. })
        ));
    }

    #[test]
    fn rejects_degenerate_cross_member() {
        let mut p = selected();
        p.b1 = 11.0;
        assert!(matches!(
            derive_sections(&p, &MaterialSpec::default()),
            Err(Error::DegenerateSection(_))
        ));
    }

    #[test]
    fn fz_arm_between_guided_and_free() {
        // M_C / F_C ranges from l1'/2 (rigid cross member) to l1' (torsion-free).
        let s = derive_sections(&selected(), &MaterialSpec::default()).unwrap();
        assert!(s.fz_arm > s.l1p / 2.0 && s.fz_arm < s.l1p);
    }
}
