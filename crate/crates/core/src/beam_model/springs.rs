use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{DesignParams, SectionSet};
use crate::{Error, Result, MM};

/// The four elementary load cases of the elastomer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LoadCase {
    Fz,
    My,
    Fx,
    Mz,
}

impl LoadCase {
    pub const ALL: [LoadCase; 4] = [LoadCase::Fz, LoadCase::My, LoadCase::Fx, LoadCase::Mz];
}

/// Spring constants of the elastomer.
///
/// The five position-dependent entries are stiffnesses seen by a photocoupler
/// (load per unit sensor displacement or rotation). The four `k_fz`..`k_mz`
/// entries are compliances of the loading table itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringConstants {
    /// Vertical sensor, vertical force, N/m.
    pub k_dfzv: f64,
    /// Vertical sensor, tilting moment, N·m/rad.
    pub k_rmyv: f64,
    /// Horizontal sensor, lateral force, N/m.
    pub k_dfxh: f64,
    /// Horizontal sensor, twisting moment, N·m/m.
    pub k_dmzh: f64,
    /// Horizontal sensor, tilting moment, N·m/rad.
    pub k_rmyh: f64,
    /// Table deflection per vertical force, m/N.
    pub k_fz: f64,
    /// Table rotation per tilting moment, rad/(N·m).
    pub k_my: f64,
    /// Table deflection per lateral force, m/N.
    pub k_fx: f64,
    /// Table rotation per twisting moment, rad/(N·m).
    pub k_mz: f64,
}

impl SpringConstants {
    /// Equal to `k_rmyv` by the 120° symmetry of the layout.
    pub fn k_rmxv(&self) -> f64 {
        self.k_rmyv
    }

    /// Equal to `k_dfxh` by symmetry.
    pub fn k_dfyh(&self) -> f64 {
        self.k_dfxh
    }

    /// Equal to `k_rmyh` by symmetry.
    pub fn k_rmxh(&self) -> f64 {
        self.k_rmyh
    }

    fn check(&self) -> Result<()> {
        let all = [
            ("k_dfzv", self.k_dfzv),
            ("k_rmyv", self.k_rmyv),
            ("k_dfxh", self.k_dfxh),
            ("k_dmzh", self.k_dmzh),
            ("k_rmyh", self.k_rmyh),
            ("k_fz", self.k_fz),
            ("k_my", self.k_my),
            ("k_fx", self.k_fx),
            ("k_mz", self.k_mz),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::SingularGeometry(format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

fn kgs1(s: &SectionSet) -> f64 {
    s.k_shear * s.g * s.s1
}

fn kgs2(s: &SectionSet) -> f64 {
    s.k_shear * s.g * s.s2
}

// Displacement at x per unit vertical force on the table.
fn fz_unit(s: &SectionSet, x: f64) -> f64 {
    let (e, g, l1p, l2p) = (s.e, s.g, s.l1p, s.l2p);
    let a1 = s.fz_arm;
    (x * x * (3.0 * l1p - x) / (6.0 * e * s.i12) - a1 * x * x / (2.0 * e * s.i12)
        + (l1p - a1) * l2p * x / (4.0 * g * s.it)
        + l2p.powi(3) / (192.0 * e * s.i22)
        + (4.0 * l1p * s.s2 + l2p * s.s1) / (4.0 * s.k_shear * g * s.s1 * s.s2))
        / 3.0
}

fn my_tip_factor(s: &SectionSet) -> Result<f64> {
    let d = s.my_arm() + s.r;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::SingularGeometry(format!("A1/B1 + r = {d}")));
    }
    Ok(1.0 / (3.0 * d))
}

// Displacement at x per unit tilting moment.
fn my_unit(s: &SectionSet, x: f64) -> Result<f64> {
    let (e, g, l1p, l2p) = (s.e, s.g, s.l1p, s.l2p);
    let ab = s.my_arm();
    Ok(my_tip_factor(s)?
        * (l2p.powi(3) / (192.0 * e * s.i22)
            + l2p / (4.0 * kgs2(s))
            + x / kgs1(s)
            + x * x * (3.0 * l1p - x) / (6.0 * e * s.i12)
            - ab * x * x / (2.0 * e * s.i12)
            + (l1p - ab) * l2p * x / (4.0 * g * s.it)))
}

fn fx_tip_factor(s: &SectionSet) -> Result<f64> {
    if s.fx_tangential == 0.0 || s.fx_split == 0.0 || !s.fx_split.is_finite() {
        return Err(Error::SingularGeometry(format!(
            "A3 = {}, A4 = {}",
            s.fx_tangential, s.fx_split
        )));
    }
    Ok(s.fx_normal / (2.0 * s.fx_tangential * s.fx_split * (PI / 6.0).cos()))
}

// Displacement at x per unit lateral force.
fn fx_unit(s: &SectionSet, x: f64) -> Result<f64> {
    let (e, l1p, l2p) = (s.e, s.l1p, s.l2p);
    let ratio = s.fx_rot_num / s.fx_rot_den;
    Ok(fx_tip_factor(s)?
        * (x * x * (3.0 * l1p - x) / (6.0 * e * s.i11) - ratio * x * x / (2.0 * e * s.i11)
            + (l1p - ratio) * l2p * x / (16.0 * e * s.i21)
            + x / (4.0 * kgs1(s))))
}

fn mz_tip_factor(s: &SectionSet) -> Result<f64> {
    let d = s.r + 1.0 / s.mz_ratio;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::SingularGeometry(format!("r + 1/a2 = {d}")));
    }
    Ok(1.0 / (3.0 * d))
}

// Tangential displacement at x per unit twisting moment. The tip moment is
// F_C / a2, so the printed `a2` factors read as `1/a2`.
fn mz_unit(s: &SectionSet, x: f64) -> Result<f64> {
    let (e, l1p, l2p) = (s.e, s.l1p, s.l2p);
    let arm = 1.0 / s.mz_ratio;
    Ok(mz_tip_factor(s)?
        * (x * x * (3.0 * l1p - x) / (6.0 * e * s.i11) - arm * x * x / (2.0 * e * s.i11)
            + (l1p - arm) * l2p * x / (16.0 * e * s.i21)
            + x / kgs1(s)))
}

/// Table deflection per unit vertical force, m/N.
pub fn spring_k_fz(s: &SectionSet) -> f64 {
    fz_unit(s, s.l1p)
}

/// Table rotation per unit tilting moment, rad/(N·m).
pub fn spring_k_my(s: &SectionSet) -> Result<f64> {
    Ok(2.0 * my_unit(s, s.l1p)? / s.r)
}

/// Table deflection per unit lateral force, m/N.
pub fn spring_k_fx(s: &SectionSet) -> Result<f64> {
    fx_unit(s, s.l1p)
}

/// Table rotation per unit twisting moment, rad/(N·m).
pub fn spring_k_mz(s: &SectionSet) -> Result<f64> {
    Ok(mz_unit(s, s.l1p)? / s.r)
}

/// Beam displacement at distance `x` (m) from the spoke root under `load`
/// (N or N·m) for one load case.
///
/// At `x = l1'` this equals `k_Fz·load` and `k_Fx·load` for the force cases,
/// `k_My·load·r/2` for tilting and `k_Mz·load·r` for twisting.
pub fn deflection_profile(case: LoadCase, s: &SectionSet, load: f64, x: f64) -> Result<f64> {
    // Tolerate rounding at the tip.
    let tol = s.l1p * 1e-12;
    if !(x >= -tol && x <= s.l1p + tol) {
        return Err(Error::OutOfRange { x, span: s.l1p });
    }
    let x = x.clamp(0.0, s.l1p);
    let unit = match case {
        LoadCase::Fz => fz_unit(s, x),
        LoadCase::My => my_unit(s, x)?,
        LoadCase::Fx => fx_unit(s, x)?,
        LoadCase::Mz => mz_unit(s, x)?,
    };
    Ok(load * unit)
}

/// Spring constants for sensors observing the spokes at distances `u_v`
/// (vertical) and `u_h` (horizontal) from the root, in metres.
///
/// Positions are not checked against the span; [`sensor_compliances`] does
/// that. Returns `SingularGeometry` if any constant is not positive and finite.
pub fn compliances_at(s: &SectionSet, u_v: f64, u_h: f64) -> Result<SpringConstants> {
    let mz_shear = mz_tip_factor(s)? * (s.l1p - u_h) / kgs1(s);
    let k = SpringConstants {
        k_dfzv: 1.0 / fz_unit(s, u_v),
        k_rmyv: s.r / (2.0 * my_unit(s, u_v)?),
        k_dfxh: 1.0 / fx_unit(s, u_h)?,
        // The twisting entry keeps the root shear term at l1' as printed.
        k_dmzh: 1.0 / (mz_unit(s, u_h)? + mz_shear),
        k_rmyh: s.r / (2.0 * my_unit(s, u_h)?),
        k_fz: spring_k_fz(s),
        k_my: spring_k_my(s)?,
        k_fx: spring_k_fx(s)?,
        k_mz: spring_k_mz(s)?,
    };
    k.check()?;
    Ok(k)
}

/// Spring constants at the photocoupler positions of `p`.
///
/// A sensor at radius `rs` sees the spoke at `u = l1' + r - rs`; it must sit
/// over the spoke, `r <= rs < r + l1'`.
pub fn sensor_compliances(s: &SectionSet, p: &DesignParams) -> Result<SpringConstants> {
    let lo = s.r;
    let hi = s.r + s.l1p;
    for rs in [p.rs1 * MM, p.rs2 * MM] {
        // Allow rs = r up to rounding of the mm conversion.
        if !(rs >= lo * (1.0 - 1e-12) && rs < hi) {
            return Err(Error::SensorOffBeam {
                radius_mm: rs / MM,
                lo_mm: lo / MM,
                hi_mm: hi / MM,
            });
        }
    }
    let u_v = (s.l1p + s.r - p.rs1 * MM).min(s.l1p);
    let u_h = (s.l1p + s.r - p.rs2 * MM).min(s.l1p);
    compliances_at(s, u_v, u_h)
}

/// Load shares of a lateral force among the three spokes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FxForceSplit {
    /// Axial force in the spoke aligned with the load, N.
    pub f_a: f64,
    /// Normal force at each oblique spoke tip, N.
    pub f_cn: f64,
    /// Tangential force at each oblique spoke tip, N.
    pub f_ct: f64,
    /// Tip moment at each oblique spoke, N·m.
    pub m_c: f64,
}

impl FxForceSplit {
    /// Resultant along x: `2(F_Cn sin30 + F_Ct cos30) + F_A`.
    pub fn resultant(&self) -> f64 {
        2.0 * (self.f_cn * (PI / 6.0).sin() + self.f_ct * (PI / 6.0).cos()) + self.f_a
    }
}

pub fn fx_force_split(s: &SectionSet, fx: f64) -> Result<FxForceSplit> {
    fx_tip_factor(s)?;
    let a4 = s.fx_split;
    let f_ct = fx * s.fx_normal / (2.0 * s.fx_tangential * a4);
    Ok(FxForceSplit {
        f_a: fx / a4,
        f_cn: fx / (2.0 * a4),
        f_ct,
        m_c: f_ct * s.fx_rot_num / s.fx_rot_den,
    })
}

/// Normal and tangential tip deflections `(δCn, δCt)` of an oblique spoke
/// under lateral force `fx`, m.
pub fn fx_point_deflections(s: &SectionSet, fx: f64) -> Result<(f64, f64)> {
    let f = fx_force_split(s, fx)?;
    Ok((f.f_cn * s.fx_normal / 3f64.sqrt(), f.f_ct * s.fx_tangential))
}

/// Response to the reference unit loads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitLoadDeformations {
    /// Table deflection under 100 N vertical force, mm.
    pub fz_100n_mm: f64,
    /// Table deflection under 100 N lateral force, mm.
    pub fx_100n_mm: f64,
    /// Tangential displacement at the horizontal sensor radius under 1 N·m twist, mm.
    pub mz_1nm_mm: f64,
    /// Table rotation under 1 N·m tilt, rad.
    pub my_1nm_rad: f64,
}

impl UnitLoadDeformations {
    pub fn as_array(&self) -> [f64; 4] {
        [self.fz_100n_mm, self.fx_100n_mm, self.mz_1nm_mm, self.my_1nm_rad]
    }
}

pub fn unit_load_deformations(s: &SectionSet, p: &DesignParams) -> Result<UnitLoadDeformations> {
    Ok(UnitLoadDeformations {
        fz_100n_mm: spring_k_fz(s) * 100.0 / MM,
        fx_100n_mm: spring_k_fx(s)? * 100.0 / MM,
        mz_1nm_mm: spring_k_mz(s)? * p.rs2,
        my_1nm_rad: spring_k_my(s)?,
    })
}
