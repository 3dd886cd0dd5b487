//! The 6×6 sensitivity matrix `G` mapping a wrench to the six photocoupler
//! gap changes, its normalization, and singular-value based scores.
//!
//! Rows follow the sensors (three vertical, then three horizontal, at 120°
//! spacing); columns follow the wrench `(Fx, Fy, Fz, Mx, My, Mz)`.

mod objectives;

pub use objectives::{objective_value, ObjectiveId};

use std::f64::consts::PI;

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::beam_model::{
    derive_sections, sensor_compliances, DesignParams, LoadEnvelope, MaterialSpec, SectionSet,
    SpringConstants,
};
use crate::{Error, Result, MM};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-14;

pub type Mat6 = [[f64; 6]; 6];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wrench {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl Wrench {
    pub const AXES: [&'static str; 6] = ["Fx", "Fy", "Fz", "Mx", "My", "Mz"];

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            fx: a[0],
            fy: a[1],
            fz: a[2],
            mx: a[3],
            my: a[4],
            mz: a[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.fx, self.fy, self.fz, self.mx, self.my, self.mz]
    }

    /// A wrench with a single nonzero component.
    pub fn axis(i: usize, value: f64) -> Self {
        let mut a = [0.0; 6];
        a[i] = value;
        Self::from_array(a)
    }
}

/// Gap changes of the six photocouplers, m. `d[0..3]` vertical, `d[3..6]`
/// horizontal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisplacementSet {
    pub d: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GMatrix {
    pub entries: Mat6,
    pub params: DesignParams,
}

impl GMatrix {
    pub fn matrix(&self) -> Matrix6<f64> {
        to_matrix(&self.entries)
    }
}

/// How the rated loads enter the normalized matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `G·diag(rated)`: each column is the displacement pattern at full-scale load.
    #[default]
    WrenchColumns,
    /// `diag(1/rated)·G`: the rated values scale the sensor rows.
    SensorRows,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedG {
    pub entries: Mat6,
    /// The six rated values used for scaling.
    pub rs_diag: [f64; 6],
    pub reading: Normalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub cond: f64,
    pub frobenius: f64,
    pub nuclear: f64,
    pub spectral: f64,
    /// Descending.
    pub singular_values: [f64; 6],
}

fn to_matrix(m: &Mat6) -> Matrix6<f64> {
    Matrix6::from_fn(|i, j| m[i][j])
}

fn from_matrix(m: &Matrix6<f64>) -> Mat6 {
    let mut out = [[0.0; 6]; 6];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

/// Assemble `G` from the sensor spring constants and the sensor placement.
pub fn build_g(k: &SpringConstants, p: &DesignParams) -> GMatrix {
    let s3 = (PI / 3.0).sin();
    let s6 = (PI / 6.0).sin();
    let rs1 = p.rs1 * MM;
    let hc = (p.h / 2.0 - p.c) * MM;
    let kz = k.k_dfzv;
    let kv = k.k_rmyv;
    let kf = k.k_dfxh;
    let km = k.k_dmzh;
    let kh = k.k_rmyh;
    let entries = [
        [0.0, 0.0, -1.0 / kz, -rs1 * s3 / kv, rs1 * s6 / kv, 0.0],
        [0.0, 0.0, -1.0 / kz, rs1 * s3 / kv, rs1 * s6 / kv, 0.0],
        [0.0, 0.0, -1.0 / kz, 0.0, -rs1 / kv, 0.0],
        [0.0, 1.0 / kf, 0.0, hc / kh, 0.0, 1.0 / km],
        [-s3 / kf, -s6 / kf, 0.0, -hc * s6 / kh, -hc * s3 / kh, 1.0 / km],
        [s3 / kf, -s6 / kf, 0.0, hc * s6 / kh, hc * s3 / kh, 1.0 / km],
    ];
    GMatrix { entries, params: *p }
}

/// Normalize with the default wrench-column reading.
pub fn normalize_g(g: &GMatrix, env: &LoadEnvelope) -> NormalizedG {
    normalize_g_with(g, env, Normalization::WrenchColumns)
}

pub fn normalize_g_with(g: &GMatrix, env: &LoadEnvelope, reading: Normalization) -> NormalizedG {
    let rated = env.per_axis();
    let mut entries = g.entries;
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            match reading {
                Normalization::WrenchColumns => *v *= rated[j],
                Normalization::SensorRows => *v /= rated[i],
            }
        }
    }
    NormalizedG {
        entries,
        rs_diag: rated,
        reading,
    }
}

pub fn singular_metrics(gbar: &NormalizedG) -> Result<MetricSet> {
    matrix_metrics(&gbar.entries)
}

/// Singular-value metrics of any 6×6 matrix.
pub fn matrix_metrics(m: &Mat6) -> Result<MetricSet> {
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::SingularGeometry("non-finite matrix entry".into()));
    }
    let sv = to_matrix(m).singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let sigma_max = s[0];
    let sigma_min = s[5];
    if !(sigma_max > 0.0) || sigma_min < RANK_TOL * sigma_max {
        return Err(Error::RankDeficient {
            ratio: if sigma_max > 0.0 { sigma_min / sigma_max } else { 0.0 },
        });
    }
    let frobenius = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let nuclear = s.iter().sum();
    let mut singular_values = [0.0; 6];
    singular_values.copy_from_slice(&s);
    Ok(MetricSet {
        sigma_max,
        sigma_min,
        cond: sigma_max / sigma_min,
        frobenius,
        nuclear,
        spectral: sigma_max,
        singular_values,
    })
}

/// `Δd = G w`.
pub fn forward_map(g: &GMatrix, w: &Wrench) -> DisplacementSet {
    let wa = w.to_array();
    let mut d = [0.0; 6];
    for (di, row) in d.iter_mut().zip(g.entries.iter()) {
        *di = row.iter().zip(wa.iter()).map(|(a, b)| a * b).sum();
    }
    DisplacementSet { d }
}

/// Least-squares wrench for a displacement set.
pub fn inverse_map(g: &GMatrix, d: &DisplacementSet) -> Result<Wrench> {
    let svd = g.matrix().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin < RANK_TOL * smax {
        return Err(Error::RankDeficient {
            ratio: if smax > 0.0 { smin / smax } else { 0.0 },
        });
    }
    // Force and moment columns differ by orders of magnitude; solving on the
    // column-equilibrated matrix keeps the small components accurate.
    let g = g.matrix();
    let scale = Vector6::from_fn(|j, _| 1.0 / g.column(j).norm());
    let eq = g * Matrix6::from_diagonal(&scale);
    let y = eq
        .svd(true, true)
        .solve(&Vector6::from_column_slice(&d.d), 0.0)
        .map_err(|e| Error::SingularGeometry(e.to_string()))?;
    let x = y.component_mul(&scale);
    Ok(Wrench::from_array([x[0], x[1], x[2], x[3], x[4], x[5]]))
}

/// Inverse of `G` as a plain array.
pub fn invert(m: &Mat6) -> Result<Mat6> {
    let mm = to_matrix(m);
    let met = matrix_metrics(m)?;
    let inv = mm
        .try_inverse()
        .ok_or(Error::RankDeficient { ratio: 1.0 / met.cond })?;
    Ok(from_matrix(&inv))
}

/// Everything derived from one design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignEvaluation {
    pub sections: SectionSet,
    pub springs: SpringConstants,
    pub g: GMatrix,
    pub gbar: NormalizedG,
    pub metrics: MetricSet,
}

/// Sections, spring constants, `G`, `Ḡ` and metrics for a design.
pub fn evaluate_design(
    p: &DesignParams,
    m: &MaterialSpec,
    env: &LoadEnvelope,
    reading: Normalization,
) -> Result<DesignEvaluation> {
    let sections = derive_sections(p, m)?;
    let springs = sensor_compliances(&sections, p)?;
    let g = build_g(&springs, p);
    let gbar = normalize_g_with(&g, env, reading);
    let metrics = singular_metrics(&gbar)?;
    Ok(DesignEvaluation {
        sections,
        springs,
        g,
        gbar,
        metrics,
    })
}
