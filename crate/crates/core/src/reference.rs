//! Published reference values: the optimized design rows with their FEM
//! deformations, the sensing range, calibration error figures, resolution
//! comparison and post-walk drift offsets.
//!
//! These are external numbers used for cross-checks and scenario presets.
//! Nothing in the model is fitted to them.

use crate::beam_model::DesignParams;
use crate::calibration::SensingRange;
use crate::sensitivity::ObjectiveId;

/// One published optimum with its condition number and FEM deformations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedDesign {
    pub objective: ObjectiveId,
    /// l1, l2, b1, b2, h, r, rs2 in mm.
    pub variables: [f64; 7],
    pub cond: f64,
    /// Fz 100 N (mm), Fx 100 N (mm), Mz 1 N·m (mm), My 1 N·m (rad).
    pub fem: [f64; 4],
}

impl PublishedDesign {
    pub fn params(&self) -> DesignParams {
        let [l1, l2, b1, b2, h, r, rs2] = self.variables;
        DesignParams::new(l1, l2, b1, b2, h, r, rs2)
    }
}

const fn row(objective: ObjectiveId, variables: [f64; 7], cond: f64, fem: [f64; 4]) -> PublishedDesign {
    PublishedDesign {
        objective,
        variables,
        cond,
        fem,
    }
}

use ObjectiveId::*;

/// The thirteen published optima in objective order.
pub const PUBLISHED_DESIGNS: [PublishedDesign; 13] = [
    row(COND, [10.97, 11.00, 3.656, 0.5009, 7.536, 7.761, 12.64], 47.4971, [5.583e-03, 7.676e-03, 2.052e-03, 1.103e-03]),
    row(INV_S2, [9.139, 27.45, 3.046, 0.9714, 6.658, 4.437, 15.00], 1558.73, [9.999e-03, 8.373e-03, 1.247e-03, 9.755e-04]),
    row(INV_F, [9.139, 27.45, 3.046, 0.9714, 6.658, 4.437, 8.237], 269.821, [1.000e-03, 1.673e-02, 3.070e-03, 9.755e-04]),
    row(INV_NUC, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.739], 47.8550, [1.195e-02, 1.655e-02, 5.460e-03, 7.325e-04]),
    row(COND_over_S2, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 10.18], 47.8485, [1.195e-02, 1.572e-02, 5.646e-03, 7.309e-04]),
    row(COND_over_F, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.913], 47.8561, [1.195e-02, 1.655e-02, 5.846e-03, 7.309e-04]),
    row(COND_over_NUC, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.716], 47.8548, [1.195e-02, 1.653e-02, 5.867e-03, 7.325e-04]),
    row(COND_times_S2, [10.92, 11.00, 3.640, 0.7049, 15.00, 7.603, 14.80], 50.8431, [1.269e-03, 2.232e-03, 8.402e-04, 8.571e-05]),
    row(CONDxS2_over_F, [10.69, 11.00, 2.934, 0.5379, 7.176, 8.000, 11.80], 47.9025, [6.979e-03, 1.207e-02, 3.864e-03, 3.816e-04]),
    row(CONDxS2_over_NUC, [10.99, 11.00, 2.938, 0.5385, 7.157, 7.701, 11.50], 47.9085, [6.979e-03, 1.207e-02, 3.864e-03, 3.964e-04]),
    row(CONDxS2_over_F2, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.908], 47.8561, [1.228e-02, 1.735e-02, 6.422e-03, 7.607e-04]),
    row(CONDxS2_over_NUC2, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.716], 47.8548, [1.228e-02, 2.125e-02, 6.449e-03, 7.607e-04]),
    row(CONDxS2_over_FxNUC, [14.24, 11.00, 3.039, 0.5535, 6.690, 4.437, 8.800], 47.8554, [1.228e-02, 2.125e-02, 6.449e-03, 7.607e-04]),
];

/// The design that was built and tested.
pub const SELECTED_DESIGN: PublishedDesign = PUBLISHED_DESIGNS[11];

/// Shared parameter cluster of the isotropy-family optima: l1, b1, r (mm).
pub const CLUSTER_L1_B1_R: [f64; 3] = [14.24, 3.039, 4.437];

/// Measured range of the built sensor.
pub const SENSING_RANGE: SensingRange = SensingRange {
    min: [-620.0, -590.0, -1965.0, -13.7, -13.6, -19.6],
    max: [620.0, 590.0, 1965.0, 13.7, 13.6, 19.6],
};

/// Calibration error statistics per axis: mean %, std %, max %, RMSE
/// (N or N·m), nonlinearity/hysteresis %.
pub const CALIBRATION_ERRORS: [[f64; 5]; 6] = [
    [0.0460, 0.0742, 0.3600, 0.5703, 0.607],
    [-0.0343, 0.0706, 0.3008, 0.4051, 0.521],
    [0.0172, 0.0416, 0.1316, 0.6757, 0.240],
    [0.0627, 0.2669, 0.8802, 0.0172, 1.543],
    [0.0570, 0.2410, 0.8672, 0.0155, 1.699],
    [0.0161, 0.0852, 0.3879, 0.0063, 0.681],
];

/// Crosstalk per output axis: max % and RMS (N or N·m).
pub const CROSSTALK: [[f64; 2]; 6] = [
    [0.9422, 0.7908],
    [0.6310, 0.6460],
    [0.1827, 1.132],
    [3.002, 0.05596],
    [1.974, 0.05271],
    [2.915, 0.01912],
];

/// Resolution of the built sensor, N and N·m.
pub const RESOLUTION: [f64; 6] = [0.2436, 0.1429, 0.2017, 0.016, 0.021, 0.0075];
/// Printed step counts for the built sensor.
pub const RESOLUTION_STEPS: [u64; 6] = [5091, 8258, 19487, 1716, 1283, 5272];

/// Resolution of the commercial capacitive comparison sensor.
pub const COMMERCIAL_RESOLUTION: [f64; 6] = [0.2, 0.2, 0.2, 0.008, 0.008, 0.008];
/// Printed step counts for the commercial sensor.
pub const COMMERCIAL_STEPS: [u64; 6] = [1000, 1000, 1500, 625, 625, 625];
/// Range of the commercial sensor. Only the 150 N normal range is stated;
/// the other limits are the ones implied by its printed step counts.
pub const COMMERCIAL_RANGE: SensingRange = SensingRange {
    min: [-100.0, -100.0, -150.0, -2.5, -2.5, -2.5],
    max: [100.0, 100.0, 150.0, 2.5, 2.5, 2.5],
};

/// Offset after the long gravel walk, % FS on Fx, Fy, Fz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftPreset {
    pub name: &'static str,
    pub offset_pct: [f64; 3],
}

pub const DRIFT_PRESETS: [DriftPreset; 4] = [
    DriftPreset { name: "commercial_lf", offset_pct: [2.27, 0.0300, 3.93] },
    DriftPreset { name: "commercial_rf", offset_pct: [0.270, 0.670, 3.18] },
    DriftPreset { name: "proposed_lf", offset_pct: [0.375, 0.165, 0.116] },
    DriftPreset { name: "proposed_rf", offset_pct: [0.0381, 0.107, 0.0354] },
];

pub fn drift_preset(name: &str) -> Option<DriftPreset> {
    DRIFT_PRESETS.iter().copied().find(|p| p.name == name)
}

/// Duration of the gravel walk, s.
pub const WALK_DURATION_S: f64 = 5000.0;
/// Steps taken during the walk.
pub const WALK_STEPS: usize = 10_000;
/// Stepping rate during the walk, Hz.
pub const STEP_RATE_HZ: f64 = 2.0;
/// Impact peaks relative to the steady ground reaction force.
pub const IMPACT_FACTOR: [f64; 2] = [2.0, 3.0];
