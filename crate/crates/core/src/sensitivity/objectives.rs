use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricSet;
use crate::Error;

/// Candidate design scores built from `Cond(Ḡ)` and the spectral (`S2`),
/// Frobenius (`F`) and nuclear (`NUC`) norms. All are minimized.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectiveId {
    COND,
    INV_S2,
    INV_F,
    INV_NUC,
    COND_over_S2,
    COND_over_F,
    COND_over_NUC,
    COND_times_S2,
    CONDxS2_over_F,
    CONDxS2_over_NUC,
    CONDxS2_over_F2,
    CONDxS2_over_NUC2,
    CONDxS2_over_FxNUC,
}

impl ObjectiveId {
    /// In reference-table order.
    pub const ALL: [ObjectiveId; 13] = [
        ObjectiveId::COND,
        ObjectiveId::INV_S2,
        ObjectiveId::INV_F,
        ObjectiveId::INV_NUC,
        ObjectiveId::COND_over_S2,
        ObjectiveId::COND_over_F,
        ObjectiveId::COND_over_NUC,
        ObjectiveId::COND_times_S2,
        ObjectiveId::CONDxS2_over_F,
        ObjectiveId::CONDxS2_over_NUC,
        ObjectiveId::CONDxS2_over_F2,
        ObjectiveId::CONDxS2_over_NUC2,
        ObjectiveId::CONDxS2_over_FxNUC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveId::COND => "COND",
            ObjectiveId::INV_S2 => "INV_S2",
            ObjectiveId::INV_F => "INV_F",
            ObjectiveId::INV_NUC => "INV_NUC",
            ObjectiveId::COND_over_S2 => "COND_over_S2",
            ObjectiveId::COND_over_F => "COND_over_F",
            ObjectiveId::COND_over_NUC => "COND_over_NUC",
            ObjectiveId::COND_times_S2 => "COND_times_S2",
            ObjectiveId::CONDxS2_over_F => "CONDxS2_over_F",
            ObjectiveId::CONDxS2_over_NUC => "CONDxS2_over_NUC",
            ObjectiveId::CONDxS2_over_F2 => "CONDxS2_over_F2",
            ObjectiveId::CONDxS2_over_NUC2 => "CONDxS2_over_NUC2",
            ObjectiveId::CONDxS2_over_FxNUC => "CONDxS2_over_FxNUC",
        }
    }
}

impl fmt::Display for ObjectiveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ObjectiveId::ALL
            .iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("unknown objective `{s}`")))
    }
}

pub fn objective_value(id: ObjectiveId, m: &MetricSet) -> f64 {
    let (c, s2, f, n) = (m.cond, m.spectral, m.frobenius, m.nuclear);
    match id {
        ObjectiveId::COND => c,
        ObjectiveId::INV_S2 => 1.0 / s2,
        ObjectiveId::INV_F => 1.0 / f,
        ObjectiveId::INV_NUC => 1.0 / n,
        ObjectiveId::COND_over_S2 => c / s2,
        ObjectiveId::COND_over_F => c / f,
        ObjectiveId::COND_over_NUC => c / n,
        ObjectiveId::COND_times_S2 => c * s2,
        ObjectiveId::CONDxS2_over_F => c * s2 / f,
        ObjectiveId::CONDxS2_over_NUC => c * s2 / n,
        ObjectiveId::CONDxS2_over_F2 => c * s2 / (f * f),
        ObjectiveId::CONDxS2_over_NUC2 => c * s2 / (n * n),
        ObjectiveId::CONDxS2_over_FxNUC => c * s2 / (f * n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensitivity::matrix_metrics;
    use approx::assert_relative_eq;

    fn diag(v: [f64; 6]) -> MetricSet {
        let mut m = [[0.0; 6]; 6];
        for i in 0..6 {
            m[i][i] = v[i];
        }
        matrix_metrics(&m).unwrap()
    }

    #[test]
    fn identity_values() {
        let m = diag([1.0; 6]);
        assert_relative_eq!(objective_value(ObjectiveId::COND, &m), 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            objective_value(ObjectiveId::CONDxS2_over_NUC2, &m),
            1.0 / 36.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn cond_over_frobenius_hand_value() {
        let m = diag([2.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_relative_eq!(objective_value(ObjectiveId::COND_over_F, &m), 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn names_round_trip() {
        for id in ObjectiveId::ALL {
            assert_eq!(id.name().parse::<ObjectiveId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.name()));
        }
        assert!("nope".parse::<ObjectiveId>().is_err());
    }
}
