//! Linear map from the six linearized gap changes to the wrench.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::sensitivity::{Mat6, Wrench};
use crate::{Error, Result};

/// Singular values of the excitation below this fraction of the largest
/// count as missing directions.
pub const EXCITATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingModel {
    /// `w = matrix · d` with `d` in mm and `w` in N / N·m.
    pub matrix: Mat6,
    /// σmax/σmin of the stacked displacement samples.
    pub excitation_condition: f64,
    /// Fit residual per wrench axis, native units.
    pub residual_rms: [f64; 6],
    pub samples: usize,
}

impl DecouplingModel {
    pub fn apply(&self, d: &[f64; 6]) -> Wrench {
        let mut w = [0.0; 6];
        for (wi, row) in w.iter_mut().zip(&self.matrix) {
            *wi = row.iter().zip(d).map(|(m, x)| m * x).sum();
        }
        Wrench::from_array(w)
    }
}

/// Least-squares `M` minimizing `Σ‖M·d_i − w_i‖²`.
pub fn fit_decoupling(displacements: &[[f64; 6]], refs: &[Wrench]) -> Result<DecouplingModel> {
    if displacements.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: displacements.len(),
            right: refs.len(),
        });
    }
    let n = displacements.len();
    let d = DMatrix::from_fn(n, 6, |i, j| displacements[i][j]);
    let w = DMatrix::from_fn(n, 6, |i, j| refs[i].to_array()[j]);
    if d.iter().chain(w.iter()).any(|x| !x.is_finite()) {
        return Err(Error::DeficientExcitation { rank: 0 });
    }

    let svd = d.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    let rank = s.iter().filter(|x| **x > EXCITATION_TOL * smax && **x > 0.0).count();
    if n < 6 || rank < 6 {
        return Err(Error::DeficientExcitation { rank });
    }
    // D·Mᵀ = W
    let mt = svd
        .solve(&w, 0.0)
        .map_err(|_| Error::DeficientExcitation { rank })?;

    let mut matrix = [[0.0; 6]; 6];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = mt[(j, i)];
        }
    }
    let resid = &d * &mt - &w;
    let residual_rms =
        std::array::from_fn(|j| (resid.column(j).norm_squared() / n as f64).sqrt());
    Ok(DecouplingModel {
        matrix,
        excitation_condition: smax / s.min(),
        residual_rms,
        samples: n,
    })
}
