//! Per-channel voltage-to-gap linearization.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Degree used for the photocoupler curves.
pub const DEGREE: usize = 7;

/// Fits whose design matrix is worse than this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Polynomial in the normalized abscissa `t = (2v - lo - hi) / (hi - lo)`,
/// which maps the fitted voltage domain onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyModel {
    /// Coefficients of `t^0 .. t^degree`, output in mm.
    pub coeffs: Vec<f64>,
    /// Fitted voltage domain `[lo, hi]`, V.
    pub domain: [f64; 2],
    pub residual_rms: f64,
    /// Condition number of the normalized design matrix.
    pub condition: f64,
}

impl PolyModel {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn to_t(&self, v: f64) -> f64 {
        let [lo, hi] = self.domain;
        (2.0 * v - lo - hi) / (hi - lo)
    }

    fn horner(&self, v: f64) -> f64 {
        let t = self.to_t(v);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn in_domain(&self, v: f64) -> bool {
        v >= self.domain[0] && v <= self.domain[1]
    }

    /// Gap for voltage `v`; errors outside the fitted domain.
    pub fn eval(&self, v: f64) -> Result<f64> {
        if !self.in_domain(v) {
            return Err(Error::DomainExceeded {
                value: v,
                lo: self.domain[0],
                hi: self.domain[1],
            });
        }
        Ok(self.horner(v))
    }

    /// Gap for voltage `v` and whether it was extrapolated.
    pub fn eval_lenient(&self, v: f64) -> (f64, bool) {
        (self.horner(v), !self.in_domain(v))
    }

    /// Coefficients of `v^0 .. v^degree` in the raw voltage.
    pub fn power_coefficients(&self) -> Vec<f64> {
        let [lo, hi] = self.domain;
        let alpha = 2.0 / (hi - lo);
        let beta = -(hi + lo) / (hi - lo);
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        // (alpha v + beta)^k, expanded with running binomials.
        for (k, ck) in self.coeffs.iter().enumerate() {
            let mut binom = 1.0;
            for (m, o) in out.iter_mut().enumerate().take(k + 1) {
                *o += ck * binom * alpha.powi(m as i32) * beta.powi((k - m) as i32);
                binom = binom * (k - m) as f64 / (m + 1) as f64;
            }
        }
        out
    }
}

/// Least-squares polynomial from voltage to gap.
///
/// The abscissa is mapped to `[-1, 1]` and the system is solved by SVD,
/// never through the normal equations.
pub fn fit_photocoupler_poly(volts: &[f64], gaps_mm: &[f64], degree: usize) -> Result<PolyModel> {
    if volts.len() != gaps_mm.len() {
        return Err(Error::LengthMismatch {
            left: volts.len(),
            right: gaps_mm.len(),
        });
    }
    let needed = degree + 1;
    let mut distinct: Vec<f64> = volts.iter().copied().filter(|v| v.is_finite()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < needed || volts.iter().chain(gaps_mm).any(|x| !x.is_finite()) {
        return Err(Error::Underdetermined {
            needed,
            got: distinct.len(),
        });
    }
    let domain = [distinct[0], distinct[distinct.len() - 1]];
    let mut model = PolyModel {
        coeffs: vec![0.0; needed],
        domain,
        residual_rms: 0.0,
        condition: 1.0,
    };

    let a = DMatrix::from_fn(volts.len(), needed, |i, j| model.to_t(volts[i]).powi(j as i32));
    let b = DVector::from_column_slice(gaps_mm);
    let svd = a.svd(true, true);
    let s = &svd.singular_values;
    let condition = s.max() / s.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|_| Error::IllConditioned { condition })?;

    model.coeffs = x.iter().copied().collect();
    model.condition = condition;
    let ss: f64 = volts
        .iter()
        .zip(gaps_mm)
        .map(|(v, d)| (model.horner(*v) - d).powi(2))
        .sum();
    model.residual_rms = (ss / volts.len() as f64).sqrt();
    Ok(model)
}

/// Gap for voltage `v` under model `m`.
pub fn voltage_to_displacement(m: &PolyModel, v: f64) -> Result<f64> {
    m.eval(v)
}
