//! Calibration pipeline: per-channel polynomial linearization of the
//! photocoupler voltages, a 6×6 decoupling map from gap changes to wrench,
//! and the error battery used to score the result.
//!
//! Reconstruction of a sample is `w = M·(poly(v) − zero)`, where `zero` is
//! the mean linearized gap over an unloaded window at the start of a trace.

mod decoupling;
mod metrics;
mod poly;

pub use decoupling::{fit_decoupling, DecouplingModel, EXCITATION_TOL};
pub use metrics::{
    crosstalk_metrics, error_metrics, label_excitation, monotone_pieces, resolution_steps,
    AxisError, CrosstalkAxis, CrosstalkReport, ErrorReport, Piece, DEADBAND_FRAC, HYSTERESIS_BINS,
};
pub use poly::{fit_photocoupler_poly, voltage_to_displacement, PolyModel, DEGREE, MAX_CONDITION};

use serde::{Deserialize, Serialize};

use crate::sensitivity::Wrench;
use crate::{Error, Result};

/// One row of a voltage trace. `reference` is absent for inference-only traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSample {
    /// s
    pub t: f64,
    /// V
    pub v: [f64; 6],
    pub reference: Option<Wrench>,
}

/// A (voltage, gap) pair from a bench sweep of one photocoupler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub channel: usize,
    pub v: f64,
    pub gap_mm: f64,
}

/// Measurable interval per wrench axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingRange {
    pub min: [f64; 6],
    pub max: [f64; 6],
}

impl SensingRange {
    pub fn symmetric(limit: [f64; 6]) -> Self {
        Self {
            min: limit.map(|x| -x),
            max: limit,
        }
    }

    pub fn span(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    /// Largest magnitude per axis.
    pub fn full_scale(&self) -> [f64; 6] {
        std::array::from_fn(|j| self.min[j].abs().max(self.max[j].abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationOptions {
    pub degree: usize,
    /// Length of the unloaded window at the start of a trace, s.
    pub zero_window_s: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            degree: DEGREE,
            zero_window_s: 1.0,
        }
    }
}

/// Mean linearized gap over the samples in the first `window` seconds.
fn window_mean(samples: &[RawSample], window: f64, gaps: &[[f64; 6]]) -> Result<[f64; 6]> {
    let t0 = samples.first().map(|s| s.t).ok_or(Error::Underdetermined { needed: 1, got: 0 })?;
    let mut sum = [0.0; 6];
    let mut n = 0usize;
    for (s, g) in samples.iter().zip(gaps) {
        if s.t - t0 >= window {
            break;
        }
        for (a, b) in sum.iter_mut().zip(g) {
            *a += b;
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Underdetermined { needed: 1, got: 0 });
    }
    Ok(sum.map(|x| x / n as f64))
}

/// The fitted pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub channels: Vec<PolyModel>,
    pub decoupling: DecouplingModel,
    /// Linearized gap of each channel with no load, mm.
    pub zero_offset: [f64; 6],
    pub options: CalibrationOptions,
}

impl CalibrationModel {
    /// Fit the channel polynomials from `sweep` and the decoupling map from
    /// the referenced samples of `trace`.
    pub fn fit(sweep: &[SweepPoint], trace: &[RawSample], options: CalibrationOptions) -> Result<Self> {
        let mut channels = Vec::with_capacity(6);
        for ch in 0..6 {
            let (v, d): (Vec<f64>, Vec<f64>) = sweep
                .iter()
                .filter(|p| p.channel == ch)
                .map(|p| (p.v, p.gap_mm))
                .unzip();
            channels.push(fit_photocoupler_poly(&v, &d, options.degree)?);
        }
        let mut model = Self {
            channels,
            decoupling: DecouplingModel {
                matrix: [[0.0; 6]; 6],
                excitation_condition: f64::INFINITY,
                residual_rms: [0.0; 6],
                samples: 0,
            },
            zero_offset: [0.0; 6],
            options,
        };

        let gaps = model.linearize_trace(trace);
        model.zero_offset = window_mean(trace, options.zero_window_s, &gaps)?;
        let (ds, ws): (Vec<[f64; 6]>, Vec<Wrench>) = trace
            .iter()
            .zip(&gaps)
            .filter_map(|(s, g)| {
                s.reference
                    .map(|w| (std::array::from_fn(|i| g[i] - model.zero_offset[i]), w))
            })
            .unzip();
        model.decoupling = fit_decoupling(&ds, &ws)?;
        Ok(model)
    }

    fn linearize_trace(&self, trace: &[RawSample]) -> Vec<[f64; 6]> {
        trace
            .iter()
            .map(|s| std::array::from_fn(|i| self.channels[i].eval_lenient(s.v[i]).0))
            .collect()
    }

    /// Re-zero on the unloaded window at the start of `trace`.
    pub fn tare(&mut self, trace: &[RawSample]) -> Result<()> {
        let gaps = self.linearize_trace(trace);
        self.zero_offset = window_mean(trace, self.options.zero_window_s, &gaps)?;
        Ok(())
    }

    /// Wrench for one voltage vector; errors if any channel extrapolates.
    pub fn reconstruct(&self, v: &[f64; 6]) -> Result<Wrench> {
        let mut d = [0.0; 6];
        for i in 0..6 {
            d[i] = self.channels[i].eval(v[i])? - self.zero_offset[i];
        }
        Ok(self.decoupling.apply(&d))
    }

    /// Wrench for one voltage vector and whether any channel extrapolated.
    pub fn reconstruct_lenient(&self, v: &[f64; 6]) -> (Wrench, bool) {
        let mut d = [0.0; 6];
        let mut flagged = false;
        for i in 0..6 {
            let (g, f) = self.channels[i].eval_lenient(v[i]);
            d[i] = g - self.zero_offset[i];
            flagged |= f;
        }
        (self.decoupling.apply(&d), flagged)
    }

    /// Reconstruct every sample; also returns the number of samples with an
    /// extrapolated channel.
    pub fn reconstruct_trace(&self, trace: &[RawSample]) -> (Vec<Wrench>, usize) {
        let mut flagged = 0;
        let out = trace
            .iter()
            .map(|s| {
                let (w, f) = self.reconstruct_lenient(&s.v);
                flagged += usize::from(f);
                w
            })
            .collect();
        (out, flagged)
    }
}

/// `w = M·(poly(v) − zero)` for one sample.
pub fn reconstruct_wrench(
    polys: &[PolyModel],
    dec: &DecouplingModel,
    zero_offset: &[f64; 6],
    s: &RawSample,
) -> Result<Wrench> {
    let mut d = [0.0; 6];
    for i in 0..6 {
        d[i] = polys[i].eval(s.v[i])? - zero_offset[i];
    }
    Ok(dec.apply(&d))
}

/// Mean reconstructed wrench over the last `window_s` seconds of `trace`
/// after taring on its first window: the offset the trace ends with.
pub fn final_offset(model: &CalibrationModel, trace: &[RawSample], window_s: f64) -> Result<Wrench> {
    let mut m = model.clone();
    m.tare(trace)?;
    let t_end = trace.last().map(|s| s.t).ok_or(Error::Underdetermined { needed: 1, got: 0 })?;
    let mut sum = [0.0; 6];
    let mut n = 0usize;
    for s in trace.iter().rev().take_while(|s| t_end - s.t < window_s) {
        let w = m.reconstruct_lenient(&s.v).0.to_array();
        for (a, b) in sum.iter_mut().zip(w) {
            *a += b;
        }
        n += 1;
    }
    Ok(Wrench::from_array(sum.map(|x| x / n as f64)))
}

/// Predicted and reference wrench of the referenced samples of a trace.
pub fn paired_series(model: &CalibrationModel, trace: &[RawSample]) -> (Vec<Wrench>, Vec<Wrench>) {
    trace
        .iter()
        .filter_map(|s| s.reference.map(|r| (model.reconstruct_lenient(&s.v).0, r)))
        .unzip()
}
