//! Error battery: percentage error, RMSE, nonlinearity, hysteresis,
//! crosstalk and resolution steps.
//!
//! Percentages are of the per-axis full scale passed by the caller.

use serde::{Deserialize, Serialize};

use super::SensingRange;
use crate::sensitivity::{Mat6, Wrench};
use crate::{Error, Result};

/// Reference moves smaller than this fraction of full scale do not turn a
/// ramp around.
pub const DEADBAND_FRAC: f64 = 0.005;

/// Number of load bins used to pair loading and unloading samples.
pub const HYSTERESIS_BINS: usize = 20;

/// Relative slack for `floor` so that exact quotients such as 5/0.008 are
/// not lost to representation error.
const STEP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisError {
    pub mean_pct: f64,
    pub std_pct: f64,
    /// Largest absolute percentage error.
    pub max_pct: f64,
    /// Native units (N or N·m).
    pub rmse: f64,
    pub nonlinearity_pct: f64,
    pub hysteresis_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub axes: [AxisError; 6],
    pub full_scale: [f64; 6],
    pub samples: usize,
}

impl ErrorReport {
    pub fn max_pct(&self) -> f64 {
        self.axes.iter().fold(0.0, |a, e| a.max(e.max_pct))
    }
}

/// One monotone stretch of a reference signal, `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    pub start: usize,
    pub end: usize,
    /// `|ref|` grows along the piece.
    pub loading: bool,
}

fn check_len(pred: &[Wrench], refs: &[Wrench]) -> Result<()> {
    if pred.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: refs.len(),
        });
    }
    Ok(())
}

/// Split `x` into monotone pieces.
///
/// Turning points are found with a deadband of `db`; each run is trimmed of
/// leading samples that make no progress and cut where it crosses zero, so
/// every piece either moves away from zero (loading) or toward it.
pub fn monotone_pieces(x: &[f64], db: f64) -> Vec<Piece> {
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    if x.len() < 2 {
        return Vec::new();
    }
    let mut start = 0;
    let mut ext = 0;
    let mut dir = 0.0;
    for i in 1..x.len() {
        if dir == 0.0 {
            if (x[i] - x[start]).abs() > db {
                dir = (x[i] - x[start]).signum();
                ext = i;
            }
            continue;
        }
        if (x[i] - x[ext]) * dir >= 0.0 {
            ext = i;
        } else if (x[ext] - x[i]) * dir > db {
            runs.push((start, ext, dir));
            start = ext;
            ext = i;
            dir = -dir;
        }
    }
    if dir != 0.0 {
        runs.push((start, ext, dir));
    }

    let mut out = Vec::new();
    for (mut s, e, dir) in runs {
        while s < e && (x[s + 1] - x[s]) * dir <= 0.0 {
            s += 1;
        }
        let mut a = s;
        for i in s..e {
            // Cut at a sign change; the zero-side sample opens the next piece.
            if x[i] != 0.0 && x[i + 1] != 0.0 && x[i].signum() != x[i + 1].signum() {
                push_piece(&mut out, x, a, i);
                a = i + 1;
            } else if x[i + 1] == 0.0 && i + 1 < e {
                push_piece(&mut out, x, a, i + 1);
                a = i + 1;
            }
        }
        push_piece(&mut out, x, a, e);
    }
    out
}

fn push_piece(out: &mut Vec<Piece>, x: &[f64], start: usize, end: usize) {
    if end > start {
        out.push(Piece {
            start,
            end,
            loading: x[end].abs() > x[start].abs(),
        });
    }
}

/// Largest deviation from the endpoint line over loading pieces, in the
/// units of `pred`.
fn nonlinearity(pred: &[f64], refs: &[f64], pieces: &[Piece], min_span: f64) -> f64 {
    let mut worst = 0.0f64;
    for p in pieces.iter().filter(|p| p.loading) {
        let (r0, r1) = (refs[p.start], refs[p.end]);
        if (r1 - r0).abs() < min_span {
            continue;
        }
        let (y0, y1) = (pred[p.start], pred[p.end]);
        let slope = (y1 - y0) / (r1 - r0);
        for i in p.start..=p.end {
            worst = worst.max((pred[i] - (y0 + slope * (refs[i] - r0))).abs());
        }
    }
    worst
}

/// Largest gap between mean unloading and mean loading error at equal
/// reference load.
fn hysteresis(pred: &[f64], refs: &[f64], pieces: &[Piece]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pieces {
        for &r in &refs[p.start..=p.end] {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if !(hi > lo) {
        return 0.0;
    }
    let width = (hi - lo) / HYSTERESIS_BINS as f64;
    // (sum, count) of the error for loading and unloading samples per bin.
    let mut acc = [[(0.0, 0usize); 2]; HYSTERESIS_BINS];
    for p in pieces {
        let side = usize::from(!p.loading);
        for i in p.start..=p.end {
            let b = (((refs[i] - lo) / width) as usize).min(HYSTERESIS_BINS - 1);
            acc[b][side].0 += pred[i] - refs[i];
            acc[b][side].1 += 1;
        }
    }
    acc.iter()
        .filter(|b| b[0].1 > 0 && b[1].1 > 0)
        .map(|b| (b[1].0 / b[1].1 as f64 - b[0].0 / b[0].1 as f64).abs())
        .fold(0.0, f64::max)
}

/// Per-axis error statistics of `pred` against `refs`.
pub fn error_metrics(pred: &[Wrench], refs: &[Wrench], full_scale: &[f64; 6]) -> Result<ErrorReport> {
    check_len(pred, refs)?;
    let n = pred.len();
    if n == 0 {
        return Err(Error::Underdetermined { needed: 1, got: 0 });
    }
    let mut axes = [AxisError::default(); 6];
    for (j, out) in axes.iter_mut().enumerate() {
        let fs = full_scale[j];
        let p: Vec<f64> = pred.iter().map(|w| w.to_array()[j]).collect();
        let r: Vec<f64> = refs.iter().map(|w| w.to_array()[j]).collect();
        let pct: Vec<f64> = p.iter().zip(&r).map(|(a, b)| (a - b) / fs * 100.0).collect();
        let mean = pct.iter().sum::<f64>() / n as f64;
        let var = pct.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n as f64;
        let sq = p.iter().zip(&r).map(|(a, b)| (a - b).powi(2)).sum::<f64>();

        let pieces = monotone_pieces(&r, DEADBAND_FRAC * fs);
        out.mean_pct = mean;
        out.std_pct = var.sqrt();
        out.max_pct = pct.iter().fold(0.0, |a, e| a.max(e.abs()));
        out.rmse = (sq / n as f64).sqrt();
        out.nonlinearity_pct = nonlinearity(&p, &r, &pieces, 10.0 * DEADBAND_FRAC * fs) / fs * 100.0;
        out.hysteresis_pct = hysteresis(&p, &r, &pieces) / fs * 100.0;
    }
    Ok(ErrorReport {
        axes,
        full_scale: *full_scale,
        samples: n,
    })
}

/// The single axis carrying load in each sample, if exactly one does.
pub fn label_excitation(refs: &[Wrench], full_scale: &[f64; 6]) -> Vec<Option<usize>> {
    refs.iter()
        .map(|w| {
            let a = w.to_array();
            let mut active = (0..6).filter(|j| a[*j].abs() > DEADBAND_FRAC * full_scale[*j]);
            match (active.next(), active.next()) {
                (Some(j), None) => Some(j),
                _ => None,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CrosstalkAxis {
    /// Largest off-axis output while another axis is excited, % of this
    /// axis's full scale.
    pub max_pct: f64,
    /// RMS of that output, native units.
    pub rms: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkReport {
    /// `matrix_pct[excited][output]`; the diagonal is zero.
    pub matrix_pct: Mat6,
    pub axes: [CrosstalkAxis; 6],
}

/// Off-axis response under single-axis excitation.
///
/// `excited[i]` names the loaded axis of sample `i`; unlabeled samples are
/// skipped. The response is `pred − ref` on the output axis.
pub fn crosstalk_metrics(
    pred: &[Wrench],
    refs: &[Wrench],
    excited: &[Option<usize>],
    full_scale: &[f64; 6],
) -> Result<CrosstalkReport> {
    check_len(pred, refs)?;
    if excited.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: excited.len(),
        });
    }
    let mut matrix_pct: Mat6 = [[0.0; 6]; 6];
    let mut sq = [0.0f64; 6];
    let mut axes = [CrosstalkAxis::default(); 6];
    for ((p, r), e) in pred.iter().zip(refs).zip(excited) {
        let Some(e) = *e else { continue };
        let (p, r) = (p.to_array(), r.to_array());
        for k in (0..6).filter(|k| *k != e) {
            let v = p[k] - r[k];
            let pct = v.abs() / full_scale[k] * 100.0;
            matrix_pct[e][k] = matrix_pct[e][k].max(pct);
            axes[k].max_pct = axes[k].max_pct.max(pct);
            sq[k] += v * v;
            axes[k].samples += 1;
        }
    }
    for (a, s) in axes.iter_mut().zip(sq) {
        if a.samples > 0 {
            a.rms = (s / a.samples as f64).sqrt();
        }
    }
    Ok(CrosstalkReport { matrix_pct, axes })
}

/// Distinguishable levels per axis: `floor(span / resolution)`.
pub fn resolution_steps(range: &SensingRange, resolution: &[f64; 6]) -> Result<[u64; 6]> {
    let mut out = [0; 6];
    for (j, o) in out.iter_mut().enumerate() {
        let res = resolution[j];
        if !(res > 0.0 && res.is_finite()) {
            return Err(Error::InvalidConfig(format!("resolution for {} must be positive", Wrench::AXES[j])));
        }
        *o = (range.span(j) / res * (1.0 + STEP_EPS)).floor() as u64;
    }
    Ok(out)
}
