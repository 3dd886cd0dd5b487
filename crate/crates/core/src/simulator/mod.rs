//! Synthetic photocoupler traces.
//!
//! A wrench history is pushed through `G`, the gaps through a monotone
//! optical response, then Gaussian noise and 16-bit quantization are added.
//! Optional hysteresis and impact-driven drift act on the wrench the
//! elastomer sees; the reference column always carries the applied wrench.

mod optics;
mod profiles;

pub use optics::{quantization_step, quantize, OpticalResponse, ADC_BITS, V_MAX};
pub use profiles::{gait, static_ramp, GaitSpec, LoadProfile};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::beam_model::LoadEnvelope;
use crate::calibration::{RawSample, SweepPoint};
use crate::reference::DriftPreset;
use crate::sensitivity::{GMatrix, Wrench};
use crate::{Error, Result};

// Independent random streams per purpose.
const TRACE_STREAM: u64 = 1;
const SWEEP_STREAM: u64 = 2;

/// Offset accumulated at each foot strike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftModel {
    /// Offset reached after `reference_events` strikes at `reference_impact`,
    /// % of full scale per axis.
    pub total_pct_fs: [f64; 6],
    /// Strikes over which the total builds up; the profile's own strike
    /// count if absent.
    pub reference_events: Option<usize>,
    /// Impact factor at which the total is reached; the per-strike offset
    /// scales with the profile's impact factor over this value.
    pub reference_impact: f64,
}

impl Default for DriftModel {
    fn default() -> Self {
        Self {
            total_pct_fs: [0.0; 6],
            reference_events: None,
            reference_impact: 2.5,
        }
    }
}

impl DriftModel {
    pub fn from_preset(p: &DriftPreset) -> Self {
        let [fx, fy, fz] = p.offset_pct;
        Self {
            total_pct_fs: [fx, fy, fz, 0.0, 0.0, 0.0],
            ..Self::default()
        }
    }

    /// Wrench offset added per strike.
    pub fn per_event(&self, full_scale: &[f64; 6], profile: &LoadProfile) -> [f64; 6] {
        let events = self.reference_events.unwrap_or(profile.events.len()).max(1) as f64;
        let k = profile.impact_factor / self.reference_impact;
        std::array::from_fn(|j| self.total_pct_fs[j] / 100.0 * full_scale[j] / events * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub optics: [OpticalResponse; 6],
    /// Signal-to-noise ratio in dB against each channel's swing under the
    /// rated envelope; no noise if absent.
    pub snr_db: Option<f64>,
    pub quantize: bool,
    /// ADC conversions averaged into one output sample; noise and
    /// quantization apply per conversion.
    pub oversample: usize,
    pub envelope: LoadEnvelope,
    /// Extra load on unloading, `H·FS·4x(1−x)` with `x` the load over its
    /// peak, % of full scale per axis.
    pub hysteresis_pct: [f64; 6],
    pub drift: DriftModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            optics: OpticalResponse::default_set(),
            snr_db: Some(60.0),
            quantize: true,
            // 5 kHz conversions reported at 100 Hz.
            oversample: 50,
            envelope: LoadEnvelope::default(),
            hysteresis_pct: [0.0; 6],
            drift: DriftModel::default(),
        }
    }
}

impl SimConfig {
    /// Noise-free, unquantized.
    pub fn ideal() -> Self {
        Self {
            snr_db: None,
            quantize: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for o in &self.optics {
            o.validate()?;
        }
        if let Some(s) = self.snr_db {
            if !s.is_finite() {
                return Err(Error::InvalidConfig("snr_db must be finite".into()));
            }
        }
        if self.oversample == 0 {
            return Err(Error::InvalidConfig("oversample must be at least 1".into()));
        }
        if !(self.drift.reference_impact > 0.0) {
            return Err(Error::InvalidConfig("drift.reference_impact must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub samples: Vec<RawSample>,
    /// Samples where some gap left its window and was clipped.
    pub clipped: Vec<bool>,
    /// Noise standard deviation per conversion and channel, V.
    pub noise_sigma: [f64; 6],
}

impl SimTrace {
    pub fn clipped_count(&self) -> usize {
        self.clipped.iter().filter(|c| **c).count()
    }

    pub fn references(&self) -> Vec<Wrench> {
        self.samples.iter().filter_map(|s| s.reference).collect()
    }
}

fn apply_g(g: &GMatrix, w: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| g.entries[i].iter().zip(w).map(|(a, b)| a * b).sum())
}

/// Mean of `cfg.oversample` noisy, quantized conversions of `clean`.
fn convert(clean: f64, sigma: f64, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> f64 {
    if sigma == 0.0 {
        // Every conversion is identical; averaging would only add rounding.
        return if cfg.quantize { quantize(clean) } else { clean };
    }
    let mut sum = 0.0;
    for _ in 0..cfg.oversample {
        let n: f64 = StandardNormal.sample(rng);
        let v = clean + sigma * n;
        sum += if cfg.quantize { quantize(v) } else { v };
    }
    sum / cfg.oversample as f64
}

/// Noise σ per conversion and channel: the half-swing of the channel voltage over the
/// rated envelope corners, divided by the amplitude ratio of `snr_db`.
pub fn channel_noise_sigma(g: &GMatrix, cfg: &SimConfig) -> [f64; 6] {
    let Some(snr) = cfg.snr_db else {
        return [0.0; 6];
    };
    let fs = cfg.envelope.per_axis();
    std::array::from_fn(|i| {
        let o = &cfg.optics[i];
        let reach_mm: f64 = g.entries[i].iter().zip(&fs).map(|(a, f)| (a * f).abs()).sum::<f64>() * 1e3;
        let lo = (o.nominal_gap - reach_mm).max(o.window[0]);
        let hi = (o.nominal_gap + reach_mm).min(o.window[1]);
        0.5 * (o.voltage(lo) - o.voltage(hi)).abs() / 10f64.powf(snr / 20.0)
    })
}

/// Voltage trace for `profile`, deterministic in `seed`.
pub fn simulate_trace(g: &GMatrix, profile: &LoadProfile, cfg: &SimConfig, seed: u64) -> Result<SimTrace> {
    cfg.validate()?;
    let fs = cfg.envelope.per_axis();
    let sigma = channel_noise_sigma(g, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TRACE_STREAM);

    let mut peak = [0.0f64; 6];
    for w in &profile.w {
        for (p, x) in peak.iter_mut().zip(w.to_array()) {
            *p = p.max(x.abs());
        }
    }
    let per_event = cfg.drift.per_event(&fs, profile);
    let mut offset = [0.0; 6];
    let mut next_event = 0;

    let mut samples = Vec::with_capacity(profile.len());
    let mut clipped = Vec::with_capacity(profile.len());
    for k in 0..profile.len() {
        while next_event < profile.events.len() && profile.events[next_event] <= k {
            for (o, d) in offset.iter_mut().zip(&per_event) {
                *o += d;
            }
            next_event += 1;
        }
        let w = profile.w[k].to_array();
        let prev = if k > 0 { profile.w[k - 1].to_array() } else { w };
        let mut seen = w;
        for j in 0..6 {
            let h = cfg.hysteresis_pct[j];
            if h != 0.0 && peak[j] > 0.0 && w[j].abs() < prev[j].abs() {
                let x = w[j].abs() / peak[j];
                seen[j] += w[j].signum() * h / 100.0 * fs[j] * 4.0 * x * (1.0 - x);
            }
            seen[j] += offset[j];
        }
        let d = apply_g(g, &seen);
        let mut v = [0.0; 6];
        let mut clip = false;
        for i in 0..6 {
            let o = &cfg.optics[i];
            let mut gap = o.nominal_gap + d[i] * 1e3;
            if gap < o.window[0] || gap > o.window[1] {
                gap = gap.clamp(o.window[0], o.window[1]);
                clip = true;
            }
            v[i] = convert(o.voltage(gap), sigma[i], cfg, &mut rng);
        }
        samples.push(RawSample {
            t: profile.t[k],
            v,
            reference: Some(profile.w[k]),
        });
        clipped.push(clip);
    }
    Ok(SimTrace {
        samples,
        clipped,
        noise_sigma: sigma,
    })
}

/// Bench sweep: `points` gaps evenly spread over each channel's window with
/// the measured voltage, noise and quantization as in [`simulate_trace`].
pub fn sweep(g: &GMatrix, cfg: &SimConfig, points: usize, seed: u64) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    if points < 2 {
        return Err(Error::InvalidConfig("a sweep needs at least two points".into()));
    }
    let sigma = channel_noise_sigma(g, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SWEEP_STREAM);
    let mut out = Vec::with_capacity(6 * points);
    for (ch, o) in cfg.optics.iter().enumerate() {
        let [lo, hi] = o.window;
        for i in 0..points {
            let gap = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            let v = convert(o.voltage(gap), sigma[ch], cfg, &mut rng);
            out.push(SweepPoint { channel: ch, v, gap_mm: gap });
        }
    }
    Ok(out)
}

/// The same walk seen by a drifting sensor and by one without drift. Both
/// use the same noise draw, so their difference is the drift alone.
pub fn drift_scenario(
    g: &GMatrix,
    profile: &LoadProfile,
    drift: &DriftModel,
    cfg: &SimConfig,
    seed: u64,
) -> Result<(SimTrace, SimTrace)> {
    let drifting = SimConfig { drift: *drift, ..*cfg };
    let stable = SimConfig {
        drift: DriftModel::default(),
        ..*cfg
    };
    Ok((
        simulate_trace(g, profile, &drifting, seed)?,
        simulate_trace(g, profile, &stable, seed)?,
    ))
}
