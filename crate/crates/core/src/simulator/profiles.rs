//! Load profiles: calibration ramps and a legged-gait pattern with impacts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::sensitivity::Wrench;
use crate::{Error, Result};

/// Sampled wrench history.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadProfile {
    pub t: Vec<f64>,
    pub w: Vec<Wrench>,
    /// Sample indices of foot-strike impacts.
    pub events: Vec<usize>,
    /// Impact peak relative to the steady stance load; 1 without impacts.
    pub impact_factor: f64,
}

impl LoadProfile {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Multiply every wrench by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        for w in &mut out.w {
            *w = Wrench::from_array(w.to_array().map(|x| x * k));
        }
        out
    }

    fn push(&mut self, dt: f64, w: Wrench) {
        let t = self.t.len() as f64 * dt;
        self.t.push(t);
        self.w.push(w);
    }
}

fn check_rate(rate_hz: f64) -> Result<f64> {
    if !(rate_hz > 0.0 && rate_hz.is_finite()) {
        return Err(Error::InvalidConfig("sample rate must be positive".into()));
    }
    Ok(1.0 / rate_hz)
}

/// Rest, then for each axis in turn `0 → +A → 0 → −A → 0` with straight
/// legs of `leg_s` seconds, then rest again.
pub fn static_ramp(amplitude: [f64; 6], rate_hz: f64, rest_s: f64, leg_s: f64) -> Result<LoadProfile> {
    let dt = check_rate(rate_hz)?;
    if !(leg_s > 0.0 && rest_s >= 0.0) {
        return Err(Error::InvalidConfig("ramp legs must be positive".into()));
    }
    let rest = (rest_s * rate_hz).round() as usize;
    let leg = ((leg_s * rate_hz).round() as usize).max(1);
    let mut p = LoadProfile {
        impact_factor: 1.0,
        ..Default::default()
    };
    for _ in 0..rest {
        p.push(dt, Wrench::default());
    }
    for (j, a) in amplitude.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        for (from, to) in [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)] {
            for i in 0..leg {
                let s = from + (to - from) * i as f64 / leg as f64;
                p.push(dt, Wrench::axis(j, a * s));
            }
        }
    }
    for _ in 0..rest.max(1) {
        p.push(dt, Wrench::default());
    }
    Ok(p)
}

/// Stepping pattern: a square-ish stance wave with raised-cosine edges and a
/// half-sine impact of `impact_factor × stance` at each foot strike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitSpec {
    /// Steps per second.
    pub step_hz: f64,
    /// Stance fraction of a step period.
    pub duty: f64,
    /// Edge length as a fraction of the period.
    pub edge: f64,
    /// Steady stance wrench.
    pub stance: Wrench,
    /// Impact peak relative to the stance load.
    pub impact_factor: f64,
    /// Impact duration, s.
    pub impact_s: f64,
}

impl Default for GaitSpec {
    fn default() -> Self {
        Self {
            step_hz: 2.0,
            duty: 0.5,
            edge: 0.1,
            stance: Wrench {
                fx: 20.0,
                fy: 10.0,
                fz: 150.0,
                mx: 0.5,
                my: 0.8,
                mz: 0.1,
            },
            impact_factor: 2.5,
            impact_s: 0.04,
        }
    }
}

/// `rest_s` unloaded, `duration_s` of stepping, `rest_s` unloaded.
pub fn gait(spec: &GaitSpec, duration_s: f64, rate_hz: f64, rest_s: f64) -> Result<LoadProfile> {
    let dt = check_rate(rate_hz)?;
    if !(duration_s > 0.0 && spec.step_hz > 0.0 && spec.duty > 0.0 && spec.duty <= 1.0) {
        return Err(Error::InvalidConfig("gait needs positive duration, rate and duty".into()));
    }
    if !(spec.edge >= 0.0 && 2.0 * spec.edge <= spec.duty && spec.impact_s >= 0.0) {
        return Err(Error::InvalidConfig("gait edges longer than the stance".into()));
    }
    let rest = (rest_s * rate_hz).round() as usize;
    let n = (duration_s * rate_hz).round() as usize;
    let period = 1.0 / spec.step_hz;
    let stance = spec.stance.to_array();
    let mut p = LoadProfile {
        impact_factor: spec.impact_factor,
        ..Default::default()
    };
    for _ in 0..rest {
        p.push(dt, Wrench::default());
    }
    let mut last_step = usize::MAX;
    for i in 0..n {
        let tau = i as f64 * dt;
        let step = (tau / period).floor() as usize;
        let phase = tau / period - step as f64;
        let level = if phase >= spec.duty {
            0.0
        } else if spec.edge > 0.0 && phase < spec.edge {
            0.5 - 0.5 * (PI * phase / spec.edge).cos()
        } else if spec.edge > 0.0 && phase > spec.duty - spec.edge {
            0.5 - 0.5 * (PI * (spec.duty - phase) / spec.edge).cos()
        } else {
            1.0
        };
        let since_strike = phase * period;
        let spike = if spec.impact_s > 0.0 && phase < spec.duty && since_strike < spec.impact_s {
            spec.impact_factor * (PI * since_strike / spec.impact_s).sin()
        } else {
            0.0
        };
        if step != last_step {
            p.events.push(p.t.len());
            last_step = step;
        }
        p.push(dt, Wrench::from_array(stance.map(|s| s * level.max(spike))));
    }
    for _ in 0..rest.max(1) {
        p.push(dt, Wrench::default());
    }
    Ok(p)
}
