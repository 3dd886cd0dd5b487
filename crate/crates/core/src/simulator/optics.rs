//! Reflective photocoupler response: gap (mm) to output voltage.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// ADC reference voltage, V.
pub const V_MAX: f64 = 3.3;
pub const ADC_BITS: u32 = 16;

/// One ADC count, V.
pub fn quantization_step() -> f64 {
    V_MAX / ((1u64 << ADC_BITS) - 1) as f64
}

/// Round to the nearest ADC code, saturating at the rails.
pub fn quantize(v: f64) -> f64 {
    let q = quantization_step();
    let max_code = ((1u64 << ADC_BITS) - 1) as f64;
    (v / q).round().clamp(0.0, max_code) * q
}

/// `v(g) = v0 + a·exp(−g/λ) + b·g`, strictly decreasing on the window when
/// `a > 0` and `b <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalResponse {
    pub v0: f64,
    pub a: f64,
    /// Decay length, mm.
    pub lambda: f64,
    /// Linear term, V/mm.
    pub b: f64,
    /// Working gap interval, mm.
    pub window: [f64; 2],
    /// Gap with no load, mm.
    pub nominal_gap: f64,
}

impl OpticalResponse {
    /// Long-range channel with a 1 mm window.
    pub const fn vertical() -> Self {
        Self {
            v0: 0.25,
            a: 2.9,
            lambda: 0.45,
            b: -0.2,
            window: [0.1, 1.1],
            nominal_gap: 0.5,
        }
    }

    /// Short-range channel with a 0.5 mm window.
    pub const fn horizontal() -> Self {
        Self {
            v0: 0.25,
            a: 2.9,
            lambda: 0.25,
            b: -0.2,
            window: [0.05, 0.55],
            nominal_gap: 0.3,
        }
    }

    /// Three vertical then three horizontal channels.
    pub const fn default_set() -> [Self; 6] {
        let v = Self::vertical();
        let h = Self::horizontal();
        [v, v, v, h, h, h]
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.window;
        if !(self.lambda > 0.0 && lo < hi && lo >= 0.0) {
            return Err(Error::InvalidConfig("optics: need lambda > 0 and 0 <= lo < hi".into()));
        }
        if !(self.nominal_gap > lo && self.nominal_gap < hi) {
            return Err(Error::InvalidConfig("optics: nominal gap outside the window".into()));
        }
        // The slope is increasing in g, so its value at `hi` bounds it.
        if !(self.slope(hi) < 0.0) {
            return Err(Error::InvalidConfig("optics: response not monotone on the window".into()));
        }
        let (vl, vh) = (self.voltage(lo), self.voltage(hi));
        if !(vh >= 0.0 && vl <= V_MAX) {
            return Err(Error::InvalidConfig("optics: response leaves the ADC range".into()));
        }
        Ok(())
    }

    pub fn voltage(&self, g: f64) -> f64 {
        self.v0 + self.a * (-g / self.lambda).exp() + self.b * g
    }

    /// dv/dg, V/mm.
    pub fn slope(&self, g: f64) -> f64 {
        -self.a / self.lambda * (-g / self.lambda).exp() + self.b
    }

    /// Gap producing voltage `v` inside the window.
    pub fn gap(&self, v: f64) -> Result<f64> {
        let [mut lo, mut hi] = self.window;
        let (vmax, vmin) = (self.voltage(lo), self.voltage(hi));
        if !(v >= vmin && v <= vmax) {
            return Err(Error::DomainExceeded { value: v, lo: vmin, hi: vmax });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.voltage(mid) > v {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        let mut g = 0.5 * (lo + hi);
        for _ in 0..3 {
            g -= (self.voltage(g) - v) / self.slope(g);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_decreasing() {
        for o in [OpticalResponse::vertical(), OpticalResponse::horizontal()] {
            o.validate().unwrap();
            let [lo, hi] = o.window;
            let mut last = f64::INFINITY;
            for i in 0..=1000 {
                let v = o.voltage(lo + (hi - lo) * i as f64 / 1000.0);
                assert!(v < last);
                last = v;
            }
        }
    }

    #[test]
    fn inverse_is_accurate() {
        for o in [OpticalResponse::vertical(), OpticalResponse::horizontal()] {
            let [lo, hi] = o.window;
            for i in 0..=200 {
                let g = lo + (hi - lo) * i as f64 / 200.0;
                assert!((o.gap(o.voltage(g)).unwrap() - g).abs() < 1e-9);
            }
            assert!(o.gap(o.voltage(hi) - 0.01).is_err());
        }
    }

    #[test]
    fn quantization() {
        let q = quantization_step();
        assert_eq!(q, 3.3 / 65535.0);
        assert_eq!(quantize(-1.0), 0.0);
        assert_eq!(quantize(10.0), 65535.0 * q);
        let v = quantize(1.234567);
        assert!((v - 1.234567).abs() <= 0.5 * q);
        assert!(((v / q).round() - v / q).abs() < 1e-6);
    }

    #[test]
    fn rising_response_rejected() {
        let o = OpticalResponse { b: 5.0, ..OpticalResponse::vertical() };
        assert!(o.validate().is_err());
    }
}
