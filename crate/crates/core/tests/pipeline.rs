//! Simulator-driven checks of the calibration pipeline.

use ftkit::beam_model::{LoadEnvelope, MaterialSpec};
use ftkit::calibration::{
    crosstalk_metrics, error_metrics, final_offset, fit_photocoupler_poly, label_excitation,
    paired_series, CalibrationModel, CalibrationOptions, DEGREE,
};
use ftkit::reference::{drift_preset, SELECTED_DESIGN};
use ftkit::sensitivity::{evaluate_design, GMatrix, Wrench};
use ftkit::simulator::{
    drift_scenario, gait, simulate_trace, static_ramp, sweep, DriftModel, GaitSpec, LoadProfile,
    SimConfig,
};

const FS: [f64; 6] = [520.0, 520.0, 520.0, 15.6, 15.6, 15.6];

fn g() -> GMatrix {
    let env = LoadEnvelope::default();
    evaluate_design(&SELECTED_DESIGN.params(), &MaterialSpec::default(), &env, Default::default())
        .unwrap()
        .g
}

fn calibrated(g: &GMatrix, cfg: &SimConfig) -> CalibrationModel {
    let prof = static_ramp(FS, 100.0, 1.0, 4.0).unwrap();
    let sw = sweep(g, cfg, 2001, 11).unwrap();
    let cal = simulate_trace(g, &prof, cfg, 12).unwrap();
    CalibrationModel::fit(&sw, &cal.samples, CalibrationOptions::default()).unwrap()
}

/// Rest, then `level` held on one axis, then rest.
fn hold(axis: usize, level: f64) -> LoadProfile {
    let mut p = LoadProfile {
        impact_factor: 1.0,
        ..Default::default()
    };
    for i in 0..400 {
        p.t.push(i as f64 * 0.01);
        let v = if (100..300).contains(&i) { level } else { 0.0 };
        p.w.push(Wrench::axis(axis, v));
    }
    p
}

fn mean_over(w: &[Wrench], range: std::ops::Range<usize>) -> [f64; 6] {
    let n = range.len() as f64;
    let mut s = [0.0; 6];
    for x in &w[range] {
        for (a, b) in s.iter_mut().zip(x.to_array()) {
            *a += b / n;
        }
    }
    s
}

#[test]
fn sweep_fit_residual_is_small() {
    let g = g();
    let sw = sweep(&g, &SimConfig { oversample: 1, ..SimConfig::default() }, 2001, 3).unwrap();
    for ch in 0..6 {
        let (v, d): (Vec<f64>, Vec<f64>) =
            sw.iter().filter(|p| p.channel == ch).map(|p| (p.v, p.gap_mm)).unzip();
        let m = fit_photocoupler_poly(&v, &d, DEGREE).unwrap();
        // 1 % of the 1 mm range.
        assert!(m.residual_rms < 0.01, "channel {ch}: {}", m.residual_rms);
        for (vi, di) in v.iter().zip(&d) {
            assert!((m.eval(*vi).unwrap() - di).abs() < 0.01);
        }
    }
}

#[test]
fn calibration_recovers_wrench() {
    let g = g();
    let cfg = SimConfig::default();
    let mut model = calibrated(&g, &cfg);
    assert!(model.decoupling.excitation_condition.is_finite());
    let val = simulate_trace(&g, &static_ramp(FS, 100.0, 1.0, 4.0).unwrap(), &cfg, 13).unwrap();
    model.tare(&val.samples).unwrap();
    let (p, r) = paired_series(&model, &val.samples);
    let rep = error_metrics(&p, &r, &FS).unwrap();
    for (j, a) in rep.axes.iter().enumerate() {
        assert!(a.rmse < 0.01 * FS[j], "axis {j}: {a:?}");
        assert!(a.max_pct >= a.mean_pct.abs());
    }

    let lab = label_excitation(&r, &FS);
    let c = crosstalk_metrics(&p, &r, &lab, &FS).unwrap();
    assert!(c.axes.iter().all(|a| a.samples > 0 && a.max_pct < 3.0), "{c:?}");
}

#[test]
fn unloaded_and_step_reconstruction() {
    let g = g();
    let cfg = SimConfig::default();
    let model = calibrated(&g, &cfg);
    let t = simulate_trace(&g, &hold(2, 400.0), &cfg, 21).unwrap();
    let mut m = model.clone();
    m.tare(&t.samples).unwrap();
    let (w, flagged) = m.reconstruct_trace(&t.samples);
    assert_eq!(flagged, 0);
    let rest = mean_over(&w, 0..100);
    for (j, x) in rest.iter().enumerate() {
        assert!(x.abs() < 0.001 * FS[j], "{rest:?}");
    }
    let step = mean_over(&w, 120..280);
    assert!((step[2] - 400.0).abs() < 0.005 * 400.0, "{step:?}");
    for j in [0, 1, 3, 4, 5] {
        assert!(step[j].abs() < 0.03 * FS[j], "axis {j}: {step:?}");
    }
}

#[test]
fn reconstruction_is_linear_in_load() {
    let g = g();
    let cfg = SimConfig::default();
    let model = calibrated(&g, &cfg);
    for axis in 0..6 {
        let level = 0.4 * FS[axis];
        let mut out = [0.0; 2];
        for (k, scale) in [1.0, 2.0].into_iter().enumerate() {
            let t = simulate_trace(&g, &hold(axis, level * scale), &cfg, 30 + axis as u64).unwrap();
            let mut m = model.clone();
            m.tare(&t.samples).unwrap();
            out[k] = mean_over(&m.reconstruct_trace(&t.samples).0, 120..280)[axis];
        }
        let ratio = out[1] / out[0];
        assert!((ratio - 2.0).abs() < 0.01, "axis {axis}: {ratio}");
    }
}

#[test]
fn drift_presets_show_up_as_final_offsets() {
    let g = g();
    let cfg = SimConfig::default();
    let model = calibrated(&g, &cfg);
    let walk = gait(&GaitSpec::default(), 30.0, 100.0, 1.0).unwrap();
    let preset = drift_preset("commercial_lf").unwrap();
    let drift = DriftModel::from_preset(&preset);
    let (drifting, stable) = drift_scenario(&g, &walk, &drift, &cfg, 5).unwrap();
    let off = final_offset(&model, &drifting.samples, 1.0).unwrap().to_array();
    let base = final_offset(&model, &stable.samples, 1.0).unwrap().to_array();
    for j in 0..3 {
        let pct = off[j] / FS[j] * 100.0;
        assert!((pct - preset.offset_pct[j]).abs() < 0.05, "axis {j}: {pct}");
        assert!(base[j].abs() / FS[j] * 100.0 < 0.05, "axis {j}: {}", base[j]);
    }

    // Twice the impact, twice the offset.
    let mut hard = walk.clone();
    hard.impact_factor *= 2.0;
    let (d2, _) = drift_scenario(&g, &hard, &drift, &cfg, 5).unwrap();
    let off2 = final_offset(&model, &d2.samples, 1.0).unwrap().to_array();
    let (a, b) = (off[2] - base[2], off2[2] - base[2]);
    assert!((b / a - 2.0).abs() < 0.02, "{a} {b}");
}
