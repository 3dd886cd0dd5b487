//! Subcommand bodies. Each returns the report bundle and the files to write;
//! nothing touches the filesystem except reading inputs, so output writing
//! happens once at the end of a run.

use std::path::Path;

use ftkit::beam_model::{derive_sections, unit_load_deformations, DesignParams};
use ftkit::calibration::{
    crosstalk_metrics, error_metrics, final_offset, label_excitation, paired_series, CalibrationModel,
    RawSample,
};
use ftkit::optimizer::{feasibility_with, global_search, reproduce_table, SensorOffset};
use ftkit::reference::{drift_preset, PUBLISHED_DESIGNS};
use ftkit::sensitivity::{evaluate_design, objective_value, ObjectiveId};
use ftkit::simulator::{
    channel_noise_sigma, drift_scenario, gait, simulate_trace, static_ramp, sweep, DriftModel, SimTrace,
};
use ftkit::trace_io::{read_sweep, read_trace, write_sweep, write_trace};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Scenario};
use crate::report::*;
use crate::{Cli, CliError, Command};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Infeasible design or missed error budget.
    Miss,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub bundle: ReportBundle,
    /// File name and contents, written under `--out`.
    pub files: Vec<(String, Vec<u8>)>,
    pub status: Status,
}

fn sha(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn bundle(command: &str, cfg: &RunConfig, payload: Payload) -> ReportBundle {
    ReportBundle {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance::new(command, cfg.hash(), cfg.seed),
        payload,
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::Miss
    }
}

/// Load the config and apply the global flags.
fn base_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(cli.global.config.as_deref())?;
    if let Some(s) = cli.global.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Evaluate { design, c } => {
            let mut cfg = base_config(cli)?;
            if let Some(v) = design {
                let x: [f64; 7] = v
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Input("--design takes exactly seven values".into()))?;
                cfg.design = DesignParams::from_variables(&x, cfg.design.rs1, cfg.design.c);
            }
            if let Some(c) = c {
                cfg.design.c = *c;
            }
            evaluate(cfg.resolve()?)
        }
        Command::Optimize {
            objective,
            table2,
            starts,
            c_frac,
        } => {
            let mut cfg = base_config(cli)?;
            if let Some(o) = objective {
                cfg.search.objective = o.parse::<ObjectiveId>()?;
            }
            if let Some(n) = starts {
                cfg.search.n_starts = *n;
            }
            if let Some(f) = c_frac {
                cfg.search.sensor_offset = SensorOffset::FracOfH(*f);
            }
            let cfg = cfg.resolve()?;
            if *table2 {
                table(cfg)
            } else {
                optimize(cfg)
            }
        }
        Command::Simulate { scenario } => {
            let mut cfg = base_config(cli)?;
            if let Some(s) = scenario {
                cfg.simulation.scenario = Scenario::parse(s)?;
            }
            simulate(cfg.resolve()?)
        }
        Command::Calibrate { sweep, trace, test } => calibrate(base_config(cli)?.resolve()?, sweep, trace, test),
        Command::Report { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            let b: ReportBundle = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: not a report bundle: {e}", input.display())))?;
            if b.schema_version != SCHEMA_VERSION {
                return Err(CliError::Input(format!(
                    "report schema version {} is not supported (expected {SCHEMA_VERSION})",
                    b.schema_version
                )));
            }
            Ok(Outcome {
                bundle: b,
                files: Vec::new(),
                status: Status::Ok,
            })
        }
    }
}

fn evaluate(cfg: RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.design;
    let e = evaluate_design(&p, &cfg.material, &cfg.envelope, cfg.search.normalization)?;
    let v = feasibility_with(&p, &cfg.material, &cfg.envelope, &cfg.search.bounds);
    let report = EvaluateReport {
        design: p,
        feasible: v.feasible,
        slacks: v.slacks,
        springs: e.springs,
        g: e.g.entries,
        normalization: e.gbar.reading,
        gbar: e.gbar.entries,
        metrics: e.metrics,
        objectives: ObjectiveId::ALL
            .iter()
            .map(|&id| ObjectiveValue {
                objective: id,
                value: objective_value(id, &e.metrics),
            })
            .collect(),
        deformations: unit_load_deformations(&e.sections, &p)?,
    };
    Ok(Outcome {
        status: status(report.feasible),
        bundle: bundle("evaluate", &cfg, Payload::Evaluate(report)),
        files: Vec::new(),
    })
}

fn csv_with_provenance(prov: &Provenance, header: &str, rows: &[String]) -> Vec<u8> {
    let mut s = String::new();
    for l in prov.lines() {
        s.push_str("# ");
        s.push_str(&l);
        s.push('\n');
    }
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s.into_bytes()
}

fn optimize(cfg: RunConfig) -> Result<Outcome, CliError> {
    let r = global_search(&cfg.search, &cfg.material, &cfg.envelope)?;
    let p = r.best.params;
    let d = unit_load_deformations(&derive_sections(&p, &cfg.material)?, &p)?;
    let report = OptimizeReport {
        objective: r.objective,
        objective_value: r.best.objective,
        design: p,
        feasible: r.best.feasible,
        metrics: r.best.metrics,
        slacks: r.best.violations.slacks.clone(),
        deformations: d,
        starts: r.history.len(),
        evaluations: r.evaluations,
    };
    let b = bundle("optimize", &cfg, Payload::Optimize(report));
    let mut rows = Vec::new();
    for (i, h) in r.history.iter().enumerate() {
        for (k, v) in h.best_so_far.iter().enumerate() {
            rows.push(format!("{i},{k},{v}"));
        }
    }
    let history = csv_with_provenance(&b.provenance, "start,step,best_so_far", &rows);
    Ok(Outcome {
        status: status(r.best.feasible),
        bundle: b,
        files: vec![("history.csv".into(), history)],
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn table(cfg: RunConfig) -> Result<Outcome, CliError> {
    let rows = reproduce_table(&ObjectiveId::ALL, &cfg.search, &cfg.material, &cfg.envelope);
    let entries: Vec<TableEntry> = rows
        .into_iter()
        .zip(PUBLISHED_DESIGNS.iter())
        .map(|(r, pubd)| TableEntry {
            objective: r.objective,
            design: r.params,
            cond: r.cond,
            objective_value: r.objective_value,
            deformations: r.deformations,
            feasible: r.feasible,
            evaluations: r.evaluations,
            error: r.error,
            published_variables: pubd.variables,
            published_cond: pubd.cond,
        })
        .collect();
    let all_ok = entries.iter().all(|e| e.feasible);
    let b = bundle("optimize --table2", &cfg, Payload::Table(TableReport { rows: entries.clone() }));
    let lines: Vec<String> = entries
        .iter()
        .map(|e| {
            let x = e.design.map(|d| d.variables().map(Some)).unwrap_or([None; 7]);
            let d = e.deformations.map(|d| d.as_array().map(Some)).unwrap_or([None; 4]);
            let cells: Vec<String> = std::iter::once(e.objective.name().to_string())
                .chain(x.iter().map(|v| opt(*v)))
                .chain([opt(e.cond)])
                .chain(d.iter().map(|v| opt(*v)))
                .chain([e.feasible.to_string(), e.published_cond.to_string()])
                .collect();
            cells.join(",")
        })
        .collect();
    let csv = csv_with_provenance(
        &b.provenance,
        "objective,l1,l2,b1,b2,h,r,rs2,cond,fz_100n_mm,fx_100n_mm,mz_1nm_mm,my_1nm_rad,feasible,published_cond",
        &lines,
    );
    Ok(Outcome {
        status: status(all_ok),
        bundle: b,
        files: vec![("table2.csv".into(), csv)],
    })
}

fn simulate(cfg: RunConfig) -> Result<Outcome, CliError> {
    let s = &cfg.simulation;
    let mut sim = s.sensor;
    sim.envelope = cfg.envelope;
    let g = evaluate_design(&cfg.design, &cfg.material, &cfg.envelope, cfg.search.normalization)?.g;
    let b0 = bundle("simulate", &cfg, Payload::Simulate(SimulateReport {
        scenario: String::new(),
        design: cfg.design,
        noise_sigma: [0.0; 6],
        clipped: 0,
        files: Vec::new(),
    }));
    let prov = b0.provenance.lines();

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut rows: Vec<usize> = Vec::new();
    let points = sweep(&g, &sim, s.sweep_points, cfg.seed)?;
    let mut buf = Vec::new();
    write_sweep(&mut buf, &points, &prov)?;
    files.push(("sweep.csv".into(), buf));
    rows.push(points.len());

    let amplitude = cfg.envelope.per_axis().map(|v| v * s.ramp_fraction);
    let ramp = static_ramp(amplitude, s.rate_hz, s.rest_s, s.ramp_leg_s)?;
    let mut traces: Vec<(&str, SimTrace)> = vec![("calibration.csv", simulate_trace(&g, &ramp, &sim, cfg.seed)?)];
    let scenario_seed = cfg.seed.wrapping_add(1);
    let name = match s.scenario {
        Scenario::StaticRamp => {
            traces.push(("trace.csv", simulate_trace(&g, &ramp, &sim, scenario_seed)?));
            "static-ramp"
        }
        Scenario::Gait => {
            let walk = gait(&s.gait, s.walk_s, s.rate_hz, s.rest_s)?;
            traces.push(("trace.csv", simulate_trace(&g, &walk, &sim, scenario_seed)?));
            "gait"
        }
        Scenario::GravelDrift => {
            let walk = gait(&s.gait, s.walk_s, s.rate_hz, s.rest_s)?;
            let preset = drift_preset(&s.drift_preset).expect("checked in resolve");
            let (d, st) = drift_scenario(&g, &walk, &DriftModel::from_preset(&preset), &sim, scenario_seed)?;
            traces.push(("drift.csv", d));
            traces.push(("stable.csv", st));
            "gravel-drift"
        }
    };
    let mut clipped = 0;
    for (n, t) in &traces {
        let mut buf = Vec::new();
        write_trace(&mut buf, &t.samples, &prov)?;
        files.push((n.to_string(), buf));
        rows.push(t.samples.len());
        clipped += t.clipped_count();
    }
    let summaries = files
        .iter()
        .zip(&rows)
        .map(|((n, b), r)| FileSummary {
            name: n.clone(),
            rows: *r,
            sha256: sha(b),
        })
        .collect();
    let report = SimulateReport {
        scenario: name.into(),
        design: cfg.design,
        noise_sigma: channel_noise_sigma(&g, &sim),
        clipped,
        files: summaries,
    };
    Ok(Outcome {
        bundle: ReportBundle {
            payload: Payload::Simulate(report),
            ..b0
        },
        files,
        status: Status::Ok,
    })
}

fn read_bytes(p: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn load_trace(p: &Path, inputs: &mut Vec<FileSummary>) -> Result<Vec<RawSample>, CliError> {
    let bytes = read_bytes(p)?;
    let (samples, _) = read_trace(bytes.as_slice()).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    inputs.push(FileSummary {
        name: file_name(p),
        rows: samples.len(),
        sha256: sha(&bytes),
    });
    Ok(samples)
}

#[derive(Serialize)]
struct ModelFile<'a> {
    provenance: &'a Provenance,
    model: &'a CalibrationModel,
}

fn calibrate(cfg: RunConfig, sweep_path: &Path, trace_path: &Path, tests: &[std::path::PathBuf]) -> Result<Outcome, CliError> {
    let mut inputs = Vec::new();
    let bytes = read_bytes(sweep_path)?;
    let (points, _) = read_sweep(bytes.as_slice()).map_err(|e| CliError::Input(format!("{}: {e}", sweep_path.display())))?;
    inputs.push(FileSummary {
        name: file_name(sweep_path),
        rows: points.len(),
        sha256: sha(&bytes),
    });
    let fit_trace = load_trace(trace_path, &mut inputs)?;
    let model = CalibrationModel::fit(&points, &fit_trace, cfg.calibration.options)?;

    let fs = cfg.full_scale();
    let budget = cfg.calibration.error_budget_pct;
    let mut traces = Vec::new();
    let test_paths: Vec<&Path> = if tests.is_empty() {
        vec![trace_path]
    } else {
        tests.iter().map(|p| p.as_path()).collect()
    };
    for p in test_paths {
        let samples = if p == trace_path {
            fit_trace.clone()
        } else {
            load_trace(p, &mut inputs)?
        };
        let mut m = model.clone();
        m.tare(&samples)?;
        let extrapolated = m.reconstruct_trace(&samples).1;
        let (pred, refs) = paired_series(&m, &samples);
        let (errors, crosstalk) = if refs.is_empty() {
            (None, None)
        } else {
            let labels = label_excitation(&refs, &fs);
            (
                Some(error_metrics(&pred, &refs, &fs)?),
                Some(crosstalk_metrics(&pred, &refs, &labels, &fs)?),
            )
        };
        let off = final_offset(&model, &samples, cfg.calibration.offset_window_s)?.to_array();
        traces.push(TraceResult {
            name: file_name(p),
            samples: samples.len(),
            extrapolated,
            within_budget: errors.as_ref().map_or(true, |e| e.max_pct() <= budget),
            errors,
            crosstalk,
            final_offset_pct: std::array::from_fn(|j| off[j] / fs[j] * 100.0),
        });
    }
    let budget_met = traces.iter().all(|t| t.within_budget);
    let report = CalibrateReport {
        inputs,
        channels: model
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| ChannelFit {
                channel: i + 1,
                degree: c.degree(),
                residual_rms_mm: c.residual_rms,
                condition: c.condition,
                domain: c.domain,
            })
            .collect(),
        excitation_condition: model.decoupling.excitation_condition,
        decoupling_residual_rms: model.decoupling.residual_rms,
        decoupling_samples: model.decoupling.samples,
        full_scale: fs,
        error_budget_pct: budget,
        traces,
        budget_met,
    };
    let b = bundle("calibrate", &cfg, Payload::Calibrate(report));
    let mut model_json = serde_json::to_vec_pretty(&ModelFile {
        provenance: &b.provenance,
        model: &model,
    })
    .map_err(|e| CliError::Input(e.to_string()))?;
    model_json.push(b'\n');
    Ok(Outcome {
        status: status(budget_met),
        bundle: b,
        files: vec![("model.json".into(), model_json)],
    })
}
