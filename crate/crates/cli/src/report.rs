//! Report bundles: what every subcommand emits, as JSON or as a text table.
//! The JSON layout is described by `schemas/report.schema.json`.

use std::fmt::Write as _;

use ftkit::beam_model::{DesignParams, SpringConstants, UnitLoadDeformations};
use ftkit::calibration::{CrosstalkReport, ErrorReport};
use ftkit::optimizer::Slack;
use ftkit::sensitivity::{Mat6, MetricSet, Normalization, ObjectiveId, Wrench};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &str, config_sha256: String, seed: u64) -> Self {
        Self {
            tool: "ftkit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256,
            seed,
        }
    }

    /// Comment lines for CSV outputs.
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("tool {} {}", self.tool, self.version),
            format!("command {}", self.command),
            format!("config_sha256 {}", self.config_sha256),
            format!("seed {}", self.seed),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Evaluate(EvaluateReport),
    Optimize(OptimizeReport),
    Table(TableReport),
    Simulate(SimulateReport),
    Calibrate(CalibrateReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub objective: ObjectiveId,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub design: DesignParams,
    pub feasible: bool,
    pub slacks: Vec<Slack>,
    pub springs: SpringConstants,
    /// m per N and m per N·m.
    pub g: Mat6,
    pub normalization: Normalization,
    pub gbar: Mat6,
    pub metrics: MetricSet,
    pub objectives: Vec<ObjectiveValue>,
    pub deformations: UnitLoadDeformations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub objective: ObjectiveId,
    pub objective_value: f64,
    pub design: DesignParams,
    pub feasible: bool,
    pub metrics: MetricSet,
    pub slacks: Vec<Slack>,
    pub deformations: UnitLoadDeformations,
    pub starts: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub objective: ObjectiveId,
    pub design: Option<DesignParams>,
    pub cond: Option<f64>,
    pub objective_value: Option<f64>,
    pub deformations: Option<UnitLoadDeformations>,
    pub feasible: bool,
    pub evaluations: usize,
    pub error: Option<String>,
    /// Published optimum for the same objective: l1, l2, b1, b2, h, r, rs2 (mm).
    pub published_variables: [f64; 7],
    pub published_cond: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub rows: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSummary {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub scenario: String,
    pub design: DesignParams,
    /// Per-conversion noise standard deviation per channel, V.
    pub noise_sigma: [f64; 6],
    /// Output samples with a channel outside its optical window.
    pub clipped: usize,
    pub files: Vec<FileSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFit {
    /// 1 to 6.
    pub channel: usize,
    pub degree: usize,
    pub residual_rms_mm: f64,
    pub condition: f64,
    /// Voltage domain of the fit, V.
    pub domain: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub name: String,
    pub samples: usize,
    /// Samples with a channel outside its fitted domain.
    pub extrapolated: usize,
    pub errors: Option<ErrorReport>,
    pub crosstalk: Option<CrosstalkReport>,
    /// Mean reconstruction over the last window after taring on the first,
    /// % FS per axis.
    pub final_offset_pct: [f64; 6],
    pub within_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrateReport {
    /// Sweep, fit trace and test traces as read.
    pub inputs: Vec<FileSummary>,
    pub channels: Vec<ChannelFit>,
    /// Condition number of the excitation used for the decoupling fit.
    pub excitation_condition: f64,
    /// N and N·m.
    pub decoupling_residual_rms: [f64; 6],
    pub decoupling_samples: usize,
    pub full_scale: [f64; 6],
    pub error_budget_pct: f64,
    pub traces: Vec<TraceResult>,
    pub budget_met: bool,
}

fn design_line(p: &DesignParams) -> String {
    format!(
        "l1 {:.4}  l2 {:.4}  b1 {:.4}  b2 {:.4}  h {:.4}  r {:.4}  rs2 {:.4}  (rs1 {:.4}, c {:.4}) mm",
        p.l1, p.l2, p.b1, p.b2, p.h, p.r, p.rs2, p.rs1, p.c
    )
}

fn matrix(out: &mut String, title: &str, m: &Mat6) {
    let _ = writeln!(out, "{title}");
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.4e}")).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

fn slacks(out: &mut String, s: &[Slack]) {
    let _ = writeln!(out, "constraints (slack < 0 is satisfied)");
    for x in s {
        let mark = if x.satisfied() { "ok" } else { "VIOLATED" };
        let _ = writeln!(out, "  {:<24} {:>13.5e}  {mark}", x.name, x.value);
    }
}

fn deformations(out: &mut String, d: &UnitLoadDeformations) {
    let _ = writeln!(
        out,
        "unit loads: Fz 100 N {:.4e} mm | Fx 100 N {:.4e} mm | Mz 1 N·m {:.4e} mm | My 1 N·m {:.4e} rad",
        d.fz_100n_mm, d.fx_100n_mm, d.mz_1nm_mm, d.my_1nm_rad
    );
}

fn metrics(out: &mut String, m: &MetricSet) {
    let _ = writeln!(
        out,
        "Cond {:.6}  S2 {:.6e}  F {:.6e}  NUC {:.6e}",
        m.cond, m.spectral, m.frobenius, m.nuclear
    );
}

fn axis_header() -> String {
    Wrench::AXES.iter().map(|a| format!("{a:>9}")).collect::<Vec<_>>().join("")
}

impl ReportBundle {
    /// Human-readable rendering.
    pub fn render(&self) -> String {
        let mut o = String::new();
        let p = &self.provenance;
        let _ = writeln!(o, "{} {} {}  config {}  seed {}", p.tool, p.version, p.command, &p.config_sha256[..12.min(p.config_sha256.len())], p.seed);
        match &self.payload {
            Payload::Evaluate(r) => {
                let _ = writeln!(o, "design  {}", design_line(&r.design));
                let _ = writeln!(o, "feasible {}", r.feasible);
                metrics(&mut o, &r.metrics);
                deformations(&mut o, &r.deformations);
                matrix(&mut o, "G (m/N, m/N·m)", &r.g);
                matrix(&mut o, &format!("normalized G ({:?})", r.normalization), &r.gbar);
                let _ = writeln!(o, "objectives");
                for v in &r.objectives {
                    let _ = writeln!(o, "  {:<20} {:.6e}", v.objective.name(), v.value);
                }
                slacks(&mut o, &r.slacks);
            }
            Payload::Optimize(r) => {
                let _ = writeln!(o, "objective {}  value {:.6e}", r.objective, r.objective_value);
                let _ = writeln!(o, "design  {}", design_line(&r.design));
                let _ = writeln!(o, "feasible {}  starts {}  evaluations {}", r.feasible, r.starts, r.evaluations);
                metrics(&mut o, &r.metrics);
                deformations(&mut o, &r.deformations);
                slacks(&mut o, &r.slacks);
            }
            Payload::Table(t) => {
                let _ = writeln!(
                    o,
                    "{:<20}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}{:>10}{:>10}  feasible",
                    "objective", "l1", "l2", "b1", "b2", "h", "r", "rs2", "Cond", "published"
                );
                for r in &t.rows {
                    match (&r.design, r.cond) {
                        (Some(d), Some(c)) => {
                            let x = d.variables();
                            let _ = writeln!(
                                o,
                                "{:<20}{:>8.3}{:>8.3}{:>8.3}{:>8.4}{:>8.3}{:>8.3}{:>8.3}{:>10.4}{:>10.4}  {}",
                                r.objective.name(), x[0], x[1], x[2], x[3], x[4], x[5], x[6], c, r.published_cond, r.feasible
                            );
                        }
                        _ => {
                            let _ = writeln!(o, "{:<20} failed: {}", r.objective.name(), r.error.as_deref().unwrap_or("unknown"));
                        }
                    }
                }
            }
            Payload::Simulate(r) => {
                let _ = writeln!(o, "scenario {}", r.scenario);
                let _ = writeln!(o, "design  {}", design_line(&r.design));
                let sig: Vec<String> = r.noise_sigma.iter().map(|s| format!("{s:.3e}")).collect();
                let _ = writeln!(o, "noise sigma per conversion (V): {}", sig.join(" "));
                let _ = writeln!(o, "clipped samples: {}", r.clipped);
                for f in &r.files {
                    let _ = writeln!(o, "  {:<16} {:>8} rows  sha256 {}", f.name, f.rows, &f.sha256[..16]);
                }
            }
            Payload::Calibrate(r) => {
                let _ = writeln!(o, "channel fits");
                for c in &r.channels {
                    let _ = writeln!(
                        o,
                        "  ch{} degree {} residual {:.3e} mm  condition {:.2e}  domain [{:.4}, {:.4}] V",
                        c.channel, c.degree, c.residual_rms_mm, c.condition, c.domain[0], c.domain[1]
                    );
                }
                let _ = writeln!(
                    o,
                    "decoupling: {} samples, excitation condition {:.3e}",
                    r.decoupling_samples, r.excitation_condition
                );
                let _ = writeln!(o, "full scale {:?}, budget {} % FS", r.full_scale, r.error_budget_pct);
                for t in &r.traces {
                    let _ = writeln!(o, "\n{}: {} samples, {} extrapolated", t.name, t.samples, t.extrapolated);
                    if let Some(e) = &t.errors {
                        let _ = writeln!(o, "  {:<14}{}", "% FS", axis_header());
                        let rows: [(&str, fn(&ftkit::calibration::AxisError) -> f64); 6] = [
                            ("mean", |a| a.mean_pct),
                            ("std", |a| a.std_pct),
                            ("max", |a| a.max_pct),
                            ("nonlinearity", |a| a.nonlinearity_pct),
                            ("hysteresis", |a| a.hysteresis_pct),
                            ("rmse (SI)", |a| a.rmse),
                        ];
                        for (name, f) in rows {
                            let cells: String = e.axes.iter().map(|a| format!("{:>9.4}", f(a))).collect();
                            let _ = writeln!(o, "  {name:<14}{cells}");
                        }
                    }
                    if let Some(c) = &t.crosstalk {
                        let _ = writeln!(o, "  crosstalk, % FS of output axis (rows: excited axis)");
                        let _ = writeln!(o, "  {:<14}{}", "", axis_header());
                        for (i, row) in c.matrix_pct.iter().enumerate() {
                            let cells: String = row
                                .iter()
                                .enumerate()
                                .map(|(j, v)| if i == j { format!("{:>9}", "-") } else { format!("{v:>9.3}") })
                                .collect();
                            let _ = writeln!(o, "  {:<14}{cells}", Wrench::AXES[i]);
                        }
                    }
                    let off: String = t.final_offset_pct.iter().map(|v| format!("{v:>9.4}")).collect();
                    let _ = writeln!(o, "  {:<14}{off}", "final offset");
                    let _ = writeln!(o, "  within budget: {}", t.within_budget);
                }
                let _ = writeln!(o, "\nbudget met: {}", r.budget_met);
            }
        }
        o
    }
}
