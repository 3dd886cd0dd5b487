use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constraints::{feasibility_with, ViolationReport};
use super::halton::halton_points;
use super::local::nelder_mead;
use super::SearchConfig;
use crate::beam_model::{
    derive_sections, unit_load_deformations, DesignParams, LoadEnvelope, MaterialSpec,
    UnitLoadDeformations,
};
use crate::sensitivity::{evaluate_design, objective_value, MetricSet, ObjectiveId};
use crate::{Error, Result};

/// Fraction of each variable's range added on both sides of the search box.
const BOX_EXPANSION: f64 = 0.1;

/// Initial simplex edge in unit-cube coordinates.
const FIRST_STEP: f64 = 0.1;
const RESTART_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: DesignParams,
    /// Raw objective value.
    pub objective: f64,
    pub metrics: MetricSet,
    pub violations: ViolationReport,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub start: [f64; 7],
    /// Incumbent penalized value after the first evaluation and after every
    /// local run; non-increasing.
    pub best_so_far: Vec<f64>,
    /// Best strictly feasible raw objective seen by this start.
    pub best_feasible: Option<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub objective: ObjectiveId,
    pub best: Candidate,
    pub history: Vec<StartRecord>,
    pub evaluations: usize,
    /// Seconds; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

/// The design actually fed to the model: photocoupler radii are pulled into
/// the span of the spoke so the model stays defined while the window rows
/// of the constraint report penalize the excursion.
pub fn evaluation_point(p: &DesignParams) -> DesignParams {
    let lo = p.r;
    let hi = p.r + p.l1_comp() * (1.0 - 1e-3);
    let mut q = *p;
    if hi > lo {
        q.rs1 = p.rs1.clamp(lo, hi);
        q.rs2 = p.rs2.clamp(lo, hi);
    }
    q
}

/// Raw objective at `p`, `+∞` wherever the model is undefined.
pub fn raw_objective(p: &DesignParams, cfg: &SearchConfig, m: &MaterialSpec, env: &LoadEnvelope) -> f64 {
    match evaluate_design(&evaluation_point(p), m, env, cfg.normalization) {
        Ok(e) => {
            let v = objective_value(cfg.objective, &e.metrics);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

struct Eval {
    raw: f64,
    penalized: f64,
    feasible: bool,
}

fn evaluate(p: &DesignParams, cfg: &SearchConfig, m: &MaterialSpec, env: &LoadEnvelope) -> Eval {
    let raw = raw_objective(p, cfg, m, env);
    let report = feasibility_with(p, m, env, &cfg.bounds);
    let penalized = if raw.is_finite() {
        let v = raw + cfg.penalty_weight * report.penalty_sum();
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    } else {
        f64::INFINITY
    };
    Eval {
        raw,
        penalized,
        feasible: report.feasible && raw.is_finite(),
    }
}

/// Raw objective plus `penalty_weight·Σ max(0, slack/scale)²` over the
/// constraint rows. Equal to the raw objective at feasible points.
pub fn penalized_objective(
    p: &DesignParams,
    cfg: &SearchConfig,
    m: &MaterialSpec,
    env: &LoadEnvelope,
) -> f64 {
    evaluate(p, cfg, m, env).penalized
}

fn cmp_point(a: (f64, &[f64; 7]), b: (f64, &[f64; 7])) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| {
        a.1.iter()
            .zip(b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

struct StartOutcome {
    record: StartRecord,
    best: Option<(f64, [f64; 7])>,
}

fn run_start(
    cfg: &SearchConfig,
    m: &MaterialSpec,
    env: &LoadEnvelope,
    free: &[usize],
    start_unit: &[f64],
) -> StartOutcome {
    let (lo, hi) = (cfg.bounds.lo(), cfg.bounds.hi());
    let lo_e: Vec<f64> = free
        .iter()
        .map(|&i| (lo[i] - BOX_EXPANSION * (hi[i] - lo[i])).max(0.5 * lo[i]))
        .collect();
    let hi_e: Vec<f64> = free
        .iter()
        .map(|&i| hi[i] + BOX_EXPANSION * (hi[i] - lo[i]))
        .collect();
    let anchor = cfg.anchor_variables();
    let to_full = |u: &[f64]| -> [f64; 7] {
        let mut x = anchor;
        for (k, &i) in free.iter().enumerate() {
            x[i] = lo_e[k] + u[k] * (hi_e[k] - lo_e[k]);
        }
        x
    };

    // Halton point in the original box, expressed in expanded coordinates.
    let u0: Vec<f64> = free
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let x = lo[i] + start_unit[k] * (hi[i] - lo[i]);
            (x - lo_e[k]) / (hi_e[k] - lo_e[k])
        })
        .collect();

    let mut evaluations = 0usize;
    let mut best: Option<(f64, [f64; 7])> = None;
    let mut f = |u: &[f64]| -> f64 {
        evaluations += 1;
        let x = to_full(u);
        let e = evaluate(&cfg.design(&x), cfg, m, env);
        if e.feasible {
            let better = match &best {
                None => true,
                Some((v, bx)) => cmp_point((e.raw, &x), (*v, bx)).is_lt(),
            };
            if better {
                best = Some((e.raw, x));
            }
        }
        e.penalized
    };

    let mut u = u0.clone();
    let mut fu = f(&u);
    let mut trace = vec![fu];
    for restart in 0..=cfg.max_restarts {
        let step = if restart == 0 { FIRST_STEP } else { RESTART_STEP };
        let out = nelder_mead(&mut f, &u, step, cfg.max_iters, cfg.convergence_tol);
        let improved = out.f < fu;
        let gain = fu - out.f;
        if improved {
            u = out.x;
            fu = out.f;
        }
        trace.push(fu);
        if restart > 0 && !(gain > cfg.convergence_tol * fu.abs().max(1e-300)) {
            break;
        }
    }

    StartOutcome {
        record: StartRecord {
            start: to_full(&u0),
            best_so_far: trace,
            best_feasible: best.map(|b| b.0),
            evaluations,
        },
        best,
    }
}

/// Candidate report for a design.
pub fn candidate(
    p: &DesignParams,
    cfg: &SearchConfig,
    m: &MaterialSpec,
    env: &LoadEnvelope,
) -> Result<Candidate> {
    let e = evaluate_design(&evaluation_point(p), m, env, cfg.normalization)?;
    let violations = feasibility_with(p, m, env, &cfg.bounds);
    Ok(Candidate {
        params: *p,
        objective: objective_value(cfg.objective, &e.metrics),
        metrics: e.metrics,
        feasible: violations.feasible,
        violations,
    })
}

/// Multi-start search. Deterministic for a fixed configuration; the result
/// does not depend on how starts are scheduled across threads.
pub fn global_search(
    cfg: &SearchConfig,
    m: &MaterialSpec,
    env: &LoadEnvelope,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    m.validate()?;
    let t0 = Instant::now();
    let free: Vec<usize> = (0..7).filter(|&i| cfg.free[i]).collect();
    let starts = halton_points(cfg.n_starts, free.len(), cfg.seed);
    let outcomes: Vec<StartOutcome> = starts
        .par_iter()
        .map(|s| run_start(cfg, m, env, &free, s))
        .collect();

    let evaluations = outcomes.iter().map(|o| o.record.evaluations).sum();
    let best = outcomes
        .iter()
        .filter_map(|o| o.best.as_ref())
        .min_by(|a, b| cmp_point((a.0, &a.1), (b.0, &b.1)))
        .copied();
    let Some((_, x)) = best else {
        return Err(Error::NoFeasiblePoint {
            starts: cfg.n_starts,
        });
    };
    let best = candidate(&cfg.design(&x), cfg, m, env)?;
    Ok(OptimizationResult {
        objective: cfg.objective,
        best,
        history: outcomes.into_iter().map(|o| o.record).collect(),
        evaluations,
        wall_time: t0.elapsed().as_secs_f64(),
    })
}

/// One row of the design table: optimized variables, condition number and
/// the unit-load deformations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub objective: ObjectiveId,
    pub params: Option<DesignParams>,
    pub cond: Option<f64>,
    pub objective_value: Option<f64>,
    pub deformations: Option<UnitLoadDeformations>,
    pub feasible: bool,
    pub evaluations: usize,
    pub error: Option<String>,
}

/// Run the search once per objective. A row that fails records its error
/// and the run continues.
pub fn reproduce_table(
    ids: &[ObjectiveId],
    template: &SearchConfig,
    m: &MaterialSpec,
    env: &LoadEnvelope,
) -> Vec<TableRow> {
    ids.iter()
        .map(|&id| {
            let cfg = SearchConfig {
                objective: id,
                ..template.clone()
            };
            let row = global_search(&cfg, m, env).and_then(|r| {
                let p = r.best.params;
                let s = derive_sections(&p, m)?;
                let d = unit_load_deformations(&s, &p)?;
                Ok((r, d))
            });
            match row {
                Ok((r, d)) => TableRow {
                    objective: id,
                    params: Some(r.best.params),
                    cond: Some(r.best.metrics.cond),
                    objective_value: Some(r.best.objective),
                    deformations: Some(d),
                    feasible: r.best.feasible,
                    evaluations: r.evaluations,
                    error: None,
                },
                Err(e) => TableRow {
                    objective: id,
                    params: None,
                    cond: None,
                    objective_value: None,
                    deformations: None,
                    feasible: false,
                    evaluations: 0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
