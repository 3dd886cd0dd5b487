//! Shared test support: an independent transcription of the closed-form
//! compliance model and the checks built on it.
//!
//! The oracle works from the printed formulas in millimetre inputs with its
//! own unit conversion, sharing nothing with the library but the readings
//! recorded for the misprints (shear area S1·S2 in the vertical term, the
//! twisting arm 1/a2, l1' in the lateral and twisting tip terms).

#![allow(dead_code)]

use std::f64::consts::PI;

use ftkit::beam_model::{
    derive_sections, deflection_profile, sensor_compliances, spring_k_fx, spring_k_fz, spring_k_my,
    spring_k_mz, DesignParams, LoadCase, LoadEnvelope, MaterialSpec,
};
use ftkit::optimizer::{feasibility, feasibility_with, global_search, raw_objective, Bounds, SearchConfig};
use ftkit::reference::PUBLISHED_DESIGNS;
use ftkit::sensitivity::{build_g, ObjectiveId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const E: f64 = 71.7e9;
const G: f64 = 26.9e9;

pub struct Oracle {
    pub l1p: f64,
    pub r: f64,
    pub k_fz: f64,
    pub k_my: f64,
    pub k_fx: f64,
    pub k_mz: f64,
    pub kd_fzv: f64,
    pub kr_myv: f64,
    pub kd_fxh: f64,
    pub kd_mzh: f64,
    pub kr_myh: f64,
    pub g: [[f64; 6]; 6],
    pub fz: Box<dyn Fn(f64) -> f64>,
    pub my: Box<dyn Fn(f64) -> f64>,
    pub fx: Box<dyn Fn(f64) -> f64>,
    pub mz: Box<dyn Fn(f64) -> f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn oracle(l1: f64, l2: f64, b1: f64, b2: f64, h: f64, r: f64, rs2: f64, rs1: f64, c: f64) -> Oracle {
    let m = 1e-3;
    let (l1, l2, b1, b2, h, r, rs2, rs1, c) = (l1 * m, l2 * m, b1 * m, b2 * m, h * m, r * m, rs2 * m, rs1 * m, c * m);
    let l1p = l1 + b2 / 2.0;
    let l2p = l2 - b1;
    let s1 = b1 * h;
    let s2 = b2 * h;
    let i11 = h * b1.powi(3) / 12.0;
    let i12 = b1 * h.powi(3) / 12.0;
    let i21 = h * b2.powi(3) / 12.0;
    let i22 = b2 * h.powi(3) / 12.0;
    let beta = (16.0 / 3.0 - 3.36 * (b2 / h) * (1.0 - b2.powi(4) / (12.0 * h.powi(4)))) / 16.0;
    let it = beta * h * b2.powi(3);
    let k = 10.0 / (12.0 + b2 / h);

    let a1 = l1p * (2.0 * l1p * G * it + l2p * E * i12) / (4.0 * l1p * G * it + l2p * E * i12);
    let lam1 = l1p / r;
    let lam2 = l2p / r;
    let big_a1 = (l1p * l1p / (3.0 * E * i12) + l1p * l2p / (4.0 * G * it) + 1.0 / (k * G * s1)) * lam1
        + (1.0 / (4.0 * k * G * s2) + l2p * l2p / (192.0 * E * i22)) * lam2
        + (l1p * l1p / (2.0 * E * i12) + l1p * l2p / (4.0 * G * it));
    let big_b1 = (l1p / (2.0 * E * i12) + l2p / (4.0 * G * it)) * lam1 + (l1p / (E * i12) + l2p / (4.0 * G * it));
    let a2c = l1p * l1p / (2.0 * i11) + l1p * l2p / (16.0 * i21);
    let b2c = l1p / i11 + l2p / (16.0 * i21);
    let a3 = l1p.powi(3) / (3.0 * E * i11) + l1p * l1p * l2p / (16.0 * E * i21) + l1p / (k * G * s1)
        - a2c * (l1p * l1p / (2.0 * E * i11) + l1p * l2p / (16.0 * E * i21)) / b2c;
    let b3 = 3f64.sqrt() * (l1p.powi(3) / (192.0 * E * i11) + l1p / (E * s1) + l2p / (4.0 * k * G * s2));
    let a4 = 1.5 + 3f64.sqrt() * b3 / (2.0 * a3);
    let a2 = (l1p / (E * i11) + l2p / (16.0 * E * i21) + (l1p / (2.0 * E * i11) + l2p / (16.0 * E * i21)) * lam1)
        / (l1p * l1p / (2.0 * E * i11)
            + l1p * l2p / (16.0 * E * i21)
            + (l1p * l1p / (3.0 * E * i11) + l1p * l2p / (16.0 * E * i21) + 1.0 / (k * G * s1)) * lam1);
    let ab = big_a1 / big_b1;

    let fz = move |u: f64| {
        (u * u * (3.0 * l1p - u) / (6.0 * E * i12) - a1 * u * u / (2.0 * E * i12)
            + (l1p - a1) * l2p * u / (4.0 * G * it)
            + l2p.powi(3) / (192.0 * E * i22)
            + (4.0 * l1p * s2 + l2p * s1) / (4.0 * k * G * s1 * s2))
            / 3.0
    };
    let my = move |u: f64| {
        (l2p.powi(3) / (192.0 * E * i22)
            + l2p / (4.0 * k * G * s2)
            + u / (k * G * s1)
            + u * u * (3.0 * l1p - u) / (6.0 * E * i12)
            - ab * u * u / (2.0 * E * i12)
            + (l1p - ab) * l2p * u / (4.0 * G * it))
            / (3.0 * (ab + r))
    };
    let fx = move |u: f64| {
        b3 / (2.0 * a3 * a4 * (PI / 6.0).cos())
            * (u * u * (3.0 * l1p - u) / (6.0 * E * i11) - a2c * u * u / (2.0 * E * i11 * b2c)
                + (l1p * l2p * u - a2c * u * l2p / b2c) / (16.0 * E * i21)
                + u / (4.0 * k * G * s1))
    };
    let fc = 1.0 / (3.0 * (r + 1.0 / a2));
    let mc = 1.0 / (3.0 * (a2 * r + 1.0));
    let mz = move |u: f64| {
        fc * u * u * (3.0 * l1p - u) / (6.0 * E * i11) - mc * u * u / (2.0 * E * i11)
            + (fc * l1p - mc) * u * l2p / (16.0 * E * i21)
            + fc * u / (k * G * s1)
    };

    let uv = l1p + r - rs1;
    let uh = l1p + r - rs2;
    let kd_fzv = 1.0 / fz(uv);
    let kr_myv = r / (2.0 * my(uv));
    let kd_fxh = 1.0 / fx(uh);
    let kd_mzh = 1.0
        / (fc * uh * uh * (3.0 * l1p - uh) / (6.0 * E * i11) - mc * uh * uh / (2.0 * E * i11)
            + (fc * l1p - mc) * uh * l2p / (16.0 * E * i21)
            + fc * l1p / (k * G * s1));
    let kr_myh = r / (2.0 * my(uh));

    let k_fz = fz(l1p);
    let k_my = 2.0 / (3.0 * (ab + r) * r)
        * (l2p.powi(3) / (192.0 * E * i22)
            + l2p / (4.0 * k * G * s2)
            + (2.0 * l1p.powi(3) - 3.0 * ab * l1p * l1p) / (6.0 * E * i12)
            + l1p / (k * G * s1)
            + (l1p - ab) * l1p * l2p / (4.0 * G * it));
    let k_fx = fx(l1p);
    let k_mz = 1.0 / (3.0 * r * (r + 1.0 / a2))
        * (l1p.powi(3) / (3.0 * E * i11) - l1p * l1p / (2.0 * E * i11 * a2)
            + (l1p * l1p * l2p - l1p * l2p / a2) / (16.0 * E * i21)
            + l1p / (k * G * s1));

    let (s3, s6) = ((PI / 3.0).sin(), (PI / 6.0).sin());
    let hc = h / 2.0 - c;
    let g = [
        [0.0, 0.0, -1.0 / kd_fzv, -rs1 * s3 / kr_myv, rs1 * s6 / kr_myv, 0.0],
        [0.0, 0.0, -1.0 / kd_fzv, rs1 * s3 / kr_myv, rs1 * s6 / kr_myv, 0.0],
        [0.0, 0.0, -1.0 / kd_fzv, 0.0, -rs1 / kr_myv, 0.0],
        [0.0, 1.0 / kd_fxh, 0.0, hc / kr_myh, 0.0, 1.0 / kd_mzh],
        [-s3 / kd_fxh, -s6 / kd_fxh, 0.0, -hc * s6 / kr_myh, -hc * s3 / kr_myh, 1.0 / kd_mzh],
        [s3 / kd_fxh, -s6 / kd_fxh, 0.0, hc * s6 / kr_myh, hc * s3 / kr_myh, 1.0 / kd_mzh],
    ];
    Oracle {
        l1p,
        r,
        k_fz,
        k_my,
        k_fx,
        k_mz,
        kd_fzv,
        kr_myv,
        kd_fxh,
        kd_mzh,
        kr_myh,
        g,
        fz: Box::new(fz),
        my: Box::new(my),
        fx: Box::new(fx),
        mz: Box::new(mz),
    }
}

/// Uniform draws inside the default bounds, kept when strictly feasible.
pub fn random_feasible(n: usize, seed: u64) -> Vec<DesignParams> {
    let b = Bounds::default();
    let (lo, hi) = (b.lo(), b.hi());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = MaterialSpec::default();
    let env = LoadEnvelope::default();
    let mut out = Vec::new();
    while out.len() < n {
        let x: [f64; 7] = std::array::from_fn(|i| rng.gen_range(lo[i]..hi[i]));
        let c = rng.gen_range(0.0..0.5) * x[4];
        let p = DesignParams::from_variables(&x, 12.0, c);
        if feasibility(&p, &m, &env).feasible {
            out.push(p);
        }
    }
    out
}

/// Relative tolerance of the oracle comparison.
pub const ORACLE_TOL: f64 = 1e-12;

fn check(out: &mut Vec<String>, a: f64, b: f64, what: &str) {
    let tol = ORACLE_TOL * a.abs().max(b.abs());
    if !((a - b).abs() <= tol) {
        out.push(format!("{what}: {a:e} vs {b:e}"));
    }
}

/// Every spring constant, profile point and G entry of `p` that differs
/// from the transcription by more than [`ORACLE_TOL`].
pub fn oracle_mismatches(p: &DesignParams) -> Vec<String> {
    let mut out = Vec::new();
    let m = MaterialSpec::default();
    let o = oracle(p.l1, p.l2, p.b1, p.b2, p.h, p.r, p.rs2, p.rs1, p.c);
    let s = derive_sections(p, &m).unwrap();
    let k = sensor_compliances(&s, p).unwrap();
    let c = &mut out;
    check(c, k.k_dfzv, o.kd_fzv, "k_dFzv");
    check(c, k.k_rmyv, o.kr_myv, "k_rMyv");
    check(c, k.k_rmxv(), o.kr_myv, "k_rMxv");
    check(c, k.k_dfxh, o.kd_fxh, "k_dFxh");
    check(c, k.k_dfyh(), o.kd_fxh, "k_dFyh");
    check(c, k.k_dmzh, o.kd_mzh, "k_dMzh");
    check(c, k.k_rmyh, o.kr_myh, "k_rMyh");
    check(c, k.k_rmxh(), o.kr_myh, "k_rMxh");
    check(c, spring_k_fz(&s), o.k_fz, "k_Fz");
    check(c, spring_k_my(&s).unwrap(), o.k_my, "k_My");
    check(c, spring_k_fx(&s).unwrap(), o.k_fx, "k_Fx");
    check(c, spring_k_mz(&s).unwrap(), o.k_mz, "k_Mz");
    check(c, k.k_fz, o.k_fz, "k_Fz field");
    check(c, k.k_mz, o.k_mz, "k_Mz field");

    for i in 0..=10 {
        let x = o.l1p * i as f64 / 10.0;
        let load = 37.5;
        let prof = |case| deflection_profile(case, &s, load, x).unwrap();
        check(c, prof(LoadCase::Fz), load * (o.fz)(x), "Fz profile");
        check(c, prof(LoadCase::My), load * (o.my)(x), "My profile");
        check(c, prof(LoadCase::Fx), load * (o.fx)(x), "Fx profile");
        check(c, prof(LoadCase::Mz), load * (o.mz)(x), "Mz profile");
    }
    // Tip values tie the profiles to the table constants.
    check(c, (o.my)(o.l1p) * 2.0 / o.r, o.k_my, "oracle My tip");
    check(c, (o.mz)(o.l1p) / o.r, o.k_mz, "oracle Mz tip");

    let g = build_g(&k, p);
    for i in 0..6 {
        for j in 0..6 {
            if o.g[i][j] == 0.0 {
                if g.entries[i][j] != 0.0 {
                    c.push(format!("G[{i}][{j}] should be exactly zero"));
                }
            } else {
                check(c, g.entries[i][j], o.g[i][j], &format!("G[{i}][{j}]"));
            }
        }
    }
    out
}

/// `|k_dFzv·k_Fz − 1|` with the vertical sensor moved to the table edge.
pub fn reduction_error(p: &DesignParams) -> f64 {
    let p = p.with_rs1(p.r);
    let s = derive_sections(&p, &MaterialSpec::default()).unwrap();
    let k = sensor_compliances(&s, &p).unwrap();
    (k.k_dfzv * spring_k_fz(&s) - 1.0).abs()
}

/// COND over (l1, b1) with the rest frozen at the first published optimum.
pub fn frozen_pair() -> SearchConfig {
    SearchConfig {
        objective: ObjectiveId::COND,
        n_starts: 16,
        free: [true, false, true, false, false, false, false],
        anchor: Some(PUBLISHED_DESIGNS[0].params()),
        ..SearchConfig::default()
    }
}

/// Search result and the best feasible value on a `n`×`n` grid of the
/// frozen pair.
pub fn search_vs_grid(n: usize) -> (f64, bool, f64) {
    let cfg = frozen_pair();
    let (m, env) = (MaterialSpec::default(), LoadEnvelope::default());
    let found = global_search(&cfg, &m, &env).unwrap();

    let (l1, b1) = (cfg.bounds.l1, cfg.bounds.b1);
    let mut grid = f64::INFINITY;
    let anchor = cfg.anchor_variables();
    let last = (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            let mut x = anchor;
            x[0] = l1[0] + (l1[1] - l1[0]) * i as f64 / last;
            x[2] = b1[0] + (b1[1] - b1[0]) * j as f64 / last;
            let p = cfg.design(&x);
            if feasibility_with(&p, &m, &env, &cfg.bounds).feasible {
                grid = grid.min(raw_objective(&p, &cfg, &m, &env));
            }
        }
    }
    (found.best.objective, found.best.feasible, grid)
}
