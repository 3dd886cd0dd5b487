//! Box-clamped Nelder–Mead on the unit cube.

const ALPHA: f64 = 1.0;

/// Simplex diameter (unit-cube coordinates) required together with a flat
/// simplex before a run stops.
const X_CONV: f64 = 1e-8;
/// Diameter below which a run stops regardless of values.
const X_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct NmOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    pub evals: usize,
}

fn clamp01(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

// Lower value first; NaN sorts last.
fn key(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

/// Minimize `f` over `[0, 1]^n` from `x0`.
///
/// Stops after `max_iters` iterations, when the spread of simplex values is
/// at most `tol·max(|f_best|, 1e-300)` on a small simplex, or when the
/// simplex collapses.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    max_iters: usize,
    tol: f64,
) -> NmOutcome {
    let n = x0.len();
    // Dimension-adaptive coefficients; the classic (2, 1/2, 1/2) for n = 2.
    let nf = n.max(2) as f64;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        key(f(x))
    };

    let mut start = x0.to_vec();
    clamp01(&mut start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&start, &mut evals);
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let mut v = start.clone();
        v[i] = if v[i] + step <= 1.0 { v[i] + step } else { v[i] - step };
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    let mut iters = 0;
    while iters < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = worst - best;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let flat = best.is_finite() && spread <= tol * best.abs().max(1e-300);
        if diameter < X_TOL || (flat && diameter < X_CONV) {
            break;
        }
        iters += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp01(&mut p);
            p
        };

        let xr = along(ALPHA);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(rho * ALPHA);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let x0 = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (vi, bi) in v.iter_mut().zip(&x0) {
                *vi = bi + sigma * (*vi - bi);
            }
            *fv = eval(v, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fbest) = simplex.swap_remove(0);
    NmOutcome {
        x,
        f: fbest,
        iters,
        evals,
    }
}
