//! Multi-start Nelder–Mead maximization over angle vectors.
//!
//! Starting points are the caller's warm starts followed by a scrambled
//! Halton sequence (seeded Cranley–Patterson shift) over the parameter box.
//! Every local search is restarted once from its own best point with a fresh
//! simplex, which unsticks collapsed simplices on non-smooth objectives.
//! Restarts run in parallel; the best value wins with ties going to the lowest
//! start index, so results are independent of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Number of low-discrepancy starts added to the warm starts.
    pub restarts: usize,
    pub seed: u64,
    /// Convergence threshold on the simplex diameter.
    pub tolerance: f64,
    /// Evaluation budget per local search.
    pub max_evals: usize,
    /// Edge length of the initial simplex, in radians.
    pub initial_step: f64,
}

impl OptimizerOptions {
    pub fn with_restarts(restarts: usize) -> Self {
        Self {
            restarts,
            ..Self::default()
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            tolerance: 1e-9,
            max_evals: 20_000,
            initial_step: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    /// Local searches performed (warm starts included).
    pub restarts: usize,
    /// Nelder–Mead iterations summed over all searches.
    pub iterations: usize,
    pub evaluations: usize,
    /// Final simplex diameter of the winning search.
    pub residual: f64,
    pub converged: bool,
}

impl OptimizerReport {
    /// Report for a closed-form result.
    pub fn exact() -> Self {
        Self {
            restarts: 0,
            iterations: 0,
            evaluations: 0,
            residual: 0.0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    pub report: OptimizerReport,
}

struct LocalRun {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    evaluations: usize,
    diameter: f64,
    converged: bool,
}

/// Minimizes `f` from `x0` with the standard Nelder–Mead coefficients.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], step: f64, tol: f64, max_evals: usize) -> LocalRun {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        simplex.push((x, v));
    }
    let mut evals = dim + 1;
    let mut iterations = 0;
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> { c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect() };
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < tol || evals >= max_evals {
            let (x, value) = simplex.swap_remove(0);
            return LocalRun {
                x,
                value,
                iterations,
                evaluations: evals,
                diameter,
                converged: diameter < tol,
            };
        }
        iterations += 1;
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let xr = point(&centroid, &worst.0, -alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = point(&centroid, &worst.0, -gamma);
            let fe = f(&xe);
            evals += 1;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            // Outside contraction if the reflection helped at all, inside otherwise.
            let xc = if fr < worst.1 {
                point(&centroid, &xr, rho)
            } else {
                point(&centroid, &worst.0, rho)
            };
            let fc = f(&xc);
            evals += 1;
            if fc < fr.min(worst.1) {
                simplex[dim] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex[1..].iter_mut() {
                    *x = point(&best, x, sigma);
                    *v = f(x);
                }
                evals += dim;
            }
        }
    }
}

fn local_search<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: &OptimizerOptions) -> LocalRun {
    let first = nelder_mead(f, x0, opts.initial_step, opts.tolerance, opts.max_evals);
    let second = nelder_mead(f, &first.x, opts.initial_step * 0.1, opts.tolerance, opts.max_evals);
    let (iterations, evaluations) = (
        first.iterations + second.iterations,
        first.evaluations + second.evaluations,
    );
    let best = if second.value <= first.value { second } else { first };
    LocalRun {
        iterations,
        evaluations,
        ..best
    }
}

const PRIMES: [u64; 48] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109,
    113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let (mut out, mut scale) = (0.0, inv);
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    out
}

/// `count` points of a seeded, shifted Halton sequence in `[0,1)^dim`.
pub fn halton_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            (0..dim)
                .map(|d| {
                    let base = PRIMES[d % PRIMES.len()];
                    // Dimensions beyond the prime table reuse bases with a
                    // different shift; fine for starting points.
                    (radical_inverse(i, base) + shift[d]).fract()
                })
                .collect()
        })
        .collect()
}

/// Maximizes `f` from every warm start plus `opts.restarts` Halton points
/// mapped into `bounds` (one `(low, high)` per parameter).
pub fn maximize<F>(f: F, bounds: &[(f64, f64)], warm_starts: &[Vec<f64>], opts: &OptimizerOptions) -> Maximum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = bounds.len();
    let mut starts: Vec<Vec<f64>> = warm_starts.to_vec();
    starts.extend(
        halton_points(dim, opts.restarts, opts.seed)
            .into_iter()
            .map(|u| u.iter().zip(bounds).map(|(t, (lo, hi))| lo + t * (hi - lo)).collect()),
    );
    assert!(!starts.is_empty(), "no starting points");
    let neg = |x: &[f64]| -f(x);
    let runs: Vec<LocalRun> = starts.par_iter().map(|x0| local_search(&neg, x0, opts)).collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        // Strict comparison keeps the lowest index on ties.
        if r.value < runs[best].value {
            best = i;
        }
    }
    let report = OptimizerReport {
        restarts: runs.len(),
        iterations: runs.iter().map(|r| r.iterations).sum(),
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        residual: runs[best].diameter,
        converged: runs[best].converged,
    };
    Maximum {
        x: runs[best].x.clone(),
        value: -runs[best].value,
        report,
    }
}
