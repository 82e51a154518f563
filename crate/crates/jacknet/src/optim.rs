//! Derivative-free optimization helpers: bisection, golden-section search
//! and a compact multi-start Nelder–Mead used by the bound optimizers.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Root of f on [lo, hi] by bisection; requires a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 || hi - lo < tol {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximize a unimodal function on (lo, hi) by golden-section search.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Budgeted function wrapper: counts evaluations and tracks the best point.
pub struct Budget<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> f64,
    remaining: usize,
    pub best_x: Vec<f64>,
    pub best_f: f64,
}

impl<'a> Budget<'a> {
    pub fn new(f: &'a mut dyn FnMut(&[f64]) -> f64, evals: usize, dim: usize) -> Self {
        Self {
            f,
            remaining: evals,
            best_x: vec![0.0; dim],
            best_f: f64::NEG_INFINITY,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.remaining == 0
    }

    pub fn eval(&mut self, x: &[f64]) -> f64 {
        if self.remaining == 0 {
            return f64::NEG_INFINITY;
        }
        self.remaining -= 1;
        let v = (self.f)(x);
        if v > self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        v
    }
}

/// One Nelder–Mead run (maximization) from an initial point.
fn nelder_mead_run(budget: &mut Budget, x0: &[f64], scale: f64) {
    let n = x0.len();
    if n == 0 {
        budget.eval(x0);
        return;
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = budget.eval(x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut xi = x0.to_vec();
        let step = scale * xi[i].abs().max(0.1);
        xi[i] += step;
        let fi = budget.eval(&xi);
        simplex.push((xi, fi));
    }

    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    while !budget.exhausted() {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let spread = simplex[0].1 - simplex[n].1;
        if spread.abs() < 1e-12 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|j| centroid[j] + ALPHA * (centroid[j] - worst.0[j]))
            .collect();
        let fr = budget.eval(&reflect);
        if fr > simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|j| centroid[j] + GAMMA * (reflect[j] - centroid[j]))
                .collect();
            let fe = budget.eval(&expand);
            simplex[n] = if fe > fr { (expand, fe) } else { (reflect, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|j| centroid[j] + RHO * (worst.0[j] - centroid[j]))
                .collect();
            let fc = budget.eval(&contract);
            if fc > worst.1 {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|j| best[j] + SIGMA * (entry.0[j] - best[j]))
                        .collect();
                    let fs = budget.eval(&shrunk);
                    *entry = (shrunk, fs);
                }
            }
        }
    }
}

/// Multi-start Nelder–Mead maximization with an evaluation budget shared
/// across starts. Deterministic for a given seed, budget and seed points.
pub fn multi_start_maximize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    seeds: &[Vec<f64>],
    extra_starts: usize,
    budget_evals: usize,
    seed: u64,
) -> (Vec<f64>, f64) {
    let dim = seeds.first().map_or(0, |s| s.len());
    let mut budget = Budget::new(f, budget_evals, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let total_starts = seeds.len() + extra_starts;
    let per_start = (budget_evals / total_starts.max(1)).max(dim * 20 + 20);

    for s in seeds {
        if budget.exhausted() {
            break;
        }
        let cap = budget.remaining.min(per_start);
        let saved = budget.remaining - cap;
        budget.remaining = cap;
        nelder_mead_run(&mut budget, s, 0.25);
        budget.remaining += saved;
    }
    for _ in 0..extra_starts {
        if budget.exhausted() || seeds.is_empty() {
            break;
        }
        let base = &budget.best_x.clone();
        let jittered: Vec<f64> = base
            .iter()
            .map(|&x| x * rng.gen_range(0.5..1.5) + rng.gen_range(-0.1..0.1))
            .collect();
        let cap = budget.remaining.min(per_start);
        let saved = budget.remaining - cap;
        budget.remaining = cap;
        nelder_mead_run(&mut budget, &jittered, 0.4);
        budget.remaining += saved;
    }
    (budget.best_x, budget.best_f)
}
