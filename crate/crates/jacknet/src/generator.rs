//! The Markov generator of the queue-length process, evaluated on
//! arbitrary functions and in closed form on exponentials.
//!
//! States are unbounded, so the generator enumerates the admissible jumps
//! (arrival, departure, transfer) instead of materializing a rate matrix.

use crate::error::{Error, Result};
use crate::network::{JacksonNetwork, TrafficSolution};

/// Guard on exponents fed to `exp`; beyond this we fail loudly instead of
/// returning infinities.
pub const EXP_GUARD: f64 = 700.0;

/// The set of strictly positive coordinates of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    active: Vec<bool>,
}

impl FaceSet {
    pub fn from_state(x: &[u64]) -> Self {
        Self {
            active: x.iter().map(|&xi| xi > 0).collect(),
        }
    }

    pub fn full(d: usize) -> Self {
        Self { active: vec![true; d] }
    }

    pub fn empty(d: usize) -> Self {
        Self { active: vec![false; d] }
    }

    pub fn from_indices(d: usize, indices: &[usize]) -> Self {
        let mut active = vec![false; d];
        for &i in indices {
            active[i] = true;
        }
        Self { active }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.active[i]
    }
}

/// Evaluate L f(x) as the exact finite sum over admissible jumps.
///
/// Service jumps out of queue i are suppressed when x_i = 0, so the state
/// never leaves the nonnegative orthant.
pub fn apply_generator<F>(net: &JacksonNetwork, f: F, x: &[u64]) -> Result<f64>
where
    F: Fn(&[u64]) -> f64,
{
    let d = net.dim();
    if x.len() != d {
        return Err(Error::Dimension("state length must match network order".into()));
    }
    let fx = f(x);
    let mut total = 0.0;
    let mut y = x.to_vec();
    for i in 0..d {
        // arrival at i
        y[i] += 1;
        total += net.lambda()[i] * (f(&y) - fx);
        y[i] -= 1;

        if x[i] == 0 {
            continue;
        }
        // departure from i
        let p_exit = net.exit_probability(i);
        if p_exit > 0.0 {
            y[i] -= 1;
            total += net.mu()[i] * p_exit * (f(&y) - fx);
            y[i] += 1;
        }
        // transfer i -> j
        for j in 0..d {
            let pij = net.routing()[i][j];
            if pij == 0.0 {
                continue;
            }
            y[i] -= 1;
            y[j] += 1;
            total += net.mu()[i] * pij * (f(&y) - fx);
            y[j] -= 1;
            y[i] += 1;
        }
    }
    Ok(total)
}

/// Laplace transform of the jump distribution on the face Lambda:
/// R_Lambda(alpha) = sum_j lambda_j (e^{a_j} - 1)
///                 + sum_{j in Lambda} mu_j (sum_k p_jk e^{a_k - a_j} + p_j0 e^{-a_j} - 1).
pub fn face_laplace(net: &JacksonNetwork, lam: &FaceSet, alpha: &[f64]) -> f64 {
    let d = net.dim();
    let mut total = 0.0;
    for j in 0..d {
        total += net.lambda()[j] * (alpha[j].exp() - 1.0);
    }
    for j in 0..d {
        if !lam.contains(j) {
            continue;
        }
        let mut service = net.exit_probability(j) * (-alpha[j]).exp() - 1.0;
        for k in 0..d {
            let pjk = net.routing()[j][k];
            if pjk > 0.0 {
                service += pjk * (alpha[k] - alpha[j]).exp();
            }
        }
        total += net.mu()[j] * service;
    }
    total
}

/// Unique solution alpha(s) of the single-index face system:
/// e^{alpha_i} = 1 + s and e^{alpha_j} = sum_k p_jk e^{alpha_k} + p_j0 for j != i.
///
/// In closed form, alpha_j(s) = log(1 + Q_{ji} s).
pub fn solve_face_system(ts: &TrafficSolution, i: usize, s: f64) -> Result<Vec<f64>> {
    if s <= -1.0 {
        return Err(Error::Precondition(format!("s must exceed -1, got {s}")));
    }
    let d = ts.dim();
    if i >= d {
        return Err(Error::Dimension(format!("queue index {i} out of range")));
    }
    Ok((0..d).map(|j| (1.0 + ts.q[j][i] * s).ln()).collect())
}

/// Closed-form generator rate on the exponential f_i(x) = exp(gamma_i-vector . x):
/// L f_i = (gamma_i / G_ii)(nu_i - 1{x_i > 0} mu_i / (1 + gamma_i)) f_i.
pub fn exp_generator_rate(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    i: usize,
    gamma_i: f64,
    x: &[u64],
) -> Result<f64> {
    if gamma_i < 0.0 {
        return Err(Error::InvalidArgument(format!("gamma_{i} must be nonnegative")));
    }
    if x.len() != net.dim() {
        return Err(Error::Dimension("state length must match network order".into()));
    }
    let indicator = if x[i] > 0 { 1.0 } else { 0.0 };
    Ok(gamma_i / ts.g[i][i] * (ts.nu[i] - indicator * net.mu()[i] / (1.0 + gamma_i)))
}

/// exp with the overflow guard.
pub fn guarded_exp(exponent: f64) -> Result<f64> {
    if exponent > EXP_GUARD {
        return Err(Error::ExpOverflow(exponent));
    }
    Ok(exponent.exp())
}
