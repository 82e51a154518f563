//! Lower and upper bounds on the logarithm of the essential spectral
//! radius, and the interval diagnostic deciding when they coincide.
//!
//! The lower bound is the closed form -min_i (1/G_ii)(sqrt(mu_i) -
//! sqrt(nu_i))^2. Upper bounds come from maximizing the drift rate of an
//! admissible Lyapunov function, either directly over gamma in the closure
//! of Gamma or over the guaranteed (rho, eps) construction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::vec_mat;
use crate::lyapunov::{
    gamma_membership, x_rho, GammaCertificate, MEMBERSHIP_TOL,
};
use crate::network::{rho_contraction, JacksonNetwork, TrafficSolution};
use crate::optim::{golden_section_max, multi_start_maximize};

/// The drift rate of h_gamma: min_i (gamma_i/G_ii)(mu_i/(1+gamma_i) - nu_i).
pub fn objective(ts: &TrafficSolution, net: &JacksonNetwork, gamma: &[f64]) -> f64 {
    (0..ts.dim())
        .map(|i| gamma[i] / ts.g_diag(i) * (net.mu()[i] / (1.0 + gamma[i]) - ts.nu[i]))
        .fold(f64::INFINITY, f64::min)
}

/// Per-queue unconstrained maximizer gamma_i* = sqrt(mu_i/nu_i) - 1.
pub fn gamma_star(ts: &TrafficSolution, net: &JacksonNetwork) -> Vec<f64> {
    (0..ts.dim())
        .map(|i| (net.mu()[i] / ts.nu[i]).sqrt() - 1.0)
        .collect()
}

/// m_G = min_i (1/G_ii)(sqrt(mu_i) - sqrt(nu_i))^2, the unconstrained
/// supremum of the objective.
pub fn m_g(ts: &TrafficSolution, net: &JacksonNetwork) -> f64 {
    (0..ts.dim())
        .map(|i| (net.mu()[i].sqrt() - ts.nu[i].sqrt()).powi(2) / ts.g_diag(i))
        .fold(f64::INFINITY, f64::min)
}

/// Lower bound on log r_e*: -m_G.
pub fn lower_bound(ts: &TrafficSolution, net: &JacksonNetwork) -> Result<f64> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    Ok(-m_g(ts, net))
}

/// Value of the (rho, eps) bound expression at a specific point:
/// eps * min_i (mu_i/(rho_i + eps G_ii) - nu_i/rho_i).
pub fn rho_eps_value(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    rho: &[f64],
    eps: f64,
) -> f64 {
    (0..ts.dim())
        .map(|i| eps * (net.mu()[i] / (rho[i] + eps * ts.g_diag(i)) - ts.nu[i] / rho[i]))
        .fold(f64::INFINITY, f64::min)
}

/// Upper limit of the admissible eps interval for a contracting rho:
/// min_i (rho_i/G_ii) min{x_rho, mu_i/nu_i - 1}.
pub fn rho_eps_cap(ts: &TrafficSolution, net: &JacksonNetwork, rho: &[f64]) -> Result<f64> {
    let r = rho_contraction(net.routing(), rho)?;
    if r >= 1.0 {
        return Err(Error::Precondition(format!(
            "rho must contract under the routing matrix, got factor {r}"
        )));
    }
    let xr = x_rho(r)?;
    Ok((0..ts.dim())
        .map(|i| {
            let lyap = net.mu()[i] / ts.nu[i] - 1.0;
            rho[i] / ts.g_diag(i) * xr.min(lyap)
        })
        .fold(f64::INFINITY, f64::min))
}

fn clamp_nonneg(g: &[f64]) -> Vec<f64> {
    g.iter().map(|&x| x.max(0.0)).collect()
}

/// Best equal-component point: maximize the objective along gamma = t 1.
fn equal_component_seed(ts: &TrafficSolution, net: &JacksonNetwork) -> Vec<f64> {
    let d = ts.dim();
    let hi = (0..d)
        .map(|i| net.mu()[i] / ts.nu[i] - 1.0)
        .fold(f64::INFINITY, f64::min);
    let (t, _) = golden_section_max(
        |t| objective(ts, net, &vec![t; d]),
        0.0,
        hi,
        1e-10,
    );
    vec![t; d]
}

/// Maximize the objective over the closure of Gamma (boundary accepted) by
/// multi-start direct search with the membership game as feasibility
/// oracle; infeasible iterates are steered back by their negative margin.
/// Returns (upper bound on log r_e*, achieving gamma).
pub fn upper_bound_gamma(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    budget: usize,
    seed: u64,
    extra_seeds: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let d = ts.dim();
    let mut best_feasible: Option<(f64, Vec<f64>)> = None;
    let mut f = |g: &[f64]| {
        let gamma = clamp_nonneg(g);
        match gamma_membership(ts, &gamma) {
            Ok(cert) if cert.in_closure() => {
                let v = objective(ts, net, &gamma);
                if best_feasible.as_ref().is_none_or(|(b, _)| v > *b) {
                    best_feasible = Some((v, gamma));
                }
                v
            }
            Ok(cert) => -1e6 + cert.slack,
            Err(_) => -1e9,
        }
    };

    let mut seeds: Vec<Vec<f64>> = vec![gamma_star(ts, net), equal_component_seed(ts, net)];
    // guaranteed-member seed from the construction at uniform weights
    let beta = vec![1.0 / d as f64; d];
    let rho = vec_mat(&beta, &ts.g);
    if let Ok(cap) = rho_eps_cap(ts, net, &rho) {
        let eps = 0.5 * cap;
        seeds.push((0..d).map(|i| eps * ts.g_diag(i) / rho[i]).collect());
    }
    seeds.extend(extra_seeds.iter().cloned());

    multi_start_maximize(&mut f, &seeds, 5, budget, seed);
    let (value, gamma) = best_feasible.ok_or_else(|| {
        Error::LpFailure("no feasible gamma found (membership oracle failure)".into())
    })?;
    Ok((-value, gamma))
}

/// Maximize the (rho, eps) bound over rho = beta G (beta in the positive
/// simplex, via softmax) and eps as a logistic fraction of the admissible
/// interval. Returns (upper bound on log r_e*, rho, eps).
pub fn upper_bound_rho_eps(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    budget: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>, f64)> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let d = ts.dim();
    let decode = |z: &[f64]| -> Option<(Vec<f64>, f64)> {
        let mx = z[..d].iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let w: Vec<f64> = z[..d].iter().map(|&v| (v - mx).min(30.0).exp()).collect();
        let sum: f64 = w.iter().sum();
        let beta: Vec<f64> = w.iter().map(|v| v / sum).collect();
        let rho = vec_mat(&beta, &ts.g);
        let cap = rho_eps_cap(ts, net, &rho).ok()?;
        let frac = 1.0 / (1.0 + (-z[d].clamp(-30.0, 30.0)).exp());
        Some((rho, frac * cap))
    };
    let mut f = |z: &[f64]| match decode(z) {
        Some((rho, eps)) if eps > 0.0 => rho_eps_value(ts, net, &rho, eps),
        _ => -1e9,
    };
    let seeds: Vec<Vec<f64>> = [-2.0, 0.0, 2.0]
        .iter()
        .map(|&w| {
            let mut z = vec![0.0; d + 1];
            z[d] = w;
            z
        })
        .collect();
    let (best_z, best_v) = multi_start_maximize(&mut f, &seeds, 5, budget, seed);
    let (rho, eps) = decode(&best_z)
        .ok_or_else(|| Error::LpFailure("rho-eps search ended infeasible".into()))?;
    Ok((-best_v, rho, eps))
}

/// Closed interval of gamma values whose per-queue drift term reaches m_G.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaInterval {
    pub i: usize,
    pub a: f64,
    pub b: f64,
    pub contains_gamma_star: bool,
}

/// Solve (gamma/G_ii)(mu_i/(1+gamma) - nu_i) = m_G per queue; the interval
/// collapses to {gamma_i*} exactly on the queues attaining m_G.
pub fn delta_intervals(ts: &TrafficSolution, net: &JacksonNetwork) -> Result<Vec<DeltaInterval>> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let m = m_g(ts, net);
    let star = gamma_star(ts, net);
    (0..ts.dim())
        .map(|i| {
            let (mu, nu) = (net.mu()[i], ts.nu[i]);
            let big_m = m * ts.g_diag(i);
            // nu g^2 - (mu - nu - M) g + M = 0
            let bq = mu - nu - big_m;
            let mut disc = bq * bq - 4.0 * nu * big_m;
            if disc < 0.0 {
                if disc > -1e-10 * bq.max(1.0).powi(2) {
                    disc = 0.0;
                } else {
                    return Err(Error::Precondition(format!(
                        "queue {i}: drift level m_G unreachable (discriminant {disc:.3e})"
                    )));
                }
            }
            let root = disc.sqrt();
            let (a, b) = ((bq - root) / (2.0 * nu), (bq + root) / (2.0 * nu));
            Ok(DeltaInterval {
                i,
                a,
                b,
                contains_gamma_star: a - 1e-12 <= star[i] && star[i] <= b + 1e-12,
            })
        })
        .collect()
}

/// Outcome of the equality search over the product of the Delta intervals.
#[derive(Debug, Clone, Serialize)]
pub struct EqualityDiagnostic {
    /// True when a gamma with gamma_i in Delta_i lies in the closure of
    /// Gamma, so the lower bound is the exact value. False is inconclusive.
    pub equality: bool,
    pub witness: Option<Vec<f64>>,
    pub delta_intervals: Vec<DeltaInterval>,
}

pub fn equality_diagnostic(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
) -> Result<EqualityDiagnostic> {
    let intervals = delta_intervals(ts, net)?;
    let d = ts.dim();
    let clamp_box = |g: &[f64]| -> Vec<f64> {
        g.iter()
            .zip(&intervals)
            .map(|(&x, iv)| x.clamp(iv.a, iv.b))
            .collect()
    };

    let check = |gamma: &[f64]| -> Result<Option<GammaCertificate>> {
        let cert = gamma_membership(ts, gamma)?;
        Ok(cert.in_closure().then_some(cert))
    };

    let star = gamma_star(ts, net);
    if let Some(_cert) = check(&star)? {
        return Ok(EqualityDiagnostic {
            equality: true,
            witness: Some(star),
            delta_intervals: intervals,
        });
    }

    // maximize the membership margin over the box
    let mut f = |g: &[f64]| {
        let gamma = clamp_box(g);
        gamma_membership(ts, &gamma).map_or(-1e9, |c| c.slack)
    };
    let mut seeds: Vec<Vec<f64>> = vec![
        intervals.iter().map(|iv| 0.5 * (iv.a + iv.b)).collect(),
        intervals.iter().map(|iv| iv.a).collect(),
        intervals.iter().map(|iv| iv.b).collect(),
    ];
    // corner sweep for small d
    if d <= 6 {
        for mask in 0..(1usize << d) {
            seeds.push(
                intervals
                    .iter()
                    .enumerate()
                    .map(|(i, iv)| if mask >> i & 1 == 1 { iv.b } else { iv.a })
                    .collect(),
            );
        }
    }
    let (best, slack) = multi_start_maximize(&mut f, &seeds, 4, 3000, 17);
    if slack >= -MEMBERSHIP_TOL {
        let witness = clamp_box(&best);
        return Ok(EqualityDiagnostic {
            equality: true,
            witness: Some(witness),
            delta_intervals: intervals,
        });
    }
    Ok(EqualityDiagnostic {
        equality: false,
        witness: None,
        delta_intervals: intervals,
    })
}

/// An exact closed-form value with the routing family that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ExactValue {
    pub value: f64,
    pub family: String,
}

/// Bundle of all bounds for one network.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralBoundsReport {
    pub lower: f64,
    pub upper_gamma: f64,
    pub gamma_argmax: Vec<f64>,
    pub upper_rho_eps: f64,
    pub rho: Vec<f64>,
    pub eps: f64,
    pub exact: Option<ExactValue>,
    pub equality_diagnosed: bool,
    pub delta_intervals: Vec<DeltaInterval>,
}

/// Run the full bound computation. The caller supplies the special-case
/// exact value when one applies; the (rho, eps) optimum is recycled as a
/// seed for the direct gamma search so the gamma bound is never looser.
pub fn spectral_bounds(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    budget: usize,
    seed: u64,
    exact: Option<ExactValue>,
) -> Result<SpectralBoundsReport> {
    let lower = lower_bound(ts, net)?;
    let (upper_rho_eps, rho, eps) = upper_bound_rho_eps(ts, net, budget, seed)?;
    let construction_gamma: Vec<f64> = (0..ts.dim())
        .map(|i| eps * ts.g_diag(i) / rho[i])
        .collect();
    let (upper_gamma, gamma_argmax) =
        upper_bound_gamma(ts, net, budget, seed, &[construction_gamma])?;
    let diag = equality_diagnostic(ts, net)?;
    Ok(SpectralBoundsReport {
        lower,
        upper_gamma,
        gamma_argmax,
        upper_rho_eps,
        rho,
        eps,
        exact,
        equality_diagnosed: diag.equality,
        delta_intervals: diag.delta_intervals,
    })
}
