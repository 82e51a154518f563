//! Jackson network model: validation, traffic equations and derived
//! linear-algebraic objects.
//!
//! A network is the triple (lambda, mu, P). Exit probabilities
//! `p_{i0} = 1 - sum_j P_{ij}` are always derived, never stored, so a
//! parsed network cannot carry inconsistent exit rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, identity, invert, mat_mul, spectral_radius, transpose, vec_mat, Matrix,
};

/// Residual tolerance for the traffic-equation and fundamental-matrix checks.
pub const SOLVER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct JacksonNetwork {
    d: usize,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    #[serde(rename = "P")]
    p: Matrix,
}

/// Strict on-disk form: exactly the keys "lambda", "mu", "P".
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    #[serde(rename = "P")]
    p: Matrix,
}

impl JacksonNetwork {
    /// Build a network from raw parts, checking only structural shape.
    /// Rate and routing value checks live in [`validate_network`].
    pub fn new(lambda: Vec<f64>, mu: Vec<f64>, p: Matrix) -> Result<Self> {
        let d = lambda.len();
        if d == 0 {
            return Err(Error::Dimension("network must have at least one queue".into()));
        }
        if mu.len() != d {
            return Err(Error::Dimension(format!(
                "mu has length {}, expected {d}",
                mu.len()
            )));
        }
        if p.len() != d || p.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!("P must be a {d}x{d} matrix")));
        }
        Ok(Self { d, lambda, mu, p })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("network file: {e}")))?;
        Self::new(file.lambda, file.mu, file.p)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "lambda": self.lambda,
            "mu": self.mu,
            "P": self.p,
        }))
        .expect("network serialization")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn routing(&self) -> &Matrix {
        &self.p
    }

    /// Derived exit probability p_{i0}.
    pub fn exit_probability(&self, i: usize) -> f64 {
        (1.0 - self.p[i].iter().sum::<f64>()).max(0.0)
    }
}

/// One violated assumption, with the offending index where applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    DimensionMismatch { detail: String },
    NegativeArrivalRate { queue: usize },
    NonPositiveServiceRate { queue: usize },
    NoExternalArrivals,
    SelfLoop { queue: usize },
    RoutingEntryOutOfRange { from: usize, to: usize },
    RowSumExceedsOne { queue: usize, sum: f64 },
    /// (A1): spectral radius of P is not strictly below one.
    SpectralRadiusNotSubunit { radius: f64 },
    /// (A2): queue unreachable from every queue with external arrivals.
    UnreachableQueue { queue: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check assumptions (A1) and (A2) plus the structural invariants.
///
/// Structural checks run first; the scan does not stop at the first
/// failure, all violations are collected.
pub fn validate_network(net: &JacksonNetwork) -> ValidationReport {
    let d = net.d;
    let mut violations = Vec::new();

    for i in 0..d {
        if net.lambda[i] < 0.0 {
            violations.push(Violation::NegativeArrivalRate { queue: i });
        }
        if net.mu[i] <= 0.0 {
            violations.push(Violation::NonPositiveServiceRate { queue: i });
        }
    }
    if net.lambda.iter().all(|&l| l <= 0.0) {
        violations.push(Violation::NoExternalArrivals);
    }
    for i in 0..d {
        if net.p[i][i] != 0.0 {
            violations.push(Violation::SelfLoop { queue: i });
        }
        let mut sum = 0.0;
        for j in 0..d {
            let pij = net.p[i][j];
            if !(0.0..=1.0).contains(&pij) {
                violations.push(Violation::RoutingEntryOutOfRange { from: i, to: j });
            }
            sum += pij;
        }
        if sum > 1.0 + 1e-12 {
            violations.push(Violation::RowSumExceedsOne { queue: i, sum });
        }
    }

    // (A1)
    let radius = spectral_radius(&net.p);
    if radius >= 1.0 - 1e-9 {
        violations.push(Violation::SpectralRadiusNotSubunit { radius });
    }

    // (A2): reachability in the routing digraph from queues with lambda_j > 0
    let mut reachable = vec![false; d];
    let mut stack: Vec<usize> = (0..d).filter(|&j| net.lambda[j] > 0.0).collect();
    for &j in &stack {
        reachable[j] = true;
    }
    while let Some(j) = stack.pop() {
        for i in 0..d {
            if net.p[j][i] > 0.0 && !reachable[i] {
                reachable[i] = true;
                stack.push(i);
            }
        }
    }
    for (i, ok) in reachable.iter().enumerate() {
        if !ok {
            violations.push(Violation::UnreachableQueue { queue: i });
        }
    }

    ValidationReport { violations }
}

/// Solution of the traffic equations together with the fundamental matrix
/// G = (Id - P)^{-1}, hitting probabilities Q and the stability verdict.
#[derive(Debug, Clone, Serialize)]
pub struct TrafficSolution {
    pub nu: Vec<f64>,
    pub g: Matrix,
    pub q: Matrix,
    pub routing_spectral_radius: f64,
    pub stable: bool,
}

impl TrafficSolution {
    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn g_diag(&self, i: usize) -> f64 {
        self.g[i][i]
    }
}

/// Solve nu = lambda + nu P, invert Id - P and derive Q_{ji} = G_{ji}/G_{ii}.
pub fn solve_traffic(net: &JacksonNetwork) -> Result<TrafficSolution> {
    let d = net.d;
    let report = validate_network(net);
    if !report.passed() {
        return Err(Error::Validation(format!("{:?}", report.violations)));
    }
    // nu (Id - P) = lambda  <=>  (Id - P)^T nu^T = lambda^T
    let mut id_minus_p = identity(d);
    for i in 0..d {
        for j in 0..d {
            id_minus_p[i][j] -= net.p[i][j];
        }
    }
    let nu = linalg::solve_linear(&transpose(&id_minus_p), &net.lambda)?;
    let g = invert(&id_minus_p)?;
    let mut q = vec![vec![0.0; d]; d];
    for j in 0..d {
        for i in 0..d {
            q[j][i] = g[j][i] / g[i][i];
        }
    }
    let residual = {
        let nu_p = vec_mat(&nu, &net.p);
        (0..d)
            .map(|j| (nu[j] - net.lambda[j] - nu_p[j]).abs())
            .fold(0.0, f64::max)
    };
    let scale = nu.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
    if residual > SOLVER_TOL * scale {
        return Err(Error::Singular(format!(
            "traffic residual {residual:.3e} above tolerance"
        )));
    }
    let stable = (0..d).all(|i| nu[i] < net.mu[i]);
    Ok(TrafficSolution {
        nu,
        g,
        q,
        routing_spectral_radius: spectral_radius(&net.p),
        stable,
    })
}

/// Spectral radius of the routing matrix.
pub fn routing_spectral_radius(p: &Matrix) -> f64 {
    spectral_radius(p)
}

/// The contraction factor R(rho) = max_i (rho P)_i / rho_i.
pub fn rho_contraction(p: &Matrix, rho: &[f64]) -> Result<f64> {
    if rho.len() != p.len() {
        return Err(Error::Dimension("rho length must match routing order".into()));
    }
    if rho.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidArgument("rho must have positive components".into()));
    }
    let rho_p = vec_mat(rho, p);
    Ok(rho_p
        .iter()
        .zip(rho)
        .map(|(num, den)| num / den)
        .fold(0.0, f64::max))
}

/// Stationary-law time reversal: again a Jackson network, with
/// lambda~_i = nu_i p_{i0}, mu~ = mu, p~_{ij} = nu_j p_{ji} / nu_i.
pub fn time_reverse(net: &JacksonNetwork, ts: &TrafficSolution) -> Result<JacksonNetwork> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let d = net.d;
    let lambda: Vec<f64> = (0..d).map(|i| ts.nu[i] * net.exit_probability(i)).collect();
    let mut p = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            p[i][j] = ts.nu[j] * net.p[j][i] / ts.nu[i];
        }
    }
    JacksonNetwork::new(lambda, net.mu.clone(), p)
}

/// Product-form stationary probability of a single state (Jackson's theorem).
pub fn stationary_probability(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    x: &[u64],
) -> Result<f64> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    if x.len() != net.d {
        return Err(Error::Dimension("state length must match network order".into()));
    }
    let mut prob = 1.0;
    for i in 0..net.d {
        let r = ts.nu[i] / net.mu[i];
        prob *= r.powi(x[i] as i32) * (1.0 - r);
    }
    Ok(prob)
}

/// Column-support classification of the routing matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchingClass {
    None,
    Branching,
    TransposedBranching,
    Both,
}

fn is_branching(p: &Matrix) -> bool {
    let d = p.len();
    (0..d).all(|i| (0..d).filter(|&j| p[j][i] > 0.0).count() <= 1)
}

/// A matrix is branching when every column has at most one positive entry.
pub fn detect_branching(p: &Matrix) -> BranchingClass {
    match (is_branching(p), is_branching(&transpose(p))) {
        (true, true) => BranchingClass::Both,
        (true, false) => BranchingClass::Branching,
        (false, true) => BranchingClass::TransposedBranching,
        (false, false) => BranchingClass::None,
    }
}

/// Truncated Neumann series sum_{n=0}^{N} P^n; test oracle for G.
pub fn neumann_series(p: &Matrix, terms: usize) -> Matrix {
    let d = p.len();
    let mut sum = identity(d);
    let mut power = identity(d);
    for _ in 0..terms {
        power = mat_mul(&power, p);
        sum = linalg::mat_add(&sum, &power);
    }
    sum
}
