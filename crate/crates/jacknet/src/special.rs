//! Closed-form results for routing families where the two general bounds
//! are known to coincide: a single queue, two queues, branching routing,
//! fully symmetric routing, and the three-node circle.

use serde::Serialize;

use crate::bounds::{m_g, ExactValue};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::{detect_branching, solve_traffic, BranchingClass, JacksonNetwork, TrafficSolution};
use crate::optim::golden_section_max;
use crate::testnets::symmetric_routing;

/// log r_e* for a single queue: -(sqrt(mu) - sqrt(lambda))^2.
pub fn exact_d1(net: &JacksonNetwork, ts: &TrafficSolution) -> Result<f64> {
    if net.dim() != 1 {
        return Err(Error::Dimension(format!("expected 1 queue, got {}", net.dim())));
    }
    if !ts.stable {
        return Err(Error::Unstable);
    }
    Ok(-(net.mu()[0].sqrt() - net.lambda()[0].sqrt()).powi(2))
}

/// log r_e* for two queues:
/// -(1 - p_12 p_21) min{(sqrt(mu_1)-sqrt(nu_1))^2, (sqrt(mu_2)-sqrt(nu_2))^2}.
pub fn exact_d2(net: &JacksonNetwork, ts: &TrafficSolution) -> Result<f64> {
    if net.dim() != 2 {
        return Err(Error::Dimension(format!("expected 2 queues, got {}", net.dim())));
    }
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let cycle = net.routing()[0][1] * net.routing()[1][0];
    let m = (0..2)
        .map(|i| (net.mu()[i].sqrt() - ts.nu[i].sqrt()).powi(2))
        .fold(f64::INFINITY, f64::min);
    Ok(-(1.0 - cycle) * m)
}

/// Exact value when P or its transpose is branching: the lower bound is
/// attained. G of the original network is used in both orientations (the
/// time-reversal argument transfers only the equality, not the matrix).
pub fn branching_bound(net: &JacksonNetwork, ts: &TrafficSolution) -> Result<Option<f64>> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    if detect_branching(net.routing()) == BranchingClass::None {
        return Ok(None);
    }
    Ok(Some(-m_g(ts, net)))
}

/// Derived quantities for a fully symmetric routing matrix (all
/// off-diagonal entries equal to p).
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricProfile {
    pub d: usize,
    pub p: f64,
    /// Common off-diagonal hitting probability q = p/(1-(d-2)p).
    pub q: f64,
    /// Common diagonal of G: (1 - (d-1)p^2/(1-(d-2)p))^{-1}.
    pub g_diag: f64,
    /// min_i (sqrt(mu_i) - sqrt(nu_i))^2.
    pub m: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_hat: f64,
    /// gamma_hat_i = min{b_i, a_hat}, the Sigma-minimizing point of the
    /// interval box.
    pub gamma_hat: Vec<f64>,
}

/// Entry tolerance for routing-pattern detection.
const PATTERN_TOL: f64 = 1e-12;

/// Recognize a fully symmetric routing matrix and precompute the interval
/// data; `None` when the routing is not of this form.
pub fn detect_symmetric(
    net: &JacksonNetwork,
    ts: &TrafficSolution,
) -> Result<Option<SymmetricProfile>> {
    let d = net.dim();
    if d < 2 {
        return Ok(None);
    }
    let p = net.routing()[0][1];
    for i in 0..d {
        for j in 0..d {
            let expected = if i == j { 0.0 } else { p };
            if (net.routing()[i][j] - expected).abs() > PATTERN_TOL {
                return Ok(None);
            }
        }
    }
    if !(p > 0.0 && p < 1.0 / (d as f64 - 1.0)) {
        return Ok(None);
    }
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let q = p / (1.0 - (d as f64 - 2.0) * p);
    let g_diag = 1.0 / (1.0 - (d as f64 - 1.0) * p * p / (1.0 - (d as f64 - 2.0) * p));
    let m = (0..d)
        .map(|i| (net.mu()[i].sqrt() - ts.nu[i].sqrt()).powi(2))
        .fold(f64::INFINITY, f64::min);
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for i in 0..d {
        let (mu, nu) = (net.mu()[i], ts.nu[i]);
        let mid = mu + nu - m;
        let mut disc = mid * mid - 4.0 * nu * mu;
        if disc < 0.0 {
            // disc is a difference of two near-equal products; scale the
            // zero-clamp with their magnitude
            if disc > -1e-7 * (mid * mid).max(4.0 * nu * mu).max(1.0) {
                disc = 0.0;
            } else {
                return Err(Error::Precondition(format!(
                    "queue {i}: interval for level m is empty (discriminant {disc:.3e})"
                )));
            }
        }
        let root = disc.sqrt();
        a.push((mu - nu - m - root) / (2.0 * nu));
        b.push((mu - nu - m + root) / (2.0 * nu));
    }
    let a_hat = a.iter().fold(f64::NEG_INFINITY, |acc, &x| acc.max(x));
    let gamma_hat: Vec<f64> = b.iter().map(|&bi| bi.min(a_hat)).collect();
    Ok(Some(SymmetricProfile {
        d,
        p,
        q,
        g_diag,
        m,
        a,
        b,
        a_hat,
        gamma_hat,
    }))
}

/// Sigma(gamma) = sum_j [max_i log(1+q gamma_i) - log(1+q gamma_j)]
///                     / [log(1+gamma_j) - log(1+q gamma_j)].
pub fn sigma(profile: &SymmetricProfile, gamma: &[f64]) -> Result<f64> {
    if gamma.len() != profile.d {
        return Err(Error::Dimension("gamma length must match network order".into()));
    }
    if let Some(j) = gamma.iter().position(|&g| g <= 0.0) {
        return Err(Error::InvalidArgument(format!("gamma_{j} must be positive")));
    }
    let q = profile.q;
    let top = gamma
        .iter()
        .map(|&g| (q * g).ln_1p())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(gamma
        .iter()
        .map(|&g| (top - (q * g).ln_1p()) / (g.ln_1p() - (q * g).ln_1p()))
        .sum())
}

/// Membership criterion for symmetric routing: all gamma_i > 0 and
/// Sigma(gamma) < 1. Cross-validation oracle for the game-based test.
pub fn symmetric_membership(profile: &SymmetricProfile, gamma: &[f64]) -> Result<bool> {
    if gamma.len() != profile.d {
        return Err(Error::Dimension("gamma length must match network order".into()));
    }
    if gamma.iter().any(|&g| g <= 0.0) {
        return Ok(false);
    }
    Ok(sigma(profile, gamma)? < 1.0)
}

/// Result of the exactness test for symmetric routing.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricEquality {
    /// True iff Sigma(gamma_hat) <= 1, which decides equality of the two
    /// general bounds.
    pub holds: bool,
    pub gamma_hat: Vec<f64>,
    pub sigma_hat: f64,
    /// The exact value -m/G_diag when `holds`.
    pub exact: Option<f64>,
    /// Shortcut: all mu_i/nu_i equal.
    pub equal_ratios: bool,
    /// Shortcut: some queue has maximal nu and minimal mu simultaneously.
    pub dominant_queue: bool,
}

pub fn symmetric_equality(
    profile: &SymmetricProfile,
    net: &JacksonNetwork,
    ts: &TrafficSolution,
) -> Result<SymmetricEquality> {
    let sigma_hat = sigma(profile, &profile.gamma_hat)?;
    let holds = sigma_hat <= 1.0 + 1e-12;
    let d = profile.d;
    let ratios: Vec<f64> = (0..d).map(|i| net.mu()[i] / ts.nu[i]).collect();
    let equal_ratios = ratios
        .iter()
        .all(|r| (r - ratios[0]).abs() <= 1e-9 * ratios[0]);
    let dominant_queue = (0..d).any(|i0| {
        (0..d).all(|i| {
            net.mu()[i] >= net.mu()[i0] - 1e-12 && ts.nu[i] <= ts.nu[i0] + 1e-12
        })
    });
    Ok(SymmetricEquality {
        holds,
        gamma_hat: profile.gamma_hat.clone(),
        sigma_hat,
        exact: holds.then_some(-profile.m / profile.g_diag),
        equal_ratios,
        dominant_queue,
    })
}

/// The d=4 family with no external arrivals at queue 1 and equal
/// sqrt(mu_i) - sqrt(nu_i) = t; the family along which the equality
/// criterion eventually fails as p -> 0, t -> infinity.
pub fn skewed_symmetric_family(
    p: f64,
    t: f64,
) -> Result<(JacksonNetwork, TrafficSolution, SymmetricProfile)> {
    if !(p > 0.0 && p < 1.0 / 3.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (0, 1/3), got {p}")));
    }
    if t <= 0.0 {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let lambda = vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
    let routing = symmetric_routing(4, p);
    // nu does not depend on mu; solve with placeholder rates first
    let probe = JacksonNetwork::new(lambda.clone(), vec![1e9; 4], routing.clone())?;
    let nu = solve_traffic(&probe)?.nu;
    let mu: Vec<f64> = nu.iter().map(|&n| (n.sqrt() + t).powi(2)).collect();
    let net = JacksonNetwork::new(lambda, mu, routing)?;
    let ts = solve_traffic(&net)?;
    let profile = detect_symmetric(&net, &ts)?
        .ok_or_else(|| Error::PatternMismatch("expected symmetric routing".into()))?;
    Ok((net, ts, profile))
}

/// Closed-form fundamental matrix of the three-node circle.
pub fn circle_g(p: f64, q: f64) -> Matrix {
    let det = 1.0 - p.powi(3) - q.powi(3) - 3.0 * p * q;
    let entries = [1.0 - p * q, q * q + p, p * p + q];
    (0..3)
        .map(|i| (0..3).map(|j| entries[(3 + j - i) % 3] / det).collect())
        .collect()
}

/// Bounds for the three-node circle.
#[derive(Debug, Clone, Serialize)]
pub struct CircleBounds {
    pub p: f64,
    pub q: f64,
    pub factor: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
}

/// Recognize the circulant pattern with forward probability p and backward
/// probability q (p to the next node, q to the one after).
fn detect_circle(net: &JacksonNetwork) -> Result<(f64, f64)> {
    if net.dim() != 3 {
        return Err(Error::PatternMismatch(format!(
            "circle form needs 3 queues, got {}",
            net.dim()
        )));
    }
    let p = net.routing()[0][1];
    let q = net.routing()[0][2];
    for i in 0..3 {
        let row = &net.routing()[i];
        if row[i].abs() > PATTERN_TOL
            || (row[(i + 1) % 3] - p).abs() > PATTERN_TOL
            || (row[(i + 2) % 3] - q).abs() > PATTERN_TOL
        {
            return Err(Error::PatternMismatch(format!(
                "row {i} does not follow the circulant pattern"
            )));
        }
    }
    Ok((p, q))
}

pub fn circle_bounds(net: &JacksonNetwork, ts: &TrafficSolution) -> Result<CircleBounds> {
    let (p, q) = detect_circle(net)?;
    if !(p > 0.0 && p < q && p + q < 1.0) {
        return Err(Error::Precondition(format!(
            "circle parameters must satisfy 0 < p < q with p + q < 1, got p={p}, q={q}"
        )));
    }
    if !ts.stable {
        return Err(Error::Unstable);
    }
    let factor = (1.0 - p.powi(3) - q.powi(3) - 3.0 * p * q) / (1.0 - p * q);
    let m = (0..3)
        .map(|i| (net.mu()[i].sqrt() - ts.nu[i].sqrt()).powi(2))
        .fold(f64::INFINITY, f64::min);
    let lower = -factor * m;
    let hi = (0..3)
        .map(|i| net.mu()[i] / ts.nu[i] - 1.0)
        .fold(f64::INFINITY, f64::min);
    let (_, sup) = golden_section_max(
        |t| {
            (0..3)
                .map(|i| t * (net.mu()[i] / (1.0 + t) - ts.nu[i]))
                .fold(f64::INFINITY, f64::min)
        },
        0.0,
        hi,
        1e-12,
    );
    let upper = -factor * sup;
    let exact = min_rate_conditions_hold(net, ts).then_some(lower);
    Ok(CircleBounds {
        p,
        q,
        factor,
        lower,
        upper,
        exact,
    })
}

/// Check whether some queue i0 attains min_i (sqrt(mu_i) - sqrt(nu_i)) and
/// also min_i (mu_i/sqrt(mu_i0) - nu_i/sqrt(nu_i0)) = sqrt(mu_i0) - sqrt(nu_i0).
fn min_rate_conditions_hold(net: &JacksonNetwork, ts: &TrafficSolution) -> bool {
    let d = net.dim();
    let gap: Vec<f64> = (0..d).map(|i| net.mu()[i].sqrt() - ts.nu[i].sqrt()).collect();
    let min_gap = gap.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    (0..d).any(|i0| {
        if (gap[i0] - min_gap).abs() > 1e-9 * min_gap.abs().max(1.0) {
            return false;
        }
        let second = (0..d)
            .map(|i| net.mu()[i] / net.mu()[i0].sqrt() - ts.nu[i] / ts.nu[i0].sqrt())
            .fold(f64::INFINITY, f64::min);
        (second - gap[i0]).abs() <= 1e-9 * gap[i0].abs().max(1.0)
    })
}

/// Pick the applicable closed form, if any. Every valid two-queue routing
/// is also branching (zero diagonal leaves at most one positive entry per
/// column), so the branching label takes precedence and the dedicated
/// two-queue formula only serves as a cross-check.
pub fn dispatch_exact(net: &JacksonNetwork, ts: &TrafficSolution) -> Result<Option<ExactValue>> {
    if !ts.stable {
        return Err(Error::Unstable);
    }
    if net.dim() == 1 {
        return Ok(Some(ExactValue {
            value: exact_d1(net, ts)?,
            family: "single_queue".into(),
        }));
    }
    if let Some(value) = branching_bound(net, ts)? {
        return Ok(Some(ExactValue {
            value,
            family: "branching".into(),
        }));
    }
    if net.dim() == 2 {
        return Ok(Some(ExactValue {
            value: exact_d2(net, ts)?,
            family: "two_queues".into(),
        }));
    }
    if let Some(profile) = detect_symmetric(net, ts)? {
        let eq = symmetric_equality(&profile, net, ts)?;
        if let Some(value) = eq.exact {
            return Ok(Some(ExactValue {
                value,
                family: "symmetric".into(),
            }));
        }
        return Ok(None);
    }
    if let Ok(cb) = circle_bounds(net, ts) {
        if let Some(value) = cb.exact {
            return Ok(Some(ExactValue {
                value,
                family: "circle".into(),
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::lower_bound;
    use crate::linalg::{invert, max_abs_diff};
    use crate::lyapunov::{gamma_membership, Verdict};
    use crate::network::solve_traffic;
    use crate::testnets::{circle_routing, net_a, net_b, net_c, random_stable_network, seeded_rng};
    use rand::Rng;

    #[test]
    fn d1_examples() {
        let net = JacksonNetwork::new(vec![1.0], vec![4.0], vec![vec![0.0]]).unwrap();
        let ts = solve_traffic(&net).unwrap();
        assert!((exact_d1(&net, &ts).unwrap() + 1.0).abs() < 1e-12);
        let net9 = JacksonNetwork::new(vec![1.0], vec![9.0], vec![vec![0.0]]).unwrap();
        let ts9 = solve_traffic(&net9).unwrap();
        assert!((exact_d1(&net9, &ts9).unwrap() + 4.0).abs() < 1e-12);
        assert!(exact_d1(&net_a(), &solve_traffic(&net_a()).unwrap()).is_err());
    }

    #[test]
    fn d2_examples() {
        let net = net_a();
        let ts = solve_traffic(&net).unwrap();
        assert!((exact_d2(&net, &ts).unwrap() + 1.0).abs() < 1e-12);

        let sym = JacksonNetwork::new(
            vec![1.0, 1.0],
            vec![16.0, 16.0],
            vec![vec![0.0, 0.5], vec![0.5, 0.0]],
        )
        .unwrap();
        let tss = solve_traffic(&sym).unwrap();
        assert!((tss.nu[0] - 2.0).abs() < 1e-12);
        let expected = -0.75 * (4.0 - 2f64.sqrt()).powi(2);
        assert!((exact_d2(&sym, &tss).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn branching_examples() {
        let net = net_a();
        let ts = solve_traffic(&net).unwrap();
        assert!((branching_bound(&net, &ts).unwrap().unwrap() + 1.0).abs() < 1e-12);

        let tree = JacksonNetwork::new(
            vec![1.0, 0.0, 0.0],
            vec![4.0, 4.0, 4.0],
            vec![
                vec![0.0, 0.5, 0.4],
                vec![0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let tst = solve_traffic(&tree).unwrap();
        assert_eq!(tst.nu, vec![1.0, 0.5, 0.4]);
        for i in 0..3 {
            assert!((tst.g[i][i] - 1.0).abs() < 1e-12);
        }
        assert!((branching_bound(&tree, &tst).unwrap().unwrap() + 1.0).abs() < 1e-12);

        let circle = net_c();
        let tsc = solve_traffic(&circle).unwrap();
        assert!(branching_bound(&circle, &tsc).unwrap().is_none());
    }

    #[test]
    fn d2_dispatcher_coherence() {
        let mut rng = seeded_rng(41);
        for _ in 0..20 {
            let net = random_stable_network(&mut rng, 2);
            let ts = solve_traffic(&net).unwrap();
            let a = exact_d2(&net, &ts).unwrap();
            let b = branching_bound(&net, &ts).unwrap().unwrap();
            let c = lower_bound(&ts, &net).unwrap();
            assert!((a - b).abs() < 1e-10);
            assert!((b - c).abs() < 1e-10);
        }
    }

    fn profile_b() -> (JacksonNetwork, TrafficSolution, SymmetricProfile) {
        let net = net_b();
        let ts = solve_traffic(&net).unwrap();
        let profile = detect_symmetric(&net, &ts).unwrap().unwrap();
        (net, ts, profile)
    }

    #[test]
    fn symmetric_profile_values() {
        let (_, _, profile) = profile_b();
        assert!((profile.q - 1.0 / 3.0).abs() < 1e-12);
        assert!((profile.g_diag - 1.2).abs() < 1e-12);
        assert!((profile.m - (3.0 - 2f64.sqrt()).powi(2)).abs() < 1e-12);
        // zero discriminant: all queues attain m, so a = b = gamma*
        let star = 4.5f64.sqrt() - 1.0;
        for i in 0..3 {
            assert!((profile.a[i] - star).abs() < 1e-7);
            assert!((profile.b[i] - star).abs() < 1e-7);
            assert!((profile.gamma_hat[i] - star).abs() < 1e-7);
        }
    }

    #[test]
    fn sigma_examples() {
        let (_, _, profile) = profile_b();
        assert!(sigma(&profile, &[0.7, 0.7, 0.7]).unwrap().abs() < 1e-12);
        let s1 = sigma(&profile, &[2.0, 1.0, 1.0]).unwrap();
        let expected1 = 2.0 * ((5f64 / 3.0).ln() - (4f64 / 3.0).ln())
            / (2f64.ln() - (4f64 / 3.0).ln());
        assert!((s1 - expected1).abs() < 1e-12);
        assert!((s1 - 1.1007).abs() < 1e-4);
        let s2 = sigma(&profile, &[2.0, 2.0, 1.0]).unwrap();
        assert!((s2 - 0.5503).abs() < 1e-4);
        assert!(sigma(&profile, &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn symmetric_membership_matches_game() {
        let mut rng = seeded_rng(42);
        for _ in 0..100 {
            let d = rng.gen_range(3..=5);
            let p = rng.gen_range(0.05..0.9) / (d as f64 - 1.0);
            let lambda: Vec<f64> = (0..d).map(|_| rng.gen_range(0.3..2.0)).collect();
            let probe =
                JacksonNetwork::new(lambda.clone(), vec![1e9; d], symmetric_routing(d, p)).unwrap();
            let nu = solve_traffic(&probe).unwrap().nu;
            let mu: Vec<f64> = nu.iter().map(|&n| n * rng.gen_range(1.5..6.0)).collect();
            let net = JacksonNetwork::new(lambda, mu, symmetric_routing(d, p)).unwrap();
            let ts = solve_traffic(&net).unwrap();
            let profile = detect_symmetric(&net, &ts).unwrap().unwrap();
            let gamma: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..4.0)).collect();
            let s = sigma(&profile, &gamma).unwrap();
            if (s - 1.0).abs() < 1e-7 {
                continue;
            }
            let by_sigma = symmetric_membership(&profile, &gamma).unwrap();
            let by_game = gamma_membership(&ts, &gamma).unwrap().verdict == Verdict::Member;
            assert_eq!(by_sigma, by_game, "sigma {s} at gamma {gamma:?}");
        }
    }

    #[test]
    fn symmetric_equality_reference() {
        let (net, ts, profile) = profile_b();
        let eq = symmetric_equality(&profile, &net, &ts).unwrap();
        assert!(eq.holds);
        assert!(eq.equal_ratios);
        let expected = -(5.0 / 6.0) * (3.0 - 2f64.sqrt()).powi(2);
        assert!((eq.exact.unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn gamma_hat_minimizes_sigma() {
        // unequal service rates so the intervals have interior
        let net = JacksonNetwork::new(
            vec![1.0, 1.0, 1.0],
            vec![9.0, 16.0, 25.0],
            symmetric_routing(3, 0.25),
        )
        .unwrap();
        let ts = solve_traffic(&net).unwrap();
        let profile = detect_symmetric(&net, &ts).unwrap().unwrap();
        let s_hat = sigma(&profile, &profile.gamma_hat).unwrap();
        let mut rng = seeded_rng(43);
        for _ in 0..1000 {
            let gamma: Vec<f64> = (0..3)
                .map(|i| rng.gen_range(profile.a[i]..=profile.b[i]))
                .collect();
            let s = sigma(&profile, &gamma).unwrap();
            assert!(s_hat <= s + 1e-9, "sigma_hat {s_hat} > sigma {s} at {gamma:?}");
        }
    }

    #[test]
    fn skewed_family_exceeds_one() {
        let (_, _, profile) = skewed_symmetric_family(1e-3, 1e4).unwrap();
        let s = sigma(&profile, &profile.gamma_hat).unwrap();
        assert!(s > 1.0, "Sigma = {s}");

        // iterated limit is 1.5, approached from below along the grid
        let mut prev = 0.0;
        for (p, t) in [(1e-2, 1e2), (1e-3, 1e4), (1e-4, 1e6)] {
            let (_, _, prof) = skewed_symmetric_family(p, t).unwrap();
            let s = sigma(&prof, &prof.gamma_hat).unwrap();
            assert!(s > prev);
            assert!(s < 1.5);
            prev = s;
        }
    }

    #[test]
    fn circle_reference_values() {
        let net = net_c();
        let ts = solve_traffic(&net).unwrap();
        let cb = circle_bounds(&net, &ts).unwrap();
        assert!((cb.factor - 0.785 / 0.94).abs() < 1e-9);
        let exact = -cb.factor * (4.0 - 2f64.sqrt()).powi(2);
        assert!((cb.exact.unwrap() - exact).abs() < 1e-12);
        assert!((exact + 5.5838).abs() < 1e-3);
        assert!(cb.lower <= cb.upper + 1e-12);
        assert!((cb.upper - cb.lower).abs() < 1e-9);

        let g = circle_g(0.2, 0.3);
        assert!((g[0][0] - 0.94 / 0.785).abs() < 1e-9);
        assert!(max_abs_diff(&g, &ts.g) < 1e-10);
    }

    #[test]
    fn circle_g_matches_inversion() {
        let mut rng = seeded_rng(44);
        for _ in 0..50 {
            let p: f64 = rng.gen_range(0.01..0.45);
            let q: f64 = rng.gen_range(p + 0.01..(1.0 - p).min(0.95));
            let routing = circle_routing(p, q);
            let mut id_minus = crate::linalg::identity(3);
            for i in 0..3 {
                for j in 0..3 {
                    id_minus[i][j] -= routing[i][j];
                }
            }
            let direct = invert(&id_minus).unwrap();
            assert!(max_abs_diff(&circle_g(p, q), &direct) < 1e-10, "p={p} q={q}");
        }
    }

    #[test]
    fn circle_pattern_errors() {
        let equal = JacksonNetwork::new(
            vec![1.0, 1.0, 1.0],
            vec![16.0, 16.0, 16.0],
            circle_routing(0.25, 0.25),
        )
        .unwrap();
        let ts_eq = solve_traffic(&equal).unwrap();
        assert!(matches!(circle_bounds(&equal, &ts_eq), Err(Error::Precondition(_))));

        let reversed = JacksonNetwork::new(
            vec![1.0, 1.0, 1.0],
            vec![16.0, 16.0, 16.0],
            circle_routing(0.3, 0.2),
        )
        .unwrap();
        let ts_rev = solve_traffic(&reversed).unwrap();
        assert!(matches!(circle_bounds(&reversed, &ts_rev), Err(Error::Precondition(_))));

        assert!(matches!(
            circle_bounds(&net_a(), &solve_traffic(&net_a()).unwrap()),
            Err(Error::PatternMismatch(_))
        ));
    }

    #[test]
    fn dispatch_families() {
        let cases: Vec<(JacksonNetwork, &str)> = vec![
            (net_a(), "branching"),
            (net_b(), "symmetric"),
            (net_c(), "circle"),
        ];
        for (net, family) in cases {
            let ts = solve_traffic(&net).unwrap();
            let exact = dispatch_exact(&net, &ts).unwrap().unwrap();
            assert_eq!(exact.family, family);
            let lb = lower_bound(&ts, &net).unwrap();
            assert!((exact.value - lb).abs() < 1e-9, "{family}: {} vs {lb}", exact.value);
        }
    }
}
