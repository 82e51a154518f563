//! Multiplicative Lyapunov functions h(x) = sum_i exp(arrow_i . x).
//!
//! The arrow vectors have components log(1 + Q_{ji} gamma_i). Membership of
//! gamma in the admissible set Gamma is decided per queue by a small matrix
//! game whose value is the strictness margin; the optimal row strategy is
//! the simplex witness theta_i and the optimal column strategy, when the
//! margin is negative, is a violating direction on the coordinate face.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::solve_matrix_game;
use crate::generator::guarded_exp;
use crate::linalg::Matrix;
use crate::network::{rho_contraction, JacksonNetwork, TrafficSolution};
use crate::optim::bisect;

/// Strictness tolerance separating member / boundary / non-member.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Arrow matrix: row i is the vector with components log(1 + Q_{ji} gamma_i).
pub fn gamma_arrows(ts: &TrafficSolution, gamma: &[f64]) -> Result<Matrix> {
    let d = ts.dim();
    if gamma.len() != d {
        return Err(Error::Dimension("gamma length must match network order".into()));
    }
    if let Some(i) = gamma.iter().position(|&g| g < 0.0) {
        return Err(Error::InvalidArgument(format!("gamma_{i} is negative")));
    }
    Ok((0..d)
        .map(|i| (0..d).map(|j| (1.0 + ts.q[j][i] * gamma[i]).ln()).collect())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Boundary,
}

/// Membership certificate for a candidate gamma.
#[derive(Debug, Clone, Serialize)]
pub struct GammaCertificate {
    pub gamma: Vec<f64>,
    pub arrows: Matrix,
    pub verdict: Verdict,
    /// Per-queue simplex witnesses theta_i (optimal mixtures).
    pub witnesses: Vec<Vec<f64>>,
    /// On a failed or tight queue i: (i, v) with v >= 0, v_i = 0 and
    /// arrow_i . v >= max_j arrow_j . v.
    pub violation: Option<(usize, Vec<f64>)>,
    /// Minimal strictness margin across queues.
    pub slack: f64,
}

impl GammaCertificate {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    pub fn in_closure(&self) -> bool {
        matches!(self.verdict, Verdict::Member | Verdict::Boundary)
    }
}

/// Decide whether gamma belongs to Gamma.
///
/// For each queue i the margin is the value of the game
/// max_{theta in simplex over j != i} min_{k != i}
///   sum_j theta_j (arrow_j - arrow_i)_k,
/// positive exactly when some mixture of the other arrows strictly
/// dominates arrow_i off the i-th coordinate, and negative exactly when
/// some face direction v (the optimal column mixture) has arrow_i . v
/// strictly above every other arrow_j . v.
pub fn gamma_membership(ts: &TrafficSolution, gamma: &[f64]) -> Result<GammaCertificate> {
    let d = ts.dim();
    let arrows = gamma_arrows(ts, gamma)?;

    if d == 1 {
        // Gamma is (0, inf): the single arrow must be nonzero.
        let slack = (1.0 + gamma[0]).ln();
        let verdict = if slack > MEMBERSHIP_TOL {
            Verdict::Member
        } else {
            Verdict::Boundary
        };
        return Ok(GammaCertificate {
            gamma: gamma.to_vec(),
            arrows,
            verdict,
            witnesses: vec![vec![1.0]],
            violation: if verdict == Verdict::Member {
                None
            } else {
                Some((0, vec![0.0]))
            },
            slack,
        });
    }

    let mut witnesses = Vec::with_capacity(d);
    let mut slack = f64::INFINITY;
    let mut worst: Option<(usize, Vec<f64>)> = None;
    for i in 0..d {
        let cols: Vec<usize> = (0..d).filter(|&k| k != i).collect();
        let m: Vec<Vec<f64>> = cols
            .iter()
            .map(|&j| cols.iter().map(|&k| arrows[j][k] - arrows[i][k]).collect())
            .collect();
        let sol = solve_matrix_game(&m)?;
        let mut theta = vec![0.0; d];
        for (&j, &w) in cols.iter().zip(&sol.row_strategy) {
            theta[j] = w;
        }
        witnesses.push(theta);
        if sol.value < slack {
            slack = sol.value;
            let mut v = vec![0.0; d];
            for (&k, &w) in cols.iter().zip(&sol.col_strategy) {
                v[k] = w;
            }
            worst = Some((i, v));
        }
    }

    let verdict = if slack > MEMBERSHIP_TOL {
        Verdict::Member
    } else if slack >= -MEMBERSHIP_TOL {
        Verdict::Boundary
    } else {
        Verdict::NonMember
    };
    Ok(GammaCertificate {
        gamma: gamma.to_vec(),
        arrows,
        verdict,
        witnesses,
        violation: if verdict == Verdict::Member { None } else { worst },
        slack,
    })
}

/// The unique positive root of log(1+x) = r x for r in (0,1); infinite at
/// r = 0 (the inequality log(1+x) >= r x then holds for every x > 0).
pub fn x_rho(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "contraction factor must lie in [0,1), got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(f64::INFINITY);
    }
    let f = |x: f64| x.ln_1p() - r * x;
    // f > 0 for small x (slope 1 - r > 0 at 0), f -> -inf; double to bracket
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e18 {
            return Err(Error::InvalidArgument(format!("no finite root for r = {r}")));
        }
    }
    bisect(f, 1e-12, hi, 1e-12)
}

/// Largest ε for which the construction below is guaranteed to land in
/// Gamma: min_i (rho_i / G_ii) x_rho.
pub fn construction_eps_bound(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    rho: &[f64],
) -> Result<f64> {
    let r = rho_contraction(net.routing(), rho)?;
    if r >= 1.0 {
        return Err(Error::Precondition(format!(
            "rho must contract under the routing matrix, got factor {r}"
        )));
    }
    let xr = x_rho(r)?;
    Ok((0..ts.dim())
        .map(|i| rho[i] / ts.g_diag(i) * xr)
        .fold(f64::INFINITY, f64::min))
}

/// gamma_i = ε G_ii / rho_i, certified; guaranteed member whenever
/// 0 < ε < [`construction_eps_bound`].
pub fn construction_gamma(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    rho: &[f64],
    eps: f64,
) -> Result<GammaCertificate> {
    if eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let r = rho_contraction(net.routing(), rho)?;
    if r >= 1.0 {
        return Err(Error::Precondition(format!(
            "rho must contract under the routing matrix, got factor {r}"
        )));
    }
    let gamma: Vec<f64> = (0..ts.dim()).map(|i| eps * ts.g_diag(i) / rho[i]).collect();
    gamma_membership(ts, &gamma)
}

/// How the gamma underlying a Lyapunov function was obtained.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    DirectGamma,
    RhoEps { rho: Vec<f64>, eps: f64 },
}

/// The function h(x) = sum_i exp(arrow_i . x) together with its exact
/// drift data.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovFunction {
    pub gamma: Vec<f64>,
    pub arrows: Matrix,
    /// Asymptotic drift rate: min_i (gamma_i/G_ii)(mu_i/(1+gamma_i) - nu_i).
    pub theta_h: f64,
    /// Queue attaining the minimum above.
    pub argmin: usize,
    pub provenance: Provenance,
    nu: Vec<f64>,
    mu: Vec<f64>,
    g_diag: Vec<f64>,
}

impl LyapunovFunction {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// One summand exp(arrow_i . x).
    pub fn term(&self, i: usize, x: &[u64]) -> Result<f64> {
        let e: f64 = self.arrows[i]
            .iter()
            .zip(x)
            .map(|(a, &xj)| a * xj as f64)
            .sum();
        guarded_exp(e)
    }

    pub fn eval(&self, x: &[u64]) -> Result<f64> {
        (0..self.dim()).map(|i| self.term(i, x)).sum()
    }

    /// Exact generator drift: each summand is an exponential eigenfunction
    /// off its own boundary face, so the drift is a finite closed-form sum.
    pub fn drift(&self, x: &[u64]) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.dim() {
            let indicator = if x[i] > 0 { 1.0 } else { 0.0 };
            let rate = self.gamma[i] / self.g_diag[i]
                * (self.nu[i] - indicator * self.mu[i] / (1.0 + self.gamma[i]));
            total += rate * self.term(i, x)?;
        }
        Ok(total)
    }

    /// True when h has strictly negative asymptotic drift, equivalently
    /// 0 < gamma_i < mu_i/nu_i - 1 for every queue.
    pub fn is_contracting(&self) -> bool {
        self.theta_h > 0.0
    }
}

/// Assemble h from a member certificate.
pub fn build_h(
    ts: &TrafficSolution,
    net: &JacksonNetwork,
    cert: &GammaCertificate,
    provenance: Provenance,
) -> Result<LyapunovFunction> {
    if !cert.is_member() {
        return Err(Error::Precondition(format!(
            "gamma is not an interior member (verdict {:?})",
            cert.verdict
        )));
    }
    let d = ts.dim();
    let (theta_h, argmin) = (0..d)
        .map(|i| {
            cert.gamma[i] / ts.g_diag(i) * (net.mu()[i] / (1.0 + cert.gamma[i]) - ts.nu[i])
        })
        .enumerate()
        .map(|(i, v)| (v, i))
        .fold((f64::INFINITY, 0), |acc, cur| if cur.0 < acc.0 { cur } else { acc });
    Ok(LyapunovFunction {
        gamma: cert.gamma.clone(),
        arrows: cert.arrows.clone(),
        theta_h,
        argmin,
        provenance,
        nu: ts.nu.clone(),
        mu: net.mu().to_vec(),
        g_diag: (0..d).map(|i| ts.g_diag(i)).collect(),
    })
}

/// The sub-level region E and its tail-bound constants, certified on a box.
#[derive(Debug, Clone, Serialize)]
pub struct DriftRegion {
    /// States x in [0, box_cap]^d with drift(x) > -theta h(x).
    pub states: Vec<Vec<u64>>,
    /// min of h over the box outside E; valid surrogate for the infimum
    /// over the full complement because h is coordinatewise nondecreasing
    /// and E, when boundary_clean holds, avoids the outer shell.
    pub c_e: f64,
    pub boundary_clean: bool,
    pub theta: f64,
    pub box_cap: u64,
}

impl DriftRegion {
    pub fn contains(&self, x: &[u64]) -> bool {
        self.states.iter().any(|s| s == x)
    }

    /// The exponential tail bound on the hitting time of E from x.
    pub fn tail_bound(&self, h: &LyapunovFunction, x: &[u64], t: f64) -> Result<f64> {
        Ok(h.eval(x)? * (-self.theta * t).exp() / self.c_e)
    }
}

fn for_each_box_state<F: FnMut(&[u64])>(d: usize, cap: u64, mut f: F) {
    let mut x = vec![0u64; d];
    loop {
        f(&x);
        let mut k = 0;
        loop {
            if k == d {
                return;
            }
            if x[k] < cap {
                x[k] += 1;
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

/// Scan the box [0, box_cap]^d for the exceptional set E of states whose
/// exact drift is above -theta h, and compute c_E over the complement.
pub fn drift_region(h: &LyapunovFunction, theta: f64, box_cap: u64) -> Result<DriftRegion> {
    if !(theta > 0.0 && theta < h.theta_h) {
        return Err(Error::InvalidArgument(format!(
            "theta must lie in (0, {}), got {theta}",
            h.theta_h
        )));
    }
    if box_cap < 1 {
        return Err(Error::InvalidArgument("box_cap must be at least 1".into()));
    }
    let d = h.dim();
    let mut states = Vec::new();
    let mut c_e = f64::INFINITY;
    let mut boundary_clean = true;
    let mut scan_err = None;
    for_each_box_state(d, box_cap, |x| {
        if scan_err.is_some() {
            return;
        }
        let (hx, dx) = match (h.eval(x), h.drift(x)) {
            (Ok(hx), Ok(dx)) => (hx, dx),
            (Err(e), _) | (_, Err(e)) => {
                scan_err = Some(e);
                return;
            }
        };
        if dx > -theta * hx {
            states.push(x.to_vec());
            if x.iter().any(|&xi| xi == box_cap) {
                boundary_clean = false;
            }
        } else if hx < c_e {
            c_e = hx;
        }
    });
    if let Some(e) = scan_err {
        return Err(e);
    }
    Ok(DriftRegion {
        states,
        c_e,
        boundary_clean,
        theta,
        box_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::solve_traffic;
    use crate::testnets::{net_a, net_b, net_d, random_stable_network, seeded_rng};
    use rand::Rng;

    fn ts_a() -> TrafficSolution {
        solve_traffic(&net_a()).unwrap()
    }

    #[test]
    fn arrows_examples() {
        let ts = ts_a();
        let zero = gamma_arrows(&ts, &[0.0, 0.0]).unwrap();
        assert!(zero.iter().flatten().all(|a| a.abs() < 1e-15));
        let a = gamma_arrows(&ts, &[1.0, 1.0]).unwrap();
        let l2 = 2f64.ln();
        assert!((a[0][0] - l2).abs() < 1e-12 && a[0][1].abs() < 1e-12);
        assert!((a[1][0] - l2).abs() < 1e-12 && (a[1][1] - l2).abs() < 1e-12);

        let tsb = solve_traffic(&net_b()).unwrap();
        let b = gamma_arrows(&tsb, &[3.0, 3.0, 3.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 4f64.ln() } else { 2f64.ln() };
                assert!((b[i][j] - expected).abs() < 1e-12);
            }
        }
        assert!(gamma_arrows(&ts, &[-0.1, 1.0]).is_err());
    }

    #[test]
    fn tandem_membership() {
        let ts = ts_a();
        // Gamma for the tandem is {gamma_1 > gamma_2 > 0}
        let m = gamma_membership(&ts, &[2.0, 1.0]).unwrap();
        assert_eq!(m.verdict, Verdict::Member);
        assert!(m.slack > 1e-3);
        assert!(m.violation.is_none());

        let b = gamma_membership(&ts, &[1.0, 1.0]).unwrap();
        assert_eq!(b.verdict, Verdict::Boundary);
        let (i, v) = b.violation.unwrap();
        assert_eq!(i, 1);
        assert!((v[0] - 1.0).abs() < 1e-9 && v[1].abs() < 1e-12);

        let n = gamma_membership(&ts, &[1.0, 2.0]).unwrap();
        assert_eq!(n.verdict, Verdict::NonMember);
        let (i, v) = n.violation.unwrap();
        // stored direction certifies arrow_i . v >= max_j arrow_j . v
        let lhs: f64 = n.arrows[i].iter().zip(&v).map(|(a, w)| a * w).sum();
        for row in &n.arrows {
            let rhs: f64 = row.iter().zip(&v).map(|(a, w)| a * w).sum();
            assert!(lhs >= rhs - 1e-9);
        }
    }

    #[test]
    fn member_witnesses_dominate() {
        let ts = ts_a();
        let m = gamma_membership(&ts, &[2.0, 1.0]).unwrap();
        for i in 0..2 {
            let theta = &m.witnesses[i];
            assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for k in 0..2 {
                if k == i {
                    continue;
                }
                let mix: f64 = (0..2).map(|j| theta[j] * m.arrows[j][k]).sum();
                assert!(mix - m.arrows[i][k] >= m.slack - 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_equal_components_member() {
        let ts = solve_traffic(&net_b()).unwrap();
        for t in [0.1, 0.72, 3.0, 10.0] {
            let c = gamma_membership(&ts, &[t, t, t]).unwrap();
            assert_eq!(c.verdict, Verdict::Member, "t = {t}");
        }
    }

    #[test]
    fn single_queue_membership() {
        let ts = solve_traffic(&net_d()).unwrap();
        assert_eq!(gamma_membership(&ts, &[1.0]).unwrap().verdict, Verdict::Member);
        assert_eq!(gamma_membership(&ts, &[0.0]).unwrap().verdict, Verdict::Boundary);
    }

    #[test]
    fn membership_is_open() {
        let mut rng = seeded_rng(21);
        let mut members = 0;
        while members < 20 {
            let d = rng.gen_range(2..=4);
            let net = random_stable_network(&mut rng, d);
            let ts = solve_traffic(&net).unwrap();
            let gamma: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..2.0)).collect();
            let c = gamma_membership(&ts, &gamma).unwrap();
            if c.verdict != Verdict::Member {
                continue;
            }
            members += 1;
            let delta = 1e-6 * c.slack.min(1.0);
            for _ in 0..5 {
                let bumped: Vec<f64> = gamma
                    .iter()
                    .map(|&g| (g + delta * rng.gen_range(-1.0..1.0)).max(0.0))
                    .collect();
                let c2 = gamma_membership(&ts, &bumped).unwrap();
                assert_eq!(c2.verdict, Verdict::Member);
            }
        }
    }

    #[test]
    fn x_rho_values() {
        assert!((x_rho(0.5).unwrap() - 2.512862).abs() < 1e-5);
        assert!(x_rho(0.0).unwrap().is_infinite());
        assert!(x_rho(0.999).unwrap() < 0.01);
        assert!(x_rho(1.0).is_err());
        assert!(x_rho(-0.1).is_err());
    }

    #[test]
    fn construction_tandem() {
        let net = net_a();
        let ts = ts_a();
        let bound = construction_eps_bound(&ts, &net, &[1.0, 2.0]).unwrap();
        assert!((bound - x_rho(0.5).unwrap()).abs() < 1e-9);
        let c = construction_gamma(&ts, &net, &[1.0, 2.0], 1.0).unwrap();
        assert!((c.gamma[0] - 1.0).abs() < 1e-12);
        assert!((c.gamma[1] - 0.5).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Member);
    }

    #[test]
    fn construction_symmetric() {
        let net = net_b();
        let ts = solve_traffic(&net).unwrap();
        let c = construction_gamma(&ts, &net, &[1.0, 1.0, 1.0], 0.6).unwrap();
        for g in &c.gamma {
            assert!((g - 0.72).abs() < 1e-12);
        }
        assert_eq!(c.verdict, Verdict::Member);
    }

    #[test]
    fn construction_guarantee_random() {
        let mut rng = seeded_rng(22);
        for _ in 0..40 {
            let d = rng.gen_range(1..=4);
            let net = random_stable_network(&mut rng, d);
            let ts = solve_traffic(&net).unwrap();
            let rho: Vec<f64> = (0..d).map(|_| rng.gen_range(0.2..3.0)).collect();
            if rho_contraction(net.routing(), &rho).unwrap() >= 1.0 {
                continue;
            }
            let bound = construction_eps_bound(&ts, &net, &rho).unwrap();
            let eps = rng.gen_range(0.05..0.95) * bound.min(1e6);
            let c = construction_gamma(&ts, &net, &rho, eps).unwrap();
            assert_eq!(c.verdict, Verdict::Member, "rho {rho:?} eps {eps}");
        }
    }

    #[test]
    fn h_examples() {
        let net = net_a();
        let ts = ts_a();
        let cert = gamma_membership(&ts, &[2.0, 1.0]).unwrap();
        let h = build_h(&ts, &net, &cert, Provenance::DirectGamma).unwrap();
        assert!((h.theta_h - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(h.argmin, 0);
        assert!((h.eval(&[0, 0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(h.is_contracting());

        let netb = net_b();
        let tsb = solve_traffic(&netb).unwrap();
        let cb = gamma_membership(&tsb, &[0.72, 0.72, 0.72]).unwrap();
        let hb = build_h(&tsb, &netb, &cb, Provenance::DirectGamma).unwrap();
        let expected = 0.72 / 1.2 * (9.0 / 1.72 - 2.0);
        assert!((hb.theta_h - expected).abs() < 1e-12);
        assert!((expected - 1.9395).abs() < 1e-3);
    }

    #[test]
    fn build_rejects_non_member() {
        let net = net_a();
        let ts = ts_a();
        let cert = gamma_membership(&ts, &[1.0, 2.0]).unwrap();
        assert!(build_h(&ts, &net, &cert, Provenance::DirectGamma).is_err());
    }

    #[test]
    fn rho_eps_product_form() {
        // h from the construction equals sum_i prod_j (1 + eps G_ji/rho_i)^{x_j}
        let net = net_b();
        let ts = solve_traffic(&net).unwrap();
        let (rho, eps) = (vec![1.0, 1.5, 2.0], 0.3);
        let cert = construction_gamma(&ts, &net, &rho, eps).unwrap();
        let h = build_h(
            &ts,
            &net,
            &cert,
            Provenance::RhoEps { rho: rho.clone(), eps },
        )
        .unwrap();
        let mut rng = seeded_rng(23);
        for _ in 0..50 {
            let x: Vec<u64> = (0..3).map(|_| rng.gen_range(0..10)).collect();
            let product: f64 = (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| (1.0 + eps * ts.g[j][i] / rho[i]).powi(x[j] as i32))
                        .product::<f64>()
                })
                .sum();
            let hv = h.eval(&x).unwrap();
            assert!((hv - product).abs() <= 1e-12 * hv.max(product));
        }
    }

    #[test]
    fn drift_matches_generator() {
        let net = net_a();
        let ts = ts_a();
        let cert = gamma_membership(&ts, &[2.0, 1.0]).unwrap();
        let h = build_h(&ts, &net, &cert, Provenance::DirectGamma).unwrap();
        for x in [[0u64, 0], [3, 1], [0, 5], [7, 0], [10, 10]] {
            let exact = h.drift(&x).unwrap();
            let generic =
                crate::generator::apply_generator(&net, |y: &[u64]| h.eval(y).unwrap(), &x)
                    .unwrap();
            let scale = exact.abs().max(generic.abs()).max(1e-12);
            assert!((exact - generic).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn drift_region_tandem() {
        let net = net_a();
        let ts = ts_a();
        let cert = gamma_membership(&ts, &[2.0, 1.0]).unwrap();
        let h = build_h(&ts, &net, &cert, Provenance::DirectGamma).unwrap();
        let region = drift_region(&h, 0.1, 40).unwrap();
        assert!(region.boundary_clean);
        assert!(!region.states.is_empty());
        // interior states have ratio <= -theta_h, so E hugs the axes
        for x in &region.states {
            assert!(x.iter().any(|&xi| xi == 0), "interior state {x:?} in E");
        }
        assert!(region.c_e >= 2.0);
        assert!(region.tail_bound(&h, &[10, 10], 0.0).unwrap() >= 1.0);

        // E grows with theta
        let larger = drift_region(&h, 0.5, 40).unwrap();
        assert!(larger.states.len() >= region.states.len());
        for x in &region.states {
            assert!(larger.contains(x));
        }

        assert!(drift_region(&h, 0.7, 40).is_err());
        assert!(drift_region(&h, 0.0, 40).is_err());
        assert!(drift_region(&h, 0.1, 0).is_err());
    }

    #[test]
    fn ray_convergence_to_theta_h() {
        let net = net_a();
        let ts = ts_a();
        let cert = gamma_membership(&ts, &[2.0, 1.0]).unwrap();
        let h = build_h(&ts, &net, &cert, Provenance::DirectGamma).unwrap();
        // along the argmin axis the ratio converges to exactly -theta_h
        for r in [50u64, 100, 200] {
            let mut x = vec![0u64; 2];
            x[h.argmin] = r;
            let ratio = h.drift(&x).unwrap() / h.eval(&x).unwrap();
            assert!((ratio + h.theta_h).abs() < 1e-3, "R = {r}: {ratio}");
        }
        // along other directions the limit is no better than -theta_h
        for u in [[1u64, 1], [0, 1], [2, 1]] {
            let x = [u[0] * 200, u[1] * 200];
            let ratio = h.drift(&x).unwrap() / h.eval(&x).unwrap();
            assert!(ratio <= -h.theta_h + 1e-3);
        }
    }
}
