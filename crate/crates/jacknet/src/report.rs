//! Report assembly and rendering: a machine-readable JSON record and a
//! deterministic plain-text view of the same analysis.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::bounds::SpectralBoundsReport;
use crate::lyapunov::{GammaCertificate, Verdict};
use crate::network::{JacksonNetwork, TrafficSolution, ValidationReport};
use crate::sim::SimulationEstimate;

/// Significant digits used for every serialized number.
pub const SIG_DIGITS: usize = 12;

/// Summary of a Lyapunov certificate and its drift region.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSummary {
    pub certificate: GammaCertificate,
    pub theta_h: Option<f64>,
    pub theta: Option<f64>,
    pub region_size: Option<usize>,
    pub c_e: Option<f64>,
    pub boundary_clean: Option<bool>,
}

/// Full analysis record. `sources` maps each numeric field path to the kind
/// of result that produced it (closed form, optimizer, simulation, ...).
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub network: JacksonNetwork,
    pub validation: ValidationReport,
    pub traffic: Option<TrafficSolution>,
    pub bounds: Option<SpectralBoundsReport>,
    pub special_case: Option<String>,
    pub lyapunov: Option<LyapunovSummary>,
    pub simulations: Vec<SimulationEstimate>,
    pub sources: BTreeMap<String, String>,
}

impl AnalysisReport {
    pub fn new(network: JacksonNetwork, validation: ValidationReport) -> Self {
        AnalysisReport {
            network,
            validation,
            traffic: None,
            bounds: None,
            special_case: None,
            lyapunov: None,
            simulations: Vec::new(),
            sources: BTreeMap::new(),
        }
    }

    pub fn tag(&mut self, field: &str, source: &str) {
        self.sources.insert(field.to_string(), source.to_string());
    }
}

/// Round to `SIG_DIGITS` significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap()
}

/// Shortest decimal form of the value rounded to `SIG_DIGITS` significant
/// digits; stable across runs for identical inputs.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|&x| fmt_sig(x)).collect();
    format!("[{}]", inner.join(", "))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(f)) {
                        *v = Value::Number(r);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialize any report type to pretty JSON with all floating-point fields
/// rounded to `SIG_DIGITS` significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serialization");
    round_value(&mut v);
    serde_json::to_string_pretty(&v).expect("report serialization")
}

/// Deterministic plain-text view of an analysis report.
pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(&mut out, format!("queues: {}", report.network.dim()));
    push(
        &mut out,
        format!("arrival rates: {}", fmt_vec(report.network.lambda())),
    );
    push(
        &mut out,
        format!("service rates: {}", fmt_vec(report.network.mu())),
    );
    if report.validation.passed() {
        push(&mut out, "validation: ok".to_string());
    } else {
        push(
            &mut out,
            format!("validation: {} violation(s)", report.validation.violations.len()),
        );
        for v in &report.validation.violations {
            push(&mut out, format!("  - {v:?}"));
        }
    }
    if let Some(ts) = &report.traffic {
        push(&mut out, format!("effective arrival rates: {}", fmt_vec(&ts.nu)));
        push(
            &mut out,
            format!(
                "routing spectral radius: {}",
                fmt_sig(ts.routing_spectral_radius)
            ),
        );
        push(&mut out, format!("stable: {}", ts.stable));
        if !ts.stable {
            for (i, (&nu, &mu)) in ts.nu.iter().zip(report.network.mu()).enumerate() {
                if nu >= mu {
                    push(
                        &mut out,
                        format!(
                            "  queue {}: effective rate {} >= service rate {}",
                            i + 1,
                            fmt_sig(nu),
                            fmt_sig(mu)
                        ),
                    );
                }
            }
        }
    }
    if let Some(b) = &report.bounds {
        push(&mut out, format!("lower bound: {}", fmt_sig(b.lower)));
        push(
            &mut out,
            format!(
                "upper bound (gamma search): {} at gamma = {}",
                fmt_sig(b.upper_gamma),
                fmt_vec(&b.gamma_argmax)
            ),
        );
        push(
            &mut out,
            format!(
                "upper bound (rho-eps search): {} at rho = {}, eps = {}",
                fmt_sig(b.upper_rho_eps),
                fmt_vec(&b.rho),
                fmt_sig(b.eps)
            ),
        );
        push(
            &mut out,
            format!("equality of bounds diagnosed: {}", b.equality_diagnosed),
        );
        match &b.exact {
            Some(e) => push(
                &mut out,
                format!("exact value: {} ({})", fmt_sig(e.value), e.family),
            ),
            None => push(&mut out, "exact value: not available".to_string()),
        }
    }
    if let Some(tag) = &report.special_case {
        push(&mut out, format!("special case: {tag}"));
    }
    if let Some(ly) = &report.lyapunov {
        let cert = &ly.certificate;
        let verdict = match cert.verdict {
            Verdict::Member => "member",
            Verdict::Boundary => "boundary",
            Verdict::NonMember => "non-member",
        };
        push(
            &mut out,
            format!("gamma = {}: {verdict}", fmt_vec(&cert.gamma)),
        );
        push(&mut out, format!("membership margin: {}", fmt_sig(cert.slack)));
        if let Some((i, v)) = &cert.violation {
            push(
                &mut out,
                format!("violating direction at queue {}: {}", i + 1, fmt_vec(v)),
            );
        }
        if let Some(theta_h) = ly.theta_h {
            push(&mut out, format!("drift rate theta_h: {}", fmt_sig(theta_h)));
        }
        if let (Some(theta), Some(size), Some(c_e), Some(clean)) =
            (ly.theta, ly.region_size, ly.c_e, ly.boundary_clean)
        {
            push(&mut out, format!("exceptional set size: {size}"));
            push(&mut out, format!("c_E: {}", fmt_sig(c_e)));
            push(&mut out, format!("boundary clean: {clean}"));
            push(
                &mut out,
                format!(
                    "tail bound: P(tau_E > t) <= h(x) exp(-{} t) / {}",
                    fmt_sig(theta),
                    fmt_sig(c_e)
                ),
            );
        }
    }
    for est in &report.simulations {
        push(&mut out, format!("simulation ({:?}):", est.kind));
        push(
            &mut out,
            format!(
                "  seed {}, replications {}, total simulated time {}",
                est.seed,
                est.replications,
                fmt_sig(est.total_time)
            ),
        );
        for pt in &est.points {
            let mut line = format!(
                "  at {} -> {} +/- {}",
                fmt_vec(&pt.at),
                fmt_sig(pt.value),
                fmt_sig(pt.half_width)
            );
            if let Some(r) = pt.reference {
                line.push_str(&format!(" (expected {})", fmt_sig(r)));
            }
            push(&mut out, line);
        }
        if let Some(dev) = est.max_abs_deviation {
            push(&mut out, format!("  max absolute deviation: {}", fmt_sig(dev)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{solve_traffic, validate_network};
    use crate::testnets::net_a;

    #[test]
    fn sig_digit_rounding() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-1.0), "-1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(1.23456789012345e-7), "0.000000123456789012");
        assert_eq!(round_sig(9.999999999999999), 10.0);
    }

    #[test]
    fn json_round_trips() {
        let net = net_a();
        let mut report = AnalysisReport::new(net.clone(), validate_network(&net));
        report.traffic = Some(solve_traffic(&net).unwrap());
        report.tag("traffic.nu", "linear_system");
        let json = to_json(&report);
        let parsed: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(to_json(&parsed), json);
        assert_eq!(parsed["traffic"]["nu"][0], 1.0);
        assert_eq!(parsed["sources"]["traffic.nu"], "linear_system");
    }

    #[test]
    fn text_is_deterministic() {
        let net = net_a();
        let mut report = AnalysisReport::new(net.clone(), validate_network(&net));
        report.traffic = Some(solve_traffic(&net).unwrap());
        let a = render_text(&report);
        let b = render_text(&report);
        assert_eq!(a, b);
        assert!(a.contains("stable: true"));
        assert!(a.contains("effective arrival rates: [1, 1]"));
    }
}
