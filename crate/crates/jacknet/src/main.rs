//! Command-line front end: parse a network file, run the analyses, print a
//! text report and optionally write the JSON record.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 validation failure or
//! unstable network where stability is required.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jacknet::bounds::spectral_bounds;
use jacknet::lyapunov::{
    build_h, construction_eps_bound, construction_gamma, drift_region, gamma_membership,
    Provenance,
};
use jacknet::network::validate_network;
use jacknet::report::{fmt_sig, fmt_vec, render_text, to_json, AnalysisReport, LyapunovSummary};
use jacknet::sim::{estimate_stationary, estimate_tail, verify_against_bound, SimConfig};
use jacknet::special::dispatch_exact;
use jacknet::{solve_traffic, time_reverse, JacksonNetwork};

#[derive(Parser)]
#[command(name = "jacknet", about = "Spectral bounds and Lyapunov certificates for Jackson networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Network file (JSON with keys lambda, mu, P).
    file: PathBuf,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, solve the traffic equations and compute all bounds.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Objective-evaluation budget for each optimizer run.
        #[arg(long, default_value_t = 4000)]
        budget: usize,
        /// Optimizer seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a candidate gamma (or a rho-eps pair) and build the drift
    /// certificate.
    Lyapunov {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated gamma vector.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gamma: Option<Vec<f64>>,
        /// Comma-separated rho vector (use with --eps).
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<f64>>,
        #[arg(long)]
        eps: Option<f64>,
        /// Drift rate for the exceptional-set scan; must be below theta_h.
        #[arg(long)]
        theta: Option<f64>,
        /// Scan box [0, box]^d for the exceptional set.
        #[arg(long = "box", default_value_t = 40)]
        box_cap: u64,
    },
    /// Monte Carlo validation of the stationary law or of the tail bound.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = ["stationary", "tail"])]
        mode: String,
        #[arg(long, default_value_t = 1e5, value_parser = parse_f64)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = parse_count)]
        reps: usize,
        /// Warmup time for stationary estimation (default horizon/100).
        #[arg(long)]
        warmup: Option<f64>,
        /// Comparison box [0, box]^d (stationary mode) or exceptional-set
        /// scan box (tail mode).
        #[arg(long = "box", default_value_t = 5)]
        box_cap: u64,
        /// Lyapunov gamma for tail mode.
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<f64>>,
        /// Drift rate for tail mode.
        #[arg(long)]
        theta: Option<f64>,
        /// Comma-separated time grid for tail mode.
        #[arg(long = "t", value_delimiter = ',')]
        times: Option<Vec<f64>>,
        /// Comma-separated initial state.
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<u64>>,
    },
    /// Print the time-reversed network file.
    Reverse {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v = s.parse::<f64>().map_err(|e| e.to_string())?;
    if !(v >= 1.0 && v.fract() == 0.0 && v <= usize::MAX as f64) {
        return Err(format!("expected a positive integer count, got {s}"));
    }
    Ok(v as usize)
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: String) -> Self {
        Failure { code: 1, message }
    }
    fn invalid(message: String) -> Self {
        Failure { code: 2, message }
    }
}

impl From<jacknet::Error> for Failure {
    fn from(e: jacknet::Error) -> Self {
        match e {
            jacknet::Error::Validation(_) | jacknet::Error::Unstable => {
                Failure::invalid(e.to_string())
            }
            other => Failure::io(other.to_string()),
        }
    }
}

fn load_network(path: &PathBuf) -> Result<JacksonNetwork, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    JacksonNetwork::from_json_str(&text)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, json: &str) -> Result<(), Failure> {
    if let Some(path) = out {
        fs::write(path, json).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn emit(report: &AnalysisReport, out: &Option<PathBuf>) -> Result<(), Failure> {
    print!("{}", render_text(report));
    write_out(out, &to_json(report))
}

fn validated_report(net: &JacksonNetwork) -> Result<AnalysisReport, (AnalysisReport, Failure)> {
    let validation = validate_network(net);
    let report = AnalysisReport::new(net.clone(), validation);
    if report.validation.passed() {
        Ok(report)
    } else {
        let failure = Failure::invalid("network violates the model assumptions".into());
        Err((report, failure))
    }
}

fn cmd_analyze(common: &CommonArgs, budget: usize, seed: u64) -> Result<(), Failure> {
    let net = load_network(&common.file)?;
    let mut report = match validated_report(&net) {
        Ok(r) => r,
        Err((r, failure)) => {
            emit(&r, &common.out)?;
            return Err(failure);
        }
    };
    let ts = solve_traffic(&net)?;
    report.traffic = Some(ts.clone());
    report.tag("traffic.nu", "linear_system");
    report.tag("traffic.g", "matrix_inverse");
    if !ts.stable {
        emit(&report, &common.out)?;
        return Err(Failure::invalid(
            "unstable network: some effective arrival rate reaches its service rate".into(),
        ));
    }
    let exact = dispatch_exact(&net, &ts)?;
    report.special_case = exact.as_ref().map(|e| e.family.clone());
    let bounds = spectral_bounds(&ts, &net, budget, seed, exact)?;
    report.tag("bounds.lower", "closed_form");
    report.tag("bounds.upper_gamma", "optimizer");
    report.tag("bounds.upper_rho_eps", "optimizer");
    report.tag("bounds.exact", "special_case");
    report.bounds = Some(bounds);
    emit(&report, &common.out)
}

fn cmd_lyapunov(
    common: &CommonArgs,
    gamma: Option<Vec<f64>>,
    rho: Option<Vec<f64>>,
    eps: Option<f64>,
    theta: Option<f64>,
    box_cap: u64,
) -> Result<(), Failure> {
    let net = load_network(&common.file)?;
    let mut report = match validated_report(&net) {
        Ok(r) => r,
        Err((r, failure)) => {
            emit(&r, &common.out)?;
            return Err(failure);
        }
    };
    let ts = solve_traffic(&net)?;
    report.traffic = Some(ts.clone());
    let (cert, provenance) = match (gamma, rho, eps) {
        (Some(g), None, None) => (gamma_membership(&ts, &g)?, Provenance::DirectGamma),
        (None, Some(r), Some(e)) => {
            let cap = construction_eps_bound(&ts, &net, &r)?;
            if !(e > 0.0 && e < cap) {
                return Err(Failure::invalid(format!(
                    "eps must lie in (0, {}) for this rho",
                    fmt_sig(cap)
                )));
            }
            (
                construction_gamma(&ts, &net, &r, e)?,
                Provenance::RhoEps { rho: r, eps: e },
            )
        }
        _ => {
            return Err(Failure::io(
                "supply exactly one of --gamma or the pair --rho/--eps".into(),
            ))
        }
    };
    let mut summary = LyapunovSummary {
        certificate: cert.clone(),
        theta_h: None,
        theta,
        region_size: None,
        c_e: None,
        boundary_clean: None,
    };
    report.tag("lyapunov.certificate.slack", "matrix_game");
    if cert.is_member() {
        let h = build_h(&ts, &net, &cert, provenance)?;
        summary.theta_h = Some(h.theta_h);
        report.tag("lyapunov.theta_h", "drift_limit");
        if let Some(theta) = theta {
            if !(theta > 0.0 && theta < h.theta_h) {
                report.lyapunov = Some(summary);
                emit(&report, &common.out)?;
                return Err(Failure::invalid(format!(
                    "theta must lie in (0, theta_h) = (0, {})",
                    fmt_sig(h.theta_h)
                )));
            }
            let region = drift_region(&h, theta, box_cap)?;
            summary.region_size = Some(region.states.len());
            summary.c_e = Some(region.c_e);
            summary.boundary_clean = Some(region.boundary_clean);
            report.tag("lyapunov.c_e", "box_scan");
        }
    }
    report.lyapunov = Some(summary);
    emit(&report, &common.out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    common: &CommonArgs,
    mode: &str,
    horizon: f64,
    seed: u64,
    reps: usize,
    warmup: Option<f64>,
    box_cap: u64,
    gamma: Option<Vec<f64>>,
    theta: Option<f64>,
    times: Option<Vec<f64>>,
    x0: Option<Vec<u64>>,
) -> Result<(), Failure> {
    let net = load_network(&common.file)?;
    let mut report = match validated_report(&net) {
        Ok(r) => r,
        Err((r, failure)) => {
            emit(&r, &common.out)?;
            return Err(failure);
        }
    };
    let ts = solve_traffic(&net)?;
    report.traffic = Some(ts.clone());
    let initial = x0.unwrap_or_else(|| vec![0; net.dim()]);
    let mut config = SimConfig::new(seed, horizon, reps, initial.clone());
    if let Some(w) = warmup {
        config = config.with_warmup(w);
    }
    match mode {
        "stationary" => {
            if !ts.stable {
                emit(&report, &common.out)?;
                return Err(Failure::invalid(
                    "stationary estimation requires a stable network".into(),
                ));
            }
            let est = estimate_stationary(&net, &ts, &config, box_cap)?;
            report.tag("simulations.value", "monte_carlo");
            report.tag("simulations.reference", "product_form");
            report.simulations.push(est);
            emit(&report, &common.out)
        }
        "tail" => {
            let gamma = gamma.ok_or_else(|| Failure::io("tail mode requires --gamma".into()))?;
            let theta = theta.ok_or_else(|| Failure::io("tail mode requires --theta".into()))?;
            let grid = times.ok_or_else(|| Failure::io("tail mode requires --t".into()))?;
            let cert = gamma_membership(&ts, &gamma)?;
            if !cert.is_member() {
                return Err(Failure::invalid(format!(
                    "gamma {} is not a certificate",
                    fmt_vec(&gamma)
                )));
            }
            let h = build_h(&ts, &net, &cert, Provenance::DirectGamma)?;
            if !(theta > 0.0 && theta < h.theta_h) {
                return Err(Failure::invalid(format!(
                    "theta must lie in (0, theta_h) = (0, {})",
                    fmt_sig(h.theta_h)
                )));
            }
            let region = drift_region(&h, theta, box_cap.max(40))?;
            let est = estimate_tail(&net, &config, &|x: &[u64]| region.contains(x), &grid)?;
            let margins = verify_against_bound(&est, &h, &region, &initial)?;
            report.lyapunov = Some(LyapunovSummary {
                certificate: cert,
                theta_h: Some(h.theta_h),
                theta: Some(theta),
                region_size: Some(region.states.len()),
                c_e: Some(region.c_e),
                boundary_clean: Some(region.boundary_clean),
            });
            report.tag("simulations.value", "monte_carlo");
            report.simulations.push(est);
            print!("{}", render_text(&report));
            let ok = margins.iter().all(|&m| m >= 0.0);
            for (m, t) in margins.iter().zip(&grid) {
                println!("margin at t = {}: {}", fmt_sig(*t), fmt_sig(*m));
            }
            println!("tail bound check: {}", if ok { "pass" } else { "FAIL" });
            write_out(&common.out, &to_json(&report))
        }
        _ => unreachable!("clap restricts the mode values"),
    }
}

fn cmd_reverse(common: &CommonArgs) -> Result<(), Failure> {
    let net = load_network(&common.file)?;
    let validation = validate_network(&net);
    if !validation.passed() {
        return Err(Failure::invalid("network violates the model assumptions".into()));
    }
    let ts = solve_traffic(&net)?;
    let reversed = time_reverse(&net, &ts)?;
    let json = reversed.to_json_string();
    println!("{json}");
    write_out(&common.out, &json)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common, budget, seed } => cmd_analyze(&common, budget, seed),
        Command::Lyapunov {
            common,
            gamma,
            rho,
            eps,
            theta,
            box_cap,
        } => cmd_lyapunov(&common, gamma, rho, eps, theta, box_cap),
        Command::Simulate {
            common,
            mode,
            horizon,
            seed,
            reps,
            warmup,
            box_cap,
            gamma,
            theta,
            times,
            x0,
        } => cmd_simulate(
            &common, &mode, horizon, seed, reps, warmup, box_cap, gamma, theta, times, x0,
        ),
        Command::Reverse { common } => cmd_reverse(&common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
