//! Acceptance suite: one test (and one printed pass/fail line) per
//! criterion. Run with `cargo test --test acceptance -- --nocapture`.
//!
//! The corpus is the bundled gallery plus 50 seeded random certifiable
//! networks with 2 or 3 components; the identity criteria hold to solver
//! precision on the truncated chain, the inequality criteria carry a
//! boundary-mass allowance.

use noisebound::exact::{auto_caps, SolveMethod, TruncatedChain};
use noisebound::gallery;
use noisebound::hypotheses::{certify, drift_report, FailedCondition, Verdict};
use noisebound::network::{Network, State};
use noisebound::observables::{
    association_check, default_thresholds, tradeoff_report, TradeoffReport,
};
use noisebound::sim;
use rayon::prelude::*;
use std::sync::OnceLock;

const MASTER_SEED: u64 = 20260810;
const N_RANDOM: u64 = 50;

struct SolvedCase {
    net: Network,
    caps: Vec<u32>,
    report: TradeoffReport,
}

fn pick_method(n_states: usize) -> (SolveMethod, f64) {
    if n_states <= 10_000 {
        (SolveMethod::Direct, 1e-12)
    } else {
        (SolveMethod::Power, 1e-14)
    }
}

fn solve_case(net: &Network, caps: &[u32]) -> SolvedCase {
    let chain = TruncatedChain::build(net, caps).expect("box fits");
    let (method, tol) = pick_method(chain.n_states);
    let dist = chain.solve(method, tol).expect("solver converges");
    let report = tradeoff_report(&dist, &chain).expect("observables");
    SolvedCase {
        net: net.clone(),
        caps: caps.to_vec(),
        report,
    }
}

/// Bundled examples plus the 50-network random suite, solved once and
/// shared by the identity, inequality, and cross-validation criteria.
fn corpus() -> &'static Vec<SolvedCase> {
    static CORPUS: OnceLock<Vec<SolvedCase>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut jobs: Vec<(Network, Vec<u32>)> = vec![
            (gallery::poisson_product(), vec![30, 30]),
            (gallery::mutual_repression(), vec![60, 60]),
            (gallery::asymmetric_repression(), vec![60, 60]),
            (gallery::linear_certified(), vec![40, 40]),
            (gallery::balanced_three_node(), vec![24, 34, 28]),
            (gallery::repressilator(), vec![40, 40, 40]),
        ];
        for idx in 0..N_RANDOM {
            let n = if idx % 2 == 0 { 2 } else { 3 };
            let net = gallery::random_certified_network(MASTER_SEED, idx, n);
            assert_eq!(
                certify(&net).verdict,
                Verdict::Certified,
                "{} must certify",
                net.name
            );
            let caps = auto_caps(&net).expect("pilot run");
            jobs.push((net, caps));
        }
        jobs.par_iter()
            .map(|(net, caps)| solve_case(net, caps))
            .collect()
    })
}

fn report_line(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

#[test]
fn criterion_1_identity_suite() {
    let mut worst_mean = 0.0f64;
    let mut worst_fano_cov = 0.0f64;
    let mut worst_flux = 0.0f64;
    let mut worst_cancel = 0.0f64;
    let mut worst_consistency = 0.0f64;
    for case in corpus() {
        for c in &case.report.components {
            worst_mean = worst_mean.max(c.mean_identity_residual);
            worst_fano_cov = worst_fano_cov.max(c.fano_cov_residual);
            worst_flux = worst_flux.max(c.max_flux_residual);
            worst_consistency =
                worst_consistency.max((c.info_flow - c.info_flow_generator).abs());
        }
        worst_cancel = worst_cancel.max(case.report.total_info_flow.abs());
    }
    let pass = worst_mean <= 1e-9
        && worst_fano_cov <= 1e-9
        && worst_flux <= 1e-10
        && worst_cancel <= 1e-8
        && worst_consistency <= 1e-9;
    report_line(
        "criterion 1 (identity suite)",
        pass,
        &format!(
            "{} networks; worst residuals: mean {:.1e}, fano-cov {:.1e}, flux {:.1e}, info cancellation {:.1e}, info consistency {:.1e}",
            corpus().len(),
            worst_mean,
            worst_fano_cov,
            worst_flux,
            worst_cancel,
            worst_consistency
        ),
    );
}

#[test]
fn criterion_2_inequality_suite() {
    let mut worst_slack = f64::INFINITY;
    let mut worst_weighted = f64::INFINITY;
    let mut worst_kl = f64::INFINITY;
    let mut ok = true;
    for case in corpus() {
        let tol = case.report.tol_inequality;
        for &s in &case.report.slacks {
            worst_slack = worst_slack.min(s);
            ok &= s >= -tol;
        }
        worst_weighted = worst_weighted.min(case.report.weighted_sum);
        ok &= case.report.weighted_sum >= -tol;
        for c in &case.report.components {
            worst_kl = worst_kl.min(c.kl_min);
            ok &= c.kl_min >= -1e-12;
        }
    }
    report_line(
        "criterion 2 (inequality suite)",
        ok,
        &format!(
            "worst slack {:+.2e}, worst weighted sum {:+.2e}, worst KL {:+.2e}",
            worst_slack, worst_weighted, worst_kl
        ),
    );
}

#[test]
fn criterion_3_termwise_bound_and_association() {
    // 20 structurally balanced networks: the two bundled ones plus 18
    // seeded random balanced networks
    let mut cases: Vec<(Network, Vec<i8>)> = vec![
        (gallery::mutual_repression(), vec![1, -1]),
        (gallery::balanced_three_node(), vec![1, -1, -1]),
    ];
    for idx in 0..18 {
        let n = if idx % 2 == 0 { 2 } else { 3 };
        cases.push(gallery::random_balanced_network(MASTER_SEED, idx, n));
    }
    let results: Vec<(String, f64, f64)> = cases
        .par_iter()
        .map(|(net, sigma)| {
            let caps = auto_caps(net).expect("pilot");
            let chain = TruncatedChain::build(net, &caps).expect("box fits");
            let (method, tol) = pick_method(chain.n_states);
            let dist = chain.solve(method, tol).expect("solver");
            let report = tradeoff_report(&dist, &chain).expect("observables");
            let min_fano = report
                .components
                .iter()
                .map(|c| c.fano)
                .fold(f64::INFINITY, f64::min);
            let thresholds = default_thresholds(&chain, 6);
            let assoc = association_check(&dist, &chain, sigma, &thresholds);
            (net.name.clone(), min_fano, assoc.min_cov)
        })
        .collect();
    let mut ok = true;
    let mut worst_fano = f64::INFINITY;
    let mut worst_cov = f64::INFINITY;
    for (name, min_fano, min_cov) in &results {
        worst_fano = worst_fano.min(*min_fano);
        worst_cov = worst_cov.min(*min_cov);
        if *min_fano < 1.0 - 1e-8 || *min_cov < -1e-10 {
            ok = false;
            println!("  termwise failure on {name}: Fano {min_fano}, min cov {min_cov}");
        }
    }

    // the repressilator is confirmed frustrated through the CLI path
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("repressilator.json");
    std::fs::write(
        &spec_path,
        serde_json::to_string(&gallery::repressilator().to_spec()).unwrap(),
    )
    .unwrap();
    let cfg = noisebound::cli::RunConfig {
        networks: vec![spec_path],
        out_dir: dir.path().join("out"),
        no_timestamp: true,
        ..noisebound::cli::RunConfig::default()
    };
    let code = noisebound::cli::cmd_balance(&cfg).unwrap();
    let payload: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(cfg.out_dir.join("repressilator.balance.json")).unwrap(),
    )
    .unwrap();
    let witness = payload["balance"]["witness"].as_array().cloned().unwrap_or_default();
    let negatives = witness
        .iter()
        .filter(|e| e["sign"] == "Negative")
        .count();
    let frustrated_ok =
        code == noisebound::cli::EXIT_FAILED && !witness.is_empty() && negatives % 2 == 1;
    ok &= frustrated_ok;

    report_line(
        "criterion 3 (termwise bound under balance)",
        ok,
        &format!(
            "{} balanced networks; min Fano {:.9}, min association cov {:+.2e}; repressilator frustrated with odd witness: {}",
            results.len(),
            worst_fano,
            worst_cov,
            frustrated_ok
        ),
    );
}

#[test]
fn criterion_4_poisson_baseline() {
    let nets = [
        gallery::poisson_product(),
        Network::from_parts("poisson-tau", vec![2.0, 0.5], &["1.5", "4"]).unwrap(),
    ];
    let mut ok = true;
    let mut worst_exact = 0.0f64;
    for net in &nets {
        // exact route
        let caps: Vec<u32> = net
            .tau
            .iter()
            .zip(&net.rates)
            .map(|(&tau, r)| {
                let f = r.eval(&[0, 0]).unwrap();
                ((10.0 * (tau * f + 3.0)).ceil() as u32).max(30)
            })
            .collect();
        let chain = TruncatedChain::build(net, &caps).unwrap();
        let dist = chain.solve(SolveMethod::Direct, 1e-12).unwrap();
        let report = tradeoff_report(&dist, &chain).unwrap();
        for (i, c) in report.components.iter().enumerate() {
            let f = net.rates[i].eval(&[0, 0]).unwrap();
            worst_exact = worst_exact
                .max((c.fano - 1.0).abs())
                .max((c.mean - net.tau[i] * f).abs());
            ok &= (c.fano - 1.0).abs() <= 1e-9;
            ok &= (c.mean - net.tau[i] * f).abs() <= 1e-9;
        }
        // SSA route
        let est = sim::estimate_stationary_stats(net, 10_000.0, 2_000.0, 16, 424242).unwrap();
        for (i, c) in est.components.iter().enumerate() {
            let f = net.rates[i].eval(&[0, 0]).unwrap();
            if (c.fano - 1.0).abs() > 3.0 * c.fano_se {
                ok = false;
                println!("  SSA fano off: {} +- {}", c.fano, c.fano_se);
            }
            if (c.mean - net.tau[i] * f).abs() > 3.0 * c.mean_se {
                ok = false;
                println!("  SSA mean off: {} +- {}", c.mean, c.mean_se);
            }
        }
    }
    report_line(
        "criterion 4 (Poisson baseline)",
        ok,
        &format!(
            "exact |F-1| and |mean - tau*f| at most {:.1e}; SSA within 3 standard errors",
            worst_exact
        ),
    );
}

#[test]
fn criterion_5_coupling_invariant() {
    let cases = [
        (gallery::mutual_repression(), vec![1i8, -1]),
        (gallery::balanced_three_node(), vec![1, -1, -1]),
    ];
    let mut total_runs = 0u64;
    let mut total_violations = 0usize;
    let mut worst_identity = 0.0f64;
    for (net, sigma) in &cases {
        let mut x0 = vec![0u32; net.n()];
        let mut y0 = vec![0u32; net.n()];
        for (k, &s) in sigma.iter().enumerate() {
            if s >= 0 {
                y0[k] = 3;
            } else {
                x0[k] = 3;
            }
        }
        let x0 = State(x0);
        let y0 = State(y0);
        let outcomes: Vec<(usize, f64)> = (1..=500u64)
            .into_par_iter()
            .map(|seed| {
                let traj = sim::simulate_split_coupling(net, sigma, &x0, &y0, 100.0, seed)
                    .expect("coupling runs");
                (traj.order_violations.len(), traj.max_channel_identity_error)
            })
            .collect();
        total_runs += outcomes.len() as u64;
        total_violations += outcomes.iter().map(|o| o.0).sum::<usize>();
        worst_identity = outcomes.iter().map(|o| o.1).fold(worst_identity, f64::max);
    }
    let ok = total_violations == 0 && worst_identity <= 1e-12;
    report_line(
        "criterion 5 (coupling invariant)",
        ok,
        &format!(
            "{total_runs} seeded runs at t_end 100: {total_violations} order violations, channel identity error {:.1e}",
            worst_identity
        ),
    );
}

#[test]
fn criterion_6_solver_cross_validation() {
    let mut compared = 0usize;
    let mut worst = 0.0f64;
    for case in corpus() {
        let n_states: usize = case.caps.iter().map(|&c| c as usize + 1).product();
        if n_states > 10_000 {
            continue;
        }
        let chain = TruncatedChain::build(&case.net, &case.caps).unwrap();
        let power = chain.solve(SolveMethod::Power, 1e-13).unwrap();
        let direct = chain.solve(SolveMethod::Direct, 1e-13).unwrap();
        let diff = power
            .pi
            .iter()
            .zip(&direct.pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(diff);
        compared += 1;
    }
    let ok = compared > 0 && worst <= 1e-8;
    report_line(
        "criterion 6 (solver cross-validation)",
        ok,
        &format!("{compared} state spaces <= 1e4; worst max-norm gap {worst:.2e}"),
    );
}

#[test]
fn criterion_7_hypothesis_checker() {
    let certified = certify(&gallery::linear_certified());
    let failed = certify(&gallery::linear_drift_gap_failure());
    let verdicts_ok = certified.verdict == Verdict::Certified
        && failed.verdict == Verdict::Failed(FailedCondition::DriftGapCondition);

    // drift check: no violation of (LV) <= -cV + b 1{s<=R} out to s <= R+40
    let probe = drift_report(&gallery::linear_certified(), 40).unwrap();
    let radius = probe.r.ceil() as u64 + 35;
    let drift = drift_report(&gallery::linear_certified(), radius).unwrap();
    let drift_ok = drift.empirical_max_violation <= 0.0
        && drift.check_radius + 5 >= probe.r.ceil() as u64 + 40;

    let ok = verdicts_ok && drift_ok;
    report_line(
        "criterion 7 (hypothesis checker)",
        ok,
        &format!(
            "tau=2 -> {:?}, tau=3 -> {:?}; drift max violation {:+.2e} over {} states (s <= {})",
            certified.verdict,
            failed.verdict,
            drift.empirical_max_violation,
            drift.states_checked,
            drift.check_radius + 5
        ),
    );
}
