//! Pipeline orchestration behind the `noisebound` binary.
//!
//! Each command ingests network spec files, runs the corresponding module
//! pipeline, and persists JSON reports (plus CSV figure data) under the
//! output directory. Exit codes: 0 success / all checks pass, 1 I/O or
//! parse failure, 2 a certification or balance check failed, 3 the result
//! is inconclusive (non-rigorous bounds, unknown edge directions, or an
//! uncertified network without `--force`), 4 a solver, simulation, or
//! verdict failure.
//!
//! Reports are byte-stable for a fixed config: pass `no_timestamp` to drop
//! the one volatile field.

use crate::exact::{self, SolveMethod, TruncatedChain};
use crate::hypotheses::{self, Verdict};
use crate::network::{validate_network, Network, NetworkSpec};
use crate::observables;
use crate::sim;
use crate::signed_graph;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub networks: Vec<PathBuf>,
    /// Box caps; sized automatically from a pilot run when absent.
    pub box_caps: Option<Vec<u32>>,
    pub tol: f64,
    pub method: SolveMethod,
    pub t_end: f64,
    /// Defaults to 20% of t_end.
    pub burn_in: Option<f64>,
    pub batches: usize,
    /// Number of seeds / replicates for simulate and couple.
    pub seeds: u64,
    pub out_dir: PathBuf,
    pub force: bool,
    pub no_timestamp: bool,
    pub dump_pi: bool,
    pub dump_generator: bool,
    pub dump_trajectory: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            networks: Vec::new(),
            box_caps: None,
            tol: 1e-12,
            method: SolveMethod::Power,
            t_end: 10_000.0,
            burn_in: None,
            batches: 16,
            seeds: 100,
            out_dir: PathBuf::from("noisebound-out"),
            force: false,
            no_timestamp: false,
            dump_pi: false,
            dump_generator: false,
            dump_trajectory: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Network {
        path: PathBuf,
        #[source]
        source: crate::network::NetworkError,
    },
    #[error(transparent)]
    Build(#[from] crate::exact::BuildError),
    #[error(transparent)]
    Solve(#[from] crate::exact::SolveError),
    #[error(transparent)]
    Obs(#[from] crate::observables::ObsError),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Network { .. } => EXIT_INPUT,
            _ => EXIT_RUNTIME,
        }
    }
}

/// Envelope adding the (optional) timestamp to every persisted report.
#[derive(Serialize)]
struct Stamped<T: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
    #[serde(flatten)]
    payload: T,
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_json<T: Serialize>(path: &Path, payload: T, no_timestamp: bool) -> Result<(), CliError> {
    let stamped = Stamped {
        timestamp_unix: if no_timestamp { None } else { Some(now_unix()) },
        payload,
    };
    let text = serde_json::to_string_pretty(&stamped).expect("report serialization");
    fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_network(path: &Path) -> Result<Network, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let spec: NetworkSpec = serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    Network::from_spec(&spec).map_err(|source| CliError::Network {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io {
        path: cfg.out_dir.clone(),
        source,
    })
}

fn out_path(cfg: &RunConfig, name: &str, suffix: &str) -> PathBuf {
    cfg.out_dir.join(format!("{name}.{suffix}"))
}

#[derive(Serialize)]
struct CheckPayload {
    network: String,
    findings: Vec<crate::network::Finding>,
    hypotheses: hypotheses::HypothesisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    drift: Option<hypotheses::DriftReport>,
}

/// `noisebound check`: certify the sufficient conditions and report drift.
pub fn cmd_check(cfg: &RunConfig) -> Result<i32, CliError> {
    ensure_out_dir(cfg)?;
    let mut worst = EXIT_OK;
    for path in &cfg.networks {
        let net = load_network(path)?;
        let findings = validate_network(&net);
        let report = hypotheses::certify(&net);
        let code = match report.verdict {
            Verdict::Certified => EXIT_OK,
            Verdict::Failed(_) => EXIT_FAILED,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        };
        let drift = if report.verdict == Verdict::Certified {
            Some(hypotheses::drift_report(&net, 40).expect("certified network has drift report"))
        } else {
            None
        };
        eprintln!("check {}: {:?}", net.name, report.verdict);
        write_json(
            &out_path(cfg, &net.name, "hypothesis.json"),
            CheckPayload {
                network: net.name.clone(),
                findings,
                hypotheses: report,
                drift,
            },
            cfg.no_timestamp,
        )?;
        worst = worst.max(code);
    }
    Ok(worst)
}

fn solve_for(
    cfg: &RunConfig,
    net: &Network,
) -> Result<(exact::StationaryDistribution, TruncatedChain), CliError> {
    let caps = match &cfg.box_caps {
        Some(caps) => caps.clone(),
        None => exact::auto_caps(net)?,
    };
    let chain = TruncatedChain::build(net, &caps)?;
    let dist = chain.solve(cfg.method, cfg.tol)?;
    Ok((dist, chain))
}

/// `noisebound report`: solve, compute observables, verify identities and
/// inequalities, and emit figure data.
pub fn cmd_report(cfg: &RunConfig) -> Result<i32, CliError> {
    ensure_out_dir(cfg)?;
    let mut all_pass = true;
    let mut figure = String::from("name,F1,F2,weighted_sum,verdict\n");
    for path in &cfg.networks {
        let net = load_network(path)?;
        let hyp = hypotheses::certify(&net);
        if hyp.verdict != Verdict::Certified && !cfg.force {
            eprintln!(
                "report {}: hypotheses {:?}; pass --force to run anyway",
                net.name, hyp.verdict
            );
            return Ok(match hyp.verdict {
                Verdict::Failed(_) => EXIT_FAILED,
                _ => EXIT_INCONCLUSIVE,
            });
        }
        let (dist, chain) = solve_for(cfg, &net)?;
        let report = observables::tradeoff_report(&dist, &chain)?;
        if cfg.dump_pi {
            let mut buf = Vec::new();
            exact::write_pi_csv(&dist, &chain, &mut buf).expect("in-memory write");
            fs::write(out_path(cfg, &net.name, "pi.csv"), buf).map_err(|source| CliError::Io {
                path: out_path(cfg, &net.name, "pi.csv"),
                source,
            })?;
        }
        if cfg.dump_generator {
            let mut buf = Vec::new();
            exact::write_generator_coo(&chain, &mut buf).expect("in-memory write");
            fs::write(out_path(cfg, &net.name, "generator.txt"), buf).map_err(|source| {
                CliError::Io {
                    path: out_path(cfg, &net.name, "generator.txt"),
                    source,
                }
            })?;
        }
        let verdict = if report.verdicts.pass { "PASS" } else { "FAIL" };
        let f1 = report.components.first().map(|c| c.fano).unwrap_or(f64::NAN);
        let f2 = report.components.get(1).map(|c| c.fano).unwrap_or(f64::NAN);
        figure.push_str(&format!(
            "{},{},{},{},{}\n",
            report.name, f1, f2, report.weighted_sum, verdict
        ));
        eprintln!(
            "report {}: {} (weighted sum {:.3e}, total info flow {:.3e})",
            report.name, verdict, report.weighted_sum, report.total_info_flow
        );
        if !report.verdicts.pass {
            all_pass = false;
            for clause in &report.verdicts.failed_clauses {
                eprintln!("  failed: {clause}");
            }
        }
        write_json(&out_path(cfg, &net.name, "report.json"), report, cfg.no_timestamp)?;
    }
    let figure_path = cfg.out_dir.join("figure.csv");
    fs::write(&figure_path, figure).map_err(|source| CliError::Io {
        path: figure_path.clone(),
        source,
    })?;
    Ok(if all_pass { EXIT_OK } else { EXIT_RUNTIME })
}

#[derive(Serialize)]
struct BalancePayload {
    network: String,
    graph: signed_graph::SignedGraph,
    #[serde(skip_serializing_if = "Option::is_none")]
    balance: Option<signed_graph::BalanceResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonmonotone: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_monotonicity_violation: Option<f64>,
}

/// `noisebound balance`: extract the signed graph, decide balance, emit
/// DOT and a sampled monotonicity check for the found signature.
pub fn cmd_balance(cfg: &RunConfig) -> Result<i32, CliError> {
    ensure_out_dir(cfg)?;
    let mut worst = EXIT_OK;
    for path in &cfg.networks {
        let net = load_network(path)?;
        let graph = signed_graph::extract_signed_graph(&net);
        let dot_path = out_path(cfg, &net.name, "dot");
        fs::write(&dot_path, signed_graph::to_dot(&graph)).map_err(|source| CliError::Io {
            path: dot_path.clone(),
            source,
        })?;
        let (code, balance, nonmono, violation) = match signed_graph::check_structural_balance(&graph)
        {
            Ok(res) if res.balanced => {
                let sigma = res.sigma.clone().unwrap();
                let box_caps = vec![40u32; net.n()];
                let violation =
                    signed_graph::verify_signed_monotonicity(&net, &sigma, &box_caps, 10_000)
                        .map_err(crate::sim::SimError::Rate)?;
                eprintln!("balance {}: balanced, sigma {:?}", net.name, sigma);
                (EXIT_OK, Some(res), None, Some(violation))
            }
            Ok(res) => {
                eprintln!("balance {}: frustrated", net.name);
                (EXIT_FAILED, Some(res), None, None)
            }
            Err(signed_graph::SignedGraphError::NonMonotone(edges)) => {
                eprintln!("balance {}: inconclusive (unknown edge directions)", net.name);
                (EXIT_INCONCLUSIVE, None, Some(edges), None)
            }
        };
        write_json(
            &out_path(cfg, &net.name, "balance.json"),
            BalancePayload {
                network: net.name.clone(),
                graph,
                balance,
                nonmonotone: nonmono,
                max_monotonicity_violation: violation,
            },
            cfg.no_timestamp,
        )?;
        worst = worst.max(code);
    }
    Ok(worst)
}

#[derive(Serialize)]
struct SimulatePayload {
    network: String,
    replicates: Vec<sim::StationaryEstimate>,
}

/// `noisebound simulate`: batch-means stationary estimates across seeds.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<i32, CliError> {
    use rayon::prelude::*;
    ensure_out_dir(cfg)?;
    for path in &cfg.networks {
        let net = load_network(path)?;
        let burn_in = cfg.burn_in.unwrap_or(0.2 * cfg.t_end);
        let replicates: Vec<sim::StationaryEstimate> = (1..=cfg.seeds)
            .into_par_iter()
            .map(|seed| sim::estimate_stationary_stats(&net, cfg.t_end, burn_in, cfg.batches, seed))
            .collect::<Result<_, _>>()?;
        if cfg.dump_trajectory {
            let traj =
                sim::simulate(&net, &crate::network::State::origin(net.n()), cfg.t_end, 1)?;
            let mut buf = Vec::new();
            traj.write_csv(&mut buf).expect("in-memory write");
            let path = out_path(cfg, &net.name, "trajectory.csv");
            fs::write(&path, buf).map_err(|source| CliError::Io { path, source })?;
        }
        for (k, est) in replicates.iter().enumerate().take(1) {
            let c = &est.components[0];
            eprintln!(
                "simulate {} (replicate {}): mean_1 {:.4} +- {:.4}, fano_1 {:.4} +- {:.4}",
                net.name, k + 1, c.mean, c.mean_se, c.fano, c.fano_se
            );
        }
        write_json(
            &out_path(cfg, &net.name, "simulate.json"),
            SimulatePayload {
                network: net.name.clone(),
                replicates,
            },
            cfg.no_timestamp,
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CouplePayload {
    network: String,
    sigma: Vec<i8>,
    n_seeds: u64,
    t_end: f64,
    total_jumps: u64,
    total_order_violations: usize,
    max_channel_identity_error: f64,
}

/// `noisebound couple`: run the split coupling across seeds and count
/// signed-order violations (provably zero for balanced networks).
pub fn cmd_couple(cfg: &RunConfig) -> Result<i32, CliError> {
    use rayon::prelude::*;
    ensure_out_dir(cfg)?;
    let mut worst = EXIT_OK;
    for path in &cfg.networks {
        let net = load_network(path)?;
        let graph = signed_graph::extract_signed_graph(&net);
        let sigma = match signed_graph::check_structural_balance(&graph) {
            Ok(res) if res.balanced => res.sigma.unwrap(),
            Ok(_) => {
                eprintln!("couple {}: frustrated network, no valid signature", net.name);
                return Ok(EXIT_FAILED);
            }
            Err(_) => {
                eprintln!("couple {}: unknown edge directions", net.name);
                return Ok(EXIT_INCONCLUSIVE);
            }
        };
        // a canonical strictly-ordered starting pair
        let mut x0 = vec![0u32; net.n()];
        let mut y0 = vec![0u32; net.n()];
        for (k, &s) in sigma.iter().enumerate() {
            if s >= 0 {
                y0[k] = 2;
            } else {
                x0[k] = 2;
            }
        }
        let x0 = crate::network::State(x0);
        let y0 = crate::network::State(y0);
        let runs: Vec<(u64, usize, f64)> = (1..=cfg.seeds)
            .into_par_iter()
            .map(|seed| {
                sim::simulate_split_coupling(&net, &sigma, &x0, &y0, cfg.t_end, seed).map(|tr| {
                    (
                        tr.times.len() as u64 - 1,
                        tr.order_violations.len(),
                        tr.max_channel_identity_error,
                    )
                })
            })
            .collect::<Result<_, _>>()?;
        let total_jumps: u64 = runs.iter().map(|r| r.0).sum();
        let total_violations: usize = runs.iter().map(|r| r.1).sum();
        let max_err = runs.iter().map(|r| r.2).fold(0.0f64, f64::max);
        eprintln!(
            "couple {}: {} seeds, {} jumps, {} order violations, channel identity error {:.2e}",
            net.name, cfg.seeds, total_jumps, total_violations, max_err
        );
        write_json(
            &out_path(cfg, &net.name, "couple.json"),
            CouplePayload {
                network: net.name.clone(),
                sigma,
                n_seeds: cfg.seeds,
                t_end: cfg.t_end,
                total_jumps,
                total_order_violations: total_violations,
                max_channel_identity_error: max_err,
            },
            cfg.no_timestamp,
        )?;
        if total_violations > 0 {
            worst = worst.max(EXIT_RUNTIME);
        }
    }
    Ok(worst)
}
