//! Bundled example networks and seeded random generators.
//!
//! The named networks are the recurring test subjects: the independent
//! Poisson pair, the mutually repressing toggle, a balanced three-node
//! loop, its frustrated cousin the repressilator, and an asymmetric
//! one-way repression. The random generators produce certifiable networks
//! (bounded Hill terms plus a small linear budget under the drift gap) and
//! structurally balanced networks with a known signature, deterministically
//! from a seed.

use crate::network::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn poisson_product() -> Network {
    Network::from_parts("poisson-product", vec![1.0, 1.0], &["2", "3"]).unwrap()
}

pub fn mutual_repression() -> Network {
    Network::from_parts(
        "mutual-repression",
        vec![1.0, 1.0],
        &["1+5/(1+x2)", "1+5/(1+x1)"],
    )
    .unwrap()
}

/// Balanced three-node loop: 1 represses 2, 2 and 3 activate each other,
/// 3 represses 1. Signature (+1, -1, -1).
pub fn balanced_three_node() -> Network {
    Network::from_parts(
        "balanced-three-node",
        vec![1.0, 1.0, 1.0],
        &[
            "1 + 4*hill_rep(x3, 2, 2)",
            "1 + 4*hill_rep(x1, 2, 2) + 2*hill_act(x3, 2, 2)",
            "1 + 3*hill_act(x2, 2, 2)",
        ],
    )
    .unwrap()
}

/// Three-species cycle of repressions; frustrated.
pub fn repressilator() -> Network {
    Network::from_parts(
        "repressilator",
        vec![1.0, 1.0, 1.0],
        &[
            "1 + 8*hill_rep(x3, 4, 2)",
            "1 + 8*hill_rep(x1, 4, 2)",
            "1 + 8*hill_rep(x2, 4, 2)",
        ],
    )
    .unwrap()
}

/// One-way repression with a constant-rate regulator.
pub fn asymmetric_repression() -> Network {
    Network::from_parts("asymmetric-repression", vec![1.0, 1.0], &["1+5/(1+x2)", "3"]).unwrap()
}

/// Linear cross-activation that certifies at tau = 2 (B = 0.4 < 1/2).
pub fn linear_certified() -> Network {
    Network::from_parts(
        "linear-certified",
        vec![2.0, 2.0],
        &["0.5+0.2*x2", "0.5+0.2*x1"],
    )
    .unwrap()
}

/// Same rates at tau = 3: fails the drift gap (B = 0.4 >= 1/3).
pub fn linear_drift_gap_failure() -> Network {
    Network::from_parts(
        "linear-drift-gap-failure",
        vec![3.0, 3.0],
        &["0.5+0.2*x2", "0.5+0.2*x1"],
    )
    .unwrap()
}

pub fn named_networks() -> Vec<Network> {
    vec![
        poisson_product(),
        mutual_repression(),
        balanced_three_node(),
        repressilator(),
        asymmetric_repression(),
        linear_certified(),
    ]
}

/// A random certifiable network: every rate is a positive base plus
/// bounded Hill terms, with at most one small linear term whose slope
/// budget keeps B below 1/tau_max. Means are kept small enough for desk-
/// scale boxes.
pub fn random_certified_network(master_seed: u64, index: u64, n: usize) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    let tau: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.6)).collect();
    let tau_max = tau.iter().cloned().fold(0.0, f64::max);
    // slope budget spread over all rates keeps the drift gap open
    let slope_budget = 0.5 / tau_max;
    let mut rates = Vec::with_capacity(n);
    let mut linear_used = false;
    for i in 0..n {
        let base = rng.gen_range(0.3..1.2);
        let mut src = format!("{base:.3}");
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let n_terms = rng.gen_range(1..=2.min(others.len()));
        for k in 0..n_terms {
            let j = others[(rng.gen_range(0..others.len()) + k) % others.len()];
            let var = j + 1;
            match rng.gen_range(0..4) {
                0 => {
                    let coef: f64 = rng.gen_range(0.5..2.5);
                    let kk = rng.gen_range(1..6);
                    let h = rng.gen_range(1..3);
                    src = format!("{src} + {coef:.3}*hill_act(x{var}, {kk}, {h})");
                }
                1 => {
                    let coef: f64 = rng.gen_range(0.5..2.5);
                    let kk = rng.gen_range(1..6);
                    let h = rng.gen_range(1..3);
                    src = format!("{src} + {coef:.3}*hill_rep(x{var}, {kk}, {h})");
                }
                2 => {
                    let coef: f64 = rng.gen_range(0.5..3.0);
                    let shift = rng.gen_range(1..4);
                    src = format!("{src} + {coef:.3}/({shift} + x{var})");
                }
                _ => {
                    if linear_used {
                        let coef: f64 = rng.gen_range(0.5..2.0);
                        let kk = rng.gen_range(1..6);
                        src = format!("{src} + {coef:.3}*hill_act(x{var}, {kk}, 1)");
                    } else {
                        linear_used = true;
                        let slope = rng.gen_range(0.2..0.9) * slope_budget;
                        src = format!("{src} + {slope:.4}*x{var}");
                    }
                }
            }
        }
        rates.push(src);
    }
    let rate_refs: Vec<&str> = rates.iter().map(|s| s.as_str()).collect();
    Network::from_parts(
        format!("random-certified-{index}"),
        tau,
        &rate_refs,
    )
    .unwrap()
}

/// A random structurally balanced network together with its signature.
/// Signs are drawn first (`sign(j -> i) = sigma_i * sigma_j`), then rates
/// are built from Hill terms matching those signs.
pub fn random_balanced_network(master_seed: u64, index: u64, n: usize) -> (Network, Vec<i8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ 0x5eed_ba1a);
    rng.set_stream(index);
    let mut sigma: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    // canonical form: first vertex positive (the checker normalizes this way)
    if sigma[0] == -1 {
        for s in sigma.iter_mut() {
            *s = -*s;
        }
    }
    let mut rates = Vec::with_capacity(n);
    for i in 0..n {
        let base = rng.gen_range(0.4..1.2);
        let mut src = format!("{base:.3}");
        // each component gets 1..=2 regulators among the others
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for k in (1..others.len()).rev() {
            let swap = rng.gen_range(0..=k);
            others.swap(k, swap);
        }
        let n_reg = rng.gen_range(1..=2.min(others.len()));
        for &j in others.iter().take(n_reg) {
            let coef: f64 = rng.gen_range(0.8..3.0);
            let kk = rng.gen_range(1..6);
            let h = rng.gen_range(1..3);
            let var = j + 1;
            let positive = sigma[i] * sigma[j] > 0;
            if positive {
                src = format!("{src} + {coef:.3}*hill_act(x{var}, {kk}, {h})");
            } else {
                src = format!("{src} + {coef:.3}*hill_rep(x{var}, {kk}, {h})");
            }
        }
        rates.push(src);
    }
    let tau: Vec<f64> = (0..n).map(|_| rng.gen_range(0.6..1.5)).collect();
    let rate_refs: Vec<&str> = rates.iter().map(|s| s.as_str()).collect();
    let net = Network::from_parts(format!("random-balanced-{index}"), tau, &rate_refs).unwrap();
    (net, sigma)
}
