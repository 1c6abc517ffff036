//! Cross-validation of the two computational routes: time averages from a
//! long Gillespie path (with batch-means error bars) against the exact
//! truncated-chain solution.
//!
//! ```bash
//! cargo run --release --example ssa_vs_exact
//! ```

use noisebound::exact::{SolveMethod, TruncatedChain};
use noisebound::gallery;
use noisebound::observables::component_stats;
use noisebound::sim::estimate_stationary_stats;

fn main() {
    let net = gallery::mutual_repression();
    println!("network: {}", net.name);

    let chain = TruncatedChain::build(&net, &[60, 60]).unwrap();
    let dist = chain.solve(SolveMethod::Direct, 1e-12).unwrap();

    let est = estimate_stationary_stats(&net, 20_000.0, 4_000.0, 16, 42).unwrap();
    println!("SSA horizon 20000, burn-in 4000, 16 batches, seed 42\n");
    println!("component |   exact mean |  SSA mean (3 SE)        |  exact Fano |  SSA Fano (3 SE)");
    for i in 0..net.n() {
        let exact = component_stats(&dist, &chain, i).unwrap();
        let c = &est.components[i];
        println!(
            "    {}     |   {:9.5}  |  {:8.5} +- {:8.5}   |  {:9.6}  |  {:7.4} +- {:7.4}",
            i + 1,
            exact.mean,
            c.mean,
            3.0 * c.mean_se,
            exact.fano,
            c.fano,
            3.0 * c.fano_se
        );
        assert!(
            (c.mean - exact.mean).abs() <= 3.0 * c.mean_se,
            "SSA mean outside 3 standard errors"
        );
        assert!(
            (c.fano - exact.fano).abs() <= (3.0 * c.fano_se).max(0.05 * exact.fano),
            "SSA Fano outside tolerance"
        );
    }
    println!("\nempirical mean identity E[X_i] = tau_i * <f_i>:");
    for (i, c) in est.components.iter().enumerate() {
        println!(
            "  component {}: mean {:.5} vs tau*<f> {:.5}",
            i + 1,
            c.mean,
            net.tau[i] * c.mean_birth_rate
        );
    }
}
