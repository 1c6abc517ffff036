//! The Poisson baseline: two unregulated components with constant birth
//! rates are independent Poisson variables at stationarity, so both Fano
//! factors equal 1 and every current vanishes.
//!
//! ```bash
//! cargo run --release --example poisson_baseline
//! ```

use noisebound::exact::{SolveMethod, TruncatedChain};
use noisebound::gallery;
use noisebound::observables::{component_stats, fiber_currents, flux_balance_residuals};

fn main() {
    let net = gallery::poisson_product();
    println!("network: {} (f1 = 2, f2 = 3, tau = 1)", net.name);

    let chain = TruncatedChain::build(&net, &[30, 30]).unwrap();
    let dist = chain.solve(SolveMethod::Direct, 1e-12).unwrap();
    println!(
        "solved {} states, residual {:.2e}, boundary mass {:.2e}",
        chain.n_states, dist.residual, dist.boundary_mass
    );
    println!(
        "pi(0,0) = {:.6e}  (exp(-5) = {:.6e})",
        dist.pi[0],
        (-5.0f64).exp()
    );

    for i in 0..2 {
        let stats = component_stats(&dist, &chain, i).unwrap();
        println!(
            "component {}: mean {:.6} variance {:.6} Fano {:.12}",
            i + 1,
            stats.mean,
            stats.variance,
            stats.fano
        );
        println!(
            "  mean identity |E[X] - tau*mu| = {:.2e}, Fano-covariance residual {:.2e}",
            stats.mean_identity_residual, stats.fano_cov_residual
        );
        let flux = flux_balance_residuals(&dist, &chain, i);
        let worst = flux.iter().cloned().fold(0.0, f64::max);
        println!("  worst flux-balance residual over levels: {worst:.2e}");
        let currents = fiber_currents(&dist, &chain, i);
        println!(
            "  max |fiber current| = {:.2e} (detailed balance: all vanish)",
            currents.max_abs_current()
        );
    }
}
