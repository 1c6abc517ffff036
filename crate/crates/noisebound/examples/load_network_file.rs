//! Load a network from its JSON spec file and run the full report
//! pipeline, the same flow the `noisebound report` command uses.
//!
//! ```bash
//! cargo run --release --example load_network_file -- [path/to/network.json]
//! ```

use noisebound::exact::{auto_caps, SolveMethod, TruncatedChain};
use noisebound::hypotheses::certify;
use noisebound::network::{Network, NetworkSpec};
use noisebound::observables::tradeoff_report;

fn main() {
    let default = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/networks/balanced-three-node.json"
    );
    let path = std::env::args().nth(1).unwrap_or_else(|| default.to_string());
    println!("loading {path}");

    let text = std::fs::read_to_string(&path).expect("network file");
    let spec: NetworkSpec = serde_json::from_str(&text).expect("valid JSON spec");
    let net = Network::from_spec(&spec).expect("valid network");
    println!("name: {}, components: {}", net.name, net.n());

    let hyp = certify(&net);
    println!("hypotheses: {:?} (eps {:.3}, A {:.3}, B {:.3})", hyp.verdict, hyp.epsilon, hyp.a, hyp.b);

    let caps = auto_caps(&net).expect("pilot run");
    println!("auto box: {caps:?}");
    let chain = TruncatedChain::build(&net, &caps).expect("box fits in memory");
    let dist = chain.solve(SolveMethod::Power, 1e-13).expect("solver");
    println!(
        "{} states solved, residual {:.2e}, boundary mass {:.2e}",
        chain.n_states, dist.residual, dist.boundary_mass
    );

    let report = tradeoff_report(&dist, &chain).unwrap();
    for (i, c) in report.components.iter().enumerate() {
        println!("component {}: Fano {:.6}, Idot {:+.4e}", i + 1, c.fano, c.info_flow);
    }
    println!(
        "weighted sum {:+.4e}, total info flow {:+.4e}, pass: {}",
        report.weighted_sum, report.total_info_flow, report.verdicts.pass
    );
}
