//! The repressilator: a three-cycle of repressions whose signed graph is
//! frustrated (the unique cycle carries an odd number of negative edges).
//! No signature exists, so the termwise bound is not available — but the
//! global tradeoff still holds on the solved chain.
//!
//! ```bash
//! cargo run --release --example repressilator_frustration
//! ```

use noisebound::exact::{SolveMethod, TruncatedChain};
use noisebound::gallery;
use noisebound::observables::tradeoff_report;
use noisebound::signed_graph::{check_structural_balance, extract_signed_graph, EdgeSign};

fn main() {
    let net = gallery::repressilator();
    println!("network: {}", net.name);

    let graph = extract_signed_graph(&net);
    for e in &graph.edges {
        let sign = match e.sign {
            EdgeSign::Positive => "+",
            EdgeSign::Negative => "-",
        };
        println!("  x{} -> x{}  ({})", e.from + 1, e.to + 1, sign);
    }
    let balance = check_structural_balance(&graph).unwrap();
    println!("balanced: {}", balance.balanced);
    if let Some(witness) = &balance.witness {
        let negatives = witness
            .iter()
            .filter(|e| e.sign == EdgeSign::Negative)
            .count();
        println!("frustrated cycle with {negatives} negative edges:");
        for e in witness {
            println!("  x{} -- x{}", e.from + 1, e.to + 1);
        }
    }

    let chain = TruncatedChain::build(&net, &[30, 30, 30]).unwrap();
    println!("solving {} states by power iteration...", chain.n_states);
    let dist = chain.solve(SolveMethod::Power, 1e-14).unwrap();
    let report = tradeoff_report(&dist, &chain).unwrap();
    for (i, c) in report.components.iter().enumerate() {
        println!("component {}: Fano {:.6}, Idot {:+.4e}", i + 1, c.fano, c.info_flow);
    }
    println!(
        "weighted sum {:+.6e} (>= 0), total info flow {:+.3e} (= 0)",
        report.weighted_sum, report.total_info_flow
    );
    println!("all verdicts pass: {}", report.verdicts.pass);
}
