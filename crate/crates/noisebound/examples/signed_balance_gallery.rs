//! Signed interaction graphs across the bundled networks: extraction,
//! balance/frustration, signatures, sampled monotonicity checks, and DOT
//! output.
//!
//! ```bash
//! cargo run --release --example signed_balance_gallery
//! ```

use noisebound::gallery;
use noisebound::signed_graph::{
    check_structural_balance, extract_signed_graph, to_dot, verify_signed_monotonicity,
};

fn main() {
    for net in gallery::named_networks() {
        let graph = extract_signed_graph(&net);
        println!("== {} ({} edges)", net.name, graph.edges.len());
        match check_structural_balance(&graph) {
            Ok(res) if res.balanced => {
                let sigma = res.sigma.unwrap();
                let worst = verify_signed_monotonicity(
                    &net,
                    &sigma,
                    &vec![40; net.n()],
                    10_000,
                )
                .unwrap();
                println!("   balanced, sigma {sigma:?}, sampled max violation {worst:+.2e}");
            }
            Ok(res) => {
                let cycle = res.witness.unwrap();
                let verts: Vec<String> =
                    cycle.iter().map(|e| format!("x{}", e.from + 1)).collect();
                println!("   frustrated; odd cycle through {}", verts.join(" - "));
            }
            Err(err) => println!("   {err}"),
        }
    }

    println!("\nDOT for the balanced three-node loop:");
    print!("{}", to_dot(&extract_signed_graph(&gallery::balanced_three_node())));
}
