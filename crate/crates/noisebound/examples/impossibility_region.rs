//! Figure data for the impossibility region: a family of two-component
//! networks swept over repression strength. Every point (F1, F2) stays out
//! of the sub-Poissonian square — whenever one component dips below 1, the
//! other rises above it.
//!
//! Writes `impossibility_region.csv` to the working directory.
//!
//! ```bash
//! cargo run --release --example impossibility_region
//! ```

use noisebound::exact::{SolveMethod, TruncatedChain};
use noisebound::network::Network;
use noisebound::observables::tradeoff_report;

fn main() {
    let mut rows = String::from("name,F1,F2,weighted_sum,verdict\n");
    println!("{:>22} | {:>9} | {:>9} | {:>12}", "network", "F1", "F2", "weighted sum");
    for strength in [0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        // mutual repression of growing strength
        let f1 = format!("1 + {strength}/(1 + x2)");
        let f2 = format!("1 + {strength}/(1 + x1)");
        let name = format!("mutual-{strength}");
        run(&name, &[&f1, &f2], &mut rows);

        // one-way repression with a frustrated 2-cycle partner
        let f1 = format!("1 + {strength}*hill_act(x2, 3, 2)");
        let f2 = format!("1 + {strength}*hill_rep(x1, 3, 2)");
        let name = format!("frustrated-{strength}");
        run(&name, &[&f1, &f2], &mut rows);
    }
    std::fs::write("impossibility_region.csv", rows).unwrap();
    println!("\nwrote impossibility_region.csv");
}

fn run(name: &str, rates: &[&str; 2], rows: &mut String) {
    let net = Network::from_parts(name, vec![1.0, 1.0], rates).unwrap();
    let cap = 70u32;
    let chain = TruncatedChain::build(&net, &[cap, cap]).unwrap();
    let dist = chain.solve(SolveMethod::Direct, 1e-12).unwrap();
    let report = tradeoff_report(&dist, &chain).unwrap();
    let f1 = report.components[0].fano;
    let f2 = report.components[1].fano;
    let verdict = if report.verdicts.pass { "PASS" } else { "FAIL" };
    println!("{name:>22} | {f1:9.5} | {f2:9.5} | {:+12.3e}", report.weighted_sum);
    rows.push_str(&format!(
        "{name},{f1},{f2},{},{verdict}\n",
        report.weighted_sum
    ));
    assert!(
        report.weighted_sum >= -report.tol_inequality,
        "{name}: global tradeoff violated"
    );
}
