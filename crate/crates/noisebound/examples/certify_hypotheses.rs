//! Certification of the sufficient conditions on two linear cross-
//! activation networks that differ only in their degradation timescale:
//! at tau = 2 the growth slope B = 0.4 sits below 1/tau_max = 0.5 and the
//! network certifies; at tau = 3 the drift gap closes and it fails.
//!
//! ```bash
//! cargo run --release --example certify_hypotheses
//! ```

use noisebound::gallery;
use noisebound::hypotheses::{certify, drift_report};

fn main() {
    for net in [gallery::linear_certified(), gallery::linear_drift_gap_failure()] {
        let report = certify(&net);
        println!("{}: {:?}", net.name, report.verdict);
        println!(
            "  eps {:.3}, A {:.3}, B {:.3}, 1/tau_max {:.3}, gap {:+.3}",
            report.epsilon,
            report.a,
            report.b,
            1.0 / report.tau_max,
            report.gap
        );
        for (i, b) in report.per_rate.iter().enumerate() {
            println!(
                "  rate {}: {:.3} <= f <= {:.3} + {:.3}*s(x) (rigorous: {})",
                i + 1,
                b.lower,
                b.upper_const,
                b.upper_slope,
                b.rigorous
            );
        }
    }

    let net = gallery::linear_certified();
    let drift = drift_report(&net, 40).unwrap();
    println!("\ndrift report for {}:", net.name);
    println!(
        "  (LV)(x) <= {:.3}*s^2 + {:.3}*s + {:.3}",
        drift.quadratic_coeff, drift.linear_coeff, drift.constant
    );
    println!(
        "  Foster-Lyapunov triple: c {:.4}, b {:.4}, R {:.2}",
        drift.c, drift.b, drift.r
    );
    println!(
        "  checked {} states with s <= {}: max violation {:+.3e} (<= 0 means the drift bound held)",
        drift.states_checked,
        drift.check_radius + 5,
        drift.empirical_max_violation
    );
}
