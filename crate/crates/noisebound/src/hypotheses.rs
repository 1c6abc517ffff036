//! Checkable sufficient conditions for the standing hypotheses.
//!
//! A network is certified when three conditions hold with rigorous
//! per-rate bounds:
//!
//! 1. a uniform floor `eps > 0` with `eps <= f_i(v)` everywhere;
//! 2. at-most-linear total birth growth `sum_i f_i(x_{-i}) <= A + B*s(x)`;
//! 3. the drift gap `B < 1/tau_max`.
//!
//! Certification implies irreducibility, positive recurrence, finite second
//! moments, positive finite mean birth rates, and total jump rate at most
//! `C = (A + B + 1/tau_min)(1 + s(x))` — everything the stationary identity
//! and tradeoff machinery needs. The engine is the Lyapunov function
//! `V(x) = (1 + s(x))^2`, whose drift under the generator is bounded by the
//! quadratic reported in [`DriftReport`].

use crate::network::{Network, State};
use crate::rate_expr::AffineBound;
use serde::Serialize;
use thiserror::Error;

/// Which of the three sufficient conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedCondition {
    /// No uniform positive lower bound on some birth rate.
    RateLowerBound,
    /// Total birth rate provably grows superlinearly.
    TotalBirthLinearGrowth,
    /// Linear growth coefficient B is not below 1/tau_max.
    DriftGapCondition,
}

impl std::fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FailedCondition::RateLowerBound => "rate_lower_bound",
            FailedCondition::TotalBirthLinearGrowth => "total_birth_linear_growth",
            FailedCondition::DriftGapCondition => "drift_gap_condition",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "condition")]
pub enum Verdict {
    /// All three conditions hold with rigorous bounds.
    Certified,
    /// A condition provably fails.
    Failed(FailedCondition),
    /// Some per-rate bound is non-rigorous; downstream results are
    /// conditional on the standing hypotheses holding anyway.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub verdict: Verdict,
    /// Certified uniform lower bound over all rates.
    pub epsilon: f64,
    /// Total birth growth: sum_i f_i <= a + b * s(x).
    pub a: f64,
    pub b: f64,
    pub tau_max: f64,
    pub tau_min: f64,
    /// 1/tau_max - b; positive when the drift gap condition holds.
    pub gap: f64,
    /// Total-rate growth constant (A + B + 1/tau_min).
    pub c_lambda: f64,
    pub per_rate: Vec<AffineBound>,
}

/// Coefficients of the drift polynomial bound
/// `(LV)(x) <= q2*s^2 + q1*s + q0` for `V = (1+s)^2`, together with a
/// concrete Foster-Lyapunov triple and a direct check of the inequality on
/// an enumerated ball.
#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub quadratic_coeff: f64,
    pub linear_coeff: f64,
    pub constant: f64,
    /// (LV)(x) <= -c V(x) + b 1{s <= r}.
    pub c: f64,
    pub b: f64,
    pub r: f64,
    /// Max over enumerated states of (LV)(x) + c V(x) - b 1{s <= r};
    /// nonpositive means the drift inequality held everywhere checked.
    pub empirical_max_violation: f64,
    /// States with s(x) <= check_radius + 5 were enumerated.
    pub check_radius: u64,
    pub states_checked: usize,
}

#[derive(Debug, Error)]
pub enum HypothesesError {
    #[error("hypotheses are not certified with rigorous bounds (verdict {0:?})")]
    NotCertified(Verdict),
    #[error("rate evaluation failed during drift check: {0}")]
    Eval(#[from] crate::rate_expr::EvalError),
}

/// Decide certification from per-rate affine bounds: `epsilon` is the least
/// per-rate floor and `(a, b)` are componentwise sums of the per-rate upper
/// bounds (possibly loose, never unsound).
pub fn certify(net: &Network) -> HypothesisReport {
    let tau_max = net.tau.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tau_min = net.tau.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut per_rate = Vec::with_capacity(net.n());
    let mut unbounded = false;
    for rate in &net.rates {
        match rate.bounds() {
            Ok(bound) => per_rate.push(bound),
            Err(_) => {
                unbounded = true;
                per_rate.push(AffineBound {
                    lower: 0.0,
                    upper_const: f64::MAX,
                    upper_slope: f64::MAX,
                    rigorous: true,
                });
            }
        }
    }
    let epsilon = per_rate.iter().map(|b| b.lower).fold(f64::INFINITY, f64::min);
    let a: f64 = per_rate.iter().map(|b| b.upper_const).sum();
    let b: f64 = per_rate.iter().map(|b| b.upper_slope).sum();
    let gap = 1.0 / tau_max - b;
    let all_rigorous = per_rate.iter().all(|b| b.rigorous);

    let verdict = if unbounded {
        Verdict::Failed(FailedCondition::TotalBirthLinearGrowth)
    } else if !all_rigorous {
        Verdict::Inconclusive
    } else if epsilon <= 0.0 {
        Verdict::Failed(FailedCondition::RateLowerBound)
    } else if gap <= 0.0 {
        Verdict::Failed(FailedCondition::DriftGapCondition)
    } else {
        Verdict::Certified
    };

    HypothesisReport {
        verdict,
        epsilon,
        a,
        b,
        tau_max,
        tau_min,
        gap,
        c_lambda: a + b + 1.0 / tau_min,
        per_rate,
    }
}

/// Drift coefficients and a direct evaluation of `(LV)(x)` on all states
/// with `s(x) <= check_radius + 5`, using the untruncated transition rates.
///
/// The suggested rate is `c = |quadratic_coeff| / 2`, leaving slack for the
/// linear term at large `s`; `r` is then the last radius where the bounding
/// quadratic is positive and `b` its maximum below `r`.
pub fn drift_report(net: &Network, check_radius: u64) -> Result<DriftReport, HypothesesError> {
    let report = certify(net);
    if report.verdict != Verdict::Certified {
        return Err(HypothesesError::NotCertified(report.verdict));
    }
    let (a, b_growth, tau_max) = (report.a, report.b, report.tau_max);
    let quadratic_coeff = 2.0 * b_growth - 2.0 / tau_max;
    let linear_coeff = 2.0 * a + 3.0 * b_growth - 1.0 / tau_max;
    let constant = 3.0 * a;
    let c = -quadratic_coeff / 2.0;

    // q(s) = (LV-bound)(s) + c (1+s)^2, a downward parabola; the drift
    // inequality holds without the indicator wherever q(s) <= 0.
    let q2 = quadratic_coeff + c;
    let q1 = linear_coeff + 2.0 * c;
    let q0 = constant + c;
    debug_assert!(q2 < 0.0);
    let disc = q1 * q1 - 4.0 * q2 * q0;
    let r = if disc <= 0.0 {
        0.0
    } else {
        ((-q1 - disc.sqrt()) / (2.0 * q2)).max(0.0)
    };
    let q = |s: f64| q2 * s * s + q1 * s + q0;
    let vertex = -q1 / (2.0 * q2);
    let mut b = q(0.0).max(q(r));
    if vertex > 0.0 && vertex < r {
        b = b.max(q(vertex));
    }
    b = b.max(0.0);

    let mut max_violation = f64::NEG_INFINITY;
    let mut states_checked = 0usize;
    let v_of = |s: f64| (1.0 + s) * (1.0 + s);
    for state in enumerate_ball(net.n(), check_radius + 5) {
        let s = state.total() as f64;
        let mut lv = 0.0;
        for t in net.transitions(&state)? {
            lv += t.rate * (v_of(t.target.total() as f64) - v_of(s));
        }
        let allowance = if s <= r { b } else { 0.0 };
        max_violation = max_violation.max(lv + c * v_of(s) - allowance);
        states_checked += 1;
    }

    Ok(DriftReport {
        quadratic_coeff,
        linear_coeff,
        constant,
        c,
        b,
        r,
        empirical_max_violation: max_violation,
        check_radius,
        states_checked,
    })
}

/// All lattice states with total copy number at most `radius`.
pub fn enumerate_ball(n: usize, radius: u64) -> Vec<State> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill_ball(&mut out, &mut current, 0, radius);
    out
}

fn fill_ball(out: &mut Vec<State>, current: &mut Vec<u32>, coord: usize, left: u64) {
    if coord == current.len() {
        out.push(State(current.clone()));
        return;
    }
    for v in 0..=left {
        current[coord] = v as u32;
        fill_ball(out, current, coord + 1, left - v);
    }
    current[coord] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(f: &[&str], tau: &[f64]) -> Network {
        Network::from_parts("t", tau.to_vec(), f).unwrap()
    }

    #[test]
    fn linear_network_with_gap_certifies() {
        let r = certify(&net(&["0.5+0.2*x2", "0.5+0.2*x1"], &[2.0, 2.0]));
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.epsilon, 0.5);
        assert_eq!(r.a, 1.0);
        assert!((r.b - 0.4).abs() < 1e-15);
        assert!((r.gap - 0.1).abs() < 1e-15);
    }

    #[test]
    fn slow_degradation_fails_drift_gap() {
        let r = certify(&net(&["0.5+0.2*x2", "0.5+0.2*x1"], &[3.0, 3.0]));
        assert_eq!(r.verdict, Verdict::Failed(FailedCondition::DriftGapCondition));
        assert!(r.gap <= 0.0);
    }

    #[test]
    fn bounded_hill_rates_certify() {
        let r = certify(&net(&["1+5/(1+x2)", "1+5/(1+x1)"], &[1.0, 1.0]));
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.epsilon, 1.0);
        assert_eq!(r.a, 12.0);
        assert_eq!(r.b, 0.0);
    }

    #[test]
    fn zero_floor_fails_lower_bound() {
        let r = certify(&net(&["hill_act(x2, 2, 1)", "1"], &[1.0, 1.0]));
        assert_eq!(r.verdict, Verdict::Failed(FailedCondition::RateLowerBound));
    }

    #[test]
    fn superlinear_growth_fails() {
        let r = certify(&net(&["x2*x3", "1", "1"], &[1.0, 1.0, 1.0]));
        assert_eq!(
            r.verdict,
            Verdict::Failed(FailedCondition::TotalBirthLinearGrowth)
        );
    }

    #[test]
    fn non_rigorous_bounds_are_inconclusive() {
        let r = certify(&net(&["3 - 2/(1+x2)", "1"], &[1.0, 1.0]));
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn drift_coefficients_match_hand_values() {
        let d = drift_report(&net(&["2", "3"], &[1.0, 1.0]), 35).unwrap();
        assert_eq!(d.quadratic_coeff, -2.0);
        assert_eq!(d.linear_coeff, 9.0);
        assert_eq!(d.constant, 15.0);
        assert!(d.empirical_max_violation <= 0.0);

        let d = drift_report(&net(&["0.5+0.2*x2", "0.5+0.2*x1"], &[2.0, 2.0]), 35).unwrap();
        assert!((d.quadratic_coeff + 0.2).abs() < 1e-15);
    }

    #[test]
    fn drift_requires_certification() {
        let err = drift_report(&net(&["3 - 2/(1+x2)", "1"], &[1.0, 1.0]), 10);
        assert!(matches!(err, Err(HypothesesError::NotCertified(_))));
    }

    #[test]
    fn ball_enumeration_counts() {
        // C(s+n, n) states with total <= s
        assert_eq!(enumerate_ball(2, 40).len(), 41 * 42 / 2);
        assert_eq!(enumerate_ball(3, 10).len(), 286);
    }

    #[test]
    fn certified_bounds_hold_on_random_states() {
        use rand::{Rng, SeedableRng};
        let nets = [
            net(&["0.5+0.2*x2", "0.5+0.2*x1"], &[2.0, 2.0]),
            net(&["1+5/(1+x2)", "1+5/(1+x1)"], &[1.0, 1.0]),
            net(
                &["0.4 + 2*hill_rep(x3, 3, 2)", "1 + hill_act(x1, 2, 1)", "0.3 + 0.1*x2"],
                &[1.0, 1.5, 2.0],
            ),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for network in &nets {
            let r = certify(network);
            assert_eq!(r.verdict, Verdict::Certified);
            for _ in 0..10_000 {
                let state: Vec<u32> =
                    (0..network.n()).map(|_| rng.gen_range(0..400)).collect();
                let s: f64 = state.iter().map(|&c| c as f64).sum();
                let mut total_birth = 0.0;
                for rate in &network.rates {
                    let f = rate.eval(&state).unwrap();
                    assert!(f >= r.epsilon - 1e-12, "floor violated");
                    total_birth += f;
                }
                assert!(total_birth <= r.a + r.b * s + 1e-9, "growth bound violated");
                let lambda = network
                    .total_rate(&crate::network::State(state.clone()))
                    .unwrap();
                assert!(
                    lambda <= r.c_lambda * (1.0 + s) + 1e-9,
                    "total-rate growth violated"
                );
            }
        }
    }
}
