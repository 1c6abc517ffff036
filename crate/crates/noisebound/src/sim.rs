//! Gillespie simulation of the untruncated chain, time-averaged stationary
//! statistics with batch-means error bars, and the order-preserving split
//! coupling.
//!
//! The plain simulator is the direct method: one exponential waiting time at
//! the total rate, then a categorical choice among transitions. The coupling
//! instead runs six reaction channels per coordinate (common/unmatched
//! births and deaths at pairwise-minimum rates) with per-channel
//! next-reaction clocks, mirroring the random-time-change construction it
//! verifies. All randomness comes from counter-based ChaCha streams derived
//! from `(seed, stream index)`, so replicates and channels are independent
//! and reproducible.

use crate::network::{Network, State};
use crate::rate_expr::EvalError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Explosion guard: a single run may not exceed this many jumps.
pub const JUMP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Rate(#[from] EvalError),
    #[error("jump count exceeded the cap of {JUMP_CAP}")]
    JumpCap,
    #[error("initial pair is not ordered under the signed order")]
    NotOrdered,
    #[error("need burn_in < t_end and at least 2 batches")]
    BadWindow,
}

/// A jump path: `states[k]` holds on `[times[k], times[k+1])`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub seed: u64,
    pub t_end: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.states.last().unwrap()
    }

    pub fn n_jumps(&self) -> usize {
        self.times.len() - 1
    }

    /// Dump as CSV with columns `t, x_1..x_N`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "t")?;
        for i in 1..=self.states[0].0.len() {
            write!(out, ",x_{i}")?;
        }
        writeln!(out)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(out, "{t}")?;
            for c in &s.0 {
                write!(out, ",{c}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Exact-in-distribution Gillespie path, deterministic given the seed.
pub fn simulate(net: &Network, init: &State, t_end: f64, seed: u64) -> Result<Trajectory, SimError> {
    let mut rng = replicate_rng(seed, 0);
    let mut t = 0.0;
    let mut x = init.clone();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut jumps = 0u64;
    while t < t_end {
        let transitions = net.transitions(&x)?;
        let total: f64 = transitions.iter().map(|tr| tr.rate).sum();
        if total <= 0.0 {
            break; // absorbing state; the path is constant from here
        }
        let wait = -rng.gen::<f64>().ln() / total;
        t += wait;
        if t >= t_end {
            break;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = transitions.len() - 1;
        for (k, tr) in transitions.iter().enumerate() {
            pick -= tr.rate;
            if pick <= 0.0 {
                chosen = k;
                break;
            }
        }
        x = transitions[chosen].target.clone();
        times.push(t);
        states.push(x.clone());
        jumps += 1;
        if jumps >= JUMP_CAP {
            return Err(SimError::JumpCap);
        }
    }
    Ok(Trajectory {
        times,
        states,
        seed,
        t_end,
    })
}

/// Per-component stationary estimates with batch-means standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentEstimate {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub fano: f64,
    /// Delta-method standard error for variance/mean.
    pub fano_se: f64,
    /// Time-averaged birth rate of this component.
    pub mean_birth_rate: f64,
    pub mean_birth_rate_se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryEstimate {
    pub components: Vec<ComponentEstimate>,
    pub t_end: f64,
    pub burn_in: f64,
    pub n_batches: usize,
    pub seed: u64,
}

/// Time-weighted moments over `(burn_in, t_end]`, split into `n_batches`
/// equal slices for error bars. Starts from the origin.
pub fn estimate_stationary_stats(
    net: &Network,
    t_end: f64,
    burn_in: f64,
    n_batches: usize,
    seed: u64,
) -> Result<StationaryEstimate, SimError> {
    if !(burn_in < t_end) || n_batches < 2 {
        return Err(SimError::BadWindow);
    }
    let n = net.n();
    let mut rng = replicate_rng(seed, 0);
    let mut t = 0.0;
    let mut x = State::origin(n);
    let window = t_end - burn_in;
    let batch_len = window / n_batches as f64;
    // per batch, per component: time integrals of x, x^2, f
    let mut acc = vec![[0.0f64; 3]; n_batches * n];
    let mut jumps = 0u64;
    loop {
        let transitions = net.transitions(&x)?;
        let total: f64 = transitions.iter().map(|tr| tr.rate).sum();
        let t_next = if total > 0.0 {
            t - rng.gen::<f64>().ln() / total
        } else {
            t_end
        };
        let hold_end = t_next.min(t_end);
        // deposit the sojourn [t, hold_end) into overlapping batches
        if hold_end > burn_in {
            let mut lo = t.max(burn_in);
            while lo < hold_end {
                let k = (((lo - burn_in) / batch_len) as usize).min(n_batches - 1);
                let batch_hi = burn_in + (k + 1) as f64 * batch_len;
                let hi = hold_end.min(batch_hi);
                let w = hi - lo;
                if w > 0.0 {
                    for i in 0..n {
                        let xi = x.0[i] as f64;
                        let cell = &mut acc[k * n + i];
                        cell[0] += w * xi;
                        cell[1] += w * xi * xi;
                        cell[2] += w * transitions[i].rate;
                    }
                }
                lo = hi;
            }
        }
        if t_next >= t_end || total <= 0.0 {
            break;
        }
        t = t_next;
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = transitions.len() - 1;
        for (k, tr) in transitions.iter().enumerate() {
            pick -= tr.rate;
            if pick <= 0.0 {
                chosen = k;
                break;
            }
        }
        x = transitions[chosen].target.clone();
        jumps += 1;
        if jumps >= JUMP_CAP {
            return Err(SimError::JumpCap);
        }
    }

    let kb = n_batches as f64;
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let ms: Vec<f64> = (0..n_batches).map(|k| acc[k * n + i][0] / batch_len).collect();
        let ss: Vec<f64> = (0..n_batches).map(|k| acc[k * n + i][1] / batch_len).collect();
        let fs: Vec<f64> = (0..n_batches).map(|k| acc[k * n + i][2] / batch_len).collect();
        let mean = ms.iter().sum::<f64>() / kb;
        let second = ss.iter().sum::<f64>() / kb;
        let fbar = fs.iter().sum::<f64>() / kb;
        let variance = second - mean * mean;
        // sample (co)variances of the batch means
        let var_m = sample_var(&ms, mean);
        let var_s = sample_var(&ss, second);
        let cov_ms = sample_cov(&ms, mean, &ss, second);
        let var_f = sample_var(&fs, fbar);
        let mean_se = (var_m / kb).sqrt();
        // V = s - m^2: gradient (-2m, 1)
        let var_var =
            (4.0 * mean * mean * var_m - 4.0 * mean * cov_ms + var_s).max(0.0);
        let variance_se = (var_var / kb).sqrt();
        // F = s/m - m: gradient (-s/m^2 - 1, 1/m)
        let fano = if mean > 0.0 { variance / mean } else { f64::NAN };
        let gm = -second / (mean * mean) - 1.0;
        let gs = 1.0 / mean;
        let var_fano =
            (gm * gm * var_m + 2.0 * gm * gs * cov_ms + gs * gs * var_s).max(0.0);
        let fano_se = (var_fano / kb).sqrt();
        components.push(ComponentEstimate {
            mean,
            mean_se,
            variance,
            variance_se,
            fano,
            fano_se,
            mean_birth_rate: fbar,
            mean_birth_rate_se: (var_f / kb).sqrt(),
        });
    }
    Ok(StationaryEstimate {
        components,
        t_end,
        burn_in,
        n_batches,
        seed,
    })
}

fn sample_var(xs: &[f64], mean: f64) -> f64 {
    let k = xs.len() as f64;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0)
}

fn sample_cov(xs: &[f64], mx: f64, ys: &[f64], my: f64) -> f64 {
    let k = xs.len() as f64;
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (k - 1.0)
}

/// Rough mean birth rates from a short pilot run, for box sizing.
pub fn pilot_mean_rates(net: &Network) -> Result<Vec<f64>, SimError> {
    let tau_max = net.tau.iter().cloned().fold(0.0, f64::max);
    let t_end = (100.0 * tau_max).max(200.0);
    let est = estimate_stationary_stats(net, t_end, 0.2 * t_end, 4, 0xb0c5)?;
    Ok(est.components.iter().map(|c| c.mean_birth_rate).collect())
}

// ---------------------------------------------------------------------------
// Split coupling
// ---------------------------------------------------------------------------

/// Signed comparison `x <=_sigma y`: coordinates with `sigma_i = -1` are
/// compared in reverse.
pub fn signed_le(sigma: &[i8], x: &State, y: &State) -> bool {
    x.0.iter().zip(&y.0).zip(sigma).all(|((&a, &b), &s)| {
        if s >= 0 {
            a <= b
        } else {
            a >= b
        }
    })
}

/// Paired path of the split coupling, with any signed-order violations.
#[derive(Debug, Clone)]
pub struct CoupledTrajectory {
    pub times: Vec<f64>,
    pub xs: Vec<State>,
    pub ys: Vec<State>,
    /// Times at which `X^x <=_sigma X^y` failed after a jump.
    pub order_violations: Vec<f64>,
    /// Worst deviation of the channel-rate identities
    /// `b0 + bx = f_i(x-leg)` etc. seen at any jump.
    pub max_channel_identity_error: f64,
    pub seed: u64,
    pub t_end: f64,
}

/// Run the split coupling from an ordered pair: per coordinate, common
/// births/deaths fire at the pairwise-minimum rate and unmatched channels
/// carry the excess, each channel driven by its own unit-rate clock.
pub fn simulate_split_coupling(
    net: &Network,
    sigma: &[i8],
    x0: &State,
    y0: &State,
    t_end: f64,
    seed: u64,
) -> Result<CoupledTrajectory, SimError> {
    if !signed_le(sigma, x0, y0) {
        return Err(SimError::NotOrdered);
    }
    let n = net.n();
    let n_channels = 6 * n;
    // channel layout per coordinate i: [b0, bx, by, d0, dx, dy]
    let mut clocks: Vec<ChannelClock> = (0..n_channels)
        .map(|k| ChannelClock::new(replicate_rng(seed, 1 + k as u64)))
        .collect();
    let mut t = 0.0;
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut times = vec![0.0];
    let mut xs = vec![x.clone()];
    let mut ys = vec![y.clone()];
    let mut order_violations = Vec::new();
    let mut max_err = 0.0f64;
    let mut jumps = 0u64;
    let mut rates = vec![0.0f64; n_channels];
    loop {
        for i in 0..n {
            let fx = net.rates[i].eval(x.coords())?;
            let fy = net.rates[i].eval(y.coords())?;
            let b0 = fx.min(fy);
            let dxr = x.0[i] as f64 / net.tau[i];
            let dyr = y.0[i] as f64 / net.tau[i];
            let d0 = dxr.min(dyr);
            rates[6 * i] = b0;
            rates[6 * i + 1] = fx - b0;
            rates[6 * i + 2] = fy - b0;
            rates[6 * i + 3] = d0;
            rates[6 * i + 4] = dxr - d0;
            rates[6 * i + 5] = dyr - d0;
            // the split must reconstruct the marginal rates exactly
            max_err = max_err
                .max((rates[6 * i] + rates[6 * i + 1] - fx).abs())
                .max((rates[6 * i] + rates[6 * i + 2] - fy).abs())
                .max((rates[6 * i + 3] + rates[6 * i + 4] - dxr).abs())
                .max((rates[6 * i + 3] + rates[6 * i + 5] - dyr).abs());
        }
        // next reaction across channels
        let mut best = f64::INFINITY;
        let mut winner = usize::MAX;
        for (k, clock) in clocks.iter().enumerate() {
            let dt = clock.time_to_fire(rates[k]);
            if dt < best {
                best = dt;
                winner = k;
            }
        }
        if winner == usize::MAX || t + best >= t_end {
            break;
        }
        t += best;
        for (k, clock) in clocks.iter_mut().enumerate() {
            clock.advance(rates[k] * best);
        }
        clocks[winner].fire();
        let i = winner / 6;
        match winner % 6 {
            0 => {
                x.0[i] += 1;
                y.0[i] += 1;
            }
            1 => x.0[i] += 1,
            2 => y.0[i] += 1,
            3 => {
                x.0[i] -= 1;
                y.0[i] -= 1;
            }
            4 => x.0[i] -= 1,
            5 => y.0[i] -= 1,
            _ => unreachable!(),
        }
        times.push(t);
        xs.push(x.clone());
        ys.push(y.clone());
        if !signed_le(sigma, &x, &y) {
            order_violations.push(t);
        }
        jumps += 1;
        if jumps >= JUMP_CAP {
            return Err(SimError::JumpCap);
        }
    }
    Ok(CoupledTrajectory {
        times,
        xs,
        ys,
        order_violations,
        max_channel_identity_error: max_err,
        seed,
        t_end,
    })
}

/// One unit-rate Poisson clock in internal time (modified next-reaction
/// bookkeeping).
struct ChannelClock {
    rng: ChaCha8Rng,
    internal: f64,
    next_fire: f64,
}

impl ChannelClock {
    fn new(mut rng: ChaCha8Rng) -> Self {
        let first = -rng.gen::<f64>().ln();
        ChannelClock {
            rng,
            internal: 0.0,
            next_fire: first,
        }
    }

    fn time_to_fire(&self, rate: f64) -> f64 {
        if rate <= 0.0 {
            f64::INFINITY
        } else {
            (self.next_fire - self.internal) / rate
        }
    }

    fn advance(&mut self, delta_internal: f64) {
        self.internal += delta_internal;
    }

    fn fire(&mut self) {
        self.next_fire += -self.rng.gen::<f64>().ln();
    }
}

/// Independent, reproducible stream `k` of a master seed.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_net() -> Network {
        Network::from_parts("p", vec![1.0, 1.0], &["2", "3"]).unwrap()
    }

    fn mutual_repression() -> Network {
        Network::from_parts("mr", vec![1.0, 1.0], &["1+5/(1+x2)", "1+5/(1+x1)"]).unwrap()
    }

    #[test]
    fn same_seed_same_path() {
        let net = poisson_net();
        let a = simulate(&net, &State::origin(2), 50.0, 42).unwrap();
        let b = simulate(&net, &State::origin(2), 50.0, 42).unwrap();
        assert_eq!(a.times, b.times);
        assert_eq!(a.states, b.states);
        let c = simulate(&net, &State::origin(2), 50.0, 43).unwrap();
        assert_ne!(a.times, c.times);
    }

    #[test]
    fn jumps_are_unit_moves_with_increasing_times() {
        let net = mutual_repression();
        let traj = simulate(&net, &State::origin(2), 100.0, 7).unwrap();
        for w in traj.times.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in traj.states.windows(2) {
            let diff: i64 = w[0]
                .0
                .iter()
                .zip(&w[1].0)
                .map(|(&a, &b)| (a as i64 - b as i64).abs())
                .sum();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn poisson_time_average_near_rate() {
        let net = poisson_net();
        let est = estimate_stationary_stats(&net, 10_000.0, 2_000.0, 16, 42).unwrap();
        let c = &est.components[0];
        assert!(
            (c.mean - 2.0).abs() <= 3.0 * c.mean_se,
            "mean {} +- {} vs 2.0",
            c.mean,
            c.mean_se
        );
        let c = &est.components[1];
        assert!((c.mean - 3.0).abs() <= 3.0 * c.mean_se);
        // Fano near 1 for both
        for c in &est.components {
            assert!((c.fano - 1.0).abs() <= 3.0 * c.fano_se, "fano {} +- {}", c.fano, c.fano_se);
        }
    }

    #[test]
    fn mean_identity_holds_empirically() {
        let net = mutual_repression();
        let est = estimate_stationary_stats(&net, 5_000.0, 1_000.0, 16, 3).unwrap();
        for (i, c) in est.components.iter().enumerate() {
            let rhs = net.tau[i] * c.mean_birth_rate;
            let se = net.tau[i] * c.mean_birth_rate_se + c.mean_se;
            assert!((c.mean - rhs).abs() <= 3.0 * se);
        }
    }

    #[test]
    fn two_state_toy_estimator_sanity() {
        // with x2 frozen (f2 = 0 after start), component 1 is birth-death
        // with rate 0.4 and tau 1: mean 0.4
        let net = Network::from_parts("toy", vec![1.0, 1.0], &["0.4", "0.4"]).unwrap();
        let est = estimate_stationary_stats(&net, 20_000.0, 1_000.0, 10, 5).unwrap();
        let c = &est.components[0];
        assert!((c.mean - 0.4).abs() <= 3.0 * c.mean_se);
    }

    #[test]
    fn estimator_input_validation() {
        let net = poisson_net();
        assert!(matches!(
            estimate_stationary_stats(&net, 10.0, 20.0, 4, 1),
            Err(SimError::BadWindow)
        ));
        assert!(matches!(
            estimate_stationary_stats(&net, 10.0, 1.0, 1, 1),
            Err(SimError::BadWindow)
        ));
    }

    #[test]
    fn coupling_rejects_unordered_pair() {
        let net = mutual_repression();
        let sigma = [1i8, -1];
        let err = simulate_split_coupling(
            &net,
            &sigma,
            &State(vec![2, 1]),
            &State(vec![0, 5]),
            10.0,
            1,
        );
        assert!(matches!(err, Err(SimError::NotOrdered)));
    }

    #[test]
    fn coupling_preserves_order_on_mutual_repression() {
        let net = mutual_repression();
        let sigma = [1i8, -1];
        let traj = simulate_split_coupling(
            &net,
            &sigma,
            &State(vec![0, 5]),
            &State(vec![2, 1]),
            1_000.0,
            1,
        )
        .unwrap();
        assert!(traj.order_violations.is_empty());
        assert!(traj.max_channel_identity_error <= 1e-12);
        assert!(traj.times.len() > 100);
    }

    #[test]
    fn equal_start_keeps_legs_identical() {
        let net = mutual_repression();
        let sigma = [1i8, -1];
        let start = State(vec![3, 3]);
        let traj =
            simulate_split_coupling(&net, &sigma, &start, &start, 200.0, 9).unwrap();
        for (x, y) in traj.xs.iter().zip(&traj.ys) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn coupling_marginals_match_generator_rates() {
        // empirical per-state birth rates of the x-leg on a constant-rate
        // network: compare against f = 2 within 4 standard errors
        let net = poisson_net();
        let sigma = [1i8, 1];
        let traj = simulate_split_coupling(
            &net,
            &sigma,
            &State::origin(2),
            &State(vec![1, 1]),
            4_000.0,
            11,
        )
        .unwrap();
        // count birth-1 events of the x-leg and total time
        let mut births = 0u64;
        for k in 1..traj.xs.len() {
            if traj.xs[k].0[0] == traj.xs[k - 1].0[0] + 1 {
                births += 1;
            }
        }
        let t_total = *traj.times.last().unwrap();
        let rate = births as f64 / t_total;
        let se = (births as f64).sqrt() / t_total;
        assert!(
            (rate - 2.0).abs() <= 4.0 * se,
            "empirical birth rate {rate} +- {se}"
        );
    }
}
