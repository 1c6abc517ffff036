//! Finite-box truncation and exact stationary distributions.
//!
//! The box `{0..M_1} x ... x {0..M_N}` carries the reflecting truncation:
//! births are suppressed at the boundary (`f~_i(x) = f_i(x_{-i}) 1{x_i < M_i}`)
//! and deaths are untouched. States are linearized mixed-radix with
//! coordinate 1 fastest, so a birth/death in coordinate `i` moves the index
//! by the coordinate stride and the generator is banded.
//!
//! Two solvers are provided. POWER is uniformized power iteration
//! `p <- p (I + Q / lambda_star)` from the uniform vector; because every
//! off-diagonal term is nonnegative the iteration keeps relative accuracy
//! deep into the tails. DIRECT pins the origin's stationary weight to one,
//! solves the remaining banded system by LU with partial pivoting, and
//! normalizes; the result is the same stationary vector the normalization
//! row equation would produce.

use crate::network::{Network, State};
use crate::rate_expr::EvalError;
use crate::sim::{pilot_mean_rates, SimError};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use thiserror::Error;

/// Hard cap on the number of box states.
pub const DEFAULT_STATE_LIMIT: usize = 5_000_000;
/// Banded factorizations beyond this working-set size are refused.
pub const DIRECT_MEMORY_LIMIT: usize = 1 << 30;
/// Default cap multiplier for auto-sized boxes: caps at 8x the estimated
/// stationary mean keep Poisson-like boundary mass below ~1e-8.
pub const AUTO_BOX_KAPPA: f64 = 8.0;
/// Power-iteration cap.
pub const DEFAULT_MAX_ITERS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Power,
    Direct,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("state space has {states} states, over the limit {limit}")]
    TooLarge { states: usize, limit: usize },
    #[error("box caps must have one entry per component")]
    CapsMismatch,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("power iteration did not reach tolerance within {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: u64, residual: f64 },
    #[error("direct solve would need {bytes} bytes of band storage (limit {limit}); use the power method")]
    DirectTooLarge { bytes: usize, limit: usize },
    #[error("generator is numerically singular: {0}")]
    Singular(#[from] crate::banded::SingularError),
}

/// The finite-box chain: per-state effective and raw birth rates, exit
/// rates, and decoded coordinates, in mixed-radix state order.
pub struct TruncatedChain {
    pub net: Network,
    pub caps: Vec<u32>,
    pub n_states: usize,
    strides: Vec<usize>,
    /// Effective birth rates with boundary births suppressed,
    /// `[i * n_states + t]`.
    birth_eff: Vec<f64>,
    /// Raw birth rates `f_i(x_{-i})` (no suppression), same layout.
    birth_raw: Vec<f64>,
    /// Total exit rate per state under the truncated generator.
    exit: Vec<f64>,
    /// Decoded coordinates, `[t * n + i]`.
    coords: Vec<u16>,
    pub max_exit_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
    /// Stationary mass of states with any coordinate at its cap.
    pub boundary_mass: f64,
    /// Final max-norm of pi^T Q.
    pub residual: f64,
    pub method: SolveMethod,
    pub iterations: u64,
}

/// Test-function families for the stationarity identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFamily {
    /// x_i, x_i^2, and x_i x_j for i < j.
    Monomials,
    /// 1{x_i <= n} for every component and level.
    Indicators,
    All,
}

impl TruncatedChain {
    pub fn build(net: &Network, caps: &[u32]) -> Result<Self, BuildError> {
        Self::build_with_limit(net, caps, DEFAULT_STATE_LIMIT)
    }

    pub fn build_with_limit(net: &Network, caps: &[u32], limit: usize) -> Result<Self, BuildError> {
        let n = net.n();
        if caps.len() != n {
            return Err(BuildError::CapsMismatch);
        }
        let mut n_states = 1usize;
        let mut strides = vec![0usize; n];
        for i in 0..n {
            strides[i] = n_states;
            n_states = n_states
                .checked_mul(caps[i] as usize + 1)
                .ok_or(BuildError::TooLarge {
                    states: usize::MAX,
                    limit,
                })?;
        }
        if n_states > limit {
            return Err(BuildError::TooLarge {
                states: n_states,
                limit,
            });
        }
        let mut birth_eff = vec![0.0; n * n_states];
        let mut birth_raw = vec![0.0; n * n_states];
        let mut exit = vec![0.0; n_states];
        let mut coords = vec![0u16; n * n_states];
        let mut x = vec![0u32; n];
        for t in 0..n_states {
            let mut total = 0.0;
            for i in 0..n {
                coords[t * n + i] = x[i] as u16;
                let raw = net.rates[i].eval(&x)?;
                birth_raw[i * n_states + t] = raw;
                let eff = if x[i] < caps[i] { raw } else { 0.0 };
                birth_eff[i * n_states + t] = eff;
                total += eff + x[i] as f64 / net.tau[i];
            }
            exit[t] = total;
            // odometer
            for i in 0..n {
                if x[i] < caps[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
            }
        }
        let max_exit_rate = exit.iter().cloned().fold(0.0, f64::max);
        Ok(TruncatedChain {
            net: net.clone(),
            caps: caps.to_vec(),
            n_states,
            strides,
            birth_eff,
            birth_raw,
            exit,
            coords,
            max_exit_rate,
        })
    }

    pub fn n(&self) -> usize {
        self.net.n()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Decoded coordinates of state `t`.
    pub fn coords_of(&self, t: usize) -> &[u16] {
        let n = self.n();
        &self.coords[t * n..(t + 1) * n]
    }

    pub fn state_of(&self, t: usize) -> State {
        State(self.coords_of(t).iter().map(|&c| c as u32).collect())
    }

    pub fn index_of(&self, state: &State) -> usize {
        state
            .0
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    /// Effective (boundary-suppressed) birth rate of component `i` at `t`.
    pub fn birth_eff(&self, i: usize, t: usize) -> f64 {
        self.birth_eff[i * self.n_states + t]
    }

    /// Raw birth rate of component `i` at state `t`.
    pub fn birth_raw(&self, i: usize, t: usize) -> f64 {
        self.birth_raw[i * self.n_states + t]
    }

    pub fn exit_rate(&self, t: usize) -> f64 {
        self.exit[t]
    }

    /// y = Q^T p: net probability inflow per state. `y` must have
    /// `n_states` entries.
    pub fn apply_transpose(&self, p: &[f64], y: &mut [f64]) {
        let n = self.n();
        let n_states = self.n_states;
        let inv_tau: Vec<f64> = self.net.tau.iter().map(|t| 1.0 / t).collect();
        let chunk = 8192.max(n_states / (4 * rayon::current_num_threads().max(1)) + 1);
        y.par_chunks_mut(chunk).enumerate().for_each(|(ci, yc)| {
            let base = ci * chunk;
            for (k, slot) in yc.iter_mut().enumerate() {
                let t = base + k;
                let c = &self.coords[t * n..(t + 1) * n];
                let mut acc = -self.exit[t] * p[t];
                for i in 0..n {
                    let xi = c[i] as usize;
                    if xi >= 1 {
                        let from = t - self.strides[i];
                        acc += self.birth_eff[i * n_states + from] * p[from];
                    }
                    if xi < self.caps[i] as usize {
                        let from = t + self.strides[i];
                        acc += (xi as f64 + 1.0) * inv_tau[i] * p[from];
                    }
                }
                *slot = acc;
            }
        });
    }

    /// E_pi[(L phi)(X)] for an arbitrary test function given by
    /// `phi(coords)`.
    pub fn generator_expectation(&self, pi: &[f64], phi: &dyn Fn(&[u16]) -> f64) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        let mut scratch: Vec<u16> = vec![0; n];
        for t in 0..self.n_states {
            let c = self.coords_of(t);
            let here = phi(c);
            let mut lphi = 0.0;
            for i in 0..n {
                let b = self.birth_eff(i, t);
                if b != 0.0 {
                    scratch.copy_from_slice(c);
                    scratch[i] += 1;
                    lphi += b * (phi(&scratch) - here);
                }
                let xi = c[i] as f64;
                if xi >= 1.0 {
                    scratch.copy_from_slice(c);
                    scratch[i] -= 1;
                    lphi += xi / self.net.tau[i] * (phi(&scratch) - here);
                }
            }
            acc += pi[t] * lphi;
        }
        acc
    }

    pub fn solve(&self, method: SolveMethod, tol: f64) -> Result<StationaryDistribution, SolveError> {
        self.solve_with_max_iters(method, tol, DEFAULT_MAX_ITERS)
    }

    pub fn solve_with_max_iters(
        &self,
        method: SolveMethod,
        tol: f64,
        max_iters: u64,
    ) -> Result<StationaryDistribution, SolveError> {
        if self.n_states == 1 {
            return Ok(self.finish(vec![1.0], method, 0));
        }
        match method {
            SolveMethod::Power => self.solve_power(tol, max_iters),
            SolveMethod::Direct => self.solve_direct(),
        }
    }

    fn solve_power(&self, tol: f64, max_iters: u64) -> Result<StationaryDistribution, SolveError> {
        let n_states = self.n_states;
        let lambda = self.max_exit_rate;
        if lambda == 0.0 {
            return Ok(self.finish(vec![1.0 / n_states as f64; n_states], SolveMethod::Power, 0));
        }
        let mut p = vec![1.0 / n_states as f64; n_states];
        let mut y = vec![0.0; n_states];
        let mut iterations = 0u64;
        let mut residual = f64::INFINITY;
        while iterations < max_iters {
            self.apply_transpose(&p, &mut y);
            residual = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let inv = 1.0 / lambda;
            p.iter_mut().zip(&y).for_each(|(pt, yt)| *pt += yt * inv);
            iterations += 1;
            if residual <= tol {
                break;
            }
            if iterations % 256 == 0 {
                let sum: f64 = p.iter().sum();
                let inv = 1.0 / sum;
                p.iter_mut().for_each(|v| *v *= inv);
            }
        }
        if residual > tol {
            return Err(SolveError::NoConvergence {
                iterations,
                residual,
            });
        }
        Ok(self.finish(p, SolveMethod::Power, iterations))
    }

    fn solve_direct(&self) -> Result<StationaryDistribution, SolveError> {
        use crate::banded::BandedMatrix;
        let n = self.n();
        let n_states = self.n_states;
        let m = n_states - 1;
        let w = self.strides[n - 1]; // half bandwidth
        let bytes = BandedMatrix::storage_bytes(m, w, w);
        if bytes > DIRECT_MEMORY_LIMIT {
            return Err(SolveError::DirectTooLarge {
                bytes,
                limit: DIRECT_MEMORY_LIMIT,
            });
        }
        // A = Q^T with the row and column of the origin removed; the
        // origin's column moves to the right-hand side with weight 1.
        let mut mat = BandedMatrix::zeros(m, w, w);
        for u in 1..n_states {
            let col = u - 1;
            mat.set(col, col, -self.exit[u]);
            let c = self.coords_of(u);
            for i in 0..n {
                let xi = c[i] as usize;
                if xi < self.caps[i] as usize {
                    // birth u -> u + stride enters row (u + stride) - 1
                    let row = u + self.strides[i] - 1;
                    mat.set(row, col, self.birth_eff(i, u));
                }
                if xi >= 1 {
                    let v = u - self.strides[i];
                    if v >= 1 {
                        mat.set(v - 1, col, xi as f64 / self.net.tau[i]);
                    }
                }
            }
        }
        let mut rhs = vec![0.0; m];
        for i in 0..n {
            if self.caps[i] >= 1 {
                rhs[self.strides[i] - 1] = -self.birth_eff(i, 0);
            }
        }
        let lu = mat.factor()?;
        lu.solve(&mut rhs);
        let mut pi = Vec::with_capacity(n_states);
        pi.push(1.0);
        pi.extend_from_slice(&rhs);
        for v in pi.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(self.finish(pi, SolveMethod::Direct, 1))
    }

    fn finish(&self, mut pi: Vec<f64>, method: SolveMethod, iterations: u64) -> StationaryDistribution {
        let sum: f64 = pi.iter().sum();
        let inv = 1.0 / sum;
        pi.iter_mut().for_each(|v| *v *= inv);
        let mut y = vec![0.0; self.n_states];
        if self.n_states > 1 {
            self.apply_transpose(&pi, &mut y);
        }
        let residual = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let n = self.n();
        let mut boundary_mass = 0.0;
        for t in 0..self.n_states {
            let c = self.coords_of(t);
            if (0..n).any(|i| c[i] as u32 == self.caps[i]) {
                boundary_mass += pi[t];
            }
        }
        StationaryDistribution {
            pi,
            boundary_mass,
            residual,
            method,
            iterations,
        }
    }
}

/// Max over the family of |E_pi[(L phi)(X)]| on the truncated generator.
pub fn check_stationarity_identity(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    family: TestFamily,
) -> f64 {
    let n = chain.n();
    let mut worst = 0.0f64;
    let mut check = |phi: &dyn Fn(&[u16]) -> f64| {
        worst = worst.max(chain.generator_expectation(&dist.pi, phi).abs());
    };
    if matches!(family, TestFamily::Monomials | TestFamily::All) {
        for i in 0..n {
            check(&|c: &[u16]| c[i] as f64);
            check(&|c: &[u16]| (c[i] as f64) * (c[i] as f64));
            for j in (i + 1)..n {
                check(&|c: &[u16]| (c[i] as f64) * (c[j] as f64));
            }
        }
    }
    if matches!(family, TestFamily::Indicators | TestFamily::All) {
        for i in 0..n {
            for level in 0..chain.caps[i] {
                check(&|c: &[u16]| if (c[i] as u32) <= level { 1.0 } else { 0.0 });
            }
        }
    }
    worst
}

/// Size the box as `ceil(kappa * tau_i * mu_i)` from a pilot simulation
/// estimate of the mean birth rates, with a floor of 8.
pub fn auto_caps(net: &Network) -> Result<Vec<u32>, SimError> {
    let mu = pilot_mean_rates(net)?;
    Ok(net
        .tau
        .iter()
        .zip(&mu)
        .map(|(&tau, &m)| ((AUTO_BOX_KAPPA * tau * m).ceil() as u32).max(8))
        .collect())
}

/// Dump pi as CSV with columns `x_1..x_N, pi`.
pub fn write_pi_csv<W: Write>(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    mut out: W,
) -> std::io::Result<()> {
    let n = chain.n();
    for i in 0..n {
        write!(out, "x_{},", i + 1)?;
    }
    writeln!(out, "pi")?;
    for t in 0..chain.n_states {
        for c in chain.coords_of(t) {
            write!(out, "{c},")?;
        }
        writeln!(out, "{}", dist.pi[t])?;
    }
    Ok(())
}

/// Dump the truncated generator as `row col value` triplets
/// (from-state, to-state, rate; diagonal included).
pub fn write_generator_coo<W: Write>(chain: &TruncatedChain, mut out: W) -> std::io::Result<()> {
    let n = chain.n();
    for t in 0..chain.n_states {
        let c = chain.coords_of(t);
        writeln!(out, "{} {} {}", t, t, -chain.exit_rate(t))?;
        for i in 0..n {
            if (c[i] as u32) < chain.caps[i] {
                writeln!(out, "{} {} {}", t, t + chain.strides()[i], chain.birth_eff(i, t))?;
            }
            if c[i] >= 1 {
                writeln!(
                    out,
                    "{} {} {}",
                    t,
                    t - chain.strides()[i],
                    c[i] as f64 / chain.net.tau[i]
                )?;
            }
        }
    }
    Ok(())
}
