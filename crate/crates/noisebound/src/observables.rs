//! Stationary observables and the noise-tradeoff verdicts.
//!
//! Everything here is a read-only function of a solved box distribution.
//! Per component `i` with marginal `pi_i` and conditional laws `pi_n^i`:
//!
//! ```text
//! m_i(n)   = E[f~_i | X_i = n]                      (level birth rates)
//! mu_i     = E[f~_i]
//! J_i(n+1,n;v) = pi(n,v) f~_i(n,v) - pi(n+1,v)(n+1)/tau_i   (fiber current)
//! Idot_i   = sum_{n,v} J_i(n+1,n;v) log( pi_{n+1}^i(v) / pi_n^i(v) )
//!          = -E[(L_i h_i)(X)],   h_i = -log pi_n^i(v)
//! ```
//!
//! On the truncated chain, computed with the boundary-suppressed rates,
//! the following identities hold to solver precision: the mean identity
//! `E[X_i] = tau_i mu_i`, the Fano-covariance identity
//! `F_i - 1 = Cov(f~_i, X_i)/mu_i`, the per-level flux balance
//! `pi_i(n) m_i(n) = ((n+1)/tau_i) pi_i(n+1)`, and total cancellation
//! `sum_i Idot_i = 0`. The inequalities `(F_i - 1)/tau_i >= Idot_i` carry a
//! truncation allowance tied to the boundary mass, since they are only
//! guaranteed on the infinite lattice. Raw-rate variants of the identities
//! are reported alongside; their error scale is the boundary mass.

use crate::exact::{StationaryDistribution, TruncatedChain};
use serde::Serialize;
use thiserror::Error;

/// States below this probability are excluded from logarithmic sums; their
/// total mass is reported, never silently dropped.
pub const PI_LOG_FLOOR: f64 = 1e-280;

/// Fixed tolerances for identities that are exact on the truncated chain.
pub const TOL_MEAN_IDENTITY: f64 = 1e-9;
pub const TOL_FANO_COV: f64 = 1e-9;
pub const TOL_FLUX: f64 = 1e-10;
pub const TOL_INFO_CANCELLATION: f64 = 1e-8;
pub const TOL_INFO_CONSISTENCY: f64 = 1e-9;
pub const TOL_KL_NONNEG: f64 = 1e-12;
/// Base inequality tolerance; the effective tolerance is
/// `max(TOL_INEQUALITY_BASE, 10 * boundary_mass)`.
pub const TOL_INEQUALITY_BASE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ObsError {
    #[error("component {component} has zero mean birth rate on the box; Fano-covariance identity undefined")]
    Degenerate { component: usize },
    #[error("state {state:?} has zero probability next to visited states; log-potentials undefined")]
    ZeroProbability { state: Vec<u16> },
}

/// Stationary summary of one component.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentStats {
    pub mean: f64,
    pub variance: f64,
    pub fano: f64,
    /// Mean effective birth rate E[f~_i].
    pub mu: f64,
    /// Cov(f~_i, X_i).
    pub cov: f64,
    /// Level table n -> m_i(n) with effective rates.
    pub m_of_n: Vec<f64>,
    /// Information flow via the current-weighted double sum.
    pub info_flow: f64,
    /// The same quantity via -E[(L_i h_i)(X)].
    pub info_flow_generator: f64,
    /// Birth and death halves of the double sum; the death half is
    /// -sum_n b_n KL(pi_{n+1}^i || pi_n^i) and must be nonpositive.
    pub info_birth_part: f64,
    pub info_death_part: f64,
    /// Minimum over levels of the conditional KL divergence.
    pub kl_min: f64,
    /// Probability mass excluded from logarithmic sums by the underflow
    /// floor.
    pub excluded_mass: f64,
    pub mean_identity_residual: f64,
    pub fano_cov_residual: f64,
    pub max_flux_residual: f64,
    /// Raw-rate diagnostics (no boundary suppression); these drift from
    /// zero at the scale of the boundary mass.
    pub mu_raw: f64,
    pub cov_raw: f64,
    pub mean_identity_residual_raw: f64,
    pub fano_cov_residual_raw: f64,
}

/// Per-component and aggregate tradeoff quantities with verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct TradeoffReport {
    pub name: String,
    pub components: Vec<ComponentStats>,
    /// sum_i (F_i - 1)/tau_i.
    pub weighted_sum: f64,
    /// sum_i Idot_i; cancels on the truncated chain.
    pub total_info_flow: f64,
    /// (F_i - 1)/tau_i - Idot_i per component.
    pub slacks: Vec<f64>,
    pub boundary_mass: f64,
    /// The inequality tolerance actually applied.
    pub tol_inequality: f64,
    pub verdicts: Verdicts,
    pub solver_residual: f64,
    pub n_states: usize,
    pub caps: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub identity_pass: bool,
    pub inequality_pass: bool,
    pub kl_pass: bool,
    pub pass: bool,
    pub failed_clauses: Vec<String>,
}

/// Fiber currents of one component: `levels[n][ord(v)]` is
/// `J_i(n+1, n; v)`.
#[derive(Debug, Clone)]
pub struct FiberCurrents {
    pub component: usize,
    pub levels: Vec<Vec<f64>>,
}

impl FiberCurrents {
    /// Sum of currents across each level; vanishes by marginal flux
    /// balance.
    pub fn fiber_sums(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.iter().sum()).collect()
    }

    pub fn max_abs_current(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Marginal law of component `i` on the box.
pub fn marginal(dist: &StationaryDistribution, chain: &TruncatedChain, i: usize) -> Vec<f64> {
    let mut out = vec![0.0; chain.caps[i] as usize + 1];
    for t in 0..chain.n_states {
        out[chain.coords_of(t)[i] as usize] += dist.pi[t];
    }
    out
}

/// Per-level absolute flux-balance residuals
/// `|pi_i(n) m_i(n) - ((n+1)/tau_i) pi_i(n+1)|`, n = 0..M_i-1.
pub fn flux_balance_residuals(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    i: usize,
) -> Vec<f64> {
    let cap = chain.caps[i] as usize;
    // birth_flux[n] = sum over the level of pi * f~ = pi_i(n) m_i(n)
    let mut birth_flux = vec![0.0; cap + 1];
    let mut level_mass = vec![0.0; cap + 1];
    for t in 0..chain.n_states {
        let n = chain.coords_of(t)[i] as usize;
        birth_flux[n] += dist.pi[t] * chain.birth_eff(i, t);
        level_mass[n] += dist.pi[t];
    }
    (0..cap)
        .map(|n| {
            let death_flux = (n as f64 + 1.0) / chain.net.tau[i] * level_mass[n + 1];
            (birth_flux[n] - death_flux).abs()
        })
        .collect()
}

/// Fiber ordinal: the state index with coordinate `i` removed, in mixed
/// radix over the remaining coordinates.
fn fiber_ordinal(chain: &TruncatedChain, i: usize, t: usize) -> usize {
    let stride = chain.strides()[i];
    let block = stride * (chain.caps[i] as usize + 1);
    (t % stride) + (t / block) * stride
}

/// The full table of stationary currents across the i-birth edges.
pub fn fiber_currents(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    i: usize,
) -> FiberCurrents {
    let cap = chain.caps[i] as usize;
    let n_fibers = chain.n_states / (cap + 1);
    let mut levels = vec![vec![0.0; n_fibers]; cap];
    let stride = chain.strides()[i];
    for t in 0..chain.n_states {
        let n = chain.coords_of(t)[i] as usize;
        if n < cap {
            let u = t + stride;
            let j = dist.pi[t] * chain.birth_eff(i, t)
                - dist.pi[u] * (n as f64 + 1.0) / chain.net.tau[i];
            levels[n][fiber_ordinal(chain, i, t)] = j;
        }
    }
    FiberCurrents {
        component: i,
        levels,
    }
}

/// Information flow of one component with diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct InfoFlow {
    /// Current-weighted double sum.
    pub value: f64,
    /// -E[(L_i h_i)(X)].
    pub generator_form: f64,
    pub birth_part: f64,
    pub death_part: f64,
    /// Conditional KL divergence per level, `KL(pi_{n+1}^i || pi_n^i)`.
    pub kl_by_level: Vec<f64>,
    pub excluded_mass: f64,
}

/// Compute the information flow of component `i`.
///
/// Terms whose birth and death contributions both vanish are zero by
/// convention; states under the probability floor are excluded and their
/// mass reported.
pub fn information_flow(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    i: usize,
) -> Result<InfoFlow, ObsError> {
    let cap = chain.caps[i] as usize;
    let stride = chain.strides()[i];
    let tau = chain.net.tau[i];
    let pi_i = marginal(dist, chain, i);
    let log_marginal: Vec<f64> = pi_i.iter().map(|&p| p.ln()).collect();
    let pi = &dist.pi;

    let mut excluded_mass = 0.0;
    for t in 0..chain.n_states {
        if pi[t] < PI_LOG_FLOOR {
            excluded_mass += pi[t];
            // a genuinely null state next to visited mass means the support
            // assumption failed, not underflow
            let c = chain.coords_of(t);
            if pi[t] <= 0.0 {
                for k in 0..chain.n() {
                    let up_ok = (c[k] as u32) < chain.caps[k] && pi[t + chain.strides()[k]] > 1e-12;
                    let down_ok = c[k] >= 1 && pi[t - chain.strides()[k]] > 1e-12;
                    if up_ok || down_ok {
                        return Err(ObsError::ZeroProbability { state: c.to_vec() });
                    }
                }
            }
        }
    }

    // log-potential h_i = -log pi_n^i(v); NaN marks excluded states
    let mut h = vec![f64::NAN; chain.n_states];
    for t in 0..chain.n_states {
        if pi[t] >= PI_LOG_FLOOR {
            let n = chain.coords_of(t)[i] as usize;
            h[t] = log_marginal[n] - pi[t].ln();
        }
    }

    // current-weighted double sum over i-birth edges
    let mut birth_part = 0.0;
    let mut death_part = 0.0;
    let mut kl_by_level = vec![0.0; cap];
    for t in 0..chain.n_states {
        let n = chain.coords_of(t)[i] as usize;
        if n >= cap {
            continue;
        }
        let u = t + stride;
        if h[t].is_nan() || h[u].is_nan() {
            continue;
        }
        let log_ratio = h[t] - h[u]; // log( pi_{n+1}^i(v) / pi_n^i(v) )
        let birth = pi[t] * chain.birth_eff(i, t);
        if birth != 0.0 {
            birth_part += birth * log_ratio;
        }
        let death = pi[u] * (n as f64 + 1.0) / tau;
        death_part -= death * log_ratio;
        kl_by_level[n] += pi[u] / pi_i[n + 1] * log_ratio;
    }
    let value = birth_part + death_part;

    // independent route: per-state sweep of -E[(L_i h_i)(X)]
    let mut gen_acc = 0.0;
    for t in 0..chain.n_states {
        if h[t].is_nan() {
            continue;
        }
        let n = chain.coords_of(t)[i] as usize;
        let mut lh = 0.0;
        if n < cap {
            let u = t + stride;
            if !h[u].is_nan() {
                lh += chain.birth_eff(i, t) * (h[u] - h[t]);
            }
        }
        if n >= 1 {
            let d = t - stride;
            if !h[d].is_nan() {
                lh += n as f64 / tau * (h[d] - h[t]);
            }
        }
        gen_acc += pi[t] * lh;
    }

    Ok(InfoFlow {
        value,
        generator_form: -gen_acc,
        birth_part,
        death_part,
        kl_by_level,
        excluded_mass,
    })
}

/// Full stationary summary of component `i`.
pub fn component_stats(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    i: usize,
) -> Result<ComponentStats, ObsError> {
    let tau = chain.net.tau[i];
    let pi = &dist.pi;
    let mut mean = 0.0;
    let mut second = 0.0;
    let mut mu = 0.0;
    let mut e_fx = 0.0;
    let mut mu_raw = 0.0;
    let mut e_fx_raw = 0.0;
    for t in 0..chain.n_states {
        let xi = chain.coords_of(t)[i] as f64;
        let p = pi[t];
        mean += p * xi;
        second += p * xi * xi;
        let beff = chain.birth_eff(i, t);
        let braw = chain.birth_raw(i, t);
        mu += p * beff;
        e_fx += p * beff * xi;
        mu_raw += p * braw;
        e_fx_raw += p * braw * xi;
    }
    if mu <= 0.0 {
        return Err(ObsError::Degenerate { component: i + 1 });
    }
    let variance = second - mean * mean;
    let fano = variance / mean;
    let cov = e_fx - mu * mean;
    let cov_raw = e_fx_raw - mu_raw * mean;

    let pi_i = marginal(dist, chain, i);
    let cap = chain.caps[i] as usize;
    let mut m_of_n = vec![0.0; cap + 1];
    {
        let mut flux = vec![0.0; cap + 1];
        for t in 0..chain.n_states {
            let n = chain.coords_of(t)[i] as usize;
            flux[n] += pi[t] * chain.birth_eff(i, t);
        }
        for n in 0..=cap {
            m_of_n[n] = if pi_i[n] > 0.0 { flux[n] / pi_i[n] } else { 0.0 };
        }
    }

    let flux_res = flux_balance_residuals(dist, chain, i);
    let max_flux_residual = flux_res.iter().cloned().fold(0.0, f64::max);
    let info = information_flow(dist, chain, i)?;
    let kl_min = info
        .kl_by_level
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);

    Ok(ComponentStats {
        mean,
        variance,
        fano,
        mu,
        cov,
        m_of_n,
        info_flow: info.value,
        info_flow_generator: info.generator_form,
        info_birth_part: info.birth_part,
        info_death_part: info.death_part,
        kl_min,
        excluded_mass: info.excluded_mass,
        mean_identity_residual: (mean - tau * mu).abs(),
        fano_cov_residual: (fano - 1.0 - cov / mu).abs(),
        max_flux_residual,
        mu_raw,
        cov_raw,
        mean_identity_residual_raw: (mean - tau * mu_raw).abs(),
        fano_cov_residual_raw: if mu_raw > 0.0 {
            (fano - 1.0 - cov_raw / mu_raw).abs()
        } else {
            f64::NAN
        },
    })
}

/// Assemble the full report and apply the verdict tolerances.
pub fn tradeoff_report(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
) -> Result<TradeoffReport, ObsError> {
    let n = chain.n();
    let components: Vec<ComponentStats> = (0..n)
        .map(|i| component_stats(dist, chain, i))
        .collect::<Result<_, _>>()?;
    let weighted_sum: f64 = components
        .iter()
        .zip(&chain.net.tau)
        .map(|(c, &tau)| (c.fano - 1.0) / tau)
        .sum();
    let total_info_flow: f64 = components.iter().map(|c| c.info_flow).sum();
    let slacks: Vec<f64> = components
        .iter()
        .zip(&chain.net.tau)
        .map(|(c, &tau)| (c.fano - 1.0) / tau - c.info_flow)
        .collect();
    let tol_inequality = TOL_INEQUALITY_BASE.max(10.0 * dist.boundary_mass);

    let mut failed = Vec::new();
    for (i, c) in components.iter().enumerate() {
        if c.mean_identity_residual > TOL_MEAN_IDENTITY {
            failed.push(format!(
                "mean_identity[{}] residual {:.3e}",
                i + 1,
                c.mean_identity_residual
            ));
        }
        if c.fano_cov_residual > TOL_FANO_COV {
            failed.push(format!(
                "fano_cov_identity[{}] residual {:.3e}",
                i + 1,
                c.fano_cov_residual
            ));
        }
        if c.max_flux_residual > TOL_FLUX {
            failed.push(format!(
                "flux_balance[{}] residual {:.3e}",
                i + 1,
                c.max_flux_residual
            ));
        }
        if (c.info_flow - c.info_flow_generator).abs() > TOL_INFO_CONSISTENCY {
            failed.push(format!(
                "info_flow_consistency[{}] gap {:.3e}",
                i + 1,
                (c.info_flow - c.info_flow_generator).abs()
            ));
        }
    }
    if total_info_flow.abs() > TOL_INFO_CANCELLATION {
        failed.push(format!("info_flow_cancellation sum {:.3e}", total_info_flow));
    }
    let identity_pass = failed.is_empty();

    let mut ineq_failed = Vec::new();
    for (i, &s) in slacks.iter().enumerate() {
        if s < -tol_inequality {
            ineq_failed.push(format!("component_inequality[{}] slack {:.3e}", i + 1, s));
        }
    }
    if weighted_sum < -tol_inequality {
        ineq_failed.push(format!("global_tradeoff weighted_sum {:.3e}", weighted_sum));
    }
    let inequality_pass = ineq_failed.is_empty();
    failed.extend(ineq_failed);

    let kl_pass = components.iter().all(|c| c.kl_min >= -TOL_KL_NONNEG);
    if !kl_pass {
        failed.push("kl_nonnegativity".into());
    }

    let pass = identity_pass && inequality_pass && kl_pass;
    Ok(TradeoffReport {
        name: chain.net.name.clone(),
        components,
        weighted_sum,
        total_info_flow,
        slacks,
        boundary_mass: dist.boundary_mass,
        tol_inequality,
        verdicts: Verdicts {
            identity_pass,
            inequality_pass,
            kl_pass,
            pass,
            failed_clauses: failed,
        },
        solver_residual: dist.residual,
        n_states: chain.n_states,
        caps: chain.caps.clone(),
    })
}

/// Association diagnostic: minimum covariance over pairs of signed-upper-set
/// indicators `u_a(x) = 1{x >=_sigma a}` on a threshold grid.
#[derive(Debug, Clone, Serialize)]
pub struct AssociationReport {
    pub min_cov: f64,
    pub n_thresholds: usize,
    /// Threshold pair attaining the minimum.
    pub argmin: (Vec<u32>, Vec<u32>),
}

/// Check association of the solved law with respect to the signed order.
///
/// `thresholds[i]` lists the threshold levels for coordinate `i`; the grid
/// is their cartesian product. For an associated law the result is >= 0 up
/// to rounding; a clearly negative minimum witnesses failure.
pub fn association_check(
    dist: &StationaryDistribution,
    chain: &TruncatedChain,
    sigma: &[i8],
    thresholds: &[Vec<u32>],
) -> AssociationReport {
    let n = chain.n();
    assert_eq!(sigma.len(), n);
    assert_eq!(thresholds.len(), n);
    let mut levels: Vec<Vec<u32>> = thresholds.to_vec();
    for l in levels.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    // enumerate grid points
    let mut grid: Vec<Vec<u32>> = vec![vec![]];
    for l in &levels {
        let mut next = Vec::with_capacity(grid.len() * l.len());
        for g in &grid {
            for &v in l {
                let mut h = g.clone();
                h.push(v);
                next.push(h);
            }
        }
        grid = next;
    }
    // upper-set probabilities
    let probs: Vec<f64> = grid
        .iter()
        .map(|a| {
            let mut p = 0.0;
            for t in 0..chain.n_states {
                let c = chain.coords_of(t);
                let inside = (0..n).all(|k| {
                    if sigma[k] >= 0 {
                        c[k] as u32 >= a[k]
                    } else {
                        c[k] as u32 <= a[k]
                    }
                });
                if inside {
                    p += dist.pi[t];
                }
            }
            p
        })
        .collect();
    // index lookup for the sigma-join of two grid points
    let mut strides = vec![0usize; n];
    let mut size = 1usize;
    for k in (0..n).rev() {
        strides[k] = size;
        size *= levels[k].len();
    }
    let pos_of = |a: &[u32]| -> usize {
        (0..n)
            .map(|k| levels[k].iter().position(|&v| v == a[k]).unwrap() * strides[k])
            .sum()
    };
    let mut min_cov = f64::INFINITY;
    let mut argmin = (grid[0].clone(), grid[0].clone());
    for (ia, a) in grid.iter().enumerate() {
        for (ib, b) in grid.iter().enumerate().skip(ia) {
            // u_a u_b = u_c with c the sigma-wise join
            let c: Vec<u32> = (0..n)
                .map(|k| {
                    if sigma[k] >= 0 {
                        a[k].max(b[k])
                    } else {
                        a[k].min(b[k])
                    }
                })
                .collect();
            let cov = probs[pos_of(&c)] - probs[ia] * probs[ib];
            if cov < min_cov {
                min_cov = cov;
                argmin = (a.clone(), b.clone());
            }
        }
    }
    AssociationReport {
        min_cov,
        n_thresholds: grid.len(),
        argmin,
    }
}

/// Default association thresholds: all levels up to `max_level` clipped to
/// the box.
pub fn default_thresholds(chain: &TruncatedChain, max_level: u32) -> Vec<Vec<u32>> {
    chain
        .caps
        .iter()
        .map(|&cap| (0..=max_level.min(cap)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{SolveMethod, TruncatedChain};
    use crate::network::Network;

    fn solved(net: &Network, caps: &[u32]) -> (StationaryDistribution, TruncatedChain) {
        let chain = TruncatedChain::build(net, caps).unwrap();
        let dist = chain.solve(SolveMethod::Direct, 1e-12).unwrap();
        (dist, chain)
    }

    fn poisson() -> Network {
        Network::from_parts("poisson", vec![1.0, 1.0], &["2", "3"]).unwrap()
    }

    fn mutual_repression() -> Network {
        Network::from_parts("mr", vec![1.0, 1.0], &["1+5/(1+x2)", "1+5/(1+x1)"]).unwrap()
    }

    #[test]
    fn poisson_component_stats() {
        let net = poisson();
        let (dist, chain) = solved(&net, &[30, 30]);
        let c0 = component_stats(&dist, &chain, 0).unwrap();
        assert!((c0.mean - 2.0).abs() < 1e-9);
        assert!((c0.fano - 1.0).abs() < 1e-9);
        assert!(c0.cov.abs() < 1e-9);
        assert!(c0.mean_identity_residual <= 1e-9);
        assert!(c0.fano_cov_residual <= 1e-9);
        let c1 = component_stats(&dist, &chain, 1).unwrap();
        assert!((c1.mean - 3.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_flux_matches_recursion() {
        let net = poisson();
        let (dist, chain) = solved(&net, &[30, 30]);
        for i in 0..2 {
            let res = flux_balance_residuals(&dist, &chain, i);
            let worst = res.iter().cloned().fold(0.0, f64::max);
            assert!(worst <= 1e-12, "flux residual {worst}");
        }
    }

    #[test]
    fn poisson_fiber_currents_vanish_by_detailed_balance() {
        let net = poisson();
        let (dist, chain) = solved(&net, &[25, 25]);
        let fc = fiber_currents(&dist, &chain, 0);
        assert!(fc.max_abs_current() <= 1e-12);
    }

    #[test]
    fn repression_has_currents_but_balanced_fibers() {
        let net = mutual_repression();
        let (dist, chain) = solved(&net, &[60, 60]);
        let fc = fiber_currents(&dist, &chain, 0);
        assert!(fc.max_abs_current() > 1e-6, "currents should not vanish");
        let worst = fc
            .fiber_sums()
            .iter()
            .cloned()
            .map(f64::abs)
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "fiber sums {worst}");
    }

    #[test]
    fn poisson_info_flow_vanishes() {
        let net = poisson();
        let (dist, chain) = solved(&net, &[30, 30]);
        for i in 0..2 {
            let info = information_flow(&dist, &chain, i).unwrap();
            assert!(info.value.abs() <= 1e-10, "Idot {}", info.value);
            assert!((info.value - info.generator_form).abs() <= 1e-12);
        }
    }

    #[test]
    fn symmetric_repression_flows_cancel_componentwise() {
        let net = mutual_repression();
        let (dist, chain) = solved(&net, &[60, 60]);
        let a = information_flow(&dist, &chain, 0).unwrap().value;
        let b = information_flow(&dist, &chain, 1).unwrap().value;
        assert!((a - b).abs() <= 1e-9, "symmetry breaks: {a} vs {b}");
        assert!((a + b).abs() <= 1e-9);
        assert!(a.abs() <= 1e-9);
    }

    #[test]
    fn asymmetric_network_flows_cancel_in_sum() {
        let net = Network::from_parts("asym", vec![1.0, 1.0], &["1+5/(1+x2)", "3"]).unwrap();
        let (dist, chain) = solved(&net, &[60, 60]);
        let a = information_flow(&dist, &chain, 0).unwrap();
        let b = information_flow(&dist, &chain, 1).unwrap();
        assert!((a.value + b.value).abs() <= 1e-9);
        assert!(a.value != 0.0);
        assert!((a.value - a.generator_form).abs() <= 1e-9);
        assert!((b.value - b.generator_form).abs() <= 1e-9);
    }

    #[test]
    fn repression_fanos_super_poissonian_and_equal() {
        let net = mutual_repression();
        let (dist, chain) = solved(&net, &[60, 60]);
        let c0 = component_stats(&dist, &chain, 0).unwrap();
        let c1 = component_stats(&dist, &chain, 1).unwrap();
        assert!((c0.fano - c1.fano).abs() <= 1e-9);
        assert!(c0.fano >= 1.0 - 1e-9);
    }

    #[test]
    fn tradeoff_report_passes_on_standard_networks() {
        for (net, caps) in [
            (poisson(), vec![30u32, 30]),
            (mutual_repression(), vec![60, 60]),
        ] {
            let (dist, chain) = solved(&net, &caps);
            let report = tradeoffs_ok(&dist, &chain);
            assert!(report.verdicts.pass, "{}: {:?}", net.name, report.verdicts.failed_clauses);
            assert!(report.weighted_sum >= -report.tol_inequality);
            assert!(report.total_info_flow.abs() <= TOL_INFO_CANCELLATION);
        }
    }

    fn tradeoffs_ok(dist: &StationaryDistribution, chain: &TruncatedChain) -> TradeoffReport {
        tradeoff_report(dist, chain).unwrap()
    }

    #[test]
    fn poisson_association_is_nonnegative_and_tight() {
        let net = poisson();
        let (dist, chain) = solved(&net, &[30, 30]);
        let thresholds = vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]];
        let rep = association_check(&dist, &chain, &[1, 1], &thresholds);
        // independent coordinates: indicator pairs in different coordinates
        // are uncorrelated
        assert!(rep.min_cov >= -1e-12);
        assert!(rep.min_cov <= 1e-12 || rep.min_cov >= 0.0);
    }

    #[test]
    fn repression_is_associated_under_mixed_signature() {
        let net = mutual_repression();
        let (dist, chain) = solved(&net, &[60, 60]);
        let thresholds = default_thresholds(&chain, 8);
        let rep = association_check(&dist, &chain, &[1, -1], &thresholds);
        assert!(rep.min_cov >= -1e-10, "min cov {}", rep.min_cov);
        // the plain coordinatewise order is NOT associated here (negative
        // dependence), so the diagnostic must be able to go negative
        let rep_plus = association_check(&dist, &chain, &[1, 1], &thresholds);
        assert!(rep_plus.min_cov < -1e-4);
    }

    #[test]
    fn invalid_signature_association_is_reported_not_asserted() {
        // the repressilator has no valid signature; the diagnostic may go
        // negative and is reported as-is
        let net = Network::from_parts(
            "repressilator",
            vec![1.0, 1.0, 1.0],
            &[
                "1 + 8*hill_rep(x3, 4, 2)",
                "1 + 8*hill_rep(x1, 4, 2)",
                "1 + 8*hill_rep(x2, 4, 2)",
            ],
        )
        .unwrap();
        let chain = TruncatedChain::build(&net, &[20, 20, 20]).unwrap();
        let dist = chain.solve(SolveMethod::Power, 1e-13).unwrap();
        let rep = association_check(&dist, &chain, &[1, -1, -1], &default_thresholds(&chain, 5));
        assert!(rep.min_cov.is_finite());
    }

    #[test]
    fn permutation_equivariance() {
        let net = Network::from_parts("asym", vec![1.0, 2.0], &["1+5/(1+x2)", "3"]).unwrap();
        let swapped =
            Network::from_parts("asym-swapped", vec![2.0, 1.0], &["3", "1+5/(1+x1)"]).unwrap();
        let (d1, c1) = solved(&net, &[40, 50]);
        let (d2, c2) = solved(&swapped, &[50, 40]);
        let a0 = component_stats(&d1, &c1, 0).unwrap();
        let b1 = component_stats(&d2, &c2, 1).unwrap();
        assert!((a0.mean - b1.mean).abs() <= 1e-10);
        assert!((a0.fano - b1.fano).abs() <= 1e-10);
        assert!((a0.info_flow - b1.info_flow).abs() <= 1e-10);
    }

    #[test]
    fn repressilator_tradeoff_holds_globally() {
        let net = Network::from_parts(
            "repressilator",
            vec![1.0, 1.0, 1.0],
            &[
                "1 + 8*hill_rep(x3, 4, 2)",
                "1 + 8*hill_rep(x1, 4, 2)",
                "1 + 8*hill_rep(x2, 4, 2)",
            ],
        )
        .unwrap();
        let chain = TruncatedChain::build(&net, &[28, 28, 28]).unwrap();
        let dist = chain.solve(SolveMethod::Power, 1e-14).unwrap();
        let report = tradeoff_report(&dist, &chain).unwrap();
        assert!(
            report.verdicts.pass,
            "failed: {:?}",
            report.verdicts.failed_clauses
        );
        assert!(report.weighted_sum >= -report.tol_inequality);
    }
}
