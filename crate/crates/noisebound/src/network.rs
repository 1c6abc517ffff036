//! The unit-birth network: components, degradation timescales, regulated
//! birth rates, lattice states, and per-state transitions.
//!
//! Component `i` is born one unit at a time at rate `f_i(x_{-i})` and dies
//! at rate `x_i / tau_i`. Birth rates may depend on every component except
//! their own.

use crate::rate_expr::{EvalError, ParseError, RateExpr};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A lattice point in Z_{>=0}^N. Value type with structural equality and
/// lexicographic ordering for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub Vec<u32>);

impl State {
    pub fn origin(n: usize) -> Self {
        State(vec![0; n])
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Total copy number s(x).
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn with_birth(&self, i: usize) -> State {
        let mut c = self.0.clone();
        c[i] += 1;
        State(c)
    }

    pub fn with_death(&self, i: usize) -> State {
        debug_assert!(self.0[i] >= 1);
        let mut c = self.0.clone();
        c[i] -= 1;
        State(c)
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransitionKind {
    Birth(usize),
    Death(usize),
}

/// One admissible jump out of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub kind: TransitionKind,
    pub target: State,
    pub rate: f64,
}

/// The unit-birth model: N components with timescales and one rate
/// expression per component. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Network {
    pub name: String,
    pub tau: Vec<f64>,
    pub rates: Vec<RateExpr>,
}

/// On-disk form: `{ "n": N, "tau": [...], "rates": ["expr", ...], "name": ... }`.
/// Variable indices inside rate expressions are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub n: usize,
    pub tau: Vec<f64>,
    pub rates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("network must have at least 2 components, got {0}")]
    TooFewComponents(usize),
    #[error("expected {expected} entries in '{field}', got {got}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("tau[{index}] = {value} must be positive and finite")]
    BadTau { index: usize, value: f64 },
    #[error("rate {index}: {source}")]
    Rate {
        index: usize,
        #[source]
        source: ParseError,
    },
}

/// Structural findings from [`validate_network`]. Findings are data, not
/// errors: an empty list means the network is structurally admissible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Finding {
    NonpositiveTau { component: usize, value: f64 },
    NegativeRate { component: usize, state: Vec<u32>, value: f64 },
    NonFiniteRate { component: usize, state: Vec<u32> },
    ComponentCountMismatch { tau_len: usize, rates_len: usize },
}

impl Network {
    /// Build from parsed parts. `rates[i]` must have `own_index == i`.
    pub fn new(name: impl Into<String>, tau: Vec<f64>, rates: Vec<RateExpr>) -> Self {
        let net = Network {
            name: name.into(),
            tau,
            rates,
        };
        debug_assert!(net
            .rates
            .iter()
            .enumerate()
            .all(|(i, r)| r.own_index() == i && r.n_components() == net.n()));
        net
    }

    /// Parse rate source strings and assemble a validated network.
    pub fn from_parts(
        name: impl Into<String>,
        tau: Vec<f64>,
        rate_srcs: &[&str],
    ) -> Result<Self, NetworkError> {
        let spec = NetworkSpec {
            n: tau.len(),
            tau,
            rates: rate_srcs.iter().map(|s| s.to_string()).collect(),
            name: Some(name.into()),
        };
        Self::from_spec(&spec)
    }

    pub fn from_spec(spec: &NetworkSpec) -> Result<Self, NetworkError> {
        let n = spec.n;
        if n < 2 {
            return Err(NetworkError::TooFewComponents(n));
        }
        if spec.tau.len() != n {
            return Err(NetworkError::LengthMismatch {
                field: "tau",
                expected: n,
                got: spec.tau.len(),
            });
        }
        if spec.rates.len() != n {
            return Err(NetworkError::LengthMismatch {
                field: "rates",
                expected: n,
                got: spec.rates.len(),
            });
        }
        for (i, &t) in spec.tau.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(NetworkError::BadTau { index: i, value: t });
            }
        }
        let rates = spec
            .rates
            .iter()
            .enumerate()
            .map(|(i, src)| {
                RateExpr::parse(src, i, n).map_err(|source| NetworkError::Rate { index: i, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Network {
            name: spec.name.clone().unwrap_or_else(|| "unnamed".into()),
            tau: spec.tau.clone(),
            rates,
        })
    }

    pub fn to_spec(&self) -> NetworkSpec {
        NetworkSpec {
            n: self.n(),
            tau: self.tau.clone(),
            rates: self.rates.iter().map(|r| r.source().to_string()).collect(),
            name: Some(self.name.clone()),
        }
    }

    pub fn n(&self) -> usize {
        self.tau.len()
    }

    /// All transitions out of `x`: exactly N births (zero-rate births are
    /// listed so the layout per state is fixed) plus one death for every
    /// coordinate with `x_i >= 1` at rate exactly `x_i / tau_i`.
    pub fn transitions(&self, x: &State) -> Result<Vec<Transition>, EvalError> {
        let n = self.n();
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            out.push(Transition {
                kind: TransitionKind::Birth(i),
                target: x.with_birth(i),
                rate: self.rates[i].eval(x.coords())?,
            });
        }
        for i in 0..n {
            if x.0[i] >= 1 {
                out.push(Transition {
                    kind: TransitionKind::Death(i),
                    target: x.with_death(i),
                    rate: x.0[i] as f64 / self.tau[i],
                });
            }
        }
        Ok(out)
    }

    /// Total jump rate out of `x`.
    pub fn total_rate(&self, x: &State) -> Result<f64, EvalError> {
        let mut total = 0.0;
        for r in &self.rates {
            total += r.eval(x.coords())?;
        }
        for (i, &t) in self.tau.iter().enumerate() {
            total += x.0[i] as f64 / t;
        }
        Ok(total)
    }
}

/// Structural admissibility report. Negative-rate witnesses are searched by
/// sampling a deterministic grid plus random states.
pub fn validate_network(net: &Network) -> Vec<Finding> {
    use rand::{Rng, SeedableRng};
    let mut findings = Vec::new();
    if net.tau.len() != net.rates.len() {
        findings.push(Finding::ComponentCountMismatch {
            tau_len: net.tau.len(),
            rates_len: net.rates.len(),
        });
    }
    for (i, &t) in net.tau.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() {
            findings.push(Finding::NonpositiveTau {
                component: i + 1,
                value: t,
            });
        }
    }
    let n = net.n();
    let mut states: Vec<Vec<u32>> = Vec::new();
    let grid = [0u32, 1, 2, 3, 5, 10, 30, 100];
    let mut idx = vec![0usize; n];
    loop {
        states.push(idx.iter().map(|&k| grid[k]).collect());
        let mut carry = true;
        for slot in idx.iter_mut() {
            if carry {
                *slot += 1;
                if *slot == grid.len() {
                    *slot = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5a11da7e);
    for _ in 0..2000 {
        states.push((0..n).map(|_| rng.gen_range(0..500)).collect());
    }
    let mut seen = vec![false; n]; // one witness per rate
    for state in &states {
        for (i, rate) in net.rates.iter().enumerate() {
            if seen[i] {
                continue;
            }
            match rate.eval(state) {
                Ok(_) => {}
                Err(EvalError::NegativeRate { value, .. }) => {
                    seen[i] = true;
                    findings.push(Finding::NegativeRate {
                        component: i + 1,
                        state: state.clone(),
                        value,
                    });
                }
                Err(EvalError::NonFinite { .. }) => {
                    seen[i] = true;
                    findings.push(Finding::NonFiniteRate {
                        component: i + 1,
                        state: state.clone(),
                    });
                }
            }
        }
    }
    findings
}
