//! Noise floors for unit-birth regulatory networks.
//!
//! A unit-birth network is a continuous-time Markov chain on `Z_{>=0}^N`
//! where component `i` is produced one copy at a time at a regulated rate
//! `f_i(x_{-i})` (no direct self-feedback) and degraded linearly at rate
//! `x_i / tau_i`. Writing `F_i` for the stationary Fano factor of component
//! `i` (variance over mean, 1 for a Poisson baseline), such networks obey
//!
//! ```text
//! sum_i (F_i - 1) / tau_i  >=  sum_i Idot_i  =  0,
//! ```
//!
//! where `Idot_i` is the information flow through the birth edges of
//! component `i`. No network can push every component below the Poisson
//! noise floor, and under a signed-monotonicity condition (satisfied by
//! structurally balanced interaction graphs) each component individually
//! satisfies `F_i >= 1`.
//!
//! This crate makes those statements checkable on concrete networks:
//!
//! - [`rate_expr`]: parse and statically analyze birth-rate expressions;
//! - [`network`]: the model itself (states, transitions, JSON spec files);
//! - [`hypotheses`]: certify the sufficient conditions (uniform rate floor,
//!   at-most-linear growth, drift gap) and report the Lyapunov drift;
//! - [`exact`]: finite-box truncation and stationary solvers;
//! - [`observables`]: Fano factors, fiber currents, information flows, and
//!   the tradeoff report with identity/inequality verdicts;
//! - [`sim`]: Gillespie paths, batch-means stationary estimates, and the
//!   order-preserving split coupling;
//! - [`signed_graph`]: signed interaction graphs, structural balance, and
//!   signature extraction;
//! - [`gallery`]: bundled networks and seeded random network generators;
//! - [`cli`]: the `noisebound` command-line pipeline.
//!
//! See the crate examples for one runnable program per capability.

pub mod banded;
pub mod cli;
pub mod exact;
pub mod gallery;
pub mod hypotheses;
pub mod network;
pub mod observables;
pub mod rate_expr;
pub mod signed_graph;
pub mod sim;

pub use network::{Network, NetworkSpec, State};
pub use rate_expr::RateExpr;
