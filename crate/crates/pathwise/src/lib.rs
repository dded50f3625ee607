//! Online shortest-path routing under end-to-end feedback.
//!
//! A packet is routed over a directed acyclic network round after round;
//! only the total delay of the chosen path is observed, never the
//! individual links. This crate provides the pieces needed to study that
//! problem end to end:
//!
//! - [`graph`]: validated DAG networks, the grid generator, and the
//!   topological-order extremal-path oracle (handles negative weights).
//! - [`linalg`]: the dense kernels behind everything numeric (LU, SVD,
//!   pseudo-inverse, cofactor vectors, Cholesky factors).
//! - [`spanner`]: exploration bases, both barycentric spanners for
//!   identifiable action sets and greedy determinant-search bases for
//!   general networks, with the spanner constant `S`.
//! - [`estimate`]: epoch-structured least squares and the confidence
//!   radii.
//! - [`policy`]: the routing policies (explore-then-commit, top-two
//!   comparison, its horizon-capped variant with a Thompson-sampling
//!   fallback, and TS / optimism / uniform baselines).
//! - [`sim`]: seeded instances, the round loop, and regret traces.
//! - [`oracle`]: brute-force references used by tests and `verify`.
//!
//! The numeric core is generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases below fix `f64`, which is what the CLI
//! uses.
//!
//! ```
//! use std::sync::Arc;
//! use pathwise::graph::Network;
//! use pathwise::sim::{build_policy, make_instance, run, RunConfig};
//! use pathwise::spanner::general_basis;
//! use pathwise::{Basis, PolicyKind};
//!
//! let net = Arc::new(Network::grid(2));
//! let basis: Basis = general_basis(&net);
//! let instance = make_instance(Arc::clone(&net), 1000.0, 0.1, 7).unwrap();
//! let mut policy = build_policy(PolicyKind::Ttc, &instance, &basis, 2_000, 7).unwrap();
//! let trace = run(policy.as_mut(), &instance, &RunConfig::new(2_000), 7).unwrap();
//! assert_eq!(trace.rounds_run, 2_000);
//! assert!(trace.commit_epoch.is_some());
//! ```

pub mod estimate;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod policy;
pub mod scalar;
pub mod sim;
pub mod spanner;

pub use graph::{network_stats, GraphError, Network, NetworkSpec, NetworkStats, PathVector, Sense};
pub use policy::{Policy, PolicyError, PolicyKind, RoundFeedback};
pub use scalar::Scalar;

/// Dense `f64` matrix.
pub type Mat = linalg::Matrix<f64>;
/// `f64` exploration basis.
pub type Basis = spanner::Basis<f64>;
/// `f64` basis coordinates.
pub type Coefficients = spanner::Coefficients<f64>;
/// `f64` design accumulator.
pub type DesignState = estimate::DesignState<f64>;
/// `f64` confidence-radius constants.
pub type ConfidenceParams = estimate::ConfidenceParams<f64>;
/// `f64` problem instance.
pub type Instance = sim::Instance<f64>;
/// `f64` regret trace.
pub type RegretTrace = sim::RegretTrace<f64>;
