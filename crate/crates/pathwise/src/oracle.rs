//! Brute-force reference implementations. These are the ground truth the
//! fast paths are checked against, in tests and in the `verify`
//! subcommand; they enumerate, so they only run below the path cap.

use thiserror::Error;

use crate::graph::{GraphError, Network, PathVector, Sense, DEFAULT_ENUM_CAP};
use crate::linalg::RowAccumulator;
use crate::scalar::Scalar;
use crate::spanner::{ActionOracle, Basis};

/// Default enumeration cap of the oracles.
pub const ORACLE_CAP: usize = DEFAULT_ENUM_CAP;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("network has no second path")]
    NoSecondPath,
}

/// Exhaustive shortest path: minimum of `<a, w>` over all enumerated
/// paths, ties to the lexicographically smallest link sequence.
pub fn brute_shortest<F: Scalar>(
    net: &Network,
    weights: &[F],
    cap: usize,
) -> Result<(PathVector, F), OracleError> {
    let ranked = ranked_paths(net, weights, cap)?;
    Ok(ranked
        .into_iter()
        .next()
        .expect("validated network has a path"))
}

/// Exhaustive second shortest: the best path other than the shortest,
/// under the same deterministic tie handling.
pub fn brute_second_shortest<F: Scalar>(
    net: &Network,
    weights: &[F],
    cap: usize,
) -> Result<(PathVector, F), OracleError> {
    let ranked = ranked_paths(net, weights, cap)?;
    ranked.into_iter().nth(1).ok_or(OracleError::NoSecondPath)
}

fn ranked_paths<F: Scalar>(
    net: &Network,
    weights: &[F],
    cap: usize,
) -> Result<Vec<(PathVector, F)>, OracleError> {
    let mut scored: Vec<(PathVector, F)> = net
        .enumerate_paths(cap)?
        .into_iter()
        .map(|p| {
            let v = p.dot(weights);
            (p, v)
        })
        .collect();
    scored.sort_by(|(pa, va), (pb, vb)| {
        va.partial_cmp(vb)
            .expect("finite weights")
            .then_with(|| pa.cmp(pb))
    });
    Ok(scored)
}

/// Spanner constant by definition: the largest absolute basis coordinate
/// over every enumerated path.
pub fn brute_s<F: Scalar>(basis: &Basis<F>, net: &Network, cap: usize) -> Result<F, OracleError> {
    let mut s = F::zero();
    for path in net.enumerate_paths(cap)? {
        let c = basis.coefficients(&path);
        for x in &c.nu {
            if x.abs() > s {
                s = x.abs();
            }
        }
    }
    Ok(s)
}

/// Numerical rank of the stacked path matrix (singular values at least
/// 1e-8 of the largest).
pub fn path_matrix_rank(net: &Network, cap: usize) -> Result<usize, OracleError> {
    let mut acc = RowAccumulator::<f64>::new(net.d());
    for path in net.enumerate_paths(cap)? {
        acc.push_row(&path.coords::<f64>());
    }
    Ok(acc.rank(1e-8))
}

/// An explicit action set with scan-based extremal search; mirrors the
/// network oracle's tie-break so the two are interchangeable in tests.
#[derive(Debug, Clone)]
pub struct EnumeratedActions {
    d: usize,
    actions: Vec<PathVector>,
}

impl EnumeratedActions {
    pub fn new(d: usize, actions: Vec<PathVector>) -> Self {
        assert!(!actions.is_empty());
        assert!(actions.iter().all(|a| a.dim() == d));
        EnumeratedActions { d, actions }
    }

    pub fn from_network(net: &Network, cap: usize) -> Result<Self, OracleError> {
        Ok(EnumeratedActions {
            d: net.d(),
            actions: net.enumerate_paths(cap)?,
        })
    }

    pub fn actions(&self) -> &[PathVector] {
        &self.actions
    }
}

impl<F: Scalar> ActionOracle<F> for EnumeratedActions {
    fn dim(&self) -> usize {
        self.d
    }

    fn extremal(&self, weights: &[F], sense: Sense) -> (PathVector, F) {
        let mut best: Option<(&PathVector, F)> = None;
        for a in &self.actions {
            let v = a.dot(weights);
            let take = match &best {
                None => true,
                Some((bp, bv)) => {
                    let better = match sense {
                        Sense::Min => v < *bv,
                        Sense::Max => v > *bv,
                    };
                    better || (v == *bv && a < *bp)
                }
            };
            if take {
                best = Some((a, v));
            }
        }
        let (p, v) = best.expect("action set is nonempty");
        (p.clone(), v)
    }
}
