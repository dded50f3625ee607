//! Directed-acyclic network representation, the grid-topology generator,
//! and weight-parameterized extremal-path computation. The extremal-path
//! routine is the linear optimization oracle everything else builds on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::RowAccumulator;
use crate::scalar::Scalar;

/// Enumeration ceiling used by [`network_stats`] before it falls back to a
/// greedy basis for the rank; also the default cap of the brute-force
/// oracles.
pub const DEFAULT_ENUM_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("link {link} lies on no source-destination path")]
    DisconnectedLink { link: usize },
    #[error("no path from source to destination")]
    NoPath,
    #[error("path count {count} exceeds cap {cap}")]
    CapExceeded { count: u64, cap: usize },
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Optimization sense of the extremal-path oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// A simple source-to-destination path, stored as the traversal-ordered
/// link indices. The 0/1 coordinate vector over links is derived on demand.
///
/// Ordering is lexicographic over the link-index sequence, which is the
/// deterministic tie-break rule used everywhere in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathVector {
    links: Vec<u32>,
    d: usize,
}

impl PathVector {
    /// Builds a path vector without any network validation. Intended for
    /// synthetic action sets in tests and oracles; prefer
    /// [`Network::path_from_links`] for real paths.
    pub fn from_links_unchecked(d: usize, links: Vec<u32>) -> Self {
        debug_assert!(links.iter().all(|&j| (j as usize) < d));
        PathVector { links, d }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn hop_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[u32] {
        &self.links
    }

    pub fn contains_link(&self, j: u32) -> bool {
        self.links.contains(&j)
    }

    pub fn coords<F: Scalar>(&self) -> Vec<F> {
        let mut v = vec![F::zero(); self.d];
        for &j in &self.links {
            v[j as usize] = F::one();
        }
        v
    }

    /// `<a, w>` over the 0/1 coordinates: the path's total weight.
    pub fn dot<F: Scalar>(&self, weights: &[F]) -> F {
        debug_assert_eq!(weights.len(), self.d);
        self.links.iter().map(|&j| weights[j as usize]).sum()
    }
}

/// Structural statistics of a network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub d: usize,
    pub d0: usize,
    pub path_count: u64,
    pub min_hops: usize,
    pub max_hops: usize,
}

/// Serialized form of a network; link order in the file defines the
/// coordinate order of path vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub nodes: usize,
    pub links: Vec<(u32, u32)>,
    pub source: u32,
    pub destination: u32,
}

/// A validated directed acyclic network with one source and one
/// destination. Every link lies on at least one source-destination path,
/// and link indices (positions in the original list) are stable.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct Network {
    node_count: usize,
    links: Vec<(u32, u32)>,
    source: u32,
    destination: u32,
    topo_order: Vec<u32>,
    out_links: Vec<Vec<u32>>,
}

impl TryFrom<NetworkSpec> for Network {
    type Error = GraphError;
    fn try_from(spec: NetworkSpec) -> Result<Self, GraphError> {
        Network::build(spec.nodes, spec.links, spec.source, spec.destination)
    }
}

impl Network {
    pub fn build(
        node_count: usize,
        links: Vec<(u32, u32)>,
        source: u32,
        destination: u32,
    ) -> Result<Self, GraphError> {
        if links.is_empty() {
            return Err(GraphError::Invalid("edge list is empty".into()));
        }
        if source == destination {
            return Err(GraphError::Invalid("source equals destination".into()));
        }
        for (idx, &(u, v)) in links.iter().enumerate() {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(GraphError::Invalid(format!(
                    "link {idx} references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                return Err(GraphError::CycleDetected);
            }
        }

        let mut out_links: Vec<Vec<u32>> = vec![Vec::new(); node_count];
        let mut in_links: Vec<Vec<u32>> = vec![Vec::new(); node_count];
        for (idx, &(u, v)) in links.iter().enumerate() {
            out_links[u as usize].push(idx as u32);
            in_links[v as usize].push(idx as u32);
        }
        // out-link lists stay sorted by link index so lexicographic
        // traversal order is the input order
        for l in &mut out_links {
            l.sort_unstable();
        }
        for l in &mut in_links {
            l.sort_unstable();
        }

        // Kahn's algorithm
        let mut indeg: Vec<usize> = in_links.iter().map(Vec::len).collect();
        let mut queue: Vec<u32> = (0..node_count as u32)
            .filter(|&v| indeg[v as usize] == 0)
            .collect();
        let mut topo_order = Vec::with_capacity(node_count);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            topo_order.push(u);
            for &e in &out_links[u as usize] {
                let v = links[e as usize].1 as usize;
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v as u32);
                }
            }
        }
        if topo_order.len() != node_count {
            return Err(GraphError::CycleDetected);
        }

        // forward reachability from source, backward from destination
        let reach_fwd = reach(node_count, &out_links, &links, source, true);
        let reach_bwd = reach(node_count, &in_links, &links, destination, false);
        if !reach_fwd[destination as usize] {
            return Err(GraphError::NoPath);
        }
        for (idx, &(u, v)) in links.iter().enumerate() {
            if !(reach_fwd[u as usize] && reach_bwd[v as usize]) {
                return Err(GraphError::DisconnectedLink { link: idx });
            }
        }

        Ok(Network {
            node_count,
            links,
            source,
            destination,
            topo_order,
            out_links,
        })
    }

    /// The p-by-p grid topology: nodes `(i, j)` with links to the right
    /// and beneath, the source feeding every first-column node, and every
    /// last-column node draining into the destination.
    pub fn grid(p: usize) -> Self {
        assert!(p >= 1, "grid side length must be >= 1");
        let node_id = |i: usize, j: usize| -> u32 { (1 + i * p + j) as u32 };
        let source = 0u32;
        let destination = (p * p + 1) as u32;
        let mut links = Vec::with_capacity(2 * p * p);
        for i in 0..p {
            links.push((source, node_id(i, 0)));
        }
        for i in 0..p {
            for j in 0..p {
                if j + 1 < p {
                    links.push((node_id(i, j), node_id(i, j + 1)));
                }
                if i + 1 < p {
                    links.push((node_id(i, j), node_id(i + 1, j)));
                }
            }
        }
        for i in 0..p {
            links.push((node_id(i, p - 1), destination));
        }
        Network::build(p * p + 2, links, source, destination)
            .expect("grid construction is always valid")
    }

    pub fn d(&self) -> usize {
        self.links.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> u32 {
        self.source
    }

    pub fn destination(&self) -> u32 {
        self.destination
    }

    pub fn links(&self) -> &[(u32, u32)] {
        &self.links
    }

    pub fn spec(&self) -> NetworkSpec {
        NetworkSpec {
            nodes: self.node_count,
            links: self.links.clone(),
            source: self.source,
            destination: self.destination,
        }
    }

    /// Source-to-destination path minimizing (or maximizing) the total
    /// link weight, by dynamic programming in topological order. Weights
    /// may be negative; ties break to the lexicographically smallest
    /// link-index sequence so runs are reproducible.
    pub fn extremal_path<F: Scalar>(&self, weights: &[F], sense: Sense) -> (PathVector, F) {
        assert_eq!(weights.len(), self.d(), "weight vector length mismatch");
        assert!(
            weights.iter().all(|w| w.is_finite()),
            "weights must be finite"
        );
        let n = self.node_count;
        let mut value: Vec<Option<F>> = vec![None; n];
        let mut prev: Vec<Option<u32>> = vec![None; n];
        value[self.source as usize] = Some(F::zero());
        for &u in &self.topo_order {
            let Some(base) = value[u as usize] else {
                continue;
            };
            for &e in &self.out_links[u as usize] {
                let v = self.links[e as usize].1 as usize;
                let cand = base + weights[e as usize];
                let take = match value[v] {
                    None => true,
                    Some(cur) => {
                        let better = match sense {
                            Sense::Min => cand < cur,
                            Sense::Max => cand > cur,
                        };
                        if better {
                            true
                        } else if cand == cur {
                            // exact tie: keep the lexicographically
                            // smaller link sequence
                            let cand_seq = self.seq_through(&prev, u, e);
                            cand_seq < self.seq_to(&prev, v as u32)
                        } else {
                            false
                        }
                    }
                };
                if take {
                    value[v] = Some(cand);
                    prev[v] = Some(e);
                }
            }
        }
        let val = value[self.destination as usize].expect("validated network has a path");
        let links = self.seq_to(&prev, self.destination);
        (PathVector { links, d: self.d() }, val)
    }

    fn seq_to(&self, prev: &[Option<u32>], node: u32) -> Vec<u32> {
        let mut seq = Vec::new();
        let mut cur = node;
        while cur != self.source {
            let e = prev[cur as usize].expect("predecessor chain reaches source");
            seq.push(e);
            cur = self.links[e as usize].0;
        }
        seq.reverse();
        seq
    }

    fn seq_through(&self, prev: &[Option<u32>], node: u32, last: u32) -> Vec<u32> {
        let mut seq = self.seq_to(prev, node);
        seq.push(last);
        seq
    }

    /// All source-to-destination paths in lexicographic link order.
    pub fn enumerate_paths(&self, cap: usize) -> Result<Vec<PathVector>, GraphError> {
        assert!(cap > 0);
        let mut out = Vec::new();
        let mut seq: Vec<u32> = Vec::new();
        // stack of (node, index into its out-link list)
        let mut stack: Vec<(u32, usize)> = vec![(self.source, 0)];
        while let Some(&mut (node, ref mut idx)) = stack.last_mut() {
            if node == self.destination {
                if out.len() >= cap {
                    return Err(GraphError::CapExceeded {
                        count: self.path_count(),
                        cap,
                    });
                }
                out.push(PathVector {
                    links: seq.clone(),
                    d: self.d(),
                });
                stack.pop();
                seq.pop();
                continue;
            }
            let outs = &self.out_links[node as usize];
            if *idx >= outs.len() {
                stack.pop();
                seq.pop();
                continue;
            }
            let e = outs[*idx];
            *idx += 1;
            seq.push(e);
            stack.push((self.links[e as usize].1, 0));
        }
        Ok(out)
    }

    /// Number of source-to-destination paths by counting DP (no
    /// enumeration); saturates at `u64::MAX`.
    pub fn path_count(&self) -> u64 {
        let mut count: Vec<u128> = vec![0; self.node_count];
        count[self.source as usize] = 1;
        for &u in &self.topo_order {
            if count[u as usize] == 0 {
                continue;
            }
            for &e in &self.out_links[u as usize] {
                let v = self.links[e as usize].1 as usize;
                count[v] = count[v].saturating_add(count[u as usize]);
            }
        }
        count[self.destination as usize]
            .try_into()
            .unwrap_or(u64::MAX)
    }

    /// Validates that the given link indices form a simple
    /// source-to-destination path and returns it in traversal order.
    pub fn path_from_links(&self, link_set: &[u32]) -> Result<PathVector, GraphError> {
        let mut remaining: Vec<u32> = link_set.to_vec();
        for &j in &remaining {
            if j as usize >= self.d() {
                return Err(GraphError::InvalidPath(format!("link {j} out of range")));
            }
        }
        let mut seq = Vec::with_capacity(remaining.len());
        let mut cur = self.source;
        while cur != self.destination {
            let mut next = None;
            for (pos, &j) in remaining.iter().enumerate() {
                if self.links[j as usize].0 == cur {
                    if next.is_some() {
                        return Err(GraphError::InvalidPath(format!(
                            "node {cur} has two outgoing links in the set"
                        )));
                    }
                    next = Some(pos);
                }
            }
            let Some(pos) = next else {
                return Err(GraphError::InvalidPath(format!(
                    "path stalls at node {cur}"
                )));
            };
            let j = remaining.swap_remove(pos);
            seq.push(j);
            cur = self.links[j as usize].1;
        }
        if !remaining.is_empty() {
            return Err(GraphError::InvalidPath(
                "link set contains links off the walked path".into(),
            ));
        }
        Ok(PathVector {
            links: seq,
            d: self.d(),
        })
    }

    /// Validates a 0/1 coordinate vector as a path.
    pub fn path_from_coords(&self, coords: &[u8]) -> Result<PathVector, GraphError> {
        if coords.len() != self.d() {
            return Err(GraphError::InvalidPath(format!(
                "coordinate vector has length {}, network has {} links",
                coords.len(),
                self.d()
            )));
        }
        let links: Vec<u32> = coords
            .iter()
            .enumerate()
            .filter_map(|(j, &c)| match c {
                0 => None,
                _ => Some(j as u32),
            })
            .collect();
        self.path_from_links(&links)
    }
}

fn reach(
    node_count: usize,
    adj: &[Vec<u32>],
    links: &[(u32, u32)],
    start: u32,
    forward: bool,
) -> Vec<bool> {
    let mut seen = vec![false; node_count];
    seen[start as usize] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &e in &adj[u as usize] {
            let v = if forward {
                links[e as usize].1
            } else {
                links[e as usize].0
            };
            if !seen[v as usize] {
                seen[v as usize] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Structural statistics: link count, path-matrix rank, path count by DP,
/// and hop extremes. The rank comes from the enumerated path set when the
/// network is small enough, otherwise from the greedy basis.
pub fn network_stats(net: &Network) -> NetworkStats {
    let d = net.d();
    let path_count = net.path_count();
    let ones = vec![1.0f64; d];
    let (_, min_v) = net.extremal_path(&ones, Sense::Min);
    let (_, max_v) = net.extremal_path(&ones, Sense::Max);
    let d0 = if path_count <= DEFAULT_ENUM_CAP as u64 {
        let paths = net
            .enumerate_paths(DEFAULT_ENUM_CAP)
            .expect("count within cap");
        let mut acc = RowAccumulator::<f64>::new(d);
        for p in &paths {
            acc.push_row(&p.coords::<f64>());
        }
        acc.rank(1e-8)
    } else {
        crate::spanner::general_basis::<f64>(net).d0()
    };
    let stats = NetworkStats {
        d,
        d0,
        path_count,
        min_hops: min_v as usize,
        max_hops: max_v as usize,
    };
    debug_assert!(stats.d0 as u64 <= (stats.d as u64).min(stats.path_count));
    debug_assert!(stats.min_hops <= stats.max_hops && stats.max_hops <= stats.d);
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn diamond() -> Network {
        // s -> a (0), s -> b (1), a -> t (2), b -> t (3)
        Network::build(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3).unwrap()
    }

    #[test]
    fn build_single_edge() {
        let net = Network::build(2, vec![(0, 1)], 0, 1).unwrap();
        assert_eq!(net.d(), 1);
        let stats = network_stats(&net);
        assert_eq!((stats.d, stats.d0, stats.path_count), (1, 1, 1));
    }

    #[test]
    fn build_diamond() {
        let net = diamond();
        assert_eq!(net.d(), 4);
        assert_eq!(net.path_count(), 2);
    }

    #[test]
    fn build_rejects_two_cycle() {
        let err = Network::build(2, vec![(1, 0), (0, 1)], 0, 1).unwrap_err();
        assert_eq!(err, GraphError::CycleDetected);
    }

    #[test]
    fn build_rejects_disconnected_link() {
        // 0 -> 1 is the only path; 2 -> 1 hangs off the side
        let err = Network::build(3, vec![(0, 1), (2, 1)], 0, 1).unwrap_err();
        assert_eq!(err, GraphError::DisconnectedLink { link: 1 });
    }

    #[test]
    fn build_rejects_unreachable_destination() {
        let err = Network::build(3, vec![(0, 1)], 0, 2).unwrap_err();
        assert_eq!(err, GraphError::NoPath);
    }

    #[test]
    fn grid_table_statistics() {
        for (p, d, d0, paths, min_h, max_h) in [
            (2usize, 8usize, 4usize, 4u64, 3usize, 4usize),
            (4, 32, 16, 56, 5, 8),
            (6, 72, 36, 792, 7, 12),
        ] {
            let stats = network_stats(&Network::grid(p));
            assert_eq!(stats.d, d, "p={p}");
            assert_eq!(stats.d0, d0, "p={p}");
            assert_eq!(stats.path_count, paths, "p={p}");
            assert_eq!(stats.min_hops, min_h, "p={p}");
            assert_eq!(stats.max_hops, max_h, "p={p}");
        }
    }

    #[test]
    fn grid_p1_is_two_links_one_path() {
        let net = Network::grid(1);
        assert_eq!(net.d(), 2);
        let paths = net.enumerate_paths(10).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].hop_count(), 2);
    }

    #[test]
    fn extremal_grid2_hop_values() {
        let net = Network::grid(2);
        let ones = vec![1.0; net.d()];
        assert_eq!(net.extremal_path(&ones, Sense::Min).1, 3.0);
        assert_eq!(net.extremal_path(&ones, Sense::Max).1, 4.0);
    }

    #[test]
    fn extremal_diamond_picks_cheap_pair() {
        let net = diamond();
        let (path, v) = net.extremal_path(&[1.0, 5.0, 1.0, 5.0], Sense::Min);
        assert_eq!(v, 2.0);
        assert_eq!(path.links(), &[0, 2]);
    }

    #[test]
    fn extremal_handles_negative_weights() {
        let net = diamond();
        let (path, v) = net.extremal_path(&[-1.0, 0.5, -2.0, 0.5], Sense::Min);
        assert_eq!(v, -3.0);
        assert_eq!(path.links(), &[0, 2]);
        let (_, v) = net.extremal_path(&[-1.0, 0.5, -2.0, 0.5], Sense::Max);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn extremal_tie_breaks_lexicographically() {
        let net = diamond();
        // both paths cost 2; lexicographically smaller sequence [0, 2] wins
        let (path, _) = net.extremal_path(&[1.0, 1.0, 1.0, 1.0], Sense::Min);
        assert_eq!(path.links(), &[0, 2]);
        let (path, _) = net.extremal_path(&[1.0, 1.0, 1.0, 1.0], Sense::Max);
        assert_eq!(path.links(), &[0, 2]);
    }

    #[test]
    fn enumerate_counts_and_cap() {
        assert_eq!(Network::grid(2).enumerate_paths(100).unwrap().len(), 4);
        assert_eq!(Network::grid(6).enumerate_paths(1000).unwrap().len(), 792);
        let err = Network::grid(8).enumerate_paths(1000).unwrap_err();
        assert_eq!(
            err,
            GraphError::CapExceeded {
                count: 11440,
                cap: 1000
            }
        );
    }

    #[test]
    fn enumeration_is_lexicographic_and_matches_count() {
        for p in [2usize, 3, 4] {
            let net = Network::grid(p);
            let paths = net.enumerate_paths(100_000).unwrap();
            assert_eq!(paths.len() as u64, net.path_count());
            for w in paths.windows(2) {
                assert!(w[0] < w[1], "paths must be in strict lex order");
            }
        }
    }

    #[test]
    fn grid8_stats_from_table() {
        let stats = network_stats(&Network::grid(8));
        assert_eq!(stats.d, 128);
        assert_eq!(stats.d0, 64);
        assert_eq!(stats.path_count, 11440);
        assert_eq!((stats.min_hops, stats.max_hops), (9, 16));
    }

    #[test]
    fn path_from_links_validates() {
        let net = diamond();
        let p = net.path_from_links(&[2, 0]).unwrap();
        assert_eq!(p.links(), &[0, 2]);
        assert!(net.path_from_links(&[0]).is_err());
        assert!(net.path_from_links(&[0, 3]).is_err());
        assert!(net.path_from_links(&[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn path_coords_roundtrip() {
        let net = Network::grid(3);
        for path in net.enumerate_paths(100).unwrap() {
            let coords: Vec<u8> = path
                .coords::<f64>()
                .iter()
                .map(|&x| if x > 0.5 { 1 } else { 0 })
                .collect();
            assert_eq!(net.path_from_coords(&coords).unwrap(), path);
        }
    }

    #[test]
    fn spec_roundtrip() {
        let net = Network::grid(2);
        let spec = net.spec();
        let back = Network::try_from(spec).unwrap();
        assert_eq!(back.links(), net.links());
    }

    #[test]
    fn extremal_in_f32() {
        let net = diamond();
        let (path, v) = net.extremal_path(&[1.0f32, 5.0, 1.0, 5.0], Sense::Min);
        assert_eq!(v, 2.0f32);
        assert_eq!(path.links(), &[0, 2]);
    }
}
