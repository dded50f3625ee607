//! Exploration-basis construction.
//!
//! Two builders are provided: an S-approximate barycentric spanner for
//! action sets that span the full link space, and a greedy determinant
//! search that extracts a basis of the path set for general networks where
//! the path matrix is rank deficient. Both search through the extremal-path
//! oracle with determinant-derived link weights, so the number of oracle
//! calls stays polynomial no matter how many paths the network has.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, Network, PathVector, Sense};
use crate::linalg::{self, lu, pinv, Matrix};
use crate::scalar::Scalar;

/// Default approximation factor of the barycentric spanner.
pub const DEFAULT_APPROX_FACTOR: f64 = 2.0;

/// Relative floor of the exchange-coordinate test deciding whether a
/// column replacement keeps the working matrix nonsingular. Exchange
/// coordinates are determinant ratios; for the 0/1 action sets handled
/// here, true zeros sit at the rounding level while true nonzeros are
/// orders of magnitude above this floor.
const EXCHANGE_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpannerError {
    #[error(
        "action set does not span the link space (column {column} found no nonzero objective)"
    )]
    NotIdentifiable { column: usize },
    #[error("completion matrix is singular")]
    SingularCompletion,
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Linear optimization oracle over an action set of 0/1 vectors. Networks
/// implement it with the topological-order DP; enumerated sets implement it
/// by scanning, which tests use to cross-check the two.
pub trait ActionOracle<F: Scalar> {
    fn dim(&self) -> usize;
    fn extremal(&self, weights: &[F], sense: Sense) -> (PathVector, F);
}

impl<F: Scalar> ActionOracle<F> for Network {
    fn dim(&self) -> usize {
        self.d()
    }

    fn extremal(&self, weights: &[F], sense: Sense) -> (PathVector, F) {
        self.extremal_path(weights, sense)
    }
}

/// Action maximizing `|<w, a>|`: one oracle call per sign, keeping the
/// larger absolute objective.
fn abs_argmax<F: Scalar, O: ActionOracle<F> + ?Sized>(oracle: &O, w: &[F]) -> (PathVector, F) {
    let (a_hi, v_hi) = oracle.extremal(w, Sense::Max);
    let (a_lo, v_lo) = oracle.extremal(w, Sense::Min);
    if v_hi.abs() >= v_lo.abs() {
        (a_hi, v_hi)
    } else {
        (a_lo, v_lo)
    }
}

/// Acceptance floor for an exchange coordinate searched with weights `w`.
fn exchange_floor<F: Scalar>(w: &[F]) -> F {
    let l1: F = w.iter().map(|x| x.abs()).sum();
    F::of(EXCHANGE_TOL) * (F::one() + l1)
}

/// Serialized basis: paths as 0/1 coordinate rows plus the spanner
/// constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisFile {
    pub paths: Vec<Vec<u8>>,
    pub d0: usize,
    #[serde(rename = "S")]
    pub s: f64,
}

/// An ordered exploration basis: `d0` linearly independent paths, the
/// spanner constant `S`, and (when built in-process) the d-by-d completion
/// matrix whose first `d0` columns are the basis and whose remaining
/// columns are retained identity columns.
#[derive(Debug, Clone)]
pub struct Basis<F> {
    paths: Vec<PathVector>,
    d: usize,
    s: F,
    completion: Option<Matrix<F>>,
    pinv_b: Matrix<F>,
}

impl<F: Scalar> Basis<F> {
    fn assemble(paths: Vec<PathVector>, d: usize, s: F, completion: Option<Matrix<F>>) -> Self {
        let b = basis_matrix(&paths, d);
        let pinv_b = pinv(&b, F::of(linalg::DEFAULT_PINV_RTOL));
        Basis {
            paths,
            d,
            s,
            completion,
            pinv_b,
        }
    }

    pub fn d0(&self) -> usize {
        self.paths.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> F {
        self.s
    }

    pub fn paths(&self) -> &[PathVector] {
        &self.paths
    }

    /// The d-by-d0 matrix whose columns are the basis paths.
    pub fn matrix(&self) -> Matrix<F> {
        basis_matrix(&self.paths, self.d)
    }

    pub fn completion(&self) -> Option<&Matrix<F>> {
        self.completion.as_ref()
    }

    /// Least-squares coordinates of `a` in the basis, with the
    /// reconstruction residual. In-span paths come back with residual at
    /// the rounding level.
    pub fn coefficients(&self, a: &PathVector) -> Coefficients<F> {
        let coords: Vec<F> = a.coords();
        let nu = self.pinv_b.matvec(&coords);
        let b = self.matrix();
        let recon = b.matvec(&nu);
        let residual = recon
            .iter()
            .zip(&coords)
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum::<F>()
            .sqrt();
        Coefficients { nu, residual }
    }

    pub fn to_file(&self) -> BasisFile {
        BasisFile {
            paths: self
                .paths
                .iter()
                .map(|p| {
                    p.coords::<F>()
                        .iter()
                        .map(|&x| if x > F::of(0.5) { 1u8 } else { 0u8 })
                        .collect()
                })
                .collect(),
            d0: self.paths.len(),
            s: self.s.to_f64_lossy(),
        }
    }

    /// Rebuilds a basis from its serialized form, validating every row as
    /// a real path of `net`. The completion matrix is not serialized, so
    /// spanner-constant recomputation is unavailable on loaded bases.
    pub fn from_file(file: &BasisFile, net: &Network) -> Result<Self, SpannerError> {
        if file.paths.is_empty() {
            return Err(SpannerError::InvalidBasis("basis has no paths".into()));
        }
        if file.d0 != file.paths.len() {
            return Err(SpannerError::InvalidBasis(format!(
                "d0 field is {} but {} paths are listed",
                file.d0,
                file.paths.len()
            )));
        }
        let paths = file
            .paths
            .iter()
            .map(|coords| net.path_from_coords(coords))
            .collect::<Result<Vec<_>, _>>()?;
        let b = basis_matrix::<F>(&paths, net.d());
        if linalg::numerical_rank(&b, F::of(1e-8)) != paths.len() {
            return Err(SpannerError::InvalidBasis(
                "listed paths are not linearly independent".into(),
            ));
        }
        Ok(Basis::assemble(paths, net.d(), F::of(file.s), None))
    }
}

/// Basis coordinates of one action.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<F> {
    pub nu: Vec<F>,
    pub residual: F,
}

fn basis_matrix<F: Scalar>(paths: &[PathVector], d: usize) -> Matrix<F> {
    debug_assert!(paths.iter().all(|p| p.dim() == d));
    let cols: Vec<Vec<F>> = paths.iter().map(|p| p.coords()).collect();
    Matrix::from_columns(&cols)
}

/// Build details of the barycentric spanner, for monitoring the swap phase.
pub struct SpannerBuild<F> {
    pub basis: Basis<F>,
    pub swaps: usize,
    pub abs_det_after_init: F,
    pub abs_det_final: F,
}

/// S-approximate barycentric spanner for identifiable action sets.
///
/// Starts from the identity matrix, replaces every column by the action
/// maximizing the absolute column-substituted determinant, then keeps
/// swapping while some action improves a column's determinant by more than
/// a factor of `s`. Each determinant objective is linear in the action;
/// searching with row `j` of the working inverse as link weights makes the
/// objective the determinant ratio directly, so every column search is two
/// extremal-path calls and the swap test `|det ratio| > S` needs no
/// determinant magnitudes at all.
pub fn barycentric_spanner<F: Scalar, O: ActionOracle<F> + ?Sized>(
    oracle: &O,
    s: F,
) -> Result<Basis<F>, SpannerError> {
    barycentric_spanner_detailed(oracle, s).map(|b| b.basis)
}

pub fn barycentric_spanner_detailed<F: Scalar, O: ActionOracle<F> + ?Sized>(
    oracle: &O,
    s: F,
) -> Result<SpannerBuild<F>, SpannerError> {
    assert!(s > F::one(), "spanner approximation factor must exceed 1");
    let d = oracle.dim();
    let mut bmat = Matrix::<F>::identity(d);
    let mut cols: Vec<Option<PathVector>> = vec![None; d];
    // |det| tracked through the exchange identity det' = x_j * det
    let mut abs_det = F::one();

    for j in 0..d {
        let inv = lu(&bmat)
            .inverse()
            .expect("working matrix stays nonsingular");
        let w = inv.row(j);
        let (a, v) = abs_argmax(oracle, w);
        if v.abs() <= exchange_floor(w) {
            return Err(SpannerError::NotIdentifiable { column: j });
        }
        bmat.set_column(j, &a.coords());
        cols[j] = Some(a);
        abs_det = abs_det * v.abs();
    }
    let abs_det_after_init = abs_det;

    let mut swaps = 0;
    let swap_cap = 1000 * d; // termination guard far beyond the analytic bound
    'outer: loop {
        for j in 0..d {
            let inv = lu(&bmat)
                .inverse()
                .expect("working matrix stays nonsingular");
            let w = inv.row(j);
            let (a, v) = abs_argmax(oracle, w);
            if v.abs() > s {
                bmat.set_column(j, &a.coords());
                cols[j] = Some(a);
                abs_det = abs_det * v.abs();
                swaps += 1;
                if swaps >= swap_cap {
                    break 'outer;
                }
                continue 'outer;
            }
        }
        break;
    }

    let paths: Vec<PathVector> = cols.into_iter().map(Option::unwrap).collect();
    Ok(SpannerBuild {
        basis: Basis::assemble(paths, d, s, Some(bmat)),
        swaps,
        abs_det_after_init,
        abs_det_final: abs_det,
    })
}

/// Greedy basis identification for general (possibly rank-deficient)
/// networks.
///
/// Maintains a full-rank d-by-d matrix that starts as the identity;
/// repeatedly replaces a retained identity column with the action whose
/// column-substituted determinant has the largest absolute value, stopping
/// when no replacement can keep the matrix nonsingular. The replaced
/// columns, newest first, form the basis; the spanner constant is then
/// computed from the completion matrix.
pub fn general_basis<F: Scalar>(net: &Network) -> Basis<F> {
    general_basis_for(net)
}

pub fn general_basis_for<F: Scalar, O: ActionOracle<F> + ?Sized>(oracle: &O) -> Basis<F> {
    let d = oracle.dim();
    // columns of C: paths (newest first) then remaining identity columns
    let mut path_cols: Vec<PathVector> = Vec::new();
    let mut ident_cols: Vec<usize> = (0..d).collect();

    let build = |paths: &[PathVector], idents: &[usize]| -> Matrix<F> {
        let mut cols: Vec<Vec<F>> = paths.iter().map(|p| p.coords()).collect();
        for &i in idents {
            let mut e = vec![F::zero(); d];
            e[i] = F::one();
            cols.push(e);
        }
        Matrix::from_columns(&cols)
    };

    let mut flag = true;
    while path_cols.len() < d && flag {
        let u = path_cols.len();
        let c_mat = build(&path_cols, &ident_cols);
        let inv = lu(&c_mat)
            .inverse()
            .expect("working matrix stays nonsingular");
        flag = false;
        for slot in 0..ident_cols.len() {
            let j = u + slot;
            let w = inv.row(j);
            let (a, v) = abs_argmax(oracle, w);
            if v.abs() > exchange_floor(w) {
                path_cols.insert(0, a);
                ident_cols.remove(slot);
                flag = true;
                break;
            }
        }
    }

    let completion = build(&path_cols, &ident_cols);
    let mut basis = Basis::assemble(path_cols, d, F::one(), Some(completion));
    let s = compute_s(&basis, oracle).expect("completion built full-rank");
    basis.s = s;
    basis
}

/// Spanner constant of a basis produced by [`general_basis`]: the largest
/// ratio of a column-substituted completion determinant to the completion
/// determinant, over basis columns and the whole action set. Equals the
/// largest absolute basis coordinate any action needs.
pub fn compute_s<F: Scalar, O: ActionOracle<F> + ?Sized>(
    basis: &Basis<F>,
    oracle: &O,
) -> Result<F, SpannerError> {
    let completion = basis
        .completion()
        .ok_or_else(|| SpannerError::InvalidBasis("basis has no completion matrix".into()))?;
    let inv = lu(completion)
        .inverse()
        .map_err(|_| SpannerError::SingularCompletion)?;
    // row j of the inverse is the cofactor vector scaled by 1/det, so the
    // oracle objective is already the column-substituted determinant ratio
    let mut s = F::zero();
    for j in 0..basis.d0() {
        let (_, v) = abs_argmax(oracle, inv.row(j));
        if v.abs() > s {
            s = v.abs();
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::network_stats;
    use crate::oracle::{brute_s, EnumeratedActions};

    /// d parallel links source -> destination: the action set is exactly
    /// the coordinate vectors.
    fn parallel_links(d: usize) -> Network {
        Network::build(2, vec![(0, 1); d], 0, 1).unwrap()
    }

    #[test]
    fn spanner_on_orthonormal_action_set_is_the_set() {
        let net = parallel_links(5);
        let basis = barycentric_spanner::<f64, _>(&net, 2.0).unwrap();
        assert_eq!(basis.d0(), 5);
        let mut seen: Vec<u32> = basis.paths().iter().map(|p| p.links()[0]).collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
        // coefficients of each action are a unit coordinate vector
        for p in net.enumerate_paths(10).unwrap() {
            let c = basis.coefficients(&p);
            assert!(c.residual < 1e-10);
            let max = c.nu.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            assert!((max - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn spanner_coefficients_bounded_by_s() {
        // full-rank synthetic 0/1 action set that actually needs swaps:
        // staircase vectors e_i + e_{i+1} plus the last coordinate vector
        let d = 6;
        let mut actions = Vec::new();
        for i in 0..d - 1 {
            actions.push(PathVector::from_links_unchecked(
                d,
                vec![i as u32, (i + 1) as u32],
            ));
        }
        actions.push(PathVector::from_links_unchecked(d, vec![(d - 1) as u32]));
        let set = EnumeratedActions::new(d, actions.clone());
        let s = 2.0;
        let build = barycentric_spanner_detailed::<f64, _>(&set, s).unwrap();
        let basis = &build.basis;
        assert_eq!(basis.d0(), d);
        for a in &actions {
            let c = basis.coefficients(a);
            assert!(c.residual < 1e-8);
            for x in &c.nu {
                assert!(
                    x.abs() <= s + 1e-6,
                    "coefficient {} exceeds S={} (+tol)",
                    x,
                    s
                );
            }
        }
    }

    #[test]
    fn spanner_swap_phase_grows_determinant_geometrically() {
        let d = 8;
        let mut actions = Vec::new();
        for i in 0..d {
            // chains e_0 + ... + e_i: highly correlated, provokes swaps
            actions.push(PathVector::from_links_unchecked(
                d,
                (0..=i as u32).collect(),
            ));
        }
        let set = EnumeratedActions::new(d, actions);
        let s = 1.25;
        let build = barycentric_spanner_detailed::<f64, _>(&set, s).unwrap();
        // every swap multiplies |det| by more than S
        let lower = build.abs_det_after_init * s.powi(build.swaps as i32);
        assert!(
            build.abs_det_final >= lower * (1.0 - 1e-9),
            "final |det| {} below geometric floor {}",
            build.abs_det_final,
            lower
        );
        // and the swap count respects the analytic cap d log_S(d H)
        let h = build.basis.completion().unwrap().hadamard_bound();
        let cap = (d as f64) * ((d as f64) * h).ln() / s.ln();
        assert!(
            (build.swaps as f64) <= cap,
            "{} swaps exceeds cap {}",
            build.swaps,
            cap
        );
    }

    #[test]
    fn spanner_rejects_rank_deficient_sets() {
        let err = barycentric_spanner::<f64, _>(&Network::grid(2), 2.0).unwrap_err();
        assert!(matches!(err, SpannerError::NotIdentifiable { .. }));
    }

    #[test]
    fn general_basis_grid_sizes_match_rank() {
        assert_eq!(general_basis::<f64>(&Network::grid(2)).d0(), 4);
        assert_eq!(general_basis::<f64>(&Network::grid(6)).d0(), 36);
    }

    #[test]
    fn general_basis_single_path_network() {
        let net = Network::build(3, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        let basis = general_basis::<f64>(&net);
        assert_eq!(basis.d0(), 1);
        assert_eq!(basis.paths()[0].links(), &[0, 1]);
        assert!((basis.s() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_basis_rank_matches_enumerated_rank() {
        // assorted small networks with <= 1000 paths
        let nets = vec![
            Network::grid(2),
            Network::grid(3),
            Network::grid(4),
            parallel_links(4),
            Network::build(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3).unwrap(),
        ];
        for net in &nets {
            let basis = general_basis::<f64>(net);
            let rank = crate::oracle::path_matrix_rank(net, 1000).unwrap();
            assert_eq!(basis.d0(), rank);
        }
    }

    #[test]
    fn every_grid_path_reconstructs_from_basis() {
        for p in [2usize, 4, 6] {
            let net = Network::grid(p);
            let basis = general_basis::<f64>(&net);
            for path in net.enumerate_paths(1000).unwrap() {
                let c = basis.coefficients(&path);
                assert!(
                    c.residual < 1e-8,
                    "p={} residual {} too large",
                    p,
                    c.residual
                );
            }
        }
    }

    #[test]
    fn compute_s_matches_brute_force_on_small_grids() {
        for p in [2usize, 4] {
            let net = Network::grid(p);
            let basis = general_basis::<f64>(&net);
            let brute = brute_s(&basis, &net, 1000).unwrap();
            assert!(
                (basis.s() - brute).abs() < 1e-8,
                "p={}: S={} brute={}",
                p,
                basis.s(),
                brute
            );
            assert!(basis.s() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn coefficients_of_basis_paths_are_unit_vectors() {
        let net = Network::grid(2);
        let basis = general_basis::<f64>(&net);
        for (i, p) in basis.paths().iter().enumerate() {
            let c = basis.coefficients(p);
            assert!(c.residual < 1e-10);
            for (k, &x) in c.nu.iter().enumerate() {
                let want = if k == i { 1.0 } else { 0.0 };
                assert!((x - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn grid4_coefficients_bounded_by_computed_s() {
        let net = Network::grid(4);
        let basis = general_basis::<f64>(&net);
        for path in net.enumerate_paths(100).unwrap() {
            let c = basis.coefficients(&path);
            for x in &c.nu {
                assert!(x.abs() <= basis.s() + 1e-6);
            }
        }
    }

    #[test]
    fn grid2_completion_is_nonsingular_with_integer_determinant() {
        // exact integer cofactor-expansion determinant as the oracle
        fn int_det(m: &[Vec<i64>]) -> i64 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut acc = 0i64;
            for i in 0..n {
                if m[i][0] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> = m
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| *r != i)
                    .map(|(_, row)| row[1..].to_vec())
                    .collect();
                let sign = if i % 2 == 0 { 1 } else { -1 };
                acc += sign * m[i][0] * int_det(&minor);
            }
            acc
        }
        let net = Network::grid(2);
        let basis = general_basis::<f64>(&net);
        let completion = basis.completion().unwrap();
        assert!(crate::linalg::is_nonsingular(completion));
        let d = completion.rows();
        let int_mat: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| completion[(i, j)].round() as i64).collect())
            .collect();
        let exact = int_det(&int_mat);
        assert_ne!(exact, 0);
        assert!((crate::linalg::det(completion) - exact as f64).abs() < 1e-9);
    }

    #[test]
    fn default_approx_factor_builds_spanners() {
        let net = parallel_links(3);
        let basis = barycentric_spanner::<f64, _>(&net, DEFAULT_APPROX_FACTOR).unwrap();
        assert_eq!(basis.d0(), 3);
        assert_eq!(basis.s(), DEFAULT_APPROX_FACTOR);
    }

    #[test]
    fn basis_file_roundtrip_and_validation() {
        let net = Network::grid(2);
        let basis = general_basis::<f64>(&net);
        let file = basis.to_file();
        let loaded = Basis::<f64>::from_file(&file, &net).unwrap();
        assert_eq!(loaded.d0(), basis.d0());
        assert!((loaded.s() - basis.s()).abs() < 1e-12);
        for p in net.enumerate_paths(10).unwrap() {
            assert!(loaded.coefficients(&p).residual < 1e-8);
        }

        let mut corrupt = file.clone();
        corrupt.paths[0][0] ^= 1;
        assert!(Basis::<f64>::from_file(&corrupt, &net).is_err());

        let mut wrong_d0 = file;
        wrong_d0.d0 = 3;
        assert!(Basis::<f64>::from_file(&wrong_d0, &net).is_err());
    }

    #[test]
    fn general_basis_terminates_within_d_outer_steps() {
        // termination is structural; d0 <= d for a handful of networks
        for p in [2usize, 3, 4] {
            let net = Network::grid(p);
            let basis = general_basis::<f64>(&net);
            assert!(basis.d0() <= net.d());
        }
    }

    #[test]
    fn network_stats_uses_basis_rank_beyond_cap() {
        // force the fallback branch via an artificial wide-but-thin case:
        // the grid(8) count is below the cap, so exercise the branch by
        // checking agreement between both rank routes on grid(4)
        let net = Network::grid(4);
        let via_basis = general_basis::<f64>(&net).d0();
        assert_eq!(network_stats(&net).d0, via_basis);
    }
}
