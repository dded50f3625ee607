//! Dense real matrix kernels: LU determinants and solves, one-sided Jacobi
//! SVD with Moore-Penrose pseudo-inverse, cofactor (Laplace) vectors, and
//! Cholesky factors for posterior sampling.
//!
//! Matrices here are small (at most a few hundred rows), dense, and
//! immutable values; every routine is a pure function. Tolerances are fixed
//! constants, not configuration.

use thiserror::Error;

use crate::scalar::Scalar;

/// Relative determinant threshold of [`is_nonsingular`], scaled by the
/// Hadamard bound of the matrix.
pub const DET_EPS: f64 = 1e-9;

/// Default relative singular-value cutoff for [`pinv`].
pub const DEFAULT_PINV_RTOL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular or numerically rank-deficient")]
    SingularMatrix,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols));
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<F>]) -> Self {
        assert!(!cols.is_empty());
        let rows = cols[0].len();
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[F]) {
        assert_eq!(col.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = col[i];
        }
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum::<F>())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == F::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// Maximum absolute entry difference against `other`.
    pub fn max_abs_diff(&self, other: &Matrix<F>) -> F {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(F::zero(), F::max)
    }

    /// Product of column Euclidean norms (Hadamard determinant bound).
    pub fn hadamard_bound(&self) -> F {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self[(i, j)] * self[(i, j)])
                    .sum::<F>()
                    .sqrt()
            })
            .fold(F::one(), |acc, n| acc * n)
    }

    /// Minor with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Matrix<F> {
        assert!(self.rows > 1 && self.cols > 1);
        let mut m = Matrix::zeros(self.rows - 1, self.cols - 1);
        let mut r = 0;
        for ii in 0..self.rows {
            if ii == i {
                continue;
            }
            let mut c = 0;
            for jj in 0..self.cols {
                if jj == j {
                    continue;
                }
                m[(r, c)] = self[(ii, jj)];
                c += 1;
            }
            r += 1;
        }
        m
    }
}

impl<F: Scalar> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting.
pub struct Lu<F> {
    lu: Matrix<F>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

pub fn lu<F: Scalar>(m: &Matrix<F>) -> Lu<F> {
    assert!(m.is_square(), "LU requires a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let mut singular = false;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].abs();
        for i in k + 1..n {
            if a[(i, k)].abs() > best {
                best = a[(i, k)].abs();
                piv = i;
            }
        }
        if best == F::zero() {
            singular = true;
            continue;
        }
        if piv != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            perm.swap(k, piv);
            swaps += 1;
        }
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            a[(i, k)] = f;
            for j in k + 1..n {
                a[(i, j)] = a[(i, j)] - f * a[(k, j)];
            }
        }
    }
    Lu {
        lu: a,
        perm,
        swaps,
        singular,
    }
}

impl<F: Scalar> Lu<F> {
    pub fn det(&self) -> F {
        if self.singular {
            return F::zero();
        }
        let n = self.lu.rows();
        let mut d = if self.swaps % 2 == 0 {
            F::one()
        } else {
            -F::one()
        };
        for i in 0..n {
            d = d * self.lu[(i, i)];
        }
        d
    }

    pub fn solve(&self, b: &[F]) -> Result<Vec<F>, LinalgError> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if self.singular {
            return Err(LinalgError::SingularMatrix);
        }
        // forward substitution on the permuted right-hand side
        let mut y = vec![F::zero(); n];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s = s - self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![F::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            let p = self.lu[(i, i)];
            if p == F::zero() {
                return Err(LinalgError::SingularMatrix);
            }
            x[i] = s / p;
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix<F>, LinalgError> {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![F::zero(); n];
        for j in 0..n {
            e[j] = F::one();
            let col = self.solve(&e)?;
            e[j] = F::zero();
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Determinant via LU with partial pivoting; exactly-singular input gives 0.
pub fn det<F: Scalar>(m: &Matrix<F>) -> F {
    lu(m).det()
}

/// Solves `M x = b` for nonsingular `M`.
pub fn solve<F: Scalar>(m: &Matrix<F>, b: &[F]) -> Result<Vec<F>, LinalgError> {
    lu(m).solve(b)
}

/// Scale-free nonsingularity test: `|det M| > DET_EPS * H(M)` with `H` the
/// Hadamard bound (product of column norms). The 0/1 path matrices this
/// crate works with keep entries O(1), so true zeros land far below the
/// threshold.
pub fn is_nonsingular<F: Scalar>(m: &Matrix<F>) -> bool {
    assert!(m.is_square());
    let h = m.hadamard_bound();
    if h == F::zero() {
        return false;
    }
    det(m).abs() > F::of(DET_EPS) * h
}

/// Column `j` of the cofactor matrix: entry `i` is `(-1)^(i+j) det M(-i,-j)`.
///
/// The Laplace expansion along column `j` makes `<entries, a>` equal to the
/// determinant of `M` with column `j` replaced by `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CofactorVector<F> {
    pub j: usize,
    pub entries: Vec<F>,
}

impl<F: Scalar> CofactorVector<F> {
    pub fn dot(&self, a: &[F]) -> F {
        self.entries.iter().zip(a).map(|(&c, &x)| c * x).sum()
    }
}

/// Cofactor vector through the adjugate identity `adj(M) = det(M) M^{-1}`,
/// one O(d^3) factorization for all entries. Requires a nonsingular input;
/// callers fall back to [`cofactor_vector_minors`] otherwise.
pub fn cofactor_vector<F: Scalar>(
    m: &Matrix<F>,
    j: usize,
) -> Result<CofactorVector<F>, LinalgError> {
    assert!(m.is_square());
    assert!(j < m.cols());
    if !is_nonsingular(m) {
        return Err(LinalgError::SingularMatrix);
    }
    let f = lu(m);
    let d = f.det();
    let inv = f.inverse()?;
    // cofactor(i, j) = det * inv[j][i]
    let entries = (0..m.rows()).map(|i| d * inv[(j, i)]).collect();
    Ok(CofactorVector { j, entries })
}

/// Cofactor vector by d independent minor determinants; O(d^4) but has no
/// nonsingularity requirement.
pub fn cofactor_vector_minors<F: Scalar>(m: &Matrix<F>, j: usize) -> CofactorVector<F> {
    assert!(m.is_square());
    assert!(j < m.cols());
    let n = m.rows();
    if n == 1 {
        return CofactorVector {
            j,
            entries: vec![F::one()],
        };
    }
    let entries = (0..n)
        .map(|i| {
            let sign = if (i + j) % 2 == 0 {
                F::one()
            } else {
                -F::one()
            };
            sign * det(&m.minor(i, j))
        })
        .collect();
    CofactorVector { j, entries }
}

/// Thin singular value decomposition `M = U diag(sigma) V^T` with
/// `sigma` sorted descending.
pub struct Svd<F> {
    pub u: Matrix<F>,
    pub sigma: Vec<F>,
    pub vt: Matrix<F>,
}

/// One-sided Jacobi SVD. Chosen over a Gram-matrix eigendecomposition for
/// its relative accuracy on small singular values, which the pseudo-inverse
/// cutoff depends on.
pub fn svd<F: Scalar>(m: &Matrix<F>) -> Svd<F> {
    if m.rows() < m.cols() {
        let s = svd(&m.transpose());
        return Svd {
            u: s.vt.transpose(),
            sigma: s.sigma,
            vt: s.u.transpose(),
        };
    }
    let rows = m.rows();
    let n = m.cols();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let tol = F::epsilon() * F::of(rows as f64);
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut alpha = F::zero();
                let mut beta = F::zero();
                let mut gamma = F::zero();
                for i in 0..rows {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    alpha = alpha + ap * ap;
                    beta = beta + aq * aq;
                    gamma = gamma + ap * aq;
                }
                if alpha == F::zero() || beta == F::zero() {
                    continue;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (F::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (F::one() + zeta * zeta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = c * ap - s * aq;
                    a[(i, q)] = s * ap + c * aq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<F> = (0..n)
        .map(|j| (0..rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<F>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let mut u = Matrix::zeros(rows, n);
    let mut vt = Matrix::zeros(n, n);
    let mut sigma = vec![F::zero(); n];
    for (slot, &j) in order.iter().enumerate() {
        sigma[slot] = norms[j];
        if norms[j] > F::zero() {
            for i in 0..rows {
                u[(i, slot)] = a[(i, j)] / norms[j];
            }
        }
        for i in 0..n {
            vt[(slot, i)] = v[(i, j)];
        }
    }
    Svd { u, sigma, vt }
}

/// Eigendecomposition of a symmetric matrix by cyclic two-sided Jacobi
/// rotations: returns `(Q, lambda)` with `M = Q diag(lambda) Q^T`.
pub fn sym_eigen<F: Scalar>(m: &Matrix<F>) -> (Matrix<F>, Vec<F>) {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.clone();
    let mut q = Matrix::identity(n);
    let scale = (0..n)
        .map(|i| a[(i, i)].abs())
        .fold(F::zero(), F::max)
        .max(F::one());
    let tol = F::epsilon() * scale;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr.abs() <= tol {
                    continue;
                }
                rotated = true;
                let app = a[(p, p)];
                let arr = a[(r, r)];
                let theta = (arr - app) / (F::of(2.0) * apr);
                let t = if theta == F::zero() {
                    F::one()
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                let tau = s / (F::one() + c);
                a[(p, p)] = app - t * apr;
                a[(r, r)] = arr + t * apr;
                a[(p, r)] = F::zero();
                a[(r, p)] = F::zero();
                for i in 0..n {
                    if i == p || i == r {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let air = a[(i, r)];
                    let new_ip = aip - s * (air + tau * aip);
                    let new_ir = air + s * (aip - tau * air);
                    a[(i, p)] = new_ip;
                    a[(p, i)] = new_ip;
                    a[(i, r)] = new_ir;
                    a[(r, i)] = new_ir;
                }
                for i in 0..n {
                    let qip = q[(i, p)];
                    let qir = q[(i, r)];
                    q[(i, p)] = qip - s * (qir + tau * qip);
                    q[(i, r)] = qir + s * (qip - tau * qir);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let lambda = (0..n).map(|i| a[(i, i)]).collect();
    (q, lambda)
}

fn is_symmetric<F: Scalar>(m: &Matrix<F>) -> bool {
    if !m.is_square() {
        return false;
    }
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            if m[(i, j)] != m[(j, i)] {
                return false;
            }
        }
    }
    true
}

/// Moore-Penrose pseudo-inverse: singular values at least `rel_tol` times
/// the largest are inverted, the rest are zeroed.
///
/// Bitwise-symmetric input (every Gram matrix here) takes the Jacobi
/// eigenvalue route, which is much faster at the Gram sizes the epoch
/// estimators rebuild every epoch; everything else goes through the
/// one-sided Jacobi SVD.
pub fn pinv<F: Scalar>(m: &Matrix<F>, rel_tol: F) -> Matrix<F> {
    if is_symmetric(m) {
        let (q, lambda) = sym_eigen(m);
        let n = m.rows();
        let smax = lambda.iter().map(|l| l.abs()).fold(F::zero(), F::max);
        let mut out = Matrix::zeros(n, n);
        if smax == F::zero() {
            return out;
        }
        let cut = rel_tol * smax;
        for (k, &lk) in lambda.iter().enumerate() {
            if lk.abs() < cut || lk == F::zero() {
                continue;
            }
            let inv = F::one() / lk;
            for i in 0..n {
                let qi = q[(i, k)] * inv;
                if qi == F::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + qi * q[(j, k)];
                }
            }
        }
        return out;
    }
    let s = svd(m);
    let smax = s.sigma.first().copied().unwrap_or(F::zero());
    let mut out = Matrix::zeros(m.cols(), m.rows());
    if smax == F::zero() {
        return out;
    }
    let cut = rel_tol * smax;
    for (k, &sk) in s.sigma.iter().enumerate() {
        if sk < cut || sk == F::zero() {
            continue;
        }
        let inv = F::one() / sk;
        // out += inv * v_k u_k^T
        for i in 0..m.cols() {
            let vi = s.vt[(k, i)] * inv;
            if vi == F::zero() {
                continue;
            }
            for j in 0..m.rows() {
                out[(i, j)] = out[(i, j)] + vi * s.u[(j, k)];
            }
        }
    }
    out
}

/// Count of singular values at least `rel_tol` times the largest.
pub fn numerical_rank<F: Scalar>(m: &Matrix<F>, rel_tol: F) -> usize {
    let s = svd(m);
    let smax = s.sigma.first().copied().unwrap_or(F::zero());
    if smax == F::zero() {
        return 0;
    }
    s.sigma.iter().filter(|&&x| x >= rel_tol * smax).count()
}

/// Streaming QR accumulator: feeds rows one at a time into an upper
/// triangular factor with the same singular values as the stacked matrix.
/// Lets rank computations over large path sets avoid materializing them.
pub struct RowAccumulator<F> {
    r: Matrix<F>,
    dim: usize,
}

impl<F: Scalar> RowAccumulator<F> {
    pub fn new(dim: usize) -> Self {
        RowAccumulator {
            r: Matrix::zeros(dim, dim),
            dim,
        }
    }

    pub fn push_row(&mut self, row: &[F]) {
        assert_eq!(row.len(), self.dim);
        let mut v = row.to_vec();
        for k in 0..self.dim {
            if v[k] == F::zero() {
                continue;
            }
            if self.r[(k, k)] == F::zero() {
                let all_zero = (k..self.dim).all(|j| self.r[(k, j)] == F::zero());
                if all_zero {
                    for j in 0..self.dim {
                        self.r[(k, j)] = v[j];
                    }
                    return;
                }
            }
            // Givens rotation zeroing v[k] against the kth pivot row.
            let rkk = self.r[(k, k)];
            let h = (rkk * rkk + v[k] * v[k]).sqrt();
            let c = rkk / h;
            let s = v[k] / h;
            for j in k..self.dim {
                let rk = self.r[(k, j)];
                let vj = v[j];
                self.r[(k, j)] = c * rk + s * vj;
                v[j] = -s * rk + c * vj;
            }
        }
    }

    pub fn rank(&self, rel_tol: F) -> usize {
        numerical_rank(&self.r, rel_tol)
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<F: Scalar>(m: &Matrix<F>) -> Result<Matrix<F>, LinalgError> {
    assert!(m.is_square());
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= F::zero() {
                    return Err(LinalgError::NotPositiveDefinite);
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Rank-one Cholesky update: replaces `L` by the factor of `L L^T + x x^T`.
pub fn cholesky_update<F: Scalar>(l: &mut Matrix<F>, x: &[F]) {
    let n = l.rows();
    assert_eq!(x.len(), n);
    let mut x = x.to_vec();
    for k in 0..n {
        let lkk = l[(k, k)];
        let r = (lkk * lkk + x[k] * x[k]).sqrt();
        let c = r / lkk;
        let s = x[k] / lkk;
        l[(k, k)] = r;
        for i in k + 1..n {
            l[(i, k)] = (l[(i, k)] + s * x[i]) / c;
            x[i] = c * x[i] - s * l[(i, k)];
        }
    }
}

/// Solves `L y = b` then `L^T x = y` for a lower triangular `L`.
pub fn cholesky_solve<F: Scalar>(l: &Matrix<F>, b: &[F]) -> Vec<F> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    let mut y = vec![F::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s = s - l[(i, j)] * y[j];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![F::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s = s - l[(j, i)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `L^T x = z` alone; used to turn a standard normal draw into a
/// sample with covariance `(L L^T)^{-1}`.
pub fn solve_lt<F: Scalar>(l: &Matrix<F>, z: &[F]) -> Vec<F> {
    let n = l.rows();
    assert_eq!(z.len(), n);
    let mut x = vec![F::zero(); n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for j in i + 1..n {
            s = s - l[(j, i)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}
