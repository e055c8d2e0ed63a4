//! Dense real linear algebra: row-major matrices, thin SVD, symmetric
//! eigendecomposition, and truncated pseudoinverse.
//!
//! Everything here is deterministic: no randomness, no global state, no
//! dependence on iteration order of hash maps. The same inputs produce
//! bit-identical outputs on every call.
//!
//! The SVD is computed as a Householder QR of the tall orientation followed by
//! a one-sided Jacobi diagonalization of the square factor. Jacobi is slower
//! than blocked bidiagonalization but converges to high relative accuracy,
//! which matters because downstream truncation decisions compare singular
//! values against `rel_tol * sigma_max`.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt;
use std::iter::Sum;
use std::ops::{Index, IndexMut};
use thiserror::Error;

/// Scalar bound for all numerics in this crate.
///
/// Satisfied by `f32` and `f64`. Code is written against this trait so the
/// whole pipeline can be instantiated at either precision; the crate-root
/// aliases pin `f64` for production use.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Errors from the linear algebra layer. Shape-carrying so callers can report
/// which operand was malformed without re-deriving it.
#[derive(Debug, Error)]
pub enum NumlinError {
    #[error("dimension mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix for {op} must be nonempty, got {rows}x{cols}")]
    EmptyMatrix {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("symmetric eigensolver given non-symmetric input: ||A - A^T||_F = {gap:e} exceeds 1e-8 * ||A||_F = {allowed:e}")]
    NotSymmetric { gap: f64, allowed: f64 },
    #[error("{algorithm} failed to converge on a {rows}x{cols} matrix after {sweeps} sweeps")]
    ConvergenceFailure {
        algorithm: &'static str,
        rows: usize,
        cols: usize,
        sweeps: usize,
    },
    #[error("rows have inconsistent lengths: row 0 has {expected} entries, row {row} has {got}")]
    RaggedRows {
        row: usize,
        expected: usize,
        got: usize,
    },
}

pub type Result<T> = std::result::Result<T, NumlinError>;

// ====================================================================
// Matrix type
// ====================================================================

/// Dense row-major matrix over a [`Real`] scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> RealMatrix<T> {
    /// Zero matrix of the given shape. Shapes with zero rows or columns are
    /// representable (the error path is at the decomposition entry points).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Build from a closure evaluated at every `(row, col)` pair in row-major
    /// order.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(NumlinError::RaggedRows {
                    row: i,
                    expected: ncols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols: ncols,
            data,
        })
    }

    /// Wrap an existing row-major buffer. `data.len()` must equal
    /// `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "buffer length {} does not match shape {}x{}",
            data.len(),
            rows,
            cols
        );
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` copied into a fresh vector.
    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(NumlinError::DimensionMismatch {
                op: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        // i-k-j order: stream over contiguous rows of rhs and out.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o = *o + aik * r;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if self.cols != x.len() {
            return Err(NumlinError::DimensionMismatch {
                op: "matvec",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: x.len(),
                right_cols: 1,
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// Transposed matrix-vector product `self^T * x` without forming the
    /// transpose.
    pub fn tr_matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if self.rows != x.len() {
            return Err(NumlinError::DimensionMismatch {
                op: "tr_matvec",
                left_rows: self.cols,
                left_cols: self.rows,
                right_rows: x.len(),
                right_cols: 1,
            });
        }
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + xi * a;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, op: &'static str, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(NumlinError::DimensionMismatch {
                op,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|&x| x * x)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|x| x.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

impl<T: Real> Index<(usize, usize)> for RealMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for RealMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// ====================================================================
// Slice helpers
// ====================================================================

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

// ====================================================================
// Truncation policy
// ====================================================================

/// Default relative tolerance for numerical-rank decisions on a
/// `rows x cols` matrix: `1e-12 * max(rows, cols)`.
///
/// A singular value counts toward the rank iff it exceeds
/// `rel_tol * sigma_max`. The constant is calibrated for `f64`; at `f32`
/// pass an explicit tolerance on the order of `1e-5` instead.
pub fn default_rel_tol<T: Real>(rows: usize, cols: usize) -> T {
    let dim = T::from_usize(rows.max(cols)).expect("dimension fits in scalar");
    T::from_f64(1e-12).expect("constant fits in scalar") * dim
}

// ====================================================================
// Singular value decomposition
// ====================================================================

/// Thin SVD `A = U diag(sigma) V^T` with a truncation decision attached.
///
/// For an `m x n` input with `k = min(m, n)`: `u` is `m x k` with orthonormal
/// columns, `sigma` holds `k` nonnegative values sorted descending, `v` is
/// `n x k` with orthonormal columns. `rank` counts the singular values
/// strictly above `rel_tol_used * sigma[0]`; columns past `rank` are still
/// orthonormal (completed where the singular value is numerically zero) so
/// `u`/`v` are always full orthonormal frames.
#[derive(Debug, Clone)]
pub struct SvdResult<T: Real> {
    pub u: RealMatrix<T>,
    pub sigma: Vec<T>,
    pub v: RealMatrix<T>,
    pub rank: usize,
    pub rel_tol_used: T,
}

impl<T: Real> SvdResult<T> {
    /// Largest singular value (0 for the all-zero matrix).
    pub fn sigma_max(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Smallest singular value above the truncation cut, if any.
    pub fn sigma_min_kept(&self) -> Option<T> {
        if self.rank == 0 {
            None
        } else {
            Some(self.sigma[self.rank - 1])
        }
    }
}

/// Thin SVD of `a`.
///
/// `rel_tol` overrides the truncation tolerance; `None` uses
/// [`default_rel_tol`] for the input shape. The tolerance only affects the
/// reported `rank` (and everything downstream that honors it, e.g. [`pinv`]);
/// all `min(m, n)` singular triples are returned.
///
/// # Preconditions
/// - `a` is nonempty and every entry is finite.
///
/// # Determinism
/// - Pure function of the input; no RNG, no global state.
///
/// # Errors
/// - [`NumlinError::EmptyMatrix`] for a 0-row or 0-column input.
/// - [`NumlinError::ConvergenceFailure`] if Jacobi needs more than 60 sweeps
///   (does not happen for finite well-scaled input; the cap exists so bad
///   input fails loudly instead of spinning).
pub fn svd<T: Real>(a: &RealMatrix<T>, rel_tol: Option<T>) -> Result<SvdResult<T>> {
    if a.is_empty() {
        return Err(NumlinError::EmptyMatrix {
            op: "svd",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let rel_tol_used = rel_tol.unwrap_or_else(|| default_rel_tol(a.rows(), a.cols()));

    // Work on the tall orientation so QR compresses the long dimension.
    let transposed = a.rows() < a.cols();
    let tall = if transposed { a.transpose() } else { a.clone() };

    let (q, r) = householder_qr(&tall);
    let (mut u_small, mut sigma, mut v_small) = one_sided_jacobi(r)?;
    sort_svd_desc(&mut u_small, &mut sigma, &mut v_small);
    complete_zero_columns(&mut u_small, &sigma);

    // tall = Q R = Q (U_s S V_s^T), so U_tall = Q U_s and V_tall = V_s.
    let u_tall = q.matmul(&u_small).expect("shapes fixed by construction");

    let (u, v) = if transposed {
        (v_small, u_tall)
    } else {
        (u_tall, v_small)
    };

    let sigma_max = sigma.first().copied().unwrap_or_else(T::zero);
    let cut = rel_tol_used * sigma_max;
    let rank = sigma.iter().take_while(|&&s| s > cut).count();

    Ok(SvdResult {
        u,
        sigma,
        v,
        rank,
        rel_tol_used,
    })
}

/// Largest singular value of `a`, via the full SVD. Exact but dense; for
/// repeated norm estimates on large matrices prefer a power method.
pub fn operator_norm<T: Real>(a: &RealMatrix<T>) -> Result<T> {
    Ok(svd(a, None)?.sigma_max())
}

/// Householder QR of a tall matrix (`rows >= cols`): returns the thin
/// orthonormal factor `Q` (`rows x cols`) and square `R` (`cols x cols`).
fn householder_qr<T: Real>(a: &RealMatrix<T>) -> (RealMatrix<T>, RealMatrix<T>) {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut work = a.clone();
    // Reflector k is stored as a unit vector of length m - k.
    let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(n);

    for k in 0..n {
        let mut v: Vec<T> = (k..m).map(|i| work[(i, k)]).collect();
        let norm = norm2(&v);
        if norm == T::zero() {
            reflectors.push(Vec::new());
            continue;
        }
        // Flip the sign away from cancellation: alpha = -sign(v0) * norm.
        let alpha = if v[0] >= T::zero() { -norm } else { norm };
        v[0] = v[0] - alpha;
        let vnorm = norm2(&v);
        if vnorm == T::zero() {
            reflectors.push(Vec::new());
            continue;
        }
        for x in v.iter_mut() {
            *x = *x / vnorm;
        }
        apply_reflector_left(&mut work, &v, k, k);
        // Column k below the diagonal is zero by construction; pin it exactly.
        work[(k, k)] = alpha;
        for i in (k + 1)..m {
            work[(i, k)] = T::zero();
        }
        reflectors.push(v);
    }

    let mut r = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r[(i, j)] = work[(i, j)];
        }
    }

    // Thin Q: apply reflectors in reverse to the first n identity columns.
    let mut q = RealMatrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = T::one();
    }
    for k in (0..n).rev() {
        if !reflectors[k].is_empty() {
            apply_reflector_left(&mut q, &reflectors[k], k, 0);
        }
    }
    (q, r)
}

/// Apply `I - 2 v v^T` (with `v` unit, living on rows `row0..`) to the block
/// of `m` spanning rows `row0..` and columns `col0..`.
fn apply_reflector_left<T: Real>(m: &mut RealMatrix<T>, v: &[T], row0: usize, col0: usize) {
    let two = T::one() + T::one();
    for j in col0..m.cols() {
        let mut proj = T::zero();
        for (off, &vi) in v.iter().enumerate() {
            proj = proj + vi * m[(row0 + off, j)];
        }
        let scale = two * proj;
        for (off, &vi) in v.iter().enumerate() {
            let idx = (row0 + off, j);
            m[idx] = m[idx] - scale * vi;
        }
    }
}

/// One-sided Jacobi on a square matrix `g`: orthogonalizes the columns of `g`
/// in place by right rotations, accumulating them into `v`, until every
/// column pair is numerically orthogonal. Returns `(u, sigma, v)` with
/// `u`'s columns the normalized columns of the final `g` (zero columns left
/// as zero for the caller to complete), unsorted.
fn one_sided_jacobi<T: Real>(
    mut g: RealMatrix<T>,
) -> Result<(RealMatrix<T>, Vec<T>, RealMatrix<T>)> {
    let n = g.cols();
    let mut v = RealMatrix::identity(n);
    // Rotations re-perturb already-clean pairs at roundoff level, so the
    // stop threshold must sit a dimension factor above machine epsilon or
    // exactly rank-deficient input cycles forever.
    let eps = T::epsilon() * T::from_usize(n.max(2)).expect("dim fits").sqrt();
    let max_sweeps = 60;

    // Column data is accessed constantly; keep G column-major locally.
    let mut gc: Vec<Vec<T>> = (0..n).map(|j| g.col(j)).collect();
    let mut sq: Vec<T> = gc.iter().map(|c| dot(c, c)).collect();

    // Rotations conserve sq[p] + sq[q], so the Frobenius norm is invariant
    // and makes a stable floor: columns at roundoff size are numerically
    // zero and must be frozen, not endlessly rotated against noise.
    let frob_sq: T = sq.iter().copied().fold(T::zero(), |a, b| a + b);
    let floor_sq = frob_sq * T::epsilon() * T::epsilon();

    let mut converged = n < 2;
    for _sweep in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                if sq[p] <= floor_sq || sq[q] <= floor_sq {
                    continue;
                }
                let apq = dot(&gc[p], &gc[q]);
                if apq.abs() <= eps * (sq[p] * sq[q]).sqrt() {
                    continue;
                }
                rotated = true;
                // Jacobi rotation zeroing the (p, q) inner product.
                let tau = (sq[q] - sq[p]) / ((T::one() + T::one()) * apq);
                let t = {
                    let denom = tau.abs() + (T::one() + tau * tau).sqrt();
                    if tau >= T::zero() {
                        T::one() / denom
                    } else {
                        -(T::one() / denom)
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut gc, p, q, c, s);
                rotate_matrix_cols(&mut v, p, q, c, s);
                sq[p] = dot(&gc[p], &gc[p]);
                sq[q] = dot(&gc[q], &gc[q]);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(NumlinError::ConvergenceFailure {
            algorithm: "one-sided Jacobi SVD",
            rows: n,
            cols: n,
            sweeps: max_sweeps,
        });
    }

    let mut sigma = Vec::with_capacity(n);
    let mut u = RealMatrix::zeros(n, n);
    for j in 0..n {
        let s = norm2(&gc[j]);
        sigma.push(s);
        if s > T::zero() {
            for i in 0..n {
                u[(i, j)] = gc[j][i] / s;
            }
        }
    }
    // Write the rotated columns back so `g` is not silently stale if this
    // function grows a second return path.
    for j in 0..n {
        for i in 0..n {
            g[(i, j)] = gc[j][i];
        }
    }
    let _ = g;
    Ok((u, sigma, v))
}

fn rotate_pair<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    debug_assert!(p < q);
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq;
        *xp = c * a - s * b;
        *xq = s * a + c * b;
    }
}

fn rotate_matrix_cols<T: Real>(m: &mut RealMatrix<T>, p: usize, q: usize, c: T, s: T) {
    for i in 0..m.rows() {
        let a = m[(i, p)];
        let b = m[(i, q)];
        m[(i, p)] = c * a - s * b;
        m[(i, q)] = s * a + c * b;
    }
}

/// Sort singular triples by descending singular value (stable for ties).
fn sort_svd_desc<T: Real>(u: &mut RealMatrix<T>, sigma: &mut [T], v: &mut RealMatrix<T>) {
    let n = sigma.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).expect("finite singular values"));
    let permute = |m: &RealMatrix<T>| {
        let mut out = RealMatrix::zeros(m.rows(), m.cols());
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..m.rows() {
                out[(i, newj)] = m[(i, oldj)];
            }
        }
        out
    };
    *u = permute(u);
    *v = permute(v);
    let sorted: Vec<T> = order.iter().map(|&j| sigma[j]).collect();
    sigma.copy_from_slice(&sorted);
}

/// Replace zero columns of `u` (numerically zero singular value) with an
/// orthonormal completion, so `u` always has a full orthonormal column set.
fn complete_zero_columns<T: Real>(u: &mut RealMatrix<T>, sigma: &[T]) {
    let n = u.rows();
    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    // Below this, a column of G was too small to normalize meaningfully.
    let floor = smax * T::epsilon() * T::from_usize(n.max(2)).expect("dim fits");
    for j in 0..sigma.len() {
        if sigma[j] > floor && sigma[j] > T::zero() {
            continue;
        }
        for i in 0..n {
            u[(i, j)] = T::zero();
        }
        // Standard basis vector with the largest component outside the span
        // of the other columns. Those columns are orthonormal (or zero), so
        // the leftover mass of e_t is 1 - sum_jj U[t, jj]^2, computable from
        // row t directly. The best candidate has leftover >= 1/n.
        let mut best_t = 0;
        let mut best_score = T::neg_infinity();
        for t in 0..n {
            let mut inside = T::zero();
            for jj in 0..sigma.len() {
                if jj != j {
                    inside = inside + u[(t, jj)] * u[(t, jj)];
                }
            }
            let score = T::one() - inside;
            if score > best_score {
                best_score = score;
                best_t = t;
            }
        }
        let mut w = vec![T::zero(); n];
        w[best_t] = T::one();
        // Two Gram-Schmidt passes for orthogonality at working precision.
        for _pass in 0..2 {
            for jj in 0..sigma.len() {
                if jj == j {
                    continue;
                }
                let mut proj = T::zero();
                for i in 0..n {
                    proj = proj + u[(i, jj)] * w[i];
                }
                for i in 0..n {
                    w[i] = w[i] - proj * u[(i, jj)];
                }
            }
        }
        let nw = norm2(&w);
        debug_assert!(
            nw > T::from_f64(1e-6).expect("constant fits"),
            "orthonormal completion must succeed for n x n frame"
        );
        for i in 0..n {
            u[(i, j)] = w[i] / nw;
        }
    }
}

// ====================================================================
// Pseudoinverse
// ====================================================================

/// Moore-Penrose pseudoinverse with singular values truncated at
/// `rel_tol * sigma_max` (see [`default_rel_tol`] for the default).
///
/// The all-zero matrix pseudoinverts to the all-zero transpose shape; no
/// entry is ever NaN or infinite for finite input.
pub fn pinv<T: Real>(a: &RealMatrix<T>, rel_tol: Option<T>) -> Result<RealMatrix<T>> {
    let dec = svd(a, rel_tol)?;
    Ok(pinv_from_svd(&dec))
}

/// Pseudoinverse assembled from an existing decomposition, reusing its
/// truncation decision: `A^+ = V_r diag(1/sigma_i) U_r^T` over the kept rank.
pub fn pinv_from_svd<T: Real>(dec: &SvdResult<T>) -> RealMatrix<T> {
    let n = dec.v.rows();
    let m = dec.u.rows();
    let mut out = RealMatrix::zeros(n, m);
    for r in 0..dec.rank {
        let inv = T::one() / dec.sigma[r];
        for i in 0..n {
            let vir = dec.v[(i, r)] * inv;
            if vir == T::zero() {
                continue;
            }
            for j in 0..m {
                out[(i, j)] = out[(i, j)] + vir * dec.u[(j, r)];
            }
        }
    }
    out
}

// ====================================================================
// Symmetric eigendecomposition
// ====================================================================

/// Eigendecomposition of a symmetric matrix: `values` are signed eigenvalues
/// sorted descending, `vectors` holds the matching orthonormal eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct SymEigResult<T: Real> {
    pub values: Vec<T>,
    pub vectors: RealMatrix<T>,
}

/// Cyclic Jacobi eigendecomposition for symmetric input.
///
/// # Preconditions
/// - `a` is square, nonempty, and symmetric up to
///   `||A - A^T||_F <= 1e-8 * ||A||_F` (checked; violations are an error,
///   never silently symmetrized).
///
/// # Determinism
/// - Pure function of the input.
pub fn sym_eig<T: Real>(a: &RealMatrix<T>) -> Result<SymEigResult<T>> {
    if a.is_empty() {
        return Err(NumlinError::EmptyMatrix {
            op: "sym_eig",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != a.cols() {
        return Err(NumlinError::DimensionMismatch {
            op: "sym_eig",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.cols(),
            right_cols: a.rows(),
        });
    }
    let scale = a.frobenius_norm();
    let gap = a.sub(&a.transpose()).expect("same shape").frobenius_norm();
    let allowed = T::from_f64(1e-8).expect("constant fits") * scale;
    if gap > allowed {
        return Err(NumlinError::NotSymmetric {
            gap: gap.to_f64().unwrap_or(f64::NAN),
            allowed: allowed.to_f64().unwrap_or(f64::NAN),
        });
    }

    let n = a.rows();
    // Work on the exactly-symmetrized copy so the iteration preserves
    // symmetry bit-for-bit.
    let mut w = RealMatrix::zeros(n, n);
    let half = T::from_f64(0.5).expect("constant fits");
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] = (a[(i, j)] + a[(j, i)]) * half;
        }
    }
    let mut vecs = RealMatrix::identity(n);
    let thresh = scale * T::epsilon();
    let max_sweeps = 60;

    let mut converged = n < 2 || scale == T::zero();
    for _sweep in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq.abs() <= thresh {
                    continue;
                }
                rotated = true;
                let theta = (w[(q, q)] - w[(p, p)]) / ((T::one() + T::one()) * apq);
                let t = {
                    let denom = theta.abs() + (T::one() + theta * theta).sqrt();
                    if theta >= T::zero() {
                        T::one() / denom
                    } else {
                        -(T::one() / denom)
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                two_sided_rotate(&mut w, p, q, c, s);
                rotate_matrix_cols(&mut vecs, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(NumlinError::ConvergenceFailure {
            algorithm: "cyclic Jacobi eigensolver",
            rows: n,
            cols: n,
            sweeps: max_sweeps,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w[(j, j)]
            .partial_cmp(&w[(i, i)])
            .expect("finite eigenvalues")
    });
    let values: Vec<T> = order.iter().map(|&i| w[(i, i)]).collect();
    let mut vectors = RealMatrix::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, newj)] = vecs[(i, oldj)];
        }
    }
    Ok(SymEigResult { values, vectors })
}

/// Apply the two-sided Jacobi rotation `J^T W J` on index pair `(p, q)`.
fn two_sided_rotate<T: Real>(w: &mut RealMatrix<T>, p: usize, q: usize, c: T, s: T) {
    let n = w.rows();
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = w[(i, p)];
        let aiq = w[(i, q)];
        let nip = c * aip - s * aiq;
        let niq = s * aip + c * aiq;
        w[(i, p)] = nip;
        w[(p, i)] = nip;
        w[(i, q)] = niq;
        w[(q, i)] = niq;
    }
    let app = w[(p, p)];
    let aqq = w[(q, q)];
    let apq = w[(p, q)];
    let two = T::one() + T::one();
    w[(p, p)] = c * c * app - two * s * c * apq + s * s * aqq;
    w[(q, q)] = s * s * app + two * s * c * apq + c * c * aqq;
    w[(p, q)] = T::zero();
    w[(q, p)] = T::zero();
}

// ====================================================================
// Unit tests: edge cases and exact small instances
// ====================================================================
