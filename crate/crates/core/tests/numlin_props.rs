//! Property tests and independent oracles for the linear algebra layer.
//!
//! The pseudoinverse is cross-checked two ways that do not share code with
//! the implementation: the four Penrose identities, and the ridge limit
//! `(A^T A + mu I)^{-1} A^T -> A^+` computed with a local Gaussian
//! elimination written in this file.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use relulab_core::numlin::{pinv, svd};
use relulab_core::Mat;

// ====================================================================
// Strategies
// ====================================================================

prop_compose! {
    /// Dense matrix with entries in [-10, 10], up to 50 x 80.
    fn dense_matrix()(rows in 1usize..=50, cols in 1usize..=80)
        (entries in prop::collection::vec(-10.0f64..10.0, rows * cols),
         rows in Just(rows), cols in Just(cols))
        -> Mat
    {
        Mat::from_vec(rows, cols, entries)
    }
}

prop_compose! {
    /// Exactly rank-deficient matrix built as a product B (m x r) C (r x n)
    /// with r strictly below min(m, n).
    fn rank_deficient_matrix()(m in 2usize..=40, n in 2usize..=40)
        (r in 1usize..=(m.min(n) - 1).max(1),
         b in prop::collection::vec(-3.0f64..3.0, m * m),
         c in prop::collection::vec(-3.0f64..3.0, m * n),
         m in Just(m), n in Just(n))
        -> Mat
    {
        let bm = Mat::from_vec(m, m, b);
        let cm = Mat::from_vec(m, n, c);
        // Keep only r inner columns/rows of the factors.
        let bt = Mat::from_fn(m, r, |i, j| bm[(i, j)]);
        let ct = Mat::from_fn(r, n, |i, j| cm[(i, j)]);
        bt.matmul(&ct).unwrap()
    }
}

// ====================================================================
// Penrose identities
// ====================================================================

fn check_penrose(a: &Mat) {
    let p = pinv(a, None).unwrap();
    let a_norm = a.frobenius_norm().max(1.0);
    let p_norm = p.frobenius_norm().max(1.0);

    let apa = a.matmul(&p).unwrap().matmul(a).unwrap();
    prop_assert_close(apa.sub(a).unwrap().max_abs(), 1e-10 * a_norm, "A A+ A = A");

    let pap = p.matmul(a).unwrap().matmul(&p).unwrap();
    prop_assert_close(pap.sub(&p).unwrap().max_abs(), 1e-10 * p_norm, "A+ A A+ = A+");

    let ap = a.matmul(&p).unwrap();
    prop_assert_close(
        ap.sub(&ap.transpose()).unwrap().max_abs(),
        1e-10 * a_norm * p_norm,
        "A A+ symmetric",
    );

    let pa = p.matmul(a).unwrap();
    prop_assert_close(
        pa.sub(&pa.transpose()).unwrap().max_abs(),
        1e-10 * a_norm * p_norm,
        "A+ A symmetric",
    );
}

fn prop_assert_close(err: f64, tol: f64, what: &str) {
    assert!(err <= tol, "{what}: error {err:e} exceeds {tol:e}");
}

proptest! {
    #[test]
    fn penrose_on_dense(a in dense_matrix()) {
        check_penrose(&a);
    }

    #[test]
    fn penrose_on_rank_deficient(a in rank_deficient_matrix()) {
        check_penrose(&a);
    }

    #[test]
    fn pinv_commutes_with_transpose(a in dense_matrix()) {
        let left = pinv(&a.transpose(), None).unwrap();
        let right = pinv(&a, None).unwrap().transpose();
        let scale = left.frobenius_norm().max(1.0);
        prop_assert!(left.sub(&right).unwrap().max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn svd_is_deterministic(a in dense_matrix()) {
        let d1 = svd(&a, None).unwrap();
        let d2 = svd(&a, None).unwrap();
        prop_assert_eq!(d1.sigma.clone(), d2.sigma.clone());
        prop_assert_eq!(d1.u.data(), d2.u.data());
        prop_assert_eq!(d1.v.data(), d2.v.data());
        prop_assert_eq!(d1.rank, d2.rank);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues(a in dense_matrix()) {
        // sigma_i^2 are the eigenvalues of A^T A; check the top one against
        // the independent symmetric eigensolver.
        let dec = svd(&a, None).unwrap();
        let gram = a.transpose().matmul(&a).unwrap();
        let eig = relulab_core::numlin::sym_eig(&gram).unwrap();
        let top_sv2 = dec.sigma[0] * dec.sigma[0];
        let scale = top_sv2.max(1.0);
        prop_assert!((eig.values[0] - top_sv2).abs() <= 1e-9 * scale,
            "top eigenvalue {} vs sigma_max^2 {}", eig.values[0], top_sv2);
    }
}

// ====================================================================
// Ridge-limit oracle
// ====================================================================

/// Solve `M x = b` for symmetric positive definite `M` by Gaussian
/// elimination with partial pivoting. Test-local on purpose: it shares no
/// code with the SVD-based pseudoinverse it cross-checks.
fn solve_gauss(m: &Mat, b: &[f64]) -> Vec<f64> {
    let n = m.rows();
    assert_eq!(m.cols(), n);
    assert_eq!(b.len(), n);
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = m.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        aug.swap(col, piv);
        let d = aug[col][col];
        assert!(d.abs() > 0.0, "ridge system is positive definite");
        for i in (col + 1)..n {
            let f = aug[i][col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..=n {
                aug[i][j] -= f * aug[col][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = aug[i][n];
        for j in (i + 1)..n {
            acc -= aug[i][j] * x[j];
        }
        x[i] = acc / aug[i][i];
    }
    x
}

/// `(A^T A + mu I)^{-1} A^T`, column by column.
fn ridge_inverse(a: &Mat, mu: f64) -> Mat {
    let n = a.cols();
    let mut gram = a.transpose().matmul(a).unwrap();
    for i in 0..n {
        gram[(i, i)] += mu;
    }
    let mut out = Mat::zeros(n, a.rows());
    for j in 0..a.rows() {
        // Column j of A^T is row j of A.
        let rhs: Vec<f64> = a.row(j).to_vec();
        let x = solve_gauss(&gram, &rhs);
        for i in 0..n {
            out[(i, j)] = x[i];
        }
    }
    out
}

fn seeded_gaussian(rows: usize, cols: usize, seed: u64) -> Mat {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

#[test]
fn ridge_limit_converges_to_pinv() {
    for (rows, cols, seed) in [(20usize, 8usize, 7u64), (9, 14, 11), (12, 12, 13)] {
        let a = seeded_gaussian(rows, cols, seed);
        let p = pinv(&a, None).unwrap();
        let smax = svd(&a, None).unwrap().sigma_max();
        let err_at = |mu: f64| {
            ridge_inverse(&a, mu)
                .sub(&p)
                .unwrap()
                .frobenius_norm()
        };
        let coarse = err_at(1e-4 * smax * smax);
        let fine = err_at(1e-10 * smax * smax);
        assert!(
            fine < coarse,
            "{rows}x{cols}: ridge error must shrink with mu ({coarse:e} -> {fine:e})"
        );
        assert!(
            fine <= 1e-6 * p.frobenius_norm(),
            "{rows}x{cols}: ridge limit off by {fine:e}"
        );
    }
}

// ====================================================================
// Power-iteration oracle for the top singular value
// ====================================================================

#[test]
fn power_iteration_matches_sigma_max() {
    let a = seeded_gaussian(40, 25, 99);
    let dec = svd(&a, None).unwrap();
    // Power iteration on A^T A with a fixed deterministic start.
    let mut x: Vec<f64> = (0..25).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let nx = relulab_core::numlin::norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lam = 0.0;
    for _ in 0..500 {
        let ax = a.matvec(&x).unwrap();
        let atax = a.tr_matvec(&ax).unwrap();
        lam = relulab_core::numlin::norm2(&atax);
        x = atax.iter().map(|v| v / lam).collect();
    }
    let sigma_est = lam.sqrt();
    assert!(
        (sigma_est - dec.sigma[0]).abs() <= 1e-8 * dec.sigma[0],
        "power iteration {sigma_est} vs svd {}",
        dec.sigma[0]
    );
}
