//! Minimum-norm least-squares fit of the second layer.
//!
//! Among all coefficient vectors minimizing `||Z beta - y||`, the fit
//! returned here is the one of smallest Euclidean norm:
//! `beta = V_r S_r^{-1} U_r^T y` from one thin SVD of `Z`, truncated at the
//! numerical rank. When `rank(Z) = n` (more features than samples) the fit
//! interpolates: the residual is zero up to roundoff.

use crate::numlin::{self, Real, RealMatrix, SvdResult};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InterpolatorError {
    #[error("label vector has {labels} entries but the feature matrix has {rows} rows")]
    LabelMismatch { labels: usize, rows: usize },
    #[error(transparent)]
    Numeric(#[from] numlin::NumlinError),
}

pub type Result<T> = std::result::Result<T, InterpolatorError>;

/// A fitted minimum-norm interpolator, carrying the decomposition it was
/// built from so downstream risk evaluation can reuse it.
#[derive(Debug, Clone)]
pub struct MnlsEstimate<T: Real> {
    /// Fitted second-layer coefficients, length `s`.
    pub beta: Vec<T>,
    /// Training residual `||Z beta - y||` (recomputed directly, not assumed).
    pub residual_norm: T,
    /// Thin SVD of the training feature matrix.
    pub svd: SvdResult<T>,
}

impl<T: Real> MnlsEstimate<T> {
    /// Numerical rank used by the fit.
    pub fn rank(&self) -> usize {
        self.svd.rank
    }
}

/// Fit the minimum-norm least-squares solution through a single SVD of `z`.
///
/// `rel_tol` overrides the rank-truncation tolerance (see
/// [`numlin::default_rel_tol`]). The all-zero feature matrix fits
/// `beta = 0` with residual `||y||` and rank 0; no NaN ever escapes.
pub fn mnls_fit<T: Real>(
    z: &RealMatrix<T>,
    y: &[T],
    rel_tol: Option<T>,
) -> Result<MnlsEstimate<T>> {
    if y.len() != z.rows() {
        return Err(InterpolatorError::LabelMismatch {
            labels: y.len(),
            rows: z.rows(),
        });
    }
    let dec = numlin::svd(z, rel_tol)?;
    let beta = apply_pinv_from(&dec, y);
    let fitted = z.matvec(&beta)?;
    let residual: Vec<T> = fitted.iter().zip(y).map(|(&f, &t)| f - t).collect();
    Ok(MnlsEstimate {
        beta,
        residual_norm: numlin::norm2(&residual),
        svd: dec,
    })
}

/// `V_r S_r^{-1} U_r^T y` without forming the pseudoinverse matrix.
fn apply_pinv_from<T: Real>(dec: &SvdResult<T>, y: &[T]) -> Vec<T> {
    let mut coeff = vec![T::zero(); dec.rank];
    for (r, c) in coeff.iter_mut().enumerate() {
        let mut acc = T::zero();
        for i in 0..dec.u.rows() {
            acc = acc + dec.u[(i, r)] * y[i];
        }
        *c = acc / dec.sigma[r];
    }
    let s = dec.v.rows();
    let mut beta = vec![T::zero(); s];
    for (j, b) in beta.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (r, &c) in coeff.iter().enumerate() {
            acc = acc + dec.v[(j, r)] * c;
        }
        *b = acc;
    }
    beta
}

/// Prediction at one feature vector.
pub fn predict<T: Real>(beta: &[T], z_row: &[T]) -> T {
    numlin::dot(beta, z_row)
}

/// Empirically verify minimality of the fitted norm.
///
/// Draws `probes` random directions, projects each onto the null space of
/// the training features (the orthocomplement of the kept right-singular
/// subspace), and measures `||beta + t eta|| - ||beta||` for step sizes
/// `t = +-max(||beta||, 1)`. For a true minimum-norm solution `beta` is
/// orthogonal to the null space, so every margin is nonnegative up to
/// roundoff. Returns the smallest margin seen; returns exactly 0 without
/// probing when the feature matrix has full column rank (empty null space).
pub fn null_space_probe<T, R>(est: &MnlsEstimate<T>, probes: usize, rng: &mut R) -> T
where
    T: Real,
    R: Rng,
    StandardNormal: Distribution<T>,
{
    let s = est.svd.v.rows();
    if est.svd.rank >= s {
        return T::zero();
    }
    let beta_norm = numlin::norm2(&est.beta);
    let t = if beta_norm > T::one() { beta_norm } else { T::one() };
    let mut min_margin = T::infinity();
    for _ in 0..probes {
        let g: Vec<T> = (0..s).map(|_| StandardNormal.sample(rng)).collect();
        // eta = g - V_r V_r^T g lies in the null space up to truncation.
        let mut eta = g.clone();
        for r in 0..est.svd.rank {
            let mut proj = T::zero();
            for j in 0..s {
                proj = proj + est.svd.v[(j, r)] * g[j];
            }
            for j in 0..s {
                eta[j] = eta[j] - proj * est.svd.v[(j, r)];
            }
        }
        let eta_norm = numlin::norm2(&eta);
        if eta_norm == T::zero() {
            continue;
        }
        for sign in [T::one(), -T::one()] {
            let step = sign * t / eta_norm;
            let shifted: Vec<T> = est
                .beta
                .iter()
                .zip(&eta)
                .map(|(&b, &e)| b + step * e)
                .collect();
            let margin = numlin::norm2(&shifted) - beta_norm;
            if margin < min_margin {
                min_margin = margin;
            }
        }
    }
    if min_margin.is_finite() {
        min_margin
    } else {
        T::zero()
    }
}

// ====================================================================
// Unit tests
// ====================================================================
