//! Synthetic data generation: covariance spectra, covariates, covariate
//! noise, targets, and the dimension schedules tying everything to the
//! sample size.
//!
//! The generating model: covariates `x = U diag(sqrt(lambda))` rows with
//! isotropic unit-variance factors `U`, additive covariate noise
//! `xi ~ N(0, sigma_xi^2 I_d)` with `sigma_xi^2 = d^{-zeta}`, and labels
//! `y = z^T beta* + eps` built from the (noisy-covariate) feature vector.
//!
//! # Determinism
//! Every sampler consumes its RNG in a documented fixed order (row-major for
//! matrices, index order for vectors), so a seeded generator reproduces the
//! same data bit-for-bit.

use crate::numlin::{Real, RealMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("polynomial spectrum needs decay gamma > 1 for a summable trace, got {gamma}")]
    GammaTooSmall { gamma: f64 },
    #[error("finite-rank spectrum needs rank >= 1")]
    ZeroRank,
    #[error("dimension {what} must be >= 1")]
    EmptyDimension { what: &'static str },
}

pub type Result<T> = std::result::Result<T, SynthError>;

// ====================================================================
// Spectra
// ====================================================================

/// Shape of the covariance eigenvalue sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumKind {
    /// `lambda_i = i^{-gamma}` for `i = 1..=d`; needs `gamma > 1`.
    Polynomial { gamma: f64 },
    /// `lambda_i = e^{-(i-1)}`, normalized so the top eigenvalue is 1.
    Exponential,
    /// `lambda_i = 1` for `i <= rank`, `0` beyond.
    FiniteRank { rank: usize },
}

impl SpectrumKind {
    /// Stable lowercase identifier used in configs and CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumKind::Polynomial { .. } => "polynomial",
            SpectrumKind::Exponential => "exponential",
            SpectrumKind::FiniteRank { .. } => "finite_rank",
        }
    }
}

/// Covariance eigenvalues `lambda_1 >= ... >= lambda_d` for the given shape.
pub fn make_spectrum<T: Real>(kind: SpectrumKind, d: usize) -> Result<Vec<T>> {
    if d == 0 {
        return Err(SynthError::EmptyDimension { what: "d" });
    }
    match kind {
        SpectrumKind::Polynomial { gamma } => {
            if !(gamma > 1.0) {
                return Err(SynthError::GammaTooSmall { gamma });
            }
            Ok((1..=d)
                .map(|i| {
                    T::from_f64((i as f64).powf(-gamma)).expect("spectrum value fits scalar")
                })
                .collect())
        }
        SpectrumKind::Exponential => Ok((0..d)
            .map(|i| T::from_f64((-(i as f64)).exp()).expect("spectrum value fits scalar"))
            .collect()),
        SpectrumKind::FiniteRank { rank } => {
            if rank == 0 {
                return Err(SynthError::ZeroRank);
            }
            Ok((1..=d)
                .map(|i| if i <= rank { T::one() } else { T::zero() })
                .collect())
        }
    }
}

/// Covariate-noise variance schedule `sigma_xi^2 = d^{-zeta}`.
pub fn noise_variance<T: Real>(d: usize, zeta: f64) -> T {
    T::from_f64((d as f64).powf(-zeta)).expect("noise variance fits scalar")
}

/// Noisy-covariate spectrum `lambda_i + sigma_xi^2` (isotropic noise adds to
/// every eigenvalue).
pub fn noisy_spectrum<T: Real>(spectrum: &[T], sigma_xi_sq: T) -> Vec<T> {
    spectrum.iter().map(|&l| l + sigma_xi_sq).collect()
}

/// `Tr(Sigma)`: the effective dimension of the covariate law.
pub fn trace<T: Real>(spectrum: &[T]) -> T {
    spectrum.iter().copied().fold(T::zero(), |a, b| a + b)
}

// ====================================================================
// Dimension schedules
// ====================================================================

/// `ceil(base^exponent)` with a snap: values within `1e-9` of an integer
/// round to it instead of ceiling away (so `1000^(2/3)` is 100, not 101,
/// despite landing at `99.999...` in floating point). Result is at least 1.
pub fn ceil_pow(base: usize, exponent: f64) -> usize {
    let x = (base as f64).powf(exponent);
    let snapped = if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x.ceil()
    };
    (snapped as usize).max(1)
}

// ====================================================================
// Sampling
// ====================================================================

/// Factor distribution for the isotropic part of the covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovariateDist {
    /// Standard Gaussian factors.
    Gaussian,
    /// Symmetric `+-1` factors (subgaussian, bounded).
    Rademacher,
}

impl CovariateDist {
    pub fn name(&self) -> &'static str {
        match self {
            CovariateDist::Gaussian => "gaussian",
            CovariateDist::Rademacher => "rademacher",
        }
    }
}

/// Sample `n` covariate rows `x_i = sqrt(lambda) .* u_i` with iid unit
/// factors. RNG consumption: row-major, one draw per entry.
pub fn sample_covariates<T, R>(
    spectrum: &[T],
    n: usize,
    dist: CovariateDist,
    rng: &mut R,
) -> RealMatrix<T>
where
    T: Real,
    R: Rng,
    StandardNormal: Distribution<T>,
{
    let sqrt_lambda: Vec<T> = spectrum.iter().map(|&l| l.sqrt()).collect();
    RealMatrix::from_fn(n, spectrum.len(), |_, j| {
        let u: T = match dist {
            CovariateDist::Gaussian => StandardNormal.sample(rng),
            CovariateDist::Rademacher => {
                if rng.gen::<bool>() {
                    T::one()
                } else {
                    -T::one()
                }
            }
        };
        u * sqrt_lambda[j]
    })
}

/// Sample an `n x d` covariate-noise matrix with iid `N(0, sigma_xi_sq)`
/// entries. RNG consumption: row-major.
pub fn sample_covariate_noise<T, R>(
    n: usize,
    d: usize,
    sigma_xi_sq: T,
    rng: &mut R,
) -> RealMatrix<T>
where
    T: Real,
    R: Rng,
    StandardNormal: Distribution<T>,
{
    let sd = sigma_xi_sq.sqrt();
    RealMatrix::from_fn(n, d, |_, _| {
        let g: T = StandardNormal.sample(rng);
        g * sd
    })
}

/// Unit-norm Gaussian direction in `R^s`: the ground-truth coefficient
/// vector. RNG consumption: `s` draws in index order.
pub fn sample_beta_star<T, R>(s: usize, rng: &mut R) -> Result<Vec<T>>
where
    T: Real,
    R: Rng,
    StandardNormal: Distribution<T>,
{
    if s == 0 {
        return Err(SynthError::EmptyDimension { what: "s" });
    }
    let mut beta: Vec<T> = (0..s).map(|_| StandardNormal.sample(rng)).collect();
    let norm = crate::numlin::norm2(&beta);
    // A zero draw has probability zero; guard it anyway so beta* is always
    // exactly unit norm.
    if norm > T::zero() {
        for b in beta.iter_mut() {
            *b = *b / norm;
        }
    } else {
        beta[0] = T::one();
    }
    Ok(beta)
}

/// Label noise vector: `n` iid `N(0, sigma0_sq)` draws in index order.
pub fn sample_label_noise<T, R>(n: usize, sigma0_sq: T, rng: &mut R) -> Vec<T>
where
    T: Real,
    R: Rng,
    StandardNormal: Distribution<T>,
{
    let sd = sigma0_sq.sqrt();
    (0..n)
        .map(|_| {
            let g: T = StandardNormal.sample(rng);
            g * sd
        })
        .collect()
}

/// Labels `y = Z beta* + eps`. Pure combination; the noise is sampled
/// separately so callers control RNG stream order.
pub fn make_labels<T: Real>(z: &RealMatrix<T>, beta_star: &[T], eps: &[T]) -> Vec<T> {
    let clean = z.matvec(beta_star).expect("beta* length matches feature count");
    assert_eq!(clean.len(), eps.len(), "noise length must match sample count");
    clean.iter().zip(eps).map(|(&a, &b)| a + b).collect()
}

// ====================================================================
// Unit tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn polynomial_trace_approaches_pi_squared_over_six() {
        let d = 10_000;
        let spec: Vec<f64> = make_spectrum(SpectrumKind::Polynomial { gamma: 2.0 }, d).unwrap();
        let tr = trace(&spec);
        let limit = std::f64::consts::PI.powi(2) / 6.0;
        // Tail of sum i^-2 beyond d is between 1/(d+1) and 1/d.
        assert!(limit - tr > 0.0 && limit - tr < 1.0 / d as f64 + 1e-12);
    }

    #[test]
    fn polynomial_needs_gamma_above_one() {
        match make_spectrum::<f64>(SpectrumKind::Polynomial { gamma: 1.0 }, 5) {
            Err(SynthError::GammaTooSmall { .. }) => {}
            other => panic!("expected GammaTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn exponential_top_eigenvalue_is_one() {
        let spec: Vec<f64> = make_spectrum(SpectrumKind::Exponential, 4).unwrap();
        assert_eq!(spec[0], 1.0);
        assert!((spec[1] - (-1.0f64).exp()).abs() < 1e-15);
        assert!(spec.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn finite_rank_is_zero_padded_indicator() {
        let spec: Vec<f64> = make_spectrum(SpectrumKind::FiniteRank { rank: 3 }, 5).unwrap();
        assert_eq!(spec, vec![1.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn noisy_spectrum_worked_values() {
        // d = 100, zeta = 1: sigma_xi^2 = 0.01 added everywhere.
        let spec: Vec<f64> =
            make_spectrum(SpectrumKind::Polynomial { gamma: 2.0 }, 100).unwrap();
        let sxs: f64 = noise_variance(100, 1.0);
        assert!((sxs - 0.01).abs() < 1e-15);
        let noisy = noisy_spectrum(&spec, sxs);
        assert!((noisy[0] - 1.01).abs() < 1e-15);
        assert!((noisy[99] - (0.0001 + 0.01)).abs() < 1e-15);
    }

    #[test]
    fn ceil_pow_snaps_near_integers() {
        // 1000^(2/3) = 99.9999... must snap to 100, not ceil to 101.
        assert_eq!(ceil_pow(1000, 2.0 / 3.0), 100);
        assert_eq!(ceil_pow(100, 0.5), 10);
        assert_eq!(ceil_pow(50, 0.5), 8); // ceil(7.07)
        assert_eq!(ceil_pow(7, 0.0), 1);
        assert_eq!(ceil_pow(1, 3.0), 1);
        assert_eq!(ceil_pow(200, 1.2), 578); // ceil(577.08)
    }

    #[test]
    fn covariates_have_prescribed_column_scales() {
        let spec = vec![4.0_f64, 1.0, 0.25];
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 20_000;
        let x = sample_covariates(&spec, n, CovariateDist::Gaussian, &mut rng);
        for j in 0..3 {
            let var: f64 = x.col(j).iter().map(|v| v * v).sum::<f64>() / n as f64;
            let rel = (var - spec[j]).abs() / spec[j];
            assert!(rel < 0.05, "column {j}: sample var {var} vs {}", spec[j]);
        }
    }

    #[test]
    fn rademacher_covariates_take_exact_levels() {
        let spec = vec![4.0_f64, 0.25];
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let x = sample_covariates(&spec, 100, CovariateDist::Rademacher, &mut rng);
        for i in 0..100 {
            assert!(x[(i, 0)].abs() == 2.0 && x[(i, 1)].abs() == 0.5);
        }
        // Both signs occur.
        assert!((0..100).any(|i| x[(i, 0)] > 0.0) && (0..100).any(|i| x[(i, 0)] < 0.0));
    }

    #[test]
    fn empirical_covariance_tightens_with_n() {
        // ||X^T X / n - Sigma||_F should shrink roughly like n^{-1/2}:
        // quadrupling n must cut the gap clearly below 3/4.
        let spec = vec![1.0_f64, 0.25, 1.0 / 9.0, 0.0625];
        let gap = |n: usize, seed: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let x = sample_covariates(&spec, n, CovariateDist::Gaussian, &mut rng);
            let gram = x.transpose().matmul(&x).unwrap().scale(1.0 / n as f64);
            let mut sigma = crate::numlin::RealMatrix::zeros(4, 4);
            for j in 0..4 {
                sigma[(j, j)] = spec[j];
            }
            gram.sub(&sigma).unwrap().frobenius_norm()
        };
        // Average a few seeds so the test checks the trend, not one draw.
        let g1: f64 = (0..5).map(|s| gap(400, s)).sum::<f64>() / 5.0;
        let g2: f64 = (0..5).map(|s| gap(6400, 100 + s)).sum::<f64>() / 5.0;
        assert!(
            g2 < 0.6 * g1,
            "covariance gap did not tighten: {g1} -> {g2}"
        );
    }

    #[test]
    fn beta_star_is_unit_norm() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let b: Vec<f64> = sample_beta_star(37, &mut rng).unwrap();
        assert!((crate::numlin::norm2(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn samplers_are_reproducible() {
        let spec = vec![1.0_f64, 0.5];
        let draw = || {
            let mut rng = ChaCha12Rng::seed_from_u64(99);
            let x = sample_covariates(&spec, 5, CovariateDist::Gaussian, &mut rng);
            let xi = sample_covariate_noise(5, 2, 0.01, &mut rng);
            let eps = sample_label_noise(5, 1.0, &mut rng);
            (x, xi, eps)
        };
        let (x1, xi1, e1) = draw();
        let (x2, xi2, e2) = draw();
        assert_eq!(x1.data(), x2.data());
        assert_eq!(xi1.data(), xi2.data());
        assert_eq!(e1, e2);
    }

    #[test]
    fn labels_without_noise_are_exact_feature_combinations() {
        let z = RealMatrix::from_rows(&[vec![1.0_f64, 2.0], vec![0.5, -1.0]]).unwrap();
        let y = make_labels(&z, &[2.0, 1.0], &[0.0, 0.0]);
        assert_eq!(y, vec![4.0, 0.0]);
    }
}
