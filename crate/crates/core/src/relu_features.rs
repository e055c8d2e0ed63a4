//! The random two-layer feature map: a frozen Gaussian first layer followed
//! by an entrywise ReLU.
//!
//! Weights are `s x d` with iid `N(0, 1/s)` entries, sampled once and then
//! treated as fixed; only the second layer is ever trained. Features for an
//! input `x` are `z = max(0, W x)` coordinatewise.

use crate::numlin::{Real, RealMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Frozen first layer of the feature map.
#[derive(Debug, Clone)]
pub struct FeatureMap<T: Real> {
    weights: RealMatrix<T>,
}

impl<T: Real> FeatureMap<T> {
    /// Sample a fresh `s x d` layer with `N(0, 1/s)` entries, row-major RNG
    /// consumption order.
    pub fn sample<R>(s: usize, d: usize, rng: &mut R) -> Self
    where
        R: Rng,
        StandardNormal: Distribution<T>,
    {
        assert!(s >= 1 && d >= 1, "feature map needs s >= 1 and d >= 1");
        let sd = (T::one() / T::from_usize(s).expect("s fits scalar")).sqrt();
        let weights = RealMatrix::from_fn(s, d, |_, _| {
            let g: T = StandardNormal.sample(rng);
            g * sd
        });
        Self { weights }
    }

    /// Wrap explicit weights (tests and cross-checks).
    pub fn from_weights(weights: RealMatrix<T>) -> Self {
        assert!(!weights.is_empty(), "feature map needs nonempty weights");
        Self { weights }
    }

    /// Feature count `s`.
    pub fn s(&self) -> usize {
        self.weights.rows()
    }

    /// Input dimension `d`.
    pub fn d(&self) -> usize {
        self.weights.cols()
    }

    pub fn weights(&self) -> &RealMatrix<T> {
        &self.weights
    }

    /// Feature vector `z = max(0, W x)` for a single input.
    pub fn featurize(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.d(), "input dimension mismatch");
        (0..self.s())
            .map(|j| relu(crate::numlin::dot(self.weights.row(j), x)))
            .collect()
    }

    /// Feature matrix for a batch: row `i` of the result is
    /// `featurize(row i of x)`. Shape `n x s`.
    pub fn feature_matrix(&self, x: &RealMatrix<T>) -> RealMatrix<T> {
        assert_eq!(x.cols(), self.d(), "input dimension mismatch");
        let mut z = x
            .matmul(&self.weights.transpose())
            .expect("dimensions checked above");
        for v in z.data_mut() {
            *v = relu(*v);
        }
        z
    }

    /// Strict activation pattern: entry `(i, j)` is true iff the
    /// preactivation `w_j . x_i` is strictly positive. An exact zero counts
    /// as inactive, matching the convention that the feature value 0 carries
    /// no gradient from the positive branch.
    pub fn activation_mask(&self, x: &RealMatrix<T>) -> Vec<Vec<bool>> {
        assert_eq!(x.cols(), self.d(), "input dimension mismatch");
        let pre = x
            .matmul(&self.weights.transpose())
            .expect("dimensions checked above");
        (0..pre.rows())
            .map(|i| pre.row(i).iter().map(|&v| v > T::zero()).collect())
            .collect()
    }
}

#[inline]
pub fn relu<T: Real>(t: T) -> T {
    if t > T::zero() {
        t
    } else {
        T::zero()
    }
}

// ====================================================================
// Unit tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn map2x2() -> FeatureMap<f64> {
        FeatureMap::from_weights(
            RealMatrix::from_rows(&[vec![1.0, -1.0], vec![0.5, 0.5]]).unwrap(),
        )
    }

    #[test]
    fn featurize_clips_negative_preactivations() {
        let m = map2x2();
        let z = m.featurize(&[1.0, 2.0]);
        assert_eq!(z, vec![0.0, 1.5]); // preactivations -1 and 1.5
    }

    #[test]
    fn feature_matrix_rows_match_featurize() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let m: FeatureMap<f64> = FeatureMap::sample(7, 3, &mut rng);
        let x = RealMatrix::from_fn(4, 3, |i, j| (i as f64) - 1.3 * (j as f64));
        let z = m.feature_matrix(&x);
        for i in 0..4 {
            let zi = m.featurize(x.row(i));
            assert_eq!(z.row(i), zi.as_slice(), "row {i}");
        }
    }

    #[test]
    fn mask_is_strict_at_zero() {
        let m = map2x2();
        // Preactivations: row gives (x0 - x1, 0.5 x0 + 0.5 x1).
        let x = RealMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap(); // (0, 1)
        let mask = m.activation_mask(&x);
        assert_eq!(mask, vec![vec![false, true]], "exact zero is inactive");
    }

    #[test]
    fn weight_variance_is_one_over_s() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let s = 400;
        let m: FeatureMap<f64> = FeatureMap::sample(s, 50, &mut rng);
        let var: f64 = m
            .weights()
            .data()
            .iter()
            .map(|w| w * w)
            .sum::<f64>()
            / (s * 50) as f64;
        let rel = (var - 1.0 / s as f64).abs() * s as f64;
        assert!(rel < 0.05, "weight variance off: {var} vs {}", 1.0 / s as f64);
    }

    #[test]
    fn positive_homogeneity_exact_for_powers_of_two() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let m: FeatureMap<f64> = FeatureMap::sample(13, 5, &mut rng);
        let x: Vec<f64> = (0..5).map(|i| (i as f64) - 2.2).collect();
        for c in [0.25_f64, 0.5, 2.0, 8.0] {
            let xl: Vec<f64> = x.iter().map(|v| v * c).collect();
            let left = m.featurize(&xl);
            let right: Vec<f64> = m.featurize(&x).iter().map(|v| v * c).collect();
            assert_eq!(left, right, "scaling by {c} must commute exactly");
        }
    }

    #[test]
    fn positive_homogeneity_approximate_in_general() {
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        let m: FeatureMap<f64> = FeatureMap::sample(13, 5, &mut rng);
        let x: Vec<f64> = (0..5).map(|i| 0.3 * (i as f64) - 0.7).collect();
        let c = 3.7_f64;
        let xl: Vec<f64> = x.iter().map(|v| v * c).collect();
        let left = m.featurize(&xl);
        let right: Vec<f64> = m.featurize(&x).iter().map(|v| v * c).collect();
        for (l, r) in left.iter().zip(&right) {
            assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn feature_moments_match_gaussian_law() {
        // z_j = relu(w_j . x) with w_j . x ~ N(0, ||x||^2 / s): over many
        // features the mean approaches sigma/sqrt(2 pi).
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let s = 20_000;
        let m: FeatureMap<f64> = FeatureMap::sample(s, 4, &mut rng);
        let x = [1.0_f64, -1.0, 0.5, 0.25];
        let xn = crate::numlin::norm2(&x);
        let sigma = xn / (s as f64).sqrt();
        let z = m.featurize(&x);
        let mean = z.iter().sum::<f64>() / s as f64;
        let law = sigma / (2.0 * std::f64::consts::PI).sqrt();
        assert!(
            (mean - law).abs() / law < 0.03,
            "feature mean {mean} vs law {law}"
        );
    }
}
