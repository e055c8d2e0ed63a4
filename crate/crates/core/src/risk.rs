//! Exact bias/variance decomposition of the excess test risk, plus the
//! matching Monte Carlo estimators.
//!
//! Conditional on everything except the label noise, the fitted predictor is
//! affine in the noise vector: `yhat(z) = z^T V_r S_r^{-1} U_r^T (y0 + eps)`.
//! Averaging the squared test error over the noise therefore splits exactly
//! into a bias term (the noise-free predictor's error) and a variance term
//! (the noise-induced prediction variance), both computable in closed form
//! from one SVD of the training features:
//!
//! - bias `B = mean_i (z_i^T (V_r V_r^T - I) beta*)^2`
//! - variance `V = sigma0^2 * mean_i ||S_r^{-1} V_r^T z_i||^2`
//!
//! The expectation over test inputs is approximated by a fixed test-point
//! average, so for a FIXED test set the identity
//! `E_eps[mc_risk] = bias + variance` is exact, not asymptotic. The Monte
//! Carlo estimators below share that test set, which is what makes the
//! decomposition check a sharp 3-sigma test instead of a loose comparison.

use crate::numlin::{Real, RealMatrix, SvdResult};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("test features have {got} columns but the training SVD is over {expected} features")]
    FeatureMismatch { got: usize, expected: usize },
    #[error("target vector has {got} entries, expected {expected}")]
    TargetMismatch { got: usize, expected: usize },
    #[error("Monte Carlo risk needs at least 2 noise draws, got {draws}")]
    TooFewDraws { draws: usize },
    #[error("jackknife variance stderr needs at least 3 noise draws, got {draws}")]
    TooFewDrawsForJackknife { draws: usize },
}

pub type Result<T> = std::result::Result<T, RiskError>;

/// Full risk accounting for one fitted instance.
#[derive(Debug, Clone, Copy)]
pub struct RiskReport<T: Real> {
    /// Exact bias term.
    pub bias: T,
    /// Exact variance term.
    pub variance: T,
    /// Exact excess risk `bias + variance`.
    pub excess_risk: T,
    /// Monte Carlo estimate of the excess risk over fresh label noise.
    pub mc_risk: T,
    /// Standard error of `mc_risk` across noise draws.
    pub mc_stderr: T,
    /// Monte Carlo variance estimate (per-test-point sample variance of the
    /// prediction, averaged over test points).
    pub variance_mc: T,
    /// Delete-one-draw jackknife standard error of `variance_mc`.
    pub variance_mc_stderr: T,
}

/// The bias projection `Pi = V_r V_r^T - I` applied implicitly through the
/// kept right-singular frame; never materialized as an `s x s` matrix.
#[derive(Debug, Clone)]
pub struct ProjectionOperator<'a, T: Real> {
    svd: &'a SvdResult<T>,
}

impl<'a, T: Real> ProjectionOperator<'a, T> {
    pub fn new(svd: &'a SvdResult<T>) -> Self {
        Self { svd }
    }

    /// `Pi v = V_r (V_r^T v) - v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let s = self.svd.v.rows();
        assert_eq!(v.len(), s, "projection input length mismatch");
        let mut out: Vec<T> = v.iter().map(|&x| -x).collect();
        for r in 0..self.svd.rank {
            let mut proj = T::zero();
            for j in 0..s {
                proj = proj + self.svd.v[(j, r)] * v[j];
            }
            for j in 0..s {
                out[j] = out[j] + proj * self.svd.v[(j, r)];
            }
        }
        out
    }
}

/// Risk evaluator for one fitted instance: shares the training-feature SVD
/// with the interpolator and a fixed clean-covariate test feature matrix.
///
/// # Concurrency
/// Immutable after construction; evaluation methods take `&self` and an
/// external RNG, so shared references are safe across threads.
#[derive(Debug, Clone)]
pub struct RiskEvaluator<T: Real> {
    /// Kept-rank test-feature projections `G = Z_test V_r` (`m x r`).
    g: RealMatrix<T>,
    /// Kept singular values (first `r` of the training SVD).
    sigma: Vec<T>,
    /// `U_r` from the training SVD (`n x r`).
    u: RealMatrix<T>,
    /// Clean test targets `Z_test beta*`.
    y_clean: Vec<T>,
    /// Noise-free predictions `G V_r^T beta*`.
    y0: Vec<T>,
    sigma0_sq: T,
}

impl<T: Real> RiskEvaluator<T> {
    /// Build from the training SVD, a test feature matrix (clean covariates
    /// pushed through the same frozen feature map), the ground-truth
    /// coefficients, and the label-noise variance.
    pub fn new(
        svd: &SvdResult<T>,
        z_test: &RealMatrix<T>,
        beta_star: &[T],
        sigma0_sq: T,
    ) -> Result<Self> {
        let s = svd.v.rows();
        if z_test.cols() != s {
            return Err(RiskError::FeatureMismatch {
                got: z_test.cols(),
                expected: s,
            });
        }
        if beta_star.len() != s {
            return Err(RiskError::TargetMismatch {
                got: beta_star.len(),
                expected: s,
            });
        }
        let r = svd.rank;
        let m = z_test.rows();

        // G[i, k] = z_i . v_k over the kept rank.
        let mut g = RealMatrix::zeros(m, r);
        for i in 0..m {
            let zi = z_test.row(i);
            for k in 0..r {
                let mut acc = T::zero();
                for j in 0..s {
                    acc = acc + zi[j] * svd.v[(j, k)];
                }
                g[(i, k)] = acc;
            }
        }
        // p = V_r^T beta*; y0 = G p.
        let mut p = vec![T::zero(); r];
        for (k, pk) in p.iter_mut().enumerate() {
            let mut acc = T::zero();
            for j in 0..s {
                acc = acc + svd.v[(j, k)] * beta_star[j];
            }
            *pk = acc;
        }
        let y0 = g.matvec(&p).expect("shape by construction");
        let y_clean = z_test.matvec(beta_star).expect("checked above");

        let mut u = RealMatrix::zeros(svd.u.rows(), r);
        for i in 0..svd.u.rows() {
            for k in 0..r {
                u[(i, k)] = svd.u[(i, k)];
            }
        }
        Ok(Self {
            g,
            sigma: svd.sigma[..r].to_vec(),
            u,
            y_clean,
            y0,
            sigma0_sq,
        })
    }

    pub fn test_points(&self) -> usize {
        self.g.rows()
    }

    /// Exact bias: mean squared error of the noise-free predictor.
    pub fn bias_exact(&self) -> T {
        let m = self.g.rows();
        let acc = self
            .y0
            .iter()
            .zip(&self.y_clean)
            .map(|(&a, &b)| {
                let e = a - b;
                e * e
            })
            .fold(T::zero(), |x, y| x + y);
        acc / T::from_usize(m).expect("m fits scalar")
    }

    /// Exact variance: `sigma0^2 * mean_i sum_k (G[i,k] / sigma_k)^2`.
    pub fn variance_exact(&self) -> T {
        let m = self.g.rows();
        let r = self.sigma.len();
        let mut acc = T::zero();
        for i in 0..m {
            let row = self.g.row(i);
            for k in 0..r {
                let v = row[k] / self.sigma[k];
                acc = acc + v * v;
            }
        }
        self.sigma0_sq * acc / T::from_usize(m).expect("m fits scalar")
    }

    /// Monte Carlo estimates over `draws` fresh label-noise vectors.
    ///
    /// RNG consumption: `draws` blocks of `n` standard normal deviates, in
    /// draw-major order.
    pub fn monte_carlo<R>(&self, draws: usize, rng: &mut R) -> Result<McEstimates<T>>
    where
        R: Rng,
        StandardNormal: Distribution<T>,
    {
        if draws < 2 {
            return Err(RiskError::TooFewDraws { draws });
        }
        let m = self.g.rows();
        let n = self.u.rows();
        let r = self.sigma.len();
        let sd = self.sigma0_sq.sqrt();

        // Noise propagation map P = G S^{-1} U^T applied per draw; P itself
        // is m x n and worth materializing once draws are repeated.
        let mut p = RealMatrix::zeros(m, n);
        for i in 0..m {
            for k in 0..r {
                let gik = self.g[(i, k)] / self.sigma[k];
                if gik == T::zero() {
                    continue;
                }
                for j in 0..n {
                    p[(i, j)] = p[(i, j)] + gik * self.u[(j, k)];
                }
            }
        }

        let mf = T::from_usize(m).expect("m fits scalar");
        let mut risks = Vec::with_capacity(draws);
        // a[k][i]: noise-induced prediction shift of test point i on draw k.
        let mut shifts: Vec<Vec<T>> = Vec::with_capacity(draws);
        for _ in 0..draws {
            let eps: Vec<T> = (0..n)
                .map(|_| {
                    let g: T = StandardNormal.sample(rng);
                    g * sd
                })
                .collect();
            let a = p.matvec(&eps).expect("shape by construction");
            let mut acc = T::zero();
            for i in 0..m {
                let e = self.y0[i] + a[i] - self.y_clean[i];
                acc = acc + e * e;
            }
            risks.push(acc / mf);
            shifts.push(a);
        }

        let kf = T::from_usize(draws).expect("draws fit scalar");
        let mc_risk = risks.iter().copied().fold(T::zero(), |a, b| a + b) / kf;
        let var_risks = risks
            .iter()
            .map(|&x| {
                let e = x - mc_risk;
                e * e
            })
            .fold(T::zero(), |a, b| a + b)
            / (kf - T::one());
        let mc_stderr = (var_risks / kf).sqrt();

        let (variance_mc, variance_mc_stderr) = self.variance_mc_from_shifts(&shifts)?;
        Ok(McEstimates {
            mc_risk,
            mc_stderr,
            variance_mc,
            variance_mc_stderr,
        })
    }

    /// Per-test-point sample variance over draws, averaged over test points,
    /// with a delete-one-draw jackknife stderr.
    fn variance_mc_from_shifts(&self, shifts: &[Vec<T>]) -> Result<(T, T)> {
        let k = shifts.len();
        if k < 3 {
            return Err(RiskError::TooFewDrawsForJackknife { draws: k });
        }
        let m = self.g.rows();
        let kf = T::from_usize(k).expect("k fits scalar");
        let mf = T::from_usize(m).expect("m fits scalar");
        let one = T::one();

        let mut means = vec![T::zero(); m];
        for a in shifts {
            for (mi, &ai) in means.iter_mut().zip(a) {
                *mi = *mi + ai;
            }
        }
        for mi in means.iter_mut() {
            *mi = *mi / kf;
        }
        let mut ss = vec![T::zero(); m];
        for a in shifts {
            for ((si, &ai), &mi) in ss.iter_mut().zip(a).zip(&means) {
                let e = ai - mi;
                *si = *si + e * e;
            }
        }
        let variance_mc = ss
            .iter()
            .map(|&s| s / (kf - one))
            .fold(T::zero(), |a, b| a + b)
            / mf;

        // Delete-one-draw recomputation via the sum-of-squares identity
        // SS^{(-k)} = SS - (K/(K-1)) (a_k - mean)^2, divisor K-2.
        let km2 = kf - one - one;
        let factor = kf / (kf - one);
        let mut jack = Vec::with_capacity(k);
        for a in shifts {
            let mut acc = T::zero();
            for i in 0..m {
                let e = a[i] - means[i];
                let ss_del = ss[i] - factor * e * e;
                acc = acc + ss_del / km2;
            }
            jack.push(acc / mf);
        }
        let jack_mean = jack.iter().copied().fold(T::zero(), |a, b| a + b) / kf;
        let jack_ss = jack
            .iter()
            .map(|&x| {
                let e = x - jack_mean;
                e * e
            })
            .fold(T::zero(), |a, b| a + b);
        let stderr = ((kf - one) / kf * jack_ss).sqrt();
        Ok((variance_mc, stderr))
    }

    /// Assemble the full report: exact terms plus Monte Carlo estimates.
    pub fn report<R>(&self, draws: usize, rng: &mut R) -> Result<RiskReport<T>>
    where
        R: Rng,
        StandardNormal: Distribution<T>,
    {
        let bias = self.bias_exact();
        let variance = self.variance_exact();
        let mc = self.monte_carlo(draws, rng)?;
        Ok(RiskReport {
            bias,
            variance,
            excess_risk: bias + variance,
            mc_risk: mc.mc_risk,
            mc_stderr: mc.mc_stderr,
            variance_mc: mc.variance_mc,
            variance_mc_stderr: mc.variance_mc_stderr,
        })
    }
}

/// Monte Carlo estimates over label-noise draws.
#[derive(Debug, Clone, Copy)]
pub struct McEstimates<T: Real> {
    pub mc_risk: T,
    pub mc_stderr: T,
    pub variance_mc: T,
    pub variance_mc_stderr: T,
}

// ====================================================================
// Unit tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolator::mnls_fit;
    use crate::numlin::svd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> RealMatrix<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        RealMatrix::from_fn(rows, cols, |_, _| {
            rand_distr::Distribution::sample(&StandardNormal, &mut rng)
        })
    }

    fn small_instance() -> (SvdResult<f64>, RealMatrix<f64>, Vec<f64>) {
        let z_train = gaussian_matrix(12, 30, 100);
        let z_test = gaussian_matrix(40, 30, 101);
        let mut rng = ChaCha12Rng::seed_from_u64(102);
        let beta: Vec<f64> = crate::synth::sample_beta_star(30, &mut rng).unwrap();
        (svd(&z_train, None).unwrap(), z_test, beta)
    }

    #[test]
    fn projection_squares_to_its_negation() {
        let (dec, _, _) = small_instance();
        let pi = ProjectionOperator::new(&dec);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..30)
            .map(|_| rand_distr::Distribution::sample(&StandardNormal, &mut rng))
            .collect();
        let pv = pi.apply(&v);
        let ppv = pi.apply(&pv);
        for (a, b) in ppv.iter().zip(&pv) {
            assert!((a + b).abs() < 1e-8, "Pi^2 must equal -Pi");
        }
    }

    #[test]
    fn training_features_annihilate_the_projection() {
        // Z Pi = U S V^T (V_r V_r^T - I) = 0 when the rank is fully kept.
        let z = gaussian_matrix(12, 30, 200);
        let dec = svd(&z, None).unwrap();
        let pi = ProjectionOperator::new(&dec);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..30)
            .map(|_| rand_distr::Distribution::sample(&StandardNormal, &mut rng))
            .collect();
        let zpv = z.matvec(&pi.apply(&v)).unwrap();
        let scale = dec.sigma[0] * crate::numlin::norm2(&v);
        assert!(
            crate::numlin::norm2(&zpv) <= 1e-10 * scale,
            "training rows see no bias direction"
        );
    }

    #[test]
    fn variance_is_exactly_linear_in_noise_variance() {
        let (dec, z_test, beta) = small_instance();
        let e1 = RiskEvaluator::new(&dec, &z_test, &beta, 1.0).unwrap();
        let e2 = RiskEvaluator::new(&dec, &z_test, &beta, 2.0).unwrap();
        assert_eq!(e2.variance_exact(), 2.0 * e1.variance_exact());
        // Bias never sees the label noise.
        assert_eq!(e1.bias_exact(), e2.bias_exact());
    }

    #[test]
    fn zero_label_noise_collapses_mc_to_bias() {
        let (dec, z_test, beta) = small_instance();
        let ev = RiskEvaluator::new(&dec, &z_test, &beta, 0.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let mc = ev.monte_carlo(16, &mut rng).unwrap();
        assert_eq!(ev.variance_exact(), 0.0);
        assert!((mc.mc_risk - ev.bias_exact()).abs() < 1e-14);
        // Every draw yields the identical risk; averaging identical values
        // still rounds, so the stderr is roundoff-tiny rather than exact 0.
        assert!(mc.mc_stderr < 1e-15);
        assert_eq!(mc.variance_mc, 0.0);
    }

    #[test]
    fn too_few_draws_is_an_error() {
        let (dec, z_test, beta) = small_instance();
        let ev = RiskEvaluator::new(&dec, &z_test, &beta, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        assert!(matches!(
            ev.monte_carlo(1, &mut rng),
            Err(RiskError::TooFewDraws { draws: 1 })
        ));
        assert!(matches!(
            ev.monte_carlo(2, &mut rng),
            Err(RiskError::TooFewDrawsForJackknife { draws: 2 })
        ));
    }

    #[test]
    fn decomposition_matches_mc_within_stderr() {
        let (dec, z_test, beta) = small_instance();
        let ev = RiskEvaluator::new(&dec, &z_test, &beta, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let rep = ev.report(300, &mut rng).unwrap();
        let gap = (rep.mc_risk - rep.excess_risk).abs();
        assert!(
            gap <= 3.0 * rep.mc_stderr,
            "decomposition gap {gap} vs stderr {}",
            rep.mc_stderr
        );
        let vgap = (rep.variance_mc - rep.variance).abs();
        assert!(
            vgap <= 3.0 * rep.variance_mc_stderr,
            "variance gap {vgap} vs jackknife stderr {}",
            rep.variance_mc_stderr
        );
    }

    #[test]
    fn bias_mc_oracle_agrees_via_independent_refits() {
        // Estimate the bias by brute force: refit on fresh noisy labels many
        // times through the public fitting path, average the predictions,
        // and compare the mean predictor's error against bias + V/K.
        let z_train = gaussian_matrix(15, 25, 300);
        let z_test = gaussian_matrix(60, 25, 301);
        let mut rng = ChaCha12Rng::seed_from_u64(302);
        let beta: Vec<f64> = crate::synth::sample_beta_star(25, &mut rng).unwrap();
        let y_base = z_train.matvec(&beta).unwrap();
        let sigma0_sq = 0.5_f64;

        let dec = svd(&z_train, None).unwrap();
        let ev = RiskEvaluator::new(&dec, &z_test, &beta, sigma0_sq).unwrap();
        let bias = ev.bias_exact();
        let variance = ev.variance_exact();

        let draws = 400;
        let m = z_test.rows();
        let mut mean_pred = vec![0.0_f64; m];
        for _ in 0..draws {
            let eps =
                crate::synth::sample_label_noise::<f64, _>(15, sigma0_sq, &mut rng);
            let y: Vec<f64> = y_base.iter().zip(&eps).map(|(a, b)| a + b).collect();
            let fit = mnls_fit(&z_train, &y, None).unwrap();
            for i in 0..m {
                mean_pred[i] += crate::numlin::dot(&fit.beta, z_test.row(i));
            }
        }
        let y_clean = z_test.matvec(&beta).unwrap();
        let mut bias_mc = 0.0;
        for i in 0..m {
            let e = mean_pred[i] / draws as f64 - y_clean[i];
            bias_mc += e * e;
        }
        bias_mc /= m as f64;
        // The mean of K noisy predictors still carries V/K of variance.
        let expected = bias + variance / draws as f64;
        let rel = (bias_mc - expected).abs() / expected;
        assert!(
            rel < 0.15,
            "bias oracle {bias_mc} vs expected {expected} (rel {rel})"
        );
    }
}
