//! Empirical verification bed for the concentration statements the risk
//! analysis rests on: scalar ReLU moment laws, weighted sub-exponential
//! sums, squared-norm concentration, eigenvalue envelopes for weighted
//! Wishart sums, operator-norm concentration of empirical feature Grams,
//! the design-matrix gap, and the cross-Gram perturbation from covariate
//! noise.
//!
//! Every statement involves an unspecified universal constant, so the
//! protocol FITS each constant instead of assuming it: on a training batch
//! of trials, take the smallest constant whose envelope is violated by at
//! most the theoretical rate (a descending-order quantile), then judge a
//! fresh validation batch against that envelope widened by
//! [`VALIDATION_MARGIN`]. The same quantile recomputed on the validation
//! batch doubles as a stability probe.
//!
//! This module measures; it does not prove. It is instantiated at `f64`
//! because it is a measurement harness for the generic pipeline, not part
//! of it. Trials run sequentially; outer parallelism belongs to callers.

use crate::numlin::RealMatrix;
use crate::relu_features::FeatureMap;
use crate::synth::{sample_covariate_noise, sample_covariates, CovariateDist};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type M = RealMatrix<f64>;

/// Factor by which the fitted envelope is widened before counting
/// validation violations. Rationale: the fit consumes exactly the quantile
/// the rate allows, so at margin 1 the validation rate would hover at the
/// theoretical rate by construction; a factor 2 tests that the fitted
/// constant has the right ORDER, which is all an unspecified universal
/// constant can promise.
pub const VALIDATION_MARGIN: f64 = 2.0;

/// Empirical confidence level used for the two envelopes that carry no
/// explicit tail parameter (design gap, cross-Gram perturbation): constants
/// are fitted at the 95% level.
pub const DEFAULT_ENVELOPE_RATE: f64 = 0.05;

/// Outcome of one lemma-verification run.
#[derive(Debug, Clone)]
pub struct ConcReport {
    /// Behavior-named identifier (`"subexp_sum"`, `"eigen_bounds"`, ...).
    pub lemma_id: &'static str,
    /// Total trials sampled (fit batch + validation batch).
    pub trials: usize,
    /// Fraction of validation trials outside the fitted envelope widened by
    /// [`VALIDATION_MARGIN`]. Always in `[0, 1]`.
    pub empirical_violation_rate: f64,
    /// Rate the statement promises at these parameters (`2 e^{-t}`, the
    /// Gram bound's `delta`, or [`DEFAULT_ENVELOPE_RATE`]).
    pub theoretical_rate: f64,
    /// Constant fitted on the training batch; strictly positive (floored at
    /// 1 when every trial produced an exactly-zero statistic).
    pub fitted_constant: f64,
    /// The same quantile recomputed on the validation batch; the ratio to
    /// `fitted_constant` is the stability measure.
    pub validation_constant: f64,
    /// Per-validation-trial `(statistic, envelope unit)` pairs; the envelope
    /// at constant `a` is `statistic <= a * unit`.
    pub envelope_values: Vec<(f64, f64)>,
    /// Secondary measurements (means, traces, gap statistics).
    pub aux: Vec<(&'static str, f64)>,
}

// ====================================================================
// Fit/validate protocol
// ====================================================================

/// Required constant for one trial: the smallest `a` with
/// `statistic <= a * unit`.
fn required_constant(stat: f64, unit: f64) -> f64 {
    if unit > 0.0 {
        stat / unit
    } else if stat > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Smallest constant whose envelope is violated by at most `rate` on the
/// batch: the descending-order quantile at index `floor(rate * len)`.
/// Floored at 1 when the batch is degenerate (all statistics zero).
fn fit_quantile(required: &mut [f64], rate: f64) -> f64 {
    assert!(!required.is_empty(), "cannot fit a constant on zero trials");
    required.sort_by(|a, b| b.partial_cmp(a).expect("required constants are not NaN"));
    let idx = ((rate * required.len() as f64).floor() as usize).min(required.len() - 1);
    let q = required[idx];
    if q > 0.0 {
        q
    } else {
        1.0
    }
}

/// Fraction of `(statistic, unit)` pairs violating the envelope at
/// `VALIDATION_MARGIN * fitted`.
fn violation_rate(pairs: &[(f64, f64)], fitted: f64) -> f64 {
    let c = VALIDATION_MARGIN * fitted;
    let hits = pairs.iter().filter(|&&(s, u)| s > c * u).count();
    hits as f64 / pairs.len() as f64
}

/// Run the fit/validate protocol over two batches of `(statistic, unit)`
/// pairs produced by `draw`, returning a report skeleton.
fn run_protocol(
    lemma_id: &'static str,
    theoretical_rate: f64,
    trials: usize,
    mut draw: impl FnMut() -> (f64, f64),
) -> ConcReport {
    assert!(trials >= 1, "need at least one trial per batch");
    let fit_batch: Vec<(f64, f64)> = (0..trials).map(|_| draw()).collect();
    let val_batch: Vec<(f64, f64)> = (0..trials).map(|_| draw()).collect();
    let mut req_fit: Vec<f64> = fit_batch
        .iter()
        .map(|&(s, u)| required_constant(s, u))
        .collect();
    let mut req_val: Vec<f64> = val_batch
        .iter()
        .map(|&(s, u)| required_constant(s, u))
        .collect();
    let fitted = fit_quantile(&mut req_fit, theoretical_rate);
    let validation = fit_quantile(&mut req_val, theoretical_rate);
    let rate = violation_rate(&val_batch, fitted);
    ConcReport {
        lemma_id,
        trials: 2 * trials,
        empirical_violation_rate: rate,
        theoretical_rate,
        fitted_constant: fitted,
        validation_constant: validation,
        envelope_values: val_batch,
        aux: Vec::new(),
    }
}

// ====================================================================
// Operator norm by power iteration (private; avoids a full SVD per trial)
// ====================================================================

/// Largest singular value of `a` by power iteration on `a^T a` with a
/// deterministic start vector. Accurate to ~1e-10 relative at the spectral
/// gaps encountered here; cross-checked against the full SVD in tests.
fn opnorm(a: &M) -> f64 {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..cols)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7368 + 0.3).sin())
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut sigma_sq_prev = 0.0;
    for iter in 0..300 {
        let w = a.matvec(&v).expect("power iteration shape");
        let u = a.tr_matvec(&w).expect("power iteration shape");
        // v is unit, so v . u = ||a v||^2 estimates sigma_max^2.
        let sigma_sq: f64 = v.iter().zip(&u).map(|(x, y)| x * y).sum();
        let nu = norm(&u);
        if nu == 0.0 {
            return 0.0;
        }
        v = u;
        v.iter_mut().for_each(|x| *x /= nu);
        if iter > 8 && (sigma_sq - sigma_sq_prev).abs() <= 1e-13 * sigma_sq.max(1e-300) {
            return sigma_sq.max(0.0).sqrt();
        }
        sigma_sq_prev = sigma_sq;
    }
    sigma_sq_prev.max(0.0).sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ====================================================================
// Data model plumbing
// ====================================================================

/// Covariate model handed to the matrix-level verifications: Gaussian
/// covariates with the given eigenvalue sequence, plus isotropic covariate
/// noise of variance `sigma_xi_sq` where the statement involves it.
#[derive(Debug, Clone, Copy)]
pub struct DataModel<'a> {
    /// Covariance eigenvalues, descending and nonnegative.
    pub spectrum: &'a [f64],
    /// Per-coordinate covariate-noise variance.
    pub sigma_xi_sq: f64,
}

impl<'a> DataModel<'a> {
    pub fn new(spectrum: &'a [f64], sigma_xi_sq: f64) -> Self {
        assert!(!spectrum.is_empty(), "spectrum must be non-empty");
        assert!(
            spectrum.windows(2).all(|w| w[0] >= w[1]) && spectrum.iter().all(|&l| l >= 0.0),
            "spectrum must be descending and nonnegative"
        );
        assert!(sigma_xi_sq >= 0.0, "noise variance must be nonnegative");
        DataModel {
            spectrum,
            sigma_xi_sq,
        }
    }

    fn d(&self) -> usize {
        self.spectrum.len()
    }
}

/// `Z^T Z / rows` for a feature matrix, the empirical second-moment matrix.
fn feature_gram(z: &M) -> M {
    let g = z.transpose().matmul(z).expect("gram shapes agree");
    g.scale(1.0 / z.rows() as f64)
}

// ====================================================================
// Scalar ReLU moment laws
// ====================================================================

/// Measure the mean, variance, and zero-atom of `max(0, w^T x)` over `m`
/// standard-normal weight draws with `|w^T x| ~ N(0, sigma_w^2 ||x||^2)`,
/// against the closed forms `sqrt(s2 / (2 pi))`, `(s2/2)(1 - 1/pi)`, and
/// `1/2` (with `s2 = sigma_w^2 ||x||^2`).
///
/// The report's envelope pairs are `(measured, law)` for mean, variance,
/// and atom in that order; `fitted_constant` is the largest relative
/// deviation, and the violation rate counts laws missed by more than 2%.
pub fn test_relu_moments(
    sigma_w: f64,
    x_norm: f64,
    m: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(m >= 1_000, "moment comparison needs at least 1000 draws");
    assert!(sigma_w > 0.0 && x_norm > 0.0, "scale parameters must be positive");
    let scale = sigma_w * x_norm;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut zeros = 0usize;
    for _ in 0..m {
        let g: f64 = StandardNormal.sample(rng);
        let z = (scale * g).max(0.0);
        sum += z;
        sum_sq += z * z;
        if z == 0.0 {
            zeros += 1;
        }
    }
    let mf = m as f64;
    let mean = sum / mf;
    let var = (sum_sq - mf * mean * mean) / (mf - 1.0);
    let atom = zeros as f64 / mf;

    let s2 = scale * scale;
    let law_mean = (s2 / (2.0 * std::f64::consts::PI)).sqrt();
    let law_var = (s2 / 2.0) * (1.0 - 1.0 / std::f64::consts::PI);
    let law_atom = 0.5;

    let rels = [
        (mean - law_mean).abs() / law_mean,
        (var - law_var).abs() / law_var,
        (atom - law_atom).abs() / law_atom,
    ];
    let worst = rels.iter().cloned().fold(0.0, f64::max);
    let misses = rels.iter().filter(|&&r| r > 0.02).count();
    ConcReport {
        lemma_id: "relu_moments",
        trials: m,
        empirical_violation_rate: misses as f64 / 3.0,
        theoretical_rate: 0.0,
        fitted_constant: worst.max(f64::MIN_POSITIVE),
        validation_constant: worst.max(f64::MIN_POSITIVE),
        envelope_values: vec![(mean, law_mean), (var, law_var), (atom, law_atom)],
        aux: vec![
            ("mean_rel_err", rels[0]),
            ("var_rel_err", rels[1]),
            ("atom_rel_err", rels[2]),
        ],
    }
}

// ====================================================================
// Weighted sub-exponential sums
// ====================================================================

/// Tail of `|sum_i lambda_i (g_i^2 - 1)|` against the envelope
/// `a * max(lambda_1 t, sqrt(t sum lambda_i^2))` at rate `2 e^{-t}`. The
/// variables' sub-exponential norm is an absolute constant and is absorbed
/// into the fitted `a`.
pub fn test_subexp_sum(
    lambdas: &[f64],
    t: f64,
    trials: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(t > 0.0, "tail parameter t must be positive");
    assert!(!lambdas.is_empty(), "need at least one weight");
    let l1 = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let l2sq: f64 = lambdas.iter().map(|l| l * l).sum();
    let unit = (l1 * t).max((t * l2sq).sqrt());
    run_protocol("subexp_sum", 2.0 * (-t).exp(), trials, || {
        let s: f64 = lambdas
            .iter()
            .map(|&l| {
                let g: f64 = StandardNormal.sample(rng);
                l * (g * g - 1.0)
            })
            .sum();
        (s.abs(), unit)
    })
}

// ====================================================================
// Squared-norm concentration
// ====================================================================

/// Tail of `| ||u||^2 - n (mu^2 + sigma^2) |` for `u` with i.i.d.
/// `N(mu, sigma^2)` coordinates, against `a1 * sigma^2 (t + sqrt(n t))` at
/// rate `2 e^{-t}`. A `mu != 0` call also exercises the cross-term
/// (mean-times-fluctuation) concentration.
pub fn test_norm_concentration(
    mu: f64,
    sigma: f64,
    n: usize,
    t: f64,
    trials: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(t > 0.0, "tail parameter t must be positive");
    assert!(n >= 1 && sigma >= 0.0);
    let center = n as f64 * (mu * mu + sigma * sigma);
    let unit = sigma * sigma * (t + (n as f64 * t).sqrt());
    let mut sum_stat = 0.0;
    let mut report = run_protocol("norm_concentration", 2.0 * (-t).exp(), trials, || {
        let nsq: f64 = (0..n)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                let u = mu + sigma * g;
                u * u
            })
            .sum();
        sum_stat += nsq;
        ((nsq - center).abs(), unit)
    });
    report.aux = vec![
        ("envelope_midpoint", center),
        ("mean_squared_norm", sum_stat / (2 * trials) as f64),
    ];
    report
}

// ====================================================================
// Eigenvalue envelope for weighted Wishart sums
// ====================================================================

/// Two-sided envelope for the extreme nonzero eigenvalues of
/// `A = sum_i lambda_i w_i w_i^T` with `w_i ~ N(0, I_s)`:
/// both `mu_1(A) - sum lambda_i` and `sum lambda_i - mu_N(A)` are judged
/// against `a1 * (lambda_1 (t + N log 9) + sqrt((t + N log 9) sum lambda_i^2))`
/// at rate `2 e^{-t}`, where `N = min(s, #lambda)` counts the structurally
/// nonzero eigenvalues. The `N log 9` term comes from a covering-set
/// cardinality and dominates `t` at desk scale, so only the combined
/// envelope is identifiable from data.
pub fn test_eigen_bounds(
    lambdas: &[f64],
    s: usize,
    t: f64,
    trials: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(t > 0.0 && s >= 1);
    let d = lambdas.len();
    let n_eff = s.min(d);
    assert!(n_eff <= 200, "eigendecomposition budget is desk-scale");
    let center: f64 = lambdas[..n_eff].iter().sum();
    let l1 = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let l2sq: f64 = lambdas[..n_eff].iter().map(|l| l * l).sum();
    let width = t + n_eff as f64 * 9.0_f64.ln();
    let unit = l1 * width + (width * l2sq).sqrt();
    let sqrt_l: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    let mut trace_sum = 0.0;
    let mut count = 0usize;
    let mut report = run_protocol("eigen_bounds", 2.0 * (-t).exp(), trials, || {
        // Column-scaled factor C with columns sqrt(lambda_j) w_j; the
        // nonzero spectrum of A = C C^T is that of the smaller Gram.
        let c = M::from_fn(s, d, |_, j| {
            let g: f64 = StandardNormal.sample(rng);
            sqrt_l[j] * g
        });
        let gram = if d <= s {
            c.transpose().matmul(&c).expect("gram shapes agree")
        } else {
            c.matmul(&c.transpose()).expect("gram shapes agree")
        };
        trace_sum += (0..gram.rows()).map(|i| gram[(i, i)]).sum::<f64>();
        count += 1;
        let eig = crate::numlin::sym_eig(&gram).expect("gram is symmetric by construction");
        let mu1 = eig.values[0];
        let mu_n = eig.values[n_eff - 1];
        let stat = (mu1 - center).max(center - mu_n).max(0.0);
        (stat, unit)
    });
    report.aux = vec![
        ("mean_trace", trace_sum / count as f64),
        // E tr(A) = sum_i lambda_i E ||w_i||^2 = s * sum lambda.
        ("expected_trace", s as f64 * lambdas.iter().sum::<f64>()),
    ];
    report
}

// ====================================================================
// Operator-norm concentration of the feature Gram
// ====================================================================

/// Number of samples in the reference-mean oracle: the population feature
/// second moment `E[z z^T]` has no closed form, so it is approximated by
/// this many fresh draws (documented oracle).
pub const GRAM_ORACLE_SAMPLES: usize = 100_000;

/// Operator-norm deviation of the n-sample feature Gram from its population
/// mean, against `c * sqrt(log(s/delta) / n)` at rate `delta`.
///
/// The feature map is FIXED (passed in); covariates are clean Gaussians
/// from `model.spectrum` — the statement concerns sampling error in `x`,
/// not the weight ensemble. The population Gram is the
/// [`GRAM_ORACLE_SAMPLES`]-draw oracle average.
pub fn test_matrix_bernstein(
    model: &DataModel,
    map: &FeatureMap<f64>,
    n: usize,
    delta: f64,
    trials: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(map.s() <= 500, "feature budget is desk-scale");
    assert!(delta > 0.0 && delta < 1.0);
    assert_eq!(model.d(), map.d(), "model and map disagree on d");
    assert!(n >= 1);
    let s = map.s();
    let oracle = gram_oracle(model.spectrum, map, GRAM_ORACLE_SAMPLES, rng);
    let unit = ((s as f64 / delta).ln() / n as f64).sqrt();
    let mut dev_sum = 0.0;
    let mut count = 0usize;
    let mut report = run_protocol("matrix_bernstein", delta, trials, || {
        let x = sample_covariates(model.spectrum, n, CovariateDist::Gaussian, rng);
        let z = map.feature_matrix(&x);
        let diff = feature_gram(&z).sub(&oracle).expect("gram shapes agree");
        let dev = opnorm(&diff);
        dev_sum += dev;
        count += 1;
        (dev, unit)
    });
    report.aux = vec![("mean_deviation", dev_sum / count as f64), ("curve", unit)];
    report
}

/// Oracle estimate of `E[z z^T]`, streamed in row chunks to bound memory.
fn gram_oracle(
    spectrum: &[f64],
    map: &FeatureMap<f64>,
    samples: usize,
    rng: &mut impl Rng,
) -> M {
    let s = map.s();
    let mut acc = M::zeros(s, s);
    let chunk = 2_000;
    let mut left = samples;
    while left > 0 {
        let take = left.min(chunk);
        let x = sample_covariates(spectrum, take, CovariateDist::Gaussian, rng);
        let z = map.feature_matrix(&x);
        let g = z.transpose().matmul(&z).expect("gram shapes agree");
        acc = acc.add(&g).expect("accumulator shape fixed");
        left -= take;
    }
    acc.scale(1.0 / samples as f64)
}

// ====================================================================
// Design-matrix gap and weighted-weight-Gram eigenvalue floor
// ====================================================================

/// Two linked measurements over the weight ensemble (weights are REDRAWN
/// each trial because both statements quantify over the weight draw; the
/// passed map only fixes the architecture `(s, d)` and the `1/s` weight
/// variance):
///
/// 1. the operator-norm gap between the noisy-feature Gram `Z^T Z / n` and
///    the linearized design `W Sigma_xi W^T`, reported relative to the
///    reference curve `sqrt(d/n) * d * sigma_w^2` in `aux`;
/// 2. the eigenvalue floor of `W Sigma_xi W^T`: the smallest structurally
///    nonzero eigenvalue (computed from the d-by-d companion Gram — the
///    s-by-s matrix is rank-deficient whenever `s > d`) is judged against
///    the lower envelope `mu_min >= d sigma_w^2 / b4` with fitted `b4`,
///    at rate [`DEFAULT_ENVELOPE_RATE`]. This is the report's primary
///    envelope; see the note below on the gap.
///
/// Note: with ReLU features the gap does NOT shrink with `n` — the
/// population Gram of rectified features differs from the linearized design
/// by an order-one offset, so sampling more points only sharpens
/// convergence to that offset. The `aux` entries expose both the raw and
/// the normalized gap so callers can see this directly.
pub fn test_design_gap(
    model: &DataModel,
    map: &FeatureMap<f64>,
    n: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(map.s() <= 500, "feature budget is desk-scale");
    assert_eq!(model.d(), map.d(), "model and map disagree on d");
    assert!(n >= 1);
    let (s, d) = (map.s(), map.d());
    let sigma_w_sq = 1.0 / s as f64;
    let floor_unit = d as f64 * sigma_w_sq;
    let gap_curve = (d as f64 / n as f64).sqrt() * floor_unit;
    let sqrt_lx: Vec<f64> = model
        .spectrum
        .iter()
        .map(|l| (l + model.sigma_xi_sq).sqrt())
        .collect();
    let mut raw_gaps: Vec<f64> = Vec::with_capacity(2 * trials);
    let mut mu1_sum = 0.0;
    let mut report = run_protocol("design_gap", DEFAULT_ENVELOPE_RATE, trials, || {
        let w = FeatureMap::sample(s, d, rng);
        // B = W diag(sqrt(lambda^xi)); the linearized design is B B^T and
        // its nonzero spectrum is that of the d-by-d companion B^T B.
        let b = M::from_fn(s, d, |i, j| w.weights()[(i, j)] * sqrt_lx[j]);
        let companion = b.transpose().matmul(&b).expect("gram shapes agree");
        let eig = crate::numlin::sym_eig(&companion).expect("gram is symmetric by construction");
        let mu1 = eig.values[0];
        let mu_min = eig.values[d - 1];
        mu1_sum += mu1;

        let x = sample_covariates(model.spectrum, n, CovariateDist::Gaussian, rng);
        let xi = sample_covariate_noise(n, d, model.sigma_xi_sq, rng);
        let x_noisy = x.add(&xi).expect("covariate shapes agree");
        let z = w.feature_matrix(&x_noisy);
        let design = b.matmul(&b.transpose()).expect("gram shapes agree");
        let gap = opnorm(&feature_gram(&z).sub(&design).expect("gram shapes agree"));
        raw_gaps.push(gap);

        // Lower envelope in required-constant form: the smallest b4 with
        // mu_min >= floor_unit / b4 is floor_unit / mu_min.
        (floor_unit, mu_min.max(0.0))
    });
    // run_protocol treats pairs as (statistic, unit); here the pair is
    // (floor_unit, mu_min) so the required constant floor_unit / mu_min and
    // the violation test mu_min < floor_unit / (margin-widened b4) come out
    // right. Swap the stored pairs back to (statistic, bound) orientation.
    for pair in report.envelope_values.iter_mut() {
        *pair = (pair.1, pair.0); // (mu_min, d sigma_w^2)
    }
    let mean_gap = raw_gaps.iter().sum::<f64>() / raw_gaps.len() as f64;
    let max_gap = raw_gaps.iter().cloned().fold(0.0, f64::max);
    report.aux = vec![
        ("mean_raw_gap", mean_gap),
        ("max_raw_gap", max_gap),
        ("mean_normalized_gap", mean_gap / gap_curve),
        ("gap_curve", gap_curve),
        ("mean_mu1", mu1_sum / (2 * trials) as f64),
    ];
    report
}

// ====================================================================
// Cross-Gram perturbation from covariate noise
// ====================================================================

/// Operator norm of `(1/n) DeltaZ^T Z`, where `DeltaZ` is the feature
/// difference between clean and noise-perturbed covariates, against
/// `c * d^2 sigma_xi / n` at rate [`DEFAULT_ENVELOPE_RATE`]. The feature
/// map is FIXED (the statement conditions on the trained architecture);
/// covariates and noise are redrawn per trial.
pub fn test_deltaz_bound(
    model: &DataModel,
    map: &FeatureMap<f64>,
    n: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> ConcReport {
    assert!(map.s() <= 500, "feature budget is desk-scale");
    assert_eq!(model.d(), map.d(), "model and map disagree on d");
    assert!(n >= 1);
    let d = model.d() as f64;
    let sigma_xi = model.sigma_xi_sq.sqrt();
    let unit = d * d * sigma_xi / n as f64;
    let mut stat_sum = 0.0;
    let mut count = 0usize;
    let mut report = run_protocol("deltaz_bound", DEFAULT_ENVELOPE_RATE, trials, || {
        let x = sample_covariates(model.spectrum, n, CovariateDist::Gaussian, rng);
        let xi = sample_covariate_noise(n, model.d(), model.sigma_xi_sq, rng);
        let x_noisy = x.add(&xi).expect("covariate shapes agree");
        let z = map.feature_matrix(&x);
        let z_noisy = map.feature_matrix(&x_noisy);
        let delta = z.sub(&z_noisy).expect("feature shapes agree");
        let cross = delta
            .transpose()
            .matmul(&z)
            .expect("gram shapes agree")
            .scale(1.0 / n as f64);
        let stat = opnorm(&cross);
        stat_sum += stat;
        count += 1;
        (stat, unit)
    });
    report.aux = vec![
        ("mean_statistic", stat_sum / count as f64),
        ("curve", unit),
    ];
    report
}

// ====================================================================
// Unit tests
// ====================================================================
