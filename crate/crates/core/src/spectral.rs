//! Spectral diagnostics: the effective-dimension index k*, bias-regime
//! classification, closed-form reference bound values, and empirical rate
//! fitting.
//!
//! These are the quantitative predictions the experiments are judged
//! against. Everything here is a pure function of parameters; the constants
//! `b` (tail-ratio condition) and `c` (bound curves) are REFERENCE values,
//! not certified envelopes, because the underlying theory leaves them as
//! unspecified universal constants.

use crate::synth::SpectrumKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("{field} = {value} is outside its valid range {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("rate fit needs at least 4 points, got {got}")]
    TooFewPoints { got: usize },
    #[error("rate fit needs strictly positive variances, got {value} at point {index}")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("rate fit abscissa spans only a factor {span:.3}; need at least {needed}")]
    DegenerateSpan { span: f64, needed: f64 },
}

pub type Result<T> = std::result::Result<T, SpectralError>;

// ====================================================================
// k* condition
// ====================================================================

/// Outcome of the tail-ratio search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KstarResult {
    /// Smallest index `k` (1-based) with tail ratio at least `d/b`; absent
    /// if no index qualifies.
    pub kstar: Option<usize>,
    /// Condition constant used.
    pub b: f64,
    /// Tail ratio at `kstar`, when present.
    pub tail_ratio_at_kstar: Option<f64>,
    /// Closed-form prediction for the spectrum family, when attached (see
    /// [`analytic_kstar`]).
    pub analytic_prediction: Option<usize>,
}

/// Smallest `k` in `1..d` with `sum_{i>k} lambda_i^xi / lambda_k^xi >= d/b`,
/// found in one backward cumulative-sum pass.
///
/// `lambdas_xi` is the noisy spectrum, descending and strictly positive;
/// `b > 1`. Absence of a qualifying index is a value, not an error.
pub fn find_kstar(lambdas_xi: &[f64], d: usize, b: f64) -> KstarResult {
    assert!(b > 1.0, "condition constant b must exceed 1, got {b}");
    assert!(
        lambdas_xi.windows(2).all(|w| w[0] >= w[1]) && lambdas_xi.iter().all(|&l| l > 0.0),
        "noisy spectrum must be descending and positive"
    );
    let len = lambdas_xi.len();
    let threshold = d as f64 / b;
    // suffix[k] = sum of lambdas past index k (0-based k = 1-based index k).
    let mut suffix = vec![0.0; len + 1];
    for i in (0..len).rev() {
        suffix[i] = suffix[i + 1] + lambdas_xi[i];
    }
    for k in 1..len {
        let ratio = suffix[k] / lambdas_xi[k - 1];
        if ratio >= threshold {
            return KstarResult {
                kstar: Some(k),
                b,
                tail_ratio_at_kstar: Some(ratio),
                analytic_prediction: None,
            };
        }
    }
    KstarResult {
        kstar: None,
        b,
        tail_ratio_at_kstar: None,
        analytic_prediction: None,
    }
}

/// Tail ratio at a specific 1-based index (diagnostic companion to
/// [`find_kstar`]): `sum_{i>k} lambda_i^xi / lambda_k^xi`.
pub fn tail_ratio_at(lambdas_xi: &[f64], k: usize) -> f64 {
    assert!(k >= 1 && k <= lambdas_xi.len(), "index out of range");
    let tail: f64 = lambdas_xi[k..].iter().sum();
    tail / lambdas_xi[k - 1]
}

/// Closed-form k* prediction per spectrum family: the rank for finite-rank
/// spectra, `ceil(ln d) + 1` for the exponential family (top eigenvalue
/// normalized to 1), `d^{1/gamma}` for polynomial decay (snap-ceiling, so
/// perfect powers are exact).
pub fn analytic_kstar(kind: SpectrumKind, d: usize) -> Option<usize> {
    match kind {
        SpectrumKind::FiniteRank { rank } => Some(rank),
        SpectrumKind::Exponential => Some((d as f64).ln().ceil() as usize + 1),
        SpectrumKind::Polynomial { gamma } => {
            if gamma > 1.0 {
                Some(crate::synth::ceil_pow(d, 1.0 / gamma))
            } else {
                None
            }
        }
    }
}

/// [`find_kstar`] with the family prediction attached.
pub fn kstar_report(kind: SpectrumKind, lambdas_xi: &[f64], d: usize, b: f64) -> KstarResult {
    let mut r = find_kstar(lambdas_xi, d, b);
    r.analytic_prediction = analytic_kstar(kind, d);
    r
}

// ====================================================================
// Bias/variance regimes
// ====================================================================

/// Which mechanism controls the bias as `n` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasCase {
    /// `alpha <= 1/2`: the ambient dimension grows slowly enough that the
    /// bias always converges.
    LowDimensionGrowth,
    /// `zeta >= 2`: covariate noise decays fast enough that the bias always
    /// converges.
    FastNoiseDecay,
    /// Neither shortcut applies; convergence requires
    /// `zeta > 4 - 2/alpha` (strict).
    SlowNoiseDecay,
}

impl BiasCase {
    pub fn name(&self) -> &'static str {
        match self {
            BiasCase::LowDimensionGrowth => "low_dimension_growth",
            BiasCase::FastNoiseDecay => "fast_noise_decay",
            BiasCase::SlowNoiseDecay => "slow_noise_decay",
        }
    }
}

/// Convergence verdicts for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub bias_case: BiasCase,
    pub bias_converges: bool,
    /// `kappa < 1 + alpha` (strict): the feature count stays far enough
    /// below `n * d` for the variance to vanish.
    pub variance_converges: bool,
    /// Spectrum family name, carried through for reporting.
    pub scenario: &'static str,
    /// The bias-convergence threshold on `zeta` when in the contested case.
    pub zeta_threshold: Option<f64>,
}

/// Classify the `(alpha, zeta, kappa)` point. Precedence: the
/// low-dimension case wins over the fast-noise case when both apply.
///
/// # Errors
/// Out-of-range parameters (`alpha` outside (0,1), `zeta < 1`,
/// `kappa <= 0`, polynomial `gamma <= 1`) are contract errors.
pub fn classify_regime(
    kind: SpectrumKind,
    alpha: f64,
    zeta: f64,
    kappa: f64,
) -> Result<RegimeLabel> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SpectralError::OutOfRange {
            field: "alpha",
            value: alpha,
            range: "(0, 1)",
        });
    }
    if !(zeta >= 1.0) {
        return Err(SpectralError::OutOfRange {
            field: "zeta",
            value: zeta,
            range: "[1, inf)",
        });
    }
    if !(kappa > 0.0) {
        return Err(SpectralError::OutOfRange {
            field: "kappa",
            value: kappa,
            range: "(0, inf)",
        });
    }
    if let SpectrumKind::Polynomial { gamma } = kind {
        if !(gamma > 1.0) {
            return Err(SpectralError::OutOfRange {
                field: "gamma",
                value: gamma,
                range: "(1, inf)",
            });
        }
    }
    let (bias_case, bias_converges, zeta_threshold) = if alpha <= 0.5 {
        (BiasCase::LowDimensionGrowth, true, None)
    } else if zeta >= 2.0 {
        (BiasCase::FastNoiseDecay, true, None)
    } else {
        let threshold = 4.0 - 2.0 / alpha;
        // Strict inequality: the boundary point itself does not converge.
        (
            BiasCase::SlowNoiseDecay,
            zeta > threshold,
            Some(threshold),
        )
    };
    Ok(RegimeLabel {
        bias_case,
        bias_converges,
        variance_converges: kappa < 1.0 + alpha,
        scenario: kind.name(),
        zeta_threshold,
    })
}

// ====================================================================
// Reference bound values
// ====================================================================

/// Closed-form reference curves for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSheet {
    /// `c * sigma0^2 * Tr(Sigma) * s / (n d)`.
    pub v_upper: f64,
    /// `(1/c) * sigma0^2 * Tr(Sigma) * s / (n d)`.
    pub v_lower: f64,
    /// `c * (sqrt(log(s/delta)/n) + d^2 sigma_xi / n)`.
    pub b_upper: f64,
    pub delta: f64,
    pub c: f64,
}

/// Evaluate the three reference curves verbatim.
#[allow(clippy::too_many_arguments)]
pub fn bound_sheet(
    sigma0_sq: f64,
    trace_sigma: f64,
    s: usize,
    n: usize,
    d: usize,
    sigma_xi: f64,
    delta: f64,
    c: f64,
) -> BoundSheet {
    assert!(
        sigma0_sq >= 0.0 && trace_sigma > 0.0 && s >= 1 && n >= 1 && d >= 1 && sigma_xi >= 0.0,
        "bound sheet parameters must be positive"
    );
    assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    assert!(c > 0.0, "bound constant c must be positive");
    let base = sigma0_sq * trace_sigma * s as f64 / (n as f64 * d as f64);
    let nf = n as f64;
    BoundSheet {
        v_upper: c * base,
        v_lower: base / c,
        b_upper: c * (((s as f64 / delta).ln() / nf).sqrt() + (d * d) as f64 * sigma_xi / nf),
        delta,
        c,
    }
}

// ====================================================================
// Empirical rate fitting
// ====================================================================

/// Ordinary least squares of `log V` on `log(s/(nd))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Minimum multiplicative spread the abscissa `s/(nd)` must cover for the
/// fit to be meaningful. A single cluster of nearby points cannot identify
/// a rate.
pub const MIN_SPAN_FACTOR: f64 = 4.0;

/// Fit `log V = slope * log(s/(nd)) + intercept` over `(s, n, d, V)` points.
///
/// # Errors
/// Fewer than 4 points, any nonpositive `V`, or an abscissa spanning less
/// than [`MIN_SPAN_FACTOR`] are contract errors.
pub fn rate_fit(points: &[(f64, f64, f64, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(SpectralError::TooFewPoints { got: points.len() });
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for (i, &(s, n, d, v)) in points.iter().enumerate() {
        if !(v > 0.0) {
            return Err(SpectralError::NonPositiveVariance { index: i, value: v });
        }
        xs.push((s / (n * d)).ln());
        ys.push(v.ln());
    }
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < MIN_SPAN_FACTOR.ln() {
        return Err(SpectralError::DegenerateSpan {
            span: span.exp(),
            needed: MIN_SPAN_FACTOR,
        });
    }
    let m = points.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        // All responses equal: a flat fit explains them perfectly.
        1.0
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

// ====================================================================
// Unit tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{make_spectrum, noise_variance, noisy_spectrum, trace};

    fn noisy_poly(gamma: f64, d: usize, zeta: f64) -> Vec<f64> {
        let spec: Vec<f64> = make_spectrum(SpectrumKind::Polynomial { gamma }, d).unwrap();
        noisy_spectrum(&spec, noise_variance(d, zeta))
    }

    #[test]
    fn polynomial_kstar_found_at_or_below_analytic() {
        let kind = SpectrumKind::Polynomial { gamma: 2.0 };
        let lx = noisy_poly(2.0, 100, 1.0);
        let r = kstar_report(kind, &lx, 100, 4.0);
        assert_eq!(r.analytic_prediction, Some(10));
        let k = r.kstar.expect("condition satisfiable here");
        assert!(k <= 10, "smallest index {k} cannot exceed the prediction");
        assert!(r.tail_ratio_at_kstar.unwrap() >= 25.0);
        // The closed-form index satisfies the condition too.
        assert!(tail_ratio_at(&lx, 10) >= 25.0);
    }

    #[test]
    fn finite_rank_kstar_with_small_noise_lands_just_past_the_rank() {
        // With sigma_xi^2 far below the in-rank eigenvalues the tail mass at
        // k = r is (d - r) sigma^2 / (1 + sigma^2), far below d/b, so the
        // smallest qualifying index is r + 1, where the ratio jumps to
        // (d - r - 1) >= d/2.
        let spec: Vec<f64> = make_spectrum(SpectrumKind::FiniteRank { rank: 5 }, 100).unwrap();
        let lx = noisy_spectrum(&spec, 0.01);
        let r = find_kstar(&lx, 100, 2.0);
        assert_eq!(r.kstar, Some(6));
        // Once the noise floor dominates the in-rank eigenvalues the
        // prediction k* <= r holds.
        let lx_big = noisy_spectrum(&spec, 1.0);
        let r_big = find_kstar(&lx_big, 100, 4.0);
        assert!(r_big.kstar.unwrap() <= 5, "got {:?}", r_big.kstar);
    }

    #[test]
    fn flat_spectrum_kstar_is_one() {
        // Flat noisy spectrum: ratio at k is d - k, so the smallest k with
        // d - k >= d/2 is k = 1 for any d >= 2.
        let lx = vec![0.3_f64; 50];
        let r = find_kstar(&lx, 50, 2.0);
        assert_eq!(r.kstar, Some(1));
        assert!((r.tail_ratio_at_kstar.unwrap() - 49.0).abs() < 1e-9);
    }

    #[test]
    fn noise_dominated_spectrum_gives_tiny_kstar() {
        // sigma_xi^2 >= lambda_1 makes every ratio term at least 1/2, so the
        // condition holds at k = 1 already for b = 4.
        let lx = noisy_spectrum(
            &make_spectrum::<f64>(SpectrumKind::Polynomial { gamma: 2.0 }, 40).unwrap(),
            1.5,
        );
        assert_eq!(find_kstar(&lx, 40, 4.0).kstar, Some(1));
    }

    #[test]
    fn kstar_absent_when_tail_cannot_reach() {
        // Two entries: the only candidate k = 1 has ratio lambda_2/lambda_1
        // < 1 < d/b.
        let r = find_kstar(&[1.0, 0.5], 2, 1.5);
        assert_eq!(r.kstar, None);
        assert_eq!(r.tail_ratio_at_kstar, None);
    }

    #[test]
    fn exponential_analytic_prediction() {
        assert_eq!(analytic_kstar(SpectrumKind::Exponential, 50), Some(5)); // ceil(3.91)+1
        assert_eq!(analytic_kstar(SpectrumKind::Exponential, 200), Some(7)); // ceil(5.30)+1
        assert_eq!(analytic_kstar(SpectrumKind::Exponential, 1000), Some(8)); // ceil(6.91)+1
    }

    #[test]
    fn regime_low_alpha_always_converges() {
        let kind = SpectrumKind::Polynomial { gamma: 2.0 };
        let r = classify_regime(kind, 0.4, 1.0, 1.1).unwrap();
        assert_eq!(r.bias_case, BiasCase::LowDimensionGrowth);
        assert!(r.bias_converges);
        // Precedence: alpha <= 1/2 wins even when zeta >= 2 also applies.
        let r2 = classify_regime(kind, 0.5, 3.0, 1.1).unwrap();
        assert_eq!(r2.bias_case, BiasCase::LowDimensionGrowth);
    }

    #[test]
    fn regime_contested_threshold_is_strict() {
        let kind = SpectrumKind::Polynomial { gamma: 2.0 };
        // alpha = 0.8: threshold 4 - 2/0.8 = 1.5.
        let at = classify_regime(kind, 0.8, 1.5, 1.1).unwrap();
        assert_eq!(at.bias_case, BiasCase::SlowNoiseDecay);
        assert!(!at.bias_converges, "boundary point must not converge");
        assert_eq!(at.zeta_threshold, Some(1.5));
        let above = classify_regime(kind, 0.8, 1.51, 1.1).unwrap();
        assert!(above.bias_converges);
        // 1.3 sits below the threshold: divergent, whatever intuition says.
        let below = classify_regime(kind, 0.8, 1.3, 1.1).unwrap();
        assert!(!below.bias_converges);
    }

    #[test]
    fn regime_near_one_alpha_and_zeta_diverges() {
        let r = classify_regime(SpectrumKind::Exponential, 0.9, 1.0, 1.1).unwrap();
        assert_eq!(r.bias_case, BiasCase::SlowNoiseDecay);
        assert!(!r.bias_converges);
        assert_eq!(r.scenario, "exponential");
    }

    #[test]
    fn variance_condition_is_strict_in_kappa() {
        let kind = SpectrumKind::Polynomial { gamma: 2.0 };
        assert!(classify_regime(kind, 0.5, 1.0, 1.49).unwrap().variance_converges);
        assert!(!classify_regime(kind, 0.5, 1.0, 1.5).unwrap().variance_converges);
    }

    #[test]
    fn regime_rejects_out_of_range_parameters() {
        let kind = SpectrumKind::Polynomial { gamma: 2.0 };
        assert!(matches!(
            classify_regime(kind, 1.0, 1.0, 1.0),
            Err(SpectralError::OutOfRange { field: "alpha", .. })
        ));
        assert!(matches!(
            classify_regime(kind, 0.5, 0.5, 1.0),
            Err(SpectralError::OutOfRange { field: "zeta", .. })
        ));
        assert!(matches!(
            classify_regime(SpectrumKind::Polynomial { gamma: 1.0 }, 0.5, 1.0, 1.0),
            Err(SpectralError::OutOfRange { field: "gamma", .. })
        ));
    }

    #[test]
    fn bound_sheet_worked_value() {
        let spec: Vec<f64> =
            make_spectrum(SpectrumKind::Polynomial { gamma: 2.0 }, 10).unwrap();
        let tr = trace(&spec);
        let sheet = bound_sheet(1.0, tr, 400, 100, 10, 0.0, 0.05, 1.0);
        assert!(
            (sheet.v_upper - 0.61990709).abs() < 1e-7,
            "v_upper = {}",
            sheet.v_upper
        );
        assert_eq!(sheet.v_upper, sheet.v_lower); // c = 1
        // sigma_xi = 0 drops the second term of b_upper.
        assert!((sheet.b_upper - ((400.0_f64 / 0.05).ln() / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bound_sheet_scales_linearly_in_s_and_squares_c() {
        let sheet1 = bound_sheet(1.0, 1.5, 100, 50, 5, 0.1, 0.05, 2.0);
        let sheet2 = bound_sheet(1.0, 1.5, 200, 50, 5, 0.1, 0.05, 2.0);
        assert_eq!(sheet2.v_upper, 2.0 * sheet1.v_upper);
        assert_eq!(sheet2.v_lower, 2.0 * sheet1.v_lower);
        // c = 2 is a power of two, so the ratio identity is exact in floats.
        assert_eq!(sheet1.v_upper / sheet1.v_lower, 4.0);
    }

    #[test]
    fn rate_fit_recovers_exact_power_laws() {
        let pts: Vec<(f64, f64, f64, f64)> = [(50.0, 100.0, 10.0), (200.0, 100.0, 10.0),
            (800.0, 100.0, 10.0), (3200.0, 100.0, 10.0)]
            .iter()
            .map(|&(s, n, d)| (s, n, d, 2.0 * s / (n * d)))
            .collect();
        let fit = rate_fit(&pts).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 2.0_f64.ln()).abs() < 1e-12);

        let sq: Vec<_> = pts
            .iter()
            .map(|&(s, n, d, _)| (s, n, d, (s / (n * d)).powi(2)))
            .collect();
        assert!((rate_fit(&sq).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rate_fit_contract_errors() {
        let three = vec![(1.0, 1.0, 1.0, 1.0); 3];
        assert!(matches!(
            rate_fit(&three),
            Err(SpectralError::TooFewPoints { got: 3 })
        ));
        let bad_v = vec![
            (50.0, 100.0, 10.0, 1.0),
            (100.0, 100.0, 10.0, 0.0),
            (200.0, 100.0, 10.0, 1.0),
            (400.0, 100.0, 10.0, 1.0),
        ];
        assert!(matches!(
            rate_fit(&bad_v),
            Err(SpectralError::NonPositiveVariance { index: 1, .. })
        ));
        let clustered = vec![
            (100.0, 100.0, 10.0, 1.0),
            (110.0, 100.0, 10.0, 1.1),
            (120.0, 100.0, 10.0, 1.2),
            (130.0, 100.0, 10.0, 1.3),
        ];
        assert!(matches!(
            rate_fit(&clustered),
            Err(SpectralError::DegenerateSpan { .. })
        ));
    }
}
