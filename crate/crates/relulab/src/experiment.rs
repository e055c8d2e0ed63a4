//! End-to-end execution of one experiment cell: sample the model, fit the
//! minimum-norm interpolator, evaluate the risk decomposition and spectral
//! diagnostics, and serialize everything as fixed-schema CSV rows.

use crate::config::{ExperimentConfig, LabelsFrom};
use crate::stream::derive_stream;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use relulab_core::interpolator::mnls_fit;
use relulab_core::numlin::default_rel_tol;
use relulab_core::relu_features::FeatureMap;
use relulab_core::risk::{RiskEvaluator, RiskReport};
use relulab_core::spectral::{bound_sheet, kstar_report, BoundSheet, KstarResult};
use relulab_core::synth::{
    make_labels, make_spectrum, noise_variance, noisy_spectrum, sample_beta_star,
    sample_covariate_noise, sample_covariates, sample_label_noise, trace,
};
use std::time::Instant;

/// Outcome marker for one row. A failed replicate keeps its deterministic
/// spectral diagnostics but has NaN risk fields.
#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Failed(String),
}

/// One (cell, replicate) result.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub config: ExperimentConfig,
    pub replicate: usize,
    /// Smallest tail-ratio index of the noisy spectrum; `None` if the
    /// condition never holds (serialized as 0).
    pub kstar: Option<usize>,
    pub kstar_analytic: Option<usize>,
    /// Whether the tail-ratio condition holds anywhere, i.e. `kstar` exists.
    pub cond4_holds: bool,
    pub b_r: f64,
    pub v_r: f64,
    /// Total excess risk `b_r + v_r`.
    pub r: f64,
    pub mc_risk: f64,
    pub mc_stderr: f64,
    pub v_upper_ref: f64,
    pub v_lower_ref: f64,
    pub b_upper_ref: f64,
    pub numerical_rank: usize,
    /// Truncation tolerance actually used by the fit (resolved default or
    /// explicit override).
    pub pinv_rel_tol_used: f64,
    /// Wall-clock milliseconds, recorded only when timing is requested;
    /// 0 otherwise so that output bytes stay run-independent.
    pub runtime_ms: u64,
    pub status: RowStatus,
}

/// Fixed CSV schema; one line per (cell, replicate).
pub const CSV_HEADER: &str = "n,d,alpha,s,kappa,gamma,rank,zeta,sigma0_sq,spectrum_kind,\
covariate_dist,labels_from,m_test,m_eps,replicates,master_seed,pinv_rel_tol,b,delta,\
replicate,kstar,kstar_analytic,cond4_holds,b_r,v_r,r,mc_risk,mc_stderr,v_upper_ref,\
v_lower_ref,b_upper_ref,numerical_rank,runtime_ms,status";

/// Column-by-column description emitted alongside CSV files.
pub const COLUMN_NOTES: &str = "\
Column reference for experiment result CSV files.

Configuration echo:
  n               training sample count
  d               ambient covariate dimension (derived ceil(n^alpha) when alpha given)
  alpha           dimension exponent, nan when d was given explicitly
  s               random feature count (derived ceil(n^kappa) when kappa given)
  kappa           feature exponent, nan when s was given explicitly
  gamma           polynomial spectrum decay exponent, nan for other spectra
  rank            finite-rank spectrum rank, 0 for other spectra
  zeta            covariate-noise decay exponent: sigma_xi^2 = d^-zeta
  sigma0_sq       label-noise variance
  spectrum_kind   polynomial | exponential | finite_rank
  covariate_dist  gaussian | rademacher factor distribution
  labels_from     noisy | clean: which feature matrix generated the labels
  m_test          test points for risk evaluation
  m_eps           Monte Carlo label-noise redraws
  replicates      replicates per cell
  master_seed     root seed for stream derivation
  pinv_rel_tol    truncation tolerance actually used by the fit
  b               tail-ratio condition constant
  delta           confidence parameter for the reference bound curves

Per-replicate results:
  replicate       replicate index within the cell, 0-based
  kstar           smallest tail-ratio index of the noisy spectrum, 0 if the
                  condition holds nowhere
  kstar_analytic  closed-form family prediction, 0 when inapplicable
  cond4_holds     true when kstar exists
  b_r             exact bias of the fitted interpolator on the test set
  v_r             exact label-noise variance term on the test set
  r               excess risk b_r + v_r
  mc_risk         Monte Carlo excess risk over m_eps label-noise redraws
  mc_stderr       standard error of mc_risk
  v_upper_ref     reference variance upper curve c*sigma0_sq*Tr(Sigma)*s/(n d), c=1
  v_lower_ref     reference variance lower curve (1/c)*sigma0_sq*Tr(Sigma)*s/(n d)
  b_upper_ref     reference bias curve c*(sqrt(log(s/delta)/n) + d^2 sigma_xi/n)
  numerical_rank  retained singular values in the fit
  runtime_ms      wall-clock milliseconds when timing was requested, else 0
  status          ok, or failed:<reason> — failed rows keep the spectral
                  diagnostics and carry nan risk fields

All floats use full 17-significant-digit scientific notation so identical
runs produce identical bytes.
";

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_f64(v),
        None => "nan".to_string(),
    }
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        let c = &self.config;
        let status = match &self.status {
            RowStatus::Ok => "ok".to_string(),
            // Commas would break the schema; keep reasons one field wide.
            RowStatus::Failed(reason) => format!("failed:{}", reason.replace(',', ";")),
        };
        [
            c.n.to_string(),
            c.d.to_string(),
            fmt_opt_f64(c.alpha),
            c.s.to_string(),
            fmt_opt_f64(c.kappa),
            fmt_opt_f64(c.gamma()),
            c.rank().unwrap_or(0).to_string(),
            fmt_f64(c.zeta),
            fmt_f64(c.sigma0_sq),
            c.kind.name().to_string(),
            c.covariate_dist.name().to_string(),
            c.labels_from.name().to_string(),
            c.m_test.to_string(),
            c.m_eps.to_string(),
            c.replicates.to_string(),
            c.master_seed.to_string(),
            fmt_f64(self.pinv_rel_tol_used),
            fmt_f64(c.b),
            fmt_f64(c.delta),
            self.replicate.to_string(),
            self.kstar.unwrap_or(0).to_string(),
            self.kstar_analytic.unwrap_or(0).to_string(),
            self.cond4_holds.to_string(),
            fmt_f64(self.b_r),
            fmt_f64(self.v_r),
            fmt_f64(self.r),
            fmt_f64(self.mc_risk),
            fmt_f64(self.mc_stderr),
            fmt_f64(self.v_upper_ref),
            fmt_f64(self.v_lower_ref),
            fmt_f64(self.b_upper_ref),
            self.numerical_rank.to_string(),
            self.runtime_ms.to_string(),
            status,
        ]
        .join(",")
    }
}

/// Deterministic spectral diagnostics shared by all replicates of a cell.
struct CellDiagnostics {
    kstar: KstarResult,
    sheet: BoundSheet,
    spectrum: Vec<f64>,
    sigma_xi_sq: f64,
}

fn cell_diagnostics(cfg: &ExperimentConfig) -> CellDiagnostics {
    let spectrum: Vec<f64> =
        make_spectrum(cfg.kind, cfg.d).expect("config validation guarantees a valid spectrum");
    let sigma_xi_sq: f64 = noise_variance(cfg.d, cfg.zeta);
    let lambda_xi = noisy_spectrum(&spectrum, sigma_xi_sq);
    let kstar = kstar_report(cfg.kind, &lambda_xi, cfg.d, cfg.b);
    let sheet = bound_sheet(
        cfg.sigma0_sq,
        trace(&spectrum),
        cfg.s,
        cfg.n,
        cfg.d,
        sigma_xi_sq.sqrt(),
        cfg.delta,
        1.0,
    );
    CellDiagnostics {
        kstar,
        sheet,
        spectrum,
        sigma_xi_sq,
    }
}

fn try_replicate(
    cfg: &ExperimentConfig,
    diag: &CellDiagnostics,
    cell_index: u64,
    replicate: usize,
    rel_tol: f64,
) -> Result<(RiskReport<f64>, usize), String> {
    let seed = derive_stream(cfg.master_seed, cell_index, replicate as u64);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    // RNG consumption order is part of the reproducibility contract:
    // covariates, covariate noise, weights, target coefficients, label
    // noise, test covariates, Monte Carlo noise.
    let x = sample_covariates(&diag.spectrum, cfg.n, cfg.covariate_dist, &mut rng);
    let xi = sample_covariate_noise(cfg.n, cfg.d, diag.sigma_xi_sq, &mut rng);
    let x_noisy = x.add(&xi).expect("covariate shapes agree");
    let map = FeatureMap::<f64>::sample(cfg.s, cfg.d, &mut rng);
    let z_noisy = map.feature_matrix(&x_noisy);
    let beta_star = sample_beta_star(cfg.s, &mut rng).map_err(|e| e.to_string())?;
    let eps = sample_label_noise(cfg.n, cfg.sigma0_sq, &mut rng);
    let y = match cfg.labels_from {
        LabelsFrom::Noisy => make_labels(&z_noisy, &beta_star, &eps),
        LabelsFrom::Clean => make_labels(&map.feature_matrix(&x), &beta_star, &eps),
    };

    let fit = mnls_fit(&z_noisy, &y, Some(rel_tol)).map_err(|e| e.to_string())?;

    let x_test = sample_covariates(&diag.spectrum, cfg.m_test, cfg.covariate_dist, &mut rng);
    let z_test = map.feature_matrix(&x_test);
    let evaluator = RiskEvaluator::new(&fit.svd, &z_test, &beta_star, cfg.sigma0_sq)
        .map_err(|e| e.to_string())?;
    let report = evaluator
        .report(cfg.m_eps, &mut rng)
        .map_err(|e| e.to_string())?;

    Ok((report, fit.rank()))
}

/// Run one replicate and return the full risk report plus the numerical
/// rank, for callers that need the Monte Carlo variance channel the CSV
/// schema does not carry.
pub fn replicate_risk_report(
    cfg: &ExperimentConfig,
    cell_index: u64,
    replicate: usize,
) -> Result<(RiskReport<f64>, usize), String> {
    let diag = cell_diagnostics(cfg);
    let rel_tol = cfg
        .pinv_rel_tol
        .unwrap_or_else(|| default_rel_tol::<f64>(cfg.n, cfg.s));
    try_replicate(cfg, &diag, cell_index, replicate, rel_tol)
}

/// Run one replicate of one cell; numerical failures become a failed row
/// rather than an error so a sweep keeps going.
pub fn run_replicate(
    cfg: &ExperimentConfig,
    cell_index: u64,
    replicate: usize,
    timing: bool,
) -> ResultRow {
    let diag = cell_diagnostics(cfg);
    run_replicate_with(cfg, &diag, cell_index, replicate, timing)
}

fn run_replicate_with(
    cfg: &ExperimentConfig,
    diag: &CellDiagnostics,
    cell_index: u64,
    replicate: usize,
    timing: bool,
) -> ResultRow {
    let rel_tol = cfg
        .pinv_rel_tol
        .unwrap_or_else(|| default_rel_tol::<f64>(cfg.n, cfg.s));
    let started = Instant::now();
    let outcome = try_replicate(cfg, diag, cell_index, replicate, rel_tol);
    let runtime_ms = if timing {
        started.elapsed().as_millis() as u64
    } else {
        0
    };
    let (b_r, v_r, mc_risk, mc_stderr, numerical_rank, status) = match outcome {
        Ok((report, rank)) => (
            report.bias,
            report.variance,
            report.mc_risk,
            report.mc_stderr,
            rank,
            RowStatus::Ok,
        ),
        Err(reason) => (
            f64::NAN,
            f64::NAN,
            f64::NAN,
            f64::NAN,
            0,
            RowStatus::Failed(reason),
        ),
    };
    ResultRow {
        config: cfg.clone(),
        replicate,
        kstar: diag.kstar.kstar,
        kstar_analytic: diag.kstar.analytic_prediction,
        cond4_holds: diag.kstar.kstar.is_some(),
        b_r,
        v_r,
        r: b_r + v_r,
        mc_risk,
        mc_stderr,
        v_upper_ref: diag.sheet.v_upper,
        v_lower_ref: diag.sheet.v_lower,
        b_upper_ref: diag.sheet.b_upper,
        numerical_rank,
        pinv_rel_tol_used: rel_tol,
        runtime_ms,
        status,
    }
}

/// Run every replicate of one cell, in replicate order.
pub fn run_cell(cfg: &ExperimentConfig, cell_index: u64, timing: bool) -> Vec<ResultRow> {
    let diag = cell_diagnostics(cfg);
    (0..cfg.replicates)
        .map(|rep| run_replicate_with(cfg, &diag, cell_index, rep, timing))
        .collect()
}

/// Execute one configuration (a single grid cell at index 0).
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    run_cell(cfg, 0, false)
}

/// Serialize rows as the fixed-schema CSV document.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_config() -> ExperimentConfig {
        parse_config(
            "n = 40\nd = 6\ns = 90\ngamma = 2\nzeta = 1\nm_test = 120\nm_eps = 8\nreplicates = 2\nmaster_seed = 5\n",
        )
        .unwrap()
    }

    #[test]
    fn rows_are_deterministic_and_complete() {
        let cfg = small_config();
        let a = run_experiment(&cfg);
        let b = run_experiment(&cfg);
        assert_eq!(a.len(), 2);
        let csv_a = rows_to_csv(&a);
        let csv_b = rows_to_csv(&b);
        assert_eq!(csv_a, csv_b, "same config and seed must give identical bytes");
        assert!(a.iter().all(|r| r.status == RowStatus::Ok));
        assert!(a.iter().all(|r| r.runtime_ms == 0));
        // Replicates see different draws.
        assert_ne!(a[0].b_r, a[1].b_r);
    }

    #[test]
    fn header_field_count_matches_rows() {
        let cfg = small_config();
        let rows = run_experiment(&cfg);
        let header_fields = CSV_HEADER.split(',').count();
        for row in &rows {
            assert_eq!(row.csv_line().split(',').count(), header_fields);
        }
        assert_eq!(header_fields, 34);
    }

    #[test]
    fn interpolating_fit_has_full_rank_and_positive_variance() {
        // s > n with generic data: the fit interpolates, rank = n.
        let cfg = small_config();
        let rows = run_experiment(&cfg);
        for row in &rows {
            assert_eq!(row.numerical_rank, cfg.n);
            assert!(row.v_r > 0.0 && row.v_r.is_finite());
            assert!(row.b_r >= 0.0);
            assert!((row.r - (row.b_r + row.v_r)).abs() <= 1e-15 * row.r.abs());
        }
    }

    #[test]
    fn zero_label_noise_makes_mc_risk_equal_bias() {
        let cfg = parse_config(
            "n = 30\nd = 5\ns = 80\ngamma = 2\nzeta = 1\nsigma0_sq = 0\nm_test = 100\nm_eps = 6\n",
        )
        .unwrap();
        let rows = run_experiment(&cfg);
        let row = &rows[0];
        assert_eq!(row.v_r, 0.0);
        assert!(row.b_r > 0.0, "row-space bias persists without label noise");
        assert!(
            (row.mc_risk - row.b_r).abs() <= 1e-12 * row.b_r.max(1.0),
            "with zero noise the Monte Carlo risk is the bias exactly"
        );
        assert!(row.mc_stderr <= 1e-14);
    }
}
