//! Human-readable pre-flight diagnostics for one configuration: spectrum
//! shape, tail-ratio index, convergence-regime verdicts, and the closed-form
//! reference curves — everything worth knowing before spending compute.

use crate::config::ExperimentConfig;
use relulab_core::spectral::{bound_sheet, classify_regime, kstar_report};
use relulab_core::synth::{make_spectrum, noise_variance, noisy_spectrum, trace, SpectrumKind};
use std::fmt::Write;

fn head_tail(values: &[f64], k: usize) -> String {
    if values.len() <= 2 * k {
        return values
            .iter()
            .map(|v| format!("{v:.6e}"))
            .collect::<Vec<_>>()
            .join(", ");
    }
    let head = values[..k]
        .iter()
        .map(|v| format!("{v:.6e}"))
        .collect::<Vec<_>>()
        .join(", ");
    let tail = values[values.len() - k..]
        .iter()
        .map(|v| format!("{v:.6e}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!("{head}, ..., {tail}")
}

/// Render the diagnostics document for a validated configuration.
pub fn diagnose(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let w = &mut out;

    writeln!(w, "=== configuration ===").unwrap();
    writeln!(w, "n = {}", cfg.n).unwrap();
    match cfg.alpha {
        Some(a) => writeln!(w, "d = {} (ceil(n^{a}))", cfg.d).unwrap(),
        None => writeln!(w, "d = {} (explicit)", cfg.d).unwrap(),
    }
    match cfg.kappa {
        Some(k) => writeln!(w, "s = {} (ceil(n^{k}))", cfg.s).unwrap(),
        None => writeln!(w, "s = {} (explicit)", cfg.s).unwrap(),
    }
    writeln!(w, "spectrum_kind = {}", cfg.kind.name()).unwrap();
    if let Some(g) = cfg.gamma() {
        writeln!(w, "gamma = {g}").unwrap();
    }
    if let Some(r) = cfg.rank() {
        writeln!(w, "rank = {r}").unwrap();
    }
    writeln!(w, "zeta = {}", cfg.zeta).unwrap();
    writeln!(w, "sigma0_sq = {}", cfg.sigma0_sq).unwrap();
    writeln!(w, "covariate_dist = {}", cfg.covariate_dist.name()).unwrap();
    writeln!(w, "labels_from = {}", cfg.labels_from.name()).unwrap();
    writeln!(
        w,
        "m_test = {}, m_eps = {}, replicates = {}, master_seed = {}",
        cfg.m_test, cfg.m_eps, cfg.replicates, cfg.master_seed
    )
    .unwrap();
    writeln!(w, "b = {}, delta = {}", cfg.b, cfg.delta).unwrap();

    let spectrum: Vec<f64> = make_spectrum(cfg.kind, cfg.d).expect("validated config");
    let sigma_xi_sq: f64 = noise_variance(cfg.d, cfg.zeta);
    let lambda_xi = noisy_spectrum(&spectrum, sigma_xi_sq);
    let trace_sigma = trace(&spectrum);

    writeln!(w, "\n=== covariate spectrum ===").unwrap();
    writeln!(w, "trace = {trace_sigma:.6e}").unwrap();
    writeln!(w, "eigenvalues: {}", head_tail(&spectrum, 5)).unwrap();
    writeln!(
        w,
        "covariate-noise variance sigma_xi^2 = d^-zeta = {sigma_xi_sq:.6e}"
    )
    .unwrap();
    writeln!(w, "noisy eigenvalues: {}", head_tail(&lambda_xi, 5)).unwrap();

    writeln!(w, "\n=== tail-ratio index (condition constant b = {}) ===", cfg.b).unwrap();
    let ks = kstar_report(cfg.kind, &lambda_xi, cfg.d, cfg.b);
    match ks.kstar {
        Some(k) => {
            writeln!(w, "k* = {k} (condition holds)").unwrap();
            if let Some(ratio) = ks.tail_ratio_at_kstar {
                writeln!(
                    w,
                    "tail ratio at k*: {ratio:.6e} (required >= d/b = {:.6e})",
                    cfg.d as f64 / cfg.b
                )
                .unwrap();
            }
        }
        None => writeln!(w, "k* = none (condition holds at no index)").unwrap(),
    }
    match ks.analytic_prediction {
        Some(k) => writeln!(w, "analytic family prediction: {k}").unwrap(),
        None => writeln!(w, "analytic family prediction: none").unwrap(),
    }

    writeln!(w, "\n=== convergence regime ===").unwrap();
    match (cfg.alpha, cfg.kappa) {
        (Some(alpha), Some(kappa)) => match classify_regime(cfg.kind, alpha, cfg.zeta, kappa) {
            Ok(label) => {
                writeln!(w, "scenario = {}", label.scenario).unwrap();
                writeln!(w, "bias case = {}", label.bias_case.name()).unwrap();
                if let Some(t) = label.zeta_threshold {
                    writeln!(
                        w,
                        "bias threshold: zeta must exceed 4 - 2/alpha = {t} (strict)"
                    )
                    .unwrap();
                }
                writeln!(
                    w,
                    "bias converges: {} | variance converges (kappa < 1 + alpha): {}",
                    label.bias_converges, label.variance_converges
                )
                .unwrap();
            }
            Err(e) => writeln!(w, "not classified: {e}").unwrap(),
        },
        _ => writeln!(
            w,
            "not classified: regime verdicts need both growth exponents (alpha and kappa); \
explicit d or s pins a single size instead of a growth path"
        )
        .unwrap(),
    }
    if let SpectrumKind::Polynomial { gamma } = cfg.kind {
        if cfg.zeta >= gamma {
            writeln!(
                w,
                "warning: zeta = {} >= gamma = {gamma}; the covariate noise decays at least \
as fast as the spectrum, so the noisy tail may fail the variance condition",
                cfg.zeta
            )
            .unwrap();
        }
    }

    writeln!(w, "\n=== reference curves (constant c = 1) ===").unwrap();
    let sheet = bound_sheet(
        cfg.sigma0_sq,
        trace_sigma,
        cfg.s,
        cfg.n,
        cfg.d,
        sigma_xi_sq.sqrt(),
        cfg.delta,
        1.0,
    );
    writeln!(w, "variance upper = {:.6e}", sheet.v_upper).unwrap();
    writeln!(w, "variance lower = {:.6e}", sheet.v_lower).unwrap();
    writeln!(
        w,
        "bias upper     = {:.6e} (delta = {})",
        sheet.b_upper, cfg.delta
    )
    .unwrap();

    out
}
