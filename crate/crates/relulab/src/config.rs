//! Flat key=value configuration files and sweep grids.
//!
//! A config file is structured text with one `key = value` per line, `#`
//! comments, and exactly the experiment field names as keys; unknown keys
//! are hard errors so a typo in a sweep axis cannot silently fix itself to
//! a default. A comma-separated value list turns that key into a sweep
//! axis; the grid is the cartesian product of all axes in order of
//! appearance (first axis slowest), capped at [`GRID_CELL_CAP`] cells.

use relulab_core::synth::{ceil_pow, CovariateDist, SpectrumKind};
use std::collections::BTreeMap;
use thiserror::Error;

/// Maximum number of grid cells a sweep may expand to.
pub const GRID_CELL_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown configuration key '{key}'")]
    UnknownKey { key: String },
    #[error("configuration key '{key}' appears more than once")]
    DuplicateKey { key: String },
    #[error("missing required configuration key '{key}'")]
    MissingKey { key: &'static str },
    #[error("exactly one of '{a}' and '{b}' must be given")]
    ExactlyOneOf { a: &'static str, b: &'static str },
    #[error("invalid value '{value}' for key '{key}': {why}")]
    InvalidValue {
        key: &'static str,
        value: String,
        why: String,
    },
    #[error("line {line} is not 'key = value': '{text}'")]
    Malformed { line: usize, text: String },
    #[error("sweep grid has {cells} cells, above the cap of {cap}")]
    GridTooLarge { cells: usize, cap: usize },
    #[error("key '{key}' lists multiple values; lists are only valid in sweep grids")]
    NotScalar { key: String },
}

pub type Result<T> = std::result::Result<T, ConfigError>;

/// Where the label-generating features come from: the noisy design the fit
/// sees, or the clean features of the uncorrupted covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelsFrom {
    Noisy,
    Clean,
}

impl LabelsFrom {
    pub fn name(&self) -> &'static str {
        match self {
            LabelsFrom::Noisy => "noisy",
            LabelsFrom::Clean => "clean",
        }
    }
}

/// One fully resolved experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Ambient covariate dimension; derived as `ceil(n^alpha)` when `alpha`
    /// is given. Always `< n`.
    pub d: usize,
    /// The exponent that derived `d`, when one was given.
    pub alpha: Option<f64>,
    /// Feature count; derived as `ceil(n^kappa)` when `kappa` is given.
    pub s: usize,
    /// The exponent that derived `s`, when one was given.
    pub kappa: Option<f64>,
    pub kind: SpectrumKind,
    pub covariate_dist: CovariateDist,
    pub labels_from: LabelsFrom,
    pub zeta: f64,
    pub sigma0_sq: f64,
    pub m_test: usize,
    pub m_eps: usize,
    pub replicates: usize,
    pub master_seed: u64,
    /// Override for the pseudoinverse truncation tolerance; `None` uses the
    /// shape-scaled default.
    pub pinv_rel_tol: Option<f64>,
    /// Tail-ratio condition constant.
    pub b: f64,
    /// Confidence parameter for the reference bound curves.
    pub delta: f64,
}

impl ExperimentConfig {
    /// Polynomial decay exponent, when the spectrum has one.
    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            SpectrumKind::Polynomial { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Spectrum rank, when the spectrum is finite-rank.
    pub fn rank(&self) -> Option<usize> {
        match self.kind {
            SpectrumKind::FiniteRank { rank } => Some(rank),
            _ => None,
        }
    }
}

/// A parsed sweep: the base cell (every axis at its first value) plus the
/// axes, expanded to the full cell list in row-major order.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub base: ExperimentConfig,
    /// Multi-valued keys in order of appearance, with their raw values.
    pub axes: Vec<(String, Vec<String>)>,
    /// Fully expanded cells in row-major order (first axis slowest).
    pub cells: Vec<ExperimentConfig>,
}

const KNOWN_KEYS: [&str; 19] = [
    "n",
    "alpha",
    "d",
    "s",
    "kappa",
    "gamma",
    "rank",
    "zeta",
    "sigma0_sq",
    "spectrum_kind",
    "covariate_dist",
    "labels_from",
    "m_test",
    "m_eps",
    "replicates",
    "master_seed",
    "pinv_rel_tol",
    "b",
    "delta",
];

/// Parse a single-cell configuration; any list-valued key is an error.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let grid = parse_grid(text)?;
    if let Some((key, _)) = grid.axes.first() {
        return Err(ConfigError::NotScalar { key: key.clone() });
    }
    Ok(grid.base)
}

/// Parse a sweep grid and expand its cells.
pub fn parse_grid(text: &str) -> Result<SweepGrid> {
    let pairs = tokenize(text)?;
    let axes: Vec<(String, Vec<String>)> = pairs
        .iter()
        .filter(|(_, vals)| vals.len() > 1)
        .map(|(k, vals)| (k.clone(), vals.clone()))
        .collect();
    let cell_count: usize = axes.iter().map(|(_, v)| v.len()).product();
    if cell_count > GRID_CELL_CAP {
        return Err(ConfigError::GridTooLarge {
            cells: cell_count,
            cap: GRID_CELL_CAP,
        });
    }

    // Row-major expansion: first axis slowest, last axis fastest.
    let mut cells = Vec::with_capacity(cell_count);
    let mut indices = vec![0usize; axes.len()];
    loop {
        let mut assignment: BTreeMap<&str, &str> = BTreeMap::new();
        for (key, vals) in &pairs {
            if vals.len() == 1 {
                assignment.insert(key.as_str(), vals[0].as_str());
            }
        }
        for (axis_i, (key, vals)) in axes.iter().enumerate() {
            assignment.insert(key.as_str(), vals[indices[axis_i]].as_str());
        }
        cells.push(build_config(&assignment)?);
        // Odometer increment, last axis fastest.
        let mut pos = axes.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < axes[pos].1.len() {
                break;
            }
            indices[pos] = 0;
            if pos == 0 {
                pos = usize::MAX; // full wrap: done
                break;
            }
        }
        if axes.is_empty() || pos == usize::MAX {
            break;
        }
    }
    Ok(SweepGrid {
        base: cells[0].clone(),
        axes,
        cells,
    })
}

/// Split the file into ordered `(key, values)` pairs, enforcing known and
/// unique keys.
fn tokenize(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut pairs: Vec<(String, Vec<String>)> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Malformed {
            line: line_no + 1,
            text: raw.trim().to_string(),
        })?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key });
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::DuplicateKey { key });
        }
        let values: Vec<String> = value
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(ConfigError::Malformed {
                line: line_no + 1,
                text: raw.trim().to_string(),
            });
        }
        pairs.push((key, values));
    }
    Ok(pairs)
}

fn parse_num<T: std::str::FromStr>(
    map: &BTreeMap<&str, &str>,
    key: &'static str,
) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| ConfigError::InvalidValue {
            key,
            value: raw.to_string(),
            why: "not a valid number".to_string(),
        }),
    }
}

fn invalid(key: &'static str, value: impl ToString, why: impl ToString) -> ConfigError {
    ConfigError::InvalidValue {
        key,
        value: value.to_string(),
        why: why.to_string(),
    }
}

/// Resolve one assignment of scalar values into a validated config.
fn build_config(map: &BTreeMap<&str, &str>) -> Result<ExperimentConfig> {
    let n: usize = parse_num(map, "n")?.ok_or(ConfigError::MissingKey { key: "n" })?;
    if n < 2 {
        return Err(invalid("n", n, "need at least 2 samples"));
    }

    let alpha: Option<f64> = parse_num(map, "alpha")?;
    let d_given: Option<usize> = parse_num(map, "d")?;
    let d = match (alpha, d_given) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(ConfigError::ExactlyOneOf { a: "alpha", b: "d" })
        }
        (Some(a), None) => {
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid("alpha", a, "must lie in (0, 1)"));
            }
            ceil_pow(n, a)
        }
        (None, Some(d)) => d,
    };
    if d == 0 || d >= n {
        return Err(invalid(
            "d",
            d,
            format!("dimension must satisfy 1 <= d < n = {n}"),
        ));
    }

    let kappa: Option<f64> = parse_num(map, "kappa")?;
    let s_given: Option<usize> = parse_num(map, "s")?;
    let s = match (kappa, s_given) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(ConfigError::ExactlyOneOf { a: "kappa", b: "s" })
        }
        (Some(k), None) => {
            if !(k > 0.0) {
                return Err(invalid("kappa", k, "must be positive"));
            }
            ceil_pow(n, k)
        }
        (None, Some(s)) => s,
    };
    if s == 0 {
        return Err(invalid("s", s, "need at least one feature"));
    }

    let zeta: f64 = parse_num(map, "zeta")?.ok_or(ConfigError::MissingKey { key: "zeta" })?;
    if !(zeta >= 1.0) {
        return Err(invalid("zeta", zeta, "covariate-noise exponent must be >= 1"));
    }

    let kind_name = map.get("spectrum_kind").copied().unwrap_or("polynomial");
    let gamma: Option<f64> = parse_num(map, "gamma")?;
    let rank: Option<usize> = parse_num(map, "rank")?;
    let kind = match kind_name {
        "polynomial" => {
            let g = gamma.ok_or(ConfigError::MissingKey { key: "gamma" })?;
            if !(g > 1.0) {
                return Err(invalid("gamma", g, "polynomial decay needs gamma > 1"));
            }
            SpectrumKind::Polynomial { gamma: g }
        }
        "exponential" => SpectrumKind::Exponential,
        "finite_rank" => {
            let r = rank.ok_or(ConfigError::MissingKey { key: "rank" })?;
            if r == 0 || r > d {
                return Err(invalid("rank", r, format!("must satisfy 1 <= rank <= d = {d}")));
            }
            SpectrumKind::FiniteRank { rank: r }
        }
        other => {
            return Err(invalid(
                "spectrum_kind",
                other,
                "expected polynomial | exponential | finite_rank",
            ))
        }
    };
    if matches!(kind, SpectrumKind::FiniteRank { .. }) && gamma.is_some() {
        return Err(invalid("gamma", gamma.unwrap(), "gamma does not apply to finite_rank"));
    }
    if !matches!(kind, SpectrumKind::FiniteRank { .. }) && rank.is_some() {
        return Err(invalid(
            "rank",
            rank.unwrap(),
            "rank applies only to spectrum_kind = finite_rank",
        ));
    }

    let covariate_dist = match map.get("covariate_dist").copied().unwrap_or("gaussian") {
        "gaussian" => CovariateDist::Gaussian,
        "rademacher" => CovariateDist::Rademacher,
        other => {
            return Err(invalid(
                "covariate_dist",
                other,
                "expected gaussian | rademacher",
            ))
        }
    };
    let labels_from = match map.get("labels_from").copied().unwrap_or("noisy") {
        "noisy" => LabelsFrom::Noisy,
        "clean" => LabelsFrom::Clean,
        other => return Err(invalid("labels_from", other, "expected noisy | clean")),
    };

    let sigma0_sq: f64 = parse_num(map, "sigma0_sq")?.unwrap_or(1.0);
    if !(sigma0_sq >= 0.0) {
        return Err(invalid("sigma0_sq", sigma0_sq, "label-noise variance must be >= 0"));
    }
    let m_test: usize = parse_num(map, "m_test")?.unwrap_or(2_000);
    if m_test == 0 {
        return Err(invalid("m_test", m_test, "need at least one test point"));
    }
    let m_eps: usize = parse_num(map, "m_eps")?.unwrap_or(200);
    if m_eps < 3 {
        return Err(invalid(
            "m_eps",
            m_eps,
            "Monte Carlo noise draws must be >= 3 (jackknife needs K-2 > 0)",
        ));
    }
    let replicates: usize = parse_num(map, "replicates")?.unwrap_or(1);
    if replicates == 0 {
        return Err(invalid("replicates", replicates, "need at least one replicate"));
    }
    let master_seed: u64 = parse_num(map, "master_seed")?.unwrap_or(0);
    let pinv_rel_tol: Option<f64> = parse_num(map, "pinv_rel_tol")?;
    if let Some(t) = pinv_rel_tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid("pinv_rel_tol", t, "must lie in (0, 1)"));
        }
    }
    let b: f64 = parse_num(map, "b")?.unwrap_or(4.0);
    if !(b > 1.0) {
        return Err(invalid("b", b, "condition constant must exceed 1"));
    }
    let delta: f64 = parse_num(map, "delta")?.unwrap_or(0.05);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", delta, "must lie in (0, 1)"));
    }

    Ok(ExperimentConfig {
        n,
        d,
        alpha,
        s,
        kappa,
        kind,
        covariate_dist,
        labels_from,
        zeta,
        sigma0_sq,
        m_test,
        m_eps,
        replicates,
        master_seed,
        pinv_rel_tol,
        b,
        delta,
    })
}
