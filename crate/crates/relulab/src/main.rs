//! Command-line front end: run single experiments, parallel sweeps,
//! pre-flight diagnostics, concentration checks, and the acceptance suite.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use relulab::acceptance;
use relulab::config::{parse_config, parse_grid, ExperimentConfig, SweepGrid};
use relulab::diagnose::diagnose;
use relulab::experiment::{rows_to_csv, run_experiment};
use relulab::sweep::run_sweep;
use relulab_core::conc_lab::{
    test_deltaz_bound, test_design_gap, test_eigen_bounds, test_matrix_bernstein,
    test_norm_concentration, test_relu_moments, test_subexp_sum, ConcReport, DataModel,
};
use relulab_core::relu_features::FeatureMap;
use relulab_core::synth::{make_spectrum, noise_variance, SpectrumKind};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_CONTRACT: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "relulab",
    about = "Minimum-norm interpolation experiments with random ReLU features",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration and emit CSV rows (stdout unless --out).
    Run {
        /// Configuration file (flat key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configuration's master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the pseudoinverse truncation tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Record wall-clock milliseconds per replicate (off by default so
        /// output bytes are machine-independent).
        #[arg(long)]
        timing: bool,
    },
    /// Run a configuration grid in parallel and write CSV to --out.
    Sweep {
        /// Grid file: key = value lines where comma-separated values
        /// form sweep axes.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; a .columns.txt companion is written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        /// Override master_seed in every cell.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the pseudoinverse truncation tolerance in every cell.
        #[arg(long)]
        tol: Option<f64>,
        /// Record wall-clock milliseconds per replicate.
        #[arg(long)]
        timing: bool,
    },
    /// Print spectrum, tail-index, regime, and reference-curve diagnostics.
    Diagnose {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one concentration check at its reference parameters.
    Conclab {
        /// One of: relu_moments, subexp_sum, norm_concentration,
        /// eigen_bounds, matrix_bernstein, design_gap, deltaz_bound.
        #[arg(long)]
        lemma: String,
        /// RNG seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per batch (drawn-sample count for relu_moments).
        #[arg(long)]
        trials: Option<usize>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Selftest {
        /// Worker threads for the sweep-backed criteria.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn read_file(path: &PathBuf) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })
}

fn apply_overrides(cfg: &mut ExperimentConfig, seed: Option<u64>, tol: Option<f64>) {
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(t) = tol {
        cfg.pinv_rel_tol = Some(t);
    }
}

fn load_config(path: &PathBuf, seed: Option<u64>, tol: Option<f64>) -> Result<ExperimentConfig, u8> {
    let text = read_file(path)?;
    let mut cfg = parse_config(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONTRACT
    })?;
    apply_overrides(&mut cfg, seed, tol);
    Ok(cfg)
}

fn load_grid(path: &PathBuf, seed: Option<u64>, tol: Option<f64>) -> Result<SweepGrid, u8> {
    let text = read_file(path)?;
    let mut grid = parse_grid(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONTRACT
    })?;
    for cell in &mut grid.cells {
        apply_overrides(cell, seed, tol);
    }
    Ok(grid)
}

fn conc_report_csv(report: &ConcReport) -> String {
    let mut out = String::new();
    out.push_str("key,value\n");
    out.push_str(&format!("lemma_id,{}\n", report.lemma_id));
    out.push_str(&format!("trials,{}\n", report.trials));
    out.push_str(&format!(
        "empirical_violation_rate,{:.16e}\n",
        report.empirical_violation_rate
    ));
    out.push_str(&format!("theoretical_rate,{:.16e}\n", report.theoretical_rate));
    out.push_str(&format!("fitted_constant,{:.16e}\n", report.fitted_constant));
    out.push_str(&format!(
        "validation_constant,{:.16e}\n",
        report.validation_constant
    ));
    for (k, v) in &report.aux {
        out.push_str(&format!("aux_{k},{v:.16e}\n"));
    }
    out.push('\n');
    out.push_str("statistic,unit\n");
    for (stat, unit) in &report.envelope_values {
        out.push_str(&format!("{stat:.16e},{unit:.16e}\n"));
    }
    out
}

fn run_conclab(lemma: &str, seed: u64, trials: Option<usize>) -> Result<ConcReport, u8> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let poly = |gamma: f64, d: usize| -> Vec<f64> {
        make_spectrum(SpectrumKind::Polynomial { gamma }, d).expect("valid spectrum")
    };
    let report = match lemma {
        "relu_moments" => test_relu_moments(1.0, 1.0, trials.unwrap_or(100_000), &mut rng),
        "subexp_sum" => {
            let lambdas = poly(2.0, 100);
            test_subexp_sum(&lambdas, 3.0, trials.unwrap_or(10_000), &mut rng)
        }
        "norm_concentration" => {
            test_norm_concentration(0.0, 1.0, 100, 5.0, trials.unwrap_or(10_000), &mut rng)
        }
        "eigen_bounds" => {
            let lambdas = poly(2.0, 50);
            test_eigen_bounds(&lambdas, 100, 10.0, trials.unwrap_or(500), &mut rng)
        }
        "matrix_bernstein" => {
            let spectrum = poly(2.0, 10);
            let model = DataModel::new(&spectrum, noise_variance(10, 1.0));
            let map = FeatureMap::<f64>::sample(100, 10, &mut rng);
            test_matrix_bernstein(&model, &map, 400, 0.05, trials.unwrap_or(500), &mut rng)
        }
        "design_gap" => {
            let spectrum = poly(2.0, 20);
            let model = DataModel::new(&spectrum, noise_variance(20, 1.0));
            let map = FeatureMap::<f64>::sample(200, 20, &mut rng);
            test_design_gap(&model, &map, 200, trials.unwrap_or(500), &mut rng)
        }
        "deltaz_bound" => {
            let spectrum = poly(2.0, 20);
            let model = DataModel::new(&spectrum, noise_variance(20, 1.0));
            let map = FeatureMap::<f64>::sample(100, 20, &mut rng);
            test_deltaz_bound(&model, &map, 200, trials.unwrap_or(500), &mut rng)
        }
        other => {
            eprintln!(
                "error: unknown lemma id '{other}'; expected one of relu_moments, subexp_sum, \
norm_concentration, eigen_bounds, matrix_bernstein, design_gap, deltaz_bound"
            );
            return Err(EXIT_CONTRACT);
        }
    };
    Ok(report)
}

fn write_or_print(text: &str, out: Option<&PathBuf>) -> Result<(), u8> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_IO
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn real_main() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_CONTRACT
                }
            };
        }
    };

    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            tol,
            timing,
        } => {
            let cfg = match load_config(&config, seed, tol) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let rows = if timing {
                relulab::experiment::run_cell(&cfg, 0, true)
            } else {
                run_experiment(&cfg)
            };
            let csv = rows_to_csv(&rows);
            if let Err(code) = write_or_print(&csv, out.as_ref()) {
                return code;
            }
            EXIT_OK
        }
        Command::Sweep {
            config,
            out,
            workers,
            seed,
            tol,
            timing,
        } => {
            let grid = match load_grid(&config, seed, tol) {
                Ok(g) => g,
                Err(code) => return code,
            };
            let workers = workers.unwrap_or_else(default_workers);
            match run_sweep(&grid, &out, workers, timing) {
                Ok(summary) => {
                    println!(
                        "wrote {} rows ({} cells) to {}",
                        summary.rows_written,
                        grid.cells.len(),
                        out.display()
                    );
                    if !summary.failures.is_empty() {
                        println!("{} failed replicates:", summary.failures.len());
                        for (cell, rep, reason) in &summary.failures {
                            println!("  cell {cell} replicate {rep}: {reason}");
                        }
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: sweep output failed: {e}");
                    EXIT_IO
                }
            }
        }
        Command::Diagnose { config } => {
            let cfg = match load_config(&config, None, None) {
                Ok(c) => c,
                Err(code) => return code,
            };
            print!("{}", diagnose(&cfg));
            EXIT_OK
        }
        Command::Conclab {
            lemma,
            seed,
            trials,
            out,
        } => {
            let report = match run_conclab(&lemma, seed.unwrap_or(0), trials) {
                Ok(r) => r,
                Err(code) => return code,
            };
            let csv = conc_report_csv(&report);
            if let Err(code) = write_or_print(&csv, out.as_ref()) {
                return code;
            }
            EXIT_OK
        }
        Command::Selftest { workers } => {
            let workers = workers.unwrap_or_else(default_workers);
            let outcomes = acceptance::run_all(workers);
            let mut all_pass = true;
            for o in &outcomes {
                println!("{}", o.line());
                all_pass &= o.pass;
            }
            if all_pass {
                println!("acceptance suite: all {} criteria passed", outcomes.len());
                EXIT_OK
            } else {
                let failed = outcomes.iter().filter(|o| !o.pass).count();
                println!(
                    "acceptance suite: {failed} of {} criteria failed",
                    outcomes.len()
                );
                EXIT_ACCEPTANCE
            }
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(real_main())
}
