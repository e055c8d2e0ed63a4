//! Parallel execution of a configuration grid with deterministic,
//! worker-count-independent output.

use crate::config::SweepGrid;
use crate::experiment::{run_replicate, ResultRow, RowStatus, CSV_HEADER, COLUMN_NOTES};
use std::io::{self, Write};
use std::path::Path;

/// What a sweep produced, beyond the file itself.
#[derive(Debug)]
pub struct SweepSummary {
    pub rows_written: usize,
    /// (cell index, replicate, reason) for every failed replicate.
    pub failures: Vec<(usize, usize, String)>,
}

/// Run every (cell, replicate) task of the grid and return rows sorted by
/// (cell, replicate). Each task reseeds from (master_seed, cell, replicate),
/// so the schedule has no effect on the numbers: any worker count produces
/// byte-identical output.
pub fn run_grid(grid: &SweepGrid, workers: usize, timing: bool) -> Vec<(usize, usize, ResultRow)> {
    let mut tasks: Vec<(usize, usize)> = Vec::new();
    for (cell_idx, cfg) in grid.cells.iter().enumerate() {
        for rep in 0..cfg.replicates {
            tasks.push((cell_idx, rep));
        }
    }

    let run_task = |&(cell_idx, rep): &(usize, usize)| {
        let cfg = &grid.cells[cell_idx];
        (cell_idx, rep, run_replicate(cfg, cell_idx as u64, rep, timing))
    };

    let mut rows: Vec<(usize, usize, ResultRow)> = if workers <= 1 {
        tasks.iter().map(run_task).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool construction");
        pool.install(|| {
            use rayon::prelude::*;
            tasks.par_iter().map(run_task).collect()
        })
    };
    rows.sort_by_key(|&(cell, rep, _)| (cell, rep));
    rows
}

fn serialize(rows: &[(usize, usize, ResultRow)]) -> (String, Vec<(usize, usize, String)>) {
    let mut csv = String::with_capacity(64 + rows.len() * 256);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    let mut failures = Vec::new();
    for (cell, rep, row) in rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
        if let RowStatus::Failed(reason) = &row.status {
            failures.push((*cell, *rep, reason.clone()));
        }
    }
    (csv, failures)
}

/// Run the grid and return the CSV document as a string.
pub fn run_sweep_to_string(grid: &SweepGrid, workers: usize, timing: bool) -> String {
    serialize(&run_grid(grid, workers, timing)).0
}

/// Run the grid, writing `<out>` (CSV) and `<out>.columns.txt` (schema notes).
/// The output file is created before any computation so an unwritable path
/// fails fast instead of after minutes of work.
pub fn run_sweep(
    grid: &SweepGrid,
    out: &Path,
    workers: usize,
    timing: bool,
) -> io::Result<SweepSummary> {
    let mut file = std::fs::File::create(out)?;
    let notes_path = {
        let mut name = out.as_os_str().to_owned();
        name.push(".columns.txt");
        std::path::PathBuf::from(name)
    };
    std::fs::write(&notes_path, COLUMN_NOTES)?;

    let rows = run_grid(grid, workers, timing);
    let (csv, failures) = serialize(&rows);
    file.write_all(csv.as_bytes())?;
    file.flush()?;
    Ok(SweepSummary {
        rows_written: rows.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_grid;
    use crate::experiment::{rows_to_csv, run_experiment};

    const SMALL_GRID: &str =
        "n = 30, 40\nd = 5\ns = 70\ngamma = 2\nzeta = 1\nm_test = 80\nm_eps = 5\nreplicates = 2\n";

    #[test]
    fn worker_count_does_not_change_output_bytes() {
        let grid = parse_grid(SMALL_GRID).unwrap();
        let serial = run_sweep_to_string(&grid, 1, false);
        let parallel = run_sweep_to_string(&grid, 4, false);
        assert_eq!(serial, parallel);
        assert_eq!(serial.lines().count(), 1 + 4, "header plus 2 cells x 2 reps");
    }

    #[test]
    fn single_cell_grid_matches_run_experiment() {
        let text = "n = 30\nd = 5\ns = 70\ngamma = 2\nzeta = 1\nm_test = 80\nm_eps = 5\nreplicates = 2\n";
        let grid = parse_grid(text).unwrap();
        assert_eq!(grid.cells.len(), 1);
        let via_sweep = run_sweep_to_string(&grid, 1, false);
        let direct = rows_to_csv(&run_experiment(&grid.cells[0]));
        assert_eq!(via_sweep, direct);
    }

    #[test]
    fn sweep_writes_csv_and_column_notes() {
        let dir = std::env::temp_dir().join("relulab_sweep_test");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("rows.csv");
        let grid = parse_grid(SMALL_GRID).unwrap();
        let summary = run_sweep(&grid, &out, 1, false).unwrap();
        assert_eq!(summary.rows_written, 4);
        assert!(summary.failures.is_empty());
        let written = std::fs::read_to_string(&out).unwrap();
        assert!(written.starts_with("n,d,alpha,"));
        assert_eq!(written, run_sweep_to_string(&grid, 1, false));
        let notes = std::fs::read_to_string(dir.join("rows.csv.columns.txt")).unwrap();
        assert!(notes.contains("numerical_rank"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
