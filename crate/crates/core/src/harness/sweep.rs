use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::SweepConfig;
use crate::error::Result;
use crate::qmetric::DistanceReport;
use crate::qscalar::QParam;

/// Column order of the sweep CSV.
pub const CSV_HEADER: [&str; 8] = [
    "q",
    "N",
    "dq_upper",
    "dq_lower",
    "lip_margin",
    "distq_upper",
    "lip_converged",
    "mk_converged",
];

/// One report per `(q, N)` cell in grid order, independent of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<DistanceReport>> {
    cfg.validate()?;
    let cells: Vec<(f64, u32)> = cfg
        .q_grid
        .iter()
        .flat_map(|&q| cfg.n_grid.iter().map(move |&n| (q, n)))
        .collect();
    let eval = |&(q, n): &(f64, u32)| -> Result<DistanceReport> {
        let p = QParam::new(q)?;
        DistanceReport::compute_seeded(n, &p, &cfg.truncation, &cfg.mk, cfg.seed)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| cells.par_iter().map(eval).collect())
}

pub fn write_csv(reports: &[DistanceReport], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
