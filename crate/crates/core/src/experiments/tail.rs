use std::collections::BTreeSet;

use serde::Serialize;

use super::{output, run_trajectories, EnsembleConfig, EnsembleRun, Manifest};
use crate::error::Result;
use crate::stats::mean_stderr;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub k: u64,
    /// `P(|C(o_n)| >= k)` for a uniform vertex `o_n`, averaged over trials.
    pub ccdf: f64,
    pub stderr: f64,
    /// `k^(-1/alpha)`, for visual comparison only.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailTable {
    pub alpha: f64,
    /// `-1/alpha`; absent when `alpha = 0`.
    pub reference_slope: Option<f64>,
    pub rows: Vec<TailRow>,
}

fn reference(k: u64, alpha: f64) -> f64 {
    if alpha > 0.0 {
        (k as f64).powf(-1.0 / alpha)
    } else if k <= 1 {
        1.0
    } else {
        0.0
    }
}

/// Size-biased CCDF at the final checkpoint, evaluated at every component
/// size seen in any trial.
pub fn tail_table(run: &EnsembleRun) -> TailTable {
    let n = run.checkpoints.last().copied().unwrap_or(1) as f64;
    let sizes: BTreeSet<u64> = run
        .trials
        .iter()
        .flat_map(|t| t.final_histogram.keys().copied())
        .collect();

    // Per trial, mass of vertices in components of size >= k for each k,
    // from a descending cumulative sum.
    let per_trial: Vec<Vec<f64>> = run
        .trials
        .iter()
        .map(|t| {
            let mut out = vec![0.0; sizes.len()];
            let mut acc = 0u64;
            let mut hist = t.final_histogram.iter().rev().peekable();
            for (j, &k) in sizes.iter().enumerate().rev() {
                while let Some((&size, &count)) = hist.peek() {
                    if size < k {
                        break;
                    }
                    acc += size * count;
                    hist.next();
                }
                out[j] = acc as f64 / n;
            }
            out
        })
        .collect();

    let rows = sizes
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let column: Vec<f64> = per_trial.iter().map(|v| v[j]).collect();
            let ms = mean_stderr(&column);
            TailRow {
                k,
                ccdf: ms.mean,
                stderr: ms.stderr,
                reference: reference(k, run.alpha),
            }
        })
        .collect();
    TailTable {
        alpha: run.alpha,
        reference_slope: (run.alpha > 0.0).then(|| -1.0 / run.alpha),
        rows,
    }
}

/// Writes `tail.csv` and `manifest.json` when an output directory is set.
pub fn tail_experiment(config: &EnsembleConfig) -> Result<TailTable> {
    let run = run_trajectories(config)?;
    let table = tail_table(&run);
    if let Some(dir) = &config.output_dir {
        output::prepare_dir(dir)?;
        output::write_tail_csv(&dir.join("tail.csv"), &table)?;
        Manifest::for_ensemble(config).write(&dir.join("manifest.json"))?;
    }
    Ok(table)
}
