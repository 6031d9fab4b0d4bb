use serde::Serialize;

use super::{output, run_trajectories, EnsembleConfig, EnsembleRun, Manifest};
use crate::analytic::limiting_susceptibility_for;
use crate::error::Result;
use crate::stats::{least_squares, mean_stderr, LinearFit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub n: u64,
    /// Ensemble mean of `|S_2(n) - s_2(inf)|`.
    pub mean_abs_residual: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualTable {
    pub s2_inf: f64,
    pub rows: Vec<ResidualRow>,
    /// Fit of `log residual` against `log n` over the last decade of
    /// checkpoints; absent with fewer than two usable points.
    pub fit: Option<LinearFit>,
    /// `-slope` of the fit.
    pub gamma_hat: Option<f64>,
}

pub fn residual_table(run: &EnsembleRun, s2_inf: f64) -> ResidualTable {
    let rows: Vec<ResidualRow> = run
        .checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let abs: Vec<f64> = run
                .at_checkpoint(i)
                .map(|r| (r.s2 - s2_inf).abs())
                .collect();
            let ms = mean_stderr(&abs);
            ResidualRow {
                n,
                mean_abs_residual: ms.mean,
                stderr: ms.stderr,
            }
        })
        .collect();

    let n_max = run.checkpoints.last().copied().unwrap_or(0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.n as f64 * 10.0 >= n_max as f64 && r.mean_abs_residual > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mean_abs_residual.ln()))
        .unzip();
    let fit = least_squares(&xs, &ys);
    ResidualTable {
        s2_inf,
        rows,
        fit,
        gamma_hat: fit.map(|f| -f.slope),
    }
}

/// Requires a subcritical configuration. Writes `residuals.csv` and
/// `manifest.json` when an output directory is configured.
pub fn susceptibility_residuals(config: &EnsembleConfig) -> Result<ResidualTable> {
    let s2_inf = limiting_susceptibility_for(&config.params)?;
    let run = run_trajectories(config)?;
    let table = residual_table(&run, s2_inf);
    if let Some(dir) = &config.output_dir {
        output::prepare_dir(dir)?;
        output::write_residuals_csv(&dir.join("residuals.csv"), &table)?;
        Manifest::for_ensemble(config).write(&dir.join("manifest.json"))?;
    }
    Ok(table)
}
