use serde::Serialize;

use super::EnsembleRun;
use crate::stats::{mean_stderr, proportion};

/// Ensemble statistics at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointSummary {
    pub n: u64,
    pub s2_mean: f64,
    pub s2_stderr: f64,
    pub rescaled_max_mean: f64,
    pub rescaled_max_stderr: f64,
    pub rescaled_c1_mean: f64,
    pub rescaled_c1_stderr: f64,
    /// Fraction of trials with `max_oldest <= K`.
    pub persistence_fraction: f64,
    pub persistence_stderr: f64,
    /// Fraction of trials whose `max_oldest` is unchanged over this and the
    /// two preceding checkpoints (fewer at the start of the schedule).
    pub fixation_fraction: f64,
    pub fixation_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub k_persistence: u64,
    pub trials: u64,
    pub checkpoints: Vec<CheckpointSummary>,
}

pub(crate) fn fixed_over_window(run: &EnsembleRun, index: usize) -> usize {
    let start = index.saturating_sub(2);
    run.trials
        .iter()
        .filter(|t| {
            let last = t.records[index].max_oldest;
            t.records[start..=index]
                .iter()
                .all(|r| r.max_oldest == last)
        })
        .count()
}

pub(crate) fn persistent_count(run: &EnsembleRun, index: usize, k: u64) -> usize {
    run.at_checkpoint(index)
        .filter(|r| r.max_oldest <= k)
        .count()
}

pub fn summarize(run: &EnsembleRun, k_persistence: u64) -> EnsembleSummary {
    let trials = run.trials.len();
    let checkpoints = run
        .checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let column = |f: fn(&super::TrajectoryRecord) -> f64| -> Vec<f64> {
                run.at_checkpoint(i).map(f).collect()
            };
            let s2 = mean_stderr(&column(|r| r.s2));
            let rmax = mean_stderr(&column(|r| r.rescaled_max));
            let rc1 = mean_stderr(&column(|r| r.rescaled_c1));
            let (pf, pse) = proportion(persistent_count(run, i, k_persistence), trials);
            let (ff, fse) = proportion(fixed_over_window(run, i), trials);
            CheckpointSummary {
                n,
                s2_mean: s2.mean,
                s2_stderr: s2.stderr,
                rescaled_max_mean: rmax.mean,
                rescaled_max_stderr: rmax.stderr,
                rescaled_c1_mean: rc1.mean,
                rescaled_c1_stderr: rc1.stderr,
                persistence_fraction: pf,
                persistence_stderr: pse,
                fixation_fraction: ff,
                fixation_stderr: fse,
            }
        })
        .collect();
    EnsembleSummary {
        k_persistence,
        trials: trials as u64,
        checkpoints,
    }
}
