//! Monte Carlo ensembles over independent growth trajectories.
//!
//! Trial `i` grows its own graph from seed `mix_seed(base_seed, i)` and is
//! observed at a geometric checkpoint schedule. Trials run on the rayon pool
//! and are collected in trial order, so every table and file produced here
//! is a function of the configuration alone.

mod output;
mod persistence;
mod residuals;
mod summary;
mod tail;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{scaling_exponent, ModelParams};
use crate::error::{Error, Result};
use crate::graph::GrowthState;
use crate::seed::mix_seed;

pub use output::{write_mbrw_csv, Manifest, TOOL_VERSION};
pub use persistence::{
    persistence_experiment, persistence_table, PersistenceRow, PersistenceTable,
};
pub use residuals::{residual_table, susceptibility_residuals, ResidualRow, ResidualTable};
pub use summary::{summarize, CheckpointSummary, EnsembleSummary};
pub use tail::{tail_experiment, tail_table, TailRow, TailTable};

/// Ten to the quarter: four checkpoints per decade.
pub const DEFAULT_CHECKPOINT_RATIO: f64 = 1.778_279_410_038_922_8;
pub const DEFAULT_FIRST_CHECKPOINT: u64 = 100;
pub const DEFAULT_TRUNCATION_LEVELS: [u64; 3] = [10, 100, 1000];
pub const DEFAULT_K_PERSISTENCE: u64 = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    pub n_max: u64,
    pub trials: u64,
    pub base_seed: u64,
    pub checkpoint_ratio: f64,
    /// First checkpoint `n_0`.
    pub first_checkpoint: u64,
    /// Truncation levels `L` for `S_{2,L}`.
    pub levels: Vec<u64>,
    pub k_persistence: u64,
    pub output_dir: Option<PathBuf>,
}

impl EnsembleConfig {
    pub fn new(params: ModelParams, n_max: u64, trials: u64, base_seed: u64) -> Self {
        Self {
            params,
            n_max,
            trials,
            base_seed,
            checkpoint_ratio: DEFAULT_CHECKPOINT_RATIO,
            first_checkpoint: DEFAULT_FIRST_CHECKPOINT,
            levels: DEFAULT_TRUNCATION_LEVELS.to_vec(),
            k_persistence: DEFAULT_K_PERSISTENCE,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_max == 0 || self.n_max > u64::from(u32::MAX) {
            return bad(format!("n_max = {} is outside [1, 2^32 - 1]", self.n_max));
        }
        if !(self.checkpoint_ratio > 1.0 && self.checkpoint_ratio.is_finite()) {
            return bad(format!(
                "checkpoint ratio {} must exceed 1",
                self.checkpoint_ratio
            ));
        }
        if self.first_checkpoint == 0 {
            return bad("first checkpoint must be at least 1".into());
        }
        if self.levels.contains(&0) {
            return bad("truncation levels must be positive".into());
        }
        Ok(())
    }

    /// `ceil(n_0 r^k)` below `n_max`, deduplicated, then `n_max` itself.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        let mut k = 0;
        loop {
            let x = self.first_checkpoint as f64 * self.checkpoint_ratio.powi(k);
            // Shave rounding noise so exact decades land on themselves.
            let n = (x * (1.0 - 1e-12)).ceil() as u64;
            if n >= self.n_max {
                break;
            }
            if out.last().is_none_or(|&last| n > last) {
                out.push(n);
            }
            k += 1;
        }
        out.push(self.n_max);
        out
    }

    /// Levels sorted and deduplicated, the column order used in files.
    pub fn sorted_levels(&self) -> Vec<u64> {
        let mut levels = self.levels.clone();
        levels.sort_unstable();
        levels.dedup();
        levels
    }

    pub fn scaling_exponent(&self) -> f64 {
        scaling_exponent(&self.params)
    }
}

/// One trial observed at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub trial: u64,
    pub n: u64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    /// Aligned with [`EnsembleConfig::sorted_levels`].
    pub s2_trunc: Vec<f64>,
    pub max_size: u64,
    pub max_oldest: u64,
    pub c1_size: u64,
    pub rescaled_c1: f64,
    pub rescaled_max: f64,
}

/// A full trajectory plus the final component-size histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub records: Vec<TrajectoryRecord>,
    pub final_histogram: BTreeMap<u64, u64>,
}

/// Raw output of an ensemble, trials in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun {
    pub checkpoints: Vec<u64>,
    pub levels: Vec<u64>,
    pub alpha: f64,
    pub trials: Vec<TrialRun>,
}

impl EnsembleRun {
    /// Records sorted by `(trial, n)`.
    pub fn records(&self) -> impl Iterator<Item = &TrajectoryRecord> {
        self.trials.iter().flat_map(|t| t.records.iter())
    }

    /// Column `k` of the trials-by-checkpoints table.
    pub fn at_checkpoint(&self, index: usize) -> impl Iterator<Item = &TrajectoryRecord> {
        self.trials.iter().map(move |t| &t.records[index])
    }
}

pub fn run_trial(config: &EnsembleConfig, trial: u64) -> Result<TrialRun> {
    let levels = config.sorted_levels();
    let alpha = config.scaling_exponent();
    let mut state = GrowthState::new(config.params, mix_seed(config.base_seed, trial));
    let mut records = Vec::new();
    let mut final_histogram = BTreeMap::new();
    for n in config.checkpoints() {
        state.run_to(n)?;
        let snap = state.snapshot(&levels);
        let scale = (n as f64).powf(-alpha);
        records.push(TrajectoryRecord {
            trial,
            n,
            s2: snap.s2,
            s3: snap.s3,
            s4: snap.s4,
            s2_trunc: levels.iter().map(|l| snap.s2_trunc[l]).collect(),
            max_size: snap.max_size,
            max_oldest: snap.max_oldest,
            c1_size: snap.c1_size,
            rescaled_c1: scale * snap.c1_size as f64,
            rescaled_max: scale * snap.max_size as f64,
        });
        final_histogram = snap.histogram;
    }
    Ok(TrialRun {
        records,
        final_histogram,
    })
}

/// Runs every trial of the ensemble (on the current rayon pool).
pub fn run_trajectories(config: &EnsembleConfig) -> Result<EnsembleRun> {
    config.validate()?;
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            run_trial(config, i).map_err(|e| Error::TrialFailed {
                trial: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleRun {
        checkpoints: config.checkpoints(),
        levels: config.sorted_levels(),
        alpha: config.scaling_exponent(),
        trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutput {
    pub run: EnsembleRun,
    pub summary: EnsembleSummary,
}

/// Runs the ensemble and, when `output_dir` is set, writes
/// `trajectory.csv`, `rescaled_max.csv`, `summary.csv` and `manifest.json`.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleOutput> {
    let run = run_trajectories(config)?;
    let summary = summarize(&run, config.k_persistence);
    if let Some(dir) = &config.output_dir {
        output::prepare_dir(dir)?;
        output::write_trajectory_csv(&dir.join("trajectory.csv"), &run)?;
        output::write_rescaled_max_csv(&dir.join("rescaled_max.csv"), &run)?;
        output::write_summary_csv(&dir.join("summary.csv"), &summary)?;
        Manifest::for_ensemble(config).write(&dir.join("manifest.json"))?;
    }
    Ok(EnsembleOutput { run, summary })
}

/// Runs `op` on a dedicated pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<T, F>(threads: Option<usize>, op: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        None => Ok(op()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()?;
            Ok(pool.install(op))
        }
    }
}
