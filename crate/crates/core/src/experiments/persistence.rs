use serde::Serialize;

use super::summary::{fixed_over_window, persistent_count};
use super::{output, run_trajectories, EnsembleConfig, EnsembleRun, Manifest};
use crate::error::Result;
use crate::stats::proportion;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceRow {
    pub n: u64,
    pub k: u64,
    /// Fraction of trials whose largest component is rooted in `[K]`.
    pub fraction: f64,
    pub stderr: f64,
    pub fixation_fraction: f64,
    pub fixation_stderr: f64,
}

/// Rows ordered by checkpoint, then by `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceTable {
    pub trials: u64,
    pub rows: Vec<PersistenceRow>,
}

impl PersistenceTable {
    pub fn row(&self, n: u64, k: u64) -> Option<&PersistenceRow> {
        self.rows.iter().find(|r| r.n == n && r.k == k)
    }
}

pub fn persistence_table(run: &EnsembleRun, ks: &[u64]) -> PersistenceTable {
    let trials = run.trials.len();
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut rows = Vec::with_capacity(run.checkpoints.len() * ks.len());
    for (i, &n) in run.checkpoints.iter().enumerate() {
        let (ff, fse) = proportion(fixed_over_window(run, i), trials);
        for &k in &ks {
            let (fraction, stderr) = proportion(persistent_count(run, i, k), trials);
            rows.push(PersistenceRow {
                n,
                k,
                fraction,
                stderr,
                fixation_fraction: ff,
                fixation_stderr: fse,
            });
        }
    }
    PersistenceTable {
        trials: trials as u64,
        rows,
    }
}

/// Persistence fractions for every `K` in `ks` (or `K_persistence` alone
/// when `ks` is empty). Writes `persistence.csv` and `manifest.json` when an
/// output directory is configured.
pub fn persistence_experiment(config: &EnsembleConfig, ks: &[u64]) -> Result<PersistenceTable> {
    let ks = if ks.is_empty() {
        vec![config.k_persistence]
    } else {
        ks.to_vec()
    };
    let run = run_trajectories(config)?;
    let table = persistence_table(&run, &ks);
    if let Some(dir) = &config.output_dir {
        output::prepare_dir(dir)?;
        output::write_persistence_csv(&dir.join("persistence.csv"), &table)?;
        let mut k_list = ks.clone();
        k_list.sort_unstable();
        k_list.dedup();
        let manifest = Manifest {
            k_list: Some(k_list),
            ..Manifest::for_ensemble(config)
        };
        manifest.write(&dir.join("manifest.json"))?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ModelParams;

    #[test]
    fn monotone_in_k() {
        let c = EnsembleConfig::new(ModelParams::new(2, 0.1).unwrap(), 3000, 40, 8);
        let table = persistence_experiment(&c, &[100, 1, 20, 5]).unwrap();
        let n = 3000;
        let f: Vec<f64> = [1, 5, 20, 100]
            .iter()
            .map(|&k| table.row(n, k).unwrap().fraction)
            .collect();
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(table.rows.len(), 4 * c.checkpoints().len());
    }

    #[test]
    fn full_percolation() {
        let c = EnsembleConfig::new(ModelParams::new(2, 1.0).unwrap(), 1000, 3, 8);
        let table = persistence_experiment(&c, &[1]).unwrap();
        assert!(table.rows.iter().all(|r| r.fraction == 1.0));
    }
}
