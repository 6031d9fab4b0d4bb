//! CSV and manifest writers. Floats are written in shortest round-trip
//! form so files re-parse to the exact values held in memory.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{
    EnsembleConfig, EnsembleRun, EnsembleSummary, PersistenceTable, ResidualTable, TailTable,
};
use crate::analytic::{growth_exponent, limiting_susceptibility_for, ModelParams};
use crate::error::{Error, Result};
use crate::mbrw::{Label, MbrwConfig, MbrwResult};
use crate::stats::sig10;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub(crate) fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_trajectory_csv(path: &Path, run: &EnsembleRun) -> Result<()> {
    let mut w = writer(path)?;
    let mut header: Vec<String> = ["trial", "n", "s2", "s3", "s4"].map(String::from).to_vec();
    header.extend(run.levels.iter().map(|l| format!("s2_trunc_{l}")));
    header.extend(
        [
            "max_size",
            "max_oldest",
            "c1_size",
            "rescaled_c1",
            "rescaled_max",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for r in run.records() {
        let mut row = vec![
            r.trial.to_string(),
            r.n.to_string(),
            fmt_float(r.s2),
            fmt_float(r.s3),
            fmt_float(r.s4),
        ];
        row.extend(r.s2_trunc.iter().map(|&x| fmt_float(x)));
        row.extend([
            r.max_size.to_string(),
            r.max_oldest.to_string(),
            r.c1_size.to_string(),
            fmt_float(r.rescaled_c1),
            fmt_float(r.rescaled_max),
        ]);
        w.write_record(&row)?;
    }
    finish(w, path)
}

pub(crate) fn write_rescaled_max_csv(path: &Path, run: &EnsembleRun) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trial", "n", "max_size", "rescaled_max"])?;
    for r in run.records() {
        w.write_record([
            r.trial.to_string(),
            r.n.to_string(),
            r.max_size.to_string(),
            fmt_float(r.rescaled_max),
        ])?;
    }
    finish(w, path)
}

pub(crate) fn write_summary_csv(path: &Path, summary: &EnsembleSummary) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "n",
        "s2_mean",
        "s2_stderr",
        "rescaled_max_mean",
        "rescaled_max_stderr",
        "rescaled_c1_mean",
        "rescaled_c1_stderr",
        "K",
        "persistence_fraction",
        "persistence_stderr",
        "fixation_fraction",
        "fixation_stderr",
    ])?;
    for c in &summary.checkpoints {
        w.write_record([
            c.n.to_string(),
            fmt_float(c.s2_mean),
            fmt_float(c.s2_stderr),
            fmt_float(c.rescaled_max_mean),
            fmt_float(c.rescaled_max_stderr),
            fmt_float(c.rescaled_c1_mean),
            fmt_float(c.rescaled_c1_stderr),
            summary.k_persistence.to_string(),
            fmt_float(c.persistence_fraction),
            fmt_float(c.persistence_stderr),
            fmt_float(c.fixation_fraction),
            fmt_float(c.fixation_stderr),
        ])?;
    }
    finish(w, path)
}

pub(crate) fn write_persistence_csv(path: &Path, table: &PersistenceTable) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "K", "fraction", "stderr", "fixation_fraction"])?;
    for r in &table.rows {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            fmt_float(r.fraction),
            fmt_float(r.stderr),
            fmt_float(r.fixation_fraction),
        ])?;
    }
    finish(w, path)
}

pub(crate) fn write_residuals_csv(path: &Path, table: &ResidualTable) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "mean_abs_residual", "stderr"])?;
    for r in &table.rows {
        w.write_record([
            r.n.to_string(),
            fmt_float(r.mean_abs_residual),
            fmt_float(r.stderr),
        ])?;
    }
    finish(w, path)
}

pub(crate) fn write_tail_csv(path: &Path, table: &TailTable) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "ccdf", "stderr", "reference"])?;
    for r in &table.rows {
        w.write_record([
            r.k.to_string(),
            fmt_float(r.ccdf),
            fmt_float(r.stderr),
            fmt_float(r.reference),
        ])?;
    }
    finish(w, path)
}

/// `mbrw.csv`: one row per tree, in trial order.
pub fn write_mbrw_csv(path: &Path, root: Label, results: &[MbrwResult]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trial", "root_label", "size", "truncated"])?;
    for (i, r) in results.iter().enumerate() {
        w.write_record([
            i.to_string(),
            root.as_str().to_string(),
            r.size.to_string(),
            r.truncated.to_string(),
        ])?;
    }
    finish(w, path)
}

/// Run provenance. Inputs are recorded exactly so the run can be repeated
/// from the manifest; derived constants are rounded to ten digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub m: u32,
    pub pi: f64,
    /// Growth exponent; null above the critical threshold.
    pub alpha: Option<f64>,
    pub pi_c: f64,
    pub s2_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    pub trials: u64,
    pub base_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<u64>,
    #[serde(rename = "L_list", skip_serializing_if = "Option::is_none")]
    pub l_list: Option<Vec<u64>>,
    #[serde(rename = "K_persistence", skip_serializing_if = "Option::is_none")]
    pub k_persistence: Option<u64>,
    #[serde(rename = "K_list", skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_cap: Option<u64>,
    pub created_at: String,
}

impl Manifest {
    fn base(params: &ModelParams, trials: u64, base_seed: u64) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            m: params.m(),
            pi: params.pi(),
            alpha: growth_exponent(params).ok().map(sig10),
            pi_c: sig10(params.critical_threshold()),
            s2_inf: limiting_susceptibility_for(params).ok().map(sig10),
            n_max: None,
            trials,
            base_seed,
            checkpoint_ratio: None,
            n0: None,
            l_list: None,
            k_persistence: None,
            k_list: None,
            root_label: None,
            node_cap: None,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn for_ensemble(config: &EnsembleConfig) -> Self {
        Self {
            n_max: Some(config.n_max),
            checkpoint_ratio: Some(config.checkpoint_ratio),
            n0: Some(config.first_checkpoint),
            l_list: Some(config.sorted_levels()),
            k_persistence: Some(config.k_persistence),
            ..Self::base(&config.params, config.trials, config.base_seed)
        }
    }

    pub fn for_mbrw(config: &MbrwConfig, root: Label, trials: u64, seed: u64) -> Self {
        Self {
            root_label: Some(root.as_str().to_string()),
            node_cap: Some(config.node_cap),
            ..Self::base(&config.params, trials, seed)
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_ensemble, EnsembleConfig};

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0, 1.7712434, 1e-300, 3.5e20, 0.1 + 0.2, 12345.678] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(1e-300), "1e-300");
    }

    #[test]
    fn ensemble_files_have_documented_headers() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = EnsembleConfig::new(ModelParams::new(2, 0.1).unwrap(), 1000, 3, 4);
        c.levels = vec![100, 10];
        c.output_dir = Some(dir.path().to_path_buf());
        run_ensemble(&c).unwrap();
        let head = |name: &str| {
            fs::read_to_string(dir.path().join(name))
                .unwrap()
                .lines()
                .next()
                .unwrap()
                .to_string()
        };
        assert_eq!(
            head("trajectory.csv"),
            "trial,n,s2,s3,s4,s2_trunc_10,s2_trunc_100,max_size,max_oldest,c1_size,rescaled_c1,rescaled_max"
        );
        assert_eq!(head("rescaled_max.csv"), "trial,n,max_size,rescaled_max");
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        for key in [
            "tool_version",
            "m",
            "pi",
            "alpha",
            "pi_c",
            "s2_inf",
            "n_max",
            "trials",
            "base_seed",
            "checkpoint_ratio",
            "L_list",
            "K_persistence",
            "created_at",
        ] {
            assert!(manifest.get(key).is_some(), "missing {key}");
        }
        assert_eq!(manifest["s2_inf"].as_f64().unwrap(), 1.771243445);
        assert_eq!(manifest["L_list"], serde_json::json!([10, 100]));
    }

    #[test]
    fn unwritable_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let mut c = EnsembleConfig::new(ModelParams::new(2, 0.1).unwrap(), 200, 1, 4);
        c.output_dir = Some(blocker.join("sub"));
        assert!(matches!(run_ensemble(&c), Err(Error::Io { .. })));
    }
}
