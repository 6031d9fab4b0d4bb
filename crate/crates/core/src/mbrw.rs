//! Two-type branching random walk killed at a random barrier: the local
//! limit of the percolated component of a uniformly chosen vertex.
//!
//! Locations are log-ages relative to the barrier. The root sits at `-A` with
//! `A ~ Exp(1)` drawn once per tree, and anything above `0` is killed.
//! Every particle at `a` has young children at `a + t` for the points `t` of
//! a rate-`m pi` Poisson process, and old children at `a - Exp(1)`: one
//! Bernoulli(`pi`) chance per out-edge, `m` of them for an old particle and
//! `m - 1` for a young one (one out-edge is the edge to its parent).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::ModelParams;
use crate::error::{Error, Result};
use crate::seed::{mix_seed, rng_from_seed, SimRng};

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    Old,
    Young,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Old => "O",
            Label::Young => "Y",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "O" | "o" | "old" => Ok(Label::Old),
            "Y" | "y" | "young" => Ok(Label::Young),
            other => Err(Error::InvalidConfig(format!(
                "root label must be O or Y, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MbrwConfig {
    pub params: ModelParams,
    /// Exploration stops once this many particles have been counted.
    pub node_cap: u64,
}

impl MbrwConfig {
    pub fn new(params: ModelParams, node_cap: u64) -> Result<Self> {
        if node_cap == 0 {
            return Err(Error::InvalidConfig("node_cap must be at least 1".into()));
        }
        Ok(Self { params, node_cap })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MbrwResult {
    /// Surviving particles including the root.
    pub size: u64,
    /// Non-root particles by label; `size = old_count + young_count + 1`.
    pub old_count: u64,
    pub young_count: u64,
    pub truncated: bool,
}

pub fn simulate_tree(config: &MbrwConfig, root: Label, seed: u64) -> MbrwResult {
    let mut rng = rng_from_seed(seed);
    simulate_tree_with(config, root, &mut rng, &mut Vec::new())
}

fn simulate_tree_with(
    config: &MbrwConfig,
    root: Label,
    rng: &mut SimRng,
    stack: &mut Vec<(f64, Label)>,
) -> MbrwResult {
    let m = config.params.m();
    let pi = config.params.pi();
    let young_rate = f64::from(m) * pi;

    stack.clear();
    let barrier: f64 = rng.sample(Exp1);
    stack.push((-barrier, root));

    let mut result = MbrwResult {
        size: 0,
        old_count: 0,
        young_count: 0,
        truncated: false,
    };
    let mut is_root = true;
    while let Some((loc, label)) = stack.pop() {
        result.size += 1;
        if !is_root {
            match label {
                Label::Old => result.old_count += 1,
                Label::Young => result.young_count += 1,
            }
        }
        is_root = false;

        if young_rate > 0.0 {
            let mut child = loc;
            loop {
                let gap: f64 = rng.sample(Exp1);
                child += gap / young_rate;
                if child > 0.0 {
                    break;
                }
                stack.push((child, Label::Young));
            }
        }
        let old_trials = match label {
            Label::Old => m,
            Label::Young => m - 1,
        };
        for _ in 0..old_trials {
            if rng.random_bool(pi) {
                let step: f64 = rng.sample(Exp1);
                stack.push((loc - step, Label::Old));
            }
        }

        if result.size >= config.node_cap && !stack.is_empty() {
            result.truncated = true;
            break;
        }
    }
    result
}

/// Trees for trials `0..trials`, tree `i` seeded with `mix_seed(seed, i)`.
pub fn simulate_trials(
    config: &MbrwConfig,
    root: Label,
    trials: u64,
    seed: u64,
) -> Vec<MbrwResult> {
    (0..trials)
        .into_par_iter()
        .map_init(Vec::new, |stack, i| {
            let mut rng = rng_from_seed(mix_seed(seed, i));
            simulate_tree_with(config, root, &mut rng, stack)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub truncation_rate: f64,
    pub trials: u64,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: u128,
    sum_sq: u128,
    truncated: u64,
}

impl Moments {
    fn of(r: &MbrwResult) -> Self {
        let s = u128::from(r.size);
        Self {
            sum: s,
            sum_sq: s * s,
            truncated: u64::from(r.truncated),
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
            truncated: self.truncated + other.truncated,
        }
    }

    fn estimate(&self, trials: u64) -> SizeEstimate {
        let n = trials as f64;
        let mean = self.sum as f64 / n;
        // (sum x^2 - (sum x)^2 / n) / (n - 1), with the numerator formed exactly.
        let t = u128::from(trials);
        let centered = self.sum_sq * t - self.sum * self.sum;
        let variance = centered as f64 / (n * (n - 1.0));
        SizeEstimate {
            mean,
            stderr: (variance / n).sqrt(),
            truncation_rate: self.truncated as f64 / n,
            trials,
        }
    }
}

/// Sample mean, its standard error and the fraction of capped trees.
///
/// Sizes are accumulated as exact integers, so the estimate does not depend
/// on how trials are split across threads.
pub fn estimate_mean_size(
    config: &MbrwConfig,
    root: Label,
    trials: u64,
    seed: u64,
) -> Result<SizeEstimate> {
    if trials < 2 {
        return Err(Error::InvalidConfig(
            "at least two trials are needed".into(),
        ));
    }
    let totals = (0..trials)
        .into_par_iter()
        .map_init(Vec::new, |stack, i| {
            let mut rng = rng_from_seed(mix_seed(seed, i));
            Moments::of(&simulate_tree_with(config, root, &mut rng, stack))
        })
        .reduce(Moments::default, Moments::merge);
    Ok(totals.estimate(trials))
}

impl SizeEstimate {
    /// The estimate [`estimate_mean_size`] would report for these trees.
    pub fn from_results(results: &[MbrwResult]) -> Result<Self> {
        if results.len() < 2 {
            return Err(Error::InvalidConfig(
                "at least two trials are needed".into(),
            ));
        }
        let totals = results
            .iter()
            .map(Moments::of)
            .fold(Moments::default(), Moments::merge);
        Ok(totals.estimate(results.len() as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(pi: f64) -> MbrwConfig {
        MbrwConfig::new(ModelParams::new(2, pi).unwrap(), DEFAULT_NODE_CAP).unwrap()
    }

    #[test]
    fn no_percolation_means_lone_root() {
        for label in [Label::Old, Label::Young] {
            let r = simulate_tree(&config(0.0), label, 9);
            assert_eq!(
                r,
                MbrwResult {
                    size: 1,
                    old_count: 0,
                    young_count: 0,
                    truncated: false
                }
            );
        }
        let est = estimate_mean_size(&config(0.0), Label::Old, 100, 1).unwrap();
        assert_eq!((est.mean, est.stderr, est.truncation_rate), (1.0, 0.0, 0.0));
    }

    #[test]
    fn counts_add_up_and_runs_repeat() {
        let cfg = config(0.13);
        for seed in 0..2000 {
            let r = simulate_tree(&cfg, Label::Old, seed);
            assert_eq!(r.size, r.old_count + r.young_count + 1);
            assert!(!r.truncated);
            assert_eq!(r, simulate_tree(&cfg, Label::Old, seed));
        }
    }

    #[test]
    fn cap_truncates() {
        let cfg = MbrwConfig::new(ModelParams::new(2, 0.9).unwrap(), 50).unwrap();
        let results = simulate_trials(&cfg, Label::Old, 200, 4);
        assert!(results.iter().any(|r| r.truncated));
        for r in results {
            assert!(r.size <= 50);
            if r.truncated {
                assert_eq!(r.size, 50);
            }
        }
        assert!(MbrwConfig::new(ModelParams::new(2, 0.1).unwrap(), 0).is_err());
    }

    #[test]
    fn estimate_matches_trial_list() {
        let cfg = config(0.1);
        let results = simulate_trials(&cfg, Label::Young, 5000, 77);
        let est = estimate_mean_size(&cfg, Label::Young, 5000, 77).unwrap();
        let sizes: Vec<f64> = results.iter().map(|r| r.size as f64).collect();
        let direct = crate::stats::mean_stderr(&sizes);
        assert!((est.mean - direct.mean).abs() < 1e-12);
        assert!((est.stderr - direct.stderr).abs() < 1e-12);
        assert_eq!(SizeEstimate::from_results(&results).unwrap(), est);
        assert!(estimate_mean_size(&cfg, Label::Old, 1, 0).is_err());
    }

    #[test]
    fn label_parsing() {
        assert_eq!("O".parse::<Label>().unwrap(), Label::Old);
        assert_eq!("Y".parse::<Label>().unwrap(), Label::Young);
        assert!("X".parse::<Label>().is_err());
    }
}
