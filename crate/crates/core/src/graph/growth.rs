//! Dynamic construction of the percolated uniform-attachment graph.
//!
//! Vertex `n + 1` arrives with `m` potential edges. Each is kept with
//! probability `pi` and, if kept, attaches to a uniform vertex of `[n]`
//! (independently, with replacement). The new vertex and every component it
//! touches merge into one. Only the component structure is stored.

use rand::Rng;
use serde::Serialize;

use super::forest::ComponentForest;
use super::snapshot::{scan_roots, ComponentSnapshot};
use crate::analytic::ModelParams;
use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, SimRng};

/// Streaming power sums `p_k = sum over components of |C|^k`, `k = 2, 3, 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SusceptibilityAccumulator {
    pub n: u64,
    pub p2: u128,
    pub p3: u128,
    pub p4: u128,
}

impl SusceptibilityAccumulator {
    fn singleton() -> Self {
        Self {
            n: 1,
            p2: 1,
            p3: 1,
            p4: 1,
        }
    }

    pub fn s2(&self) -> f64 {
        self.p2 as f64 / self.n as f64
    }

    pub fn s3(&self) -> f64 {
        self.p3 as f64 / self.n as f64
    }

    pub fn s4(&self) -> f64 {
        self.p4 as f64 / self.n as f64
    }

    /// Replaces components of sizes `merged` by one component of size
    /// `sum(merged) + 1` (the newcomer) and bumps `n`.
    fn absorb(&mut self, merged: &[u64]) -> Result<()> {
        let overflow = || Error::PowerSumOverflow { n: self.n + 1 };
        let total = u128::from(merged.iter().sum::<u64>() + 1);
        let mut next = [self.p2, self.p3, self.p4];
        let mut pow_new = total;
        for (k, slot) in next.iter_mut().enumerate() {
            pow_new = pow_new.checked_mul(total).ok_or_else(overflow)?;
            let removed: u128 = merged
                .iter()
                .map(|&a| u128::from(a).pow(k as u32 + 2))
                .sum();
            *slot = slot
                .checked_add(pow_new)
                .and_then(|v| v.checked_sub(removed))
                .ok_or_else(overflow)?;
        }
        [self.p2, self.p3, self.p4] = next;
        self.n += 1;
        Ok(())
    }
}

/// What happened when one vertex arrived. Labels are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepOutcome {
    pub new_vertex: u64,
    pub retained_edges: u32,
    pub targets: Vec<u64>,
    /// Distinct roots (as vertex labels) of the components that were merged.
    pub merged_roots: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct GrowthState {
    params: ModelParams,
    rng: SimRng,
    forest: ComponentForest,
    accum: SusceptibilityAccumulator,
    roots_buf: Vec<u32>,
    sizes_buf: Vec<u64>,
}

impl GrowthState {
    /// A single isolated vertex 1.
    pub fn new(params: ModelParams, seed: u64) -> Self {
        let mut forest = ComponentForest::new();
        forest.push_singleton();
        Self {
            params,
            rng: rng_from_seed(seed),
            forest,
            accum: SusceptibilityAccumulator::singleton(),
            roots_buf: Vec::new(),
            sizes_buf: Vec::new(),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n(&self) -> u64 {
        self.accum.n
    }

    pub fn forest(&self) -> &ComponentForest {
        &self.forest
    }

    pub fn accumulator(&self) -> &SusceptibilityAccumulator {
        &self.accum
    }

    pub fn s2(&self) -> f64 {
        self.accum.s2()
    }

    /// Current size of the component of vertex 1.
    pub fn c1_size(&mut self) -> u64 {
        u64::from(self.forest.component_size(0))
    }

    /// Adds one vertex, drawing fresh randomness.
    pub fn grow_step(&mut self) -> Result<StepOutcome> {
        let n = self.forest.len() as u32;
        let pi = self.params.pi();
        let mut targets = Vec::with_capacity(self.params.m() as usize);
        for _ in 0..self.params.m() {
            if self.rng.random_bool(pi) {
                targets.push(self.rng.random_range(0..n));
            }
        }
        self.attach(&targets)
    }

    /// Adds one vertex with the given retained-edge targets (0-based).
    fn attach(&mut self, targets: &[u32]) -> Result<StepOutcome> {
        self.roots_buf.clear();
        for &t in targets {
            let r = self.forest.find(t);
            if !self.roots_buf.contains(&r) {
                self.roots_buf.push(r);
            }
        }
        self.sizes_buf.clear();
        self.sizes_buf.extend(
            self.roots_buf
                .iter()
                .map(|&r| u64::from(self.forest.root_size(r))),
        );
        self.accum.absorb(&self.sizes_buf)?;

        let v = self.forest.push_singleton();
        for &r in &self.roots_buf {
            self.forest.union(v, r);
        }
        Ok(StepOutcome {
            new_vertex: u64::from(v) + 1,
            retained_edges: targets.len() as u32,
            targets: targets.iter().map(|&t| u64::from(t) + 1).collect(),
            merged_roots: self.roots_buf.iter().map(|&r| u64::from(r) + 1).collect(),
        })
    }

    /// Grows until the graph has `n_target` vertices.
    pub fn run_to(&mut self, n_target: u64) -> Result<()> {
        let current = self.n();
        if n_target < current {
            return Err(Error::TargetBelowCurrent {
                target: n_target,
                current,
            });
        }
        self.forest.reserve((n_target - current) as usize);
        for _ in current..n_target {
            self.grow_step()?;
        }
        Ok(())
    }

    pub fn snapshot(&self, levels: &[u64]) -> ComponentSnapshot {
        let scan = scan_roots(&self.forest, levels);
        let sums = [self.accum.p2, self.accum.p3, self.accum.p4];
        ComponentSnapshot::assemble(&self.forest, sums, scan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(pi: f64) -> ModelParams {
        ModelParams::new(2, pi).unwrap()
    }

    #[test]
    fn starts_from_one_isolated_vertex() {
        let mut state = GrowthState::new(params(0.1), 7);
        assert_eq!(state.n(), 1);
        assert_eq!(state.s2(), 1.0);
        assert_eq!(state.c1_size(), 1);
        let acc = state.accumulator();
        assert_eq!((acc.p2, acc.p3, acc.p4), (1, 1, 1));
    }

    #[test]
    fn forced_merge_of_two_edges_to_vertex_one() {
        let mut state = GrowthState::new(params(0.5), 0);
        let out = state.attach(&[0, 0]).unwrap();
        assert_eq!(out.new_vertex, 2);
        assert_eq!(out.retained_edges, 2);
        assert_eq!(out.targets, vec![1, 1]);
        assert_eq!(out.merged_roots, vec![1]);
        assert_eq!(state.s2(), 2.0);
    }

    #[test]
    fn isolated_arrival_keeps_singletons() {
        let mut state = GrowthState::new(params(0.5), 0);
        let out = state.attach(&[]).unwrap();
        assert!(out.targets.is_empty() && out.merged_roots.is_empty());
        assert_eq!(state.s2(), 1.0);
    }

    #[test]
    fn one_edge_into_a_pair() {
        let mut state = GrowthState::new(params(0.5), 0);
        state.attach(&[0]).unwrap();
        state.attach(&[0]).unwrap();
        assert_eq!(state.s2(), 3.0);
        assert_eq!(state.forest().component_count(), 1);
    }

    #[test]
    fn extreme_retention_probabilities() {
        let mut none = GrowthState::new(params(0.0), 3);
        none.run_to(1000).unwrap();
        let snap = none.snapshot(&[]);
        assert_eq!(snap.s2, 1.0);
        assert_eq!(snap.max_size, 1);
        assert_eq!(none.forest().component_count(), 1000);

        let mut all = GrowthState::new(params(1.0), 3);
        all.run_to(1000).unwrap();
        let snap = all.snapshot(&[]);
        assert_eq!(snap.max_size, 1000);
        assert_eq!(snap.max_oldest, 1);
        assert_eq!(snap.s2, 1000.0);
    }

    #[test]
    fn run_to_is_deterministic_and_rejects_shrinking() {
        let mut a = GrowthState::new(params(0.12), 99);
        let mut b = GrowthState::new(params(0.12), 99);
        a.run_to(5000).unwrap();
        b.run_to(5000).unwrap();
        assert_eq!(a.snapshot(&[10, 100]), b.snapshot(&[10, 100]));
        assert!(matches!(
            a.run_to(10),
            Err(Error::TargetBelowCurrent { .. })
        ));
        a.run_to(5000).unwrap();
    }

    #[test]
    fn outcomes_are_consistent() {
        let mut state = GrowthState::new(ModelParams::new(3, 0.6).unwrap(), 5);
        for _ in 0..500 {
            let out = state.grow_step().unwrap();
            assert_eq!(out.retained_edges as usize, out.targets.len());
            assert!(out.merged_roots.len() <= out.targets.len());
            assert!(out.targets.iter().all(|&t| t >= 1 && t < out.new_vertex));
        }
    }

    #[test]
    fn overflow_is_reported() {
        let mut acc = SusceptibilityAccumulator {
            n: 10,
            p2: 1,
            p3: 1,
            p4: u128::MAX - 3,
        };
        assert!(matches!(
            acc.absorb(&[1]),
            Err(Error::PowerSumOverflow { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn streaming_sums_match_recomputation(seed in any::<u64>(), pi in 0.0f64..1.0, m in 1u32..4, n in 1u64..600) {
            let mut state = GrowthState::new(ModelParams::new(m, pi).unwrap(), seed);
            state.run_to(n).unwrap();
            let acc = *state.accumulator();
            let fresh = state.forest().power_sums().unwrap();
            prop_assert_eq!([acc.p2, acc.p3, acc.p4], fresh);
            prop_assert_eq!(acc.n, n);
            let snap = state.snapshot(&[]);
            prop_assert_eq!(snap, ComponentSnapshot::from_forest(state.forest(), &[]));
            prop_assert!(1.0 <= acc.s2() && acc.s2() <= acc.s3() && acc.s3() <= acc.s4());
            prop_assert_eq!(acc.p2 == u128::from(n), state.forest().component_count() as u64 == n);
        }
    }
}
