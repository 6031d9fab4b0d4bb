use std::collections::BTreeMap;

use serde::Serialize;

use super::forest::ComponentForest;

/// Component statistics of the graph at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSnapshot {
    pub n: u64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    /// `S_{2,L} = (1/n) sum_{|C| <= L} |C|^2` keyed by `L`.
    pub s2_trunc: BTreeMap<u64, f64>,
    pub max_size: u64,
    /// Oldest vertex (1-based label) of the largest component; among equal
    /// sizes the component with the smaller oldest label wins.
    pub max_oldest: u64,
    /// Size of the component containing vertex 1.
    pub c1_size: u64,
    /// Component size -> number of components of that size.
    pub histogram: BTreeMap<u64, u64>,
}

/// Everything a root scan yields. Power sums are included so callers that
/// keep no accumulator (the static builder) can use them.
pub(crate) struct RootScan {
    pub power_sums: [u128; 3],
    pub s2_trunc: BTreeMap<u64, f64>,
    pub max_size: u64,
    pub max_oldest: u64,
    pub histogram: BTreeMap<u64, u64>,
}

pub(crate) fn scan_roots(forest: &ComponentForest, levels: &[u64]) -> RootScan {
    let n = forest.len() as f64;
    let mut histogram = BTreeMap::new();
    let mut max_size = 0u64;
    let mut max_oldest = u64::MAX;
    let mut sums = [0u128; 3];
    for (_, size, oldest) in forest.components() {
        let size = u64::from(size);
        let oldest = u64::from(oldest) + 1;
        *histogram.entry(size).or_insert(0u64) += 1;
        if size > max_size || (size == max_size && oldest < max_oldest) {
            max_size = size;
            max_oldest = oldest;
        }
        let s = u128::from(size);
        sums[0] = sums[0].saturating_add(s * s);
        sums[1] = sums[1].saturating_add(s * s * s);
        sums[2] = sums[2].saturating_add(s * s * s * s);
    }

    // Cumulative sum of |C|^2 over sizes, then read off each level.
    let mut s2_trunc = BTreeMap::new();
    let mut sorted_levels: Vec<u64> = levels.to_vec();
    sorted_levels.sort_unstable();
    sorted_levels.dedup();
    let mut sizes = histogram.iter().peekable();
    let mut acc = 0u128;
    for level in sorted_levels {
        while let Some((&size, &count)) = sizes.peek() {
            if size > level {
                break;
            }
            acc += u128::from(count) * u128::from(size) * u128::from(size);
            sizes.next();
        }
        s2_trunc.insert(level, acc as f64 / n);
    }

    RootScan {
        power_sums: sums,
        s2_trunc,
        max_size,
        max_oldest: if max_size == 0 { 0 } else { max_oldest },
        histogram,
    }
}

impl ComponentSnapshot {
    /// Builds a snapshot with every statistic recomputed from the forest.
    pub fn from_forest(forest: &ComponentForest, levels: &[u64]) -> Self {
        let scan = scan_roots(forest, levels);
        Self::assemble(forest, scan.power_sums, scan)
    }

    pub(crate) fn assemble(
        forest: &ComponentForest,
        power_sums: [u128; 3],
        scan: RootScan,
    ) -> Self {
        let n = forest.len() as u64;
        let nf = n as f64;
        let c1_size = if forest.is_empty() {
            0
        } else {
            u64::from(forest.root_size(forest.find_immutable(0)))
        };
        Self {
            n,
            s2: power_sums[0] as f64 / nf,
            s3: power_sums[1] as f64 / nf,
            s4: power_sums[2] as f64 / nf,
            s2_trunc: scan.s2_trunc,
            max_size: scan.max_size,
            max_oldest: scan.max_oldest,
            c1_size,
            histogram: scan.histogram,
        }
    }

    /// Fraction of vertices whose component has at least `k` vertices.
    pub fn size_biased_ccdf(&self, k: u64) -> f64 {
        let hits: u64 = self
            .histogram
            .range(k..)
            .map(|(size, count)| size * count)
            .sum();
        hits as f64 / self.n as f64
    }
}
