//! Static construction: grow the whole multigraph, then percolate it.

use rand::Rng;

use super::forest::ComponentForest;
use super::snapshot::ComponentSnapshot;
use crate::analytic::ModelParams;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Builds the uniform-attachment multigraph on `[n]` (vertex `v >= 2` draws
/// `m` uniform targets in `[v - 1]`), keeps each edge with probability `pi`
/// and returns the component snapshot.
pub fn static_percolated_graph(
    params: &ModelParams,
    n: u64,
    seed: u64,
    levels: &[u64],
) -> Result<ComponentSnapshot> {
    if n == 0 {
        return Err(Error::SizeOutOfRange {
            n,
            min: 1,
            max: u64::from(u32::MAX),
        });
    }
    let mut rng = rng_from_seed(seed);
    let m = params.m() as usize;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m * n as usize);
    for v in 1..n as u32 {
        for _ in 0..m {
            edges.push((v, rng.random_range(0..v)));
        }
    }
    let pi = params.pi();
    let mut forest = ComponentForest::with_singletons(n as usize);
    for (v, t) in edges {
        if rng.random_bool(pi) {
            forest.union(v, t);
        }
    }
    Ok(ComponentSnapshot::from_forest(&forest, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let p0 = ModelParams::new(2, 0.0).unwrap();
        assert_eq!(static_percolated_graph(&p0, 100, 1, &[]).unwrap().s2, 1.0);
        let p1 = ModelParams::new(2, 1.0).unwrap();
        let snap = static_percolated_graph(&p1, 100, 1, &[]).unwrap();
        assert_eq!(snap.max_size, 100);
        assert_eq!(snap.histogram.len(), 1);
        assert!(static_percolated_graph(&p1, 0, 1, &[]).is_err());
        assert_eq!(static_percolated_graph(&p1, 1, 1, &[]).unwrap().s2, 1.0);
    }

    #[test]
    fn two_vertex_mean_matches_closed_form() {
        // E[S2(2)] = 2 - (1 - pi)^2 = 1.19 at pi = 0.1
        let params = ModelParams::new(2, 0.1).unwrap();
        let trials = 100_000u64;
        let values: Vec<f64> = (0..trials)
            .map(|s| static_percolated_graph(&params, 2, s, &[]).unwrap().s2)
            .collect();
        let est = crate::stats::mean_stderr(&values);
        assert!((est.mean - 1.19).abs() < 3.0 * est.stderr, "{est:?}");
    }
}
