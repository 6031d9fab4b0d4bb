//! Exact law of the dynamic construction for tiny graphs (`m = 2`).
//!
//! Each arrival `i + 1` has no retained edge with probability `(1 - pi)^2`,
//! one edge to `t` with probability `2 pi (1 - pi) / i` for each `t` in
//! `[i]`, and two edges to the ordered pair `(t1, t2)` with probability
//! `pi^2 / i^2`. Outcomes are folded into partitions as they are generated,
//! so the state space is the set of reachable partitions of `[n]`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analytic::ModelParams;
use crate::error::{Error, Result};

pub const MAX_ORACLE_N: u64 = 6;

/// A partition of `[n]` with its probability. `labels[v]` is the oldest
/// vertex (0-based) of `v`'s component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeWeight {
    pub labels: Vec<u8>,
    pub probability: f64,
}

impl OutcomeWeight {
    /// Components as sorted lists of 1-based labels, oldest first.
    pub fn components(&self) -> Vec<Vec<u64>> {
        let mut groups: BTreeMap<u8, Vec<u64>> = BTreeMap::new();
        for (v, &root) in self.labels.iter().enumerate() {
            groups.entry(root).or_default().push(v as u64 + 1);
        }
        groups.into_values().collect()
    }

    fn component_sizes(&self) -> Vec<u64> {
        self.components().iter().map(|c| c.len() as u64).collect()
    }
}

fn check(params: &ModelParams, n: u64) -> Result<()> {
    if params.m() != 2 {
        return Err(Error::RequiresTwoOutEdges {
            what: "exact enumeration",
            m: params.m(),
        });
    }
    if !(1..=MAX_ORACLE_N).contains(&n) {
        return Err(Error::SizeOutOfRange {
            n,
            min: 1,
            max: MAX_ORACLE_N,
        });
    }
    Ok(())
}

/// Merges the components of `targets` with the newcomer appended at the end.
fn attach(labels: &[u8], targets: &[u8]) -> Vec<u8> {
    let newcomer = labels.len() as u8;
    let mut next = labels.to_vec();
    let merged: Vec<u8> = targets.iter().map(|&t| labels[t as usize]).collect();
    let new_label = merged.iter().copied().min().unwrap_or(newcomer);
    for label in next.iter_mut() {
        if merged.contains(label) {
            *label = new_label;
        }
    }
    next.push(new_label);
    next
}

/// All partitions of `[n]` reachable by the dynamics, with probabilities.
pub fn enumerate_outcomes(params: &ModelParams, n: u64) -> Result<Vec<OutcomeWeight>> {
    check(params, n)?;
    let pi = params.pi();
    let mut dist: BTreeMap<Vec<u8>, f64> = BTreeMap::from([(vec![0u8], 1.0)]);
    for i in 1..n as u8 {
        let fi = f64::from(i);
        let p_none = (1.0 - pi) * (1.0 - pi);
        let p_one = 2.0 * pi * (1.0 - pi) / fi;
        let p_two = pi * pi / (fi * fi);
        let mut next: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (labels, p) in &dist {
            let mut add = |targets: &[u8], q: f64| {
                if q > 0.0 {
                    *next.entry(attach(labels, targets)).or_insert(0.0) += p * q;
                }
            };
            add(&[], p_none);
            for t in 0..i {
                add(&[t], p_one);
            }
            for t1 in 0..i {
                for t2 in 0..i {
                    add(&[t1, t2], p_two);
                }
            }
        }
        dist = next;
    }
    Ok(dist
        .into_iter()
        .map(|(labels, probability)| OutcomeWeight {
            labels,
            probability,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedSusceptibilities {
    pub s2: f64,
    pub s3: f64,
}

pub fn exact_expected_susceptibilities(
    params: &ModelParams,
    n: u64,
) -> Result<ExpectedSusceptibilities> {
    let outcomes = enumerate_outcomes(params, n)?;
    let nf = n as f64;
    let mut out = ExpectedSusceptibilities { s2: 0.0, s3: 0.0 };
    for w in &outcomes {
        let sizes = w.component_sizes();
        let p2: u64 = sizes.iter().map(|s| s * s).sum();
        let p3: u64 = sizes.iter().map(|s| s * s * s).sum();
        out.s2 += w.probability * p2 as f64 / nf;
        out.s3 += w.probability * p3 as f64 / nf;
    }
    Ok(out)
}

/// Law of `|C_v(n)|` as size -> probability.
pub fn exact_root_component_distribution(
    params: &ModelParams,
    n: u64,
    v: u64,
) -> Result<BTreeMap<u64, f64>> {
    check(params, n)?;
    if !(1..=n).contains(&v) {
        return Err(Error::VertexOutOfRange { v, n });
    }
    let mut pmf = BTreeMap::new();
    for w in enumerate_outcomes(params, n)? {
        let root = w.labels[v as usize - 1];
        let size = w.labels.iter().filter(|&&l| l == root).count() as u64;
        *pmf.entry(size).or_insert(0.0) += w.probability;
    }
    Ok(pmf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(pi: f64) -> ModelParams {
        ModelParams::new(2, pi).unwrap()
    }

    #[test]
    fn one_vertex() {
        for pi in [0.0, 0.3, 1.0] {
            assert_eq!(
                exact_expected_susceptibilities(&params(pi), 1).unwrap().s2,
                1.0
            );
        }
    }

    #[test]
    fn two_vertices_closed_form() {
        for pi in [0.1, 0.5, 0.77] {
            let e = exact_expected_susceptibilities(&params(pi), 2).unwrap();
            let q = (1.0 - pi) * (1.0 - pi);
            assert_abs_diff_eq!(e.s2, 2.0 - q, epsilon = 1e-15);
            // S3 is 1 (apart) or 4 (joined)
            assert_abs_diff_eq!(e.s3, q + 4.0 * (1.0 - q), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            exact_expected_susceptibilities(&params(0.1), 2).unwrap().s2,
            1.19,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            exact_expected_susceptibilities(&params(0.5), 2).unwrap().s2,
            1.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn three_vertices_by_hand() {
        // Vertex 3 joins {1,2} or the singletons; enumerate by hand at pi = 1/2.
        // After step 2: joined w.p. 3/4, apart w.p. 1/4.
        // From joined {1,2},{}: new vertex attaches w.p. 1 - 1/4 -> size 3 else {2,1}.
        // From apart: none 1/4 -> {1,1,1}; one edge 1/4 each target -> {2,1};
        //   two edges: same target 2 x 1/16 -> {2,1}, distinct 2 x 1/16 -> {3}.
        let pi = 0.5;
        let p_joined = 0.75;
        let s2_joined = 0.75 * 3.0 + 0.25 * (5.0 / 3.0);
        let s2_apart = 0.25 * 1.0 + (0.5 + 0.125) * (5.0 / 3.0) + 0.125 * 3.0;
        let expected = p_joined * s2_joined + (1.0 - p_joined) * s2_apart;
        assert_abs_diff_eq!(
            exact_expected_susceptibilities(&params(pi), 3).unwrap().s2,
            expected,
            epsilon = 1e-14
        );
    }

    #[test]
    fn probabilities_sum_to_one() {
        for pi in [0.0, 0.1, 0.5, 0.9, 1.0] {
            for n in 1..=MAX_ORACLE_N {
                let total: f64 = enumerate_outcomes(&params(pi), n)
                    .unwrap()
                    .iter()
                    .map(|w| w.probability)
                    .sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn vertex_component_law() {
        let pmf = exact_root_component_distribution(&params(0.1), 2, 1).unwrap();
        assert_abs_diff_eq!(pmf[&1], 0.81, epsilon = 1e-15);
        assert_abs_diff_eq!(pmf[&2], 0.19, epsilon = 1e-15);
        assert_eq!(
            exact_root_component_distribution(&params(0.0), 4, 1).unwrap(),
            BTreeMap::from([(1, 1.0)])
        );
        let full = exact_root_component_distribution(&params(1.0), 4, 1).unwrap();
        assert_eq!(full.keys().copied().collect::<Vec<_>>(), vec![4]);
        assert_abs_diff_eq!(full[&4], 1.0, epsilon = 1e-15);
        for v in 1..=5 {
            let total: f64 = exact_root_component_distribution(&params(0.3), 5, v)
                .unwrap()
                .values()
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mean_vertex_size_is_s2() {
        // E[S2(n)] = (1/n) sum_v E|C_v(n)|
        let p = params(0.4);
        let n = 5;
        let mean_size: f64 = (1..=n)
            .map(|v| {
                exact_root_component_distribution(&p, n, v)
                    .unwrap()
                    .iter()
                    .map(|(s, q)| *s as f64 * q)
                    .sum::<f64>()
            })
            .sum::<f64>()
            / n as f64;
        assert_abs_diff_eq!(
            mean_size,
            exact_expected_susceptibilities(&p, n).unwrap().s2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn monotone_in_pi() {
        for n in 2..=5 {
            let values: Vec<f64> = (0..=20)
                .map(|k| {
                    exact_expected_susceptibilities(&params(k as f64 / 20.0), n)
                        .unwrap()
                        .s2
                })
                .collect();
            assert!(values.windows(2).all(|w| w[0] <= w[1] + 1e-15), "n = {n}");
        }
    }

    #[test]
    fn rejects_unsupported_inputs() {
        assert!(exact_expected_susceptibilities(&params(0.1), 0).is_err());
        assert!(exact_expected_susceptibilities(&params(0.1), 7).is_err());
        assert!(exact_root_component_distribution(&params(0.1), 3, 4).is_err());
        assert!(exact_root_component_distribution(&params(0.1), 3, 0).is_err());
        let m3 = ModelParams::new(3, 0.1).unwrap();
        assert!(matches!(
            exact_expected_susceptibilities(&m3, 3),
            Err(Error::RequiresTwoOutEdges { .. })
        ));
    }
}
