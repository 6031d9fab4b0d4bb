//! Continuous-time embedding through a rate-one Yule clock.
//!
//! In continuous time vertex `i + 1` arrives after an `Exp(i)` wait, so the
//! discrete chain plus an independent arrival clock is the continuous-time
//! process. Along such a path
//! `M(t) = |C_1(t)| exp(-int_0^t (2 pi^2 S_2(u) + 2 pi) du)`
//! is a non-negative supermartingale.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{growth_exponent_m2, ModelParams};
use crate::error::{Error, Result};
use crate::graph::GrowthState;
use crate::seed::{mix_seed, rng_from_seed};

/// Arrival times `T_1 = 0 < T_2 < ... < T_n`; `times[i - 1]` is `T_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YuleClock {
    pub times: Vec<f64>,
}

impl YuleClock {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `T_n`, the arrival time of the last vertex.
    pub fn last(&self) -> f64 {
        *self.times.last().expect("clock has at least one arrival")
    }
}

/// `T_i = sum_{j=1}^{i-1} E_j / j` with iid standard exponentials `E_j`.
pub fn sample_arrival_times(n: usize, seed: u64) -> Result<YuleClock> {
    if n == 0 {
        return Err(Error::SizeOutOfRange {
            n: 0,
            min: 1,
            max: u64::MAX,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    times.push(t);
    for j in 1..n {
        let e: f64 = rng.sample(Exp1);
        t += e / j as f64;
        times.push(t);
    }
    Ok(YuleClock { times })
}

/// Per-vertex trajectories of `S_2(k)` and `|C_1(k)|`, `k = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthPaths {
    pub s2: Vec<f64>,
    pub c1: Vec<u64>,
}

/// Grows one graph to `n` vertices, recording `S_2` and `|C_1|` after every
/// arrival.
pub fn record_paths(params: ModelParams, n: u64, seed: u64) -> Result<GrowthPaths> {
    let mut state = GrowthState::new(params, seed);
    let mut s2 = Vec::with_capacity(n as usize);
    let mut c1 = Vec::with_capacity(n as usize);
    s2.push(state.s2());
    c1.push(state.c1_size());
    while state.n() < n {
        state.grow_step()?;
        s2.push(state.s2());
        c1.push(state.c1_size());
    }
    Ok(GrowthPaths { s2, c1 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleTrace {
    pub times: Vec<f64>,
    /// `w_k = 2 pi^2 S_2(k) + 2 pi`, the rate in force on `[T_k, T_{k+1})`.
    pub w: Vec<f64>,
    /// `Lambda(T_k) = int_0^{T_k} w(u) du`.
    pub lambda: Vec<f64>,
    /// `M(T_k) = |C_1(k)| exp(-Lambda(T_k))`.
    pub m: Vec<f64>,
    /// `exp(-alpha T_k) |C_1(k)|`; present when `pi <= pi_c(2)`.
    pub rescaled: Option<Vec<f64>>,
}

/// Integrates the piecewise-constant rate along the clock and evaluates the
/// supermartingale at every arrival.
pub fn martingale_trace(
    s2_path: &[f64],
    c1_path: &[u64],
    clock: &YuleClock,
    pi: f64,
) -> Result<MartingaleTrace> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::ProbabilityOutOfRange(pi));
    }
    let n = clock.len();
    if s2_path.len() != n || c1_path.len() != n {
        return Err(Error::LengthMismatch(format!(
            "s2 path {}, c1 path {}, clock {}",
            s2_path.len(),
            c1_path.len(),
            n
        )));
    }
    let w: Vec<f64> = s2_path
        .iter()
        .map(|s| 2.0 * pi * pi * s + 2.0 * pi)
        .collect();
    let mut lambda = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        if k > 0 {
            acc += (clock.times[k] - clock.times[k - 1]) * w[k - 1];
        }
        lambda.push(acc);
    }
    let m = c1_path
        .iter()
        .zip(&lambda)
        .map(|(&c, l)| c as f64 * (-l).exp())
        .collect();
    let rescaled = growth_exponent_m2(pi).ok().map(|alpha| {
        c1_path
            .iter()
            .zip(&clock.times)
            .map(|(&c, t)| c as f64 * (-alpha * t).exp())
            .collect()
    });
    Ok(MartingaleTrace {
        times: clock.times.clone(),
        w,
        lambda,
        m,
        rescaled,
    })
}

/// Salt separating the arrival-clock stream from the graph stream of a trial.
const CLOCK_STREAM: u64 = 0x5955_4C45_434C_4F43;

/// `M(T_k)` at the given vertex counts for each of `trials` independent
/// (graph, clock) pairs; row `i` is trial `i`. Checkpoints must be sorted
/// and within `1..=n`, where `n` is the last checkpoint.
pub fn martingale_at_checkpoints(
    params: ModelParams,
    checkpoints: &[u64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = match checkpoints.last() {
        Some(&n) if checkpoints[0] >= 1 && checkpoints.windows(2).all(|w| w[0] < w[1]) => n,
        _ => {
            return Err(Error::InvalidConfig(
                "checkpoints must be increasing and start at 1 or later".into(),
            ))
        }
    };
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let paths = record_paths(params, n, mix_seed(seed, i))?;
            let clock = sample_arrival_times(n as usize, mix_seed(seed ^ CLOCK_STREAM, i))?;
            let trace = martingale_trace(&paths.s2, &paths.c1, &clock, params.pi())?;
            Ok(checkpoints
                .iter()
                .map(|&k| trace.m[k as usize - 1])
                .collect())
        })
        .collect()
}
