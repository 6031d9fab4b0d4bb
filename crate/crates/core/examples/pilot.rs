//! Pilot runs behind the frozen Monte Carlo thresholds in the acceptance
//! suite. Uses its own seed so the acceptance runs stay out of sample.
//!
//!     cargo run --release -p perc-lab-core --example pilot

use perc_lab::analytic::ModelParams;
use perc_lab::continuous_time::martingale_at_checkpoints;
use perc_lab::experiments::{run_trajectories, EnsembleConfig};
use perc_lab::stats::mean_stderr;

const PILOT_SEED: u64 = 314_159;

fn quantiles(mut xs: Vec<f64>) -> String {
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| xs[((xs.len() - 1) as f64 * p).round() as usize];
    format!(
        "min {:.3} q05 {:.3} q25 {:.3} median {:.3} q75 {:.3} q95 {:.3} max {:.3}",
        q(0.0),
        q(0.05),
        q(0.25),
        q(0.5),
        q(0.75),
        q(0.95),
        q(1.0)
    )
}

fn main() {
    // Spread of the rescaled maximum at pi = 0.12.
    let config = EnsembleConfig::new(ModelParams::new(2, 0.12).unwrap(), 100_000, 200, PILOT_SEED);
    let run = run_trajectories(&config).unwrap();
    let last = run.checkpoints.len() - 1;
    for i in [last - 4, last] {
        let xs: Vec<f64> = run.at_checkpoint(i).map(|r| r.rescaled_max).collect();
        let ms = mean_stderr(&xs);
        let sd = ms.stderr * (xs.len() as f64).sqrt();
        println!(
            "rescaled_max n = {}: mean {:.4} sd {:.4} cv {:.4}",
            run.checkpoints[i],
            ms.mean,
            sd,
            sd / ms.mean
        );
    }

    // Last-decade ratio of the rescaled component of vertex 1 at pi = 0.1.
    let config = EnsembleConfig::new(ModelParams::new(2, 0.1).unwrap(), 100_000, 200, PILOT_SEED);
    let run = run_trajectories(&config).unwrap();
    let last = run.checkpoints.len() - 1;
    let decade = run.checkpoints.iter().position(|&n| n == 10_000).unwrap();
    let ratios: Vec<f64> = run
        .trials
        .iter()
        .map(|t| t.records[last].rescaled_c1 / t.records[decade].rescaled_c1)
        .collect();
    println!(
        "rescaled_c1 ratio n = 1e5 / 1e4: {}",
        quantiles(ratios.clone())
    );
    for (lo, hi) in [(1.0 / 3.0, 3.0), (0.5, 2.0), (0.25, 4.0)] {
        let inside = ratios.iter().filter(|&&r| (lo..=hi).contains(&r)).count();
        println!(
            "  in [{lo:.3}, {hi}]: {:.3}",
            inside as f64 / ratios.len() as f64
        );
    }

    // Supermartingale means at pi = 0.1.
    let cps = [1, 10, 100, 1000, 10_000];
    let rows = martingale_at_checkpoints(ModelParams::new(2, 0.1).unwrap(), &cps, 200, PILOT_SEED)
        .unwrap();
    for (j, n) in cps.iter().enumerate() {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let ms = mean_stderr(&col);
        println!("M(T_{n}): mean {:.4} se {:.4}", ms.mean, ms.stderr);
    }
}
