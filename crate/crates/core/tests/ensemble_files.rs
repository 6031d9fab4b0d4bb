use std::fs;

use perc_lab::analytic::ModelParams;
use perc_lab::experiments::{persistence_experiment, run_ensemble, EnsembleConfig};
use perc_lab::stats::mean_stderr;

fn read_csv(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn summary_is_derived_from_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = EnsembleConfig::new(ModelParams::new(2, 0.11).unwrap(), 30_000, 25, 17);
    config.k_persistence = 10;
    config.output_dir = Some(dir.path().to_path_buf());
    let out = run_ensemble(&config).unwrap();

    let (th, traj) = read_csv(&dir.path().join("trajectory.csv"));
    let (sh, summary) = read_csv(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), out.run.checkpoints.len());
    assert_eq!(traj.len(), 25 * out.run.checkpoints.len());

    let f =
        |row: &Vec<String>, h: &[String], name: &str| row[column(h, name)].parse::<f64>().unwrap();
    for srow in &summary {
        let n = srow[column(&sh, "n")].clone();
        let rows: Vec<&Vec<String>> = traj.iter().filter(|r| r[column(&th, "n")] == n).collect();
        assert_eq!(rows.len(), 25);
        for (traj_col, mean_col, se_col) in [
            ("s2", "s2_mean", "s2_stderr"),
            ("rescaled_max", "rescaled_max_mean", "rescaled_max_stderr"),
            ("rescaled_c1", "rescaled_c1_mean", "rescaled_c1_stderr"),
        ] {
            let xs: Vec<f64> = rows.iter().map(|r| f(r, &th, traj_col)).collect();
            let ms = mean_stderr(&xs);
            assert!((ms.mean - f(srow, &sh, mean_col)).abs() < 1e-9);
            assert!((ms.stderr - f(srow, &sh, se_col)).abs() < 1e-9);
        }
        let persistent = rows
            .iter()
            .filter(|r| f(r, &th, "max_oldest") <= 10.0)
            .count();
        assert!((persistent as f64 / 25.0 - f(srow, &sh, "persistence_fraction")).abs() < 1e-9);
    }
}

#[test]
fn rows_sorted_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = EnsembleConfig::new(ModelParams::new(2, 0.13).unwrap(), 10_000, 9, 5);
    config.levels = vec![1000, 5, 50];
    config.output_dir = Some(dir.path().to_path_buf());
    run_ensemble(&config).unwrap();
    let (h, rows) = read_csv(&dir.path().join("trajectory.csv"));
    let keys: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let (l5, l50, l1000) = (
        column(&h, "s2_trunc_5"),
        column(&h, "s2_trunc_50"),
        column(&h, "s2_trunc_1000"),
    );
    let s2 = column(&h, "s2");
    let alpha = config.scaling_exponent();
    for r in &rows {
        let v = |i: usize| r[i].parse::<f64>().unwrap();
        assert!(v(l5) <= v(l50) && v(l50) <= v(l1000) && v(l1000) <= v(s2) + 1e-12);
        let n: f64 = r[1].parse().unwrap();
        let max_size = v(column(&h, "max_size"));
        let rescaled = v(column(&h, "rescaled_max"));
        assert!(rescaled > 0.0);
        assert!((rescaled - n.powf(-alpha) * max_size).abs() < 1e-12 * max_size);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let bodies = |seed: u64| {
        let dir = tempfile::tempdir().unwrap();
        let mut config = EnsembleConfig::new(ModelParams::new(2, 0.1).unwrap(), 5000, 7, seed);
        config.output_dir = Some(dir.path().to_path_buf());
        run_ensemble(&config).unwrap();
        persistence_experiment(&config, &[1, 3]).unwrap();
        [
            "trajectory.csv",
            "summary.csv",
            "rescaled_max.csv",
            "persistence.csv",
        ]
        .map(|f| fs::read(dir.path().join(f)).unwrap())
    };
    assert_eq!(bodies(3), bodies(3));
    assert_ne!(bodies(3)[0], bodies(4)[0]);
}

#[test]
fn late_arrivals_form_small_components() {
    // Components born in the second half of the process stay far smaller
    // than the component of an early vertex.
    let params = ModelParams::new(2, 0.12).unwrap();
    let mut late_max = Vec::new();
    let mut overall_max = Vec::new();
    for seed in 0..10 {
        let mut g = perc_lab::graph::GrowthState::new(params, seed);
        g.run_to(50_000).unwrap();
        let late = g
            .forest()
            .components()
            .filter(|&(_, _, oldest)| oldest >= 25_000)
            .map(|(_, size, _)| size)
            .max()
            .unwrap();
        late_max.push(f64::from(late));
        overall_max.push(g.snapshot(&[]).max_size as f64);
    }
    let late = mean_stderr(&late_max).mean;
    let overall = mean_stderr(&overall_max).mean;
    assert!(late < overall, "{late} vs {overall}");
}
