use perc_lab::analytic::{limiting_susceptibility, solve_type_recursion, ModelParams};
use perc_lab::mbrw::{estimate_mean_size, Label, MbrwConfig, DEFAULT_NODE_CAP};

#[test]
fn young_root_matches_recursion() {
    let params = ModelParams::new(2, 0.1).unwrap();
    let x = solve_type_recursion(&params).unwrap();
    assert!((x.x_young - 1.5396).abs() < 1e-4);
    let config = MbrwConfig::new(params, DEFAULT_NODE_CAP).unwrap();
    let est = estimate_mean_size(&config, Label::Young, 400_000, 11).unwrap();
    assert!((est.mean - x.x_young).abs() < 3.0 * est.stderr, "{est:?}");
}

#[test]
fn old_root_matches_susceptibility_limit_for_three_out_edges() {
    let params = ModelParams::new(3, 0.07).unwrap();
    let x = solve_type_recursion(&params).unwrap();
    let config = MbrwConfig::new(params, DEFAULT_NODE_CAP).unwrap();
    let est = estimate_mean_size(&config, Label::Old, 400_000, 12).unwrap();
    assert!(
        (est.mean - x.x_old).abs() < 3.0 * est.stderr,
        "{est:?} vs {}",
        x.x_old
    );
}

#[test]
fn old_root_mean_tracks_pi() {
    let mut previous = 1.0;
    for pi in [0.02, 0.06, 0.1] {
        let config = MbrwConfig::new(ModelParams::new(2, pi).unwrap(), DEFAULT_NODE_CAP).unwrap();
        let est = estimate_mean_size(&config, Label::Old, 100_000, 13).unwrap();
        let target = limiting_susceptibility(pi).unwrap();
        assert!(
            (est.mean - target).abs() < 4.0 * est.stderr,
            "pi = {pi}: {est:?} vs {target}"
        );
        assert!(est.mean > previous);
        previous = est.mean;
    }
}
