use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use perc_lab::analytic::{
    discriminant, drift_fixed_points, growth_exponent, identity_suite, kernel_spectral_radius,
    limiting_susceptibility_for, solve_type_recursion, IdentityCheck, ModelParams,
};
use perc_lab::experiments::{
    persistence_experiment, run_ensemble, susceptibility_residuals, tail_experiment, with_threads,
    write_mbrw_csv, EnsembleConfig, Manifest, DEFAULT_CHECKPOINT_RATIO, DEFAULT_FIRST_CHECKPOINT,
    DEFAULT_K_PERSISTENCE, DEFAULT_TRUNCATION_LEVELS,
};
use perc_lab::graph::GrowthState;
use perc_lab::mbrw::{
    estimate_mean_size, simulate_trials, Label, MbrwConfig, SizeEstimate, DEFAULT_NODE_CAP,
};
use perc_lab::oracle::{exact_expected_susceptibilities, exact_root_component_distribution};
use perc_lab::stats::sig10;

#[derive(Parser)]
#[command(
    name = "perc-lab",
    version,
    about = "Subcritical percolation on uniform attachment graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form threshold, exponent and susceptibility limit
    Analytic(ModelArgs),
    /// Grow one percolated graph and report its component statistics
    Grow(GrowArgs),
    /// Run an ensemble of trajectories and summarize it per checkpoint
    Ensemble(EnsembleArgs),
    /// Sample killed branching random walk trees
    Mbrw(MbrwArgs),
    /// Exact expectations for graphs of at most six vertices
    Oracle(OracleArgs),
    /// Fraction of trials whose largest component is rooted in the first K vertices
    Persistence(EnsembleArgs),
    /// Decay of |S2(n) - s2(inf)| along the checkpoint schedule
    Residuals(EnsembleArgs),
    /// Size-biased component size CCDF at the final checkpoint
    Tail(EnsembleArgs),
    /// Run the analytic identity suite
    Validate,
}

#[derive(Args)]
struct ModelArgs {
    /// Out-edges per arriving vertex
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Edge-retention probability
    #[arg(long)]
    pi: f64,
}

#[derive(Args)]
struct GrowArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of vertices
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Truncation level for S2 (repeatable)
    #[arg(long = "L")]
    levels: Vec<u64>,
}

#[derive(Args)]
struct EnsembleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Final number of vertices
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Ratio of consecutive checkpoints
    #[arg(long = "checkpoint-ratio", default_value_t = DEFAULT_CHECKPOINT_RATIO)]
    checkpoint_ratio: f64,
    /// First checkpoint
    #[arg(long, default_value_t = DEFAULT_FIRST_CHECKPOINT)]
    n0: u64,
    /// Truncation level for S2 (repeatable)
    #[arg(long = "L")]
    levels: Vec<u64>,
    /// Persistence cutoff (repeatable for the persistence subcommand)
    #[arg(long = "K")]
    ks: Vec<u64>,
    /// Output directory for CSV files and manifest.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct MbrwArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Label of the root particle: O or Y
    #[arg(long = "root-label", default_value = "O")]
    root_label: String,
    /// Per-tree particle cap
    #[arg(long = "node-cap", default_value_t = DEFAULT_NODE_CAP)]
    node_cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: u64,
    /// Also report the law of the component of this vertex
    #[arg(long)]
    v: Option<u64>,
}

enum CliError {
    /// Bad flag value; exit code 1.
    Usage(String),
    /// Failure after validation; exit code 2.
    Runtime(perc_lab::Error),
}

impl From<perc_lab::Error> for CliError {
    fn from(e: perc_lab::Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

impl ModelArgs {
    fn params(&self) -> CliResult<ModelParams> {
        if self.m == 0 {
            return usage("--m: out-degree must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.pi) {
            return usage(format!("--pi: {} is outside [0, 1]", self.pi));
        }
        Ok(ModelParams::new(self.m, self.pi)?)
    }

    /// Parameters at which the growth exponent exists (`pi <= pi_c`).
    fn subcritical(&self, strict: bool) -> CliResult<ModelParams> {
        let p = self.params()?;
        let pi_c = p.critical_threshold();
        if p.pi() > pi_c || (strict && p.pi() == pi_c) {
            return usage(format!(
                "--pi: pi = {} exceeds pi_c({}) = {:.10}; subcritical quantities are undefined",
                p.pi(),
                p.m(),
                pi_c
            ));
        }
        Ok(p)
    }
}

fn check_threads(threads: Option<usize>) -> CliResult<()> {
    if threads == Some(0) {
        return usage("--threads: must be at least 1");
    }
    Ok(())
}

impl EnsembleArgs {
    fn config(&self, params: ModelParams, multiple_k: bool) -> CliResult<EnsembleConfig> {
        if self.n == 0 || self.n > u64::from(u32::MAX) {
            return usage(format!("--n: {} is outside [1, 4294967295]", self.n));
        }
        if self.trials == 0 {
            return usage("--trials: must be at least 1");
        }
        if !(self.checkpoint_ratio > 1.0 && self.checkpoint_ratio.is_finite()) {
            return usage(format!(
                "--checkpoint-ratio: {} must exceed 1",
                self.checkpoint_ratio
            ));
        }
        if self.n0 == 0 {
            return usage("--n0: must be at least 1");
        }
        if self.levels.contains(&0) {
            return usage("--L: truncation levels must be positive");
        }
        if !multiple_k && self.ks.len() > 1 {
            return usage("--K: this subcommand takes a single value");
        }
        check_threads(self.threads)?;
        let mut config = EnsembleConfig::new(params, self.n, self.trials, self.seed);
        config.checkpoint_ratio = self.checkpoint_ratio;
        config.first_checkpoint = self.n0;
        if !self.levels.is_empty() {
            config.levels = self.levels.clone();
        }
        config.k_persistence = self.ks.first().copied().unwrap_or(DEFAULT_K_PERSISTENCE);
        config.output_dir = self.out.clone();
        config
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

/// Rounds every non-integer number to ten significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map(sig10).map_or(Value::Null, |x| json!(x)),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

fn emit(v: Value) {
    let text = serde_json::to_string_pretty(&round_json(v)).expect("JSON values always serialize");
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn to_json<T: serde::Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Runtime(e.into()))
}

fn analytic(args: &ModelArgs) -> CliResult<()> {
    let p = args.subcritical(false)?;
    let alpha = growth_exponent(&p)?;
    let recursion = solve_type_recursion(&p).ok();
    let fixed_points = if p.m() == 2 {
        drift_fixed_points(p.pi()).ok().map(|(a, b)| json!([a, b]))
    } else {
        None
    };
    let spectral = (alpha > 0.0 && alpha < 1.0)
        .then(|| kernel_spectral_radius(p.m(), alpha).ok())
        .flatten();
    emit(json!({
        "m": p.m(),
        "pi": p.pi(),
        "pi_c": p.critical_threshold(),
        "discriminant": discriminant(p.m(), p.pi()),
        "alpha": alpha,
        "s2_inf": limiting_susceptibility_for(&p).ok(),
        "drift_fixed_points": fixed_points,
        "x_old": recursion.map(|r| r.x_old),
        "x_young": recursion.map(|r| r.x_young),
        "spectral_radius_at_alpha": spectral,
    }));
    Ok(())
}

fn grow(args: &GrowArgs) -> CliResult<()> {
    let p = args.model.params()?;
    if args.n == 0 || args.n > u64::from(u32::MAX) {
        return usage(format!("--n: {} is outside [1, 4294967295]", args.n));
    }
    if args.levels.contains(&0) {
        return usage("--L: truncation levels must be positive");
    }
    let levels = if args.levels.is_empty() {
        DEFAULT_TRUNCATION_LEVELS.to_vec()
    } else {
        args.levels.clone()
    };
    let mut state = GrowthState::new(p, args.seed);
    state.run_to(args.n)?;
    let snap = state.snapshot(&levels);
    // Largest component made up solely of the last half of the arrivals.
    let half = args.n / 2;
    let late_max = state
        .forest()
        .components()
        .filter(|&(_, _, oldest)| u64::from(oldest) >= half)
        .map(|(_, size, _)| u64::from(size))
        .max()
        .unwrap_or(0);
    let trunc: serde_json::Map<String, Value> = snap
        .s2_trunc
        .iter()
        .map(|(l, v)| (l.to_string(), json!(v)))
        .collect();
    emit(json!({
        "m": p.m(),
        "pi": p.pi(),
        "n": snap.n,
        "seed": args.seed,
        "s2": snap.s2,
        "s3": snap.s3,
        "s4": snap.s4,
        "s2_trunc": trunc,
        "components": state.forest().component_count(),
        "max_size": snap.max_size,
        "max_oldest": snap.max_oldest,
        "c1_size": snap.c1_size,
        "late_max_size": late_max,
    }));
    Ok(())
}

fn ensemble(args: &EnsembleArgs) -> CliResult<()> {
    let config = args.config(args.model.params()?, false)?;
    let out = with_threads(args.threads, || run_ensemble(&config))??;
    for c in &out.summary.checkpoints {
        eprintln!(
            "n = {}: S2 = {:.6} +- {:.2e}, rescaled max = {:.6}, persistence(K = {}) = {:.4}",
            c.n,
            c.s2_mean,
            c.s2_stderr,
            c.rescaled_max_mean,
            out.summary.k_persistence,
            c.persistence_fraction
        );
    }
    emit(json!({
        "alpha": out.run.alpha,
        "summary": to_json(&out.summary)?,
        "out": args.out,
    }));
    Ok(())
}

fn persistence(args: &EnsembleArgs) -> CliResult<()> {
    let config = args.config(args.model.params()?, true)?;
    let table = with_threads(args.threads, || persistence_experiment(&config, &args.ks))??;
    for r in &table.rows {
        eprintln!(
            "n = {}, K = {}: fraction = {:.4} +- {:.4}, fixation = {:.4}",
            r.n, r.k, r.fraction, r.stderr, r.fixation_fraction
        );
    }
    emit(json!({ "persistence": to_json(&table)?, "out": args.out }));
    Ok(())
}

fn residuals(args: &EnsembleArgs) -> CliResult<()> {
    let config = args.config(args.model.subcritical(true)?, false)?;
    let table = with_threads(args.threads, || susceptibility_residuals(&config))??;
    for r in &table.rows {
        eprintln!(
            "n = {}: |S2 - s2(inf)| = {:.6e} +- {:.2e}",
            r.n, r.mean_abs_residual, r.stderr
        );
    }
    emit(json!({ "residuals": to_json(&table)?, "out": args.out }));
    Ok(())
}

fn tail(args: &EnsembleArgs) -> CliResult<()> {
    let config = args.config(args.model.params()?, false)?;
    let table = with_threads(args.threads, || tail_experiment(&config))??;
    eprintln!(
        "n = {}: {} distinct component sizes",
        config.n_max,
        table.rows.len()
    );
    emit(json!({ "tail": to_json(&table)?, "out": args.out }));
    Ok(())
}

fn mbrw(args: &MbrwArgs) -> CliResult<()> {
    let p = args.model.params()?;
    let root: Label = match args.root_label.parse() {
        Ok(l) => l,
        Err(_) => {
            return usage(format!(
                "--root-label: expected O or Y, got {:?}",
                args.root_label
            ))
        }
    };
    if args.trials < 2 {
        return usage("--trials: at least two trees are needed");
    }
    if args.node_cap == 0 {
        return usage("--node-cap: must be at least 1");
    }
    check_threads(args.threads)?;
    let config = MbrwConfig::new(p, args.node_cap)?;
    let estimate = match &args.out {
        None => with_threads(args.threads, || {
            estimate_mean_size(&config, root, args.trials, args.seed)
        })??,
        Some(dir) => {
            let results = with_threads(args.threads, || {
                simulate_trials(&config, root, args.trials, args.seed)
            })?;
            std::fs::create_dir_all(dir).map_err(|e| {
                CliError::Runtime(perc_lab::Error::Io {
                    path: dir.clone(),
                    source: e,
                })
            })?;
            write_mbrw_csv(&dir.join("mbrw.csv"), root, &results)?;
            Manifest::for_mbrw(&config, root, args.trials, args.seed)
                .write(&dir.join("manifest.json"))?;
            SizeEstimate::from_results(&results)?
        }
    };
    emit(json!({
        "m": p.m(),
        "pi": p.pi(),
        "root_label": root.as_str(),
        "s2_inf": limiting_susceptibility_for(&p).ok(),
        "mean": estimate.mean,
        "stderr": estimate.stderr,
        "truncation_rate": estimate.truncation_rate,
        "trials": estimate.trials,
        "out": args.out,
    }));
    Ok(())
}

fn oracle(args: &OracleArgs) -> CliResult<()> {
    let p = args.model.params()?;
    if p.m() != 2 {
        return usage("--m: exact enumeration is only available for m = 2");
    }
    if !(1..=6).contains(&args.n) {
        return usage(format!("--n: {} is outside 1..=6", args.n));
    }
    if let Some(v) = args.v {
        if !(1..=args.n).contains(&v) {
            return usage(format!("--v: vertex {v} is not in [1, {}]", args.n));
        }
    }
    let e = exact_expected_susceptibilities(&p, args.n)?;
    let pmf = match args.v {
        Some(v) => {
            let law = exact_root_component_distribution(&p, args.n, v)?;
            let map: serde_json::Map<String, Value> =
                law.iter().map(|(k, q)| (k.to_string(), json!(q))).collect();
            Some(Value::Object(map))
        }
        None => None,
    };
    emit(json!({
        "pi": p.pi(),
        "n": args.n,
        "E_S2": e.s2,
        "E_S3": e.s3,
        "v": args.v,
        "component_pmf": pmf,
    }));
    Ok(())
}

fn reference_checks() -> Vec<IdentityCheck> {
    [(0.08, 0.1794), (0.12, 0.3030)]
        .into_iter()
        .map(|(pi, expected)| {
            let alpha = ModelParams::new(2, pi).and_then(|p| growth_exponent(&p));
            let deviation = alpha.map_or(f64::NAN, |a| (a - expected).abs());
            IdentityCheck {
                name: format!("alpha({pi}) = {expected} to four decimals"),
                deviation,
                tolerance: 5e-5,
                passed: deviation < 5e-5,
            }
        })
        .collect()
}

/// Returns whether every check passed.
fn validate() -> CliResult<bool> {
    let mut checks = identity_suite();
    checks.extend(reference_checks());
    let failed: Vec<&IdentityCheck> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!(
            "FAILED {}: deviation {:e} (tolerance {:e})",
            c.name, c.deviation, c.tolerance
        );
    }
    emit(json!({
        "passed": failed.is_empty(),
        "total": checks.len(),
        "failed": failed.len(),
        "checks": to_json(&checks)?,
    }));
    Ok(failed.is_empty())
}

fn run(cli: Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Analytic(a) => analytic(a)?,
        Command::Grow(a) => grow(a)?,
        Command::Ensemble(a) => ensemble(a)?,
        Command::Mbrw(a) => mbrw(a)?,
        Command::Oracle(a) => oracle(a)?,
        Command::Persistence(a) => persistence(a)?,
        Command::Residuals(a) => residuals(a)?,
        Command::Tail(a) => tail(a)?,
        Command::Validate => return validate(),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
