//! Command-line driver for similarity-network experiments: generate or load
//! a collection, sweep network metrics against random baselines, detect and
//! evaluate communities, grid-search parameters, and locate community
//! prototypes. Every command is deterministic given `--seed`.

mod config;

use clap::{Args, Parser, Subcommand};
use config::Config;
use covernet::datasets::{
    generate_collection, load_collection, sample_setup, save_collection, Collection, SetupSpec,
};
use covernet::error::Error;
use covernet::eval::{map_per_query, write_eval_csv, EvalReport};
use covernet::experiment::{
    evaluate_trial, in_sample_setups, run_detect_eval, run_grid_search, write_detect_eval_csv,
    write_grid_csv, Algorithm, AlgorithmParams, DetectEvalRow, GridSearchResult,
};
use covernet::matrix::DissimilarityMatrix;
use covernet::metrics::{threshold_sweep, write_sweep_csv};
use covernet::prototype::{run_prototype_experiment, write_prototype_csv, PrototypeMethod};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "covernet",
    version,
    about = "Similarity-network community detection, retrieval re-ranking, and prototype analysis"
)]
struct Cli {
    /// RNG seed; outputs are byte-identical across runs with the same seed.
    #[arg(long)]
    seed: u64,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "covernet-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

/// Exactly one input source: companion files or the synthetic generator.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputSource {
    /// Directory holding matrix.txt, durations.txt, labels.txt.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    /// Generate a synthetic collection with this many ground-truth groups.
    #[arg(long)]
    groups: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic collection and write its companion files.
    Generate {
        /// Number of ground-truth groups to draw.
        #[arg(long)]
        groups: usize,
    },
    /// Sweep thresholds, writing real metrics beside random baselines.
    Sweep {
        #[command(flatten)]
        input: InputSource,
        /// Monte Carlo trials per baseline (default 100, or `er_trials`).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Detect communities per setup trial and score F, MAP, and the
    /// relative MAP increase.
    DetectEval {
        #[command(flatten)]
        input: InputSource,
        /// Comma-separated algorithm names, or `all`.
        #[arg(long)]
        algorithm: String,
        /// Comma-separated setup names (1.1-1.4, 2.1-2.4, 3).
        #[arg(long)]
        setup: String,
        /// Override the setups' trial counts.
        #[arg(long)]
        trials: Option<usize>,
        /// Also write per-query average precisions for trial 0.
        #[arg(long)]
        per_query: bool,
    },
    /// In-sample grid search over detector parameters on setups 1.1-1.4.
    Grid {
        #[command(flatten)]
        input: InputSource,
        /// Comma-separated algorithm names, or `all`.
        #[arg(long)]
        algorithm: String,
        /// Override the in-sample setups' trial counts.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Prototype detection hit rates per community cardinality.
    Prototype {
        #[command(flatten)]
        input: InputSource,
        /// closeness, mst, or both.
        #[arg(long, default_value = "both")]
        method: String,
    },
}

/// Errors carry the exit code: 2 for usage problems and missing inputs,
/// 1 for everything else.
enum CliError {
    Usage(String),
    App(Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::App(Error::Io { source, .. })
                if source.kind() == std::io::ErrorKind::NotFound =>
            {
                2
            }
            CliError::App(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => msg.clone(),
            CliError::App(e) => e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::App(e)
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    std::fs::create_dir_all(&cli.out).map_err(|e| {
        CliError::App(Error::Io {
            path: cli.out.clone(),
            source: e,
        })
    })?;

    match &cli.command {
        Command::Generate { groups } => cmd_generate(&cli, &config, *groups),
        Command::Sweep { input, trials } => cmd_sweep(&cli, &config, input, *trials),
        Command::DetectEval {
            input,
            algorithm,
            setup,
            trials,
            per_query,
        } => cmd_detect_eval(&cli, &config, input, algorithm, setup, *trials, *per_query),
        Command::Grid {
            input,
            algorithm,
            trials,
        } => cmd_grid(&cli, &config, input, algorithm, *trials),
        Command::Prototype { input, method } => cmd_prototype(&cli, &config, input, method),
    }
}

fn load_input(
    cli: &Cli,
    config: &Config,
    input: &InputSource,
) -> Result<(Collection, DissimilarityMatrix), CliError> {
    match (&input.input_dir, input.groups) {
        (Some(dir), None) => Ok(load_collection(
            &dir.join("matrix.txt"),
            &dir.join("durations.txt"),
            &dir.join("labels.txt"),
        )?),
        (None, Some(groups)) => {
            let params = config.generator_params()?;
            Ok(generate_collection(&params, groups, cli.seed)?)
        }
        _ => unreachable!("clap enforces exactly one input source"),
    }
}

fn create_file(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    let file = std::fs::File::create(path).map_err(|e| {
        CliError::App(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })?;
    Ok(std::io::BufWriter::new(file))
}

fn io_at(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| {
        CliError::App(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

fn cmd_generate(cli: &Cli, config: &Config, groups: usize) -> Result<(), CliError> {
    let params = config.generator_params()?;
    let (collection, matrix) = generate_collection(&params, groups, cli.seed)?;
    save_collection(
        &collection,
        &matrix,
        &cli.out.join("matrix.txt"),
        &cli.out.join("durations.txt"),
        &cli.out.join("labels.txt"),
    )?;
    eprintln!(
        "generated {} items in {} groups -> {}",
        collection.n(),
        groups,
        cli.out.display()
    );
    Ok(())
}

fn cmd_sweep(
    cli: &Cli,
    config: &Config,
    input: &InputSource,
    trials: Option<usize>,
) -> Result<(), CliError> {
    let (_, matrix) = load_input(cli, config, input)?;
    let thresholds = config.sweep_thresholds()?;
    let trials = trials.unwrap_or(config.er_trials()?);
    let mode = config.efficiency_mode()?;
    let rows = threshold_sweep(&matrix, &thresholds, trials, cli.seed, mode)?;
    let path = cli.out.join("sweep.csv");
    let mut out = create_file(&path)?;
    write_sweep_csv(&mut out, &rows).map_err(io_at(&path))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn parse_algorithms(raw: &str) -> Result<Vec<Algorithm>, CliError> {
    if raw.eq_ignore_ascii_case("all") {
        return Ok(Algorithm::all().to_vec());
    }
    raw.split(',')
        .map(|tok| {
            Algorithm::parse(tok.trim())
                .ok_or_else(|| CliError::Usage(format!("unknown algorithm {tok:?}")))
        })
        .collect()
}

fn parse_setups(
    raw: &str,
    seed: u64,
    trials: Option<usize>,
) -> Result<Vec<(String, SetupSpec)>, CliError> {
    raw.split(',')
        .map(|tok| {
            let name = tok.trim();
            let mut spec = SetupSpec::standard(name, seed)
                .ok_or_else(|| CliError::Usage(format!("unknown setup {name:?}")))?;
            if let Some(t) = trials {
                if t == 0 {
                    return Err(CliError::Usage("trials must be at least 1".into()));
                }
                spec.n_t = t;
            }
            Ok((name.to_string(), spec))
        })
        .collect()
}

fn cmd_detect_eval(
    cli: &Cli,
    config: &Config,
    input: &InputSource,
    algorithm: &str,
    setup: &str,
    trials: Option<usize>,
    per_query: bool,
) -> Result<(), CliError> {
    let algorithms = parse_algorithms(algorithm)?;
    let setups = parse_setups(setup, cli.seed, trials)?;
    let (collection, matrix) = load_input(cli, config, input)?;

    let mut rows: Vec<DetectEvalRow> = Vec::new();
    for &algorithm in &algorithms {
        let params = config.algorithm_params(AlgorithmParams::tuned_for(algorithm))?;
        for (name, spec) in &setups {
            let row = run_detect_eval(&collection, &matrix, algorithm, &params, spec, name)?;
            eprintln!(
                "timing: {} setup {} mean detect {:.3}s over {} trials",
                algorithm.name(),
                name,
                row.mean_seconds,
                row.trials
            );
            rows.push(row);
        }
    }
    let path = cli.out.join("detect_eval.csv");
    let mut out = create_file(&path)?;
    write_detect_eval_csv(&mut out, &rows).map_err(io_at(&path))?;
    eprintln!("wrote {}", path.display());

    if per_query {
        // Per-query report for trial 0 of the first (algorithm, setup) pair.
        let algorithm = algorithms[0];
        let params = config.algorithm_params(AlgorithmParams::tuned_for(algorithm))?;
        let (name, spec) = &setups[0];
        let (sc, sm) = sample_setup(&collection, &matrix, spec, 0)?;
        let outcome = evaluate_trial(&sc, &sm, algorithm, &params, spec.seed)?;
        let sym = sm.symmetrize();
        let report = EvalReport {
            mean_precision: outcome.precision,
            mean_recall: outcome.recall,
            f: outcome.f,
            map: Some(outcome.map_original),
            delta: Some(outcome.delta),
            per_query: map_per_query(&sym, &sc.truth_partition())?,
        };
        let path = cli
            .out
            .join(format!("eval_{}_{}_trial0.csv", algorithm.name(), name));
        let mut out = create_file(&path)?;
        write_eval_csv(&mut out, &report, true).map_err(io_at(&path))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_grid(
    cli: &Cli,
    config: &Config,
    input: &InputSource,
    algorithm: &str,
    trials: Option<usize>,
) -> Result<(), CliError> {
    let algorithms = parse_algorithms(algorithm)?;
    let (collection, matrix) = load_input(cli, config, input)?;
    let grid = config.param_grid()?;
    let mut setups = in_sample_setups(cli.seed);
    if let Some(t) = trials {
        if t == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        for (_, spec) in &mut setups {
            spec.n_t = t;
        }
    }

    let mut results: Vec<GridSearchResult> = Vec::new();
    for &algorithm in &algorithms {
        let base = config.algorithm_params(AlgorithmParams::tuned_for(algorithm))?;
        let result = run_grid_search(&collection, &matrix, algorithm, &grid, &base, &setups)?;
        let best_f = &result.rows[result.best_by_f];
        let best_map = &result.rows[result.best_by_map];
        eprintln!(
            "{}: best F {:.3} at w_th={} d_th={}; best MAP {:.3} at w_th={} d_th={}",
            algorithm.name(),
            best_f.mean_f,
            best_f.params.community.w_th,
            best_f.params.d_th,
            best_map.mean_map_refined,
            best_map.params.community.w_th,
            best_map.params.d_th,
        );
        results.push(result);
    }
    let path = cli.out.join("grid.csv");
    let mut out = create_file(&path)?;
    write_grid_csv(&mut out, &results).map_err(io_at(&path))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_prototype(
    cli: &Cli,
    config: &Config,
    input: &InputSource,
    method: &str,
) -> Result<(), CliError> {
    let methods: Vec<PrototypeMethod> = match method {
        "closeness" => vec![PrototypeMethod::Closeness],
        "mst" => vec![PrototypeMethod::Mst],
        "both" => vec![PrototypeMethod::Closeness, PrototypeMethod::Mst],
        other => return Err(CliError::Usage(format!("unknown method {other:?}"))),
    };
    let (collection, matrix) = load_input(cli, config, input)?;
    let mut rows = Vec::new();
    for method in methods {
        rows.extend(run_prototype_experiment(
            &collection,
            &matrix,
            method,
            cli.seed,
        )?);
    }
    let path = cli.out.join("prototype.csv");
    let mut out = create_file(&path)?;
    write_prototype_csv(&mut out, &rows).map_err(io_at(&path))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
