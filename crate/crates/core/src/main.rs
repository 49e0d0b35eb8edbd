use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use afn::bench::{
    experiment::{save_records, ExperimentConfig},
    lemma3_montecarlo, rho_statistic, run_annulus_experiment, run_experiment,
    summary::save_summary,
    AnnulusExperimentConfig, AnnulusWorkload, Variant,
};
use afn::datasets::{generate, load_dataset, load_movielens, save_dataset, write_id_map, Distribution, GeneratorSpec};
use afn::{default_params, Error, RandomSeed, Result};

#[derive(Parser)]
#[command(name = "afn", version, about = "Approximate furthest neighbor experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as an ascii vector file.
    Gen(GenArgs),
    /// Intrinsic dimensionality statistic mu^2 / (2 sigma^2) of a dataset.
    Rho(RhoArgs),
    /// Run a furthest neighbor grid experiment and write per-query records.
    AfnRun(AfnRunArgs),
    /// Print the default ell and m for a dataset size.
    AfnParams(AfnParamsArgs),
    /// Measure annulus query success on a dataset or planted instances.
    AnnulusRun(AnnulusRunArgs),
    /// Monte Carlo check of the projection tail bounds.
    Lemma3(Lemma3Args),
    /// Convert a MovieLens ratings.csv into a sparse vector file.
    ConvertMovielens(ConvertArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Normal,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RhoArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pairing {
    /// Every combination of the two grids.
    Product,
    /// Element-wise pairs; the grids must have equal length.
    Zip,
}

#[derive(Args)]
struct AfnRunArgs {
    #[arg(long)]
    data: PathBuf,
    /// qd, qi-extremes, qi-maxproj or qi-depth.
    #[arg(long)]
    variant: Variant,
    /// Comma-separated ell values.
    #[arg(long, value_delimiter = ',', required = true)]
    ell_grid: Vec<usize>,
    /// Comma-separated m values.
    #[arg(long, value_delimiter = ',', required = true)]
    m_grid: Vec<usize>,
    #[arg(long, value_enum, default_value = "product")]
    pairing: Pairing,
    #[arg(long)]
    seeds: usize,
    #[arg(long)]
    queries_per_seed: usize,
    /// Master seed from which index and query seeds are derived.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    /// Label written in the dataset column; defaults to the file stem.
    #[arg(long)]
    dataset_id: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write 0 in the wall time column so that reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct AfnParamsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: f64,
}

#[derive(Args)]
struct AnnulusRunArgs {
    #[arg(long, conflicts_with = "planted", required_unless_present = "planted")]
    data: Option<PathBuf>,
    /// Use fresh planted instances of this many points instead of a file.
    #[arg(long)]
    planted: Option<usize>,
    /// Dimension of planted instances.
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    w: f64,
    #[arg(long)]
    c: f64,
    /// Defaults to 4 w r.
    #[arg(long)]
    bucket_width: Option<f64>,
    /// Independent index builds.
    #[arg(long)]
    seeds: usize,
    /// Queries per build (dataset workloads only).
    #[arg(long, default_value_t = 1)]
    queries: usize,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Lemma3Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 1_000_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    map: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 1,
        Error::Invariant(_) => 3,
        _ => 2,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => {
            let kind = match a.kind {
                Kind::Uniform => Distribution::UniformCube,
                Kind::Normal => Distribution::MultivariateNormal,
            };
            let data = generate(&GeneratorSpec { kind, n: a.n, d: a.d, seed: a.seed })?;
            save_dataset(&data, &a.out)
        }
        Command::Rho(a) => {
            let data = load_dataset(&a.data)?;
            println!("{}", rho_statistic(&data, a.pairs, RandomSeed(a.seed))?);
            Ok(())
        }
        Command::AfnParams(a) => {
            let p = default_params(a.n, a.c)?;
            println!("ell={}\nm={}", p.ell, p.m);
            Ok(())
        }
        Command::AfnRun(a) => afn_run(a),
        Command::AnnulusRun(a) => annulus_run(a),
        Command::Lemma3(a) => {
            let rep = lemma3_montecarlo(a.n, a.c, a.trials, RandomSeed(a.seed))?;
            println!("t={}\ndelta={}\ntrials={}", rep.t, rep.delta, rep.trials);
            println!("far_rate={}\nfar_bound={}\nfar_exact={}", rep.far_rate, rep.far_bound, rep.far_exact);
            println!("near_rate={}\nnear_bound={}\nnear_exact={}", rep.near_rate, rep.near_bound, rep.near_exact);
            Ok(())
        }
        Command::ConvertMovielens(a) => {
            let ml = load_movielens(&a.ratings)?;
            save_dataset(&ml.dataset, &a.out)?;
            write_id_map(&ml.movie_ids, &a.map)?;
            eprintln!(
                "{} movies, {} users, {} repeated ratings",
                ml.movie_ids.len(),
                ml.user_ids.len(),
                ml.duplicates
            );
            Ok(())
        }
    }
}

fn afn_run(a: AfnRunArgs) -> Result<()> {
    let cells = match a.pairing {
        Pairing::Product => ExperimentConfig::product_cells(&a.ell_grid, &a.m_grid),
        Pairing::Zip => {
            if a.ell_grid.len() != a.m_grid.len() {
                return Err(Error::InvalidParameter(format!(
                    "zip pairing needs grids of equal length, got {} and {}",
                    a.ell_grid.len(),
                    a.m_grid.len()
                )));
            }
            a.ell_grid.iter().copied().zip(a.m_grid.iter().copied()).collect()
        }
    };
    let data = Arc::new(load_dataset(&a.data)?);
    let dataset_id = a.dataset_id.unwrap_or_else(|| {
        a.data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let config = ExperimentConfig {
        dataset_id,
        variant: a.variant,
        cells,
        seeds: a.seeds,
        queries_per_seed: a.queries_per_seed,
        master_seed: RandomSeed(a.seed),
        c: a.c,
        record_wall_time: !a.no_timing,
    };
    let out = run_experiment(&data, &config)?;
    save_records(&out.records, &a.out)?;
    if let Some(path) = a.summary {
        save_summary(&out.summary, path)?;
    }
    Ok(())
}

fn annulus_run(a: AnnulusRunArgs) -> Result<()> {
    let workload = match (a.data, a.planted) {
        (Some(path), _) => AnnulusWorkload::Dataset(Arc::new(load_dataset(path)?)),
        (None, Some(n)) => AnnulusWorkload::Planted { n, d: a.d },
        (None, None) => unreachable!("clap requires --data or --planted"),
    };
    let config = AnnulusExperimentConfig {
        r: a.r,
        w: a.w,
        c: a.c,
        bucket_width: a.bucket_width,
        builds: a.seeds,
        queries: a.queries,
        master_seed: RandomSeed(a.seed),
        repetitions: a.repetitions,
    };
    let report = run_annulus_experiment(&workload, &config)?;
    report.save_csv(&a.out)?;
    println!(
        "trials={} witnessed={} successes={} nulls={} soundness_violations={} success_rate={}",
        report.trials,
        report.witnessed,
        report.successes,
        report.nulls,
        report.soundness_violations,
        report.success_rate
    );
    Ok(())
}
