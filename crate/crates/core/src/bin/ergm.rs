//! Command-line front end. Exit codes: 0 success, 2 usage, 3 numerical
//! failure, 4 I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ergm_core::anneal::{improved_start, AnnealConfig, AnnealError, AnnealInit};
use ergm_core::exact::{enumerate, enumerate_cached, ExactError, DEFAULT_MAX_NODES};
use ergm_core::experiments::{
    cloud_experiment, cloud_table, ecoli_clusters, ecoli_table, fig1, fig1_table, fig4, load_ecoli, trials_table, EcoliConfig,
    ExperimentError, Fig1Config, Fig4Config,
};
use ergm_core::io::{load_network, parse_theta, save_network, ExperimentReport, IoError, Preprocessing, RunConfig, Table};
use ergm_core::mcmle::{mcmle_fit, McmleConfig, McmleError, McmleStatus};
use ergm_core::mple::{mple, MpleError};
use ergm_core::rng::derive_seed;
use ergm_core::sampler::{sample_chains, SamplerConfig, SamplerError};
use ergm_core::stats::{ModelSpec, SpecError};
use ergm_core::{Network, Theta};

#[derive(Parser)]
#[command(name = "ergm", version, about = "ERGM estimation: MPLE, MCMLE, annealed starts, exact small-graph oracle")]
struct Cli {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preprocess {
    AsIs,
    Undirected,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Observed,
    Er,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig1,
    Fig4,
    Ecoli,
}

#[derive(clap::Args)]
struct NetworkArgs {
    /// Edge list (`n <count>` header, or labelled ties).
    #[arg(long)]
    network: PathBuf,
    /// Model file, one term per line.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = Preprocess::AsIs)]
    preprocess: Preprocess,
}

#[derive(Subcommand)]
enum Command {
    /// Sufficient statistics of a network.
    Stats(NetworkArgs),
    /// Maximum pseudolikelihood estimate.
    Mple(NetworkArgs),
    /// Metropolis-Hastings sample of statistics at a given theta.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// Start network (default: empty network on --nodes).
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<usize>,
        /// Comma-separated parameter vector.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long)]
        interval: Option<u64>,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Monte Carlo MLE from an MPLE, annealed, or given start.
    Mcmle {
        #[command(flatten)]
        net: NetworkArgs,
        /// `mple`, `anneal`, or `theta:<csv>`.
        #[arg(long, default_value = "anneal", allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 10)]
        attempts: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Annealed statistic-matched network and its MPLE as a starting value.
    AnnealInit {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, value_enum, default_value_t = Init::Er)]
        init: Init,
        #[arg(long, default_value_t = 10)]
        attempts: usize,
        /// Where to write the matched network.
        #[arg(long)]
        matched: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// MPLEs of many annealed statistic-matched networks (CSV).
    CloudExperiment {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long, value_enum, default_value_t = Init::Er)]
        init: Init,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Exact MLE by enumerating every network on --nodes nodes.
    ExactMle {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        nodes: usize,
        /// Observed statistics as CSV.
        #[arg(long)]
        target: String,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: usize,
    },
    /// Regenerate the data behind a figure.
    Figure {
        #[arg(value_enum)]
        which: Figure,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// E. coli edge list (raw, directed).
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Config { .. } | IoError::Theta(_) => Failure::Usage(e.to_string()),
            _ => Failure::Io(e.to_string()),
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<MpleError> for Failure {
    fn from(e: MpleError) -> Self {
        match e {
            MpleError::Spec(s) => s.into(),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<SamplerError> for Failure {
    fn from(e: SamplerError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<McmleError> for Failure {
    fn from(e: McmleError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<AnnealError> for Failure {
    fn from(e: AnnealError) -> Self {
        match e {
            AnnealError::NoStartFound { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Io { .. } | ExactError::Cache { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::MissingDataset(_) | ExperimentError::DatasetMismatch { .. } => Failure::Io(e.to_string()),
            ExperimentError::Io(e) => e.into(),
            ExperimentError::Anneal(e) => e.into(),
            ExperimentError::Exact(e) => e.into(),
            ExperimentError::Mcmle(e) => e.into(),
            ExperimentError::Mple(e) => e.into(),
            ExperimentError::NoReference(_) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

struct Loaded {
    spec: ModelSpec,
    network: Network,
}

fn load(args: &NetworkArgs, report: &mut ExperimentReport) -> Result<Loaded, Failure> {
    let pre = match args.preprocess {
        Preprocess::AsIs => Preprocessing::AsIs,
        Preprocess::Undirected => Preprocessing::UndirectedNoLoops,
    };
    let loaded = load_network(&args.network, pre)?;
    report.add_input(&args.network)?;
    report.add_input(&args.model)?;
    let spec = ModelSpec::from_file(&args.model)?;
    spec.check_nodes(loaded.network.node_count())?;
    report.config["load"] = serde_json::to_value(&loaded.report)?;
    Ok(Loaded { spec, network: loaded.network })
}

fn run_config(path: &Option<PathBuf>, report: &mut ExperimentReport) -> Result<RunConfig, Failure> {
    match path {
        Some(p) => {
            report.add_input(p)?;
            Ok(RunConfig::load(p)?)
        }
        None => Ok(RunConfig::default()),
    }
}

fn named(spec: &ModelSpec, values: &[f64]) -> serde_json::Value {
    spec.names().into_iter().zip(values).map(|(k, v)| (k, json!(v))).collect::<serde_json::Map<_, _>>().into()
}

fn single_row(spec: &ModelSpec, prefix: &str, values: &[f64]) -> Table {
    let mut t = Table::new(spec.names().iter().map(|n| format!("{prefix}{n}")));
    t.push(values.iter().map(|v| v.to_string()).collect());
    t
}

/// What a subcommand produced: a report, an optional table for `--format csv`,
/// and whether the numerical contract failed (exit 3 after emitting).
struct Outcome {
    table: Option<Table>,
    numerical_failure: Option<String>,
}

fn run(cli: &Cli, report: &mut ExperimentReport) -> Result<Outcome, Failure> {
    let seed = cli.seed;
    let mut outcome = Outcome { table: None, numerical_failure: None };
    match &cli.command {
        Command::Stats(args) => {
            let l = load(args, report)?;
            let t = l.spec.stat_vector(&l.network);
            report.results = json!({ "nodes": l.network.node_count(), "stats": named(&l.spec, &t) });
            outcome.table = Some(single_row(&l.spec, "", &t));
        }
        Command::Mple(args) => {
            let l = load(args, report)?;
            let fit = report.time("mple", || mple(&l.spec, &l.network))?;
            report.results = serde_json::to_value(&fit)?;
            report.results["names"] = json!(l.spec.names());
            outcome.table = Some(single_row(&l.spec, "theta_", &fit.theta));
        }
        Command::Simulate { model, network, nodes, theta, samples, burn_in, interval, chains, config } => {
            let spec = ModelSpec::from_file(model)?;
            report.add_input(model)?;
            let start = match (network, nodes) {
                (Some(p), _) => {
                    report.add_input(p)?;
                    load_network(p, Preprocessing::AsIs)?.network
                }
                (None, Some(n)) => Network::empty(*n),
                (None, None) => return Err(Failure::Usage("simulate needs --network or --nodes".into())),
            };
            spec.check_nodes(start.node_count())?;
            let theta = parse_theta(theta)?;
            let rc = run_config(config, report)?;
            let mut cfg = rc.sampler.unwrap_or_else(|| SamplerConfig::for_nodes(start.node_count()));
            cfg.sample_size = samples.unwrap_or(cfg.sample_size);
            cfg.burn_in = burn_in.unwrap_or(cfg.burn_in);
            cfg.interval = interval.unwrap_or(cfg.interval);
            cfg.seed = seed;
            report.config["sampler"] = serde_json::to_value(&cfg)?;
            let batch = report.time("sample", || sample_chains(&spec, &theta, &start, &cfg, *chains))?;
            let mut table = Table::new(std::iter::once("sample".to_string()).chain(spec.names()));
            for (k, s) in batch.stats.iter().enumerate() {
                table.push(std::iter::once(k.to_string()).chain(s.iter().map(|v| v.to_string())).collect());
            }
            report.results = json!({
                "theta": theta,
                "acceptance_rate": batch.acceptance_rate,
                "mean": named(&spec, &batch.mean()),
                "samples": batch.stats,
            });
            outcome.table = Some(table);
        }
        Command::Mcmle { net, start, attempts, config } => {
            let l = load(net, report)?;
            let rc = run_config(config, report)?;
            let mut mcfg = rc.mcmle.unwrap_or_else(|| McmleConfig::for_nodes(l.network.node_count()));
            mcfg.seed = derive_seed(seed, 1);
            let theta0: Theta = match start.as_str() {
                "mple" => report.time("mple", || mple(&l.spec, &l.network))?.theta,
                "anneal" => {
                    let acfg = AnnealConfig { seed: derive_seed(seed, 2), ..rc.anneal.clone().unwrap_or_default() };
                    let s = report.time("anneal", || improved_start(&l.spec, &l.network, &acfg, *attempts))?;
                    report.results["anneal"] = serde_json::to_value(&s.anneal)?;
                    s.theta
                }
                other => match other.strip_prefix("theta:") {
                    Some(csv) => parse_theta(csv)?,
                    None => return Err(Failure::Usage(format!("unknown start `{other}`"))),
                },
            };
            report.config["mcmle"] = serde_json::to_value(&mcfg)?;
            let fit = report.time("mcmle", || mcmle_fit(&l.spec, &l.network, &theta0, &mcfg))?;
            if fit.status == McmleStatus::Degenerate {
                outcome.numerical_failure = Some("MCMLE stopped: model degeneracy".into());
            }
            let mut table = Table::new(["status".to_string()].into_iter().chain(l.spec.names().iter().map(|n| format!("theta_{n}"))));
            table.push(
                std::iter::once(serde_json::to_value(fit.status)?.as_str().unwrap_or_default().to_string())
                    .chain(fit.theta.iter().map(|v| v.to_string()))
                    .collect(),
            );
            report.results["theta0"] = json!(theta0);
            report.results["names"] = json!(l.spec.names());
            report.results["theta"] = json!(fit.theta);
            report.results["status"] = serde_json::to_value(fit.status)?;
            report.results["final_moment_z"] = json!(fit.final_moment_z);
            report.results["trace"] = serde_json::to_value(&fit.trace)?;
            outcome.table = Some(table);
        }
        Command::AnnealInit { net, init, attempts, matched, config } => {
            let l = load(net, report)?;
            let rc = run_config(config, report)?;
            let mut acfg = rc.anneal.unwrap_or_default();
            acfg.seed = seed;
            acfg.init = match init {
                Init::Observed => AnnealInit::FromObserved,
                Init::Er => AnnealInit::FromErdosRenyi { density: None },
            };
            report.config["anneal"] = serde_json::to_value(&acfg)?;
            let s = report.time("anneal", || improved_start(&l.spec, &l.network, &acfg, *attempts))?;
            if let Some(path) = matched {
                save_network(&s.anneal.network, path)?;
            }
            report.results = json!({
                "theta0": s.theta,
                "names": l.spec.names(),
                "achieved_distance": s.anneal.achieved_distance,
                "steps": s.anneal.steps_used,
                "attempt": s.attempt,
                "anneal": s.anneal,
            });
            outcome.table = Some(single_row(&l.spec, "theta_", &s.theta));
        }
        Command::CloudExperiment { net, replicates, init, config } => {
            let l = load(net, report)?;
            let rc = run_config(config, report)?;
            let mut acfg = rc.anneal.unwrap_or_default();
            acfg.seed = seed;
            acfg.init = match init {
                Init::Observed => AnnealInit::FromObserved,
                Init::Er => AnnealInit::FromErdosRenyi { density: None },
            };
            report.config["anneal"] = serde_json::to_value(&acfg)?;
            let target = l.spec.stat_vector(&l.network);
            let points = report.time("cloud", || {
                cloud_experiment(&l.spec, &target, l.network.node_count(), Some(&l.network), &acfg, *replicates)
            })?;
            let observed = mple(&l.spec, &l.network).ok().map(|f| f.theta);
            let refs: Vec<(&str, &Theta)> = observed.iter().map(|t| ("observed_mple", t)).collect();
            report.results = json!({ "points": points, "observed_mple": observed });
            outcome.table = Some(cloud_table(&l.spec, &points, &refs));
        }
        Command::ExactMle { model, nodes, target, cache_dir, max_nodes } => {
            let spec = ModelSpec::from_file(model)?;
            report.add_input(model)?;
            let t_obs = parse_theta(target)?;
            if t_obs.len() != spec.dim() {
                return Err(Failure::Usage(format!("target has {} values, model has {}", t_obs.len(), spec.dim())));
            }
            let table = report.time("enumerate", || match cache_dir {
                Some(dir) => enumerate_cached(&spec, *nodes, *max_nodes, dir),
                None => enumerate(&spec, *nodes, *max_nodes),
            })?;
            let fit = report.time("solve", || table.exact_mle(&t_obs))?;
            if !fit.exists {
                outcome.numerical_failure = Some("target is on the convex hull boundary; no MLE".into());
            }
            report.results = serde_json::to_value(&fit)?;
            report.results["names"] = json!(spec.names());
            report.results["distinct_statistics"] = json!(table.entries().len());
            outcome.table = Some(single_row(&spec, "theta_", &fit.theta));
        }
        Command::Figure { which, replicates, trials, dataset, cache_dir } => match which {
            Figure::Fig1 => {
                let mut cfg = Fig1Config { cache_dir: cache_dir.clone(), ..Fig1Config::default() };
                cfg.replicates = replicates.unwrap_or(cfg.replicates);
                cfg.anneal.seed = seed;
                report.config = serde_json::to_value(&cfg)?;
                let out = report.time("fig1", || fig1(&cfg))?;
                report.results = serde_json::to_value(&out)?;
                outcome.table = Some(fig1_table(&out));
            }
            Figure::Fig4 => {
                let mut cfg = Fig4Config { seed, ..Fig4Config::default() };
                cfg.trials = trials.unwrap_or(cfg.trials);
                report.config = serde_json::to_value(&cfg)?;
                let out = report.time("fig4", || fig4(&cfg))?;
                report.results = serde_json::to_value(&out)?;
                outcome.table = Some(trials_table(&ModelSpec::edges_triangles(), &out.trials));
            }
            Figure::Ecoli => {
                let mut cfg = EcoliConfig { dataset: dataset.clone(), seed, ..EcoliConfig::default() };
                cfg.replicates = replicates.unwrap_or(cfg.replicates);
                report.config = serde_json::to_value(&cfg)?;
                let (net, load_report) = load_ecoli(&cfg)?;
                if let Some(p) = dataset {
                    report.add_input(p)?;
                }
                let out = report.time("ecoli", || ecoli_clusters(&net, Some(load_report), &cfg))?;
                report.results = serde_json::to_value(&out)?;
                outcome.table = Some(ecoli_table(&out));
            }
        },
    }
    Ok(outcome)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Stats(_) => "stats",
        Command::Mple(_) => "mple",
        Command::Simulate { .. } => "simulate",
        Command::Mcmle { .. } => "mcmle",
        Command::AnnealInit { .. } => "anneal-init",
        Command::CloudExperiment { .. } => "cloud-experiment",
        Command::ExactMle { .. } => "exact-mle",
        Command::Figure { .. } => "figure",
    }
}

fn emit(cli: &Cli, report: &ExperimentReport, table: Option<&Table>) -> Result<(), Failure> {
    let sink = ergm_core::io::output_sink(cli.output.as_deref())?;
    match (cli.format, table) {
        (Format::Csv, Some(t)) => t.write_csv(sink)?,
        _ => report.write_json(sink)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut report = ExperimentReport::new(command_name(&cli.command), cli.seed);
    report.config = json!({});
    report.results = json!({});
    let result = run(&cli, &mut report).and_then(|outcome| {
        emit(&cli, &report, outcome.table.as_ref())?;
        match outcome.numerical_failure {
            Some(m) => Err(Failure::Numerical(m)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
