//! Drivers that compose annealing, MPLE, MCMLE and the exact oracle into the
//! point clouds and trial tables behind the figure experiments.
//!
//! Every CSV table starts with a `schema_version` column; columns are only
//! ever appended.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anneal::{anneal_replicates, budget_steps_per_temperature, improved_start, AnnealConfig, AnnealError, AnnealInit, ImprovedStart};
use crate::exact::{enumerate, enumerate_cached, ExactError, ExactMleResult, DEFAULT_MAX_NODES};
use crate::graph::Network;
use crate::io::{load_network, IoError, LoadReport, Preprocessing, Table};
use crate::mcmle::{mcmle_fit, McmleConfig, McmleError, McmleResult, McmleStatus};
use crate::mple::{mple, MpleError, Theta};
use crate::rng::derive_seed;
use crate::stats::{ModelSpec, StatTerm};

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Node and edge counts the E. coli network must have after preprocessing.
pub const ECOLI_NODES: usize = 418;
pub const ECOLI_EDGES: usize = 519;

/// The 9-node target statistics `(edges, triangles)` of the small example.
pub const SMALL_TARGET: [f64; 2] = [18.0, 13.0];
/// MPLE of the reference 9-node network.
pub const SMALL_REFERENCE_MPLE: [f64; 2] = [-1.3, 0.702];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("dataset not found: {0}")]
    MissingDataset(PathBuf),
    #[error("dataset has {nodes} nodes and {edges} edges after preprocessing, expected {expected_nodes} and {expected_edges}")]
    DatasetMismatch { nodes: usize, edges: usize, expected_nodes: usize, expected_edges: usize },
    #[error("no reference network could be built: {0}")]
    NoReference(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Anneal(#[from] AnnealError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Mcmle(#[from] McmleError),
    #[error(transparent)]
    Mple(#[from] MpleError),
}

/// The edges, degree 2/3/4/6 and gwdegree(0.25) model of the E. coli study.
pub fn ecoli_model() -> ModelSpec {
    ModelSpec::new(vec![
        StatTerm::Edges,
        StatTerm::DegreeCount { d: 2 },
        StatTerm::DegreeCount { d: 3 },
        StatTerm::DegreeCount { d: 4 },
        StatTerm::DegreeCount { d: 6 },
        StatTerm::GwDegree { decay: 0.25 },
    ])
    .expect("static model is valid")
}

fn init_label(init: &AnnealInit) -> &'static str {
    match init {
        AnnealInit::FromObserved => "observed",
        AnnealInit::FromErdosRenyi { .. } => "er",
        AnnealInit::FromNetwork { .. } => "network",
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// MPLE of one annealed network, with the annealing outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudPoint {
    pub replicate: usize,
    pub seed: u64,
    pub init: String,
    pub anneal_success: bool,
    pub achieved_distance: f64,
    pub steps: u64,
    /// `ok`, `separated`, `singular`, or `skipped` when annealing failed.
    pub mple_status: String,
    pub theta: Option<Theta>,
    #[serde(skip)]
    pub network: Network,
}

/// Anneals `replicates` networks towards `target` and fits each one's MPLE.
pub fn cloud_experiment(
    spec: &ModelSpec,
    target: &[f64],
    n: usize,
    observed: Option<&Network>,
    config: &AnnealConfig,
    replicates: usize,
) -> Result<Vec<CloudPoint>, AnnealError> {
    let runs = anneal_replicates(spec, target, n, observed, config, replicates)?;
    Ok(runs
        .into_par_iter()
        .enumerate()
        .map(|(replicate, run)| {
            let (mple_status, theta) = if !run.success {
                ("skipped", None)
            } else {
                match mple(spec, &run.network) {
                    Ok(fit) => ("ok", Some(fit.theta)),
                    Err(MpleError::SeparationDetected { .. }) => ("separated", None),
                    Err(_) => ("singular", None),
                }
            };
            CloudPoint {
                replicate,
                seed: derive_seed(config.seed, replicate as u64),
                init: init_label(&config.init).to_string(),
                anneal_success: run.success,
                achieved_distance: run.achieved_distance,
                steps: run.steps_used,
                mple_status: mple_status.to_string(),
                theta,
                network: run.network,
            }
        })
        .collect())
}

/// CSV of a cloud, with optional labelled reference points (`kind` column).
pub fn cloud_table(spec: &ModelSpec, points: &[CloudPoint], references: &[(&str, &Theta)]) -> Table {
    let mut header: Vec<String> =
        ["schema_version", "kind", "replicate", "seed", "init", "anneal_success", "achieved_distance", "steps", "mple_status"]
            .map(String::from)
            .to_vec();
    header.extend(spec.names().iter().map(|n| format!("theta_{n}")));
    let mut table = Table::new(header);
    for p in points {
        let mut row = vec![
            CSV_SCHEMA_VERSION.to_string(),
            "mple".into(),
            p.replicate.to_string(),
            p.seed.to_string(),
            p.init.clone(),
            p.anneal_success.to_string(),
            fmt(p.achieved_distance),
            p.steps.to_string(),
            p.mple_status.clone(),
        ];
        match &p.theta {
            Some(t) => row.extend(t.iter().map(|v| fmt(*v))),
            None => row.extend(std::iter::repeat_n(String::new(), spec.dim())),
        }
        table.push(row);
    }
    for (kind, theta) in references {
        let mut row = vec![CSV_SCHEMA_VERSION.to_string(), kind.to_string()];
        row.extend(std::iter::repeat_n(String::new(), 7));
        row.extend(theta.iter().map(|v| fmt(*v)));
        table.push(row);
    }
    table
}

/// Per-coordinate `max − min` over the fitted points.
pub fn coordinate_spread(points: &[CloudPoint]) -> Vec<f64> {
    let thetas: Vec<&Theta> = points.iter().filter_map(|p| p.theta.as_ref()).collect();
    let q = thetas.first().map_or(0, |t| t.len());
    (0..q)
        .map(|j| {
            let lo = thetas.iter().map(|t| t[j]).fold(f64::INFINITY, f64::min);
            let hi = thetas.iter().map(|t| t[j]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig1Config {
    pub replicates: usize,
    pub anneal: AnnealConfig,
    /// Where the 9-node enumeration table is cached; `None` skips the exact MLE row.
    pub cache_dir: Option<PathBuf>,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            replicates: 100,
            anneal: AnnealConfig { init: AnnealInit::FromErdosRenyi { density: Some(0.5) }, ..AnnealConfig::default() },
            cache_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Output {
    pub points: Vec<CloudPoint>,
    pub exact_mle: Option<ExactMleResult>,
    pub spread: Vec<f64>,
    pub successes: usize,
}

/// MPLEs of annealed 9-node networks with `T = (18, 13)`, plus the exact MLE.
pub fn fig1(config: &Fig1Config) -> Result<Fig1Output, ExperimentError> {
    let spec = ModelSpec::edges_triangles();
    let points = cloud_experiment(&spec, &SMALL_TARGET, 9, None, &config.anneal, config.replicates)?;
    let exact_mle = match &config.cache_dir {
        Some(dir) => Some(enumerate_cached(&spec, 9, DEFAULT_MAX_NODES, dir)?.exact_mle(&SMALL_TARGET)?),
        None => None,
    };
    let spread = coordinate_spread(&points);
    let successes = points.iter().filter(|p| p.theta.is_some()).count();
    Ok(Fig1Output { points, exact_mle, spread, successes })
}

pub fn fig1_table(out: &Fig1Output) -> Table {
    let refs: Vec<(&str, &Theta)> = out.exact_mle.iter().map(|m| ("exact_mle", &m.theta)).collect();
    cloud_table(&ModelSpec::edges_triangles(), &out.points, &refs)
}

/// A 9-node network with `T = (18, 13)` whose MPLE is as close as possible
/// to [`SMALL_REFERENCE_MPLE`], chosen among `candidates` annealed networks.
pub fn reference_network(candidates: usize, seed: u64) -> Result<(Network, Theta), ExperimentError> {
    let spec = ModelSpec::edges_triangles();
    let cfg = AnnealConfig { seed, init: AnnealInit::FromErdosRenyi { density: Some(0.5) }, ..AnnealConfig::default() };
    let points = cloud_experiment(&spec, &SMALL_TARGET, 9, None, &cfg, candidates)?;
    points
        .into_iter()
        .filter_map(|p| p.theta.map(|t| (p.network, t)))
        .min_by(|a, b| {
            let da = a.1.max_abs_diff(&SMALL_REFERENCE_MPLE);
            let db = b.1.max_abs_diff(&SMALL_REFERENCE_MPLE);
            da.total_cmp(&db)
        })
        .ok_or_else(|| ExperimentError::NoReference("every annealing run failed".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    /// MPLE of the observed network.
    Mple,
    /// MPLE of an annealed statistic-matched Erdős–Rényi start.
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig4Config {
    pub trials: usize,
    pub starts: Vec<StartKind>,
    pub mcmle: McmleConfig,
    pub anneal: AnnealConfig,
    pub anneal_attempts: usize,
    /// Annealed candidates searched for the reference observed network.
    pub reference_candidates: usize,
    pub seed: u64,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Fig4Config {
            trials: 10,
            starts: vec![StartKind::Mple, StartKind::Anneal],
            mcmle: McmleConfig::for_nodes(9),
            anneal: AnnealConfig::default(),
            anneal_attempts: 10,
            reference_candidates: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub trial: usize,
    pub start: StartKind,
    pub seed: u64,
    pub theta0: Theta,
    pub result: McmleResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Output {
    pub observed_mple: Theta,
    #[serde(skip)]
    pub observed: Network,
    pub trials: Vec<Trial>,
}

impl Fig4Output {
    pub fn count(&self, start: StartKind, status: McmleStatus) -> usize {
        self.trials.iter().filter(|t| t.start == start && t.result.status == status).count()
    }
}

/// Independent MCMLE trials on the 9-node reference network from each start kind.
pub fn fig4(config: &Fig4Config) -> Result<Fig4Output, ExperimentError> {
    let spec = ModelSpec::edges_triangles();
    let (observed, observed_mple) = reference_network(config.reference_candidates, derive_seed(config.seed, 1))?;
    let mut jobs = Vec::new();
    for &start in &config.starts {
        for trial in 0..config.trials {
            jobs.push((start, trial));
        }
    }
    let trials: Result<Vec<Trial>, ExperimentError> = jobs
        .into_par_iter()
        .map(|(start, trial)| {
            let seed = derive_seed(derive_seed(config.seed, 2 + start as u64), trial as u64);
            let theta0 = match start {
                StartKind::Mple => observed_mple.clone(),
                StartKind::Anneal => {
                    let anneal = AnnealConfig { seed, ..config.anneal.clone() };
                    improved_start(&spec, &observed, &anneal, config.anneal_attempts)?.theta
                }
            };
            let mcmle = McmleConfig { seed, ..config.mcmle.clone() };
            let result = mcmle_fit(&spec, &observed, &theta0, &mcmle)?;
            Ok(Trial { trial, start, seed, theta0, result })
        })
        .collect();
    Ok(Fig4Output { observed_mple, observed, trials: trials? })
}

pub fn trials_table(spec: &ModelSpec, trials: &[Trial]) -> Table {
    let mut header: Vec<String> =
        ["schema_version", "trial", "start", "seed", "status", "outer_iterations"].map(String::from).to_vec();
    header.extend(spec.names().iter().map(|n| format!("theta0_{n}")));
    header.extend(spec.names().iter().map(|n| format!("theta_{n}")));
    header.extend(spec.names().iter().map(|n| format!("z_{n}")));
    let mut table = Table::new(header);
    for t in trials {
        let mut row = vec![
            CSV_SCHEMA_VERSION.to_string(),
            t.trial.to_string(),
            serde_json::to_value(t.start).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            t.seed.to_string(),
            serde_json::to_value(t.result.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            t.result.outer_iterations.to_string(),
        ];
        row.extend(t.theta0.iter().map(|v| fmt(*v)));
        row.extend(t.result.theta.iter().map(|v| fmt(*v)));
        let z = &t.result.final_moment_z;
        row.extend((0..spec.dim()).map(|k| z.get(k).map_or(String::new(), |v| fmt(*v))));
        table.push(row);
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EcoliConfig {
    pub dataset: Option<PathBuf>,
    /// Annealed networks per initialization mode in the cluster plot.
    pub replicates: usize,
    pub anneal: AnnealConfig,
    pub anneal_attempts: usize,
    pub mcmle: McmleConfig,
    pub seed: u64,
    /// Skip the node/edge count check (for synthetic stand-ins).
    pub allow_any_size: bool,
}

impl Default for EcoliConfig {
    fn default() -> Self {
        let mut mcmle = McmleConfig::for_nodes(ECOLI_NODES);
        mcmle.sampler.sample_size = 2000;
        EcoliConfig {
            dataset: None,
            replicates: 20,
            anneal: AnnealConfig {
                max_steps: 20_000_000,
                steps_per_temperature: Some(budget_steps_per_temperature(ECOLI_NODES, 0.999, 20_000_000)),
                ..AnnealConfig::default()
            },
            anneal_attempts: 8,
            mcmle,
            seed: 0,
            allow_any_size: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EcoliOutput {
    pub load: Option<LoadReport>,
    pub observed_stats: Vec<f64>,
    /// `None` when the observed network's MPLE does not exist.
    pub observed_mple: Option<Theta>,
    pub improved_start: Option<ImprovedStart>,
    pub mcmle_from_improved: Option<McmleResult>,
    pub mcmle_from_observed_mple: Option<McmleResult>,
    pub observed_cloud: Vec<CloudPoint>,
    pub er_cloud: Vec<CloudPoint>,
    /// Every er-initialized MPLE is nearer the MCMLE than the observed-init cluster centroid.
    pub er_single_cluster: Option<bool>,
}

fn centroid(points: &[CloudPoint]) -> Option<Vec<f64>> {
    let thetas: Vec<&Theta> = points.iter().filter_map(|p| p.theta.as_ref()).collect();
    let q = thetas.first()?.len();
    Some((0..q).map(|j| thetas.iter().map(|t| t[j]).sum::<f64>() / thetas.len() as f64).collect())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Loads the regulatory network with the undirected/no-loop preprocessing.
pub fn load_ecoli(config: &EcoliConfig) -> Result<(Network, LoadReport), ExperimentError> {
    let path = config.dataset.clone().ok_or_else(|| ExperimentError::MissingDataset(PathBuf::from("<unset>")))?;
    if !path.exists() {
        return Err(ExperimentError::MissingDataset(path));
    }
    let loaded = load_network(&path, Preprocessing::UndirectedNoLoops)?;
    let (nodes, edges) = (loaded.report.nodes, loaded.report.edges);
    if !config.allow_any_size && (nodes != ECOLI_NODES || edges != ECOLI_EDGES) {
        return Err(ExperimentError::DatasetMismatch {
            nodes,
            edges,
            expected_nodes: ECOLI_NODES,
            expected_edges: ECOLI_EDGES,
        });
    }
    Ok((loaded.network, loaded.report))
}

/// Observed-init and er-init MPLE clouds plus MCMLE from both starting values.
pub fn ecoli_clusters(observed: &Network, load: Option<LoadReport>, config: &EcoliConfig) -> Result<EcoliOutput, ExperimentError> {
    let spec = ecoli_model();
    let n = observed.node_count();
    let t_obs = spec.stat_vector(observed).into_inner();
    let observed_mple = mple(&spec, observed).ok().map(|f| f.theta);

    let cloud = |init: AnnealInit, stream: u64| {
        let cfg = AnnealConfig { init, seed: derive_seed(config.seed, stream), ..config.anneal.clone() };
        cloud_experiment(&spec, &t_obs, n, Some(observed), &cfg, config.replicates)
    };
    let observed_cloud = cloud(AnnealInit::FromObserved, 1)?;
    let er_cloud = cloud(AnnealInit::FromErdosRenyi { density: None }, 2)?;

    let start_cfg = AnnealConfig {
        init: AnnealInit::FromErdosRenyi { density: None },
        seed: derive_seed(config.seed, 3),
        ..config.anneal.clone()
    };
    let improved = improved_start(&spec, observed, &start_cfg, config.anneal_attempts).ok();
    let fit_from = |theta0: &Theta, stream: u64| {
        mcmle_fit(&spec, observed, theta0, &McmleConfig { seed: derive_seed(config.seed, stream), ..config.mcmle.clone() })
    };
    let mcmle_from_improved = improved.as_ref().map(|s| fit_from(&s.theta, 4)).transpose()?;
    let mcmle_from_observed_mple = observed_mple.as_ref().map(|t| fit_from(t, 5)).transpose()?;

    let er_single_cluster = match (&mcmle_from_improved, centroid(&observed_cloud)) {
        (Some(fit), Some(obs_centroid)) if fit.status == McmleStatus::Converged => {
            let ers: Vec<&Theta> = er_cloud.iter().filter_map(|p| p.theta.as_ref()).collect();
            (!ers.is_empty()).then(|| ers.iter().all(|t| euclid(t, &fit.theta) < euclid(t, &obs_centroid)))
        }
        _ => None,
    };
    Ok(EcoliOutput {
        load,
        observed_stats: t_obs,
        observed_mple,
        improved_start: improved,
        mcmle_from_improved,
        mcmle_from_observed_mple,
        observed_cloud,
        er_cloud,
        er_single_cluster,
    })
}

pub fn ecoli_table(out: &EcoliOutput) -> Table {
    let spec = ecoli_model();
    let mut points = out.observed_cloud.clone();
    points.extend(out.er_cloud.iter().cloned());
    let mut refs: Vec<(&str, &Theta)> = Vec::new();
    if let Some(t) = &out.observed_mple {
        refs.push(("observed_mple", t));
    }
    if let Some(fit) = &out.mcmle_from_improved {
        refs.push(("mcmle", &fit.theta));
    }
    cloud_table(&spec, &points, &refs)
}

/// Exact MLE on a small enumeration without the cache (tests and examples).
pub fn exact_mle_uncached(spec: &ModelSpec, n: usize, t_obs: &[f64]) -> Result<ExactMleResult, ExperimentError> {
    Ok(enumerate(spec, n, DEFAULT_MAX_NODES)?.exact_mle(t_obs)?)
}
