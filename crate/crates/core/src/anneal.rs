//! Simulated annealing towards networks with prescribed statistics, and the
//! annealed-network MPLE used as an MCMLE starting value.
//!
//! The energy of `a` is the weighted L1 distance `Σ_k w_k |T_k(a) − t_k|`,
//! with default weights `1 / max(1, |t_k|)`. Each step proposes one dyad
//! toggle; improvements are always accepted and worsening moves with
//! probability `exp(−ΔE / temperature)`. The temperature falls geometrically
//! and is raised to half its start value (at most three times) when the
//! energy has not improved for `50 · dyads` steps.
//!
//! [`improved_start`] chains the steps: observed statistics, an Erdős–Rényi
//! draw at the observed density, annealing to a statistic match, MPLE of the
//! matched network.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{dyad_count, Network};
use crate::mple::{mple, MpleError, MpleResult, Theta};
use crate::rng::{derive_seed, stream_rng};
use crate::sampler::{erdos_renyi, propose, Proposal, TieSet};
use crate::stats::{ModelSpec, StatTerm, StatVector};

const CHECKPOINT_INTERVAL: u64 = 10_000;
const PROBES: usize = 1000;
const PROBE_ACCEPTANCE: f64 = 0.8;
const MAX_REHEATS: u32 = 3;
/// Default match tolerance for models with continuous terms.
pub const DEFAULT_CONTINUOUS_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum AnnealError {
    #[error("target has {got} coordinates, model has {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("invalid annealing configuration: {0}")]
    Config(String),
    #[error("annealing from the observed network needs the observed network")]
    MissingObserved,
    #[error("at least one attempt is required")]
    NoAttempts,
    #[error("no usable start after {attempts} attempts (best distance {best_distance})")]
    NoStartFound { attempts: usize, best_distance: f64 },
    #[error(transparent)]
    Spec(#[from] crate::stats::SpecError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnealInit {
    FromObserved,
    /// Bernoulli draw; `density` defaults to the observed (or target) edge density.
    FromErdosRenyi {
        #[serde(default)]
        density: Option<f64>,
    },
    FromNetwork {
        #[serde(skip)]
        network: Option<Network>,
    },
}

impl Default for AnnealInit {
    fn default() -> Self {
        AnnealInit::FromErdosRenyi { density: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    /// `None` calibrates from probe toggles at the start network.
    pub initial_temperature: Option<f64>,
    pub cooling_rate: f64,
    /// `None` means one sweep (the dyad count). Large sparse networks need
    /// shorter levels to cool within `max_steps`, see [`budget_steps_per_temperature`].
    pub steps_per_temperature: Option<u64>,
    pub max_steps: u64,
    /// `None` means 0 for integer-valued models, else [`DEFAULT_CONTINUOUS_TOLERANCE`].
    pub target_tolerance: Option<f64>,
    pub stat_weights: Option<Vec<f64>>,
    pub init: AnnealInit,
    pub proposal: Proposal,
    pub seed: u64,
    /// Energy is recorded every this many steps; 0 disables the trace.
    pub trace_every: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            initial_temperature: None,
            cooling_rate: 0.999,
            steps_per_temperature: None,
            max_steps: 1_000_000,
            target_tolerance: None,
            stat_weights: None,
            init: AnnealInit::default(),
            proposal: Proposal::TieNoTie { tie_prob: 0.5 },
            seed: 0,
            trace_every: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnealResult {
    /// Lowest-energy network seen.
    #[serde(skip)]
    pub network: Network,
    pub achieved_distance: f64,
    pub achieved_stats: StatVector,
    pub tolerance: f64,
    pub steps_used: u64,
    pub success: bool,
    pub initial_temperature: f64,
    /// `(step, energy)` every `trace_every` steps.
    pub energy_trace: Vec<(u64, f64)>,
    /// `(step, temperature)` at every temperature change.
    pub temperature_schedule: Vec<(u64, f64)>,
    /// Steps at which the temperature was reset.
    pub reheats: Vec<u64>,
    /// Largest gap between incremental and recomputed energy at checkpoints.
    pub max_checkpoint_drift: f64,
}

/// Level length that lets geometric cooling at `cooling_rate` fall by four
/// decades within `max_steps`, capped at one sweep of `n` nodes.
pub fn budget_steps_per_temperature(n: usize, cooling_rate: f64, max_steps: u64) -> u64 {
    let levels = (4.0 * std::f64::consts::LN_10 / -cooling_rate.ln()).ceil();
    ((max_steps as f64 / levels) as u64).clamp(1, dyad_count(n).max(1) as u64)
}

pub fn default_weights(target: &[f64]) -> Vec<f64> {
    target.iter().map(|t| 1.0 / t.abs().max(1.0)).collect()
}

/// Weighted L1 distance from `T(net)` to `target`.
pub fn energy(spec: &ModelSpec, net: &Network, target: &[f64], weights: &[f64]) -> f64 {
    distance(&spec.stat_vector(net), target, weights)
}

fn distance(stats: &[f64], target: &[f64], weights: &[f64]) -> f64 {
    stats.iter().zip(target).zip(weights).map(|((s, t), w)| w * (s - t).abs()).sum()
}

struct Resolved {
    weights: Vec<f64>,
    tolerance: f64,
    steps_per_temperature: u64,
}

fn resolve(spec: &ModelSpec, target: &[f64], n: usize, config: &AnnealConfig) -> Result<Resolved, AnnealError> {
    let q = spec.dim();
    if target.len() != q {
        return Err(AnnealError::Dimension { got: target.len(), expected: q });
    }
    spec.check_nodes(n)?;
    let weights = config.stat_weights.clone().unwrap_or_else(|| default_weights(target));
    if weights.len() != q || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(AnnealError::Config(format!("need {q} positive finite weights")));
    }
    if !(config.cooling_rate > 0.0 && config.cooling_rate < 1.0) {
        return Err(AnnealError::Config("cooling_rate must lie in (0, 1)".into()));
    }
    if config.initial_temperature.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        return Err(AnnealError::Config("initial_temperature must be positive".into()));
    }
    let tolerance = config
        .target_tolerance
        .unwrap_or(if spec.is_integer_valued() { 0.0 } else { DEFAULT_CONTINUOUS_TOLERANCE });
    if !(tolerance >= 0.0) {
        return Err(AnnealError::Config("target_tolerance must be non-negative".into()));
    }
    if let Proposal::TieNoTie { tie_prob } = config.proposal {
        if !(tie_prob > 0.0 && tie_prob < 1.0) {
            return Err(AnnealError::Config("tie_prob must lie in (0, 1)".into()));
        }
    }
    let steps_per_temperature = config.steps_per_temperature.unwrap_or(dyad_count(n).max(1) as u64).max(1);
    Ok(Resolved { weights, tolerance, steps_per_temperature })
}

/// Anneals from the configured start towards `target` on `n` nodes.
///
/// `FromErdosRenyi` without a density uses `target[edges] / dyads` when the
/// model has an edges term, else 1/2. `FromObserved` needs
/// [`anneal_observed`].
pub fn anneal(spec: &ModelSpec, target: &[f64], n: usize, config: &AnnealConfig) -> Result<AnnealResult, AnnealError> {
    anneal_inner(spec, target, n, None, config)
}

/// Anneals towards `T(net_obs)`; `FromObserved` starts at `net_obs` and the
/// Erdős–Rényi density defaults to that of `net_obs`.
pub fn anneal_observed(spec: &ModelSpec, net_obs: &Network, config: &AnnealConfig) -> Result<AnnealResult, AnnealError> {
    let target = spec.stat_vector(net_obs);
    anneal_inner(spec, &target, net_obs.node_count(), Some(net_obs), config)
}

fn start_network(
    spec: &ModelSpec,
    target: &[f64],
    n: usize,
    observed: Option<&Network>,
    init: &AnnealInit,
    rng: &mut impl Rng,
) -> Result<Network, AnnealError> {
    match init {
        AnnealInit::FromObserved => observed.cloned().ok_or(AnnealError::MissingObserved),
        AnnealInit::FromNetwork { network: Some(net) } => {
            if net.node_count() != n {
                return Err(AnnealError::Config(format!("start network has {} nodes, expected {n}", net.node_count())));
            }
            Ok(net.clone())
        }
        AnnealInit::FromNetwork { network: None } => Err(AnnealError::Config("FromNetwork needs a network".into())),
        AnnealInit::FromErdosRenyi { density } => {
            let p = match (density, observed) {
                (Some(p), _) => *p,
                (None, Some(obs)) => obs.edge_count() as f64 / dyad_count(n).max(1) as f64,
                (None, None) => spec
                    .terms()
                    .iter()
                    .position(|t| matches!(t, StatTerm::Edges))
                    .map_or(0.5, |k| target[k] / dyad_count(n).max(1) as f64),
            };
            erdos_renyi(n, p.clamp(0.0, 1.0), rng).map_err(|e| AnnealError::Config(e.to_string()))
        }
    }
}

/// Start temperature at which worsening probe toggles are accepted with
/// probability about 0.8 on average.
fn calibrate_temperature(spec: &ModelSpec, net: &Network, stats: &[f64], target: &[f64], weights: &[f64], rng: &mut impl Rng) -> f64 {
    let mut change = vec![0.0; spec.dim()];
    let mut proposed = stats.to_vec();
    let e0 = distance(stats, target, weights);
    let mut worse = Vec::new();
    for _ in 0..PROBES {
        let d = propose(Proposal::UniformDyad, net, None, rng);
        let sign = if net.has_tie(d) { -1.0 } else { 1.0 };
        spec.change_into(net, d, &mut change);
        for k in 0..proposed.len() {
            proposed[k] = stats[k] + sign * change[k];
        }
        let delta = distance(&proposed, target, weights) - e0;
        if delta > 0.0 {
            worse.push(delta);
        }
    }
    if worse.is_empty() {
        return 1.0;
    }
    let mean = worse.iter().sum::<f64>() / worse.len() as f64;
    -mean / PROBE_ACCEPTANCE.ln()
}

fn anneal_inner(
    spec: &ModelSpec,
    target: &[f64],
    n: usize,
    observed: Option<&Network>,
    config: &AnnealConfig,
) -> Result<AnnealResult, AnnealError> {
    let r = resolve(spec, target, n, config)?;
    let mut rng = stream_rng(config.seed, 0);
    let mut net = start_network(spec, target, n, observed, &config.init, &mut rng)?;
    let mut stats = spec.stat_vector(&net).into_inner();
    let mut e = distance(&stats, target, &r.weights);
    let t0 = match config.initial_temperature {
        Some(t) => t,
        None if n >= 2 => calibrate_temperature(spec, &net, &stats, target, &r.weights, &mut rng),
        None => 1.0,
    };
    let mut result = AnnealResult {
        network: net.clone(),
        achieved_distance: e,
        achieved_stats: StatVector(stats.clone()),
        tolerance: r.tolerance,
        steps_used: 0,
        success: e <= r.tolerance,
        initial_temperature: t0,
        energy_trace: vec![(0, e)],
        temperature_schedule: vec![(0, t0)],
        reheats: Vec::new(),
        max_checkpoint_drift: 0.0,
    };
    if result.success || n < 2 {
        return Ok(result);
    }

    let mut ties = TieSet::new(&net);
    let mut change = vec![0.0; spec.dim()];
    let mut proposed = stats.clone();
    let mut temperature = t0;
    let stall_limit = 50 * dyad_count(n) as u64;
    let mut since_improvement = 0u64;
    let mut step = 0u64;
    while step < config.max_steps {
        step += 1;
        let d = propose(config.proposal, &net, Some(&ties), &mut rng);
        let tied = net.has_tie(d);
        let sign = if tied { -1.0 } else { 1.0 };
        spec.change_into(&net, d, &mut change);
        for k in 0..stats.len() {
            proposed[k] = stats[k] + sign * change[k];
        }
        let e_new = distance(&proposed, target, &r.weights);
        let delta = e_new - e;
        if delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp() {
            net.toggle(d);
            if tied {
                ties.remove(d);
            } else {
                ties.insert(d);
            }
            std::mem::swap(&mut stats, &mut proposed);
            e = e_new;
        }

        if e < result.achieved_distance {
            result.achieved_distance = e;
            result.network.clone_from(&net);
            result.achieved_stats = StatVector(stats.clone());
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if step.is_multiple_of(CHECKPOINT_INTERVAL) {
            let fresh = spec.stat_vector(&net).into_inner();
            let e_fresh = distance(&fresh, target, &r.weights);
            result.max_checkpoint_drift = result.max_checkpoint_drift.max((e_fresh - e).abs());
            stats = fresh;
            e = e_fresh;
        }
        if config.trace_every > 0 && step.is_multiple_of(config.trace_every) {
            result.energy_trace.push((step, e));
        }
        if result.achieved_distance <= r.tolerance {
            break;
        }
        if since_improvement >= stall_limit && (result.reheats.len() as u32) < MAX_REHEATS {
            temperature = t0 / 2.0;
            since_improvement = 0;
            result.reheats.push(step);
            result.temperature_schedule.push((step, temperature));
        } else if step.is_multiple_of(r.steps_per_temperature) {
            temperature *= config.cooling_rate;
            result.temperature_schedule.push((step, temperature));
        }
    }
    result.steps_used = step;
    result.success = result.achieved_distance <= r.tolerance;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovedStart {
    pub theta: Theta,
    pub mple: MpleResult,
    pub anneal: AnnealResult,
    /// Zero-based index of the attempt that succeeded.
    pub attempt: usize,
}

fn attempt_config(config: &AnnealConfig, attempt: usize) -> AnnealConfig {
    AnnealConfig { seed: derive_seed(config.seed, attempt as u64), ..config.clone() }
}

/// Annealed-network MPLE as an MCMLE starting value.
///
/// Attempts run in parallel with derived seeds; the lowest-indexed attempt
/// whose annealing succeeds and whose MPLE exists is returned.
pub fn improved_start(spec: &ModelSpec, net_obs: &Network, config: &AnnealConfig, attempts: usize) -> Result<ImprovedStart, AnnealError> {
    if attempts == 0 {
        return Err(AnnealError::NoAttempts);
    }
    // surface configuration errors once instead of per attempt
    resolve(spec, &spec.stat_vector(net_obs), net_obs.node_count(), config)?;
    let outcomes: Vec<Result<ImprovedStart, f64>> = (0..attempts)
        .into_par_iter()
        .map(|attempt| {
            let run = anneal_observed(spec, net_obs, &attempt_config(config, attempt)).map_err(|_| f64::INFINITY)?;
            if !run.success {
                return Err(run.achieved_distance);
            }
            match mple(spec, &run.network) {
                Ok(fit) => Ok(ImprovedStart { theta: fit.theta.clone(), mple: fit, anneal: run, attempt }),
                Err(MpleError::SeparationDetected { .. } | MpleError::SingularInformation) => Err(run.achieved_distance),
                Err(_) => Err(f64::INFINITY),
            }
        })
        .collect();
    let mut best_distance = f64::INFINITY;
    for outcome in outcomes {
        match outcome {
            Ok(start) => return Ok(start),
            Err(d) => best_distance = best_distance.min(d),
        }
    }
    Err(AnnealError::NoStartFound { attempts, best_distance })
}

/// Independent annealing runs towards `target`, one per derived seed.
pub fn anneal_replicates(
    spec: &ModelSpec,
    target: &[f64],
    n: usize,
    observed: Option<&Network>,
    config: &AnnealConfig,
    replicates: usize,
) -> Result<Vec<AnnealResult>, AnnealError> {
    (0..replicates)
        .into_par_iter()
        .map(|k| anneal_inner(spec, target, n, observed, &attempt_config(config, k)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaoBlackwellEstimate {
    pub theta: Theta,
    /// Per-coordinate standard deviation of the individual MPLEs.
    pub spread: Vec<f64>,
    pub mples: Vec<Theta>,
    pub failures: usize,
}

/// EXPERIMENTAL: average of MPLEs over `m` independently annealed networks
/// matching `target`, as a Monte Carlo stand-in for conditioning the MPLE
/// on the sufficient statistic. Failed annealing runs and separated MPLEs
/// are skipped.
pub fn rao_blackwell_mple(spec: &ModelSpec, target: &[f64], n: usize, config: &AnnealConfig, m: usize) -> Result<RaoBlackwellEstimate, AnnealError> {
    if m == 0 {
        return Err(AnnealError::NoAttempts);
    }
    let runs = anneal_replicates(spec, target, n, None, config, m)?;
    let mples: Vec<Theta> = runs
        .iter()
        .filter(|r| r.success)
        .filter_map(|r| mple(spec, &r.network).ok())
        .map(|fit| fit.theta)
        .collect();
    if mples.is_empty() {
        let best_distance = runs.iter().map(|r| r.achieved_distance).fold(f64::INFINITY, f64::min);
        return Err(AnnealError::NoStartFound { attempts: m, best_distance });
    }
    let q = spec.dim();
    let k = mples.len() as f64;
    let mean: Vec<f64> = (0..q).map(|j| mples.iter().map(|t| t[j]).sum::<f64>() / k).collect();
    let spread = (0..q)
        .map(|j| (mples.iter().map(|t| (t[j] - mean[j]).powi(2)).sum::<f64>() / (k - 1.0).max(1.0)).sqrt())
        .collect();
    Ok(RaoBlackwellEstimate { theta: Theta(mean), spread, failures: m - mples.len(), mples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn nine_node_config(seed: u64) -> AnnealConfig {
        AnnealConfig { seed, init: AnnealInit::FromErdosRenyi { density: Some(0.5) }, ..AnnealConfig::default() }
    }

    #[test]
    fn energy_examples() {
        let spec = ModelSpec::edges_triangles();
        let k4 = Network::complete(4);
        assert_eq!(energy(&spec, &k4, &[6.0, 4.0], &[1.0, 1.0]), 0.0);
        // 17 edges, 13 triangles against (18, 13) with unit weights
        let mut net = Network::empty(9);
        for d in Network::complete(6).edges() {
            net.toggle(crate::graph::Dyad::new(d.i(), d.j(), 9).unwrap());
        }
        // K6: 15 edges, 20 triangles; only the distance arithmetic matters here
        let t = spec.stat_vector(&net);
        assert_eq!(energy(&spec, &net, &[t[0] + 1.0, t[1]], &[1.0, 1.0]), 1.0);
        assert_eq!(distance(&[17.0, 13.0], &[18.0, 13.0], &[1.0, 1.0]), 1.0);
        assert_eq!(default_weights(&[18.0, 0.0, -4.0]), vec![1.0 / 18.0, 1.0, 0.25]);
    }

    #[test]
    fn matching_start_succeeds_without_steps() {
        let spec = ModelSpec::edges_triangles();
        let start = Network::complete(5);
        let cfg = AnnealConfig { init: AnnealInit::FromNetwork { network: Some(start.clone()) }, ..AnnealConfig::default() };
        let res = anneal(&spec, &spec.stat_vector(&start), 5, &cfg).unwrap();
        assert!(res.success);
        assert_eq!(res.steps_used, 0);
        assert_eq!(res.network, start);
    }

    #[test]
    fn nine_node_target_is_reached_with_varied_networks() {
        let spec = ModelSpec::edges_triangles();
        let target = [18.0, 13.0];
        let mut degree_sequences = HashSet::new();
        for seed in 0..12 {
            let res = anneal(&spec, &target, 9, &nine_node_config(seed)).unwrap();
            assert!(res.success, "seed {seed}: distance {}", res.achieved_distance);
            assert_eq!(spec.stat_vector(&res.network).0, target.to_vec());
            assert_eq!(res.achieved_stats.0, target.to_vec());
            assert!(res.steps_used <= 1_000_000);
            assert_eq!(res.max_checkpoint_drift, 0.0);
            degree_sequences.insert(res.network.degree_sequence());
        }
        assert!(degree_sequences.len() > 1);
    }

    #[test]
    fn schedule_cools_between_reheats() {
        let spec = ModelSpec::edges_triangles();
        // unattainable target (too many triangles for 10 edges) forces a long run
        let cfg = AnnealConfig { max_steps: 60_000, ..nine_node_config(3) };
        let res = anneal(&spec, &[10.0, 40.0], 9, &cfg).unwrap();
        assert!(!res.success);
        assert_eq!(res.steps_used, 60_000);
        assert!(!res.reheats.is_empty() && res.reheats.len() <= 3);
        for w in res.temperature_schedule.windows(2) {
            let reheated = res.reheats.contains(&w[1].0);
            assert!(reheated || w[1].1 < w[0].1);
        }
        assert_eq!(res.max_checkpoint_drift, 0.0);
        assert_eq!(res.achieved_distance, energy(&spec, &res.network, &[10.0, 40.0], &default_weights(&[10.0, 40.0])));
    }

    #[test]
    fn budget_schedule_reaches_low_temperature() {
        // small networks keep one sweep per level
        assert_eq!(budget_steps_per_temperature(9, 0.999, 1_000_000), 36);
        let spt = budget_steps_per_temperature(418, 0.999, 20_000_000);
        assert!(spt < dyad_count(418) as u64);
        let levels = 20_000_000 / spt;
        assert!(0.999f64.powi(levels as i32) <= 1e-4);
        assert_eq!(budget_steps_per_temperature(50, 0.999, 10), 1);
    }

    #[test]
    fn calibrated_start_temperature_accepts_most_worse_moves() {
        let spec = ModelSpec::edges_triangles();
        let target = [18.0, 13.0];
        let weights = default_weights(&target);
        let mut rng = stream_rng(5, 0);
        let net = erdos_renyi(9, 0.5, &mut rng).unwrap();
        let stats = spec.stat_vector(&net);
        let t0 = calibrate_temperature(&spec, &net, &stats, &target, &weights, &mut rng);
        // empirical acceptance of worse moves at t0
        let mut change = vec![0.0; 2];
        let (mut worse, mut accepted) = (0.0, 0.0);
        for _ in 0..5000 {
            let d = propose(Proposal::UniformDyad, &net, None, &mut rng);
            let sign = if net.has_tie(d) { -1.0 } else { 1.0 };
            spec.change_into(&net, d, &mut change);
            let moved: Vec<f64> = stats.iter().zip(&change).map(|(s, c)| s + sign * c).collect();
            let delta = distance(&moved, &target, &weights) - distance(&stats, &target, &weights);
            if delta > 0.0 {
                worse += 1.0;
                accepted += (-delta / t0).exp();
            }
        }
        let rate = accepted / worse;
        assert!((0.7..0.9).contains(&rate), "{rate}");
    }

    #[test]
    fn runs_are_deterministic() {
        let spec = ModelSpec::edges_triangles();
        let a = anneal(&spec, &[18.0, 13.0], 9, &nine_node_config(7)).unwrap();
        let b = anneal(&spec, &[18.0, 13.0], 9, &nine_node_config(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.network, b.network);
    }

    #[test]
    fn improved_start_paths() {
        let spec = ModelSpec::edges_triangles();
        let mut rng = stream_rng(8, 0);
        let obs = erdos_renyi(12, 0.3, &mut rng).unwrap();
        assert!(matches!(improved_start(&spec, &obs, &AnnealConfig::default(), 0), Err(AnnealError::NoAttempts)));
        let start = improved_start(&spec, &obs, &AnnealConfig::default(), 4).unwrap();
        assert!(start.anneal.success);
        assert_eq!(spec.stat_vector(&start.anneal.network), spec.stat_vector(&obs));
        assert_eq!(start.theta, mple(&spec, &start.anneal.network).unwrap().theta);
        let missing = anneal(&spec, &[3.0, 0.0], 5, &AnnealConfig { init: AnnealInit::FromObserved, ..AnnealConfig::default() });
        assert!(matches!(missing, Err(AnnealError::MissingObserved)));
    }

    #[test]
    fn rao_blackwell_single_run_is_that_runs_mple() {
        let spec = ModelSpec::edges_triangles();
        let cfg = nine_node_config(9);
        let est = rao_blackwell_mple(&spec, &[18.0, 13.0], 9, &cfg, 1).unwrap();
        let run = anneal(&spec, &[18.0, 13.0], 9, &attempt_config(&cfg, 0)).unwrap();
        assert_eq!(est.theta, mple(&spec, &run.network).unwrap().theta);
        let est = rao_blackwell_mple(&spec, &[18.0, 13.0], 9, &cfg, 8).unwrap();
        for j in 0..2 {
            let lo = est.mples.iter().map(|t| t[j]).fold(f64::INFINITY, f64::min);
            let hi = est.mples.iter().map(|t| t[j]).fold(f64::NEG_INFINITY, f64::max);
            assert!(lo <= est.theta[j] && est.theta[j] <= hi);
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let spec = ModelSpec::edges_triangles();
        let bad = |cfg: AnnealConfig| anneal(&spec, &[3.0, 1.0], 5, &cfg).is_err();
        assert!(bad(AnnealConfig { cooling_rate: 1.0, ..AnnealConfig::default() }));
        assert!(bad(AnnealConfig { stat_weights: Some(vec![1.0, 0.0]), ..AnnealConfig::default() }));
        assert!(bad(AnnealConfig { initial_temperature: Some(-1.0), ..AnnealConfig::default() }));
        assert!(anneal(&spec, &[3.0], 5, &AnnealConfig::default()).is_err());
    }
}
