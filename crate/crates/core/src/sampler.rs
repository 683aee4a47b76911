//! Metropolis–Hastings sampling from `P_θ` by single-dyad toggles.
//!
//! A proposal picks a dyad and suggests flipping it. With change statistic
//! `Δ` and `s = +1` for an addition (`−1` for a removal), the move is
//! accepted with probability `min(1, exp(s·θᵀΔ) · H)`, where `H` is the
//! proposal's Hastings ratio.
//!
//! [`Proposal::TieNoTie`] picks an existing tie with probability `tie_prob`
//! and a uniform dyad otherwise. On sparse networks almost every uniform
//! proposal is an addition that gets rejected; drawing removals directly is
//! what lets a chain on a 0.6%-density graph mix at all.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{dyad_count, Dyad, Network};
use crate::mple::Theta;
use crate::rng::{stream_rng, ErgmRng};
use crate::stats::{ModelSpec, SpecError, StatVector};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid sampler configuration: {0}")]
    Config(String),
    #[error("theta has {got} coordinates, model has {expected}")]
    ThetaDimension { got: usize, expected: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Proposal {
    UniformDyad,
    TieNoTie { tie_prob: f64 },
}

impl Default for Proposal {
    fn default() -> Self {
        Proposal::TieNoTie { tie_prob: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub burn_in: u64,
    /// Toggle proposals between retained samples.
    pub interval: u64,
    /// Number of retained samples `L`.
    pub sample_size: usize,
    #[serde(default)]
    pub proposal: Proposal,
    #[serde(default)]
    pub seed: u64,
    /// Keep copies of the retained networks, not just their statistics.
    #[serde(default)]
    pub keep_networks: bool,
}

impl SamplerConfig {
    /// Burn-in of 10 sweeps, one sweep between samples, `L = 1000`.
    pub fn for_nodes(n: usize) -> Self {
        let dyads = dyad_count(n).max(1) as u64;
        SamplerConfig {
            burn_in: 10 * dyads,
            interval: dyads,
            sample_size: 1000,
            proposal: Proposal::default(),
            seed: 0,
            keep_networks: false,
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.interval == 0 {
            return Err(SamplerError::Config("interval must be at least 1".into()));
        }
        if self.sample_size == 0 {
            return Err(SamplerError::Config("sample_size must be at least 1".into()));
        }
        if let Proposal::TieNoTie { tie_prob } = self.proposal {
            if !(tie_prob > 0.0 && tie_prob < 1.0) {
                return Err(SamplerError::Config(format!("tie_prob must lie in (0, 1), got {tie_prob}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub stats: Vec<StatVector>,
    /// Edge count of each retained network (for density diagnostics).
    pub edge_counts: Vec<usize>,
    pub networks: Option<Vec<Network>>,
    pub final_network: Network,
    pub acceptance_rate: f64,
    pub node_count: usize,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn mean(&self) -> StatVector {
        let q = self.stats.first().map_or(0, |s| s.len());
        let mut mean = StatVector::zeros(q);
        let m = self.len() as f64;
        for s in &self.stats {
            mean.add_scaled(s, 1.0 / m);
        }
        mean
    }

    /// Concatenates batches in order; the final network is the last batch's.
    pub fn merge(batches: Vec<SampleBatch>) -> Option<SampleBatch> {
        let mut iter = batches.into_iter();
        let mut acc = iter.next()?;
        let mut weight = acc.len() as f64;
        let mut accepted = acc.acceptance_rate * weight;
        for b in iter {
            weight += b.len() as f64;
            accepted += b.acceptance_rate * b.len() as f64;
            acc.stats.extend(b.stats);
            acc.edge_counts.extend(b.edge_counts);
            if let (Some(nets), Some(more)) = (acc.networks.as_mut(), b.networks) {
                nets.extend(more);
            }
            acc.final_network = b.final_network;
        }
        acc.acceptance_rate = accepted / weight;
        Some(acc)
    }
}

/// Existing ties with O(1) uniform selection, insertion and removal.
#[derive(Debug, Clone)]
pub(crate) struct TieSet {
    n: usize,
    ties: Vec<Dyad>,
    slot: Vec<u32>,
}

const NO_SLOT: u32 = u32::MAX;

impl TieSet {
    pub(crate) fn new(net: &Network) -> Self {
        let n = net.node_count();
        let mut set = TieSet { n, ties: Vec::with_capacity(net.edge_count()), slot: vec![NO_SLOT; dyad_count(n)] };
        for d in net.edges() {
            set.insert(d);
        }
        set
    }

    pub(crate) fn insert(&mut self, d: Dyad) {
        self.slot[d.linear_index(self.n)] = self.ties.len() as u32;
        self.ties.push(d);
    }

    pub(crate) fn remove(&mut self, d: Dyad) {
        let idx = std::mem::replace(&mut self.slot[d.linear_index(self.n)], NO_SLOT) as usize;
        let last = self.ties.pop().expect("removing from an empty tie set");
        if idx < self.ties.len() {
            self.ties[idx] = last;
            self.slot[last.linear_index(self.n)] = idx as u32;
        }
    }
}

#[inline]
fn uniform_dyad(n: usize, rng: &mut impl Rng) -> Dyad {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    Dyad::ordered(a, b)
}

/// `log q(d | x') − log q(d | x)` for toggling `d`, where `x` has
/// `edges_before` ties and `d` is currently tied iff `tied`.
fn log_hastings(proposal: Proposal, dyads: usize, edges_before: usize, tied: bool) -> f64 {
    match proposal {
        Proposal::UniformDyad => 0.0,
        Proposal::TieNoTie { tie_prob } => {
            let uniform = (1.0 - tie_prob) / dyads as f64;
            let q = |edges: usize, in_set: bool| {
                if edges == 0 {
                    1.0 / dyads as f64
                } else {
                    uniform + if in_set { tie_prob / edges as f64 } else { 0.0 }
                }
            };
            let edges_after = if tied { edges_before - 1 } else { edges_before + 1 };
            q(edges_after, !tied).ln() - q(edges_before, tied).ln()
        }
    }
}

pub(crate) fn propose(proposal: Proposal, net: &Network, ties: Option<&TieSet>, rng: &mut impl Rng) -> Dyad {
    let n = net.node_count();
    match proposal {
        Proposal::TieNoTie { tie_prob } if net.edge_count() > 0 && rng.random_bool(tie_prob) => match ties {
            Some(t) => t.ties[rng.random_range(0..t.ties.len())],
            None => net.edges().nth(rng.random_range(0..net.edge_count())).expect("edge count is cached"),
        },
        _ => uniform_dyad(n, rng),
    }
}

/// Log acceptance probability of toggling `d` given its change vector.
#[inline]
fn log_acceptance(theta: &[f64], change: &[f64], tied: bool, log_h: f64) -> f64 {
    let eta: f64 = theta.iter().zip(change).map(|(a, b)| a * b).sum();
    let sign = if tied { -1.0 } else { 1.0 };
    sign * eta + log_h
}

/// One Metropolis–Hastings proposal on `net`; returns whether it was accepted.
///
/// Convenience form without a tie index, so tie/no-tie proposals cost
/// O(edges) here. Long chains should use [`MhChain`].
pub fn mh_step(spec: &ModelSpec, net: &mut Network, theta: &Theta, proposal: Proposal, rng: &mut impl Rng) -> bool {
    if net.node_count() < 2 {
        return false;
    }
    let d = propose(proposal, net, None, rng);
    let tied = net.has_tie(d);
    let change = spec.change_vector(net, d);
    let log_a = log_acceptance(theta, &change, tied, log_hastings(proposal, net.dyad_count(), net.edge_count(), tied));
    if log_a >= 0.0 || rng.random::<f64>() < log_a.exp() {
        net.toggle(d);
        true
    } else {
        false
    }
}

/// A running chain that tracks `T` incrementally.
pub struct MhChain<'a> {
    spec: &'a ModelSpec,
    theta: Vec<f64>,
    proposal: Proposal,
    net: Network,
    ties: TieSet,
    stats: StatVector,
    scratch: Vec<f64>,
    rng: ErgmRng,
    proposed: u64,
    accepted: u64,
}

impl<'a> MhChain<'a> {
    pub fn new(spec: &'a ModelSpec, theta: &Theta, start: Network, proposal: Proposal, rng: ErgmRng) -> Result<Self, SamplerError> {
        if theta.len() != spec.dim() {
            return Err(SamplerError::ThetaDimension { got: theta.len(), expected: spec.dim() });
        }
        spec.check_nodes(start.node_count())?;
        if start.node_count() < 2 {
            return Err(SamplerError::Config("sampling needs at least two nodes".into()));
        }
        Ok(MhChain {
            spec,
            theta: theta.0.clone(),
            proposal,
            ties: TieSet::new(&start),
            stats: spec.stat_vector(&start),
            scratch: vec![0.0; spec.dim()],
            net: start,
            rng,
            proposed: 0,
            accepted: 0,
        })
    }

    pub fn step(&mut self) -> bool {
        let d = propose(self.proposal, &self.net, Some(&self.ties), &mut self.rng);
        let tied = self.net.has_tie(d);
        self.spec.change_into(&self.net, d, &mut self.scratch);
        let log_h = log_hastings(self.proposal, self.net.dyad_count(), self.net.edge_count(), tied);
        let log_a = log_acceptance(&self.theta, &self.scratch, tied, log_h);
        self.proposed += 1;
        if log_a >= 0.0 || self.rng.random::<f64>() < log_a.exp() {
            self.net.toggle(d);
            if tied {
                self.ties.remove(d);
                self.stats.add_scaled(&self.scratch, -1.0);
            } else {
                self.ties.insert(d);
                self.stats.add_scaled(&self.scratch, 1.0);
            }
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn stats(&self) -> &StatVector {
        &self.stats
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn into_network(self) -> Network {
        self.net
    }
}

/// Runs one chain from `start`: `burn_in` proposals, then `sample_size`
/// retained states spaced `interval` proposals apart.
pub fn sample(spec: &ModelSpec, theta: &Theta, start: &Network, config: &SamplerConfig) -> Result<SampleBatch, SamplerError> {
    sample_stream(spec, theta, start, config, 0)
}

fn sample_stream(spec: &ModelSpec, theta: &Theta, start: &Network, config: &SamplerConfig, stream: u64) -> Result<SampleBatch, SamplerError> {
    config.validate()?;
    let mut chain = MhChain::new(spec, theta, start.clone(), config.proposal, stream_rng(config.seed, stream))?;
    chain.run(config.burn_in);
    let (burn_proposed, burn_accepted) = (chain.proposed, chain.accepted);
    let mut stats = Vec::with_capacity(config.sample_size);
    let mut edge_counts = Vec::with_capacity(config.sample_size);
    let mut networks = config.keep_networks.then(|| Vec::with_capacity(config.sample_size));
    for _ in 0..config.sample_size {
        chain.run(config.interval);
        stats.push(chain.stats.clone());
        edge_counts.push(chain.net.edge_count());
        if let Some(nets) = networks.as_mut() {
            nets.push(chain.net.clone());
        }
    }
    let sampled = (chain.proposed - burn_proposed).max(1);
    let acceptance_rate = (chain.accepted - burn_accepted) as f64 / sampled as f64;
    Ok(SampleBatch {
        stats,
        edge_counts,
        networks,
        node_count: start.node_count(),
        final_network: chain.into_network(),
        acceptance_rate,
    })
}

/// Independent chains on streams `0..chains`, each retaining an equal share
/// of `sample_size`, merged in chain order.
pub fn sample_chains(
    spec: &ModelSpec,
    theta: &Theta,
    start: &Network,
    config: &SamplerConfig,
    chains: usize,
) -> Result<SampleBatch, SamplerError> {
    let chains = chains.clamp(1, config.sample_size.max(1));
    let per_chain = config.sample_size.div_ceil(chains);
    let batches: Result<Vec<_>, _> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut cfg = config.clone();
            cfg.sample_size = per_chain.min(config.sample_size - c * per_chain);
            sample_stream(spec, theta, start, &cfg, c as u64)
        })
        .collect();
    Ok(SampleBatch::merge(batches?).expect("at least one chain"))
}

/// Bernoulli(`p`) ties on every dyad.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Result<Network, SamplerError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SamplerError::Config(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut net = Network::empty(n);
    for d in Dyad::all(n) {
        if rng.random_bool(p) {
            net.toggle(d);
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mple::logistic;
    use crate::stats::StatTerm;

    fn edges_only() -> ModelSpec {
        ModelSpec::new(vec![StatTerm::Edges]).unwrap()
    }

    #[test]
    fn zero_theta_accepts_everything() {
        let spec = ModelSpec::edges_triangles();
        let mut cfg = SamplerConfig::for_nodes(6);
        cfg.proposal = Proposal::UniformDyad;
        cfg.sample_size = 50;
        let batch = sample(&spec, &Theta::zeros(2), &Network::empty(6), &cfg).unwrap();
        assert_eq!(batch.acceptance_rate, 1.0);
    }

    #[test]
    fn strongly_negative_edges_blocks_additions() {
        let spec = edges_only();
        let mut rng = stream_rng(3, 0);
        let mut net = Network::empty(6);
        let theta = Theta(vec![-30.0]);
        let mut added = 0;
        for _ in 0..100_000 {
            if mh_step(&spec, &mut net, &theta, Proposal::UniformDyad, &mut rng) {
                added += 1;
                net = Network::empty(6);
            }
        }
        assert!((added as f64 / 1e5) < 1e-6);
    }

    #[test]
    fn hastings_ratio_is_consistent() {
        // q(d|x) P(x) α(x→x') must equal q(d|x') P(x') α(x'→x) for a tie/no-tie move
        let p = Proposal::TieNoTie { tie_prob: 0.3 };
        for (dyads, edges) in [(10usize, 0usize), (10, 1), (10, 4), (45, 44)] {
            let fwd = log_hastings(p, dyads, edges, false);
            let back = log_hastings(p, dyads, edges + 1, true);
            assert!((fwd + back).abs() < 1e-12, "{dyads} {edges}");
        }
        assert_eq!(log_hastings(Proposal::UniformDyad, 10, 3, true), 0.0);
    }

    #[test]
    fn tie_set_tracks_network() {
        let spec = ModelSpec::edges_triangles();
        let cfg = Proposal::TieNoTie { tie_prob: 0.5 };
        let mut chain = MhChain::new(&spec, &Theta(vec![-0.5, 0.2]), Network::empty(8), cfg, stream_rng(1, 0)).unwrap();
        for _ in 0..20_000 {
            chain.step();
            assert_eq!(chain.ties.ties.len(), chain.net.edge_count());
        }
        let mut from_set: Vec<Dyad> = chain.ties.ties.clone();
        from_set.sort();
        assert_eq!(from_set, chain.net.edges().collect::<Vec<_>>());
        assert_eq!(chain.stats().0, spec.stat_vector(chain.network()).0);
    }

    fn dyad_frequency(proposal: Proposal) -> (f64, f64) {
        // edges-only θ = −1 on 5 nodes: dyads are independent Bernoulli(logistic(−1))
        let spec = edges_only();
        let cfg = SamplerConfig {
            burn_in: 1_000,
            interval: 10,
            sample_size: 40_000,
            proposal,
            seed: 17,
            keep_networks: false,
        };
        let batch = sample(&spec, &Theta(vec![-1.0]), &Network::empty(5), &cfg).unwrap();
        let edges: Vec<f64> = batch.stats.iter().map(|s| s[0]).collect();
        let mean = edges.iter().sum::<f64>() / edges.len() as f64 / 10.0;
        // one sweep between samples; lag correlation is modest, so inflate the SE by 2
        let p = logistic(-1.0);
        let se = 2.0 * (p * (1.0 - p) / 10.0 / edges.len() as f64).sqrt();
        (mean, se)
    }

    #[test]
    fn independent_dyad_frequency_uniform() {
        let (freq, se) = dyad_frequency(Proposal::UniformDyad);
        assert!((freq - 0.268_941_421_369_995_1).abs() < 3.0 * se, "{freq} ± {se}");
    }

    #[test]
    fn independent_dyad_frequency_tie_no_tie() {
        let (freq, se) = dyad_frequency(Proposal::TieNoTie { tie_prob: 0.5 });
        assert!((freq - 0.268_941_421_369_995_1).abs() < 3.0 * se, "{freq} ± {se}");
    }

    #[test]
    fn zero_theta_mean_edges() {
        let spec = edges_only();
        let mut cfg = SamplerConfig::for_nodes(5);
        cfg.sample_size = 20_000;
        cfg.seed = 5;
        let batch = sample(&spec, &Theta(vec![0.0]), &Network::empty(5), &cfg).unwrap();
        let mean = batch.mean()[0];
        // Binomial(10, 1/2), SD √2.5, one sweep between samples
        let se = 2.0 * (2.5f64 / 20_000.0).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn seeded_batches_are_identical() {
        let spec = ModelSpec::edges_triangles();
        let mut cfg = SamplerConfig::for_nodes(9);
        cfg.sample_size = 100;
        cfg.seed = 99;
        let theta = Theta(vec![-1.0, 0.53]);
        let a = sample(&spec, &theta, &Network::empty(9), &cfg).unwrap();
        let b = sample(&spec, &theta, &Network::empty(9), &cfg).unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.final_network, b.final_network);
        let c = sample_chains(&spec, &theta, &Network::empty(9), &cfg, 4).unwrap();
        let d = sample_chains(&spec, &theta, &Network::empty(9), &cfg, 4).unwrap();
        assert_eq!(c.len(), 100);
        assert_eq!(c.stats, d.stats);
    }

    #[test]
    fn retained_stats_match_networks() {
        let spec = ModelSpec::new(vec![StatTerm::Edges, StatTerm::Triangles, StatTerm::GwDegree { decay: 0.25 }, StatTerm::DegreeCount { d: 2 }]).unwrap();
        let mut cfg = SamplerConfig::for_nodes(12);
        cfg.sample_size = 200;
        cfg.keep_networks = true;
        let batch = sample(&spec, &Theta(vec![-1.0, 0.1, 0.3, 0.2]), &Network::empty(12), &cfg).unwrap();
        for (s, net) in batch.stats.iter().zip(batch.networks.as_ref().unwrap()) {
            let fresh = spec.stat_vector(net);
            for k in 0..4 {
                assert!((s[k] - fresh[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn erdos_renyi_extremes_and_moments() {
        let mut rng = stream_rng(8, 0);
        assert_eq!(erdos_renyi(10, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(10, 1.0, &mut rng).unwrap().edge_count(), 45);
        assert!(erdos_renyi(10, 1.5, &mut rng).is_err());
        let dyads = dyad_count(418) as f64;
        let p = 519.0 / dyads;
        let sd = (dyads * p * (1.0 - p)).sqrt();
        let draws: Vec<f64> = (0..100).map(|_| erdos_renyi(418, p, &mut rng).unwrap().edge_count() as f64).collect();
        for &e in &draws {
            assert!((e - 519.0).abs() < 5.0 * sd, "{e}");
        }
        let mean = draws.iter().sum::<f64>() / 100.0;
        assert!((mean - 519.0).abs() < 3.0 * sd / 10.0, "{mean}");
    }

    #[test]
    fn config_validation() {
        let mut cfg = SamplerConfig::for_nodes(5);
        cfg.interval = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SamplerConfig::for_nodes(5);
        cfg.proposal = Proposal::TieNoTie { tie_prob: 1.0 };
        assert!(cfg.validate().is_err());
        assert!(sample(&edges_only(), &Theta(vec![0.0, 1.0]), &Network::empty(4), &SamplerConfig::for_nodes(4)).is_err());
    }
}
