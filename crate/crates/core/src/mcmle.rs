//! Monte Carlo maximum likelihood.
//!
//! With networks `A_1..A_L` sampled at `θ₀`, the log-likelihood difference
//!
//! ```text
//! ℓ(θ) − ℓ(θ₀) ≈ (θ−θ₀)ᵀ t_obs − log (1/L) Σ_i exp{(θ−θ₀)ᵀ T(A_i)}
//! ```
//!
//! is concave in `θ`. Each outer iteration samples at `θ₀`, maximizes this
//! approximation inside the box `‖θ−θ₀‖∞ ≤ step_bound`, and moves `θ₀` to the
//! maximizer. Iteration stops once the sample mean of `T` at `θ₀` matches
//! `t_obs` to within `convergence_tolerance` standard errors per coordinate,
//! or when the sample looks degenerate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Network;
use crate::linalg::{is_positive_definite, sample_covariance, solve_spd, Matrix};
use crate::mple::Theta;
use crate::rng::derive_seed;
use crate::sampler::{sample_chains, SampleBatch, SamplerConfig, SamplerError};
use crate::stats::{ModelSpec, StatVector};

#[derive(Debug, Error)]
pub enum McmleError {
    #[error("starting value is not finite")]
    NonFiniteStart,
    #[error("theta has {got} coordinates, model has {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("invalid MCMLE configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmleConfig {
    pub max_outer_iterations: usize,
    pub sampler: SamplerConfig,
    /// Largest `‖θ_new − θ₀‖∞` per outer iteration.
    pub step_bound: f64,
    /// Per-coordinate `|z|` threshold for the moment criterion.
    pub convergence_tolerance: f64,
    pub seed: u64,
    /// Parallel chains per batch.
    pub chains: usize,
    /// A step is shrunk while the importance weights' effective sample size
    /// is below this fraction of the batch size.
    pub min_ess_fraction: f64,
}

impl Default for McmleConfig {
    fn default() -> Self {
        McmleConfig {
            max_outer_iterations: 20,
            sampler: SamplerConfig::for_nodes(10),
            step_bound: 0.5,
            convergence_tolerance: 3.0,
            seed: 0,
            chains: 1,
            min_ess_fraction: 0.05,
        }
    }
}

impl McmleConfig {
    pub fn for_nodes(n: usize) -> Self {
        McmleConfig { sampler: SamplerConfig::for_nodes(n), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), McmleError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_outer_iterations == 0 || self.chains == 0 {
            return Err(McmleError::Config("iteration and chain counts must be positive".into()));
        }
        if !positive(self.step_bound) || !positive(self.convergence_tolerance) {
            return Err(McmleError::Config("step_bound and convergence_tolerance must be positive".into()));
        }
        if !(self.min_ess_fraction > 0.0 && self.min_ess_fraction < 1.0) {
            return Err(McmleError::Config("min_ess_fraction must lie in (0, 1)".into()));
        }
        self.sampler.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McmleStatus {
    Converged,
    Degenerate,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// Fraction of sampled networks with density below 0.01 or above 0.99.
    pub boundary_fraction: f64,
    pub singular_covariance: bool,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub mean: StatVector,
    pub standard_error: Vec<f64>,
    pub effective_sample_size: Vec<f64>,
    /// `(mean − t_obs) / SE` per coordinate.
    pub z: Vec<f64>,
}

impl MomentCheck {
    pub fn within(&self, tolerance: f64) -> bool {
        self.z.iter().all(|z| z.abs() <= tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    /// Parameter the batch was sampled at.
    pub theta: Theta,
    pub moment_gap: Vec<f64>,
    pub moment_z: Vec<f64>,
    pub acceptance_rate: f64,
    pub degeneracy: DegeneracyReport,
    /// Maximizer of the approximation, when a step was taken.
    pub next_theta: Option<Theta>,
    /// Importance-weight effective sample size at `next_theta`.
    pub weight_ess: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmleResult {
    pub theta: Theta,
    pub status: McmleStatus,
    pub outer_iterations: usize,
    pub final_moment_z: Vec<f64>,
    pub trace: Vec<IterationTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerStep {
    pub theta: Theta,
    pub value: f64,
    pub max_abs_gradient: f64,
    pub weight_ess: f64,
    /// The unconstrained maximizer lay outside the trust region (or did not exist).
    pub clipped: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Centred statistics `T(A_i) − t_obs`.
fn centred(batch: &SampleBatch, t_obs: &[f64]) -> Vec<Vec<f64>> {
    batch.stats.iter().map(|s| s.iter().zip(t_obs).map(|(a, b)| a - b).collect()).collect()
}

/// `−log (1/L) Σ exp(δᵀ u_i)` with normalized weights, gradient and negated Hessian.
struct Objective<'a> {
    u: &'a [Vec<f64>],
}

impl Objective<'_> {
    fn log_weights(&self, delta: &[f64]) -> Vec<f64> {
        self.u.iter().map(|u| dot(delta, u)).collect()
    }

    fn value(&self, delta: &[f64]) -> f64 {
        let lw = self.log_weights(delta);
        let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = lw.iter().map(|v| (v - max).exp()).sum();
        -(max + sum.ln() - (lw.len() as f64).ln())
    }

    fn weights(&self, delta: &[f64]) -> Vec<f64> {
        let lw = self.log_weights(delta);
        let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = lw.iter().map(|v| (v - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// Gradient `−E_w[u]` and information `Cov_w[u]`.
    fn derivatives(&self, delta: &[f64]) -> (Vec<f64>, Matrix) {
        let q = delta.len();
        let w = self.weights(delta);
        let mut mean = vec![0.0; q];
        for (wi, u) in w.iter().zip(self.u) {
            for k in 0..q {
                mean[k] += wi * u[k];
            }
        }
        let mut info = Matrix::zeros(q, q);
        for (wi, u) in w.iter().zip(self.u) {
            for a in 0..q {
                for b in 0..=a {
                    info[(a, b)] += wi * (u[a] - mean[a]) * (u[b] - mean[b]);
                }
            }
        }
        for a in 0..q {
            for b in 0..a {
                info[(b, a)] = info[(a, b)];
            }
        }
        (mean.iter().map(|m| -m).collect(), info)
    }
}

fn weight_ess(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Monte Carlo approximation of `ℓ(θ) − ℓ(θ₀)` from a batch sampled at `θ₀`.
pub fn approx_loglik_diff(theta: &[f64], theta0: &[f64], t_obs: &[f64], batch: &SampleBatch) -> f64 {
    let delta: Vec<f64> = theta.iter().zip(theta0).map(|(a, b)| a - b).collect();
    let u = centred(batch, t_obs);
    Objective { u: &u }.value(&delta)
}

/// Maximizes the approximation over `‖θ−θ₀‖∞ ≤ step_bound`.
///
/// Newton with step halving runs from `θ₀`; because the objective is concave
/// an out-of-box maximizer is pulled back along the segment from `θ₀`, which
/// still increases the objective. The step is then halved while the weights'
/// effective sample size is below `min_ess_fraction · L`.
pub fn maximize_approximation(
    theta0: &[f64],
    t_obs: &[f64],
    batch: &SampleBatch,
    step_bound: f64,
    min_ess_fraction: f64,
) -> InnerStep {
    let q = theta0.len();
    let u = centred(batch, t_obs);
    let obj = Objective { u: &u };
    // iterates this far out mean t_obs is outside the sample's hull
    let runaway = 100.0 * step_bound;
    let mut delta = vec![0.0; q];
    let mut value = 0.0;
    let mut clipped = false;
    let mut max_abs_gradient = f64::INFINITY;
    for _ in 0..100 {
        let (grad, info) = obj.derivatives(&delta);
        max_abs_gradient = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if max_abs_gradient <= 1e-9 {
            break;
        }
        let Some(step) = solve_spd(&info, &grad) else {
            clipped = true;
            break;
        };
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand: Vec<f64> = delta.iter().zip(&step).map(|(d, s)| d + scale * s).collect();
            let v = obj.value(&cand);
            if v >= value {
                moved = v > value || scale == 1.0;
                delta = cand;
                value = v;
                break;
            }
            scale *= 0.5;
        }
        if !moved || delta.iter().any(|d| d.abs() > runaway) {
            clipped = clipped || delta.iter().any(|d| d.abs() > runaway);
            break;
        }
    }
    let norm = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if norm > step_bound {
        clipped = true;
        delta.iter_mut().for_each(|d| *d *= step_bound / norm);
    }
    let min_ess = min_ess_fraction * batch.len() as f64;
    let mut ess = weight_ess(&obj.weights(&delta));
    for _ in 0..30 {
        if ess >= min_ess {
            break;
        }
        delta.iter_mut().for_each(|d| *d *= 0.5);
        ess = weight_ess(&obj.weights(&delta));
    }
    let value = obj.value(&delta);
    if clipped || ess < min_ess {
        max_abs_gradient = obj.derivatives(&delta).0.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    }
    InnerStep {
        theta: Theta(theta0.iter().zip(&delta).map(|(a, d)| a + d).collect()),
        value,
        max_abs_gradient,
        weight_ess: ess,
        clipped,
    }
}

/// Flags batches concentrated at the empty/complete corners of the sample
/// space, or whose statistics have a numerically singular covariance.
pub fn degeneracy_check(batch: &SampleBatch, n: usize) -> DegeneracyReport {
    let dyads = crate::graph::dyad_count(n).max(1) as f64;
    let boundary = batch
        .edge_counts
        .iter()
        .filter(|&&e| {
            let density = e as f64 / dyads;
            !(0.01..=0.99).contains(&density)
        })
        .count();
    let boundary_fraction = if batch.is_empty() { 1.0 } else { boundary as f64 / batch.len() as f64 };
    let q = batch.stats.first().map_or(0, |s| s.len());
    let (_, cov) = sample_covariance(batch.stats.iter().map(|s| &s[..]), q);
    let singular_covariance = q == 0 || !is_positive_definite(&cov, 1e-10);
    DegeneracyReport { boundary_fraction, singular_covariance, flagged: boundary_fraction > 0.95 || singular_covariance }
}

/// Effective sample size of one series via Geyer's initial positive sequence.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let m = x.len();
    if m < 4 {
        return m as f64;
    }
    let mean = x.iter().sum::<f64>() / m as f64;
    let autocov = |lag: usize| x[..m - lag].iter().zip(&x[lag..]).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>() / m as f64;
    let gamma0 = autocov(0);
    if gamma0 <= 0.0 {
        return m as f64;
    }
    let mut sum = 0.0;
    let mut k = 0;
    while 2 * k + 1 < m {
        let pair = autocov(2 * k) + autocov(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        k += 1;
    }
    let tau = (2.0 * sum - gamma0) / gamma0;
    (m as f64 / tau.max(1e-12)).clamp(1.0, m as f64)
}

/// Standardized moment gaps of a batch against `t_obs`.
pub fn moment_z(batch: &SampleBatch, t_obs: &[f64]) -> MomentCheck {
    let mean = batch.mean();
    let q = mean.len();
    let mut standard_error = Vec::with_capacity(q);
    let mut effective = Vec::with_capacity(q);
    let mut z = Vec::with_capacity(q);
    for k in 0..q {
        let series: Vec<f64> = batch.stats.iter().map(|s| s[k]).collect();
        let m = series.len() as f64;
        let var = series.iter().map(|v| (v - mean[k]).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        let ess = effective_sample_size(&series);
        let se = (var / ess).sqrt();
        let gap = mean[k] - t_obs[k];
        z.push(if se > 0.0 {
            gap / se
        } else if gap == 0.0 {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        });
        standard_error.push(se);
        effective.push(ess);
    }
    MomentCheck { mean, standard_error, effective_sample_size: effective, z }
}

/// Samples at `theta` and compares the sample mean of `T` with `t_obs`.
pub fn moment_check(
    spec: &ModelSpec,
    theta: &Theta,
    t_obs: &[f64],
    start: &Network,
    config: &SamplerConfig,
    chains: usize,
) -> Result<MomentCheck, SamplerError> {
    let batch = sample_chains(spec, theta, start, config, chains)?;
    Ok(moment_z(&batch, t_obs))
}

/// MCMLE from `theta0` for the observed network `net_obs`.
pub fn mcmle_fit(spec: &ModelSpec, net_obs: &Network, theta0: &Theta, config: &McmleConfig) -> Result<McmleResult, McmleError> {
    config.validate()?;
    if theta0.len() != spec.dim() {
        return Err(McmleError::Dimension { got: theta0.len(), expected: spec.dim() });
    }
    if !theta0.is_finite() {
        return Err(McmleError::NonFiniteStart);
    }
    let n = net_obs.node_count();
    let t_obs = spec.stat_vector(net_obs);
    let mut theta = theta0.clone();
    let mut start = net_obs.clone();
    let mut trace = Vec::new();
    for iteration in 0..config.max_outer_iterations {
        let mut sampler = config.sampler.clone();
        sampler.seed = derive_seed(config.seed, iteration as u64);
        let batch = sample_chains(spec, &theta, &start, &sampler, config.chains)?;
        let degeneracy = degeneracy_check(&batch, n);
        let check = moment_z(&batch, &t_obs);
        let gap: Vec<f64> = check.mean.iter().zip(t_obs.iter()).map(|(m, t)| m - t).collect();
        let mut entry = IterationTrace {
            iteration,
            theta: theta.clone(),
            moment_gap: gap,
            moment_z: check.z.clone(),
            acceptance_rate: batch.acceptance_rate,
            degeneracy: degeneracy.clone(),
            next_theta: None,
            weight_ess: None,
        };
        log::debug!("mcmle iteration {iteration}: theta {:?} z {:?}", theta.0, check.z);
        if degeneracy.flagged {
            trace.push(entry);
            return Ok(McmleResult {
                theta,
                status: McmleStatus::Degenerate,
                outer_iterations: iteration + 1,
                final_moment_z: check.z,
                trace,
            });
        }
        let step = maximize_approximation(&theta, &t_obs, &batch, config.step_bound, config.min_ess_fraction);
        entry.next_theta = Some(step.theta.clone());
        entry.weight_ess = Some(step.weight_ess);
        trace.push(entry);
        if check.within(config.convergence_tolerance) {
            // moments already match at θ₀; the batch's own maximizer refines it
            return Ok(McmleResult {
                theta: step.theta,
                status: McmleStatus::Converged,
                outer_iterations: iteration + 1,
                final_moment_z: check.z,
                trace,
            });
        }
        theta = step.theta;
        start = batch.final_network;
    }
    let final_moment_z = trace.last().map(|t| t.moment_z.clone()).unwrap_or_default();
    Ok(McmleResult {
        theta,
        status: McmleStatus::MaxIterations,
        outer_iterations: config.max_outer_iterations,
        final_moment_z,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumerate;
    use crate::sampler::{sample, Proposal};

    fn batch_at(theta: &[f64], n: usize, size: usize, seed: u64) -> SampleBatch {
        let mut cfg = SamplerConfig::for_nodes(n);
        cfg.sample_size = size;
        cfg.seed = seed;
        sample(&ModelSpec::edges_triangles(), &Theta(theta.to_vec()), &Network::empty(n), &cfg).unwrap()
    }

    #[test]
    fn zero_step_is_exactly_zero() {
        let batch = batch_at(&[-0.5, 0.2], 6, 200, 1);
        let th = [-0.5, 0.2];
        assert_eq!(approx_loglik_diff(&th, &th, &[5.0, 1.0], &batch), 0.0);
    }

    #[test]
    fn shifting_all_statistics_changes_nothing() {
        let mut batch = batch_at(&[-0.5, 0.2], 6, 300, 2);
        let (th, th0, t_obs) = ([-0.3, 0.1], [-0.5, 0.2], [6.0, 2.0]);
        let before = approx_loglik_diff(&th, &th0, &t_obs, &batch);
        let c = [3.5, -7.25];
        for s in batch.stats.iter_mut() {
            s.add_scaled(&c, 1.0);
        }
        let shifted = [t_obs[0] + c[0], t_obs[1] + c[1]];
        let after = approx_loglik_diff(&th, &th0, &shifted, &batch);
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn approximation_tracks_exact_loglik_difference() {
        let n = 6;
        let table = enumerate(&ModelSpec::edges_triangles(), n, 9).unwrap();
        let th0 = [-0.8, 0.4];
        let t_obs = [6.0, 2.0];
        let batch = batch_at(&th0, n, 100_000, 3);
        for d in [[0.1, 0.1], [-0.1, 0.05], [0.0, -0.1], [0.07, -0.07]] {
            let th = [th0[0] + d[0], th0[1] + d[1]];
            let exact = table.loglik(&th, &t_obs) - table.loglik(&th0, &t_obs);
            let approx = approx_loglik_diff(&th, &th0, &t_obs, &batch);
            assert!((exact - approx).abs() < 0.02, "{d:?}: exact {exact} approx {approx}");
        }
    }

    #[test]
    fn inner_maximizer_respects_trust_region_and_is_stationary() {
        let batch = batch_at(&[-0.5, 0.2], 7, 2000, 4);
        let mean = batch.mean();
        // target near the batch mean: interior optimum close to θ₀
        let near = [mean[0] + 0.3, mean[1] + 0.2];
        let step = maximize_approximation(&[-0.5, 0.2], &near, &batch, 0.5, 0.05);
        assert!(!step.clipped);
        assert!(step.max_abs_gradient <= 1e-6);
        // far target: pulled back to the box
        let far = [mean[0] + 8.0, mean[1] + 10.0];
        let step = maximize_approximation(&[-0.5, 0.2], &far, &batch, 0.5, 0.05);
        let moved = (step.theta[0] + 0.5).abs().max((step.theta[1] - 0.2).abs());
        assert!(moved <= 0.5 + 1e-12);
        assert!(step.value > 0.0);
    }

    #[test]
    fn degeneracy_flags() {
        let mut batch = batch_at(&[0.0, 0.0], 9, 500, 5);
        assert!(!degeneracy_check(&batch, 9).flagged);
        let hot = batch_at(&[-1.0, 2.0], 9, 500, 6);
        let report = degeneracy_check(&hot, 9);
        assert!(report.flagged, "{report:?}");
        assert!(report.boundary_fraction > 0.95);
        batch.stats.iter_mut().for_each(|s| s.iter_mut().for_each(|v| *v = 0.0));
        batch.edge_counts.iter_mut().for_each(|e| *e = 0);
        let report = degeneracy_check(&batch, 9);
        assert!(report.flagged && report.singular_covariance && report.boundary_fraction == 1.0);
    }

    #[test]
    fn ess_of_independent_and_sticky_series() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(7, 0);
        let iid: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let ess = effective_sample_size(&iid);
        assert!(ess > 15_000.0, "{ess}");
        // AR(1) with φ = 0.9: ESS ≈ m (1−φ)/(1+φ)
        let mut x = 0.0;
        let ar: Vec<f64> = (0..50_000)
            .map(|_| {
                x = 0.9 * x + rng.random::<f64>() - 0.5;
                x
            })
            .collect();
        let ess = effective_sample_size(&ar);
        let expected = 50_000.0 * 0.1 / 1.9;
        assert!((ess / expected - 1.0).abs() < 0.25, "{ess} vs {expected}");
    }

    #[test]
    fn z_is_zero_at_batch_mean_and_large_far_away() {
        let batch = batch_at(&[-0.6, 0.3], 7, 2000, 8);
        let check = moment_z(&batch, &batch.mean());
        assert!(check.z.iter().all(|z| z.abs() < 1e-9));
        let n = 7;
        let table = enumerate(&ModelSpec::edges_triangles(), n, 9).unwrap();
        let t_obs = [9.0, 3.0];
        let mle = table.exact_mle(&t_obs).unwrap();
        let mut cfg = SamplerConfig::for_nodes(n);
        cfg.sample_size = 10_000;
        cfg.seed = 9;
        let at_mle = moment_check(&ModelSpec::edges_triangles(), &mle.theta, &t_obs, &Network::empty(n), &cfg, 1).unwrap();
        assert!(at_mle.within(3.0), "{:?}", at_mle.z);
        let at_zero = moment_check(&ModelSpec::edges_triangles(), &Theta::zeros(2), &t_obs, &Network::empty(n), &cfg, 1).unwrap();
        assert!(!at_zero.within(3.0), "{:?}", at_zero.z);
    }

    fn network_with(n: usize, t_target: [f64; 2], seed: u64) -> Network {
        // random search over small graphs for one with the wanted statistics
        let spec = ModelSpec::edges_triangles();
        let mut rng = crate::rng::stream_rng(seed, 0);
        loop {
            let p = t_target[0] / crate::graph::dyad_count(n) as f64;
            let net = crate::sampler::erdos_renyi(n, p, &mut rng).unwrap();
            if spec.stat_vector(&net).0 == t_target {
                return net;
            }
        }
    }

    fn config_for(n: usize, seed: u64) -> McmleConfig {
        let mut cfg = McmleConfig::for_nodes(n);
        cfg.sampler.sample_size = 10_000;
        cfg.sampler.proposal = Proposal::TieNoTie { tie_prob: 0.5 };
        cfg.seed = seed;
        cfg
    }

    #[test]
    fn fit_matches_exact_mle_at_seven_nodes() {
        let n = 7;
        let spec = ModelSpec::edges_triangles();
        let table = enumerate(&spec, n, 9).unwrap();
        let obs = network_with(n, [9.0, 3.0], 10);
        let exact = table.exact_mle(&[9.0, 3.0]).unwrap();
        let fit = mcmle_fit(&spec, &obs, &Theta::zeros(2), &config_for(n, 11)).unwrap();
        assert_eq!(fit.status, McmleStatus::Converged, "{:?}", fit.trace);
        assert!(fit.final_moment_z.iter().all(|z| z.abs() <= 3.0));
        assert!(fit.theta.max_abs_diff(&exact.theta) < 0.05, "{:?} vs {:?}", fit.theta, exact.theta);
    }

    #[test]
    fn fit_started_at_mle_stops_quickly_and_is_deterministic() {
        let n = 7;
        let spec = ModelSpec::edges_triangles();
        let table = enumerate(&spec, n, 9).unwrap();
        let obs = network_with(n, [9.0, 3.0], 12);
        let exact = table.exact_mle(&[9.0, 3.0]).unwrap();
        let cfg = config_for(n, 13);
        let fit = mcmle_fit(&spec, &obs, &exact.theta, &cfg).unwrap();
        assert_eq!(fit.status, McmleStatus::Converged);
        assert!(fit.outer_iterations <= 2);
        assert_eq!(fit, mcmle_fit(&spec, &obs, &exact.theta, &cfg).unwrap());
    }

    #[test]
    fn degenerate_start_is_reported_not_thrown() {
        let n = 9;
        let spec = ModelSpec::edges_triangles();
        let obs = crate::sampler::erdos_renyi(n, 0.5, &mut crate::rng::stream_rng(14, 0)).unwrap();
        let mut cfg = config_for(n, 15);
        cfg.sampler.sample_size = 500;
        let fit = mcmle_fit(&spec, &obs, &Theta(vec![-1.0, 2.0]), &cfg).unwrap();
        assert_eq!(fit.status, McmleStatus::Degenerate);
        assert_eq!(fit.outer_iterations, 1);
    }
}
