//! Maximum pseudolikelihood estimation.
//!
//! Each dyad contributes one logistic-regression row: the observed tie
//! indicator as response and the dyad's change statistics as covariates,
//! with the rest of the network held at its observed values. The MPLE is the
//! maximizer of the resulting (misspecified) logistic likelihood.
//!
//! Identical covariate rows are pooled into weighted rows before fitting.
//! Sparse networks have few distinct change vectors, so a 418-node network
//! collapses from ~87k dyads to a few hundred rows.
//!
//! The reported covariance is the inverse pseudo-information. It is **not** a
//! valid sampling covariance for the MLE; downstream code only uses `theta`.

use std::collections::HashMap;
use std::ops::{Deref, DerefMut};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Dyad, Network};
use crate::linalg::{inverse_spd, is_positive_definite, solve_spd, Matrix};
use crate::stats::{ChangeVector, ModelSpec, SpecError};

/// A point in natural parameter space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Theta(pub Vec<f64>);

impl Theta {
    pub fn zeros(q: usize) -> Self {
        Theta(vec![0.0; q])
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for Theta {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Theta {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Theta {
    fn from(v: Vec<f64>) -> Self {
        Theta(v)
    }
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[derive(Debug, Error)]
pub enum MpleError {
    #[error("separation detected after {iterations} iterations: {reason}")]
    SeparationDetected { iterations: usize, reason: String },
    #[error("pseudo-information matrix is singular (collinear or constant statistics)")]
    SingularInformation,
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MpleOptions {
    /// Convergence threshold on the score sup-norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Separation is declared once `‖θ‖∞` exceeds this bound.
    pub separation_bound: f64,
    pub max_halvings: usize,
}

impl Default for MpleOptions {
    fn default() -> Self {
        MpleOptions { tolerance: 1e-8, max_iterations: 200, separation_bound: 50.0, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpleResult {
    pub theta: Theta,
    /// Inverse pseudo-information, row-major `q × q`.
    pub covariance: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub max_abs_score: f64,
    pub log_pseudolikelihood: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignRow {
    pub response: bool,
    pub covariates: ChangeVector,
}

/// One row per dyad `i < j`, in linear-index order.
pub fn design_rows<'a>(spec: &'a ModelSpec, net: &'a Network) -> impl Iterator<Item = DesignRow> + 'a {
    Dyad::all(net.node_count()).map(move |d| DesignRow {
        response: net.has_tie(d),
        covariates: spec.change_vector(net, d),
    })
}

/// Distinct covariate rows with tie / non-tie counts.
#[derive(Debug, Clone)]
struct PooledDesign {
    q: usize,
    x: Vec<f64>,
    ones: Vec<f64>,
    zeros: Vec<f64>,
}

impl PooledDesign {
    fn build(spec: &ModelSpec, net: &Network) -> Self {
        let q = spec.dim();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut design = PooledDesign { q, x: Vec::new(), ones: Vec::new(), zeros: Vec::new() };
        let mut buf = vec![0.0; q];
        for d in Dyad::all(net.node_count()) {
            spec.change_into(net, d, &mut buf);
            let key: Vec<u64> = buf.iter().map(|v| v.to_bits()).collect();
            let row = *index.entry(key).or_insert_with(|| {
                design.x.extend_from_slice(&buf);
                design.ones.push(0.0);
                design.zeros.push(0.0);
                design.ones.len() - 1
            });
            if net.has_tie(d) {
                design.ones[row] += 1.0;
            } else {
                design.zeros[row] += 1.0;
            }
        }
        design
    }

    fn rows(&self) -> usize {
        self.ones.len()
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.x[r * self.q..(r + 1) * self.q]
    }

    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        (0..self.rows())
            .map(|r| {
                let eta: f64 = self.row(r).iter().zip(theta).map(|(a, b)| a * b).sum();
                self.ones[r] * eta - (self.ones[r] + self.zeros[r]) * softplus(eta)
            })
            .sum()
    }

    /// Detects a fit that only converged because `θ` ran off along a
    /// separating direction: some linear predictor is large, and pushing
    /// `θ` twice as far does not lower the pseudolikelihood. At a genuine
    /// interior optimum, doubling a non-trivial `θ` strictly lowers it.
    fn separated_at(&self, theta: &[f64], ll: f64) -> Option<f64> {
        let max_eta = (0..self.rows())
            .map(|r| self.row(r).iter().zip(theta).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if max_eta <= LARGE_ETA {
            return None;
        }
        let doubled: Vec<f64> = theta.iter().map(|t| 2.0 * t).collect();
        let slack = 1e-9 * ll.abs().max(1.0);
        (self.log_likelihood(&doubled) >= ll - slack).then_some(max_eta)
    }

    /// Score and information (negative Hessian) at `theta`.
    fn derivatives(&self, theta: &[f64]) -> (Vec<f64>, Matrix) {
        let q = self.q;
        let mut score = vec![0.0; q];
        let mut info = Matrix::zeros(q, q);
        for r in 0..self.rows() {
            let x = self.row(r);
            let eta: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            let p = logistic(eta);
            let total = self.ones[r] + self.zeros[r];
            let resid = self.ones[r] - total * p;
            let w = total * p * (1.0 - p);
            for a in 0..q {
                score[a] += resid * x[a];
                for b in 0..=a {
                    info[(a, b)] += w * x[a] * x[b];
                }
            }
        }
        for a in 0..q {
            for b in 0..a {
                info[(b, a)] = info[(a, b)];
            }
        }
        (score, info)
    }
}

const LARGE_ETA: f64 = 10.0;

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn mple(spec: &ModelSpec, net: &Network) -> Result<MpleResult, MpleError> {
    mple_with(spec, net, &MpleOptions::default())
}

/// Damped Newton (IRLS) from `θ = 0` with step halving.
pub fn mple_with(spec: &ModelSpec, net: &Network, opts: &MpleOptions) -> Result<MpleResult, MpleError> {
    spec.check_nodes(net.node_count())?;
    let design = PooledDesign::build(spec, net);
    let q = spec.dim();
    let ties: f64 = design.ones.iter().sum();
    let non_ties: f64 = design.zeros.iter().sum();
    if ties == 0.0 || non_ties == 0.0 {
        return Err(MpleError::SeparationDetected {
            iterations: 0,
            reason: "all responses are identical".into(),
        });
    }

    let mut theta = vec![0.0; q];
    let mut ll = design.log_likelihood(&theta);
    let (_, info0) = design.derivatives(&theta);
    if !is_positive_definite(&info0, 1e-12) {
        return Err(MpleError::SingularInformation);
    }

    for iteration in 0..=opts.max_iterations {
        let (score, info) = design.derivatives(&theta);
        let max_abs_score = sup_norm(&score);
        let finish = |converged: bool, theta: Vec<f64>| {
            let covariance = inverse_spd(&info)
                .map(|m| m.row_iter().map(|r| r.iter().cloned().collect()).collect())
                .unwrap_or_else(|| vec![vec![f64::NAN; q]; q]);
            MpleResult {
                theta: Theta(theta),
                covariance,
                converged,
                iterations: iteration,
                max_abs_score,
                log_pseudolikelihood: ll,
            }
        };
        if max_abs_score <= opts.tolerance {
            if let Some(eta) = design.separated_at(&theta, ll) {
                return Err(MpleError::SeparationDetected {
                    iterations: iteration,
                    reason: format!("likelihood still increasing along θ (max |η| = {eta:.1})"),
                });
            }
            return Ok(finish(true, theta));
        }
        if iteration == opts.max_iterations {
            return Ok(finish(false, theta));
        }
        let Some(step) = solve_spd(&info, &score) else {
            return Err(MpleError::SeparationDetected {
                iterations: iteration,
                reason: "information matrix vanished while θ diverged".into(),
            });
        };

        let slack = 1e-12 * ll.abs().max(1.0);
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let candidate: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + scale * s).collect();
            let cand_ll = design.log_likelihood(&candidate);
            if cand_ll.is_finite() && cand_ll >= ll - slack {
                accepted = Some((candidate, cand_ll));
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some((next, next_ll)) => {
                theta = next;
                ll = next_ll;
            }
            None if max_abs_score <= 1e-6 => return Ok(finish(false, theta)),
            None => {
                return Err(MpleError::SeparationDetected {
                    iterations: iteration,
                    reason: format!("step halving failed {} times", opts.max_halvings),
                })
            }
        }
        if sup_norm(&theta) > opts.separation_bound {
            return Err(MpleError::SeparationDetected {
                iterations: iteration + 1,
                reason: format!("|θ|∞ exceeded {}", opts.separation_bound),
            });
        }
    }
    unreachable!("loop returns at max_iterations")
}

/// MPLE of every network; failures are kept per item.
pub fn mple_cloud(spec: &ModelSpec, nets: &[Network]) -> Vec<Result<MpleResult, MpleError>> {
    nets.par_iter().map(|net| mple(spec, net)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dyad_count;
    use crate::stats::StatTerm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn edges_only() -> ModelSpec {
        ModelSpec::new(vec![StatTerm::Edges]).unwrap()
    }

    fn random_net(n: usize, p: f64, seed: u64) -> Network {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Network::empty(n);
        for d in Dyad::all(n) {
            if rng.random_bool(p) {
                net.toggle(d);
            }
        }
        net
    }

    #[test]
    fn design_rows_small_cases() {
        let rows: Vec<_> = design_rows(&edges_only(), &Network::empty(3)).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| !r.response && r.covariates.0 == vec![1.0]));

        let spec = ModelSpec::edges_triangles();
        let rows: Vec<_> = design_rows(&spec, &Network::complete(3)).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.response && r.covariates.0 == vec![1.0, 1.0]));

        let net = random_net(11, 0.3, 2);
        assert_eq!(design_rows(&spec, &net).count(), dyad_count(11));
    }

    #[test]
    fn edges_only_is_logit_density() {
        // 7 ties among 28 dyads: density 0.25
        let net = Network::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]).unwrap();
        let fit = mple(&edges_only(), &net).unwrap();
        assert!(fit.converged);
        assert!((fit.theta[0] - (1.0f64 / 3.0).ln()).abs() < 1e-10);
        assert!((fit.theta[0] + 1.098_612_288_668_11).abs() < 1e-10);
        for seed in 0..5 {
            let net = random_net(12, 0.2 + 0.1 * seed as f64, seed);
            let fit = mple(&edges_only(), &net).unwrap();
            assert!((fit.theta[0] - logit(net.density().unwrap())).abs() < 1e-10);
            assert!(fit.max_abs_score <= 1e-8);
        }
    }

    #[test]
    fn empty_network_separates() {
        assert!(matches!(
            mple(&edges_only(), &Network::empty(5)),
            Err(MpleError::SeparationDetected { .. })
        ));
    }

    #[test]
    fn collinear_terms_are_singular() {
        let spec = ModelSpec::new(vec![StatTerm::Edges, StatTerm::Edges]).unwrap();
        assert!(matches!(mple(&spec, &random_net(8, 0.4, 1)), Err(MpleError::SingularInformation)));
    }

    #[test]
    fn perfectly_predicted_triangles_separate() {
        // disjoint triangles: every tie closes a triangle, no non-tie does
        let net = Network::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(matches!(
            mple(&ModelSpec::edges_triangles(), &net),
            Err(MpleError::SeparationDetected { .. })
        ));
    }

    #[test]
    fn score_vanishes_and_covariance_is_symmetric() {
        let spec = ModelSpec::new(vec![StatTerm::Edges, StatTerm::Triangles, StatTerm::KStar { k: 2 }]).unwrap();
        let net = random_net(15, 0.3, 9);
        let fit = mple(&spec, &net).unwrap();
        assert!(fit.converged);
        // recompute the score directly from unpooled rows
        let mut score = vec![0.0; 3];
        for row in design_rows(&spec, &net) {
            let p = logistic(fit.theta.dot(&row.covariates));
            for k in 0..3 {
                score[k] += (row.response as u8 as f64 - p) * row.covariates[k];
            }
        }
        assert!(sup_norm(&score) < 1e-7, "{score:?}");
        for a in 0..3 {
            assert!(fit.covariance[a][a] > 0.0);
            for b in 0..3 {
                assert!((fit.covariance[a][b] - fit.covariance[b][a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn relabeling_invariance() {
        let spec = ModelSpec::new(vec![StatTerm::Edges, StatTerm::Triangles, StatTerm::GwDegree { decay: 0.25 }]).unwrap();
        let net = random_net(14, 0.35, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut perm: Vec<usize> = (0..14).collect();
        for i in (1..14).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let a = mple(&spec, &net).unwrap();
        let b = mple(&spec, &net.permuted(&perm).unwrap()).unwrap();
        assert!(a.theta.max_abs_diff(&b.theta) < 1e-8);
        let cloud = mple_cloud(&spec, &[net.clone(), net.permuted(&perm).unwrap()]);
        assert!(cloud[0].as_ref().unwrap().theta.max_abs_diff(&cloud[1].as_ref().unwrap().theta) < 1e-8);
    }
}
