//! Exact ERGM computations for small node counts by full enumeration.
//!
//! [`enumerate`] visits all `2^{n(n−1)/2}` networks on `n` nodes in
//! binary-reflected Gray-code order, so consecutive networks differ by one
//! dyad and `T` is updated with one change statistic per state. The sweep is
//! split on its top dyad bits into independent sub-sweeps, each seeded by a
//! direct evaluation of `T` on its prefix network.
//!
//! The result is the multiplicity table `t ↦ #{a : T(a) = t}`, from which
//! the normalizing constant, mean-value map, log-likelihood and MLE follow
//! exactly:
//!
//! ```text
//! log k(θ) = log Σ_t m(t) e^{θᵀt}        μ(θ) = ∇ log k(θ) = E_θ[T]
//! ℓ(θ)     = θᵀ t_obs − log k(θ)          MLE solves μ(θ) = t_obs
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{dyad_count, Dyad, Network};
use crate::linalg::{solve_spd, Matrix};
use crate::mple::Theta;
use crate::stats::{ModelSpec, SpecError, StatTerm, StatVector};

/// Enumeration is refused above this many nodes regardless of the guard.
pub const HARD_MAX_NODES: usize = 11;
pub const DEFAULT_MAX_NODES: usize = 9;

const CACHE_MAGIC: &[u8; 8] = b"ERGMENUM";
const CACHE_VERSION: u32 = 1;
/// Dense accumulators are used when the integer statistic box has at most
/// this many cells.
const DENSE_LIMIT: usize = 1 << 22;
const QUANTUM: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("n = {n} exceeds the enumeration guard of {guard} nodes")]
    TooManyNodes { n: usize, guard: usize },
    #[error("target has {got} coordinates, model has {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("cache file {path}: {message}")]
    Cache { path: PathBuf, message: String },
    #[error("cache I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// Multiplicity of every attainable statistic vector over all networks on `n` nodes.
#[derive(Debug, Clone)]
pub struct EnumerationTable {
    spec: ModelSpec,
    n: usize,
    entries: Vec<(StatVector, u64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactMleResult {
    pub theta: Theta,
    pub loglik: f64,
    pub mean_value: StatVector,
    pub exists: bool,
    pub iterations: usize,
    pub max_abs_gradient: f64,
    /// Unit direction along which the likelihood keeps increasing when the
    /// target lies on or outside the boundary of the convex hull.
    pub recession_direction: Option<Vec<f64>>,
}

/// Per-term change rule on small bitmask graphs.
#[derive(Debug, Clone, Copy)]
enum MaskTerm {
    Edges,
    Triangles,
    KStar(usize),
    Degree(usize),
    GwDegree(f64),
    Covariate(usize),
}

/// Adjacency of a graph with at most 32 nodes as one mask per node.
struct MaskGraph {
    adj: [u32; 32],
}

impl MaskGraph {
    fn from_network(net: &Network) -> Self {
        let mut adj = [0u32; 32];
        for d in net.edges() {
            adj[d.i()] |= 1 << d.j();
            adj[d.j()] |= 1 << d.i();
        }
        MaskGraph { adj }
    }

    #[inline(always)]
    fn toggle(&mut self, i: usize, j: usize) -> bool {
        let tied = (self.adj[i] >> j) & 1 == 1;
        self.adj[i] ^= 1 << j;
        self.adj[j] ^= 1 << i;
        tied
    }
}

struct Kernel {
    terms: Vec<MaskTerm>,
    covariates: Vec<Vec<f64>>,
    /// binom[d][k] = C(d, k)
    binom: Vec<Vec<f64>>,
    gw_powers: Vec<Vec<f64>>,
}

impl Kernel {
    fn new(spec: &ModelSpec, n: usize) -> Self {
        let mut covariates = Vec::new();
        let mut gw_powers = Vec::new();
        let terms = spec
            .terms()
            .iter()
            .map(|t| match t {
                StatTerm::Edges => MaskTerm::Edges,
                StatTerm::Triangles => MaskTerm::Triangles,
                StatTerm::KStar { k } => MaskTerm::KStar(*k as usize),
                StatTerm::DegreeCount { d } => MaskTerm::Degree(*d as usize),
                StatTerm::GwDegree { decay } => {
                    let r = 1.0 - (-decay).exp();
                    gw_powers.push((0..=n).map(|d| r.powi(d as i32)).collect());
                    MaskTerm::GwDegree((gw_powers.len() - 1) as f64)
                }
                StatTerm::NodeCovariateSum { values, .. } => {
                    covariates.push(values.clone());
                    MaskTerm::Covariate(covariates.len() - 1)
                }
            })
            .collect();
        let binom = (0..=n)
            .map(|d| {
                let mut row = vec![0.0; n + 1];
                row[0] = 1.0;
                for k in 1..=d {
                    row[k] = row[k - 1] * (d - k + 1) as f64 / k as f64;
                }
                row.iter().map(|v| v.round()).collect()
            })
            .collect();
        Kernel { terms, covariates, binom, gw_powers }
    }

    /// Change statistic of term `t` at `(i, j)` with the tie absent.
    #[inline(always)]
    fn change(&self, t: MaskTerm, g: &MaskGraph, i: usize, j: usize) -> f64 {
        let deg = |v: usize, other: usize| (g.adj[v] & !(1u32 << other)).count_ones() as usize;
        match t {
            MaskTerm::Edges => 1.0,
            MaskTerm::Triangles => (g.adj[i] & g.adj[j]).count_ones() as f64,
            MaskTerm::KStar(k) => self.binom[deg(i, j)][k - 1] + self.binom[deg(j, i)][k - 1],
            MaskTerm::Degree(target) => {
                let one = |d: usize| (d + 1 == target) as i32 - (d == target) as i32;
                (one(deg(i, j)) + one(deg(j, i))) as f64
            }
            MaskTerm::GwDegree(slot) => {
                let p = &self.gw_powers[slot as usize];
                p[deg(i, j)] + p[deg(j, i)]
            }
            MaskTerm::Covariate(slot) => self.covariates[slot][i] + self.covariates[slot][j],
        }
    }

    /// Upper bound of an integer term over networks on `n` nodes.
    fn integer_bound(t: MaskTerm, n: usize) -> Option<usize> {
        let c = |a: usize, b: usize| -> usize {
            if b > a {
                0
            } else {
                (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
            }
        };
        match t {
            MaskTerm::Edges => Some(dyad_count(n)),
            MaskTerm::Triangles => Some(c(n, 3)),
            MaskTerm::KStar(k) => Some(n * c(n.saturating_sub(1), k)),
            MaskTerm::Degree(_) => Some(n),
            MaskTerm::GwDegree(_) | MaskTerm::Covariate(_) => None,
        }
    }
}

/// Gray-code sub-sweep bookkeeping shared by the dense and sparse paths.
struct Sweep<'a> {
    spec: &'a ModelSpec,
    n: usize,
    dyads: Vec<(usize, usize)>,
    low_bits: usize,
}

impl Sweep<'_> {
    /// Network with the high dyad bits set from `prefix` and all low bits zero.
    fn prefix_network(&self, prefix: u64) -> Network {
        let mut net = Network::empty(self.n);
        for b in 0..(self.dyads.len() - self.low_bits) {
            if (prefix >> b) & 1 == 1 {
                let (i, j) = self.dyads[self.low_bits + b];
                net.toggle(Dyad::ordered(i, j));
            }
        }
        net
    }

    fn low_states(&self) -> u64 {
        1u64 << self.low_bits
    }
}

fn dense_sweep(sweep: &Sweep, kernel: &Kernel, strides: &[usize], cells: usize, prefixes: u64) -> Vec<u64> {
    (0..prefixes)
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut counts, prefix| {
                let net = sweep.prefix_network(prefix);
                let t0 = sweep.spec.stat_vector(&net);
                let mut idx: isize = t0.iter().zip(strides).map(|(v, s)| *v as isize * *s as isize).sum();
                let mut g = MaskGraph::from_network(&net);
                counts[idx as usize] += 1;
                if matches!(kernel.terms.as_slice(), [MaskTerm::Edges, MaskTerm::Triangles]) {
                    edges_triangles_loop(sweep, &mut g, idx as usize, strides[1], &mut counts);
                    return counts;
                }
                for s in 1..sweep.low_states() {
                    let (i, j) = sweep.dyads[s.trailing_zeros() as usize];
                    let tied = g.toggle(i, j);
                    let delta: isize = kernel
                        .terms
                        .iter()
                        .zip(strides)
                        .map(|(t, st)| kernel.change(*t, &g, i, j) as isize * *st as isize)
                        .sum();
                    if tied {
                        idx -= delta;
                    } else {
                        idx += delta;
                    }
                    counts[idx as usize] += 1;
                }
                counts
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Hot loop for the edges + triangles model, which dominates exact work.
///
/// Masks have at most `HARD_MAX_NODES` bits, so a byte table replaces
/// `count_ones` (baseline x86-64 has no popcount instruction).
fn edges_triangles_loop(sweep: &Sweep, g: &mut MaskGraph, mut idx: usize, tri_stride: usize, counts: &mut [u64]) {
    let popcount: Vec<u8> = (0u32..1 << sweep.n).map(|m| m.count_ones() as u8).collect();
    let mut dyads = [(0u8, 0u8); 64];
    for (slot, (i, j)) in dyads.iter_mut().zip(&sweep.dyads) {
        *slot = (*i as u8, *j as u8);
    }
    let mut adj = [0u32; 16];
    adj[..sweep.n].copy_from_slice(&g.adj[..sweep.n]);
    let mask = (1usize << sweep.n) - 1;
    for s in 1..sweep.low_states() {
        let (i, j) = dyads[(s.trailing_zeros() & 63) as usize];
        let (i, j) = (i as usize & 15, j as usize & 15);
        let tied = (adj[i] >> j) & 1;
        adj[i] ^= 1 << j;
        adj[j] ^= 1 << i;
        let delta = 1 + tri_stride * popcount[(adj[i] & adj[j]) as usize & mask] as usize;
        if tied == 1 {
            idx -= delta;
        } else {
            idx += delta;
        }
        counts[idx] += 1;
    }
    g.adj[..sweep.n].copy_from_slice(&adj[..sweep.n]);
}

type SparseCounts = HashMap<Vec<i64>, (Vec<f64>, u64)>;

fn quantize(v: &[f64]) -> Vec<i64> {
    v.iter().map(|x| (x / QUANTUM).round() as i64).collect()
}

fn sparse_sweep(sweep: &Sweep, kernel: &Kernel, prefixes: u64) -> SparseCounts {
    let q = sweep.spec.dim();
    (0..prefixes)
        .into_par_iter()
        .fold(SparseCounts::new, |mut counts, prefix| {
            let net = sweep.prefix_network(prefix);
            let mut t = sweep.spec.stat_vector(&net).into_inner();
            let mut g = MaskGraph::from_network(&net);
            let record = |t: &[f64], counts: &mut SparseCounts| {
                counts.entry(quantize(t)).or_insert_with(|| (t.to_vec(), 0)).1 += 1;
            };
            record(&t, &mut counts);
            for s in 1..sweep.low_states() {
                let (i, j) = sweep.dyads[s.trailing_zeros() as usize];
                let tied = g.toggle(i, j);
                let sign = if tied { -1.0 } else { 1.0 };
                for k in 0..q {
                    t[k] += sign * kernel.change(kernel.terms[k], &g, i, j);
                }
                record(&t, &mut counts);
            }
            counts
        })
        .reduce(SparseCounts::new, |mut a, b| {
            for (key, (val, c)) in b {
                a.entry(key).or_insert((val, 0)).1 += c;
            }
            a
        })
}

/// Enumerates every network on `n` nodes and tabulates `T`.
pub fn enumerate(spec: &ModelSpec, n: usize, max_n_guard: usize) -> Result<EnumerationTable, ExactError> {
    let guard = max_n_guard.min(HARD_MAX_NODES);
    if n > guard {
        return Err(ExactError::TooManyNodes { n, guard });
    }
    spec.check_nodes(n)?;
    let started = Instant::now();
    let dyads: Vec<(usize, usize)> = Dyad::all(n).map(|d| (d.i(), d.j())).collect();
    let high_bits = dyads.len().min(8);
    let sweep = Sweep { spec, n, low_bits: dyads.len() - high_bits, dyads };
    let prefixes = 1u64 << high_bits;
    let kernel = Kernel::new(spec, n);

    let bounds: Option<Vec<usize>> = kernel.terms.iter().map(|t| Kernel::integer_bound(*t, n)).collect();
    let dense = bounds.and_then(|b| {
        let mut strides = Vec::with_capacity(b.len());
        let mut cells = 1usize;
        for bound in &b {
            strides.push(cells);
            cells = cells.checked_mul(bound + 1)?;
        }
        (cells <= DENSE_LIMIT).then_some((strides, b, cells))
    });

    let mut entries: Vec<(StatVector, u64)> = match dense {
        Some((strides, bounds, cells)) => {
            let counts = dense_sweep(&sweep, &kernel, &strides, cells, prefixes);
            counts
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c > 0)
                .map(|(mut idx, c)| {
                    let mut t = Vec::with_capacity(bounds.len());
                    for b in &bounds {
                        t.push((idx % (b + 1)) as f64);
                        idx /= b + 1;
                    }
                    (StatVector(t), c)
                })
                .collect()
        }
        None => sparse_sweep(&sweep, &kernel, prefixes).into_values().map(|(t, c)| (StatVector(t), c)).collect(),
    };
    entries.sort_by(|a, b| a.0 .0.partial_cmp(&b.0 .0).expect("finite statistics"));
    log::info!(
        "enumerated {} networks on {} nodes into {} statistic values in {:.1?}",
        1u128 << sweep.dyads.len(),
        n,
        entries.len(),
        started.elapsed()
    );
    Ok(EnumerationTable { spec: spec.clone(), n, entries })
}

/// Loads the table from `cache_dir` if present and matching, otherwise
/// enumerates and writes it there.
pub fn enumerate_cached(spec: &ModelSpec, n: usize, max_n_guard: usize, cache_dir: &Path) -> Result<EnumerationTable, ExactError> {
    let path = cache_dir.join(EnumerationTable::cache_file_name(spec, n));
    if path.exists() {
        match EnumerationTable::load(&path, spec) {
            Ok(table) if table.n == n => return Ok(table),
            Ok(_) | Err(ExactError::Cache { .. }) => log::warn!("ignoring stale cache {}", path.display()),
            Err(e) => return Err(e),
        }
    }
    let table = enumerate(spec, n, max_n_guard)?;
    std::fs::create_dir_all(cache_dir).map_err(|source| ExactError::Io { path: cache_dir.to_path_buf(), source })?;
    table.save(&path)?;
    Ok(table)
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl EnumerationTable {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn entries(&self) -> &[(StatVector, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u128 {
        self.entries.iter().map(|(_, c)| *c as u128).sum()
    }

    pub fn multiplicity(&self, t: &[f64]) -> u64 {
        let key = quantize(t);
        self.entries.iter().find(|(s, _)| quantize(s) == key).map_or(0, |(_, c)| *c)
    }

    fn log_weights<'a>(&'a self, theta: &'a [f64]) -> impl Iterator<Item = f64> + Clone + 'a {
        self.entries
            .iter()
            .map(move |(t, c)| (*c as f64).ln() + t.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>())
    }

    /// `log k(θ)`.
    pub fn log_normalizer(&self, theta: &[f64]) -> f64 {
        log_sum_exp(self.log_weights(theta))
    }

    /// Probability of each table entry under `θ`, in entry order.
    pub fn entry_probabilities(&self, theta: &[f64]) -> Vec<f64> {
        let log_k = self.log_normalizer(theta);
        self.log_weights(theta).map(|w| (w - log_k).exp()).collect()
    }

    /// `μ(θ) = E_θ[T]`.
    pub fn mean_value(&self, theta: &[f64]) -> StatVector {
        self.moments(theta).0
    }

    /// `(E_θ[T], Cov_θ[T])`.
    pub fn moments(&self, theta: &[f64]) -> (StatVector, Matrix) {
        let q = self.spec.dim();
        let probs = self.entry_probabilities(theta);
        let mut mean = StatVector::zeros(q);
        for ((t, _), p) in self.entries.iter().zip(&probs) {
            mean.add_scaled(t, *p);
        }
        let mut cov = Matrix::zeros(q, q);
        for ((t, _), p) in self.entries.iter().zip(&probs) {
            for a in 0..q {
                for b in 0..=a {
                    cov[(a, b)] += p * (t[a] - mean[a]) * (t[b] - mean[b]);
                }
            }
        }
        for a in 0..q {
            for b in 0..a {
                cov[(b, a)] = cov[(a, b)];
            }
        }
        (mean, cov)
    }

    /// `ℓ(θ) = θᵀ t_obs − log k(θ)`.
    pub fn loglik(&self, theta: &[f64], t_obs: &[f64]) -> f64 {
        theta.iter().zip(t_obs).map(|(a, b)| a * b).sum::<f64>() - self.log_normalizer(theta)
    }

    /// Exact MLE by Newton's method on `ℓ`, started at `θ = 0`.
    ///
    /// When `t_obs` is not interior to the convex hull of the support the
    /// iterates run off to infinity; this is reported as `exists = false`
    /// together with the (verified) direction of recession.
    pub fn exact_mle(&self, t_obs: &[f64]) -> Result<ExactMleResult, ExactError> {
        let q = self.spec.dim();
        if t_obs.len() != q {
            return Err(ExactError::Dimension { got: t_obs.len(), expected: q });
        }
        const TOL: f64 = 1e-10;
        const DIVERGED: f64 = 60.0;
        const BOUNDARY_THETA: f64 = 15.0;
        let mut theta = vec![0.0; q];
        let mut ll = self.loglik(&theta, t_obs);
        let mut iterations = 0;
        let mut last_step = vec![0.0; q];
        loop {
            let (mean, cov) = self.moments(&theta);
            let grad: Vec<f64> = t_obs.iter().zip(mean.iter()).map(|(t, m)| t - m).collect();
            let max_abs_gradient = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            let diverged = theta.iter().any(|v| v.abs() > DIVERGED);
            let step = if diverged { None } else { solve_spd(&cov, &grad) };
            if max_abs_gradient <= TOL && !diverged {
                // a vanishing gradient far out along a recession direction
                // means the target sits on a face of the hull
                let boundary = if theta.iter().any(|v| v.abs() > BOUNDARY_THETA) {
                    self.recession_from(&[&last_step, &theta], t_obs)
                } else {
                    None
                };
                return Ok(ExactMleResult {
                    theta: Theta(theta),
                    loglik: ll,
                    mean_value: mean,
                    exists: boundary.is_none(),
                    iterations,
                    max_abs_gradient,
                    recession_direction: boundary,
                });
            }
            let accepted = step.and_then(|step| {
                let mut scale = 1.0;
                for _ in 0..60 {
                    let cand: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + scale * s).collect();
                    let cand_ll = self.loglik(&cand, t_obs);
                    if cand_ll >= ll - 1e-13 * ll.abs().max(1.0) {
                        return Some((cand, cand_ll));
                    }
                    scale *= 0.5;
                }
                None
            });
            iterations += 1;
            match accepted {
                Some((next, next_ll)) if iterations < 500 => {
                    last_step = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
                    theta = next;
                    ll = next_ll;
                }
                _ => {
                    let direction = self.recession_from(&[&last_step, &theta], t_obs);
                    if direction.is_none() && max_abs_gradient <= 1e-7 {
                        // Newton stalled on rounding just above tolerance; accept.
                        return Ok(ExactMleResult {
                            theta: Theta(theta),
                            loglik: ll,
                            mean_value: mean,
                            exists: true,
                            iterations,
                            max_abs_gradient,
                            recession_direction: None,
                        });
                    }
                    return Ok(ExactMleResult {
                        theta: Theta(theta),
                        loglik: ll,
                        mean_value: mean,
                        exists: false,
                        iterations,
                        max_abs_gradient,
                        recession_direction: direction,
                    });
                }
            }
        }
    }

    /// First verified recession direction among the normalized candidates.
    ///
    /// Late Newton steps isolate the diverging part of `θ`; components that
    /// are tiny relative to the largest one are also tried snapped to zero.
    fn recession_from(&self, candidates: &[&[f64]], t_obs: &[f64]) -> Option<Vec<f64>> {
        let normalize = |v: &[f64]| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (norm > 0.0).then(|| v.iter().map(|x| x / norm).collect::<Vec<f64>>())
        };
        for c in candidates {
            let Some(d) = normalize(c) else { continue };
            let snapped: Vec<f64> = d.iter().map(|x| if x.abs() < 1e-2 { 0.0 } else { *x }).collect();
            for cand in [Some(d), normalize(&snapped)].into_iter().flatten() {
                if self.is_recession_direction(&cand, t_obs) {
                    return Some(cand);
                }
            }
        }
        None
    }

    /// `dᵀ(t − t_obs) ≤ 0` (up to rounding) for every support point `t`.
    pub fn is_recession_direction(&self, d: &[f64], t_obs: &[f64]) -> bool {
        let scale = t_obs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        self.entries.iter().all(|(t, _)| {
            t.iter().zip(t_obs).zip(d).map(|((a, b), c)| (a - b) * c).sum::<f64>() <= 1e-6 * scale
        })
    }

    pub fn cache_file_name(spec: &ModelSpec, n: usize) -> String {
        let fp: String = spec.fingerprint()[..8].iter().map(|b| format!("{b:02x}")).collect();
        format!("enum-n{n}-{fp}.bin")
    }

    /// Writes the versioned binary cache: magic, version, spec fingerprint,
    /// `n`, `q`, entry count, then fixed-width entries of `q` little-endian
    /// `f64` values followed by a `u64` multiplicity.
    pub fn save(&self, path: &Path) -> Result<(), ExactError> {
        let io = |source| ExactError::Io { path: path.to_path_buf(), source };
        let tmp = path.with_extension("tmp");
        let mut w = BufWriter::new(File::create(&tmp).map_err(io)?);
        let mut write = |bytes: &[u8]| w.write_all(bytes).map_err(io);
        write(CACHE_MAGIC)?;
        write(&CACHE_VERSION.to_le_bytes())?;
        write(&self.spec.fingerprint())?;
        write(&(self.n as u32).to_le_bytes())?;
        write(&(self.spec.dim() as u32).to_le_bytes())?;
        write(&(self.entries.len() as u64).to_le_bytes())?;
        for (t, c) in &self.entries {
            for v in t.iter() {
                write(&v.to_le_bytes())?;
            }
            write(&c.to_le_bytes())?;
        }
        w.flush().map_err(io)?;
        drop(w);
        std::fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path, spec: &ModelSpec) -> Result<Self, ExactError> {
        let io = |source| ExactError::Io { path: path.to_path_buf(), source };
        let bad = |message: &str| ExactError::Cache { path: path.to_path_buf(), message: message.into() };
        let mut r = BufReader::new(File::open(path).map_err(io)?);
        let mut buf8 = [0u8; 8];
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf8).map_err(io)?;
        if &buf8 != CACHE_MAGIC {
            return Err(bad("not an enumeration cache"));
        }
        r.read_exact(&mut buf4).map_err(io)?;
        if u32::from_le_bytes(buf4) != CACHE_VERSION {
            return Err(bad("unsupported cache version"));
        }
        let mut fp = [0u8; 32];
        r.read_exact(&mut fp).map_err(io)?;
        if fp != spec.fingerprint() {
            return Err(bad("model fingerprint mismatch"));
        }
        r.read_exact(&mut buf4).map_err(io)?;
        let n = u32::from_le_bytes(buf4) as usize;
        r.read_exact(&mut buf4).map_err(io)?;
        let q = u32::from_le_bytes(buf4) as usize;
        if q != spec.dim() {
            return Err(bad("dimension mismatch"));
        }
        r.read_exact(&mut buf8).map_err(io)?;
        let count = u64::from_le_bytes(buf8) as usize;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let mut t = Vec::with_capacity(q);
            for _ in 0..q {
                r.read_exact(&mut buf8).map_err(io)?;
                t.push(f64::from_le_bytes(buf8));
            }
            r.read_exact(&mut buf8).map_err(io)?;
            entries.push((StatVector(t), u64::from_le_bytes(buf8)));
        }
        let table = EnumerationTable { spec: spec.clone(), n, entries };
        if table.total() != 1u128 << dyad_count(n) {
            return Err(bad("multiplicities do not sum to the number of networks"));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mple::logit;

    fn edges_only() -> ModelSpec {
        ModelSpec::new(vec![StatTerm::Edges]).unwrap()
    }

    /// Independent oracle: decode every integer in `0..2^D` as a network and
    /// evaluate `T` from scratch.
    fn naive_table(spec: &ModelSpec, n: usize) -> HashMap<Vec<i64>, u64> {
        let dyads: Vec<Dyad> = Dyad::all(n).collect();
        let mut out = HashMap::new();
        for code in 0u64..(1 << dyads.len()) {
            let mut net = Network::empty(n);
            for (b, d) in dyads.iter().enumerate() {
                if (code >> b) & 1 == 1 {
                    net.toggle(*d);
                }
            }
            *out.entry(quantize(&spec.stat_vector(&net))).or_insert(0) += 1;
        }
        out
    }

    fn as_map(table: &EnumerationTable) -> HashMap<Vec<i64>, u64> {
        table.entries().iter().map(|(t, c)| (quantize(t), *c)).collect()
    }

    #[test]
    fn three_nodes() {
        let t = enumerate(&edges_only(), 3, 9).unwrap();
        let got: Vec<(f64, u64)> = t.entries().iter().map(|(s, c)| (s[0], *c)).collect();
        assert_eq!(got, vec![(0.0, 1), (1.0, 3), (2.0, 3), (3.0, 1)]);

        let t = enumerate(&ModelSpec::edges_triangles(), 3, 9).unwrap();
        let got: Vec<(Vec<f64>, u64)> = t.entries().iter().map(|(s, c)| (s.0.clone(), *c)).collect();
        assert_eq!(
            got,
            vec![(vec![0.0, 0.0], 1), (vec![1.0, 0.0], 3), (vec![2.0, 0.0], 3), (vec![3.0, 1.0], 1)]
        );
    }

    #[test]
    fn gray_sweep_matches_naive_up_to_five_nodes() {
        let specs = [
            ModelSpec::edges_triangles(),
            ModelSpec::new(vec![
                StatTerm::Edges,
                StatTerm::KStar { k: 2 },
                StatTerm::DegreeCount { d: 1 },
                StatTerm::Triangles,
            ])
            .unwrap(),
            ModelSpec::new(vec![StatTerm::Edges, StatTerm::GwDegree { decay: 0.25 }]).unwrap(),
            ModelSpec::new(vec![
                StatTerm::Triangles,
                StatTerm::NodeCovariateSum { name: "x".into(), values: vec![0.5, -1.0, 2.0, 0.25, 1.5] },
            ])
            .unwrap(),
        ];
        for spec in &specs {
            for n in 2..=5 {
                if spec.check_nodes(n).is_err() {
                    continue;
                }
                let table = enumerate(spec, n, 9).unwrap();
                assert_eq!(table.total(), 1u128 << dyad_count(n));
                assert!(table.entries().iter().all(|(_, c)| *c >= 1));
                assert_eq!(as_map(&table), naive_table(spec, n), "{spec} n={n}");
            }
        }
    }

    #[test]
    fn guard_is_enforced() {
        assert!(matches!(
            enumerate(&edges_only(), 10, 9),
            Err(ExactError::TooManyNodes { n: 10, guard: 9 })
        ));
        assert!(matches!(enumerate(&edges_only(), 12, 99), Err(ExactError::TooManyNodes { .. })));
    }

    #[test]
    fn normalizer_closed_forms() {
        let t = enumerate(&edges_only(), 3, 9).unwrap();
        assert!((t.log_normalizer(&[0.0]) - 8f64.ln()).abs() < 1e-12);
        for beta in [-2.0f64, -0.3, 0.7] {
            let expected = 3.0 * (1.0 + beta.exp()).ln();
            assert!((t.log_normalizer(&[beta]) - expected).abs() < 1e-12);
        }
        let t6 = enumerate(&ModelSpec::edges_triangles(), 6, 9).unwrap();
        assert!((t6.loglik(&[0.0, 0.0], &[4.0, 1.0]) + 15.0 * 2f64.ln()).abs() < 1e-10);
        assert!((t6.mean_value(&[0.0, 0.0])[0] - 7.5).abs() < 1e-12);
    }

    #[test]
    fn mean_value_is_gradient_of_log_normalizer() {
        let t = enumerate(&ModelSpec::edges_triangles(), 6, 9).unwrap();
        let h = 1e-5;
        for theta in [[-1.0, 0.53], [0.2, -0.4], [-2.0, 1.0], [0.0, 0.0], [-0.5, 0.1]] {
            let mu = t.mean_value(&theta);
            for k in 0..2 {
                let mut up = theta;
                let mut down = theta;
                up[k] += h;
                down[k] -= h;
                let fd = (t.log_normalizer(&up) - t.log_normalizer(&down)) / (2.0 * h);
                assert!((fd - mu[k]).abs() <= 1e-6 * mu[k].abs().max(1.0), "{theta:?} {k}: {fd} vs {}", mu[k]);
            }
        }
    }

    #[test]
    fn edges_only_mle_is_logit() {
        let t = enumerate(&edges_only(), 6, 9).unwrap();
        let fit = t.exact_mle(&[4.0]).unwrap();
        assert!(fit.exists);
        assert!((fit.theta[0] - logit(4.0 / 15.0)).abs() < 1e-9);
    }

    #[test]
    fn mle_round_trips_through_mean_value() {
        let t = enumerate(&ModelSpec::edges_triangles(), 6, 9).unwrap();
        for target in [[7.0, 2.0], [5.0, 1.0], [9.0, 5.0]] {
            let fit = t.exact_mle(&target).unwrap();
            assert!(fit.exists, "{target:?}");
            assert!(fit.max_abs_gradient <= 1e-10);
            let mu = t.mean_value(&fit.theta);
            assert!((mu[0] - target[0]).abs() < 1e-8 && (mu[1] - target[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn maximizer_beats_nearby_points() {
        let t = enumerate(&ModelSpec::edges_triangles(), 6, 9).unwrap();
        let target = [7.0, 2.0];
        let fit = t.exact_mle(&target).unwrap();
        let mut rng = crate::rng::stream_rng(4, 0);
        use rand::Rng;
        for _ in 0..1000 {
            let th = [fit.theta[0] + rng.random_range(-2.0..2.0), fit.theta[1] + rng.random_range(-2.0..2.0)];
            assert!(t.loglik(&th, &target) <= fit.loglik + 1e-12);
        }
    }

    #[test]
    fn empty_target_has_no_mle() {
        let t = enumerate(&ModelSpec::edges_triangles(), 5, 9).unwrap();
        let fit = t.exact_mle(&[0.0, 0.0]).unwrap();
        assert!(!fit.exists);
        let d = fit.recession_direction.unwrap();
        assert!(d[0] < -0.5, "{d:?}");
        assert!(t.is_recession_direction(&d, &[0.0, 0.0]));
        // a triangle-free target with edges is also on the boundary: θ_tri → −∞
        let fit = t.exact_mle(&[4.0, 0.0]).unwrap();
        assert!(!fit.exists);
        assert!(fit.recession_direction.unwrap()[1] < -0.5);
    }

    #[test]
    fn cache_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ModelSpec::edges_triangles();
        let table = enumerate_cached(&spec, 5, 9, dir.path()).unwrap();
        let path = dir.path().join(EnumerationTable::cache_file_name(&spec, 5));
        assert!(path.exists());
        let loaded = EnumerationTable::load(&path, &spec).unwrap();
        assert_eq!(loaded.entries(), table.entries());
        assert!(matches!(EnumerationTable::load(&path, &edges_only()), Err(ExactError::Cache { .. })));
        let again = enumerate_cached(&spec, 5, 9, dir.path()).unwrap();
        assert_eq!(again.entries(), table.entries());
        // truncated files are rejected, then rebuilt by the cached entry point
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(EnumerationTable::load(&path, &spec).is_err());
    }
}
