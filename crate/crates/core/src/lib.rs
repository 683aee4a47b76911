//! Estimation toolkit for exponential-family random graph models (ERGMs).
//!
//! `P_θ(A = a) ∝ exp{θᵀ T(a)}` over simple undirected networks on `n` nodes.
//!
//! * [`graph`]: bitset networks with O(1) toggles.
//! * [`stats`]: model terms, sufficient statistics, incremental change statistics.
//! * [`mple`]: maximum pseudolikelihood via Newton/IRLS logistic regression.
//! * [`sampler`]: Metropolis–Hastings network sampling and Erdős–Rényi draws.
//! * [`mcmle`]: Monte Carlo maximum likelihood with moment and degeneracy diagnostics.
//! * [`anneal`]: simulated annealing towards a target statistic vector, and the
//!   annealed-network MPLE used as an MCMLE starting value.
//! * [`exact`]: Gray-code enumeration of all networks on small `n` for exact
//!   normalizing constants, mean values and MLEs.
//! * [`io`] and [`experiments`]: edge lists, configs, reports and the
//!   experiment drivers behind the `ergm` binary.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod anneal;
pub mod exact;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod mcmle;
pub mod mple;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use anneal::{anneal, improved_start, rao_blackwell_mple, AnnealConfig, AnnealInit, AnnealResult};
pub use exact::{enumerate, EnumerationTable, ExactMleResult};
pub use graph::{dyad_count, Dyad, Network};
pub use mcmle::{mcmle_fit, McmleConfig, McmleResult, McmleStatus};
pub use mple::{mple, MpleResult, Theta};
pub use sampler::{erdos_renyi, sample, Proposal, SampleBatch, SamplerConfig};
pub use stats::{ChangeVector, ModelSpec, StatTerm, StatVector};
