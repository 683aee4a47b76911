//! Sufficient statistics and change statistics.
//!
//! A [`ModelSpec`] is an ordered list of [`StatTerm`]s. Coordinate `k` of
//! every statistic vector, change vector and parameter vector downstream
//! refers to term `k`.
//!
//! Change statistics are computed against the network with the dyad absent:
//! `Δ_ij = T(a with ij = 1) − T(a with ij = 0)`, regardless of the current
//! value at `ij`. Every term has an O(degree) (or O(n/64)) rule, so no hot
//! path ever recomputes `T` from scratch.
//!
//! # Geometrically weighted degree
//!
//! `gwdegree τ` uses the usual fixed-decay form
//!
//! ```text
//! u(a) = e^τ · Σ_{k=1}^{n-1} [1 − (1 − e^{−τ})^k] · D_k(a)
//! ```
//!
//! where `D_k(a)` is the number of nodes of degree `k`. Adding a tie to a node
//! of degree `d` raises its contribution by exactly `(1 − e^{−τ})^d`, which is
//! the incremental rule used here.

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{Dyad, Network};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("model has no terms")]
    Empty,
    #[error("line {line}: unknown term `{name}`")]
    UnknownTerm { line: usize, name: String },
    #[error("line {line}: {message}")]
    BadArgument { line: usize, message: String },
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("node covariate `{name}` has {len} values, network has {n} nodes")]
    CovariateLength { name: String, len: usize, n: usize },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A real vector in statistic (mean-value) space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StatVector(pub Vec<f64>);

/// `T(a⁺) − T(a⁻)` at one dyad.
pub type ChangeVector = StatVector;

impl StatVector {
    pub fn zeros(q: usize) -> Self {
        StatVector(vec![0.0; q])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn add_scaled(&mut self, other: &[f64], scale: f64) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a += scale * b;
        }
    }
}

impl Deref for StatVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for StatVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for StatVector {
    fn from(v: Vec<f64>) -> Self {
        StatVector(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case")]
pub enum StatTerm {
    Edges,
    Triangles,
    /// `Σ_i C(deg(i), k)`; `KStar(2)` is the two-star count.
    KStar { k: u32 },
    /// Number of nodes with degree exactly `d`.
    DegreeCount { d: u32 },
    /// Geometrically weighted degree with a fixed decay.
    GwDegree { decay: f64 },
    /// `Σ_{ties ij} (x_i + x_j)` for a node covariate `x`.
    NodeCovariateSum { name: String, values: Vec<f64> },
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

impl StatTerm {
    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            StatTerm::KStar { k } if *k < 2 => {
                Err(SpecError::InvalidTerm(format!("kstar needs k >= 2, got {k}")))
            }
            StatTerm::GwDegree { decay } if !(decay.is_finite() && *decay > 0.0) => Err(
                SpecError::InvalidTerm(format!("gwdegree decay must be positive, got {decay}")),
            ),
            StatTerm::NodeCovariateSum { name, values } if values.iter().any(|v| !v.is_finite()) => {
                Err(SpecError::InvalidTerm(format!("covariate `{name}` has non-finite values")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            StatTerm::Edges => "edges".into(),
            StatTerm::Triangles => "triangles".into(),
            StatTerm::KStar { k } => format!("kstar{k}"),
            StatTerm::DegreeCount { d } => format!("degree{d}"),
            StatTerm::GwDegree { decay } => format!("gwdegree.{decay}"),
            StatTerm::NodeCovariateSum { name, .. } => format!("nodecov.{name}"),
        }
    }

    pub fn is_integer_valued(&self) -> bool {
        !matches!(self, StatTerm::GwDegree { .. } | StatTerm::NodeCovariateSum { .. })
    }

    /// Full evaluation on `net`.
    pub fn value(&self, net: &Network) -> f64 {
        match self {
            StatTerm::Edges => net.edge_count() as f64,
            StatTerm::Triangles => {
                let twice_wedges_closed: usize = net
                    .edges()
                    .map(|d| net.common_neighbors(d.i(), d.j()))
                    .sum();
                (twice_wedges_closed / 3) as f64
            }
            StatTerm::KStar { k } => net.degrees().map(|deg| binomial(deg, *k as usize)).sum(),
            StatTerm::DegreeCount { d } => {
                net.degrees().filter(|&deg| deg == *d as usize).count() as f64
            }
            StatTerm::GwDegree { decay } => {
                let r = 1.0 - (-decay).exp();
                decay.exp() * net.degrees().map(|deg| 1.0 - r.powi(deg as i32)).sum::<f64>()
            }
            StatTerm::NodeCovariateSum { values, .. } => {
                net.edges().map(|d| values[d.i()] + values[d.j()]).sum()
            }
        }
    }

    /// Change statistic at `d`, relative to the network with `d` absent.
    #[inline]
    pub fn change(&self, net: &Network, d: Dyad) -> f64 {
        let tied = net.has_tie(d) as usize;
        match self {
            StatTerm::Edges => 1.0,
            StatTerm::Triangles => net.common_neighbors(d.i(), d.j()) as f64,
            StatTerm::KStar { k } => {
                let k = *k as usize;
                binomial(net.degree(d.i()) - tied, k - 1)
                    + binomial(net.degree(d.j()) - tied, k - 1)
            }
            StatTerm::DegreeCount { d: target } => {
                let target = *target as usize;
                let one = |deg: usize| (deg + 1 == target) as i32 - (deg == target) as i32;
                (one(net.degree(d.i()) - tied) + one(net.degree(d.j()) - tied)) as f64
            }
            StatTerm::GwDegree { decay } => {
                let r = 1.0 - (-decay).exp();
                r.powi((net.degree(d.i()) - tied) as i32) + r.powi((net.degree(d.j()) - tied) as i32)
            }
            StatTerm::NodeCovariateSum { values, .. } => values[d.i()] + values[d.j()],
        }
    }

    fn config_line(&self) -> String {
        match self {
            StatTerm::Edges => "edges".into(),
            StatTerm::Triangles => "triangles".into(),
            StatTerm::KStar { k } => format!("kstar {k}"),
            StatTerm::DegreeCount { d } => format!("degree {d}"),
            StatTerm::GwDegree { decay } => format!("gwdegree {decay}"),
            StatTerm::NodeCovariateSum { name, .. } => format!("nodecov {name}"),
        }
    }
}

/// Ordered list of model terms defining `T: networks → ℝ^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    terms: Vec<StatTerm>,
}

impl ModelSpec {
    pub fn new(terms: Vec<StatTerm>) -> Result<Self, SpecError> {
        if terms.is_empty() {
            return Err(SpecError::Empty);
        }
        for t in &terms {
            t.validate()?;
        }
        Ok(ModelSpec { terms })
    }

    /// Edges + triangles, the two-statistic model used by the small-graph
    /// experiments.
    pub fn edges_triangles() -> Self {
        ModelSpec { terms: vec![StatTerm::Edges, StatTerm::Triangles] }
    }

    pub fn terms(&self) -> &[StatTerm] {
        &self.terms
    }

    /// Dimension `q`.
    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.terms.iter().map(StatTerm::name).collect()
    }

    pub fn is_integer_valued(&self) -> bool {
        self.terms.iter().all(StatTerm::is_integer_valued)
    }

    /// Checks that node-level inputs match a network on `n` nodes.
    pub fn check_nodes(&self, n: usize) -> Result<(), SpecError> {
        for t in &self.terms {
            if let StatTerm::NodeCovariateSum { name, values } = t {
                if values.len() != n {
                    return Err(SpecError::CovariateLength { name: name.clone(), len: values.len(), n });
                }
            }
        }
        Ok(())
    }

    pub fn stat_vector(&self, net: &Network) -> StatVector {
        StatVector(self.terms.iter().map(|t| t.value(net)).collect())
    }

    pub fn change_vector(&self, net: &Network, d: Dyad) -> ChangeVector {
        let mut out = vec![0.0; self.dim()];
        self.change_into(net, d, &mut out);
        StatVector(out)
    }

    /// Allocation-free form of [`ModelSpec::change_vector`].
    #[inline]
    pub fn change_into(&self, net: &Network, d: Dyad, out: &mut [f64]) {
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = t.change(net, d);
        }
    }

    /// Signed increment of `T` produced by toggling `d`: `+Δ` when the tie is
    /// being added, `−Δ` when removed.
    pub fn toggle_delta(&self, net: &Network, d: Dyad) -> StatVector {
        let mut delta = self.change_vector(net, d);
        if net.has_tie(d) {
            delta.iter_mut().for_each(|v| *v = -*v);
        }
        delta
    }

    /// Parses one term per line. `#` starts a comment. `nodecov <file>` reads
    /// one real per line from `<file>`, resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, SpecError> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap_or_default().to_ascii_lowercase();
            let args: Vec<&str> = parts.collect();
            let bad = |message: String| SpecError::BadArgument { line: line_no, message };
            let one_arg = |what: &str| -> Result<&str, SpecError> {
                match args.as_slice() {
                    [a] => Ok(*a),
                    _ => Err(bad(format!("`{name}` takes exactly one {what}"))),
                }
            };
            let term = match name.as_str() {
                "edges" | "triangles" | "triangle" if !args.is_empty() => {
                    return Err(bad(format!("`{name}` takes no arguments")))
                }
                "edges" => StatTerm::Edges,
                "triangles" | "triangle" => StatTerm::Triangles,
                "kstar" => {
                    let k = one_arg("integer")?.parse().map_err(|e| bad(format!("kstar: {e}")))?;
                    StatTerm::KStar { k }
                }
                "degree" => {
                    let d = one_arg("integer")?.parse().map_err(|e| bad(format!("degree: {e}")))?;
                    StatTerm::DegreeCount { d }
                }
                "gwdegree" => {
                    let decay = one_arg("decay")?.parse().map_err(|e| bad(format!("gwdegree: {e}")))?;
                    StatTerm::GwDegree { decay }
                }
                "nodecov" => {
                    let file = one_arg("file")?;
                    let path = match base_dir {
                        Some(dir) => dir.join(file),
                        None => PathBuf::from(file),
                    };
                    let values = read_covariate(&path)?;
                    let name = Path::new(file)
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| file.to_string());
                    StatTerm::NodeCovariateSum { name, values }
                }
                _ => return Err(SpecError::UnknownTerm { line: line_no, name }),
            };
            term.validate().map_err(|e| bad(e.to_string()))?;
            terms.push(term);
        }
        ModelSpec::new(terms)
    }

    pub fn from_file(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SpecError::Io { path: path.to_path_buf(), source })?;
        ModelSpec::parse(&text, path.parent())
    }

    /// Stable digest of the term list, including covariate values.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for t in &self.terms {
            h.update(t.config_line().as_bytes());
            if let StatTerm::NodeCovariateSum { values, .. } = t {
                for v in values {
                    h.update(v.to_le_bytes());
                }
            }
            h.update(b"\n");
        }
        h.finalize().into()
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{}", t.config_line())?;
        }
        Ok(())
    }
}

fn read_covariate(path: &Path) -> Result<Vec<f64>, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SpecError::Io { path: path.to_path_buf(), source })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|e| SpecError::BadArgument {
                line: i + 1,
                message: format!("{}: {e}", path.display()),
            })
        })
        .collect()
}
