//! Edge lists, run configuration, and report/CSV emitters.
//!
//! Edge-list format: an optional `n <count>` header, then one tie per line as
//! two whitespace- or comma-separated node tokens (extra columns ignored).
//! `#` starts a comment. With a header, tokens are 0-based indices below
//! `count`. Without one, tokens are labels numbered in order of first
//! appearance.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::anneal::AnnealConfig;
use crate::graph::{Dyad, Network};
use crate::mcmle::McmleConfig;
use crate::mple::Theta;
use crate::sampler::SamplerConfig;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}:{line}: node {node} out of range for {n} nodes")]
    NodeOutOfRange { path: PathBuf, line: usize, node: usize, n: usize },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("bad parameter vector `{0}`")]
    Theta(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preprocessing {
    /// Input is already a simple undirected graph; self-loops are errors.
    #[default]
    AsIs,
    /// Directed input is symmetrized and self-edges dropped.
    UndirectedNoLoops,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadReport {
    pub nodes: usize,
    pub edges: usize,
    pub lines_read: usize,
    pub self_loops_dropped: usize,
    /// Repeated (same-direction, or any repeat under `AsIs`) pairs.
    pub duplicates_merged: usize,
    /// `v u` lines merged into an earlier `u v` under `UndirectedNoLoops`.
    pub reciprocal_merged: usize,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct LoadedNetwork {
    pub network: Network,
    /// Node labels by index when the file used labels rather than a header.
    pub labels: Option<Vec<String>>,
    pub report: LoadReport,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_digest(path: &Path) -> Result<String, IoError> {
    let mut bytes = Vec::new();
    File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(io_err(path))?;
    Ok(sha256_hex(&bytes))
}

pub fn load_network(path: &Path, preprocessing: Preprocessing) -> Result<LoadedNetwork, IoError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_edge_list(&text, path, preprocessing)
}

pub fn parse_edge_list(text: &str, path: &Path, preprocessing: Preprocessing) -> Result<LoadedNetwork, IoError> {
    let parse_err = |line: usize, message: String| IoError::Parse { path: path.to_path_buf(), line, message };
    let mut header: Option<usize> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut label_index: HashMap<String, usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    let mut report = LoadReport { sha256: sha256_hex(text.as_bytes()), ..LoadReport::default() };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        report.lines_read += 1;
        let tokens: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        if tokens[0].eq_ignore_ascii_case("n") && pairs.is_empty() && header.is_none() && labels.is_empty() {
            let count = match tokens.as_slice() {
                [_, c] => c.parse().map_err(|e| parse_err(line_no, format!("bad node count: {e}")))?,
                _ => return Err(parse_err(line_no, "header must be `n <count>`".into())),
            };
            header = Some(count);
            continue;
        }
        if tokens.len() < 2 {
            return Err(parse_err(line_no, "expected two node tokens".into()));
        }
        let mut node = |tok: &str| -> Result<usize, IoError> {
            match header {
                Some(n) => {
                    let v: usize = tok.parse().map_err(|e| parse_err(line_no, format!("bad node index `{tok}`: {e}")))?;
                    if v >= n {
                        return Err(IoError::NodeOutOfRange { path: path.to_path_buf(), line: line_no, node: v, n });
                    }
                    Ok(v)
                }
                None => Ok(*label_index.entry(tok.to_string()).or_insert_with(|| {
                    labels.push(tok.to_string());
                    labels.len() - 1
                })),
            }
        };
        let a = node(tokens[0])?;
        let b = node(tokens[1])?;
        pairs.push((a, b, line_no));
    }

    let n = header.unwrap_or(labels.len());
    let mut net = Network::empty(n);
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for (a, b, line_no) in pairs {
        if a == b {
            match preprocessing {
                Preprocessing::AsIs => return Err(parse_err(line_no, format!("self-loop on node {a}"))),
                Preprocessing::UndirectedNoLoops => {
                    report.self_loops_dropped += 1;
                    continue;
                }
            }
        }
        if !seen.insert((a, b)) {
            report.duplicates_merged += 1;
            continue;
        }
        let d = Dyad::ordered(a, b);
        if net.has_tie(d) {
            match preprocessing {
                Preprocessing::AsIs => report.duplicates_merged += 1,
                Preprocessing::UndirectedNoLoops => report.reciprocal_merged += 1,
            }
            continue;
        }
        net.toggle(d);
    }
    report.nodes = n;
    report.edges = net.edge_count();
    Ok(LoadedNetwork { network: net, labels: header.is_none().then_some(labels), report })
}

/// Writes `n <count>` then one `i j` line per tie (0-based, `i < j`).
pub fn write_edge_list(net: &Network, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "n {}", net.node_count())?;
    for d in net.edges() {
        writeln!(out, "{} {}", d.i(), d.j())?;
    }
    Ok(())
}

pub fn save_network(net: &Network, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = std::io::BufWriter::new(file);
    write_edge_list(net, &mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Parses `"-0.6, 0.3"` (commas and/or whitespace) into a parameter vector.
pub fn parse_theta(text: &str) -> Result<Theta, IoError> {
    let values: Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse::<f64>)
        .collect();
    match values {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(Theta(v)),
        _ => Err(IoError::Theta(text.to_string())),
    }
}

/// Optional per-module settings read from a TOML file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub sampler: Option<SamplerConfig>,
    pub mcmle: Option<McmleConfig>,
    pub anneal: Option<AnnealConfig>,
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::Config { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text, path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Self-describing JSON record of one invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub results: serde_json::Value,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl ExperimentReport {
    pub fn new(command: &str, seed: u64) -> Self {
        ExperimentReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            results: serde_json::Value::Null,
            timings: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), IoError> {
        let sha256 = file_digest(path)?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256 });
        Ok(())
    }

    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let started = std::time::Instant::now();
        let out = f();
        *self.timings.entry(phase.to_string()).or_default() += started.elapsed().as_secs_f64();
        out
    }

    pub fn write_json(&self, out: impl Write) -> Result<(), IoError> {
        let mut out = out;
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out).map_err(io_err(Path::new("<output>")))
    }
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), IoError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(io_err(Path::new("<output>")))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Opens `path` for writing, or stdout when `None`.
pub fn output_sink(path: Option<&Path>) -> Result<Box<dyn Write>, IoError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}
