#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use ergm_core::{Dyad, Network};

/// Dyads in the order used for bitmask indexing.
pub fn dyads(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// `(edges, triangles)` of the network encoded by `mask`, by brute force.
pub fn naive_stats(n: usize, mask: u64, pairs: &[(usize, usize)]) -> (u32, u32) {
    let mut adj = [[false; 16]; 16];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if mask >> k & 1 == 1 {
            adj[i][j] = true;
            adj[j][i] = true;
        }
    }
    let mut tri = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if adj[i][j] && adj[j][k] && adj[i][k] {
                    tri += 1;
                }
            }
        }
    }
    (mask.count_ones(), tri)
}

/// Multiplicity of every `(edges, triangles)` value on `n` nodes.
pub fn naive_table(n: usize) -> BTreeMap<(u32, u32), u64> {
    let pairs = dyads(n);
    let mut table = BTreeMap::new();
    for mask in 0..1u64 << pairs.len() {
        *table.entry(naive_stats(n, mask, &pairs)).or_insert(0) += 1;
    }
    table
}

/// `log Σ_T c(T) exp(θ·T)`.
pub fn naive_log_normalizer(table: &BTreeMap<(u32, u32), u64>, theta: &[f64]) -> f64 {
    let terms: Vec<f64> =
        table.iter().map(|(&(e, t), &c)| (c as f64).ln() + theta[0] * e as f64 + theta[1] * t as f64).collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn mask_of(net: &Network) -> u64 {
    let n = net.node_count();
    dyads(n)
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| net.has_tie(Dyad::new(i, j, n).unwrap()))
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// Where the enumeration tables are cached between runs.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("ERGM_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("ergm-enumeration"))
}
