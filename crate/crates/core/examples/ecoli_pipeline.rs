//! Degree-based model for a sparse regulatory network: MPLE clouds from
//! observed and Erdős–Rényi annealing starts, then MCMLE from both.
//!
//! With no argument a synthetic sparse network stands in for the data.
//!
//! ```text
//! cargo run --release --example ecoli_pipeline -- path/to/edges.txt
//! ```

use ergm_core::anneal::budget_steps_per_temperature;
use ergm_core::experiments::{ecoli_clusters, ecoli_model, load_ecoli, EcoliConfig};
use ergm_core::rng::stream_rng;
use ergm_core::{Network, SamplerConfig};
use rand::Rng;

/// Preferential attachment with one to three links per new node.
fn synthetic(n: usize, seed: u64) -> Network {
    let mut rng = stream_rng(seed, 0);
    let mut net = Network::empty(n);
    let mut ends: Vec<usize> = vec![0, 1];
    net.toggle_checked(0, 1).expect("valid pair");
    for v in 2..n {
        let links = match rng.random::<f64>() {
            x if x < 0.6 => 1,
            x if x < 0.9 => 2,
            _ => 3,
        };
        for _ in 0..links {
            let u = ends[rng.random_range(0..ends.len())];
            if u != v && !net.has_edge(u, v).expect("in range") {
                net.toggle_checked(u, v).expect("valid pair");
                ends.extend([u, v]);
            }
        }
    }
    net
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut config = EcoliConfig { dataset: std::env::args_os().nth(1).map(Into::into), seed: 1, ..EcoliConfig::default() };
    let (observed, load) = match config.dataset {
        Some(_) => {
            let (net, report) = load_ecoli(&config)?;
            (net, Some(report))
        }
        None => {
            config.allow_any_size = true;
            config.replicates = 6;
            config.anneal.max_steps = 5_000_000;
            config.anneal.steps_per_temperature = Some(budget_steps_per_temperature(150, 0.999, 5_000_000));
            config.mcmle.sampler = SamplerConfig { sample_size: 1000, ..SamplerConfig::for_nodes(150) };
            (synthetic(150, 4), None)
        }
    };
    println!("{} nodes, {} edges", observed.node_count(), observed.edge_count());

    let out = ecoli_clusters(&observed, load, &config)?;
    println!("{:?}", ecoli_model().names());
    println!("observed stats {:?}", out.observed_stats);
    println!("observed MPLE  {:?}", out.observed_mple.as_ref().map(|t| &t.0));
    if let Some(start) = &out.improved_start {
        println!("annealed start {:?}", start.theta.0);
    }
    for (label, fit) in [("improved", &out.mcmle_from_improved), ("observed", &out.mcmle_from_observed_mple)] {
        match fit {
            Some(f) => println!("MCMLE from {label} start: {:?} {:?}", f.status, f.theta.0),
            None => println!("MCMLE from {label} start: no starting value"),
        }
    }
    println!("er cloud forms one cluster near the MCMLE: {:?}", out.er_single_cluster);
    Ok(())
}
