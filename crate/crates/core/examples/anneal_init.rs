//! Simulated annealing to a network with prescribed statistics, and the
//! annealed-start MPLE that feeds MCMLE.
//!
//! ```text
//! cargo run --release --example anneal_init
//! ```

use std::path::Path;

use ergm_core::io::{load_network, Preprocessing};
use ergm_core::{anneal, improved_start, AnnealConfig, AnnealInit, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::edges_triangles();
    let cfg = AnnealConfig { seed: 3, init: AnnealInit::FromErdosRenyi { density: Some(0.5) }, ..AnnealConfig::default() };

    let run = anneal(&spec, &[18.0, 13.0], 9, &cfg)?;
    println!(
        "success={} distance={} after {} steps (T0 {:.3}, {} reheats)",
        run.success,
        run.achieved_distance,
        run.steps_used,
        run.initial_temperature,
        run.reheats.len()
    );
    println!("edges: {:?}", run.network.edges().map(|d| (d.i(), d.j())).collect::<Vec<_>>());

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/nine_node_18_13.txt");
    let observed = load_network(&path, Preprocessing::UndirectedNoLoops)?.network;
    let start = improved_start(&spec, &observed, &cfg, 10)?;
    println!("improved start from attempt {}: {:?}", start.attempt, start.theta.0);
    Ok(())
}
