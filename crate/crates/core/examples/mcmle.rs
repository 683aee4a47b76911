//! Monte Carlo MLE of the nine-node reference network, started at its MPLE.
//!
//! ```text
//! cargo run --release --example mcmle
//! ```

use std::path::Path;

use ergm_core::io::{load_network, Preprocessing};
use ergm_core::{mcmle_fit, mple, McmleConfig, McmleStatus, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/nine_node_18_13.txt");
    let net = load_network(&path, Preprocessing::UndirectedNoLoops)?.network;
    let spec = ModelSpec::edges_triangles();
    let theta0 = mple(&spec, &net)?.theta;

    let mut config = McmleConfig::for_nodes(9);
    config.sampler.sample_size = 5000;
    config.seed = 11;
    let fit = mcmle_fit(&spec, &net, &theta0, &config)?;

    println!("start {:?}", theta0.0);
    for it in &fit.trace {
        println!("  iteration {}: theta {:?} z {:?} acceptance {:.3}", it.iteration, it.theta.0, it.moment_z, it.acceptance_rate);
    }
    match fit.status {
        McmleStatus::Converged => println!("converged: theta = {:?}, z = {:?}", fit.theta.0, fit.final_moment_z),
        status => println!("stopped with {status:?} after {} iterations", fit.outer_iterations),
    }
    Ok(())
}
