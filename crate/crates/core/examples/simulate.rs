//! Metropolis-Hastings draws from an edges + triangles model.
//!
//! ```text
//! cargo run --release --example simulate -- -1.0 0.3
//! ```

use ergm_core::mple::Theta;
use ergm_core::sampler::sample_chains;
use ergm_core::{ModelSpec, Network, SamplerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let theta = Theta(if args.len() == 2 { args } else { vec![-1.0, 0.3] });
    let n = 9;
    let spec = ModelSpec::edges_triangles();
    let config = SamplerConfig { sample_size: 5000, seed: 7, ..SamplerConfig::for_nodes(n) };

    let batch = sample_chains(&spec, &theta, &Network::empty(n), &config, 4)?;
    let mean = batch.mean();
    println!("theta {:?}: {} draws, acceptance {:.3}", theta.0, batch.len(), batch.acceptance_rate);
    println!("mean (edges, triangles) = ({:.3}, {:.3})", mean[0], mean[1]);

    let mut hist = vec![0usize; 37];
    for &e in &batch.edge_counts {
        hist[e] += 1;
    }
    for (e, c) in hist.iter().enumerate().filter(|(_, c)| **c > 0) {
        println!("{e:>3} {}", "#".repeat(c * 200 / batch.len()));
    }
    Ok(())
}
