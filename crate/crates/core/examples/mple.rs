//! Maximum pseudo-likelihood fit with standard errors.
//!
//! ```text
//! cargo run --example mple
//! ```

use std::path::Path;

use ergm_core::io::{load_network, Preprocessing};
use ergm_core::{mple, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/nine_node_18_13.txt");
    let net = load_network(&path, Preprocessing::UndirectedNoLoops)?.network;
    let spec = ModelSpec::edges_triangles();

    let fit = mple(&spec, &net)?;
    println!("converged after {} iterations (max |score| {:.1e})", fit.iterations, fit.max_abs_score);
    for (k, name) in spec.names().iter().enumerate() {
        println!("{name:>10} {:>9.4}  se {:.4}", fit.theta[k], fit.covariance[k][k].sqrt());
    }
    println!("log pseudo-likelihood {:.4}", fit.log_pseudolikelihood);

    // a network with no triangles separates the triangle coefficient
    let star = ergm_core::Network::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])?;
    match mple(&spec, &star) {
        Ok(f) => println!("star: {:?}", f.theta.0),
        Err(e) => println!("star: {e}"),
    }
    Ok(())
}
