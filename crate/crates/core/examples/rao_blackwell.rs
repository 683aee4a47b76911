//! Averaging the MPLE over annealed networks with the same statistics.
//!
//! ```text
//! cargo run --release --example rao_blackwell -- 50
//! ```

use ergm_core::{rao_blackwell_mple, AnnealConfig, AnnealInit, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(50);
    let spec = ModelSpec::edges_triangles();
    let cfg = AnnealConfig { seed: 9, init: AnnealInit::FromErdosRenyi { density: Some(0.5) }, ..AnnealConfig::default() };

    let est = rao_blackwell_mple(&spec, &[18.0, 13.0], 9, &cfg, m)?;
    println!("averaged over {} networks ({} failures)", est.mples.len(), est.failures);
    println!("theta  {:?}", est.theta.0);
    println!("spread {:?}", est.spread);
    Ok(())
}
