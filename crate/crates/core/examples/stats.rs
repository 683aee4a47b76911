//! Sufficient statistics and change statistics of a small network.
//!
//! ```text
//! cargo run --example stats
//! ```

use std::path::Path;

use ergm_core::io::{load_network, Preprocessing};
use ergm_core::stats::ModelSpec;
use ergm_core::Dyad;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let spec = ModelSpec::from_file(&data.join("edges_triangles.model"))?;
    let loaded = load_network(&data.join("nine_node_18_13.txt"), Preprocessing::UndirectedNoLoops)?;
    let net = loaded.network;

    println!("{} nodes, {} edges, sha256 {}", net.node_count(), net.edge_count(), &loaded.report.sha256[..12]);
    println!("{:?} = {:?}", spec.names(), spec.stat_vector(&net).0);
    println!("degrees: {:?}", net.degree_sequence());

    // change statistics are taken against the dyad-absent network
    for d in Dyad::all(net.node_count()).take(6) {
        let delta = spec.change_vector(&net, d);
        println!("dyad ({}, {}) tie={} change={:?}", d.i(), d.j(), net.has_tie(d), delta.0);
    }
    Ok(())
}
