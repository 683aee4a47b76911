//! Exact MLE for the edges + triangles model by full enumeration.
//!
//! ```text
//! cargo run --release --example exact_mle -- 9 18 13
//! ```

use std::time::Instant;

use ergm_core::exact::{enumerate_cached, DEFAULT_MAX_NODES};
use ergm_core::stats::ModelSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (n, target) = match args.as_slice() {
        [n, e, t] => (*n as usize, vec![*e, *t]),
        [] => (7, vec![10.0, 4.0]),
        _ => return Err("usage: exact_mle [n edges triangles]".into()),
    };
    let spec = ModelSpec::edges_triangles();
    let cache = std::env::temp_dir().join("ergm-enumeration");
    let started = Instant::now();
    let table = enumerate_cached(&spec, n, DEFAULT_MAX_NODES, &cache)?;
    println!("n = {n}: {} distinct statistic vectors ({:.1?})", table.entries().len(), started.elapsed());
    println!("multiplicity of {target:?}: {}", table.multiplicity(&target));

    let fit = table.exact_mle(&target)?;
    if fit.exists {
        println!("theta = ({:.6}, {:.6})  loglik = {:.6}", fit.theta[0], fit.theta[1], fit.loglik);
        println!("mean value at theta: ({:.9}, {:.9})", fit.mean_value[0], fit.mean_value[1]);
    } else {
        println!("no MLE: target lies on the hull boundary, recession direction {:?}", fit.recession_direction);
    }
    Ok(())
}
