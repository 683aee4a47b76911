//! MPLE cloud over many networks sharing the statistics (18, 13), as CSV.
//!
//! ```text
//! cargo run --release --example cloud_experiment -- 100 > cloud.csv
//! ```

use ergm_core::experiments::{fig1, fig1_table, Fig1Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replicates = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(100);
    let cache_dir = std::env::var_os("ERGM_CACHE_DIR").map(Into::into);
    let config = Fig1Config { replicates, cache_dir, ..Fig1Config::default() };

    let out = fig1(&config)?;
    eprintln!("{}/{} annealed networks gave an MPLE; spread {:?}", out.successes, replicates, out.spread);
    if let Some(m) = &out.exact_mle {
        eprintln!("exact MLE {:?}", m.theta.0);
    }
    fig1_table(&out).write_csv(std::io::stdout().lock())?;
    Ok(())
}
