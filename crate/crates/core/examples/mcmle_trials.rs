//! Repeated MCMLE runs from the observed MPLE and from annealed starts.
//!
//! ```text
//! cargo run --release --example mcmle_trials -- 10
//! ```

use ergm_core::experiments::{fig4, trials_table, Fig4Config, StartKind};
use ergm_core::{McmleStatus, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(10);
    let out = fig4(&Fig4Config { trials, seed: 5, ..Fig4Config::default() })?;

    eprintln!("observed MPLE {:?}", out.observed_mple.0);
    for start in [StartKind::Mple, StartKind::Anneal] {
        eprintln!(
            "{start:?}: {} converged, {} degenerate, {} hit the iteration cap",
            out.count(start, McmleStatus::Converged),
            out.count(start, McmleStatus::Degenerate),
            out.count(start, McmleStatus::MaxIterations)
        );
    }
    trials_table(&ModelSpec::edges_triangles(), &out.trials).write_csv(std::io::stdout().lock())?;
    Ok(())
}
