//! Refined-partition entropy series, KS-entropy estimates and the graininess bound.

use grainy::entropy::{bound_report, entropy_series, ks_estimate, FitWindow, KsMethod};
use grainy::{MapSystem, Partition};

fn main() -> grainy::Result<()> {
    let samples = 1_000_000;
    for spec in ["baker", "cat", "standard:K=6", "doubling", "rotation:alpha=0.618"] {
        let map: MapSystem = spec.parse()?;
        let grid = if map.dimension() == 1 { Partition::unit(1024, 1)? } else { Partition::unit(32, 32)? };
        let depth = if spec.starts_with("rotation") { 100 } else { 10 };
        let series = entropy_series(&map, &grid, depth, 1, samples, 7)?;
        let est = ks_estimate(&series, KsMethod::IncrementAverage, FitWindow::Auto)?;
        let report = bound_report(&est, &grid);
        println!("{spec:<22} window {:?}  {}", est.fit_window, report.summary());
    }

    let grid = Partition::unit(1024, 1)?;
    let strided = entropy_series(&MapSystem::doubling(), &grid, 6, 2, samples, 7)?;
    let est = ks_estimate(&strided, KsMethod::IncrementAverage, FitWindow::Auto)?;
    println!("doubling, stride 2: h_ks_tau={:.4} h_ks={:.4}", est.h_ks_tau, est.h_ks);
    Ok(())
}
