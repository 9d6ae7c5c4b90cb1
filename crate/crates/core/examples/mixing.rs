//! Correlation decay for mixing maps, the rotation control, and finite-time factorization.

use grainy::transfer::{build_ulam, correlation_series, factorization_residual, ulam_correlation};
use grainy::{CellSet, MapSystem, Partition};

fn main() -> grainy::Result<()> {
    let grid = Partition::unit(32, 32)?;
    let left = CellSet::left_half(&grid);
    let bottom = CellSet::bottom_half(&grid);
    for map in [MapSystem::cat(), MapSystem::baker()] {
        let s = correlation_series(&map, &grid, &left, &bottom, 12, 500_000, 1)?;
        let row: Vec<String> = s.values.iter().map(|c| format!("{c:+.3}")).collect();
        println!("{map:<8} C(t) = {}", row.join(" "));
    }
    let rot = MapSystem::rotation(0.618_033_988_749_895);
    let s = correlation_series(&rot, &grid, &left, &left, 12, 500_000, 1)?;
    let row: Vec<String> = s.values.iter().map(|c| format!("{c:+.3}")).collect();
    println!("rotation C(t) = {}", row.join(" "));

    let coarse = Partition::unit(8, 8)?;
    let op = build_ulam(&MapSystem::baker(), &coarse, 5_000, 2)?;
    let (l, b) = (CellSet::left_half(&coarse), CellSet::bottom_half(&coarse));
    let via_ulam: Vec<String> = (0..6).map(|t| format!("{:+.3}", ulam_correlation(&op, &l, &b, t))).collect();
    println!("baker via Ulam powers: {}", via_ulam.join(" "));

    let sets = [bottom.clone(), left.clone(), bottom];
    for t in [0, 1, 2, 5, 10] {
        let baker = factorization_residual(&MapSystem::baker(), &grid, &sets, t, 500_000, 3)?;
        let rotation = factorization_residual(&rot, &grid, &sets, t, 500_000, 3)?;
        println!("t_gap={t:>2} residual baker={baker:.4} rotation={rotation:.4}");
    }
    Ok(())
}
