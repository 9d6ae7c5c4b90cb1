//! Saturation depth of the cat map against `log q`, seeding one point per grain.

use grainy::entropy::{grained_entropy_series, saturation_depth};
use grainy::{lyapunov_max, MapSystem, Partition, Point};

fn main() -> grainy::Result<()> {
    let cat = MapSystem::cat();
    let lambda = lyapunov_max(&cat, Point::new(0.1, 0.7), 100_000, 1)?;
    let coarse = Partition::unit(2, 2)?;
    println!("{:>7} {:>7} {:>4} {:>8}", "M", "log M", "n*", "logM/h");
    for e in 3..=7 {
        let grains = Partition::unit(1 << e, 1 << e)?;
        let series = grained_entropy_series(&cat, &coarse, &grains, 40, 1, 7)?;
        let n_star = saturation_depth(&series, 0.5, Some(lambda))?;
        let log_q = (grains.len() as f64).ln();
        println!("{:>7} {log_q:>7.3} {n_star:>4} {:>8.2}", grains.len(), log_q / lambda);
    }
    Ok(())
}
