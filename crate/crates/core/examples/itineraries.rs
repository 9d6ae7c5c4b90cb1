//! Symbolic itineraries and their Monte Carlo measures.

use grainy::{itinerary_of, sample_joint, MapSystem, Partition, Point};

fn main() -> grainy::Result<()> {
    let halves = Partition::unit(2, 1)?;
    let doubling = MapSystem::doubling();
    let it = itinerary_of(&doubling, &halves, Point::new(0.3, 0.0), 4, 1)?;
    println!("doubling itinerary of 0.3: {}", it.label());

    let dist = sample_joint(&doubling, &halves, 3, 1, 200_000, 42)?;
    println!("{} distinct depth-3 itineraries from {} samples", dist.distinct(), dist.total_samples());
    let mut csv = Vec::new();
    dist.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("{}", serde_json::to_string(&dist.sidecar())?);

    let grid = Partition::unit(2, 2)?;
    let baker = sample_joint(&MapSystem::baker(), &grid, 1, 1, 200_000, 42)?;
    println!("baker on 2x2: {} of 16 depth-1 itineraries carry mass", baker.distinct());
    Ok(())
}
