//! Partitions of phase space and the graininess identity `M·h = μ(Ω)`.

use grainy::{CellSet, Partition, Region};

fn main() -> grainy::Result<()> {
    for (region, cq, cp) in [(Region::unit_square(), 32, 32), (Region::new(0.0, 2.0, 0.0, 3.0)?, 2, 3), (Region::unit_square(), 1024, 1)] {
        let part = Partition::new(region, cq, cp)?;
        println!(
            "{cq:>4}x{cp:<4} area={:.3} M={:>5} h={:.3e} q={:>6} M*h={:.3}",
            region.area(),
            part.len(),
            part.h_cell(),
            part.quasiclassical_parameter(),
            part.len() as f64 * part.h_cell()
        );
    }

    let part = Partition::unit(4, 4)?;
    let cell = part.cell_index(0.6, 0.3)?;
    println!("(0.6, 0.3) lies in cell {} at (row, col) = {:?}", cell.0, part.row_col(cell));
    println!("left half measure {}", CellSet::left_half(&part).measure());
    println!("{}", serde_json::to_string(&part)?);
    Ok(())
}
