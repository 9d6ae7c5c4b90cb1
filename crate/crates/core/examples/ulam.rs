//! Ulam matrices, invariant densities and spectral gaps.

use grainy::transfer::{fixed_density, second_eigenvalue_modulus, UlamOperator, UlamSampling};
use grainy::{MapSystem, Partition};

fn main() -> grainy::Result<()> {
    let cases = [("doubling", Partition::unit(64, 1)?), ("cat", Partition::unit(8, 8)?), ("baker", Partition::unit(8, 8)?), ("standard:K=0.97", Partition::unit(8, 8)?)];
    for (spec, grid) in cases {
        let map: MapSystem = spec.parse()?;
        for sampling in [UlamSampling::Lattice { per_axis: 16 }, UlamSampling::Random { samples_per_cell: 2_000, seed: 3 }] {
            let op = UlamOperator::build(&map, &grid, sampling)?;
            let f = fixed_density(&op, 1e-10, 100_000)?;
            let gap = second_eigenvalue_modulus(&op, &f, 300, 1);
            println!("{spec:<16} {sampling:?}: |f-uniform|_1={:.2e} residual={:.1e} |lambda2|={gap:.3}", f.uniformity_error(), op.residual(&f));
        }
    }
    Ok(())
}
