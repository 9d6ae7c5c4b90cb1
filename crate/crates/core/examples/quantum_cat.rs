//! Quantized cat map: dephased stationary states and their discrete Wigner functions.

use grainy::dynamics::MapSystem;
use grainy::measure::shard_rng;
use grainy::quantum::{
    check_stationarity, classical_invariance_residual, discrete_wigner, expectation_wigner, quantized_cat,
    stationary_state, wigner_transport_residual, DensityOperator, Observable,
};

fn main() -> grainy::Result<()> {
    let cat = MapSystem::cat();
    for n in [15, 31, 63] {
        let sys = quantized_cat(n)?;
        let mut rng = shard_rng(1, n);
        let rho = DensityOperator::random_pure(n, &mut rng);
        let star = stationary_state(&sys, &rho)?;
        let obs = Observable::random_hermitian(n, &mut rng);
        println!(
            "N={n:>3} period={:?} stationarity {:.1e} -> {:.1e}  W invariance {:.1e} -> {:.1e}  transport {:.1e}  pairing {:.1e}",
            sys.quantum_period(20 * n),
            check_stationarity(&sys, &rho),
            check_stationarity(&sys, &star),
            classical_invariance_residual(&rho, &cat)?,
            classical_invariance_residual(&star, &cat)?,
            wigner_transport_residual(&sys, &rho, &cat)?,
            (expectation_wigner(&rho, &obs)? - rho.expectation(&obs)).abs(),
        );
    }

    let w = discrete_wigner(&DensityOperator::position(5, 2))?;
    for q in 0..5 {
        let row: Vec<String> = (0..5).map(|p| format!("{:+.2}", w.get(q, p))).collect();
        println!("q={q}: {}", row.join(" "));
    }
    Ok(())
}
