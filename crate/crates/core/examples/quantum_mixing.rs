//! Quantum correlation `Tr(ρ(t)O) − Tr(ρ*O)` for the quantized cat map.

use grainy::measure::shard_rng;
use grainy::quantum::{correlation_sweep, quantized_cat, DensityOperator, Observable};

fn main() -> grainy::Result<()> {
    for n in [11, 31, 101, 201] {
        let sys = quantized_cat(n)?;
        let mut rng = shard_rng(5, 0);
        let rho = DensityOperator::random_pure(n, &mut rng);
        let obs = Observable::position_window(n, 0, n / 2);
        let sweep = correlation_sweep(&sys, &rho, &obs, n)?;
        println!(
            "N={n:>3} C(0)={:+.4} mean|C|={:.4} rms={:.4} period={:?}",
            sweep.values[0],
            sweep.mean_abs,
            sweep.fluctuation,
            sys.quantum_period(20 * n)
        );
    }
    Ok(())
}
