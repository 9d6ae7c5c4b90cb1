//! The map catalogue: orbits, Jacobians and maximal Lyapunov exponents.

use grainy::dynamics::{det, lyapunov_max};
use grainy::{MapSystem, Point};

fn main() -> grainy::Result<()> {
    let maps: Vec<MapSystem> =
        ["baker", "cat", "standard:K=0.97", "standard:K=6", "rotation:alpha=0.618", "doubling"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let x = Point::new(0.318_309_886, 0.271_828_182);
    for map in &maps {
        let orbit = map.orbit(x, 3, 1)?;
        let j = map.jacobian(x)?;
        let lambda = lyapunov_max(map, x, 100_000, 1)?;
        let tail: Vec<String> = orbit.iter().map(|p| format!("({:.3},{:.3})", p.q, p.p)).collect();
        println!("{:<22} det J={:+.3} lambda={lambda:.4} orbit {}", map.to_string(), det(&j), tail.join(" "));
    }
    println!("cat period of (0.5,0.5): {:?}", MapSystem::cat().iterate(Point::new(0.5, 0.5), 3));
    Ok(())
}
