//! The |±1/2⟩ doublet as a symmetry-breaking field grows: matrix-valued phases
//! while ε is small against the rotation, single-state phases once ω ≪ ε ≪ α.

use std::f64::consts::PI;

use ionberry::berry::{crossover_table, CrossoverConfig, Integrator};
use ionberry::hamiltonian::ZeemanAxis;

fn main() -> ionberry::Result<()> {
    let (alpha, theta, omega) = (1.0, PI / 3.0, 1e-4);
    let cfg = CrossoverConfig {
        axes: vec![ZeemanAxis::Principal],
        integrator: Integrator::Magnus4,
        loop_steps: 2000,
        ..CrossoverConfig::new(alpha, theta, omega, vec![1e-5, 1e-4, 1e-3, 1e-2, 1e-1])
    };
    println!("{:>8} {:>16} {:>12} {:>12} {:>12}", "ε/α", "regime", "γ(+)", "split err", "doublet err");
    for r in crossover_table(&cfg)? {
        println!(
            "{:>8.0e} {:>16} {:>12.6} {:>12.3e} {:>12.3e}",
            r.epsilon,
            format!("{:?}", r.regime),
            r.dynamic_plus,
            r.split_error,
            r.degenerate_error
        );
    }
    Ok(())
}
