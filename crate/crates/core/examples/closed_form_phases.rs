//! Closed-form Berry phases of the four states and the energy shifts they
//! cause when the field rotates with period T.

use std::f64::consts::PI;

use ionberry::berry::{closed_form_phases, doublet_splittings, energy_shift_spectrum, PhaseConvention};

fn main() -> ionberry::Result<()> {
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "θ/π", "γ(3/2)/π", "γ(1/2)/π", "γ(-1/2)/π", "γ(-3/2)/π");
    for k in 0..=8 {
        let theta = PI * k as f64 / 8.0;
        let g = closed_form_phases(theta)?.values();
        println!("{:>8.3} {:>12.6} {:>12.6} {:>12.6} {:>12.6}", theta / PI, g[0] / PI + 0.0, g[1] / PI + 0.0, g[2] / PI + 0.0, g[3] / PI + 0.0);
    }

    let (alpha, period, theta) = (1.0, 2.0 * PI / 1e-2, PI / 3.0);
    println!("\nshifted energies at θ = π/3, α = 1, ω = 0.01:");
    for e in energy_shift_spectrum(alpha, theta, period, PhaseConvention::Positive)? {
        println!("  m = {:+}: {:+.8}", e.label, e.value);
    }
    let [outer, inner] = doublet_splittings(theta, period)?;
    println!("doublet splittings: ±3/2 {outer:.3e}, ±1/2 {inner:.3e}");
    Ok(())
}
