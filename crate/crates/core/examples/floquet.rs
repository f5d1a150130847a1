//! Floquet quasi-energies of the rotating quadrupole: the one-period
//! propagator against the exact rotating-frame spectrum, and the phase-shifted
//! spectrum they approach as the rotation slows.

use std::f64::consts::PI;

use ionberry::berry::{floquet_quasienergies_of, quasienergy_mismatch, rotating_frame_quasienergies, shifted_spectrum_residual, Integrator};
use ionberry::hamiltonian::QuadrupoleFamily;
use ionberry::spin::Spin;

fn main() -> ionberry::Result<()> {
    let (alpha, theta) = (1.0, PI / 3.0);
    let fam = QuadrupoleFamily::new(Spin::THREE_HALVES, alpha, theta);
    println!("{:>8} {:>14} {:>16}", "ω/α", "|U(T) - exact|", "shifted residual");
    for omega in [1e-1, 1e-2, 1e-3] {
        let q = floquet_quasienergies_of(&fam, omega, 10_000, Integrator::Magnus4)?;
        let exact = rotating_frame_quasienergies(&fam, omega)?;
        let res = shifted_spectrum_residual(&exact, alpha, theta, omega)?;
        println!("{omega:>8.0e} {:>14.3e} {:>16.3e}", quasienergy_mismatch(&q, &exact, omega), res);
    }
    Ok(())
}
