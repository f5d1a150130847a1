//! Spectrum of the tilted spin-3/2 quadrupole Hamiltonian: Kramers doublets,
//! state labels, and the splitting set by the quadrupole moment.

use ionberry::hamiltonian::{eigensystem, QuadrupoleCoupling, QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use ionberry::spin::Spin;
use ionberry::units::rad_per_s_to_hz;

fn main() -> ionberry::Result<()> {
    let alpha = 1.0;
    let theta = 40.7f64.to_radians();
    for (eps, label) in [(0.0, "no field"), (0.05, "ε = 0.05α along z'")] {
        let fam = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, alpha, theta, eps, ZeemanAxis::Principal);
        let (spec, _) = eigensystem(fam.h_tilt(), DEFAULT_DEGENERACY_TOL)?;
        let labels = fam.reference_spectrum(DEFAULT_DEGENERACY_TOL)?;
        println!("{label}:");
        for (e, l) in spec.energies.iter().zip(&labels.energies) {
            println!("  E = {:+.6}α   principal-frame m = {:+}", e.value, l.label);
        }
        println!("  degenerate groups {:?}", spec.degenerate_groups);
    }

    let ca = QuadrupoleCoupling::calcium();
    let g = QuadrupoleCoupling::CA_GRADIENT;
    println!("\nCa⁺ at 50 V/mm²: doublet splitting {:.3} Hz", rad_per_s_to_hz(ca.doublet_splitting(g)));
    println!("twice the moment:  doublet splitting {:.3} Hz", rad_per_s_to_hz(ca.scaled(2.0).doublet_splitting(g)));
    Ok(())
}
