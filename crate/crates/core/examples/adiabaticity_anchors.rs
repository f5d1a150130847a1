//! Adiabaticity ratios at the reference operating points.

use ionberry::berry::{adiabaticity_check, adiabaticity_from_gap, DEFAULT_ADIABATIC_THRESHOLD};
use ionberry::hamiltonian::{QuadrupoleCoupling, ZeemanAxis};
use ionberry::units::hz_to_rad_per_s;

fn main() -> ionberry::Result<()> {
    for (gap, rot) in [(300.0, 3.0), (150.0, 150.0), (150.0, 0.5)] {
        let r = adiabaticity_from_gap(hz_to_rad_per_s(gap), hz_to_rad_per_s(rot), DEFAULT_ADIABATIC_THRESHOLD);
        println!("gap {gap:>5} Hz, rotation {rot:>5} Hz: ratio {:.4}  {}", r.ratio, if r.pass { "pass" } else { "fail" });
    }

    let ca = QuadrupoleCoupling::calcium();
    let g = QuadrupoleCoupling::CA_GRADIENT;
    for (name, c) in [("Ca⁺", ca), ("2× moment", ca.scaled(2.0))] {
        let r = adiabaticity_check(c.alpha(g), 40.7f64.to_radians(), hz_to_rad_per_s(3.0), 0.0, ZeemanAxis::Principal, 0.01)?;
        println!("{name:>10}: gap {:.1} Hz at 3 Hz rotation → ratio {:.4}", r.gap / (2.0 * std::f64::consts::PI), r.ratio);
    }
    Ok(())
}
