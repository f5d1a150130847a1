//! Matrix-valued (Wilczek–Zee) phases of the degenerate Kramers doublets.

use std::f64::consts::PI;

use ionberry::berry::{closed_form_phases, wz_holonomy, HolonomyOptions, LoopPath};
use ionberry::hamiltonian::{QuadrupoleFamily, DEFAULT_DEGENERACY_TOL};
use ionberry::linalg::unitarity_defect;
use ionberry::spin::Spin;

fn main() -> ionberry::Result<()> {
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0] {
        let fam = QuadrupoleFamily::new(Spin::THREE_HALVES, 1.0, theta);
        let spec = fam.reference_spectrum(DEFAULT_DEGENERACY_TOL)?;
        let path = LoopPath::uniform(theta, 4000)?;
        let cf = closed_form_phases(theta)?;
        println!("θ = {:.1}°", theta.to_degrees());
        for group in &spec.degenerate_groups {
            let m = spec.energies[group[0]].label.abs();
            let h = wz_holonomy(&fam, &path, group, DEFAULT_DEGENERACY_TOL, HolonomyOptions::default())?;
            println!(
                "  ±{m}: eigenphases {:+.9} {:+.9}   closed form ±{:.9} (mod 2π)   unitarity {:.1e}",
                h.eigenphases[0],
                h.eigenphases[1],
                ionberry::linalg::wrap_phase(cf.get(m).unwrap()).abs(),
                unitarity_defect(&h.matrix)
            );
        }
    }
    Ok(())
}
