//! Berry phase of single states from a discrete Wilson loop, with a small
//! field along the principal axis splitting the doublets.

use std::f64::consts::PI;

use ionberry::berry::{single_state_phase, wilson_loop_phase, LoopPath};
use ionberry::hamiltonian::{QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use ionberry::linalg::phase_factor_distance;
use ionberry::spin::Spin;

fn main() -> ionberry::Result<()> {
    let theta = PI / 3.0;
    let fam = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, 1.0, theta, 0.05, ZeemanAxis::Principal);
    let spec = fam.reference_spectrum(DEFAULT_DEGENERACY_TOL)?;
    println!("θ = π/3; error against -2πm(cosθ - 1) as the loop is refined");
    for n in [100, 400, 1600, 6400] {
        let path = LoopPath::uniform(theta, n)?;
        let errs: Vec<String> = (0..4)
            .map(|band| {
                let m = spec.energies[band].label;
                let g = wilson_loop_phase(&fam, &path, band, DEFAULT_DEGENERACY_TOL)?;
                Ok(format!("m={m:+}: {:.2e}", phase_factor_distance(g, single_state_phase(theta, m))))
            })
            .collect::<ionberry::Result<_>>()?;
        println!("  n = {n:>5}  {}", errs.join("  "));
    }

    let degenerate = QuadrupoleFamily::new(Spin::THREE_HALVES, 1.0, theta);
    match wilson_loop_phase(&degenerate, &LoopPath::uniform(theta, 100)?, 0, DEFAULT_DEGENERACY_TOL) {
        Err(e) => println!("\nwithout the field: {e}"),
        Ok(g) => println!("\nunexpected phase {g}"),
    }
    Ok(())
}
