//! Direct time evolution around one rotation period, split into dynamical and
//! geometric phase, and the O(ω) approach of the geometric phase to its
//! adiabatic value.

use std::f64::consts::PI;

use ionberry::berry::{adiabatic_evolve, single_state_phase, EvolveOptions, Integrator, RotatingQuadrupole};
use ionberry::hamiltonian::{eigensystem, QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use ionberry::linalg::phase_factor_distance;
use ionberry::spin::Spin;

fn main() -> ionberry::Result<()> {
    let (alpha, theta, eps) = (1.0, PI / 2.0, 0.2);
    let fam = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, alpha, theta, eps, ZeemanAxis::Principal);
    let rank = fam.rank_of_label(1.5, DEFAULT_DEGENERACY_TOL)?;
    let (_, vecs) = eigensystem(fam.h_tilt(), DEFAULT_DEGENERACY_TOL)?;
    let psi0 = vecs.column(rank).into_owned();
    let target = single_state_phase(theta, 1.5);
    let opts = EvolveOptions {
        integrator: Integrator::Magnus4,
        branch_hint: Some(target),
        ..EvolveOptions::default()
    };
    println!("|m = 3/2⟩ at θ = π/2, ε = 0.2α; closed form γ = {target:.6}");
    println!("{:>8} {:>14} {:>14} {:>12} {:>10}", "ω/α", "dynamical", "geometric", "error", "fidelity");
    for omega in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3] {
        let drive = RotatingQuadrupole::new(fam.clone(), omega)?;
        let steps = (200.0 * alpha / omega) as usize;
        let r = adiabatic_evolve(&drive, &psi0, drive.period(), steps, &opts)?;
        println!(
            "{omega:>8.0e} {:>14.6} {:>14.9} {:>12.3e} {:>10.7}",
            r.dynamical_phase,
            r.geometric_phase,
            phase_factor_distance(r.geometric_phase, target),
            r.fidelity_to_initial_eigenstate
        );
    }
    Ok(())
}
