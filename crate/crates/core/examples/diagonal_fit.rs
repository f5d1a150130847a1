//! Polynomial fits of the potential along a rod diagonal at two drive
//! amplitudes; the quadratic coefficient scales with the voltage.

use ionberry::trap::{fit_diagonal_potential, laplace_solve, GridSpec, SolverOptions, TrapModel};

fn main() -> ionberry::Result<()> {
    let base = TrapModel::default_geometry();
    let grid = GridSpec::new(129, base.box_half_width)?;
    let c = base.pairs[0].rods[0].center;
    let extent = 0.6 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let mut quad = Vec::new();
    for v0 in [500.0, 1000.0] {
        let model = base.with_amplitude(v0);
        let pot = laplace_solve(&model, 0.0, grid, &SolverOptions::default())?;
        let fit = fit_diagonal_potential(&pot, &model, 0, extent, 41, 4)?;
        println!("V0 = {v0} V: R² = {:.6}", fit.r_squared);
        for (k, c) in fit.coefficients.iter().enumerate() {
            println!("  c{k} = {c:+.6e} ± {:.2e}", fit.std_error(k));
        }
        quad.push(fit.coefficients[2]);
    }
    println!("quadratic coefficient ratio {:.6}", quad[1] / quad[0]);
    Ok(())
}
