//! Spin matrices, their algebra, and Wigner rotation matrices.

use ionberry::linalg::{commutator, max_abs_diff, unitarity_defect, CMatrix, I};
use ionberry::spin::{quadrupole_tensor, spin_operators, wigner_d, EulerAngles, Spin};

fn main() -> ionberry::Result<()> {
    for twice in 1..=10 {
        let s = Spin::from_twice(twice);
        let ops = spin_operators(s);
        let comm = max_abs_diff(&commutator(&ops.sx, &ops.sy), &ops.sz.map(|z| z * I));
        let casimir = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
        let cas = max_abs_diff(&casimir, &CMatrix::identity(s.dim(), s.dim()).scale(s.casimir()));
        let d = wigner_d(s, EulerAngles::new(0.3, 1.1, -0.7));
        let q = quadrupole_tensor(s, 1.0);
        println!(
            "j = {:>3}: |[Sx,Sy] - iSz| = {comm:.1e}  |S² - j(j+1)| = {cas:.1e}  unitarity(D) = {:.1e}  |tr Q| = {:.1e}",
            s.j(),
            unitarity_defect(&d),
            q.trace().norm()
        );
    }

    let s = Spin::THREE_HALVES;
    println!("\nSz for j = 3/2 (basis m = 3/2, 1/2, -1/2, -3/2):");
    println!("{}", spin_operators(s).sz.map(|z| z.re));
    println!("d^(3/2)(π/2):");
    println!("{}", wigner_d(s, EulerAngles::new(0.0, std::f64::consts::FRAC_PI_2, 0.0)).map(|z| z.re));
    Ok(())
}
