//! Local gradient tensors of solved potentials and the effective tilt angle.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::trap::laplace::{PairBasis, PotentialGrid};

/// Relative gap below which the two largest |eigenvalues| count as equal.
const TIE_TOL: f64 = 1e-6;

/// Fit `φ ≈ a + b·r + ½ rᵀ H r` to the free grid nodes within `radius` of
/// `center` and return the field gradient `∂E_i/∂x_j = −H_ij`.
pub fn local_gradient_tensor(grid: &PotentialGrid, center: [f64; 3], radius: f64) -> Result<Matrix3<f64>> {
    let g = grid.grid;
    let mut rows: Vec<[f64; 10]> = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..g.n {
        let x = g.coord(i) - center[0];
        if x.abs() > radius {
            continue;
        }
        for j in 0..g.n {
            let y = g.coord(j) - center[1];
            if y.abs() > radius {
                continue;
            }
            for k in 0..g.n {
                let z = g.coord(k) - center[2];
                let idx = g.index(i, j, k);
                if x * x + y * y + z * z > radius * radius || grid.fixed[idx] {
                    continue;
                }
                rows.push([1.0, x, y, z, 0.5 * x * x, 0.5 * y * y, 0.5 * z * z, x * y, x * z, y * z]);
                rhs.push(grid.values[idx]);
            }
        }
    }
    if rows.len() < 10 {
        return Err(Error::invalid(format!("only {} free nodes within the fit radius", rows.len())));
    }
    let a = DMatrix::from_fn(rows.len(), 10, |r, c| rows[r][c]);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::RankDeficient { condition: smax / smin });
    }
    let c = svd.solve(&DVector::from_vec(rhs), 0.0).map_err(|e| Error::invalid(e.to_string()))?;
    let hess = Matrix3::new(c[4], c[7], c[8], c[7], c[5], c[9], c[8], c[9], c[6]);
    Ok(-hess)
}

/// Angle between the principal axis of largest |eigenvalue| and the z axis, in [0, π/2].
pub fn effective_theta_from_tensor(g: &Matrix3<f64>) -> Result<f64> {
    let eig = SymmetricEigen::new((g + g.transpose()) * 0.5);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    let l0 = eig.eigenvalues[order[0]];
    let l1 = eig.eigenvalues[order[1]];
    if l0.abs() == 0.0 || (l0.abs() - l1.abs()) <= TIE_TOL * l0.abs() {
        return Err(Error::UndefinedAngle(l0, l1));
    }
    let vz = eig.eigenvectors[(2, order[0])].abs().min(1.0);
    Ok(vz.acos())
}

/// Effective tilt of the parabola produced by endcap pair `pair` alone.
///
/// Under the full four-phase drive the opposite-phase pairs cancel the axial
/// curvature and leave a saddle whose principal axes sit at 45°, so the tilt
/// is read from the single-pair field instead.
pub fn extract_effective_theta(basis: &PairBasis, pair: usize, fit_radius: f64) -> Result<f64> {
    let grid = basis
        .pairs
        .get(pair)
        .ok_or_else(|| Error::invalid(format!("no endcap pair {pair}")))?;
    effective_theta_from_tensor(&local_gradient_tensor(grid, [0.0; 3], fit_radius)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::GradientMode;
    use crate::trap::analytic::tilted_gradient_tensor;
    use crate::trap::laplace::{solve_dirichlet, DirichletProblem, GridSpec, SolverOptions};

    #[test]
    fn analytic_round_trip() {
        for mode in [GradientMode::Physical, GradientMode::AxialOnly] {
            for th in [0.0, 0.3, 40.7f64.to_radians(), 1.2] {
                let g = tilted_gradient_tensor(1.0, th, 0.8, mode).unwrap();
                let got = effective_theta_from_tensor(g.matrix()).unwrap();
                assert!((got - th).abs() < 1e-10, "{mode:?} {th}: {got}");
            }
        }
    }

    #[test]
    fn isotropic_is_undefined() {
        assert!(matches!(effective_theta_from_tensor(&Matrix3::identity()), Err(Error::UndefinedAngle(..))));
        let mut saddle = Matrix3::zeros();
        saddle[(0, 2)] = 1.0;
        saddle[(2, 0)] = 1.0;
        assert!(effective_theta_from_tensor(&saddle).is_err());
    }

    #[test]
    fn fitted_tensor_of_a_solved_quadratic() {
        let grid = GridSpec::new(17, 1.0).unwrap();
        let v = |q: [f64; 3]| 0.5 * q[2] * q[2] - 0.25 * (q[0] * q[0] + q[1] * q[1]) + 0.3 * q[0] * q[2];
        let s = solve_dirichlet(&DirichletProblem::with_boundary(grid, v), &SolverOptions { tol: 1e-13, ..SolverOptions::default() }).unwrap();
        let g = local_gradient_tensor(&s, [0.0; 3], 0.4).unwrap();
        let want = -Matrix3::new(-0.5, 0.0, 0.3, 0.0, -0.5, 0.0, 0.3, 0.0, 1.0);
        assert!((g - want).amax() < 1e-8, "{g}");
    }
}
