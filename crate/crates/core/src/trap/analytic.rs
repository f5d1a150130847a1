//! The ideal rotating tilted parabola `½V₀z'²` and its field.

use nalgebra::{Matrix3, Vector3};

use crate::error::Result;
use crate::hamiltonian::{lab_rotation_3d, GradientMode, GradientTensor};

/// Principal-frame gradient: `diag(0, 0, −V₀)` or the traceless `diag(V₀/2, V₀/2, −V₀)`.
pub fn principal_gradient(v0: f64, mode: GradientMode) -> Matrix3<f64> {
    match mode {
        GradientMode::AxialOnly => Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, -v0)),
        GradientMode::Physical => Matrix3::from_diagonal(&Vector3::new(0.5 * v0, 0.5 * v0, -v0)),
    }
}

/// `R G' Rᵀ` with `R = R_z(−φ) R_y(−θ)`, the same rotation that builds the
/// lab-frame spin Hamiltonian, so the principal axis is
/// `(−sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn tilted_gradient_tensor(v0: f64, theta: f64, phi: f64, mode: GradientMode) -> Result<GradientTensor> {
    let r = lab_rotation_3d(theta, phi);
    let g = r * principal_gradient(v0, mode) * r.transpose();
    // restore exact symmetry lost to rounding
    GradientTensor::new((g + g.transpose()) * 0.5, mode)
}

/// `E(r, t) = G(θ, ωt) r`.
pub fn analytic_field_at(point: [f64; 3], t: f64, v0: f64, theta: f64, omega: f64, mode: GradientMode) -> Result<[f64; 3]> {
    let g = tilted_gradient_tensor(v0, theta, omega * t, mode)?;
    let e = g.matrix() * Vector3::from(point);
    Ok([e.x, e.y, e.z])
}

/// α of the lab Hamiltonian built from `tilted_gradient_tensor(v0, …)` and a
/// quadrupole tensor of scale `c`.
pub fn alpha_for_tilted(c: f64, v0: f64, mode: GradientMode) -> f64 {
    match mode {
        GradientMode::Physical => -c * v0 / 4.0,
        GradientMode::AxialOnly => -c * v0 / 6.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{lab_hamiltonian, quadrupole_hamiltonian};
    use crate::linalg::max_abs_diff;
    use crate::spin::{quadrupole_tensor, rot_z, Spin};
    use std::f64::consts::PI;

    #[test]
    fn tensor_examples() {
        for phi in [0.0, 1.0, 3.0] {
            let g = tilted_gradient_tensor(2.0, 0.0, phi, GradientMode::AxialOnly).unwrap();
            assert!((g.matrix() - Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, -2.0))).amax() < 1e-15);
            let g = tilted_gradient_tensor(2.0, 0.7, phi, GradientMode::Physical).unwrap();
            assert!(g.matrix().trace().abs() < 1e-14);
        }
        let g = tilted_gradient_tensor(2.0, PI / 2.0, 0.0, GradientMode::AxialOnly).unwrap();
        let mut want = Matrix3::zeros();
        want[(0, 0)] = -2.0;
        assert!((g.matrix() - want).amax() < 1e-15);
    }

    #[test]
    fn field_examples() {
        let th = 40.7f64.to_radians();
        for t in [0.0, 0.3, 2.0] {
            assert_eq!(analytic_field_at([0.0; 3], t, 1.0, th, 1.3, GradientMode::AxialOnly).unwrap(), [0.0; 3]);
        }
        let a = analytic_field_at([0.1, 0.2, 0.3], 0.0, 1.0, 0.0, 1.3, GradientMode::Physical).unwrap();
        let b = analytic_field_at([0.1, 0.2, 0.3], 2.1, 1.0, 0.0, 1.3, GradientMode::Physical).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rotation_equivariance() {
        // advancing the drive phase by Δ equals rotating the sample point by Δ and the field back
        let (th, w, dphi) = (0.8, 1.0, 0.45);
        let p = Vector3::new(0.2, -0.1, 0.3);
        for mode in [GradientMode::Physical, GradientMode::AxialOnly] {
            let lhs = Vector3::from(analytic_field_at(p.into(), 0.7 + dphi / w, 1.0, th, w, mode).unwrap());
            let rotated = rot_z(dphi) * p;
            let rhs = rot_z(-dphi) * Vector3::from(analytic_field_at(rotated.into(), 0.7, 1.0, th, w, mode).unwrap());
            assert!((lhs - rhs).amax() < 1e-12);
        }
    }

    #[test]
    fn spin_and_tensor_rotations_agree() {
        let s = Spin::THREE_HALVES;
        let c = 0.37;
        let q = quadrupole_tensor(s, c);
        for mode in [GradientMode::Physical, GradientMode::AxialOnly] {
            for (th, ph) in [(0.3, 0.0), (1.2, 2.5), (2.9, 5.0)] {
                let h = quadrupole_hamiltonian(&q, &tilted_gradient_tensor(1.9, th, ph, mode).unwrap());
                let lab = lab_hamiltonian(alpha_for_tilted(c, 1.9, mode), s, th, ph);
                assert!(max_abs_diff(&h, &lab) < 1e-10);
            }
        }
    }
}
