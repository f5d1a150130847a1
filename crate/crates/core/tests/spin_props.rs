use nalgebra::DMatrix;
use proptest::prelude::*;

use ionberry::hamiltonian::{lab_hamiltonian, quadrupole_hamiltonian, GradientMode};
use ionberry::linalg::{eigh, max_abs_diff, unitarity_defect, CMatrix, C64};
use ionberry::spin::{quadrupole_tensor, spin_operators, wigner_d, EulerAngles, Spin};
use ionberry::trap::{alpha_for_tilted, tilted_gradient_tensor};

fn exp_rotation(gen: &CMatrix, angle: f64) -> CMatrix {
    gen.map(|x| x * C64::new(0.0, -angle)).exp()
}

fn spin_strategy() -> impl Strategy<Value = Spin> {
    (1u32..=10).prop_map(Spin::from_twice)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wigner_matches_exponential_product(s in spin_strategy(), phi in -6.3f64..6.3, theta in 0.0f64..3.15, chi in -6.3f64..6.3) {
        let ops = spin_operators(s);
        let d = wigner_d(s, EulerAngles::new(phi, theta, chi));
        let direct = exp_rotation(&ops.sz, phi) * exp_rotation(&ops.sy, theta) * exp_rotation(&ops.sz, chi);
        prop_assert!(max_abs_diff(&d, &direct) < 1e-10);
        prop_assert!(unitarity_defect(&d) < 1e-12);
    }

    #[test]
    fn rotations_about_z_compose(s in spin_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let da = wigner_d(s, EulerAngles::new(a, 0.0, 0.0));
        let db = wigner_d(s, EulerAngles::new(b, 0.0, 0.0));
        let dab = wigner_d(s, EulerAngles::new(a + b, 0.0, 0.0));
        prop_assert!(max_abs_diff(&(da * db), &dab) < 1e-12);
    }

    #[test]
    fn quadrupole_is_traceless_hermitian(s in spin_strategy(), c in -10.0f64..10.0) {
        let q = quadrupole_tensor(s, c);
        prop_assert!(q.trace().iter().all(|z| z.norm() < 1e-11));
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(max_abs_diff(q.get(i, j), &q.get(i, j).adjoint()) < 1e-12);
                prop_assert!(max_abs_diff(q.get(i, j), q.get(j, i)) < 1e-12);
            }
        }
    }

    #[test]
    fn tilt_preserves_the_spectrum(s in spin_strategy(), alpha in -2.0f64..2.0, theta in 0.0f64..3.15, phi in 0.0f64..6.3) {
        let (vals, _) = eigh(&lab_hamiltonian(alpha, s, theta, phi)).unwrap();
        let third = s.casimir() / 3.0;
        let mut want: Vec<f64> = s.m_values().iter().map(|m| alpha * (m * m - third)).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn tensor_contraction_matches_rotated_principal_form(theta in 0.0f64..3.15, phi in 0.0f64..6.3, c in 0.1f64..3.0, v0 in -2.0f64..2.0) {
        let s = Spin::THREE_HALVES;
        let g = tilted_gradient_tensor(v0, theta, phi, GradientMode::Physical).unwrap();
        let h = quadrupole_hamiltonian(&quadrupole_tensor(s, c), &g);
        let want = lab_hamiltonian(alpha_for_tilted(c, v0, GradientMode::Physical), s, theta, phi);
        prop_assert!(max_abs_diff(&h, &want) < 1e-10);
    }
}

#[test]
fn spin_operator_matrix_elements() {
    // ⟨m+1|S+|m⟩ = √(j(j+1) − m(m+1)) in descending-m order
    for twice in 1..=10 {
        let s = Spin::from_twice(twice);
        let j = s.j();
        let sp = spin_operators(s).raising();
        let want = DMatrix::from_fn(s.dim(), s.dim(), |r, c| {
            let m = j - c as f64;
            if r + 1 == c {
                C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(max_abs_diff(&sp, &want) < 1e-14, "j = {j}");
    }
}
