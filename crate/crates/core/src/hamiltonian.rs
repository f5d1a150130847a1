//! Quadrupole interaction Hamiltonians, Zeeman terms and a labelled
//! Hermitian eigensystem.
//!
//! The lab-frame Hamiltonian is the principal-frame one conjugated by
//! `D(-φ, -θ, 0)`: rotate by −φ about z, then by −θ about the rotated y axis.
//! The principal axis then points along
//! `n̂(θ, φ) = (−sinθ cosφ, sinθ sinφ, cosθ)` and, as φ runs from 0 to 2π,
//! the state built on `|m⟩` picks up the Berry phase `−2πm(cosθ − 1)`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, hermitian_part, hermiticity_defect, real_diag, CMatrix, CVector, C64};
use crate::spin::{quadrupole_tensor, rot_y, rot_z, spin_operators, wigner_d, EulerAngles, QuadrupoleTensor, Spin};

/// Default relative tolerance for grouping degenerate eigenvalues.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    /// Traceless tensor, as required by the Laplace equation.
    Physical,
    /// Single `zz` component kept; tracelessness waived.
    AxialOnly,
}

/// Symmetric field-gradient tensor `g_ij = ∂E_i/∂x_j` in V/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientTensor {
    g: Matrix3<f64>,
    mode: GradientMode,
}

impl GradientTensor {
    pub fn new(g: Matrix3<f64>, mode: GradientMode) -> Result<Self> {
        let scale = g.amax().max(1e-300);
        let asym = (g - g.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::invalid(format!(
                "gradient tensor is not symmetric (max |g - gᵀ| = {asym:.3e})"
            )));
        }
        if mode == GradientMode::Physical && g.trace().abs() > 1e-12 * scale {
            return Err(Error::invalid(format!(
                "physical gradient tensor must be traceless (trace = {:.3e})",
                g.trace()
            )));
        }
        Ok(GradientTensor { g, mode })
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.g
    }

    pub fn mode(&self) -> GradientMode {
        self.mode
    }

    pub fn scaled(&self, k: f64) -> Self {
        GradientTensor {
            g: self.g * k,
            mode: self.mode,
        }
    }
}

/// Gradient of the quadratic potential `V(r) = Σ_ij a_ij x_i x_j`.
///
/// `E = −∇V`, so `g = −(a + aᵀ)`. The tensor is tagged physical when the
/// potential is harmonic (trace(a) = 0) and axial-only otherwise.
pub fn gradient_from_quadratic_potential(a: &Matrix3<f64>) -> Result<GradientTensor> {
    let scale = a.amax().max(1e-300);
    if (a - a.transpose()).amax() > 1e-12 * scale {
        return Err(Error::invalid("quadratic-form coefficients must be symmetric"));
    }
    let mode = if a.trace().abs() <= 1e-12 * scale {
        GradientMode::Physical
    } else {
        GradientMode::AxialOnly
    };
    GradientTensor::new(-(a + a.transpose()), mode)
}

/// `H = (1/6) Σ_ij Q_ij g_ij`.
pub fn quadrupole_hamiltonian(q: &QuadrupoleTensor, g: &GradientTensor) -> CMatrix {
    let d = q.spin.dim();
    let mut h = CMatrix::zeros(d, d);
    for i in 0..3 {
        for j in 0..3 {
            let gij = g.g[(i, j)];
            if gij != 0.0 {
                h += q.get(i, j).scale(gij / 6.0);
            }
        }
    }
    h
}

/// `α (Sz² − S²/3)`.
pub fn principal_hamiltonian(alpha: f64, spin: Spin) -> CMatrix {
    let third = spin.casimir() / 3.0;
    let diag: Vec<f64> = spin.m_values().iter().map(|m| alpha * (m * m - third)).collect();
    real_diag(&diag)
}

/// Rotation taking the principal frame to the lab frame at tilt `theta`, azimuth `phi`.
pub fn lab_rotation(spin: Spin, theta: f64, phi: f64) -> CMatrix {
    wigner_d(spin, EulerAngles::new(-phi, -theta, 0.0))
}

/// The 3×3 rotation matching [`lab_rotation`]: `R_z(−φ) R_y(−θ)`.
pub fn lab_rotation_3d(theta: f64, phi: f64) -> Matrix3<f64> {
    rot_z(-phi) * rot_y(-theta)
}

/// Unit vector of the principal axis `z'` in lab coordinates.
pub fn principal_axis(theta: f64, phi: f64) -> [f64; 3] {
    let v = lab_rotation_3d(theta, phi) * Vector3::z();
    [v.x, v.y, v.z]
}

/// `D H_principal D†` with `D = D(−φ, −θ, 0)`.
pub fn lab_hamiltonian(alpha: f64, spin: Spin, theta: f64, phi: f64) -> CMatrix {
    let d = lab_rotation(spin, theta, phi);
    &d * principal_hamiltonian(alpha, spin) * d.adjoint()
}

/// `ε Sz` along the lab z axis.
pub fn zeeman_term(epsilon: f64, spin: Spin) -> CMatrix {
    spin_operators(spin).sz.scale(epsilon)
}

/// `ε n̂·S` for an arbitrary axis.
pub fn zeeman_along(epsilon: f64, spin: Spin, axis: [f64; 3]) -> CMatrix {
    spin_operators(spin).along(axis).scale(epsilon)
}

/// Direction of the symmetry-breaking field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeemanAxis {
    /// Fixed lab z axis.
    Lab,
    /// Along the rotating principal axis `z'` (co-rotating field).
    #[default]
    Principal,
}

/// A Hamiltonian depending on one loop parameter φ.
pub trait ParametricHamiltonian: Sync {
    fn dim(&self) -> usize;
    fn at(&self, phi: f64) -> CMatrix;
}

/// Wraps a closure `φ → H(φ)` as a [`ParametricHamiltonian`].
pub struct FnFamily<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Sync> FnFamily<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnFamily { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Sync> ParametricHamiltonian for FnFamily<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn at(&self, phi: f64) -> CMatrix {
        (self.f)(phi)
    }
}

/// The rotating quadrupole Hamiltonian at fixed tilt, with an optional Zeeman term.
///
/// `H(φ) = R(φ) H(0) R(φ)†` with `R(φ) = exp(iφ Sz)`; for both Zeeman axes the
/// φ-dependence is carried entirely by this rotation, so each evaluation is an
/// elementwise phase on a cached matrix.
#[derive(Debug, Clone)]
pub struct QuadrupoleFamily {
    pub spin: Spin,
    pub alpha: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub axis: ZeemanAxis,
    h0: CMatrix,
    m: Vec<f64>,
}

impl QuadrupoleFamily {
    pub fn new(spin: Spin, alpha: f64, theta: f64) -> Self {
        Self::with_zeeman(spin, alpha, theta, 0.0, ZeemanAxis::Lab)
    }

    pub fn with_zeeman(spin: Spin, alpha: f64, theta: f64, epsilon: f64, axis: ZeemanAxis) -> Self {
        let mut h0 = lab_hamiltonian(alpha, spin, theta, 0.0);
        if epsilon != 0.0 {
            h0 += match axis {
                ZeemanAxis::Lab => zeeman_term(epsilon, spin),
                ZeemanAxis::Principal => zeeman_along(epsilon, spin, principal_axis(theta, 0.0)),
            };
        }
        QuadrupoleFamily {
            spin,
            alpha,
            theta,
            epsilon,
            axis,
            h0,
            m: spin.m_values(),
        }
    }

    /// `H(φ = 0)`.
    pub fn h_tilt(&self) -> &CMatrix {
        &self.h0
    }

    /// The same Hamiltonian expressed in the principal frame at φ = 0.
    pub fn principal_frame(&self) -> CMatrix {
        let d = lab_rotation(self.spin, self.theta, 0.0);
        d.adjoint() * &self.h0 * d
    }

    /// Spectrum at φ = 0 with labels taken in the principal frame.
    ///
    /// Eigenvalues are the same at every φ, so this ordering identifies a band
    /// along the whole loop.
    pub fn reference_spectrum(&self, tol: f64) -> Result<SpectrumRecord> {
        Ok(eigensystem(&self.principal_frame(), tol)?.0)
    }

    /// Rank (position in descending order) of the band labelled `m`.
    pub fn rank_of_label(&self, m: f64, tol: f64) -> Result<usize> {
        rank_of_label(&self.reference_spectrum(tol)?, m)
    }
}

impl ParametricHamiltonian for QuadrupoleFamily {
    fn dim(&self) -> usize {
        self.spin.dim()
    }

    fn at(&self, phi: f64) -> CMatrix {
        let m = &self.m;
        CMatrix::from_fn(self.h0.nrows(), self.h0.ncols(), |a, b| {
            self.h0[(a, b)] * C64::from_polar(1.0, (m[a] - m[b]) * phi)
        })
    }
}

/// One eigenvalue with its state label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelledEnergy {
    /// Magnetic quantum number of the dominant basis component.
    pub label: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    /// Sorted by descending value.
    pub energies: Vec<LabelledEnergy>,
    /// Partition of positions in `energies` into degenerate groups.
    pub degenerate_groups: Vec<Vec<usize>>,
}

impl SpectrumRecord {
    pub fn values(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e.value).collect()
    }

    pub fn group_of(&self, rank: usize) -> Option<&Vec<usize>> {
        self.degenerate_groups.iter().find(|g| g.contains(&rank))
    }

    /// Smallest gap between adjacent distinct groups; zero when there is only one group.
    pub fn min_group_gap(&self) -> f64 {
        let means: Vec<f64> = self
            .degenerate_groups
            .iter()
            .map(|g| g.iter().map(|&k| self.energies[k].value).sum::<f64>() / g.len() as f64)
            .collect();
        means
            .windows(2)
            .map(|w| (w[0] - w[1]).abs())
            .fold(f64::INFINITY, f64::min)
            .min(if means.len() < 2 { 0.0 } else { f64::INFINITY })
    }
}

pub fn rank_of_label(spec: &SpectrumRecord, m: f64) -> Result<usize> {
    let hits: Vec<usize> = spec
        .energies
        .iter()
        .enumerate()
        .filter(|(_, e)| (e.label - m).abs() < 1e-9)
        .map(|(k, _)| k)
        .collect();
    match hits.as_slice() {
        [k] => Ok(*k),
        [] => Err(Error::invalid(format!("no eigenstate carries label m = {m}"))),
        _ => Err(Error::invalid(format!("label m = {m} is ambiguous in this spectrum"))),
    }
}

/// Hermitian eigensystem sorted by descending energy.
///
/// Eigenvalues closer than `tol · max(1, spectral radius)` are grouped. Inside
/// a group the basis is rotated to diagonalize the projected `Sz`-like operator
/// `diag(m)` and ordered by descending expectation, which fixes a reproducible
/// labelling for Kramers doublets. Columns of the returned matrix are the
/// eigenvectors in the same order as `energies`.
pub fn eigensystem(h: &CMatrix, tol: f64) -> Result<(SpectrumRecord, CMatrix)> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.ncols(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("degeneracy tolerance must be positive"));
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let (asc, vecs) = eigh(h)?;
    let values: Vec<f64> = asc.iter().rev().copied().collect();
    let mut vectors = CMatrix::from_fn(n, n, |r, c| vecs[(r, n - 1 - c)]);

    let radius = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let gtol = tol * radius.max(1.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(g) if (values[*g.last().unwrap()] - values[k]).abs() <= gtol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }

    // m-values of a 2j+1 basis; for other dimensions fall back to (n-1)/2 … −(n-1)/2
    let mvals: Vec<f64> = (0..n).map(|k| (n as f64 - 1.0) / 2.0 - k as f64).collect();
    for g in groups.iter().filter(|g| g.len() > 1) {
        let sub = CMatrix::from_fn(n, g.len(), |r, c| vectors[(r, g[c])]);
        let mz = CMatrix::from_fn(g.len(), g.len(), |a, b| {
            (0..n).map(|r| sub[(r, a)].conj() * sub[(r, b)] * mvals[r]).sum::<C64>()
        });
        let (_, rot) = eigh(&hermitian_part(&mz))?;
        // descending ⟨m⟩
        let rotated = &sub * CMatrix::from_fn(g.len(), g.len(), |r, c| rot[(r, g.len() - 1 - c)]);
        for (c, &k) in g.iter().enumerate() {
            vectors.set_column(k, &rotated.column(c));
        }
    }

    let energies = (0..n)
        .map(|k| {
            let col: CVector = vectors.column(k).into_owned();
            let mut best = 0;
            for r in 1..n {
                if col[r].norm_sqr() > col[best].norm_sqr() + 1e-12 {
                    best = r;
                }
            }
            LabelledEnergy {
                label: mvals[best],
                value: values[k],
            }
        })
        .collect();
    Ok((
        SpectrumRecord {
            energies,
            degenerate_groups: groups,
        },
        vectors,
    ))
}

/// Maps a quadrupole coupling constant and gradient magnitude to α.
///
/// With the physical principal-frame gradient `diag(−V₀/2, −V₀/2, V₀)` the
/// Hamiltonian is `(c V₀ / 4)(Sz² − S²/3)`, so `α = c V₀ / 4` and the
/// splitting between the two Kramers doublets of a spin-3/2 level is `2|α|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrupoleCoupling {
    /// rad/s per (V/m²).
    pub c: f64,
}

impl QuadrupoleCoupling {
    /// Gradient of the Ca⁺ reference point, V/m² (50 V/mm²).
    pub const CA_GRADIENT: f64 = 50.0e6;
    /// Doublet splitting of the Ca⁺ reference point, Hz.
    pub const CA_SPLITTING_HZ: f64 = 150.0;

    /// Coupling that yields the given doublet splitting (rad/s) at gradient `v0` (V/m²).
    pub fn from_splitting(splitting: f64, v0: f64) -> Result<Self> {
        if v0 == 0.0 || !v0.is_finite() {
            return Err(Error::invalid("reference gradient must be finite and nonzero"));
        }
        Ok(QuadrupoleCoupling {
            c: 2.0 * splitting / v0,
        })
    }

    pub fn calcium() -> Self {
        Self::from_splitting(crate::units::hz_to_rad_per_s(Self::CA_SPLITTING_HZ), Self::CA_GRADIENT)
            .expect("nonzero reference gradient")
    }

    /// Moment scaled by `k`, e.g. `k = 2` for a moment twice as large.
    pub fn scaled(&self, k: f64) -> Self {
        QuadrupoleCoupling { c: self.c * k }
    }

    pub fn alpha(&self, v0: f64) -> f64 {
        self.c * v0 / 4.0
    }

    /// Splitting between the two Kramers doublets of spin 3/2, rad/s.
    pub fn doublet_splitting(&self, v0: f64) -> f64 {
        2.0 * self.alpha(v0).abs()
    }

    /// Quadrupole tensor operator with the matching scale.
    pub fn tensor(&self, spin: Spin) -> QuadrupoleTensor {
        quadrupole_tensor(spin, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use std::f64::consts::PI;

    const S32: Spin = Spin::THREE_HALVES;

    #[test]
    fn principal_examples() {
        assert!(max_abs_diff(&principal_hamiltonian(1.0, S32), &real_diag(&[1.0, -1.0, -1.0, 1.0])) < 1e-14);
        assert!(principal_hamiltonian(2.5, Spin::HALF).iter().all(|z| z.norm() < 1e-15));
        assert!(principal_hamiltonian(0.0, S32).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn quadratic_potential_gradients() {
        let v0 = 3.0;
        let a = Matrix3::from_diagonal(&Vector3::new(v0 / 4.0, v0 / 4.0, -v0 / 2.0));
        let g = gradient_from_quadratic_potential(&a).unwrap();
        assert_eq!(g.mode(), GradientMode::Physical);
        assert!((g.matrix() - Matrix3::from_diagonal(&Vector3::new(-v0 / 2.0, -v0 / 2.0, v0))).amax() < 1e-15);

        let a = Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, v0 / 2.0));
        let g = gradient_from_quadratic_potential(&a).unwrap();
        assert_eq!(g.mode(), GradientMode::AxialOnly);
        assert!((g.matrix() - Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, -v0))).amax() < 1e-15);

        let mut bad = Matrix3::zeros();
        bad[(0, 1)] = 1.0;
        assert!(gradient_from_quadratic_potential(&bad).is_err());
        assert!(GradientTensor::new(Matrix3::identity(), GradientMode::Physical).is_err());
    }

    #[test]
    fn hamiltonian_from_gradient() {
        let v0 = 1.7;
        let q = quadrupole_tensor(S32, 1.0);
        let g = GradientTensor::new(
            Matrix3::from_diagonal(&Vector3::new(-v0 / 2.0, -v0 / 2.0, v0)),
            GradientMode::Physical,
        )
        .unwrap();
        let h = quadrupole_hamiltonian(&q, &g);
        assert!(max_abs_diff(&h, &principal_hamiltonian(v0 / 4.0, S32)) < 1e-14);

        let g = GradientTensor::new(Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, -v0)), GradientMode::AxialOnly)
            .unwrap();
        let h = quadrupole_hamiltonian(&q, &g);
        assert!(max_abs_diff(&h, &principal_hamiltonian(-v0 / 6.0, S32)) < 1e-14);

        let zero = GradientTensor::new(Matrix3::zeros(), GradientMode::Physical).unwrap();
        assert!(quadrupole_hamiltonian(&q, &zero).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn lab_hamiltonian_limits() {
        let hp = principal_hamiltonian(1.3, S32);
        for phi in [0.0, 0.4, 2.0] {
            assert!(max_abs_diff(&lab_hamiltonian(1.3, S32, 0.0, phi), &hp) < 1e-14);
            assert!(max_abs_diff(&lab_hamiltonian(1.3, S32, PI, phi), &hp) < 1e-13);
        }
        let (spec, _) = eigensystem(&lab_hamiltonian(1.0, S32, 0.7, 1.9), DEFAULT_DEGENERACY_TOL).unwrap();
        let v = spec.values();
        for (a, b) in v.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_axis_matches_wigner_conjugation() {
        let (th, ph) = (0.9, 2.3);
        let ops = spin_operators(S32);
        let d = lab_rotation(S32, th, ph);
        let lhs = &d * &ops.sz * d.adjoint();
        assert!(max_abs_diff(&lhs, &ops.along(principal_axis(th, ph))) < 1e-13);
    }

    #[test]
    fn zeeman_examples() {
        assert!(zeeman_term(0.0, S32).iter().all(|z| z.norm() == 0.0));
        let (spec, _) = eigensystem(&zeeman_term(0.3, S32), DEFAULT_DEGENERACY_TOL).unwrap();
        for (a, b) in spec.values().iter().zip([0.45, 0.15, -0.15, -0.45]) {
            assert!((a - b).abs() < 1e-14);
        }
        let h = principal_hamiltonian(1.0, S32) + zeeman_term(0.01, S32);
        let (spec, _) = eigensystem(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((spec.energies[0].value - spec.energies[1].value - 0.03).abs() < 1e-14);
        assert_eq!(spec.energies[0].label, 1.5);
        assert_eq!(spec.energies[1].label, -1.5);
    }

    #[test]
    fn eigensystem_examples() {
        let (spec, vecs) = eigensystem(&principal_hamiltonian(1.0, S32), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(spec.values(), vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(spec.degenerate_groups, vec![vec![0, 1], vec![2, 3]]);
        let labels: Vec<f64> = spec.energies.iter().map(|e| e.label).collect();
        assert_eq!(labels, vec![1.5, -1.5, 0.5, -0.5]);
        assert!(crate::linalg::unitarity_defect(&vecs) < 1e-13);

        let (spec, _) = eigensystem(&CMatrix::identity(4, 4), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(spec.degenerate_groups, vec![vec![0, 1, 2, 3]]);
        assert_eq!(spec.min_group_gap(), 0.0);

        let (spec, _) = eigensystem(&real_diag(&[1.0, 2.0, 3.0, 4.0]), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(spec.degenerate_groups.len(), 4);
        assert_eq!(spec.values(), vec![4.0, 3.0, 2.0, 1.0]);

        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(eigensystem(&bad, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn family_matches_direct_construction() {
        let fam = QuadrupoleFamily::with_zeeman(S32, 1.0, 0.8, 0.05, ZeemanAxis::Principal);
        for phi in [0.0, 1.0, 4.0] {
            let direct = lab_hamiltonian(1.0, S32, 0.8, phi) + zeeman_along(0.05, S32, principal_axis(0.8, phi));
            assert!(max_abs_diff(&fam.at(phi), &direct) < 1e-13);
        }
        let fam = QuadrupoleFamily::with_zeeman(S32, 1.0, 0.8, 0.05, ZeemanAxis::Lab);
        let direct = lab_hamiltonian(1.0, S32, 0.8, 2.2) + zeeman_term(0.05, S32);
        assert!(max_abs_diff(&fam.at(2.2), &direct) < 1e-13);
        let fam = QuadrupoleFamily::with_zeeman(S32, 1.0, 0.8, 0.05, ZeemanAxis::Principal);
        assert_eq!(fam.rank_of_label(1.5, 1e-9).unwrap(), 0);
        assert_eq!(fam.rank_of_label(-1.5, 1e-9).unwrap(), 1);
        assert_eq!(fam.rank_of_label(0.5, 1e-9).unwrap(), 2);
    }

    #[test]
    fn coupling_anchors() {
        let ca = QuadrupoleCoupling::calcium();
        let s = ca.doublet_splitting(QuadrupoleCoupling::CA_GRADIENT);
        assert!((crate::units::rad_per_s_to_hz(s) - 150.0).abs() < 1e-9);
        let ba = ca.scaled(2.0);
        assert!((crate::units::rad_per_s_to_hz(ba.doublet_splitting(QuadrupoleCoupling::CA_GRADIENT)) - 300.0).abs() < 1e-9);
    }
}
