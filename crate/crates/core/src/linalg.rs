//! Small dense complex linear algebra used throughout the crate.
//!
//! All matrices here are tiny (dimension 2j+1 ≤ 10 in practice), so the
//! helpers favour exactness properties (unitarity, Hermiticity) over speed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Largest elementwise deviation `|a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Max-norm distance between two matrices of the same shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |U U^dagger - 1|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u * u.adjoint()), &CMatrix::identity(n, n))
}

/// Symmetrize a nearly-Hermitian matrix: `(H + H^dagger)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
pub fn eigh(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(h.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(
        Error::NonConvergence {
            what: "Hermitian eigensolver",
            iterations: EIG_MAX_ITER,
            residual: f64::NAN,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `exp(-i H t)` for Hermitian `H`, exactly unitary up to rounding.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let (values, vectors) = eigh(h)?;
    let phases = CVector::from_iterator(
        values.len(),
        values.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    );
    let mut scaled = vectors.clone();
    for (c, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[c];
    }
    Ok(scaled * vectors.adjoint())
}

/// Closest unitary matrix in Frobenius norm (polar factor `U V^dagger` of the SVD).
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

/// Eigenvalues of a (normal) unitary matrix via complex Schur form.
pub fn unitary_eigenvalues(u: &CMatrix) -> Result<Vec<C64>> {
    let n = u.nrows();
    let schur = Schur::try_new(u.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(Error::NonConvergence {
        what: "complex Schur decomposition",
        iterations: EIG_MAX_ITER,
        residual: f64::NAN,
    })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|k| t[(k, k)]).collect())
}

/// Arguments of the eigenvalues of a unitary matrix, each in (-π, π].
pub fn unitary_eigenphases(u: &CMatrix) -> Result<Vec<f64>> {
    Ok(unitary_eigenvalues(u)?
        .into_iter()
        .map(|z| wrap_phase(z.arg()))
        .collect())
}

/// Reduce an angle into (-π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// `|e^{ia} - e^{ib}|`, the branch-free way to compare phases.
pub fn phase_factor_distance(a: f64, b: f64) -> f64 {
    (C64::from_polar(1.0, a) - C64::from_polar(1.0, b)).norm()
}

/// Shift `x` by a multiple of 2π so that it lands nearest to `guide`.
pub fn unwrap_toward(x: f64, guide: f64) -> f64 {
    guide + wrap_phase(x - guide)
}

/// Reduce `x` modulo `period` into (-period/2, period/2].
pub fn reduce_symmetric(x: f64, period: f64) -> f64 {
    let y = (x + 0.5 * period).rem_euclid(period) - 0.5 * period;
    if y <= -0.5 * period {
        y + period
    } else {
        y
    }
}

/// Real diagonal matrix promoted to complex.
pub fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::new(v, 0.0)),
    ))
}

/// Expectation value `<v|A|v>` (real part), `v` assumed normalized.
pub fn expectation(a: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(a * v)).re
}

/// Fix the global phase of a vector so its largest-magnitude component is real positive.
pub fn canonical_phase(v: &mut CVector) {
    let mut best = 0;
    let mut mag = -1.0;
    for (k, z) in v.iter().enumerate() {
        // strict > with a tiny margin keeps the choice stable under rounding ties
        if z.norm() > mag + 1e-12 {
            mag = z.norm();
            best = k;
        }
    }
    if mag > 0.0 {
        let ph = v[best] / v[best].norm();
        *v /= ph;
    }
}
