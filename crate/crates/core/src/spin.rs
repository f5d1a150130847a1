//! Spin operators, Wigner rotation matrices and the Cartesian quadrupole
//! tensor operator.
//!
//! Conventions used everywhere in the crate:
//!
//! * ħ = 1; spin matrices are dimensionless.
//! * Basis ordering is descending magnetic quantum number, `m = j, j-1, …, -j`,
//!   so row/column 0 is `|j⟩`.
//! * Euler angles are z–y–z and rotations are active:
//!   `D(φ,θ,χ) = exp(-iφ Sz) · exp(-iθ Sy) · exp(-iχ Sz)`, which satisfies
//!   `D S_i D† = Σ_k R_ki S_k` with `R = R_z(φ) R_y(θ) R_z(χ)`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{anticommutator, real_diag, CMatrix, C64};

/// A spin quantum number `j`, stored as the integer `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };
    pub const THREE_HALVES: Spin = Spin { twice: 3 };

    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Spin {
            twice: twice.round() as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Self {
        Spin { twice }
    }

    pub fn j(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.j();
        j * (j + 1.0)
    }

    /// Magnetic quantum numbers in basis order: `j, j-1, …, -j`.
    pub fn m_values(self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.j() - k as f64).collect()
    }

    /// Basis index of magnetic quantum number `m`.
    pub fn index_of(self, m: f64) -> Result<usize> {
        let k = self.j() - m;
        if k < -1e-9 || k > self.twice as f64 + 1e-9 || (k - k.round()).abs() > 1e-9 {
            return Err(Error::invalid(format!("m = {m} is not a state of spin j = {}", self.j())));
        }
        Ok(k.round() as usize)
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;
    fn try_from(j: f64) -> Result<Self> {
        Spin::new(j)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.j()
    }
}

/// The three spin component matrices of dimension 2j+1.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub spin: Spin,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl SpinOps {
    /// Component `k` (0 = x, 1 = y, 2 = z).
    pub fn component(&self, k: usize) -> &CMatrix {
        match k {
            0 => &self.sx,
            1 => &self.sy,
            2 => &self.sz,
            _ => panic!("spin component index {k} out of range"),
        }
    }

    /// `S⁺ = Sx + i Sy`.
    pub fn raising(&self) -> CMatrix {
        &self.sx + self.sy.map(|z| z * C64::new(0.0, 1.0))
    }

    /// `n̂·S` for a (not necessarily unit) real vector.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        self.sx.scale(n[0]) + self.sy.scale(n[1]) + self.sz.scale(n[2])
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.spin.dim(), self.spin.dim())
    }
}

/// Build `Sx, Sy, Sz` from ladder matrix elements `√(j(j+1) − m(m+1))`.
pub fn spin_operators(spin: Spin) -> SpinOps {
    let d = spin.dim();
    let m = spin.m_values();
    let c = spin.casimir();
    let mut raise = CMatrix::zeros(d, d);
    // S+|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩; |m+1⟩ sits one row above |m⟩
    for k in 1..d {
        raise[(k - 1, k)] = C64::new((c - m[k] * (m[k] + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower).scale(0.5);
    let sy = (&raise - &lower).map(|z| z * C64::new(0.0, -0.5));
    let sz = real_diag(&m);
    SpinOps { spin, sx, sy, sz }
}

/// z–y–z Euler angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub chi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, chi: f64) -> Self {
        EulerAngles { phi, theta, chi }
    }

    /// The angles used for the lab frame: polar tilt `theta`, azimuth `phi`, no third rotation.
    pub fn tilt(phi: f64, theta: f64) -> Self {
        EulerAngles { phi, theta, chi: 0.0 }
    }

    /// Active 3×3 rotation `R_z(φ) R_y(θ) R_z(χ)`.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        rot_z(self.phi) * rot_y(self.theta) * rot_z(self.chi)
    }
}

pub fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Wigner small-d matrix `d(θ) = exp(-iθ Sy)`, from the explicit factorial sum.
///
/// Entries are real; the element in row `m'` and column `m` is
/// `⟨j m'| exp(-iθ Sy) |j m⟩`.
pub fn wigner_small_d(spin: Spin, theta: f64) -> CMatrix {
    let d = spin.dim();
    let tj = spin.twice as i64;
    let fact = factorials(spin.twice as usize + 1);
    let (s, c) = (0.5 * theta).sin_cos();
    // work with integer offsets a = j + m so every factorial argument is integral
    CMatrix::from_fn(d, d, |row, col| {
        let ap = tj - 2 * row as i64; // 2m'
        let a = tj - 2 * col as i64; // 2m
        let jp_mp = ((tj + ap) / 2) as usize;
        let jm_mp = ((tj - ap) / 2) as usize;
        let jp_m = ((tj + a) / 2) as usize;
        let jm_m = ((tj - a) / 2) as usize;
        let diff = (ap - a) / 2; // m' - m
        let pref = (fact[jp_mp] * fact[jm_mp] * fact[jp_m] * fact[jm_m]).sqrt();
        let kmin = 0.max(-diff);
        let kmax = (jp_m as i64).min(jm_mp as i64);
        let mut sum = 0.0;
        for k in kmin..=kmax {
            let d1 = jp_m as i64 - k;
            let d2 = jm_mp as i64 - k;
            let d3 = k + diff;
            if d1 < 0 || d2 < 0 || d3 < 0 {
                continue;
            }
            let sign = if (k + diff) % 2 == 0 { 1.0 } else { -1.0 };
            let cos_pow = (tj - 2 * k - diff) as i32;
            let sin_pow = (2 * k + diff) as i32;
            sum += sign * c.powi(cos_pow) * s.powi(sin_pow)
                / (fact[d1 as usize] * fact[k as usize] * fact[d2 as usize] * fact[d3 as usize]);
        }
        C64::new(pref * sum, 0.0)
    })
}

/// Full Wigner rotation `exp(-iφ Sz) · d(θ) · exp(-iχ Sz)`.
pub fn wigner_d(spin: Spin, angles: EulerAngles) -> CMatrix {
    let m = spin.m_values();
    let small = wigner_small_d(spin, angles.theta);
    CMatrix::from_fn(spin.dim(), spin.dim(), |r, c| {
        small[(r, c)] * C64::from_polar(1.0, -angles.phi * m[r] - angles.chi * m[c])
    })
}

/// Cartesian quadrupole operators
/// `Q_ij = c (½{S_i, S_j} − ⅓ δ_ij S²)`.
#[derive(Debug, Clone)]
pub struct QuadrupoleTensor {
    pub spin: Spin,
    pub c: f64,
    components: Vec<CMatrix>,
}

impl QuadrupoleTensor {
    pub fn get(&self, i: usize, j: usize) -> &CMatrix {
        &self.components[3 * i + j]
    }

    /// Σ_i Q_ii.
    pub fn trace(&self) -> CMatrix {
        self.get(0, 0) + self.get(1, 1) + self.get(2, 2)
    }
}

pub fn quadrupole_tensor(spin: Spin, c: f64) -> QuadrupoleTensor {
    let ops = spin_operators(spin);
    let s2 = ops.identity().scale(spin.casimir());
    let mut components = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let mut q = anticommutator(ops.component(i), ops.component(j)).scale(0.5);
            if i == j {
                q -= s2.scale(1.0 / 3.0);
            }
            components.push(q.scale(c));
        }
    }
    QuadrupoleTensor {
        spin,
        c,
        components,
    }
}
