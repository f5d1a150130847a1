//! Discrete Berry phases on closed loops: the Wilson loop for single bands and
//! the Wilczek–Zee holonomy for degenerate subspaces.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, ParametricHamiltonian, SpectrumRecord};
use crate::linalg::{max_abs_diff, polar_unitary, unitary_eigenphases, CMatrix, CVector, C64};

const CLOSURE_TOL: f64 = 1e-10;

/// Uniformly sampled loop `φ: 0 → 2π` at fixed tilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopPath {
    pub theta: f64,
    /// `n_steps + 1` strictly increasing values; the last one closes the loop.
    pub samples: Vec<f64>,
}

impl LoopPath {
    pub fn uniform(theta: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::invalid("a loop needs at least one step"));
        }
        let samples = (0..=n_steps).map(|k| 2.0 * PI * k as f64 / n_steps as f64).collect();
        Ok(LoopPath { theta, samples })
    }

    pub fn n_steps(&self) -> usize {
        self.samples.len() - 1
    }

    fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::invalid("a loop needs at least one step"));
        }
        if self.samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("loop samples must be strictly increasing"));
        }
        Ok(())
    }
}

/// Unitary holonomy on a subspace and its eigenphases.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolonomyResult {
    /// Positions (descending-energy ranks) of the subspace.
    pub subspace_indices: Vec<usize>,
    /// Holonomy matrix in the basis of the first sample; eigenvalues `exp(iγ)`.
    #[serde(skip)]
    pub matrix: CMatrix,
    /// Ascending, each in (−π, π].
    pub eigenphases: Vec<f64>,
    pub n_steps: usize,
}

fn check_closed<F: ParametricHamiltonian + ?Sized>(family: &F, path: &LoopPath) -> Result<()> {
    let first = family.at(path.samples[0]);
    let last = family.at(*path.samples.last().unwrap());
    let scale = first.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mismatch = max_abs_diff(&first, &last);
    if mismatch > CLOSURE_TOL * scale {
        return Err(Error::OpenLoop { mismatch });
    }
    Ok(())
}

/// Eigensystems at every sample except the closing one.
fn sample_spectra<F: ParametricHamiltonian + ?Sized>(
    family: &F,
    path: &LoopPath,
    tol: f64,
) -> Result<Vec<(SpectrumRecord, CMatrix)>> {
    path.validate()?;
    check_closed(family, path)?;
    let n = path.n_steps();
    path.samples[..n]
        .par_iter()
        .map(|&phi| eigensystem(&family.at(phi), tol))
        .collect()
}

/// `−arg Π_k ⟨n_k|n_{k+1}⟩` with `n_N = n_0`, for an explicit list of states.
///
/// Independent of the phase of every individual state.
pub fn wilson_loop_from_states(states: &[CVector]) -> f64 {
    let n = states.len();
    let mut prod = C64::new(1.0, 0.0);
    for k in 0..n {
        let z = states[k].dotc(&states[(k + 1) % n]);
        prod *= z / z.norm().max(1e-300);
    }
    -prod.arg()
}

/// Berry phase of band `band` (rank in descending energy order), principal value.
///
/// The band must be non-degenerate at every sample; otherwise the caller is
/// directed to [`wz_holonomy`].
pub fn wilson_loop_phase<F: ParametricHamiltonian + ?Sized>(
    family: &F,
    path: &LoopPath,
    band: usize,
    tol: f64,
) -> Result<f64> {
    if band >= family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: band + 1,
        });
    }
    let spectra = sample_spectra(family, path, tol)?;
    let mut states = Vec::with_capacity(spectra.len());
    for (k, (spec, vecs)) in spectra.iter().enumerate() {
        let group = spec.group_of(band).expect("groups are exhaustive");
        if group.len() > 1 {
            let v = spec.values();
            let gap = group.iter().filter(|&&i| i != band).map(|&i| (v[i] - v[band]).abs()).fold(f64::INFINITY, f64::min);
            return Err(Error::DegenerateBand { band, sample: k, gap });
        }
        states.push(vecs.column(band).into_owned());
    }
    Ok(wilson_loop_from_states(&states))
}

/// Options for [`wz_holonomy`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HolonomyOptions {
    /// Re-unitarize every overlap matrix instead of only the final product.
    pub per_step_polar: bool,
}

/// Wilczek–Zee holonomy of the degenerate subspace spanned by the bands `group`.
///
/// The path-ordered product `W = Π_k V_k† V_{k+1}` of subspace overlap matrices
/// is re-unitarized by polar decomposition; the reported matrix is `polar(W)†`,
/// whose eigenvalues are `exp(iγ)`.
pub fn wz_holonomy<F: ParametricHamiltonian + ?Sized>(
    family: &F,
    path: &LoopPath,
    group: &[usize],
    tol: f64,
    opts: HolonomyOptions,
) -> Result<HolonomyResult> {
    let dim = family.dim();
    if group.is_empty() || group.len() > dim || group.iter().any(|&g| g >= dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: group.len(),
        });
    }
    let spectra = sample_spectra(family, path, tol)?;
    let frames: Vec<CMatrix> = spectra
        .iter()
        .enumerate()
        .map(|(k, (spec, vecs))| {
            let v = spec.values();
            let scale = v.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
            let (lo, hi) = group.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(v[g]), hi.max(v[g])));
            if hi - lo > tol * scale {
                return Err(Error::DegeneracyLifted {
                    group: group.to_vec(),
                    sample: k,
                    spread: hi - lo,
                });
            }
            Ok(CMatrix::from_fn(dim, group.len(), |r, c| vecs[(r, group[c])]))
        })
        .collect::<Result<_>>()?;

    let n = frames.len();
    let mut w = CMatrix::identity(group.len(), group.len());
    for k in 0..n {
        let mut overlap = frames[k].adjoint() * &frames[(k + 1) % n];
        if opts.per_step_polar {
            overlap = polar_unitary(&overlap);
        }
        w *= overlap;
    }
    let matrix = polar_unitary(&w).adjoint();
    let mut eigenphases = unitary_eigenphases(&matrix)?;
    eigenphases.sort_by(f64::total_cmp);
    Ok(HolonomyResult {
        subspace_indices: group.to_vec(),
        matrix,
        eigenphases,
        n_steps: path.n_steps(),
    })
}
