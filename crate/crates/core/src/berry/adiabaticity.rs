//! The adiabaticity criterion `ω ≪ gap`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hamiltonian::{eigensystem, QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use crate::spin::Spin;

pub const DEFAULT_ADIABATIC_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    pub omega: f64,
    pub gap: f64,
    /// `ω / gap`.
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
    pub diagnostic: Option<String>,
}

/// Compare a rotation frequency against a given gap (both rad/s).
///
/// Passes when `ratio ≤ threshold`, so a ratio equal to the threshold counts
/// as adiabatic.
pub fn adiabaticity_from_gap(gap: f64, omega: f64, threshold: f64) -> AdiabaticityReport {
    if omega == 0.0 {
        return AdiabaticityReport {
            omega,
            gap,
            ratio: 0.0,
            threshold,
            pass: true,
            diagnostic: None,
        };
    }
    if !(gap > 0.0) {
        return AdiabaticityReport {
            omega,
            gap,
            ratio: f64::INFINITY,
            threshold,
            pass: false,
            diagnostic: Some(
                "spectrum has no gap between distinct levels; degenerate states need the Wilczek-Zee holonomy".into(),
            ),
        };
    }
    let ratio = omega / gap;
    let pass = ratio <= threshold * (1.0 + 1e-12);
    AdiabaticityReport {
        omega,
        gap,
        ratio,
        threshold,
        pass,
        diagnostic: (!pass).then(|| format!("rotation is {ratio:.3e} of the gap, above the threshold {threshold:.3e}")),
    }
}

/// Adiabaticity of the spin-3/2 quadrupole with an optional Zeeman term.
///
/// The gap is the smallest separation between distinct degenerate groups of
/// `H_tilt + Zeeman`; a Kramers doublet counts as a single level.
pub fn adiabaticity_check(
    alpha: f64,
    theta: f64,
    omega: f64,
    epsilon: f64,
    axis: ZeemanAxis,
    threshold: f64,
) -> Result<AdiabaticityReport> {
    if !(omega >= 0.0) {
        return Err(crate::error::Error::invalid(format!("rotation frequency must be non-negative, got {omega}")));
    }
    let fam = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, alpha, theta, epsilon, axis);
    let (spec, _) = eigensystem(fam.h_tilt(), DEFAULT_DEGENERACY_TOL)?;
    Ok(adiabaticity_from_gap(spec.min_group_gap(), omega, threshold))
}
