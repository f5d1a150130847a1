//! Closed-form Berry phases of the rotating spin-3/2 quadrupole and the
//! energy shifts they induce.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::LabelledEnergy;

/// State labels in basis order.
pub const LABELS: [f64; 4] = [1.5, 0.5, -0.5, -1.5];

/// Geometric phases per state label, unwrapped, zero at θ = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSet {
    pub theta: f64,
    /// `(m, γ(m))` in the order 3/2, 1/2, −1/2, −3/2.
    pub gamma: Vec<(f64, f64)>,
}

impl PhaseSet {
    pub fn get(&self, m: f64) -> Option<f64> {
        self.gamma.iter().find(|(l, _)| (l - m).abs() < 1e-12).map(|&(_, g)| g)
    }

    pub fn values(&self) -> Vec<f64> {
        self.gamma.iter().map(|&(_, g)| g).collect()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid(format!("tilt angle {theta} rad lies outside [0, π]")));
    }
    Ok(())
}

/// `√(4 − 3cos²θ) − 1`, the reduced phase of the |±1/2⟩ doublet.
fn inner_root(theta: f64) -> f64 {
    let c = theta.cos();
    (4.0 - 3.0 * c * c).sqrt() - 1.0
}

/// The four Berry phases of the degenerate doublets:
///
/// ```text
/// γ(±3/2) = ∓3π(cosθ − 1)
/// γ(±1/2) = ∓π(√(4 − 3cos²θ) − 1)
/// ```
pub fn closed_form_phases(theta: f64) -> Result<PhaseSet> {
    check_theta(theta)?;
    let outer = 3.0 * PI * (theta.cos() - 1.0);
    let inner = PI * inner_root(theta);
    Ok(PhaseSet {
        theta,
        gamma: vec![(1.5, -outer), (0.5, -inner), (-0.5, inner), (-1.5, outer)],
    })
}

/// Phase of a single non-degenerate state `|m⟩` carried around the cone:
/// `−2πm(cosθ − 1)`. For the |±1/2⟩ pair this is `∓π(cosθ − 1)`.
pub fn single_state_phase(theta: f64, m: f64) -> f64 {
    -2.0 * PI * m * (theta.cos() - 1.0)
}

/// Sign convention for the phase-induced shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConvention {
    /// `E = E⁰ + γ/T`, from propagating with `exp(+i∫E dt)`.
    #[default]
    Positive,
    /// `E = E⁰ − γ/T`, from `exp(−iEt)`; this is what Floquet quasi-energies carry.
    Standard,
}

/// Unperturbed energy of label `m` for `α(Sz'² − 5/4)`.
pub fn unshifted_energy(alpha: f64, m: f64) -> f64 {
    alpha * (m * m - 1.25)
}

/// Shifted energies `E⁰(m) ± γ(m)/T`, in label order 3/2, 1/2, −1/2, −3/2.
pub fn energy_shift_spectrum(alpha: f64, theta: f64, period: f64, convention: PhaseConvention) -> Result<Vec<LabelledEnergy>> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::invalid(format!("period must be positive and finite, got {period}")));
    }
    let sign = match convention {
        PhaseConvention::Positive => 1.0,
        PhaseConvention::Standard => -1.0,
    };
    Ok(closed_form_phases(theta)?
        .gamma
        .into_iter()
        .map(|(m, g)| LabelledEnergy {
            label: m,
            value: unshifted_energy(alpha, m) + sign * g / period,
        })
        .collect())
}

/// Splittings `|2γ(m)|/T` of the (3/2, −3/2) and (1/2, −1/2) doublets.
pub fn doublet_splittings(theta: f64, period: f64) -> Result<[f64; 2]> {
    let e = energy_shift_spectrum(0.0, theta, period, PhaseConvention::Positive)?;
    Ok([(e[0].value - e[3].value).abs(), (e[1].value - e[2].value).abs()])
}
