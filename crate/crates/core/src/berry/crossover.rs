//! Sweep of the symmetry-breaking field strength ε at fixed tilt and rotation
//! rate, following the |±1/2⟩ doublet from the degenerate (matrix-valued)
//! regime to the split (single-state) regime.

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::berry::closed_form::{closed_form_phases, single_state_phase};
use crate::berry::dynamics::{adiabatic_evolve, EvolveOptions, Integrator, RotatingQuadrupole};
use crate::berry::loops::{wilson_loop_phase, LoopPath};
use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use crate::linalg::phase_factor_distance;
use crate::spin::Spin;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverConfig {
    pub alpha: f64,
    pub theta: f64,
    pub omega: f64,
    pub epsilons: Vec<f64>,
    pub axes: Vec<ZeemanAxis>,
    /// Samples of the static Wilson loop.
    pub loop_steps: usize,
    /// Time steps per rotation period for the dynamical runs.
    pub steps_per_period: usize,
    pub integrator: Integrator,
}

impl CrossoverConfig {
    /// Sweep with a step count that keeps `α Δt` near 2π/200.
    pub fn new(alpha: f64, theta: f64, omega: f64, epsilons: Vec<f64>) -> Self {
        let steps = ((200.0 * alpha.abs() / omega).ceil() as usize).max(1000);
        CrossoverConfig {
            alpha,
            theta,
            omega,
            epsilons,
            axes: vec![ZeemanAxis::Principal, ZeemanAxis::Lab],
            loop_steps: 4000,
            steps_per_period: steps,
            integrator: Integrator::Midpoint,
        }
    }
}

/// Which ordering of scales a row sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// ε is not large against ω (ω/ε > 10⁻²).
    NearDegenerate,
    /// ω ≪ ε ≪ α (ω/ε ≤ 10⁻², ε/α ≤ 10⁻¹).
    Split,
    /// ε is comparable to α.
    StrongField,
}

impl Regime {
    pub fn classify(alpha: f64, omega: f64, epsilon: f64) -> Self {
        if omega / epsilon > 1e-2 {
            Regime::NearDegenerate
        } else if epsilon / alpha.abs() <= 0.1 {
            Regime::Split
        } else {
            Regime::StrongField
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub epsilon: f64,
    pub axis: ZeemanAxis,
    pub regime: Regime,
    /// Static Wilson-loop phases of the upper (+) and lower (−) member of the doublet.
    pub static_plus: f64,
    pub static_minus: f64,
    /// Geometric phases from one period of evolution.
    pub dynamic_plus: f64,
    pub dynamic_minus: f64,
    pub fidelity_plus: f64,
    pub fidelity_minus: f64,
    /// Largest phase-factor distance of the dynamical phases from `∓π(cosθ − 1)`.
    pub split_error: f64,
    /// Largest phase-factor distance of the dynamical phases from `∓π(√(4 − 3cos²θ) − 1)`.
    pub degenerate_error: f64,
}

/// Ranks of the |±1/2⟩ doublet members, higher energy first.
fn half_doublet_ranks(family: &QuadrupoleFamily) -> Result<[usize; 2]> {
    let spec = family.reference_spectrum(DEFAULT_DEGENERACY_TOL)?;
    let ranks: Vec<usize> = spec
        .energies
        .iter()
        .enumerate()
        .filter(|(_, e)| (e.label.abs() - 0.5).abs() < 1e-9)
        .map(|(k, _)| k)
        .collect();
    match ranks.as_slice() {
        [a, b] => Ok([*a.min(b), *a.max(b)]),
        _ => Err(Error::invalid("could not identify the |±1/2⟩ doublet")),
    }
}

fn row(cfg: &CrossoverConfig, epsilon: f64, axis: ZeemanAxis) -> Result<CrossoverRow> {
    let family = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, cfg.alpha, cfg.theta, epsilon, axis);
    let ranks = half_doublet_ranks(&family)?;
    let path = LoopPath::uniform(cfg.theta, cfg.loop_steps)?;
    let drive = RotatingQuadrupole::new(family.clone(), cfg.omega)?;
    let (_, vecs) = eigensystem(family.h_tilt(), DEFAULT_DEGENERACY_TOL)?;
    let opts = EvolveOptions {
        integrator: cfg.integrator,
        ..EvolveOptions::default()
    };
    let mut stat = [0.0; 2];
    let mut dynamic = [0.0; 2];
    let mut fid = [0.0; 2];
    for (k, &r) in ranks.iter().enumerate() {
        stat[k] = wilson_loop_phase(&family, &path, r, DEFAULT_DEGENERACY_TOL)?;
        let psi0 = vecs.column(r).into_owned();
        let ev = adiabatic_evolve(&drive, &psi0, drive.period(), cfg.steps_per_period, &opts)?;
        dynamic[k] = ev.geometric_phase;
        fid[k] = ev.fidelity_to_initial_eigenstate;
    }
    // the upper member of the split doublet continues |+1/2⟩ for ε > 0
    let split = [single_state_phase(cfg.theta, 0.5), single_state_phase(cfg.theta, -0.5)];
    let cf = closed_form_phases(cfg.theta)?;
    let degenerate = [cf.get(0.5).unwrap(), cf.get(-0.5).unwrap()];
    let dist = |target: [f64; 2]| (0..2).map(|k| phase_factor_distance(dynamic[k], target[k])).fold(0.0, f64::max);
    let out = CrossoverRow {
        epsilon,
        axis,
        regime: Regime::classify(cfg.alpha, cfg.omega, epsilon),
        static_plus: stat[0],
        static_minus: stat[1],
        dynamic_plus: dynamic[0],
        dynamic_minus: dynamic[1],
        fidelity_plus: fid[0],
        fidelity_minus: fid[1],
        split_error: dist(split),
        degenerate_error: dist(degenerate),
    };
    info!(
        "crossover ε = {:.3e} ({:?} axis, {:?}): ω/ε = {:.1e}, ε/α = {:.1e}, split error {:.2e}, degenerate error {:.2e}",
        epsilon,
        axis,
        out.regime,
        cfg.omega / epsilon,
        epsilon / cfg.alpha.abs(),
        out.split_error,
        out.degenerate_error
    );
    Ok(out)
}

/// One row per (ε, axis), ordered by axis then ε as given.
pub fn crossover_table(cfg: &CrossoverConfig) -> Result<Vec<CrossoverRow>> {
    if cfg.epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::invalid("every ε in the sweep must be positive"));
    }
    if !(cfg.omega > 0.0) {
        return Err(Error::invalid("rotation frequency must be positive"));
    }
    let jobs: Vec<(ZeemanAxis, f64)> = cfg
        .axes
        .iter()
        .flat_map(|&a| cfg.epsilons.iter().map(move |&e| (a, e)))
        .collect();
    jobs.par_iter().map(|&(axis, eps)| row(cfg, eps, axis)).collect()
}
