//! Geometric phases by four routes: closed form, Wilson loops, Wilczek–Zee
//! holonomies and direct time evolution.

pub mod adiabaticity;
pub mod closed_form;
pub mod crossover;
pub mod dynamics;
pub mod loops;

pub use adiabaticity::{adiabaticity_check, adiabaticity_from_gap, AdiabaticityReport, DEFAULT_ADIABATIC_THRESHOLD};
pub use closed_form::{closed_form_phases, doublet_splittings, energy_shift_spectrum, single_state_phase, PhaseConvention, PhaseSet};
pub use crossover::{crossover_table, CrossoverConfig, CrossoverRow, Regime};
pub use dynamics::{
    adiabatic_evolve, floquet_quasienergies, floquet_quasienergies_of, one_period_propagator, quasienergies_from_propagator,
    quasienergy_mismatch, rotating_frame_quasienergies, shifted_spectrum_residual, subspace_evolve, EvolutionResult, EvolveOptions, FnHamiltonian,
    Integrator, RotatingQuadrupole, SubspaceEvolution, TimeDependentHamiltonian, TracePoint,
};
pub use loops::{wilson_loop_from_states, wilson_loop_phase, wz_holonomy, HolonomyOptions, HolonomyResult, LoopPath};
