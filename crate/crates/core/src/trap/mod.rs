//! Electrostatics of the four-rod endcap trap: the ideal rotating parabola,
//! a finite-difference solver for the real electrode geometry, field traces,
//! potential fits and the effective tilt angle.

pub mod analytic;
pub mod export;
pub mod fit;
pub mod laplace;
pub mod model;
pub mod theta;
pub mod trace;

pub use analytic::{alpha_for_tilted, analytic_field_at, principal_gradient, tilted_gradient_tensor};
pub use fit::{fit_diagonal_potential, polyfit, PolyFitReport};
pub use laplace::{laplace_solve, solve_dirichlet, DirichletProblem, GridSpec, PairBasis, PotentialGrid, SolverOptions};
pub use model::{EndcapPair, Rod, StaticElectrode, TrapModel};
pub use theta::{effective_theta_from_tensor, extract_effective_theta, local_gradient_tensor};
pub use trace::{field_trace, FieldSample, FieldSource, FieldTrace, MIN_TRACE_SAMPLES};
