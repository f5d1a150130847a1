//! Time stepping of the Schrödinger equation, adiabatic phase extraction and
//! Floquet quasi-energies of the rotating quadrupole.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::berry::closed_form::{energy_shift_spectrum, PhaseConvention};
use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, ParametricHamiltonian, QuadrupoleFamily, DEFAULT_DEGENERACY_TOL};
use crate::linalg::{commutator, eigh, expm_hermitian, reduce_symmetric, unitary_eigenphases, unwrap_toward, wrap_phase, CMatrix, CVector, C64, I};
use crate::spin::{spin_operators, Spin};

const SQRT3_OVER_6: f64 = 0.288_675_134_594_812_9;
const SQRT3_OVER_12: f64 = 0.144_337_567_297_406_44;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// `exp(−i H(t + Δt/2) Δt)`; second order.
    #[default]
    Midpoint,
    /// Two-node Gauss–Legendre Magnus expansion; fourth order.
    Magnus4,
}

/// Propagator for one step and the energies used for the dynamical phase.
pub struct StepData {
    pub unitary: CMatrix,
    /// Descending; quadrature average over the step.
    pub energies: Vec<f64>,
}

pub trait Stepper {
    fn step(&self, t: f64) -> Result<StepData>;
}

/// A Hamiltonian `H(t)` that can be stepped at a fixed Δt.
pub trait TimeDependentHamiltonian: Sync {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> CMatrix;
    fn stepper(&self, dt: f64, integrator: Integrator) -> Result<Box<dyn Stepper + '_>>;
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.reverse();
    v
}

/// Gauss–Legendre Magnus generator: `(H1 + H2)/2 − i(√3/12)Δt [H2, H1]`.
fn magnus_generator(h1: &CMatrix, h2: &CMatrix, dt: f64) -> CMatrix {
    (h1 + h2).scale(0.5) - commutator(h2, h1).map(|z| z * I * SQRT3_OVER_12 * dt)
}

struct GenericStepper<'a> {
    h: &'a dyn TimeDependentHamiltonian,
    dt: f64,
    integrator: Integrator,
}

impl Stepper for GenericStepper<'_> {
    fn step(&self, t: f64) -> Result<StepData> {
        let dt = self.dt;
        match self.integrator {
            Integrator::Midpoint => {
                let h = self.h.at(t + 0.5 * dt);
                let (values, _) = eigh(&h)?;
                Ok(StepData {
                    unitary: expm_hermitian(&h, dt)?,
                    energies: descending(values),
                })
            }
            Integrator::Magnus4 => {
                let tm = t + 0.5 * dt;
                let h1 = self.h.at(tm - SQRT3_OVER_6 * dt);
                let h2 = self.h.at(tm + SQRT3_OVER_6 * dt);
                let (e1, _) = eigh(&h1)?;
                let (e2, _) = eigh(&h2)?;
                let energies = descending(e1.iter().zip(&e2).map(|(a, b)| 0.5 * (a + b)).collect());
                Ok(StepData {
                    unitary: expm_hermitian(&magnus_generator(&h1, &h2, dt), dt)?,
                    energies,
                })
            }
        }
    }
}

/// Wraps a closure `t → H(t)`.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Sync> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnHamiltonian { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Sync> TimeDependentHamiltonian for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn at(&self, t: f64) -> CMatrix {
        (self.f)(t)
    }
    fn stepper(&self, dt: f64, integrator: Integrator) -> Result<Box<dyn Stepper + '_>> {
        Ok(Box::new(GenericStepper { h: self, dt, integrator }))
    }
}

/// The quadrupole family driven at constant angular velocity, `H(t) = H(φ = ωt)`.
///
/// Because `H(t) = R(ωt) H(0) R(ωt)†` with diagonal `R`, both integrators reduce
/// to one cached step unitary conjugated by diagonal phases, so each step costs
/// O(d²) instead of an eigendecomposition. The result is identical to stepping
/// the same integrator on the explicit `H(t)`.
#[derive(Debug, Clone)]
pub struct RotatingQuadrupole {
    pub family: QuadrupoleFamily,
    pub omega: f64,
}

impl RotatingQuadrupole {
    pub fn new(family: QuadrupoleFamily, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("rotation frequency must be positive, got {omega}")));
        }
        Ok(RotatingQuadrupole { family, omega })
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

struct RotatingStepper {
    m: Vec<f64>,
    omega: f64,
    dt: f64,
    cached: CMatrix,
    energies: Vec<f64>,
}

impl Stepper for RotatingStepper {
    fn step(&self, t: f64) -> Result<StepData> {
        let angle = self.omega * (t + 0.5 * self.dt);
        let p: Vec<C64> = self.m.iter().map(|&m| C64::from_polar(1.0, m * angle)).collect();
        let unitary = CMatrix::from_fn(self.cached.nrows(), self.cached.ncols(), |a, b| p[a] * self.cached[(a, b)] * p[b].conj());
        Ok(StepData {
            unitary,
            energies: self.energies.clone(),
        })
    }
}

impl TimeDependentHamiltonian for RotatingQuadrupole {
    fn dim(&self) -> usize {
        self.family.dim()
    }

    fn at(&self, t: f64) -> CMatrix {
        self.family.at(self.omega * t)
    }

    fn stepper(&self, dt: f64, integrator: Integrator) -> Result<Box<dyn Stepper + '_>> {
        let (values, _) = eigh(self.family.h_tilt())?;
        let cached = match integrator {
            Integrator::Midpoint => expm_hermitian(self.family.h_tilt(), dt)?,
            Integrator::Magnus4 => {
                let d = self.omega * SQRT3_OVER_6 * dt;
                expm_hermitian(&magnus_generator(&self.family.at(-d), &self.family.at(d), dt), dt)?
            }
        };
        Ok(Box::new(RotatingStepper {
            m: self.family.spin.m_values(),
            omega: self.omega,
            dt,
            cached,
            energies: descending(values),
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub integrator: Integrator,
    /// Final fidelities below this flag an adiabaticity violation.
    pub fidelity_floor: f64,
    pub degeneracy_tol: f64,
    /// Unwrap the geometric phase onto the 2π branch nearest this value.
    pub branch_hint: Option<f64>,
    /// Number of evenly spaced fidelity samples to record (0 disables the trace).
    pub trace_points: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            integrator: Integrator::Midpoint,
            fidelity_floor: 0.9,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            branch_hint: None,
            trace_points: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    /// Weight of the state in the tracked instantaneous eigenspace.
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionResult {
    #[serde(skip)]
    pub final_state: CVector,
    /// Rank (descending energy) of the tracked eigenstate.
    pub band: usize,
    /// `arg⟨n(0)|ψ(T)⟩`, in (−π, π].
    pub total_phase: f64,
    /// `−∫E_n dt` by the integrator's quadrature.
    pub dynamical_phase: f64,
    pub geometric_phase: f64,
    pub fidelity_to_initial_eigenstate: f64,
    pub adiabatic: bool,
    pub trace: Vec<TracePoint>,
}

/// Propagate `psi0` for one period and split the acquired phase into its
/// dynamical and geometric parts.
///
/// The tracked eigenstate is the eigenvector of `H(0)` with the largest overlap
/// with `psi0`; its rank in descending energy order selects the energy used in
/// the dynamical phase at every step.
pub fn adiabatic_evolve<H: TimeDependentHamiltonian + ?Sized>(
    h: &H,
    psi0: &CVector,
    period: f64,
    n_steps: usize,
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi0.len(),
        });
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("initial state is not normalized (norm {})", psi0.norm())));
    }
    if n_steps == 0 || !(period > 0.0) {
        return Err(Error::invalid("need n_steps ≥ 1 and a positive period"));
    }
    let (_, vecs0) = eigensystem(&h.at(0.0), opts.degeneracy_tol)?;
    let band = (0..h.dim())
        .max_by(|&a, &b| vecs0.column(a).dotc(psi0).norm().total_cmp(&vecs0.column(b).dotc(psi0).norm()))
        .expect("non-empty basis");
    let n0: CVector = vecs0.column(band).into_owned();

    let dt = period / n_steps as f64;
    let stepper = h.stepper(dt, opts.integrator)?;
    let stride = if opts.trace_points > 0 {
        (n_steps / opts.trace_points).max(1)
    } else {
        usize::MAX
    };
    let mut psi = psi0.clone();
    let mut dynamical = 0.0;
    let mut trace = Vec::new();
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let s = stepper.step(t)?;
        psi = &s.unitary * psi;
        dynamical -= s.energies[band] * dt;
        if (k + 1) % stride == 0 || (opts.trace_points > 0 && k + 1 == n_steps) {
            let t1 = t + dt;
            let (spec, vecs) = eigensystem(&h.at(t1), opts.degeneracy_tol)?;
            let group = spec.group_of(band).expect("groups are exhaustive");
            let fidelity = group.iter().map(|&g| vecs.column(g).dotc(&psi).norm_sqr()).sum();
            trace.push(TracePoint { t: t1, fidelity });
        }
    }
    let overlap = n0.dotc(&psi);
    let total = overlap.arg();
    let mut geometric = wrap_phase(total - dynamical);
    if let Some(hint) = opts.branch_hint {
        geometric = unwrap_toward(geometric, hint);
    }
    let fidelity = overlap.norm_sqr().min(1.0);
    Ok(EvolutionResult {
        final_state: psi,
        band,
        total_phase: total,
        dynamical_phase: dynamical,
        geometric_phase: geometric,
        fidelity_to_initial_eigenstate: fidelity,
        adiabatic: fidelity >= opts.fidelity_floor,
        trace,
    })
}

/// A degenerate subspace carried around one period.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceEvolution {
    /// Descending-energy ranks of the subspace at `t = 0`.
    pub group: Vec<usize>,
    /// `V₀† U(T) V₀` with the dynamical phase removed, re-unitarized.
    #[serde(skip)]
    pub holonomy: CMatrix,
    /// Eigenphases of `holonomy`, ascending, each in (−π, π].
    pub geometric_phases: Vec<f64>,
    pub dynamical_phase: f64,
    /// Smallest squared singular value of `V₀† U(T) V₀`.
    pub fidelity: f64,
    pub adiabatic: bool,
    pub trace: Vec<TracePoint>,
}

/// Propagate the eigenspace `group` of `H(0)` for one period and extract its
/// matrix-valued geometric phase.
///
/// `group` must be a complete degenerate group of `H(0)`. The dynamical phase
/// uses the mean energy of the group.
pub fn subspace_evolve<H: TimeDependentHamiltonian + ?Sized>(
    h: &H,
    group: &[usize],
    period: f64,
    n_steps: usize,
    opts: &EvolveOptions,
) -> Result<SubspaceEvolution> {
    if n_steps == 0 || !(period > 0.0) {
        return Err(Error::invalid("need n_steps ≥ 1 and a positive period"));
    }
    let (spec0, vecs0) = eigensystem(&h.at(0.0), opts.degeneracy_tol)?;
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    match sorted.first().and_then(|&g| spec0.group_of(g)) {
        Some(g) if *g == sorted => {}
        _ => return Err(Error::invalid(format!("{group:?} is not a degenerate group of H(0)"))),
    }
    let v0 = CMatrix::from_columns(&sorted.iter().map(|&g| vecs0.column(g).into_owned()).collect::<Vec<_>>());
    let k = sorted.len();
    let smallest_weight = |m: &CMatrix| {
        m.singular_values().iter().fold(f64::INFINITY, |a, &s| a.min(s * s)).min(1.0)
    };

    let dt = period / n_steps as f64;
    let stepper = h.stepper(dt, opts.integrator)?;
    let stride = if opts.trace_points > 0 {
        (n_steps / opts.trace_points).max(1)
    } else {
        usize::MAX
    };
    let mut psi = v0.clone();
    let mut dynamical = 0.0;
    let mut trace = Vec::new();
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let s = stepper.step(t)?;
        psi = &s.unitary * psi;
        dynamical -= sorted.iter().map(|&g| s.energies[g]).sum::<f64>() / k as f64 * dt;
        if (step + 1) % stride == 0 || (opts.trace_points > 0 && step + 1 == n_steps) {
            let t1 = t + dt;
            let (spec, vecs) = eigensystem(&h.at(t1), opts.degeneracy_tol)?;
            let members = spec.group_of(sorted[0]).expect("groups are exhaustive");
            let vt = CMatrix::from_columns(&members.iter().map(|&g| vecs.column(g).into_owned()).collect::<Vec<_>>());
            trace.push(TracePoint {
                t: t1,
                fidelity: smallest_weight(&(vt.adjoint() * &psi)),
            });
        }
    }
    let m = v0.adjoint() * psi;
    let fidelity = smallest_weight(&m);
    let holonomy = crate::linalg::polar_unitary(&m) * C64::from_polar(1.0, -dynamical);
    let mut phases = unitary_eigenphases(&holonomy)?;
    phases.sort_by(f64::total_cmp);
    Ok(SubspaceEvolution {
        group: sorted,
        holonomy,
        geometric_phases: phases,
        dynamical_phase: dynamical,
        fidelity,
        adiabatic: fidelity >= opts.fidelity_floor,
        trace,
    })
}

/// Ordered product of step unitaries over `[0, period]`.
pub fn one_period_propagator<H: TimeDependentHamiltonian + ?Sized>(
    h: &H,
    period: f64,
    n_steps: usize,
    integrator: Integrator,
) -> Result<CMatrix> {
    if n_steps == 0 || !(period > 0.0) {
        return Err(Error::invalid("need n_steps ≥ 1 and a positive period"));
    }
    let dt = period / n_steps as f64;
    let stepper = h.stepper(dt, integrator)?;
    let mut u = CMatrix::identity(h.dim(), h.dim());
    for k in 0..n_steps {
        u = stepper.step(k as f64 * dt)?.unitary * u;
    }
    Ok(u)
}

/// Quasi-energies `−arg(λ)/T` of a one-period propagator, reduced into
/// (−ω/2, ω/2] and sorted ascending.
pub fn quasienergies_from_propagator(u: &CMatrix, period: f64) -> Result<Vec<f64>> {
    let omega = 2.0 * PI / period;
    let mut q: Vec<f64> = unitary_eigenphases(u)?
        .into_iter()
        .map(|a| reduce_symmetric(-a / period, omega))
        .collect();
    q.sort_by(f64::total_cmp);
    Ok(q)
}

/// Quasi-energies of the rotating family from numerically stepping one period.
pub fn floquet_quasienergies_of(family: &QuadrupoleFamily, omega: f64, n_steps: usize, integrator: Integrator) -> Result<Vec<f64>> {
    let drive = RotatingQuadrupole::new(family.clone(), omega)?;
    let u = one_period_propagator(&drive, drive.period(), n_steps, integrator)?;
    quasienergies_from_propagator(&u, drive.period())
}

/// Floquet quasi-energies of the spin-3/2 quadrupole with coupling `alpha`
/// rotating at `omega` on a cone of half-angle `theta`.
pub fn floquet_quasienergies(alpha: f64, theta: f64, omega: f64, n_steps: usize, integrator: Integrator) -> Result<Vec<f64>> {
    floquet_quasienergies_of(&QuadrupoleFamily::new(Spin::THREE_HALVES, alpha, theta), omega, n_steps, integrator)
}

/// Exact quasi-energies from the rotating frame.
///
/// With `R(t) = exp(iωt Sz)` the propagator is
/// `U(T) = exp(i2π Sz) exp(−i(H(0) + ω Sz)T)`; the first factor is `−1` for
/// half-integer spin, adding `π/T` to every eigenvalue of `H(0) + ω Sz`.
pub fn rotating_frame_quasienergies(family: &QuadrupoleFamily, omega: f64) -> Result<Vec<f64>> {
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("rotation frequency must be positive, got {omega}")));
    }
    let period = 2.0 * PI / omega;
    let sz = spin_operators(family.spin).sz;
    let (values, _) = eigh(&(family.h_tilt() + sz.scale(omega)))?;
    let offset = if family.spin.is_half_integer() { PI / period } else { 0.0 };
    let mut q: Vec<f64> = values.iter().map(|e| reduce_symmetric(e + offset, omega)).collect();
    q.sort_by(f64::total_cmp);
    Ok(q)
}

/// Largest distance, modulo `omega`, from any entry of `a` to its nearest entry in `b`.
pub fn quasienergy_mismatch(a: &[f64], b: &[f64], omega: f64) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| reduce_symmetric(x - y, omega).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Distance of the quasi-energies from the phase-shifted spectrum `E⁰ − γ/T`.
pub fn shifted_spectrum_residual(quasi: &[f64], alpha: f64, theta: f64, omega: f64) -> Result<f64> {
    let period = 2.0 * PI / omega;
    let predicted: Vec<f64> = energy_shift_spectrum(alpha, theta, period, PhaseConvention::Standard)?
        .iter()
        .map(|e| e.value)
        .collect();
    Ok(quasienergy_mismatch(&predicted, quasi, omega))
}
