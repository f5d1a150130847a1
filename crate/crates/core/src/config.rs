//! Run configuration for the command-line front end.
//!
//! Angles are given in degrees and frequencies in Hz; the accessors on each
//! block return radians and rad/s.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::berry::{Integrator, PhaseConvention};
use crate::error::{Error, Result};
use crate::hamiltonian::{GradientMode, QuadrupoleCoupling, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use crate::spin::Spin;
use crate::trap::{GridSpec, SolverOptions, TrapModel};
use crate::units::{deg_to_rad, hz_to_rad_per_s, v_per_mm2_to_v_per_m2};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub physics: PhysicsConfig,
    pub numerics: NumericsConfig,
    pub evolve: EvolveConfig,
    pub floquet: FloquetConfig,
    pub trap: TrapConfig,
    pub output: OutputConfig,
}

/// Quadrupole moment given as a coupling constant and a field gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    /// Doublet splitting per unit gradient is `c/2`: Hz per (V/mm²).
    pub c_hz_per_v_mm2: f64,
    pub gradient_v_per_mm2: f64,
    /// Multiplies the moment.
    #[serde(default = "one")]
    pub moment_scale: f64,
}

impl CouplingConfig {
    /// The Ca⁺ reference point: 150 Hz doublet splitting at 50 V/mm².
    pub fn calcium() -> Self {
        CouplingConfig {
            c_hz_per_v_mm2: 2.0 * QuadrupoleCoupling::CA_SPLITTING_HZ / 50.0,
            gradient_v_per_mm2: 50.0,
            moment_scale: 1.0,
        }
    }

    pub fn coupling(&self) -> QuadrupoleCoupling {
        // Hz per V/mm² → rad/s per V/m²
        QuadrupoleCoupling {
            c: hz_to_rad_per_s(self.c_hz_per_v_mm2) / v_per_mm2_to_v_per_m2(1.0),
        }
        .scaled(self.moment_scale)
    }

    pub fn alpha(&self) -> f64 {
        self.coupling().alpha(v_per_mm2_to_v_per_m2(self.gradient_v_per_mm2))
    }
}

const DEFAULT_ROTATION_HZ: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    #[serde(default = "three_halves")]
    pub j: f64,
    /// Coupling `α` of `α(Sz'² − j(j+1)/3)`, Hz. Exclusive with `coupling`;
    /// with neither given the Ca⁺ reference coupling applies.
    #[serde(default)]
    pub alpha_hz: Option<f64>,
    #[serde(default)]
    pub coupling: Option<CouplingConfig>,
    /// Cone half-angles, degrees.
    #[serde(default = "default_thetas")]
    pub theta_deg: Vec<f64>,
    /// Rotation frequency, Hz. Exclusive with `period_s`; 1.5 Hz when neither is given.
    #[serde(default)]
    pub rotation_hz: Option<f64>,
    #[serde(default)]
    pub period_s: Option<f64>,
    /// Symmetry-breaking field `ε`, Hz.
    #[serde(default)]
    pub zeeman_hz: f64,
    #[serde(default)]
    pub zeeman_axis: ZeemanAxis,
    #[serde(default)]
    pub convention: PhaseConvention,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig {
            j: 1.5,
            alpha_hz: None,
            coupling: Some(CouplingConfig::calcium()),
            theta_deg: default_thetas(),
            rotation_hz: Some(DEFAULT_ROTATION_HZ),
            period_s: None,
            zeeman_hz: 0.0,
            zeeman_axis: ZeemanAxis::Principal,
            convention: PhaseConvention::Positive,
        }
    }
}

impl PhysicsConfig {
    pub fn spin(&self) -> Result<Spin> {
        Spin::new(self.j).map_err(|e| Error::config("physics.j", e.to_string()))
    }

    /// rad/s.
    pub fn alpha(&self) -> f64 {
        match (self.alpha_hz, &self.coupling) {
            (Some(a), _) => hz_to_rad_per_s(a),
            (None, Some(c)) => c.alpha(),
            (None, None) => CouplingConfig::calcium().alpha(),
        }
    }

    /// rad/s; zero means a static field.
    pub fn omega(&self) -> f64 {
        match (self.rotation_hz, self.period_s) {
            (Some(f), _) => hz_to_rad_per_s(f),
            (None, Some(t)) => 2.0 * PI / t,
            (None, None) => hz_to_rad_per_s(DEFAULT_ROTATION_HZ),
        }
    }

    /// Radians, in the order given.
    pub fn thetas(&self) -> Vec<f64> {
        self.theta_deg.iter().map(|&d| deg_to_rad(d)).collect()
    }

    /// rad/s.
    pub fn epsilon(&self) -> f64 {
        hz_to_rad_per_s(self.zeeman_hz)
    }

    fn validate(&self) -> Result<()> {
        let spin = self.spin()?;
        if spin.twice() < 2 {
            return Err(Error::config("physics.j", "a quadrupole coupling needs j ≥ 1"));
        }
        match (self.alpha_hz, &self.coupling) {
            (Some(_), Some(_)) => {
                return Err(Error::config("physics", "supply at most one of `alpha_hz` or `coupling`"));
            }
            (None, None) => {}
            (Some(a), None) => finite_nonzero("physics.alpha_hz", a)?,
            (None, Some(c)) => {
                finite_nonzero("physics.coupling.c_hz_per_v_mm2", c.c_hz_per_v_mm2)?;
                finite_nonzero("physics.coupling.gradient_v_per_mm2", c.gradient_v_per_mm2)?;
                positive("physics.coupling.moment_scale", c.moment_scale)?;
            }
        }
        match (self.rotation_hz, self.period_s) {
            (Some(_), Some(_)) => {
                return Err(Error::config("physics", "supply at most one of `rotation_hz` or `period_s`"));
            }
            (None, None) => {}
            (Some(f), None) => {
                if !(f >= 0.0 && f.is_finite()) {
                    return Err(Error::config("physics.rotation_hz", format!("must be finite and non-negative, got {f}")));
                }
            }
            (None, Some(t)) => positive("physics.period_s", t)?,
        }
        if self.theta_deg.is_empty() {
            return Err(Error::config("physics.theta_deg", "the θ grid is empty"));
        }
        if let Some(t) = self.theta_deg.iter().find(|t| !(0.0..=180.0).contains(*t)) {
            return Err(Error::config("physics.theta_deg", format!("{t}° lies outside [0°, 180°]")));
        }
        if !(self.zeeman_hz >= 0.0 && self.zeeman_hz.is_finite()) {
            return Err(Error::config("physics.zeeman_hz", format!("must be finite and non-negative, got {}", self.zeeman_hz)));
        }
        Ok(())
    }

    /// Error unless the run is for spin 3/2, where the closed forms apply.
    pub fn require_three_halves(&self) -> Result<()> {
        if self.j != 1.5 {
            return Err(Error::config("physics.j", format!("closed-form phases are defined for j = 3/2 only, got {}", self.j)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Samples of static loops (Wilson loop and Wilczek–Zee holonomy).
    pub n_steps: usize,
    /// Time steps per rotation period; `None` picks `max(1000, ⌈200|α|/ω⌉)`.
    pub steps_per_period: Option<usize>,
    pub integrator: Integrator,
    pub degeneracy_tol: f64,
    pub fidelity_floor: f64,
    pub adiabatic_threshold: f64,
    pub per_step_polar: bool,
    pub solver_tol: f64,
    pub solver_max_iters: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            n_steps: 4000,
            steps_per_period: None,
            integrator: Integrator::Magnus4,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            fidelity_floor: 0.9,
            adiabatic_threshold: 0.01,
            per_step_polar: false,
            solver_tol: 1e-8,
            solver_max_iters: 100_000,
        }
    }
}

impl NumericsConfig {
    pub fn time_steps(&self, alpha: f64, omega: f64) -> usize {
        self.steps_per_period
            .unwrap_or_else(|| ((200.0 * alpha.abs() / omega).ceil() as usize).max(1000))
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver_tol,
            max_iters: self.solver_max_iters,
            ..SolverOptions::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(Error::config("numerics.n_steps", "need at least 2 loop samples"));
        }
        if self.steps_per_period == Some(0) {
            return Err(Error::config("numerics.steps_per_period", "must be at least 1"));
        }
        positive("numerics.degeneracy_tol", self.degeneracy_tol)?;
        positive("numerics.adiabatic_threshold", self.adiabatic_threshold)?;
        positive("numerics.solver_tol", self.solver_tol)?;
        if !(0.0..=1.0).contains(&self.fidelity_floor) {
            return Err(Error::config("numerics.fidelity_floor", "must lie in [0, 1]"));
        }
        if self.solver_max_iters == 0 {
            return Err(Error::config("numerics.solver_max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolveMode {
    /// Follow one non-degenerate eigenstate; needs `zeeman_hz > 0` for a doublet member.
    State,
    /// Follow a whole degenerate doublet and report its holonomy eigenphases.
    #[default]
    Doublet,
    /// Sweep ε across the |±1/2⟩ crossover.
    EpsilonSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub mode: EvolveMode,
    /// Principal-frame label of the tracked state or doublet member.
    pub initial_m: f64,
    pub trace_points: usize,
    /// ε values of the sweep, Hz.
    pub epsilon_sweep_hz: Vec<f64>,
    pub sweep_axes: Vec<ZeemanAxis>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            mode: EvolveMode::Doublet,
            initial_m: 1.5,
            trace_points: 100,
            epsilon_sweep_hz: vec![0.15, 0.75, 2.5, 7.5, 25.0, 75.0],
            sweep_axes: vec![ZeemanAxis::Principal, ZeemanAxis::Lab],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloquetConfig {
    /// Rotation frequencies of a convergence ladder, Hz; empty uses the physics block.
    pub omega_ladder_hz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapConfig {
    /// Inline geometry; exclusive with `geometry_file`. Both absent selects the bundled default.
    pub model: Option<TrapModel>,
    pub geometry_file: Option<PathBuf>,
    /// Overrides the drive amplitude of the geometry, V.
    pub amplitude_v: Option<f64>,
    /// Nodes per axis of the solver grid spanning the box.
    pub grid_n: usize,
    /// Field-trace point, m; `None` is 10% of the rod-centre radius on x.
    pub sample_point: Option<[f64; 3]>,
    pub trace_samples: usize,
    /// Ideal-model gradient magnitude and tilt for the analytic trace.
    pub analytic_gradient_v_per_mm2: f64,
    pub analytic_theta_deg: f64,
    pub gradient_mode: GradientMode,
    /// Endcap pair whose midline is fitted.
    pub pair: usize,
    /// Radius of the local quadratic fit for θ, as a fraction of the rod distance.
    pub theta_fit_fraction: f64,
    /// Half-length of the diagonal fit window, as a fraction of the rod distance.
    pub fit_extent_fraction: f64,
    pub fit_samples: usize,
    pub fit_degree: usize,
    /// Amplitudes for `fit-potential`, V.
    pub amplitudes_v: Vec<f64>,
    pub write_grid: bool,
}

impl Default for TrapConfig {
    fn default() -> Self {
        TrapConfig {
            model: None,
            geometry_file: None,
            amplitude_v: None,
            grid_n: 129,
            sample_point: None,
            trace_samples: 64,
            analytic_gradient_v_per_mm2: 50.0,
            analytic_theta_deg: 40.7,
            gradient_mode: GradientMode::Physical,
            pair: 0,
            theta_fit_fraction: 0.08,
            fit_extent_fraction: 0.6,
            fit_samples: 41,
            fit_degree: 4,
            amplitudes_v: vec![500.0, 1000.0],
            write_grid: false,
        }
    }
}

impl TrapConfig {
    /// The selected geometry with any amplitude override applied; relative
    /// geometry paths resolve against `base`.
    pub fn load_model(&self, base: &Path) -> Result<TrapModel> {
        let model = match (&self.model, &self.geometry_file) {
            (Some(_), Some(_)) => return Err(Error::config("trap", "supply at most one of `model` or `geometry_file`")),
            (Some(m), None) => {
                m.validate().map_err(|e| Error::config("trap.model", e.to_string()))?;
                m.clone()
            }
            (None, Some(p)) => TrapModel::from_json_file(&base.join(p))
                .map_err(|e| Error::config("trap.geometry_file", format!("{}: {e}", p.display())))?,
            (None, None) => TrapModel::default_geometry(),
        };
        Ok(match self.amplitude_v {
            Some(v) => model.with_amplitude(v),
            None => model,
        })
    }

    pub fn grid(&self, model: &TrapModel) -> Result<GridSpec> {
        GridSpec::new(self.grid_n, model.box_half_width).map_err(|e| Error::config("trap.grid_n", e.to_string()))
    }

    fn validate(&self) -> Result<()> {
        if self.model.is_some() && self.geometry_file.is_some() {
            return Err(Error::config("trap", "supply at most one of `model` or `geometry_file`"));
        }
        if self.grid_n < 5 {
            return Err(Error::config("trap.grid_n", "need at least 5 nodes per axis"));
        }
        if self.trace_samples < crate::trap::MIN_TRACE_SAMPLES {
            return Err(Error::config(
                "trap.trace_samples",
                format!("need at least {}", crate::trap::MIN_TRACE_SAMPLES),
            ));
        }
        if self.amplitude_v.is_some_and(|v| !v.is_finite()) {
            return Err(Error::config("trap.amplitude_v", "must be finite"));
        }
        if self.amplitudes_v.is_empty() || self.amplitudes_v.iter().any(|v| !(v.abs() > 0.0) || !v.is_finite()) {
            return Err(Error::config("trap.amplitudes_v", "need at least one finite nonzero amplitude"));
        }
        positive("trap.theta_fit_fraction", self.theta_fit_fraction)?;
        positive("trap.fit_extent_fraction", self.fit_extent_fraction)?;
        if self.fit_samples <= self.fit_degree + 1 {
            return Err(Error::config("trap.fit_samples", "need more samples than polynomial coefficients"));
        }
        if self.pair >= 4 {
            return Err(Error::config("trap.pair", "the trap has endcap pairs 0 to 3"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: TableFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            format: TableFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| Error::config("<file>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        self.numerics.validate()?;
        self.trap.validate()?;
        if let Some(f) = self.floquet.omega_ladder_hz.iter().find(|f| !(**f > 0.0) || !f.is_finite()) {
            return Err(Error::config("floquet.omega_ladder_hz", format!("frequencies must be positive, got {f}")));
        }
        if let Some(e) = self.evolve.epsilon_sweep_hz.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::config("evolve.epsilon_sweep_hz", format!("ε values must be positive, got {e}")));
        }
        if self.evolve.mode == EvolveMode::EpsilonSweep && (self.evolve.epsilon_sweep_hz.is_empty() || self.evolve.sweep_axes.is_empty()) {
            return Err(Error::config("evolve", "an ε sweep needs at least one ε value and one axis"));
        }
        Ok(())
    }
}

fn one() -> f64 {
    1.0
}

fn three_halves() -> f64 {
    1.5
}

fn default_thetas() -> Vec<f64> {
    vec![0.0, 30.0, 40.7, 60.0, 90.0, 120.0, 150.0, 180.0]
}

fn positive(field: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::config(field, format!("must be positive and finite, got {x}")));
    }
    Ok(())
}

fn finite_nonzero(field: &str, x: f64) -> Result<()> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::config(field, format!("must be finite and nonzero, got {x}")));
    }
    Ok(())
}
