//! The computations behind each subcommand of the `ionberry` binary.
//!
//! Every `cmd_*` function is pure: it turns a validated [`RunConfig`] into
//! tables and reports. [`run`] dispatches a [`Command`] and writes its outputs
//! atomically into the configured directory.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::berry::{
    adiabatic_evolve, adiabaticity_check, closed_form_phases, crossover_table, energy_shift_spectrum,
    floquet_quasienergies_of, quasienergy_mismatch, rotating_frame_quasienergies, shifted_spectrum_residual,
    single_state_phase, subspace_evolve, wilson_loop_phase, wz_holonomy, CrossoverConfig, EvolveOptions, FnHamiltonian,
    HolonomyOptions, LoopPath, RotatingQuadrupole, TracePoint,
};
use crate::config::{EvolveMode, RunConfig, TableFormat};
use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, QuadrupoleFamily};
use crate::io::{atomic_write, json_number, Cell, Table};
use crate::linalg::phase_factor_distance;
use crate::trap::{
    export, extract_effective_theta, field_trace, fit_diagonal_potential, laplace_solve, FieldSource, FieldTrace,
    PairBasis, PolyFitReport, PotentialGrid, TrapModel,
};
use crate::units::{deg_to_rad, rad_per_s_to_hz, rad_to_deg, v_per_mm2_to_v_per_m2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Phases,
    Spectrum,
    Evolve,
    Holonomy,
    Floquet,
    Trap,
    FitPotential,
}

fn family(cfg: &RunConfig, theta: f64) -> Result<QuadrupoleFamily> {
    let p = &cfg.physics;
    Ok(QuadrupoleFamily::with_zeeman(p.spin()?, p.alpha(), theta, p.epsilon(), p.zeeman_axis))
}

fn nonzero_rotation(cfg: &RunConfig) -> Result<f64> {
    let w = cfg.physics.omega();
    if !(w > 0.0) {
        return Err(Error::config("physics.rotation_hz", "this command needs a nonzero rotation frequency"));
    }
    Ok(w)
}

/// Reorder `values` to the permutation closest to `targets` in worst-case
/// phase-factor distance.
fn match_phases(values: &[f64], targets: &[f64]) -> Vec<f64> {
    fn search(values: &[f64], targets: &[f64], used: &mut Vec<bool>, cur: &mut Vec<f64>, best: &mut (f64, Vec<f64>)) {
        if cur.len() == targets.len() {
            let worst = cur.iter().zip(targets).map(|(a, b)| phase_factor_distance(*a, *b)).fold(0.0, f64::max);
            if worst < best.0 {
                *best = (worst, cur.clone());
            }
            return;
        }
        for k in 0..values.len() {
            if !used[k] {
                used[k] = true;
                cur.push(values[k]);
                search(values, targets, used, cur, best);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut best = (f64::INFINITY, values.to_vec());
    search(values, targets, &mut vec![false; values.len()], &mut Vec::new(), &mut best);
    best.1
}

/// Closed-form phases, per-band Wilson loops for non-degenerate bands and
/// Wilczek–Zee holonomies for degenerate groups, over the θ grid.
///
/// The `reference` column is the closed form the numerical route converges to:
/// the doublet phases for a holonomy and `−2πm(cosθ − 1)` for a split band.
pub fn cmd_phases(cfg: &RunConfig) -> Result<Table> {
    cfg.physics.require_three_halves()?;
    let n = &cfg.numerics;
    let blocks: Vec<Vec<Vec<Cell>>> = cfg
        .physics
        .thetas()
        .par_iter()
        .map(|&theta| -> Result<Vec<Vec<Cell>>> {
            let fam = family(cfg, theta)?;
            let spec = fam.reference_spectrum(n.degeneracy_tol)?;
            let path = LoopPath::uniform(theta, n.n_steps)?;
            let cf = closed_form_phases(theta)?;
            let mut rows: Vec<(f64, Vec<Cell>)> = Vec::new();
            for group in &spec.degenerate_groups {
                let labels: Vec<f64> = group.iter().map(|&g| spec.energies[g].label).collect();
                let (method, numerical, reference) = if group.len() == 1 {
                    let m = labels[0];
                    let g = wilson_loop_phase(&fam, &path, group[0], n.degeneracy_tol)?;
                    ("wilson", vec![g], vec![single_state_phase(theta, m)])
                } else {
                    info!(
                        "θ = {:.4}°: levels {labels:?} are degenerate, using the Wilczek–Zee holonomy",
                        rad_to_deg(theta)
                    );
                    let opts = HolonomyOptions {
                        per_step_polar: n.per_step_polar,
                    };
                    let h = wz_holonomy(&fam, &path, group, n.degeneracy_tol, opts)?;
                    let reference: Vec<f64> = labels.iter().map(|&m| cf.get(m).unwrap_or(f64::NAN)).collect();
                    ("wz", match_phases(&h.eigenphases, &reference), reference)
                };
                for (k, &m) in labels.iter().enumerate() {
                    rows.push((
                        m,
                        vec![
                            rad_to_deg(theta).into(),
                            m.into(),
                            cf.get(m).unwrap_or(f64::NAN).into(),
                            method.into(),
                            numerical[k].into(),
                            reference[k].into(),
                            phase_factor_distance(numerical[k], reference[k]).into(),
                        ],
                    ));
                }
            }
            rows.sort_by(|a, b| b.0.total_cmp(&a.0));
            Ok(rows.into_iter().map(|(_, r)| r).collect())
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "ionberry.phases.v1",
        &["theta_deg", "m", "closed_form", "method", "numerical", "reference", "discrepancy"],
    );
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

/// Phase-shifted energies and doublet splittings per θ, in Hz, with the
/// distance of the numerical Floquet quasi-energies from the shifted spectrum.
///
/// The Floquet residual always uses the `E⁰ − γ/T` convention that
/// quasi-energies carry, whatever `physics.convention` selects for the energy
/// columns.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Table> {
    cfg.physics.require_three_halves()?;
    let omega = nonzero_rotation(cfg)?;
    let alpha = cfg.physics.alpha();
    let period = 2.0 * PI / omega;
    let steps = cfg.numerics.time_steps(alpha, omega);
    let rows: Vec<Vec<Cell>> = cfg
        .physics
        .thetas()
        .par_iter()
        .map(|&theta| -> Result<Vec<Cell>> {
            let e = energy_shift_spectrum(alpha, theta, period, cfg.physics.convention)?;
            let q = floquet_quasienergies_of(&family(cfg, theta)?, omega, steps, cfg.numerics.integrator)?;
            let residual = shifted_spectrum_residual(&q, alpha, theta, omega)?;
            let mut row: Vec<Cell> = vec![rad_to_deg(theta).into()];
            row.extend(e.iter().map(|x| Cell::from(rad_per_s_to_hz(x.value))));
            row.push(rad_per_s_to_hz((e[0].value - e[3].value).abs()).into());
            row.push(rad_per_s_to_hz((e[1].value - e[2].value).abs()).into());
            row.push(rad_per_s_to_hz(residual).into());
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "ionberry.spectrum.v1",
        &[
            "theta_deg",
            "E_3/2_hz",
            "E_1/2_hz",
            "E_-1/2_hz",
            "E_-3/2_hz",
            "splitting_3/2_hz",
            "splitting_1/2_hz",
            "floquet_residual_hz",
        ],
    );
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Ranks of the `±m` pairs, `m > 0`, in order of decreasing `|m|`.
fn kramers_pairs(spec: &crate::hamiltonian::SpectrumRecord) -> Vec<Vec<usize>> {
    let mut ms: Vec<f64> = spec.energies.iter().map(|e| e.label.abs()).filter(|&m| m > 0.0).collect();
    ms.sort_by(|a, b| b.total_cmp(a));
    ms.dedup();
    ms.iter()
        .map(|&m| {
            (0..spec.energies.len())
                .filter(|&k| spec.energies[k].label.abs() == m)
                .collect()
        })
        .collect()
}

/// Wilczek–Zee holonomy eigenphases of every `±m` doublet over the θ grid.
///
/// A Zeeman term that lifts a doublet's degeneracy is a usage error
/// ([`Error::DegeneracyLifted`]).
pub fn cmd_holonomy(cfg: &RunConfig) -> Result<Table> {
    let n = &cfg.numerics;
    let three_halves = cfg.physics.j == 1.5;
    let blocks: Vec<Vec<Vec<Cell>>> = cfg
        .physics
        .thetas()
        .par_iter()
        .map(|&theta| -> Result<Vec<Vec<Cell>>> {
            let fam = family(cfg, theta)?;
            let spec = fam.reference_spectrum(n.degeneracy_tol)?;
            let path = LoopPath::uniform(theta, n.n_steps)?;
            let opts = HolonomyOptions {
                per_step_polar: n.per_step_polar,
            };
            let cf = if three_halves { Some(closed_form_phases(theta)?) } else { None };
            let mut rows = Vec::new();
            for group in kramers_pairs(&spec) {
                let labels: Vec<f64> = group.iter().map(|&g| spec.energies[g].label).collect();
                let h = wz_holonomy(&fam, &path, &group, n.degeneracy_tol, opts)?;
                let reference: Vec<f64> = labels
                    .iter()
                    .map(|&m| cf.as_ref().and_then(|c| c.get(m)).unwrap_or(f64::NAN))
                    .collect();
                let phases = match_phases(&h.eigenphases, &reference);
                for (k, &m) in labels.iter().enumerate() {
                    rows.push(vec![
                        rad_to_deg(theta).into(),
                        labels.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("|").into(),
                        m.into(),
                        phases[k].into(),
                        reference[k].into(),
                        phase_factor_distance(phases[k], reference[k]).into(),
                    ]);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "ionberry.holonomy.v1",
        &["theta_deg", "group", "m", "eigenphase", "closed_form", "discrepancy"],
    );
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct FloquetReport {
    /// One row per (θ, ω): numerical and rotating-frame quasi-energies in Hz.
    pub table: Table,
    /// Log-log slope of the shifted-spectrum residual against ω, per θ, when
    /// the ladder has at least two rungs.
    pub slopes: Table,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn cmd_floquet(cfg: &RunConfig) -> Result<FloquetReport> {
    cfg.physics.require_three_halves()?;
    let ladder: Vec<f64> = if cfg.floquet.omega_ladder_hz.is_empty() {
        vec![nonzero_rotation(cfg)?]
    } else {
        cfg.floquet.omega_ladder_hz.iter().map(|&f| crate::units::hz_to_rad_per_s(f)).collect()
    };
    let alpha = cfg.physics.alpha();
    let jobs: Vec<(f64, f64)> = cfg
        .physics
        .thetas()
        .iter()
        .flat_map(|&th| ladder.iter().map(move |&w| (th, w)))
        .collect();
    let results: Vec<(f64, f64, usize, Vec<f64>, Vec<f64>, f64, f64)> = jobs
        .par_iter()
        .map(|&(theta, omega)| {
            let fam = family(cfg, theta)?;
            let steps = cfg.numerics.time_steps(alpha, omega);
            let q = floquet_quasienergies_of(&fam, omega, steps, cfg.numerics.integrator)?;
            let exact = rotating_frame_quasienergies(&fam, omega)?;
            let mismatch = quasienergy_mismatch(&q, &exact, omega);
            let residual = shifted_spectrum_residual(&q, alpha, theta, omega)?;
            Ok((theta, omega, steps, q, exact, mismatch, residual))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        "ionberry.floquet.v1",
        &[
            "theta_deg",
            "rotation_hz",
            "steps",
            "q1_hz",
            "q2_hz",
            "q3_hz",
            "q4_hz",
            "exact1_hz",
            "exact2_hz",
            "exact3_hz",
            "exact4_hz",
            "mismatch_hz",
            "shifted_residual_hz",
        ],
    );
    for (theta, omega, steps, q, exact, mismatch, residual) in &results {
        let mut row: Vec<Cell> = vec![rad_to_deg(*theta).into(), rad_per_s_to_hz(*omega).into(), (*steps).into()];
        row.extend(q.iter().chain(exact).map(|&x| Cell::from(rad_per_s_to_hz(x))));
        row.push(rad_per_s_to_hz(*mismatch).into());
        row.push(rad_per_s_to_hz(*residual).into());
        table.push(row);
    }
    let mut slopes = Table::new("ionberry.floquet-slope.v1", &["theta_deg", "rungs", "slope"]);
    if ladder.len() >= 2 {
        for theta in cfg.physics.thetas() {
            let rung: Vec<&_> = results.iter().filter(|r| r.0 == theta).collect();
            let w: Vec<f64> = rung.iter().map(|r| r.1).collect();
            let res: Vec<f64> = rung.iter().map(|r| r.6).collect();
            let slope = if res.iter().all(|&r| r > 0.0) { loglog_slope(&w, &res) } else { f64::NAN };
            slopes.push(vec![rad_to_deg(theta).into(), rung.len().into(), slope.into()]);
        }
    }
    Ok(FloquetReport { table, slopes })
}

/// One evolution run of `cmd_evolve`.
#[derive(Debug, Clone, Serialize)]
pub struct EvolveRecord {
    pub theta_deg: f64,
    pub mode: EvolveMode,
    pub initial_m: f64,
    /// Descending-energy ranks that were tracked.
    pub bands: Vec<usize>,
    /// Geometric phases: one for a single state, one per member for a doublet.
    pub geometric_phases: Vec<f64>,
    pub dynamical_phase: f64,
    /// Closed-form values matched to `geometric_phases`.
    pub reference: Vec<f64>,
    pub max_error: f64,
    pub fidelity: f64,
    pub adiabatic: bool,
    pub adiabaticity_ratio: f64,
    pub adiabaticity_pass: bool,
    pub n_steps: usize,
}

#[derive(Debug, Clone)]
pub enum EvolveOutput {
    Runs { records: Vec<EvolveRecord>, trace: Table },
    Sweep(Table),
}

fn crossover_rows(cfg: &RunConfig, omega: f64) -> Result<Table> {
    cfg.physics.require_three_halves()?;
    let alpha = cfg.physics.alpha();
    let mut t = Table::new(
        "ionberry.crossover.v1",
        &[
            "theta_deg",
            "epsilon_hz",
            "axis",
            "regime",
            "static_plus",
            "static_minus",
            "dynamic_plus",
            "dynamic_minus",
            "fidelity_plus",
            "fidelity_minus",
            "split_error",
            "degenerate_error",
        ],
    );
    for theta in cfg.physics.thetas() {
        let base = CrossoverConfig::new(
            alpha,
            theta,
            omega,
            cfg.evolve.epsilon_sweep_hz.iter().map(|&e| crate::units::hz_to_rad_per_s(e)).collect(),
        );
        let sweep = CrossoverConfig {
            axes: cfg.evolve.sweep_axes.clone(),
            loop_steps: cfg.numerics.n_steps,
            steps_per_period: cfg.numerics.time_steps(alpha, omega),
            integrator: cfg.numerics.integrator,
            ..base
        };
        for r in crossover_table(&sweep)? {
            t.push(vec![
                rad_to_deg(theta).into(),
                rad_per_s_to_hz(r.epsilon).into(),
                serde_json::to_value(r.axis)?.as_str().unwrap_or_default().into(),
                serde_json::to_value(r.regime)?.as_str().unwrap_or_default().into(),
                r.static_plus.into(),
                r.static_minus.into(),
                r.dynamic_plus.into(),
                r.dynamic_minus.into(),
                r.fidelity_plus.into(),
                r.fidelity_minus.into(),
                r.split_error.into(),
                r.degenerate_error.into(),
            ]);
        }
    }
    Ok(t)
}

fn evolve_one(cfg: &RunConfig, theta: f64, omega: f64) -> Result<(EvolveRecord, Vec<TracePoint>)> {
    let p = &cfg.physics;
    let n = &cfg.numerics;
    let alpha = p.alpha();
    let fam = family(cfg, theta)?;
    let spec = fam.reference_spectrum(n.degeneracy_tol)?;
    let rank = fam
        .rank_of_label(cfg.evolve.initial_m, n.degeneracy_tol)
        .map_err(|e| Error::config("evolve.initial_m", e.to_string()))?;
    let group = spec.group_of(rank).expect("groups are exhaustive").clone();
    let report = adiabaticity_check(alpha, theta, omega, p.epsilon(), p.zeeman_axis, n.adiabatic_threshold)?;
    if !report.pass {
        warn!(
            "θ = {:.4}°: adiabaticity ratio ω/gap = {:.3e} exceeds {:.3e}{}",
            rad_to_deg(theta),
            report.ratio,
            report.threshold,
            report.diagnostic.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
        );
    }
    let opts = EvolveOptions {
        integrator: n.integrator,
        fidelity_floor: n.fidelity_floor,
        degeneracy_tol: n.degeneracy_tol,
        branch_hint: None,
        trace_points: cfg.evolve.trace_points,
    };
    // a static field gives no geometric phase; evolve it over one oscillation of α
    let (period, steps) = if omega > 0.0 {
        (2.0 * PI / omega, n.time_steps(alpha, omega))
    } else {
        (2.0 * PI / alpha.abs(), n.steps_per_period.unwrap_or(1000))
    };
    let rotating = if omega > 0.0 { Some(RotatingQuadrupole::new(fam.clone(), omega)?) } else { None };
    let h0 = fam.h_tilt().clone();
    let fixed = FnHamiltonian::new(fam.spin.dim(), move |_| h0.clone());
    let drive: &dyn crate::berry::TimeDependentHamiltonian = match &rotating {
        Some(r) => r,
        None => &fixed,
    };
    let cf = if p.j == 1.5 { Some(closed_form_phases(theta)?) } else { None };
    let closed = |m: f64| {
        if omega == 0.0 {
            0.0
        } else if group.len() > 1 {
            cf.as_ref().and_then(|c| c.get(m)).unwrap_or(f64::NAN)
        } else {
            single_state_phase(theta, m)
        }
    };

    let (bands, phases, reference, dynamical, fidelity, adiabatic, trace) = match cfg.evolve.mode {
        EvolveMode::State => {
            if group.len() > 1 {
                return Err(Error::DegenerateBand {
                    band: rank,
                    sample: 0,
                    gap: 0.0,
                });
            }
            let (_, vecs) = eigensystem(&drive.at(0.0), n.degeneracy_tol)?;
            let psi0 = vecs.column(rank).into_owned();
            let reference = closed(cfg.evolve.initial_m);
            let opts = EvolveOptions {
                branch_hint: Some(reference).filter(|r| r.is_finite()),
                ..opts
            };
            let r = adiabatic_evolve(drive, &psi0, period, steps, &opts)?;
            (vec![r.band], vec![r.geometric_phase], vec![reference], r.dynamical_phase, r.fidelity_to_initial_eigenstate, r.adiabatic, r.trace)
        }
        EvolveMode::Doublet => {
            let r = subspace_evolve(drive, &group, period, steps, &opts)?;
            let labels: Vec<f64> = group.iter().map(|&g| spec.energies[g].label).collect();
            let reference: Vec<f64> = labels.iter().map(|&m| closed(m)).collect();
            let phases = match_phases(&r.geometric_phases, &reference);
            (r.group, phases, reference, r.dynamical_phase, r.fidelity, r.adiabatic, r.trace)
        }
        EvolveMode::EpsilonSweep => unreachable!("handled by the caller"),
    };
    let max_error = phases
        .iter()
        .zip(&reference)
        .map(|(a, b)| phase_factor_distance(*a, *b))
        .fold(0.0, f64::max);
    Ok((
        EvolveRecord {
            theta_deg: rad_to_deg(theta),
            mode: cfg.evolve.mode,
            initial_m: cfg.evolve.initial_m,
            bands,
            geometric_phases: phases,
            dynamical_phase: dynamical,
            reference,
            max_error,
            fidelity,
            adiabatic,
            adiabaticity_ratio: report.ratio,
            adiabaticity_pass: report.pass,
            n_steps: steps,
        },
        trace,
    ))
}

/// One-period evolution per θ (single state or whole doublet), or the ε-sweep
/// crossover table.
///
/// A failed adiabaticity check is logged as a warning with the ratio; tracking
/// a single member of a degenerate doublet is an error.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<EvolveOutput> {
    let omega = cfg.physics.omega();
    if cfg.evolve.mode == EvolveMode::EpsilonSweep {
        return Ok(EvolveOutput::Sweep(crossover_rows(cfg, nonzero_rotation(cfg)?)?));
    }
    let runs: Vec<(EvolveRecord, Vec<TracePoint>)> = cfg
        .physics
        .thetas()
        .par_iter()
        .map(|&theta| evolve_one(cfg, theta, omega))
        .collect::<Result<_>>()?;
    let mut trace = Table::new("ionberry.evolve-trace.v1", &["theta_deg", "t", "fidelity"]);
    let mut records = Vec::new();
    for (rec, tr) in runs {
        for p in tr {
            trace.push(vec![rec.theta_deg.into(), p.t.into(), p.fidelity.into()]);
        }
        records.push(rec);
    }
    Ok(EvolveOutput::Runs { records, trace })
}

/// Numbers extracted by `cmd_trap`.
#[derive(Debug, Clone, Serialize)]
pub struct TrapSummary {
    pub grid_n: usize,
    pub spacing: f64,
    pub drive_amplitude: f64,
    pub sample_point: [f64; 3],
    /// Effective tilt of each endcap pair's quadrupole, degrees.
    pub theta_deg: Vec<f64>,
    /// Geometric rod-midline angle of each pair, degrees.
    pub midline_deg: Vec<f64>,
    pub analytic_closure: f64,
    pub numeric_closure: f64,
    pub fit_pair: usize,
    pub fit_time: f64,
    pub fit_coefficients: Vec<f64>,
    pub fit_std_errors: Vec<f64>,
    pub fit_r_squared: f64,
    pub solver_iterations: Vec<usize>,
    pub solver_residuals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TrapReport {
    pub model: TrapModel,
    pub analytic: FieldTrace,
    pub numeric: FieldTrace,
    pub fit: PolyFitReport,
    pub summary: TrapSummary,
    /// Potential at `t = 0`, kept when `trap.write_grid` is set.
    pub grid: Option<PotentialGrid>,
}

fn rod_distance(model: &TrapModel, pair: usize) -> f64 {
    let c = model.pairs[pair].rods[0].center;
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// Earliest time in `[0, T)` at which `pair` sits at its peak voltage.
fn peak_time(model: &TrapModel, pair: usize) -> f64 {
    let t = (-model.pairs[pair].phase_offset).rem_euclid(2.0 * PI) / model.drive_frequency;
    if t >= model.period() {
        0.0
    } else {
        t
    }
}

fn fit_along_pair(cfg: &RunConfig, grid: &PotentialGrid, model: &TrapModel) -> Result<PolyFitReport> {
    let tc = &cfg.trap;
    fit_diagonal_potential(
        grid,
        model,
        tc.pair,
        tc.fit_extent_fraction * rod_distance(model, tc.pair),
        tc.fit_samples,
        tc.fit_degree,
    )
}

/// Solve the trap, trace the field over one drive period at the sample point
/// (analytic and numeric), fit the potential along one rod diagonal and
/// extract the effective tilt of every pair.
pub fn cmd_trap(cfg: &RunConfig, base: &Path) -> Result<TrapReport> {
    let tc = &cfg.trap;
    let model = tc.load_model(base)?;
    let grid = tc.grid(&model)?;
    let basis = PairBasis::solve(&model, grid, &cfg.numerics.solver())?;
    let point = tc.sample_point.unwrap_or_else(|| model.default_sample_point());
    let numeric = field_trace(&model, point, tc.trace_samples, FieldSource::Numeric(&basis))?;
    let analytic = field_trace(
        &model,
        point,
        tc.trace_samples,
        FieldSource::Analytic {
            v0: v_per_mm2_to_v_per_m2(tc.analytic_gradient_v_per_mm2),
            theta: deg_to_rad(tc.analytic_theta_deg),
            mode: tc.gradient_mode,
        },
    )?;
    let theta_deg = (0..model.pairs.len())
        .map(|k| Ok(rad_to_deg(extract_effective_theta(&basis, k, tc.theta_fit_fraction * rod_distance(&model, k))?)))
        .collect::<Result<Vec<_>>>()?;
    info!("effective tilt per pair: {theta_deg:?} degrees");
    let fit_time = peak_time(&model, tc.pair);
    let snapshot = basis.snapshot(fit_time)?;
    let fit = fit_along_pair(cfg, &snapshot, &model)?;
    let grids: Vec<&PotentialGrid> = basis.pairs.iter().chain(std::iter::once(&basis.static_part)).collect();
    let summary = TrapSummary {
        grid_n: grid.n,
        spacing: grid.spacing(),
        drive_amplitude: model.drive_amplitude,
        sample_point: point,
        theta_deg,
        midline_deg: model.pairs.iter().map(|p| rad_to_deg(p.midline_angle())).collect(),
        analytic_closure: analytic.closure_error(),
        numeric_closure: numeric.closure_error(),
        fit_pair: tc.pair,
        fit_time,
        fit_coefficients: fit.coefficients.clone(),
        fit_std_errors: (0..=fit.degree()).map(|k| fit.std_error(k)).collect(),
        fit_r_squared: fit.r_squared,
        solver_iterations: grids.iter().map(|g| g.iterations).collect(),
        solver_residuals: grids.iter().map(|g| g.residual).collect(),
    };
    let grid_out = if tc.write_grid { Some(basis.snapshot(0.0)?) } else { None };
    Ok(TrapReport {
        model,
        analytic,
        numeric,
        fit,
        summary,
        grid: grid_out,
    })
}

#[derive(Debug, Clone)]
pub struct FitPotentialReport {
    /// Drive amplitude and fit for each entry of `trap.amplitudes_v`.
    pub fits: Vec<(f64, PolyFitReport)>,
    /// Coefficients per amplitude with the quadratic-coefficient ratio to the first.
    pub table: Table,
}

/// Independent full-drive solves at each amplitude of `trap.amplitudes_v`,
/// each fitted along the selected rod diagonal at that pair's peak.
pub fn cmd_fit_potential(cfg: &RunConfig, base: &Path) -> Result<FitPotentialReport> {
    let tc = &cfg.trap;
    let model = tc.load_model(base)?;
    let grid = tc.grid(&model)?;
    let t = peak_time(&model, tc.pair);
    let fits: Vec<(f64, PolyFitReport)> = tc
        .amplitudes_v
        .par_iter()
        .map(|&v| {
            let m = model.with_amplitude(v);
            let solved = laplace_solve(&m, t, grid, &cfg.numerics.solver())?;
            Ok((v, fit_along_pair(cfg, &solved, &m)?))
        })
        .collect::<Result<_>>()?;
    let deg = tc.fit_degree;
    let mut cols: Vec<String> = vec!["amplitude_v".into()];
    cols.extend((0..=deg).map(|k| format!("c{k}")));
    cols.extend(["c2_std_error", "r_squared", "amplitude_ratio", "c2_ratio"].map(String::from));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut table = Table::new("ionberry.fit-potential.v1", &col_refs);
    let (v_ref, fit_ref) = &fits[0];
    for (v, f) in &fits {
        let mut row: Vec<Cell> = vec![(*v).into()];
        row.extend(f.coefficients.iter().map(|&c| Cell::from(c)));
        let c2 = |r: &PolyFitReport| r.coefficients.get(2).copied().unwrap_or(f64::NAN);
        row.push(if deg >= 2 { f.std_error(2) } else { f64::NAN }.into());
        row.push(f.r_squared.into());
        row.push((v / v_ref).into());
        row.push((c2(f) / c2(fit_ref)).into());
        table.push(row);
    }
    Ok(FitPotentialReport { fits, table })
}

/// Files written so far; removed again if a later write fails.
struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Outputs<'_> {
    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        atomic_write(&path, data)?;
        self.written.push(path);
        Ok(())
    }

    fn table(&mut self, stem: &str, t: &Table, format: TableFormat) -> Result<()> {
        match format {
            TableFormat::Csv => self.bytes(&format!("{stem}.csv"), t.to_csv().as_str().as_bytes()),
            TableFormat::Json => self.bytes(&format!("{stem}.json"), pretty(&t.to_json()).as_bytes()),
        }
    }

    fn discard(self) {
        for p in self.written {
            let _ = std::fs::remove_file(p);
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Serialize with every number rounded to 12 significant digits.
fn rounded<T: Serialize>(x: &T) -> Result<serde_json::Value> {
    fn walk(v: serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) if n.is_f64() => json_number(n.as_f64().unwrap_or(f64::NAN)),
            Value::Array(a) => Value::Array(a.into_iter().map(walk).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    Ok(walk(serde_json::to_value(x)?))
}

/// Run `command` and write its outputs into `cfg.output.dir`.
///
/// Relative paths in the configuration resolve against `base`. Everything is
/// computed before the first file is written; if a write fails, files written
/// by this call are removed.
pub fn run(command: Command, cfg: &RunConfig, base: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let mut out = Outputs {
        dir: &cfg.output.dir,
        written: Vec::new(),
    };
    let format = cfg.output.format;
    let result = (|| -> Result<()> {
        match command {
            Command::Phases => out.table("phases", &cmd_phases(cfg)?, format),
            Command::Spectrum => out.table("spectrum", &cmd_spectrum(cfg)?, format),
            Command::Holonomy => out.table("holonomy", &cmd_holonomy(cfg)?, format),
            Command::Floquet => {
                let r = cmd_floquet(cfg)?;
                out.table("floquet", &r.table, format)?;
                if !r.slopes.rows.is_empty() {
                    out.table("floquet_slopes", &r.slopes, format)?;
                }
                Ok(())
            }
            Command::Evolve => match cmd_evolve(cfg)? {
                EvolveOutput::Sweep(t) => out.table("crossover", &t, format),
                EvolveOutput::Runs { records, trace } => {
                    out.bytes("evolve.json", pretty(&rounded(&records)?).as_bytes())?;
                    out.bytes("evolve_trace.csv", trace.to_csv().as_str().as_bytes())
                }
            },
            Command::Trap => {
                let r = cmd_trap(cfg, base)?;
                let files = [
                    ("trap_trace_analytic.csv", export::trace_csv(&r.analytic)),
                    ("trap_trace_numeric.csv", export::trace_csv(&r.numeric)),
                    ("trap_diagonal_fit.csv", export::fit_csv(&r.fit)),
                ];
                let grid_csv = r.grid.as_ref().map(export::grid_csv);
                for (name, csv) in &files {
                    out.bytes(name, csv.as_str().as_bytes())?;
                }
                if let Some(g) = grid_csv {
                    out.bytes("trap_grid.csv", g.as_str().as_bytes())?;
                }
                out.bytes("trap_report.json", pretty(&rounded(&r.summary)?).as_bytes())
            }
            Command::FitPotential => {
                let r = cmd_fit_potential(cfg, base)?;
                let csvs: Vec<_> = r.fits.iter().map(|(_, f)| export::fit_csv(f)).collect();
                out.table("fit_potential", &r.table, format)?;
                for (k, csv) in csvs.iter().enumerate() {
                    out.bytes(&format!("fit_potential_{k}.csv"), csv.as_str().as_bytes())?;
                }
                Ok(())
            }
        }
    })();
    match result {
        Ok(()) => Ok(out.written),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}
