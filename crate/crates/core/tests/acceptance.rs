//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
//!
//! Runs without the libtest harness so every criterion reports even when an
//! earlier one fails; the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ionberry::berry::{
    adiabatic_evolve, adiabaticity_from_gap, crossover_table, floquet_quasienergies_of, wilson_loop_phase, wz_holonomy, CrossoverConfig,
    EvolveOptions, HolonomyOptions, Integrator, LoopPath, Regime, RotatingQuadrupole, DEFAULT_ADIABATIC_THRESHOLD,
};
use ionberry::commands::{cmd_fit_potential, cmd_phases, cmd_trap, loglog_slope};
use ionberry::config::RunConfig;
use ionberry::hamiltonian::{quadrupole_hamiltonian, QuadrupoleCoupling, QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use ionberry::linalg::{commutator, eigh, max_abs_diff, unitarity_defect, CMatrix, C64, I};
use ionberry::spin::{quadrupole_tensor, spin_operators, wigner_d, EulerAngles, Spin};
use ionberry::trap::{laplace_solve, solve_dirichlet, tilted_gradient_tensor, DirichletProblem, GridSpec, SolverOptions, TrapModel};
use ionberry::units::hz_to_rad_per_s;

const S32: Spin = Spin::THREE_HALVES;
const TOL: f64 = DEFAULT_DEGENERACY_TOL;

/// Distance between phase factors, `|arg(e^{i(a−b)})|`.
fn dphase(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(2.0 * PI) - PI).abs()
}

/// Doublet phases for labels 3/2, 1/2, −1/2, −3/2, written out independently.
fn doublet_oracle(theta: f64) -> [f64; 4] {
    let c = theta.cos();
    let outer = 3.0 * PI * (1.0 - c);
    let inner = PI * ((4.0 - 3.0 * c * c).sqrt() - 1.0);
    [outer, -inner, inner, -outer]
}

/// Lowest cost pairing of two equal-length phase lists.
fn paired_error(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), 2);
    let direct = dphase(got[0], want[0]).max(dphase(got[1], want[1]));
    let swapped = dphase(got[0], want[1]).max(dphase(got[1], want[0]));
    direct.min(swapped)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn closed_form_values() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.physics.theta_deg = vec![0.0, 90.0, 180.0];
    cfg.numerics.n_steps = 200;
    let table = cmd_phases(&cfg).expect("phases runs");
    let thetas = table.numbers("theta_deg").unwrap();
    let ms = table.numbers("m").unwrap();
    let cf = table.numbers("closed_form").unwrap();
    let expected = |th: f64, m: f64| -> f64 {
        let row = match th as i64 {
            0 => [0.0, 0.0, 0.0, 0.0],
            90 => [3.0 * PI, -PI, PI, -3.0 * PI],
            _ => [6.0 * PI, 0.0, 0.0, -6.0 * PI],
        };
        row[(1.5 - m) as usize]
    };
    let mut worst = 0.0_f64;
    let mut seen = 0;
    for k in 0..cf.len() {
        worst = worst.max((cf[k] - expected(thetas[k], ms[k])).abs());
        seen += 1;
    }
    outcome(seen == 12 && worst < 1e-12, format!("{seen} values, max |Δ| = {worst:.1e} (tol 1e-12)"))
}

fn method_agreement() -> Outcome {
    const N: usize = 4000;
    const LIMIT: f64 = 1e-6;
    let thetas = [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0];
    let mut lines = Vec::new();
    let mut pass = true;
    for &theta in &thetas {
        let want = doublet_oracle(theta);
        let path = LoopPath::uniform(theta, N).unwrap();

        let split = QuadrupoleFamily::with_zeeman(S32, 1.0, theta, 0.05, ZeemanAxis::Principal);
        let mut wilson = 0.0_f64;
        for (m, w) in [(1.5, want[0]), (-1.5, want[3])] {
            let band = split.rank_of_label(m, TOL).unwrap();
            let g = wilson_loop_phase(&split, &path, band, TOL).unwrap();
            wilson = wilson.max(dphase(g, w));
        }

        let fam = QuadrupoleFamily::new(S32, 1.0, theta);
        let spec = fam.reference_spectrum(TOL).unwrap();
        let mut wz = [0.0; 2];
        for group in &spec.degenerate_groups {
            let outer = spec.energies[group[0]].label.abs() > 1.0;
            let h = wz_holonomy(&fam, &path, group, TOL, HolonomyOptions::default()).unwrap();
            let target = if outer { [want[0], want[3]] } else { [want[1], want[2]] };
            wz[usize::from(!outer)] = paired_error(&h.eigenphases, &target);
        }
        let ok = wilson < LIMIT && wz[0] < LIMIT && wz[1] < LIMIT;
        pass &= ok;
        lines.push(format!(
            "θ={:5.1}° wilson±3/2 {wilson:.2e} wz±3/2 {:.2e} wz±1/2 {:.2e}{}",
            theta.to_degrees(),
            wz[0],
            wz[1],
            if ok { "" } else { " ✗" }
        ));
    }
    outcome(pass, format!("n={N}, tol {LIMIT:.0e}\n    {}", lines.join("\n    ")))
}

/// Rotating-frame oracle: eigenvalues of `H_tilt + ωSz` shifted by π/T, mod ω.
fn rotating_oracle(fam: &QuadrupoleFamily, omega: f64) -> Vec<f64> {
    let sz = spin_operators(S32).sz;
    let (vals, _) = eigh(&(fam.h_tilt() + sz.scale(omega))).unwrap();
    vals.iter().map(|e| e + omega / 2.0).collect()
}

fn mod_distance(a: &[f64], b: &[f64], omega: f64) -> f64 {
    let d = |x: f64, y: f64| {
        let r = (x - y).rem_euclid(omega);
        r.min(omega - r)
    };
    a.iter().chain(b).fold(0.0_f64, |acc, &x| {
        let other = if a.contains(&x) { b } else { a };
        acc.max(other.iter().map(|&y| d(x, y)).fold(f64::INFINITY, f64::min))
    })
}

fn floquet_oracle() -> Outcome {
    let theta = PI / 3.0;
    let fam = QuadrupoleFamily::new(S32, 1.0, theta);
    let mut pass = true;
    let mut lines = Vec::new();

    let mut worst = 0.0_f64;
    for omega in [1e-1, 1e-2, 1e-3] {
        let q = floquet_quasienergies_of(&fam, omega, 10_000, Integrator::Magnus4).unwrap();
        let d = mod_distance(&q, &rotating_oracle(&fam, omega), omega);
        worst = worst.max(d);
        lines.push(format!("ω/α={omega:.0e}: |U(T) − rotating frame| = {d:.2e}"));
    }
    pass &= worst < 1e-8;

    let ladder = [1e-2, 1e-3, 1e-4];
    let residuals: Vec<f64> = ladder
        .iter()
        .map(|&omega| {
            let steps = (200.0 / omega) as usize;
            let q = floquet_quasienergies_of(&fam, omega, steps, Integrator::Magnus4).unwrap();
            // E⁰ − γ/T with E⁰ = α(m² − 5/4), standard propagation sign
            let t = 2.0 * PI / omega;
            let g = doublet_oracle(theta);
            let predicted: Vec<f64> = [1.5f64, 0.5, -0.5, -1.5].iter().zip(g).map(|(m, g)| m * m - 1.25 - g / t).collect();
            mod_distance(&predicted, &q, omega)
        })
        .collect();
    let slope = loglog_slope(&ladder, &residuals);
    pass &= (slope - 2.0).abs() <= 0.3;
    lines.push(format!(
        "shifted-spectrum residual {:.2e} {:.2e} {:.2e}, slope {slope:.3} (2 ± 0.3)",
        residuals[0], residuals[1], residuals[2]
    ));
    outcome(pass, format!("n=1e4 tol 1e-8\n    {}", lines.join("\n    ")))
}

fn adiabatic_evolution() -> Outcome {
    let (theta, eps, m) = (PI / 2.0, 0.2, 1.5);
    let fam = QuadrupoleFamily::with_zeeman(S32, 1.0, theta, eps, ZeemanAxis::Principal);
    let (vals, _) = eigh(fam.h_tilt()).unwrap();
    let gap = vals.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min);
    let rank = fam.rank_of_label(m, TOL).unwrap();
    let (_, desc) = ionberry::hamiltonian::eigensystem(fam.h_tilt(), TOL).unwrap();
    let psi0 = desc.column(rank).into_owned();
    let target = 2.0 * PI * m * (1.0 - theta.cos());
    let opts = EvolveOptions {
        integrator: Integrator::Magnus4,
        ..EvolveOptions::default()
    };
    let ratios = [1e-1, 1e-2, 1e-3];
    let mut errors = Vec::new();
    let mut fidelity = 0.0;
    for r in ratios {
        let omega = r * gap;
        let drive = RotatingQuadrupole::new(fam.clone(), omega).unwrap();
        let steps = (200.0 / omega).ceil() as usize;
        let res = adiabatic_evolve(&drive, &psi0, drive.period(), steps, &opts).unwrap();
        errors.push(dphase(res.geometric_phase, target));
        fidelity = res.fidelity_to_initial_eigenstate;
    }
    let slope = loglog_slope(&ratios, &errors);
    let pass = (slope - 1.0).abs() <= 0.3 && fidelity > 0.99;
    outcome(
        pass,
        format!(
            "gap {gap:.3}α, errors {:.2e} {:.2e} {:.2e}, slope {slope:.3} (1 ± 0.3), fidelity at ω/gap=1e-3 {fidelity:.8} (> 0.99)",
            errors[0], errors[1], errors[2]
        ),
    )
}

fn anchors() -> Outcome {
    let hz = hz_to_rad_per_s;
    let ba = adiabaticity_from_gap(hz(300.0), hz(3.0), DEFAULT_ADIABATIC_THRESHOLD);
    let ca = adiabaticity_from_gap(hz(150.0), hz(150.0), DEFAULT_ADIABATIC_THRESHOLD);

    // splitting read off the eigenvalues of the full tensor Hamiltonian
    let splitting_hz = |coupling: &QuadrupoleCoupling| {
        let g = tilted_gradient_tensor(50e6, 0.7, 0.0, ionberry::hamiltonian::GradientMode::Physical).unwrap();
        let (vals, _) = eigh(&quadrupole_hamiltonian(&coupling.tensor(S32), &g)).unwrap();
        (vals[3] - vals[0]).abs() / (2.0 * PI)
    };
    let base = QuadrupoleCoupling::calcium();
    let s1 = splitting_hz(&base);
    let s2 = splitting_hz(&base.scaled(2.0));
    let pass = (ba.ratio - 0.01).abs() < 1e-12 && ba.pass && (ca.ratio - 1.0).abs() < 1e-12 && !ca.pass && (s1 - 150.0).abs() < 1e-9 && (s2 - 300.0).abs() < 1e-9;
    outcome(
        pass,
        format!(
            "300/3 Hz ratio {} pass={}; 150/150 Hz ratio {} pass={}; splitting {s1:.9} Hz → {s2:.9} Hz under 2× moment",
            ba.ratio, ba.pass, ca.ratio, ca.pass
        ),
    )
}

fn electrostatics() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let tight = SolverOptions {
        tol: 1e-12,
        max_iters: 200_000,
        check_every: 10,
    };

    // harmonic oracle u = sin x sin y sinh(√2 z) on [−1, 1]³
    let u = |p: [f64; 3]| p[0].sin() * p[1].sin() * (2f64.sqrt() * p[2]).sinh();
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for n in [17, 33, 65] {
        let grid = GridSpec::new(n, 1.0).unwrap();
        let sol = solve_dirichlet(&DirichletProblem::with_boundary(grid, u), &tight).unwrap();
        let mut err = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    err = err.max((sol.values[grid.index(i, j, k)] - u(grid.point(i, j, k))).abs());
                }
            }
        }
        hs.push(grid.spacing());
        errs.push(err);
    }
    let slope = loglog_slope(&hs, &errs);
    pass &= (slope - 2.0).abs() <= 0.3;
    lines.push(format!("harmonic benchmark errors {:.2e} {:.2e} {:.2e}, slope {slope:.3} (2 ± 0.3)", errs[0], errs[1], errs[2]));

    // the discrete Laplacian is exact on x² − y²
    let grid = GridSpec::new(33, 1.0).unwrap();
    let quad = |p: [f64; 3]| p[0] * p[0] - p[1] * p[1];
    let sol = solve_dirichlet(&DirichletProblem::with_boundary(grid, quad), &tight).unwrap();
    let qerr = (0..grid.len())
        .map(|idx| {
            let (i, j, k) = (idx / (33 * 33), (idx / 33) % 33, idx % 33);
            (sol.values[idx] - quad(grid.point(i, j, k))).abs()
        })
        .fold(0.0, f64::max);
    pass &= qerr < 1e-8;
    lines.push(format!("ideal quadrupole boundary reproduced to {qerr:.1e}"));

    // superposition at 129³: φ(2V₀) = 2φ(V₀) cell-wise within 2·tol
    let cfg = RunConfig::default();
    let opts = cfg.numerics.solver();
    let model = TrapModel::default_geometry();
    let grid = GridSpec::new(129, model.box_half_width).unwrap();
    let v0 = model.drive_amplitude;
    let a = laplace_solve(&model, 0.0, grid, &opts).unwrap();
    let b = laplace_solve(&model.with_amplitude(2.0 * v0), 0.0, grid, &opts).unwrap();
    let sup = b.max_abs_diff(&a.scaled(2.0)) / (2.0 * v0);
    pass &= sup <= 2.0 * opts.tol;
    lines.push(format!("superposition |φ(2V₀) − 2φ(V₀)|/2V₀ = {sup:.1e} (≤ 2·tol = {:.0e})", 2.0 * opts.tol));
    let solve = |v: &[f64]| solve_dirichlet(&DirichletProblem::from_model(&model, grid, v, 0.0).unwrap(), &opts).unwrap();
    let both = solve(&[1.0, 1.0, 0.0, 0.0]);
    let sum = solve(&[1.0, 0.0, 0.0, 0.0]).combine(1.0, &solve(&[0.0, 1.0, 0.0, 0.0]), 1.0).unwrap();
    lines.push(format!("two-pair superposition at 129³ (reported): max |Δφ| = {:.1e} V per volt", both.max_abs_diff(&sum)));

    let base = Path::new(env!("CARGO_MANIFEST_DIR"));
    let trap = cmd_trap(&cfg, base).unwrap();
    let theta_ok = trap.summary.theta_deg.iter().all(|t| (t - 40.7).abs() <= 2.0);
    pass &= theta_ok && trap.summary.grid_n == 129;
    lines.push(format!(
        "default geometry at {}³: tilt per pair {:?}° (40.7 ± 2)",
        trap.summary.grid_n,
        trap.summary.theta_deg.iter().map(|t| (t * 1e3).round() / 1e3).collect::<Vec<_>>()
    ));

    let fits = cmd_fit_potential(&cfg, base).unwrap();
    let (va, fa) = &fits.fits[0];
    let (vb, fb) = &fits.fits[1];
    let ratio = fb.coefficients[2] / fa.coefficients[2];
    pass &= (*va, *vb) == (500.0, 1000.0) && (ratio - 2.0).abs() <= 0.04;
    lines.push(format!("quadratic coefficient {:.6e} → {:.6e} V/m², ratio {ratio:.6} (2 ± 2%)", fa.coefficients[2], fb.coefficients[2]));
    outcome(pass, lines.join("\n    "))
}

fn operator_algebra() -> Outcome {
    let mut worst = [0.0_f64; 6];
    let angles = [EulerAngles::new(0.3, 1.1, -0.7), EulerAngles::new(-2.0, 2.9, 0.4), EulerAngles::new(1.3, 0.05, 3.0)];
    for twice in 1..=10 {
        let s = Spin::from_twice(twice);
        let ops = spin_operators(s);
        let c = [&ops.sx, &ops.sy, &ops.sz];
        let id = CMatrix::identity(s.dim(), s.dim());
        for k in 0..3 {
            let (a, b, z) = (c[k], c[(k + 1) % 3], c[(k + 2) % 3]);
            worst[0] = worst[0].max(max_abs_diff(&commutator(a, b), &z.map(|x| x * I)));
        }
        let s2 = c.iter().fold(CMatrix::zeros(s.dim(), s.dim()), |acc, m| acc + *m * *m);
        let j = twice as f64 / 2.0;
        worst[1] = worst[1].max(max_abs_diff(&s2, &id.scale(j * (j + 1.0))));

        let q = quadrupole_tensor(s, 1.0);
        for e in &angles {
            let d = wigner_d(s, *e);
            worst[2] = worst[2].max(unitarity_defect(&d));
            let rot = |m: &CMatrix, a: f64| (m.map(|x| x * C64::new(0.0, -a))).exp();
            let direct = rot(&ops.sz, e.phi) * rot(&ops.sy, e.theta) * rot(&ops.sz, e.chi);
            worst[2] = worst[2].max(max_abs_diff(&d, &direct));
            let r = e.rotation_matrix();
            let dd = d.adjoint();
            for a in 0..3 {
                // D S_a D† = Σ_k R_ka S_k
                let lhs = &d * c[a] * &dd;
                let rhs = (0..3).fold(CMatrix::zeros(s.dim(), s.dim()), |acc, k| acc + c[k].scale(r[(k, a)]));
                worst[3] = worst[3].max(max_abs_diff(&lhs, &rhs));
                for b in 0..3 {
                    let lhs = &d * q.get(a, b) * &dd;
                    let mut rhs = CMatrix::zeros(s.dim(), s.dim());
                    for k in 0..3 {
                        for l in 0..3 {
                            rhs += q.get(k, l).scale(r[(k, a)] * r[(l, b)]);
                        }
                    }
                    worst[3] = worst[3].max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                worst[4] = worst[4].max(max_abs_diff(q.get(a, b), q.get(b, a)));
                worst[4] = worst[4].max(max_abs_diff(q.get(a, b), &q.get(a, b).adjoint()));
            }
        }
        worst[5] = worst[5].max(q.trace().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let limits = [1e-12, 1e-12, 1e-10, 1e-10, 1e-12, 1e-12];
    let names = ["commutators", "Casimir", "unitarity/exp", "tensor transform", "Q symmetry", "tr Q"];
    let pass = worst.iter().zip(limits).all(|(w, l)| *w <= l);
    let detail: Vec<String> = names.iter().zip(worst).zip(limits).map(|((n, w), l)| format!("{n} {w:.1e} (≤{l:.0e})")).collect();
    outcome(pass, format!("j ≤ 5: {}", detail.join(", ")))
}

fn crossover() -> Outcome {
    let theta = PI / 3.0;
    let omega = 1e-5;
    let cfg = CrossoverConfig {
        integrator: Integrator::Magnus4,
        steps_per_period: 2_000_000,
        ..CrossoverConfig::new(1.0, theta, omega, vec![1e-4, 1e-3, 1e-2, 1e-1, 5e-1])
    };
    let rows = crossover_table(&cfg).unwrap();
    let target = PI * (1.0 - theta.cos());
    let mut lines = Vec::new();
    for r in &rows {
        lines.push(format!(
            "ε={:.0e} {:?} {:?}: γ± = {:+.6} {:+.6}, |γ − ∓π(cosθ−1)| = {:.2e}, fidelity {:.6}",
            r.epsilon, r.axis, r.regime, r.dynamic_plus, r.dynamic_minus, r.split_error, r.fidelity_plus.min(r.fidelity_minus)
        ));
    }
    let limit_row = rows
        .iter()
        .filter(|r| r.axis == ZeemanAxis::Principal && r.regime == Regime::Split)
        .max_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
        .expect("a split-regime row");
    let own = paired_error(&[limit_row.dynamic_plus, limit_row.dynamic_minus], &[target, -target]);
    let pass = rows.len() == 10 && own < 1e-3;
    outcome(pass, format!("limit row ε={:.0e}: error {own:.2e} (tol 1e-3)\n    {}", limit_row.epsilon, lines.join("\n    ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 closed-form doublet phases", closed_form_values),
        ("2 Wilson loop and WZ holonomy vs closed form", method_agreement),
        ("3 Floquet propagator oracle and O(ω²) residual", floquet_oracle),
        ("4 adiabatic evolution O(ω) and fidelity", adiabatic_evolution),
        ("5 adiabaticity and splitting anchors", anchors),
        ("6 electrostatics", electrostatics),
        ("7 operator algebra", operator_algebra),
        ("8 crossover sweep", crossover),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name} [{:.1}s]\n    {}",
            if result.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
