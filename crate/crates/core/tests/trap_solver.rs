use std::f64::consts::PI;


use ionberry::commands::loglog_slope;
use ionberry::trap::{
    field_trace, laplace_solve, polyfit, solve_dirichlet, DirichletProblem, FieldSource, GridSpec, PairBasis, SolverOptions, TrapModel,
};

const TIGHT: SolverOptions = SolverOptions {
    tol: 1e-12,
    max_iters: 200_000,
    check_every: 10,
};

fn max_error(n: usize, u: impl Fn([f64; 3]) -> f64 + Copy) -> (f64, f64) {
    let grid = GridSpec::new(n, 1.0).unwrap();
    let sol = solve_dirichlet(&DirichletProblem::with_boundary(grid, u), &TIGHT).unwrap();
    let mut err = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                err = err.max((sol.values[grid.index(i, j, k)] - u(grid.point(i, j, k))).abs());
            }
        }
    }
    (grid.spacing(), err)
}

#[test]
fn second_order_on_a_harmonic_function() {
    // e^{2x} cos(2y) is harmonic, with a quartic truncation error
    let u = |p: [f64; 3]| (2.0 * p[0]).exp() * (2.0 * p[1]).cos() + p[2];
    let (h, e): (Vec<f64>, Vec<f64>) = [9, 17, 33].iter().map(|&n| max_error(n, u)).unzip();
    let slope = loglog_slope(&h, &e);
    assert!((slope - 2.0).abs() <= 0.3, "slope {slope}, errors {e:?}");
}

#[test]
fn ideal_quadrupole_is_reproduced_and_fitted() {
    let u = |p: [f64; 3]| p[0] * p[0] - p[1] * p[1];
    let (_, err) = max_error(17, u);
    assert!(err < 1e-9);
    let grid = GridSpec::new(17, 1.0).unwrap();
    let sol = solve_dirichlet(&DirichletProblem::with_boundary(grid, u), &TIGHT).unwrap();
    let s: Vec<f64> = (2..15).map(|i| grid.coord(i)).collect();
    let v: Vec<f64> = s.iter().map(|&x| sol.value_at([x, 0.0, 0.0]).unwrap()).collect();
    let fit = polyfit(&s, &v, 2).unwrap();
    assert!((fit.coefficients[2] - 1.0).abs() < 1e-8);
    assert!(fit.coefficients[1].abs() < 1e-8);
}

/// Thick-rod variant of the default layout that a 33³ grid resolves.
fn small_model() -> (TrapModel, GridSpec) {
    let model = TrapModel::four_rod(1.5e-3, 40.7f64.to_radians(), 4e-4, 3e-4, 2e-3, 500.0, 2.0 * PI * 1e6).unwrap();
    let grid = GridSpec::new(33, model.box_half_width).unwrap();
    (model, grid)
}

#[test]
fn pair_basis_snapshot_matches_a_direct_solve() {
    let (model, grid) = small_model();
    let basis = PairBasis::solve(&model, grid, &TIGHT).unwrap();
    let t = 0.3 * model.period();
    let direct = laplace_solve(&model, t, grid, &TIGHT).unwrap();
    let snap = basis.snapshot(t).unwrap();
    assert!(snap.max_abs_diff(&direct) < 1e-7 * model.drive_amplitude);
}

#[test]
fn voltage_scaling_is_linear() {
    let (model, grid) = small_model();
    let opts = SolverOptions::default();
    let a = laplace_solve(&model, 0.0, grid, &opts).unwrap();
    let b = laplace_solve(&model.with_amplitude(2.0 * model.drive_amplitude), 0.0, grid, &opts).unwrap();
    assert!(b.max_abs_diff(&a.scaled(2.0)) <= 2.0 * opts.tol * 2.0 * model.drive_amplitude);
}

#[test]
fn field_trace_closes_over_a_period() {
    let (model, grid) = small_model();
    let basis = PairBasis::solve(&model, grid, &SolverOptions::default()).unwrap();
    let p = model.default_sample_point();
    let tr = field_trace(&model, p, 32, FieldSource::Numeric(&basis)).unwrap();
    assert!(tr.closure_error() < 1e-9 * model.drive_amplitude / model.box_half_width);
    assert_eq!(tr.samples.len(), 33);
}
