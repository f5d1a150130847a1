use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use ionberry::berry::{
    closed_form_phases, one_period_propagator, wilson_loop_from_states, wilson_loop_phase, wz_holonomy, HolonomyOptions, Integrator,
    LoopPath, RotatingQuadrupole,
};
use ionberry::commands::loglog_slope;
use ionberry::hamiltonian::{eigensystem, FnFamily, ParametricHamiltonian, QuadrupoleFamily, ZeemanAxis, DEFAULT_DEGENERACY_TOL};
use ionberry::linalg::{unitarity_defect, C64};
use ionberry::spin::{spin_operators, Spin};
use ionberry::Error;

const TOL: f64 = DEFAULT_DEGENERACY_TOL;

fn dphase(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(2.0 * PI) - PI).abs()
}

#[test]
fn gauge_invariance() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let fam = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, 1.0, 0.9, 0.05, ZeemanAxis::Principal);
    let path = LoopPath::uniform(0.9, 500).unwrap();
    for band in 0..4 {
        let states: Vec<_> = path
            .samples
            .iter()
            .map(|&phi| eigensystem(&fam.at(phi), TOL).unwrap().1.column(band).into_owned())
            .collect();
        let base = wilson_loop_from_states(&states);
        let scrambled: Vec<_> = states.iter().map(|v| v * C64::from_polar(1.0, rng.gen_range(-PI..PI))).collect();
        assert!(dphase(wilson_loop_from_states(&scrambled), base) < 1e-12);
    }
}

#[test]
fn spin_half_cone_converges_quadratically() {
    let theta: f64 = 1.1;
    let ops = spin_operators(Spin::from_twice(1));
    let fam = FnFamily::new(2, move |phi: f64| ops.along([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]));
    let want = -PI * (1.0 - theta.cos());
    let ns = [50.0, 100.0, 200.0, 400.0];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let path = LoopPath::uniform(theta, n as usize).unwrap();
            dphase(wilson_loop_phase(&fam, &path, 0, TOL).unwrap(), want)
        })
        .collect();
    let slope = loglog_slope(&ns, &errs);
    assert!((slope + 2.0).abs() <= 0.3, "slope {slope}, errors {errs:?}");
}

#[test]
fn split_wilson_loops_approach_the_outer_holonomy() {
    let n = 2000;
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let path = LoopPath::uniform(theta, n).unwrap();
        let fam = QuadrupoleFamily::new(Spin::THREE_HALVES, 1.0, theta);
        let spec = fam.reference_spectrum(TOL).unwrap();
        let outer = spec.degenerate_groups.iter().find(|g| spec.energies[g[0]].label.abs() > 1.0).unwrap();
        let wz = wz_holonomy(&fam, &path, outer, TOL, HolonomyOptions::default()).unwrap();
        for eps in [1e-2, 1e-3] {
            let split = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, 1.0, theta, eps, ZeemanAxis::Principal);
            for m in [1.5, -1.5] {
                let g = wilson_loop_phase(&split, &path, split.rank_of_label(m, TOL).unwrap(), TOL).unwrap();
                let nearest = wz.eigenphases.iter().map(|&e| dphase(g, e)).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-4, "θ={theta} ε={eps} m={m}: {nearest}");
            }
        }
    }
}

#[test]
fn degenerate_band_is_refused() {
    let fam = QuadrupoleFamily::new(Spin::THREE_HALVES, 1.0, 0.7);
    let path = LoopPath::uniform(0.7, 50).unwrap();
    assert!(matches!(wilson_loop_phase(&fam, &path, 0, TOL), Err(Error::DegenerateBand { .. })));
    let split = QuadrupoleFamily::with_zeeman(Spin::THREE_HALVES, 1.0, 0.7, 0.1, ZeemanAxis::Principal);
    assert!(matches!(
        wz_holonomy(&split, &path, &[0, 1], TOL, HolonomyOptions::default()),
        Err(Error::DegeneracyLifted { .. })
    ));
}

#[test]
fn holonomies_and_propagators_are_unitary() {
    for theta in [0.4, 1.3, 2.5] {
        let fam = QuadrupoleFamily::new(Spin::THREE_HALVES, 1.0, theta);
        let path = LoopPath::uniform(theta, 300).unwrap();
        for per_step_polar in [false, true] {
            for group in [[0usize, 1], [2, 3]] {
                let h = wz_holonomy(&fam, &path, &group, TOL, HolonomyOptions { per_step_polar }).unwrap();
                assert!(unitarity_defect(&h.matrix) < 1e-8);
            }
        }
        let drive = RotatingQuadrupole::new(fam, 0.05).unwrap();
        let u = one_period_propagator(&drive, drive.period(), 2000, Integrator::Midpoint).unwrap();
        assert!(unitarity_defect(&u) < 1e-8);
    }
}

proptest! {
    #[test]
    fn phase_set_is_antisymmetric(theta in 0.0f64..=PI) {
        let p = closed_form_phases(theta).unwrap();
        for m in [1.5, 0.5] {
            prop_assert_eq!(p.get(m).unwrap(), -p.get(-m).unwrap());
        }
    }
}
