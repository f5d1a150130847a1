//! Finite-difference Laplace solver on a uniform cubic grid.
//!
//! 7-point stencil, red-black successive over-relaxation with
//! `ω = 2 / (1 + sin(π/(n−1)))`. Dirichlet cells (the box faces and every cell
//! whose centre lies inside an electrode) keep their values exactly. The sweep
//! order is fixed, so the result is bitwise reproducible for a given input.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trap::model::TrapModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per axis, including both faces.
    pub n: usize,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 5 {
            return Err(Error::invalid("grid needs at least 5 points per axis"));
        }
        if !(half_width > 0.0) {
            return Err(Error::invalid("grid half-width must be positive"));
        }
        Ok(GridSpec { n, half_width })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.coord(i), self.coord(j), self.coord(k)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Max interior residual relative to the largest Dirichlet magnitude.
    pub tol: f64,
    pub max_iters: usize,
    /// Sweeps between residual evaluations.
    pub check_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iters: 100_000,
            check_every: 10,
        }
    }
}

/// Boundary-value problem: `fixed[i]` marks Dirichlet cells whose value is `values[i]`.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub grid: GridSpec,
    pub fixed: Vec<bool>,
    pub values: Vec<f64>,
}

impl DirichletProblem {
    /// Grounded box faces, free interior.
    pub fn grounded_box(grid: GridSpec) -> Self {
        let n = grid.n;
        let mut fixed = vec![false; grid.len()];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1 {
                        fixed[grid.index(i, j, k)] = true;
                    }
                }
            }
        }
        DirichletProblem {
            grid,
            fixed,
            values: vec![0.0; grid.len()],
        }
    }

    /// Box faces set to `f(x, y, z)`, free interior initialised to zero.
    pub fn with_boundary(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut p = Self::grounded_box(grid);
        let n = grid.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = grid.index(i, j, k);
                    if p.fixed[idx] {
                        p.values[idx] = f(grid.point(i, j, k));
                    }
                }
            }
        }
        p
    }

    /// Grounded box with every electrode cell fixed at its given voltage.
    ///
    /// `pair_voltages` holds one value per endcap pair; static electrodes use
    /// their configured voltage scaled by `static_scale`.
    pub fn from_model(model: &TrapModel, grid: GridSpec, pair_voltages: &[f64], static_scale: f64) -> Result<Self> {
        model.validate()?;
        if pair_voltages.len() != model.pairs.len() {
            return Err(Error::DimensionMismatch {
                expected: model.pairs.len(),
                got: pair_voltages.len(),
            });
        }
        if grid.half_width + 1e-12 < model.box_half_width || grid.half_width > model.box_half_width + 1e-12 {
            return Err(Error::Geometry("grid extent must equal the model's box".into()));
        }
        let h = grid.spacing();
        if model.smallest_radius() < 3.0 * h - 1e-12 {
            return Err(Error::Geometry(format!(
                "grid spacing {h:.4e} resolves the smallest electrode radius {:.4e} by fewer than 3 cells",
                model.smallest_radius()
            )));
        }
        let mut p = Self::grounded_box(grid);
        let mut electrodes: Vec<(crate::trap::model::Rod, f64)> = Vec::new();
        for (pair, &v) in model.pairs.iter().zip(pair_voltages) {
            for rod in pair.rods {
                electrodes.push((rod, v));
            }
        }
        for e in &model.static_electrodes {
            electrodes.push((e.rod, e.voltage * static_scale));
        }
        let n = grid.n;
        for (rod, v) in electrodes {
            // bounding index range of the cylinder
            let lo = |c: f64, r: f64| (((c - r + grid.half_width) / h).floor().max(0.0)) as usize;
            let hi = |c: f64, r: f64| ((((c + r + grid.half_width) / h).ceil()) as usize).min(n - 1);
            let (cx, cy, cz) = (rod.center[0], rod.center[1], rod.center[2]);
            for i in lo(cx, rod.radius)..=hi(cx, rod.radius) {
                for j in lo(cy, rod.radius)..=hi(cy, rod.radius) {
                    for k in lo(cz, rod.half_length)..=hi(cz, rod.half_length) {
                        if rod.contains(grid.point(i, j, k)) {
                            let idx = grid.index(i, j, k);
                            p.fixed[idx] = true;
                            p.values[idx] = v;
                        }
                    }
                }
            }
        }
        Ok(p)
    }
}

/// Converged potential on the grid.
#[derive(Debug, Clone)]
pub struct PotentialGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub fixed: Vec<bool>,
    /// Max interior residual of the 7-point Laplacian (as `|mean(neighbours) − φ|`).
    pub residual: f64,
    pub iterations: usize,
}

fn sor_sweep(values: &mut [f64], fixed: &[bool], n: usize, color: usize, w: f64) {
    let nn = n * n;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let base = (i * n + j) * n;
            let start = 1 + (i + j + 1 + color) % 2;
            let mut k = start;
            while k < n - 1 {
                let idx = base + k;
                if !fixed[idx] {
                    let avg = (values[idx - 1] + values[idx + 1] + values[idx - n] + values[idx + n] + values[idx - nn] + values[idx + nn])
                        / 6.0;
                    values[idx] += w * (avg - values[idx]);
                }
                k += 2;
            }
        }
    }
}

fn max_residual(values: &[f64], fixed: &[bool], n: usize) -> f64 {
    let nn = n * n;
    let mut worst = 0.0_f64;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let base = (i * n + j) * n;
            for k in 1..n - 1 {
                let idx = base + k;
                if !fixed[idx] {
                    let avg = (values[idx - 1] + values[idx + 1] + values[idx - n] + values[idx + n] + values[idx - nn] + values[idx + nn])
                        / 6.0;
                    worst = worst.max((avg - values[idx]).abs());
                }
            }
        }
    }
    worst
}

pub fn solve_dirichlet(problem: &DirichletProblem, opts: &SolverOptions) -> Result<PotentialGrid> {
    let grid = problem.grid;
    let n = grid.n;
    let fixed = problem.fixed.clone();
    let mut values = problem.values.clone();
    let scale = problem
        .values
        .iter()
        .zip(&fixed)
        .filter(|(_, &f)| f)
        .fold(0.0_f64, |a, (v, _)| a.max(v.abs()));
    if scale == 0.0 {
        for (v, &f) in values.iter_mut().zip(&fixed) {
            if !f {
                *v = 0.0;
            }
        }
        return Ok(PotentialGrid {
            grid,
            values,
            fixed,
            residual: 0.0,
            iterations: 0,
        });
    }
    let w = 2.0 / (1.0 + (std::f64::consts::PI / (n - 1) as f64).sin());
    let target = opts.tol * scale;
    let mut residual = f64::INFINITY;
    let mut it = 0;
    while it < opts.max_iters {
        sor_sweep(&mut values, &fixed, n, 0, w);
        sor_sweep(&mut values, &fixed, n, 1, w);
        it += 1;
        if it % opts.check_every.max(1) == 0 {
            residual = max_residual(&values, &fixed, n);
            if residual < target {
                break;
            }
        }
    }
    if !(residual < target) {
        residual = max_residual(&values, &fixed, n);
        if !(residual < target) {
            return Err(Error::NonConvergence {
                what: "Laplace SOR",
                iterations: it,
                residual: residual / scale,
            });
        }
    }
    Ok(PotentialGrid {
        grid,
        values,
        fixed,
        residual: residual / scale,
        iterations: it,
    })
}

/// Quasi-static snapshot of the trap at time `t`.
pub fn laplace_solve(model: &TrapModel, t: f64, grid: GridSpec, opts: &SolverOptions) -> Result<PotentialGrid> {
    let problem = DirichletProblem::from_model(model, grid, &model.pair_voltages(t), 1.0)?;
    solve_dirichlet(&problem, opts)
}

impl PotentialGrid {
    /// Trilinear interpolation; `None` outside the grid.
    pub fn value_at(&self, p: [f64; 3]) -> Option<f64> {
        self.interpolate(p, |idx| self.values[idx])
    }

    fn interpolate(&self, p: [f64; 3], f: impl Fn(usize) -> f64) -> Option<f64> {
        let g = self.grid;
        let h = g.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let u = (p[a] + g.half_width) / h;
            if !(u >= 0.0 && u <= (g.n - 1) as f64) {
                return None;
            }
            let b = (u.floor() as usize).min(g.n - 2);
            base[a] = b;
            frac[a] = u - b as f64;
        }
        let mut acc = 0.0;
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    let wt = (if di == 1 { frac[0] } else { 1.0 - frac[0] })
                        * (if dj == 1 { frac[1] } else { 1.0 - frac[1] })
                        * (if dk == 1 { frac[2] } else { 1.0 - frac[2] });
                    if wt != 0.0 {
                        acc += wt * f(g.index(base[0] + di, base[1] + dj, base[2] + dk));
                    }
                }
            }
        }
        Some(acc)
    }

    /// Central-difference `E = −∇φ` at grid node `(i, j, k)`; one-sided on faces.
    pub fn field_at_node(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let g = self.grid;
        let h = g.spacing();
        let n = g.n;
        let idx = [i, j, k];
        let mut e = [0.0; 3];
        for a in 0..3 {
            let mut lo = idx;
            let mut hi = idx;
            let mut span = 2.0 * h;
            if idx[a] == 0 {
                hi[a] += 1;
                span = h;
            } else if idx[a] == n - 1 {
                lo[a] -= 1;
                span = h;
            } else {
                lo[a] -= 1;
                hi[a] += 1;
            }
            e[a] = -(self.values[g.index(hi[0], hi[1], hi[2])] - self.values[g.index(lo[0], lo[1], lo[2])]) / span;
        }
        e
    }

    /// Trilinear interpolation of the nodal central-difference field.
    pub fn field_at(&self, p: [f64; 3]) -> Option<[f64; 3]> {
        let g = self.grid;
        let n = g.n;
        let mut out = [0.0; 3];
        for (a, o) in out.iter_mut().enumerate() {
            *o = self.interpolate(p, |idx| {
                let i = idx / (n * n);
                let j = (idx / n) % n;
                let k = idx % n;
                self.field_at_node(i, j, k)[a]
            })?;
        }
        Some(out)
    }

    /// Cell-wise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &PotentialGrid, b: f64) -> Result<PotentialGrid> {
        if self.grid != other.grid {
            return Err(Error::invalid("cannot combine potentials on different grids"));
        }
        Ok(PotentialGrid {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
            fixed: self.fixed.iter().zip(&other.fixed).map(|(x, y)| *x || *y).collect(),
            residual: a.abs() * self.residual + b.abs() * other.residual,
            iterations: self.iterations.max(other.iterations),
        })
    }

    pub fn scaled(&self, a: f64) -> PotentialGrid {
        PotentialGrid {
            values: self.values.iter().map(|v| a * v).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs_diff(&self, other: &PotentialGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

/// Unit-voltage solution for each endcap pair plus the static electrodes.
///
/// By superposition the snapshot at any drive phase is
/// `Σ_k V_k(t) φ_k + φ_static`, so a whole period costs five solves.
#[derive(Debug, Clone)]
pub struct PairBasis {
    pub model: TrapModel,
    pub pairs: Vec<PotentialGrid>,
    pub static_part: PotentialGrid,
}

impl PairBasis {
    pub fn solve(model: &TrapModel, grid: GridSpec, opts: &SolverOptions) -> Result<Self> {
        let np = model.pairs.len();
        let mut jobs: Vec<(Vec<f64>, f64)> = (0..np)
            .map(|k| ((0..np).map(|j| if j == k { 1.0 } else { 0.0 }).collect(), 0.0))
            .collect();
        jobs.push((vec![0.0; np], 1.0));
        let mut solved: Vec<PotentialGrid> = jobs
            .par_iter()
            .map(|(v, s)| solve_dirichlet(&DirichletProblem::from_model(model, grid, v, *s)?, opts))
            .collect::<Result<_>>()?;
        let static_part = solved.pop().expect("static job present");
        Ok(PairBasis {
            model: model.clone(),
            pairs: solved,
            static_part,
        })
    }

    pub fn snapshot(&self, t: f64) -> Result<PotentialGrid> {
        let mut acc = self.static_part.clone();
        for (grid, v) in self.pairs.iter().zip(self.model.pair_voltages(t)) {
            acc = acc.combine(1.0, grid, v)?;
        }
        Ok(acc)
    }

    /// `E(p, t)` from the superposed nodal fields.
    pub fn field_at(&self, p: [f64; 3], t: f64) -> Option<[f64; 3]> {
        let mut e = self.static_part.field_at(p)?;
        for (grid, v) in self.pairs.iter().zip(self.model.pair_voltages(t)) {
            let ek = grid.field_at(p)?;
            for a in 0..3 {
                e[a] += v * ek[a];
            }
        }
        Some(e)
    }
}
