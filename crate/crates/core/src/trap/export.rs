//! CSV export of grids, traces and fits.

use std::path::Path;

use crate::error::Result;
use crate::io::{fmt_num, Csv};
use crate::trap::fit::PolyFitReport;
use crate::trap::laplace::PotentialGrid;
use crate::trap::trace::FieldTrace;

pub const GRID_SCHEMA: &str = "ionberry.grid.v1";
pub const TRACE_SCHEMA: &str = "ionberry.trace.v1";
pub const FIT_SCHEMA: &str = "ionberry.diagonal-fit.v1";

/// `x,y,z,V` for every node, x slowest.
pub fn grid_csv(grid: &PotentialGrid) -> Csv {
    let g = grid.grid;
    let mut csv = Csv::new(GRID_SCHEMA, &["x", "y", "z", "V"]);
    for i in 0..g.n {
        for j in 0..g.n {
            for k in 0..g.n {
                csv.row(&[fmt_num(g.coord(i)), fmt_num(g.coord(j)), fmt_num(g.coord(k)), fmt_num(grid.values[g.index(i, j, k)])]);
            }
        }
    }
    csv
}

pub fn trace_csv(trace: &FieldTrace) -> Csv {
    let mut csv = Csv::new(TRACE_SCHEMA, &["t", "Ex", "Ey", "Ez"]);
    for s in &trace.samples {
        csv.row(&[fmt_num(s.t), fmt_num(s.e[0]), fmt_num(s.e[1]), fmt_num(s.e[2])]);
    }
    csv
}

/// Samples with fitted values and residuals.
pub fn fit_csv(report: &PolyFitReport) -> Csv {
    let mut csv = Csv::new(FIT_SCHEMA, &["s", "V", "V_fit", "residual"]);
    for (k, (&s, &v)) in report.positions.iter().zip(&report.potentials).enumerate() {
        csv.row(&[fmt_num(s), fmt_num(v), fmt_num(report.evaluate(s)), fmt_num(report.residuals[k])]);
    }
    csv
}

pub fn write_grid_csv(path: &Path, grid: &PotentialGrid) -> Result<()> {
    grid_csv(grid).write(path)
}

pub fn write_trace_csv(path: &Path, trace: &FieldTrace) -> Result<()> {
    trace_csv(trace).write(path)
}

pub fn write_fit_csv(path: &Path, report: &PolyFitReport) -> Result<()> {
    fit_csv(report).write(path)
}
