//! Ordinary least-squares polynomial fits of potential profiles.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trap::laplace::PotentialGrid;
use crate::trap::model::TrapModel;

/// Singular-value ratio below which the design matrix counts as rank deficient.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFitReport {
    /// Point the sampling line passes through (the trap centre).
    pub origin: [f64; 3],
    /// Unit direction of the sampling line.
    pub direction: [f64; 3],
    /// Signed distance along the line, m.
    pub positions: Vec<f64>,
    pub potentials: Vec<f64>,
    /// `c_0 … c_degree` of `V(s) = Σ c_k s^k`.
    pub coefficients: Vec<f64>,
    /// `σ² (XᵀX)⁻¹`, row-major, `(degree+1)²` entries.
    pub covariance: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

impl PolyFitReport {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn std_error(&self, k: usize) -> f64 {
        let p = self.coefficients.len();
        self.covariance[k * p + k].max(0.0).sqrt()
    }

    pub fn evaluate(&self, s: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

/// Least-squares fit of `y(x)` by a polynomial of the given degree.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<PolyFitReport> {
    let n = x.len();
    let p = degree + 1;
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if n < degree + 2 {
        return Err(Error::invalid(format!("need at least {} samples for a degree-{degree} fit, got {n}", degree + 2)));
    }
    // fit in u = x/scale so the design matrix is well conditioned at any length unit
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let design = DMatrix::from_fn(n, p, |r, c| (x[r] / scale).powi(c as i32));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(Error::RankDeficient {
            condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
        });
    }
    let yv = DVector::from_column_slice(y);
    let coef = svd.solve(&yv, 0.0).map_err(|e| Error::invalid(e.to_string()))?;
    let fitted = &design * &coef;
    let residuals: Vec<f64> = (0..n).map(|k| y[k] - fitted[k]).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 1.0 };
    let sigma2 = if n > p { ssr / (n - p) as f64 } else { 0.0 };
    // (XᵀX)⁻¹ = V Σ⁻² Vᵀ
    let v = svd.v_t.as_ref().expect("v requested").transpose();
    let inv_s2 = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / (s * s)));
    let unscale = DMatrix::from_diagonal(&DVector::from_fn(p, |k, _| scale.powi(-(k as i32))));
    let coef = &unscale * coef;
    let cov = &unscale * (&v * inv_s2 * v.transpose()) * &unscale * sigma2;
    Ok(PolyFitReport {
        origin: [0.0; 3],
        direction: [0.0, 0.0, 1.0],
        positions: x.to_vec(),
        potentials: y.to_vec(),
        coefficients: coef.iter().copied().collect(),
        covariance: (0..p).flat_map(|r| (0..p).map(move |c| (r, c))).map(|(r, c)| cov[(r, c)]).collect(),
        r_squared,
        residuals,
    })
}

/// Fit the potential along the line through the trap centre joining the two
/// rods of endcap pair `pair`.
///
/// Samples are evenly spaced on `[−extent, extent]` and any sample inside an
/// electrode is skipped.
pub fn fit_diagonal_potential(
    grid: &PotentialGrid,
    model: &TrapModel,
    pair: usize,
    extent: f64,
    samples: usize,
    degree: usize,
) -> Result<PolyFitReport> {
    let d = model
        .pairs
        .get(pair)
        .ok_or_else(|| Error::invalid(format!("no endcap pair {pair}")))?
        .midline();
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let mut s = Vec::new();
    let mut v = Vec::new();
    for k in 0..samples {
        let t = -extent + 2.0 * extent * k as f64 / (samples - 1) as f64;
        let p = [t * d[0], t * d[1], t * d[2]];
        if model.in_electrode(p) {
            continue;
        }
        if let Some(val) = grid.value_at(p) {
            s.push(t);
            v.push(val);
        }
    }
    let mut report = polyfit(&s, &v, degree)?;
    report.direction = d;
    Ok(report)
}
