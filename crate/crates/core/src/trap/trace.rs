//! Electric field at a fixed point over one drive period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::GradientMode;
use crate::trap::analytic::analytic_field_at;
use crate::trap::laplace::PairBasis;
use crate::trap::model::TrapModel;

pub const MIN_TRACE_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub t: f64,
    pub e: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTrace {
    pub point: [f64; 3],
    pub period: f64,
    /// `samples_per_period + 1` entries; the last repeats the phase of the first.
    pub samples: Vec<FieldSample>,
}

impl FieldTrace {
    /// `|E(T) − E(0)|`.
    pub fn closure_error(&self) -> f64 {
        let a = self.samples.first().unwrap().e;
        let b = self.samples.last().unwrap().e;
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// Where field values come from.
pub enum FieldSource<'a> {
    Analytic { v0: f64, theta: f64, mode: GradientMode },
    Numeric(&'a PairBasis),
}

pub fn field_trace(model: &TrapModel, point: [f64; 3], samples_per_period: usize, source: FieldSource<'_>) -> Result<FieldTrace> {
    if samples_per_period < MIN_TRACE_SAMPLES {
        return Err(Error::invalid(format!(
            "a field trace needs at least {MIN_TRACE_SAMPLES} samples per period, got {samples_per_period}"
        )));
    }
    if model.in_electrode(point) {
        return Err(Error::invalid(format!("sample point {point:?} lies inside an electrode")));
    }
    let period = model.period();
    let omega = model.drive_frequency;
    let samples = (0..=samples_per_period)
        .map(|k| {
            let t = period * k as f64 / samples_per_period as f64;
            let e = match &source {
                FieldSource::Analytic { v0, theta, mode } => analytic_field_at(point, t, *v0, *theta, omega, *mode)?,
                FieldSource::Numeric(basis) => basis
                    .field_at(point, t)
                    .ok_or_else(|| Error::invalid(format!("sample point {point:?} lies outside the grid")))?,
            };
            Ok(FieldSample { t, e })
        })
        .collect::<Result<_>>()?;
    Ok(FieldTrace { point, period, samples })
}
