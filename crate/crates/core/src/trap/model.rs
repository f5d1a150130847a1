//! Electrode geometry of the four-rod endcap trap.
//!
//! Coordinates are metres, the trap axis is z and the trap centre is the
//! origin. Every electrode is a cylinder parallel to z.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rod {
    pub center: [f64; 3],
    pub radius: f64,
    pub half_length: f64,
}

impl Rod {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        dx * dx + dy * dy <= self.radius * self.radius && (p[2] - self.center[2]).abs() <= self.half_length
    }

    fn overlaps(&self, other: &Rod) -> bool {
        let dx = self.center[0] - other.center[0];
        let dy = self.center[1] - other.center[1];
        let radial = (dx * dx + dy * dy).sqrt() < self.radius + other.radius;
        let axial = (self.center[2] - other.center[2]).abs() < self.half_length + other.half_length;
        radial && axial
    }

    fn inside_box(&self, half_width: f64) -> bool {
        self.center[0].abs() + self.radius < half_width
            && self.center[1].abs() + self.radius < half_width
            && self.center[2].abs() + self.half_length < half_width
    }
}

/// Two body-diagonally opposite endcap rods wired together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndcapPair {
    pub rods: [Rod; 2],
    /// RF phase offset, radians.
    pub phase_offset: f64,
}

impl EndcapPair {
    /// Angle between the line joining the two rod centres and the z axis, in [0, π/2].
    pub fn midline_angle(&self) -> f64 {
        let [a, b] = &self.rods;
        let d = [b.center[0] - a.center[0], b.center[1] - a.center[1], b.center[2] - a.center[2]];
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        (d[2].abs() / n).acos()
    }

    /// Unit vector along the midline, oriented towards +z.
    pub fn midline(&self) -> [f64; 3] {
        let [a, b] = &self.rods;
        let mut d = [b.center[0] - a.center[0], b.center[1] - a.center[1], b.center[2] - a.center[2]];
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let s = if d[2] < 0.0 { -1.0 } else { 1.0 };
        for x in d.iter_mut() {
            *x *= s / n;
        }
        d
    }
}

/// A static electrode, e.g. an RF rod of the linear trap held at its DC level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticElectrode {
    pub name: String,
    pub rod: Rod,
    pub voltage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapModel {
    pub pairs: Vec<EndcapPair>,
    #[serde(default)]
    pub static_electrodes: Vec<StaticElectrode>,
    /// RF amplitude on the endcap pairs, V.
    pub drive_amplitude: f64,
    /// rad/s.
    pub drive_frequency: f64,
    /// The grounded box is `[−L, L]³`.
    pub box_half_width: f64,
}

impl TrapModel {
    /// Four endcap pairs whose rods sit at distance `rod_distance` from the
    /// centre on lines tilted by `midline_angle` from z, at azimuths 0, π/2,
    /// π and 3π/2, driven with phase offsets 0, π/2, π and 3π/2.
    pub fn four_rod(
        rod_distance: f64,
        midline_angle: f64,
        rod_radius: f64,
        rod_half_length: f64,
        box_half_width: f64,
        drive_amplitude: f64,
        drive_frequency: f64,
    ) -> Result<Self> {
        let r0 = rod_distance * midline_angle.sin();
        let zc = rod_distance * midline_angle.cos();
        let pairs = (0..4)
            .map(|k| {
                let b = k as f64 * PI / 2.0;
                let (s, c) = b.sin_cos();
                let rod = |sign: f64| Rod {
                    center: [sign * r0 * c, sign * r0 * s, sign * zc],
                    radius: rod_radius,
                    half_length: rod_half_length,
                };
                EndcapPair {
                    rods: [rod(1.0), rod(-1.0)],
                    phase_offset: b,
                }
            })
            .collect();
        let model = TrapModel {
            pairs,
            static_electrodes: Vec::new(),
            drive_amplitude,
            drive_frequency,
            box_half_width,
        };
        model.validate()?;
        Ok(model)
    }

    /// The geometry shipped in `data/default_trap.json`.
    pub fn default_geometry() -> Self {
        serde_json::from_str(include_str!("../../data/default_trap.json")).expect("bundled trap geometry parses")
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let model: TrapModel = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        model.validate()?;
        Ok(model)
    }

    pub fn with_amplitude(&self, v0: f64) -> Self {
        TrapModel {
            drive_amplitude: v0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.len() != 4 {
            return Err(Error::Geometry(format!("expected exactly four endcap pairs, found {}", self.pairs.len())));
        }
        if !(self.box_half_width > 0.0) {
            return Err(Error::Geometry("box half-width must be positive".into()));
        }
        for (i, a) in self.pairs.iter().enumerate() {
            for b in &self.pairs[i + 1..] {
                let d = crate::linalg::wrap_phase(a.phase_offset - b.phase_offset).abs();
                if d < 1e-9 {
                    return Err(Error::Geometry("endcap phase offsets must be distinct modulo 2π".into()));
                }
            }
        }
        let rods = self.all_rods();
        for (i, r) in rods.iter().enumerate() {
            if !(r.radius > 0.0 && r.half_length > 0.0) {
                return Err(Error::Geometry(format!("electrode {i} has non-positive size")));
            }
            if !r.inside_box(self.box_half_width) {
                return Err(Error::Geometry(format!("electrode {i} at {:?} extends outside the box", r.center)));
            }
            for (j, s) in rods.iter().enumerate().skip(i + 1) {
                if r.overlaps(s) {
                    return Err(Error::Geometry(format!("electrodes {i} and {j} overlap")));
                }
            }
        }
        if rods.iter().any(|r| r.contains([0.0; 3])) {
            return Err(Error::Geometry("an electrode covers the trap centre".into()));
        }
        Ok(())
    }

    /// Endcap rods pair by pair, then static electrodes.
    pub fn all_rods(&self) -> Vec<Rod> {
        self.pairs
            .iter()
            .flat_map(|p| p.rods.iter().copied())
            .chain(self.static_electrodes.iter().map(|e| e.rod))
            .collect()
    }

    pub fn smallest_radius(&self) -> f64 {
        self.all_rods().iter().map(|r| r.radius).fold(f64::INFINITY, f64::min)
    }

    /// Instantaneous voltage of each endcap pair, `V₀ cos(ωt + offset)`.
    pub fn pair_voltages(&self, t: f64) -> Vec<f64> {
        self.pairs
            .iter()
            .map(|p| self.drive_amplitude * (self.drive_frequency * t + p.phase_offset).cos())
            .collect()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.drive_frequency
    }

    /// Whether `p` lies inside any electrode.
    pub fn in_electrode(&self, p: [f64; 3]) -> bool {
        self.all_rods().iter().any(|r| r.contains(p))
    }

    /// Default off-axis sample point: 10% of the rod-centre radius, on the x axis.
    pub fn default_sample_point(&self) -> [f64; 3] {
        let [x, y, _] = self.pairs[0].rods[0].center;
        [0.1 * (x * x + y * y).sqrt(), 0.0, 0.0]
    }
}
