//! The single conversion layer between user-facing units and internal ones.
//!
//! Internally ħ = 1, energies are angular frequencies (rad/s) and angles are
//! radians. Configuration files and the command line speak Hz and degrees.

use std::f64::consts::PI;

pub fn hz_to_rad_per_s(hz: f64) -> f64 {
    2.0 * PI * hz
}

pub fn rad_per_s_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

/// V/mm² → V/m².
pub fn v_per_mm2_to_v_per_m2(g: f64) -> f64 {
    g * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((rad_per_s_to_hz(hz_to_rad_per_s(300.0)) - 300.0).abs() < 1e-12);
        assert!((rad_to_deg(deg_to_rad(40.7)) - 40.7).abs() < 1e-12);
        assert_eq!(v_per_mm2_to_v_per_m2(50.0), 5.0e7);
    }
}
