//! Geometric phases of a spin in a rotating electric quadrupole field.

pub mod berry;
pub mod commands;
pub mod config;
pub mod error;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod spin;
pub mod trap;
pub mod units;

pub use error::{Error, Result};
