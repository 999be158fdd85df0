//! Coherent states for unbounded quantum motions: the linear-potential
//! family built from a time-dependent integral of motion, and the
//! pseudo-action / angle family over a continuous energy spectrum.

pub mod classical_paa;
pub mod error;
pub mod figio;
pub mod grid;
pub mod linear_cs;
pub mod numerics;
pub mod paa_cs;

pub use error::{Error, Result};
