//! Coherent states for a particle in a constant force field.
//!
//! Dimensionless problem: `i dPsi/dtau = (sqrt2 b x - d^2/dx^2) Psi`. The
//! integral of motion is `A(tau) = f a + g a^+ + phi` with
//! `f = c1 + i(c1+c2) tau`, `g = c2 - i(c1+c2) tau`,
//! `phi = b tau [i(c1-c2) - (c1+c2) tau]`, and the states are its
//! eigenfunctions.

mod state;
mod verify;

pub use state::{EigenOdeSolution, LinearCs, Moments};
pub use verify::{kernel_completeness_check, ode_residual, ode_residual_of, overlap};

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DELTA_TOLERANCE: f64 = 1e-10;

/// Physical parameters from which the dimensionless force constant follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits {
    pub mass: f64,
    pub force: f64,
    pub length: f64,
    pub hbar: f64,
}

impl PhysicalUnits {
    /// `b = sqrt2 m l^3 alpha / hbar^2`.
    pub fn dimensionless_b(&self) -> f64 {
        SQRT_2 * self.mass * self.length.powi(3) * self.force / (self.hbar * self.hbar)
    }

    /// `tau = hbar t / (2 m l^2)`.
    pub fn dimensionless_time(&self, t: f64) -> f64 {
        self.hbar * t / (2.0 * self.mass * self.length * self.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    b: f64,
    physical: Option<PhysicalUnits>,
}

impl LinearModel {
    pub fn new(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidDomain(format!("b must be finite, got {b}")));
        }
        Ok(Self { b, physical: None })
    }

    pub fn from_physical(units: PhysicalUnits) -> Result<Self> {
        if !(units.mass > 0.0 && units.length > 0.0 && units.hbar > 0.0) {
            return Err(Error::InvalidDomain("mass, length and hbar must be positive".into()));
        }
        let mut m = Self::new(units.dimensionless_b())?;
        m.physical = Some(units);
        Ok(m)
    }

    /// Pairs a stored `b` with the physical quadruple it should come from.
    pub fn with_physical(b: f64, units: PhysicalUnits) -> Result<Self> {
        let derived = Self::from_physical(units)?;
        if (derived.b - b).abs() > 1e-12 * b.abs().max(derived.b.abs()) {
            return Err(Error::InvalidDomain(format!(
                "b = {b} does not match the physical parameters (which give {})",
                derived.b
            )));
        }
        Ok(Self { b, physical: Some(units) })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn physical(&self) -> Option<PhysicalUnits> {
        self.physical
    }

    pub fn potential(&self, x: f64) -> f64 {
        SQRT_2 * self.b * x
    }
}

/// `Delta = |c1|^2 - |c2|^2`, the commutator `[A, A^+]`.
pub fn delta(c1: Complex64, c2: Complex64) -> f64 {
    c1.norm_sqr() - c2.norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionIntegralCoeffs {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl MotionIntegralCoeffs {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        if !(c1.re.is_finite() && c1.im.is_finite() && c2.re.is_finite() && c2.im.is_finite()) {
            return Err(Error::NonFinite("c1/c2"));
        }
        Ok(Self { c1, c2 })
    }

    /// Coefficients with `Delta = 1` checked.
    pub fn unit(c1: Complex64, c2: Complex64) -> Result<Self> {
        let c = Self::new(c1, c2)?;
        c.require_unit()?;
        Ok(c)
    }

    pub fn standard() -> Self {
        Self {
            c1: Complex64::new(1.0, 0.0),
            c2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn delta(&self) -> f64 {
        delta(self.c1, self.c2)
    }

    pub fn require_unit(&self) -> Result<()> {
        let d = self.delta();
        if (d - 1.0).abs() <= DELTA_TOLERANCE {
            return Ok(());
        }
        let hint = if d < 0.0 {
            "; for Delta < 0 treat B = A^+ as the annihilation operator by swapping c1 and c2 (conjugated)"
        } else if d.abs() <= DELTA_TOLERANCE {
            "; Delta = 0 gives a self-adjoint integral of motion, which has no coherent states"
        } else {
            "; rescale c1, c2 by 1/sqrt(Delta)"
        };
        Err(Error::DeltaNotUnit { delta: d, hint })
    }

    /// `f + g = c1 + c2`, constant in time.
    pub fn sum(&self) -> Complex64 {
        self.c1 + self.c2
    }

    /// `f - g` at time `tau`.
    pub fn difference(&self, tau: f64) -> Complex64 {
        self.c1 - self.c2 + Complex64::i() * 2.0 * self.sum() * tau
    }

    pub fn f(&self, tau: f64) -> Complex64 {
        self.c1 + Complex64::i() * self.sum() * tau
    }

    pub fn g(&self, tau: f64) -> Complex64 {
        self.c2 - Complex64::i() * self.sum() * tau
    }

    pub fn phi(&self, b: f64, tau: f64) -> Complex64 {
        b * tau * (Complex64::i() * (self.c1 - self.c2) - self.sum() * tau)
    }
}

/// Eigenvalue label `Z` of the integral of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsLabel {
    pub z: Complex64,
}

impl CsLabel {
    pub fn new(z: Complex64) -> Self {
        Self { z }
    }

    /// `Z = (c1+c2) x0 / sqrt2 + i (c1-c2) p0 / (2 sqrt2)`.
    pub fn from_initial_data(x0: f64, p0: f64, coeffs: &MotionIntegralCoeffs) -> Self {
        let z = coeffs.sum() * x0 / SQRT_2 + Complex64::i() * (coeffs.c1 - coeffs.c2) * p0 / (2.0 * SQRT_2);
        Self { z }
    }

    /// `x0 = [(c1-c2) Z^* + (c1-c2)^* Z] / sqrt2`.
    pub fn x0(&self, coeffs: &MotionIntegralCoeffs) -> f64 {
        let d = coeffs.c1 - coeffs.c2;
        let v = (d * self.z.conj() + d.conj() * self.z) / SQRT_2;
        v.re
    }

    /// `p0 = i sqrt2 [(c1+c2) Z^* - (c1+c2)^* Z]`.
    pub fn p0(&self, coeffs: &MotionIntegralCoeffs) -> f64 {
        let s = coeffs.sum();
        let v = Complex64::i() * SQRT_2 * (s * self.z.conj() - s.conj() * self.z);
        v.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(c(1.0, 0.0), c(0.0, 0.0)), 1.0);
        assert!((delta(c(3.0, 0.0), c(8f64.sqrt(), 0.0)) - 1.0).abs() < 1e-14);
        let z = c(0.3, -1.7);
        assert_eq!(delta(z, z), 0.0);
    }

    #[test]
    fn delta_rejections_carry_hints() {
        let e = MotionIntegralCoeffs::unit(c(0.0, 0.0), c(1.0, 0.0)).unwrap_err();
        match e {
            Error::DeltaNotUnit { delta, hint } => {
                assert_eq!(delta, -1.0);
                assert!(hint.contains("annihilation"));
            }
            other => panic!("{other:?}"),
        }
        assert!(MotionIntegralCoeffs::unit(c(2.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(MotionIntegralCoeffs::unit(c(1.0, 0.0), c(1e-4, 0.0)).is_err());
    }

    #[test]
    fn closed_forms_spot_check() {
        let k = MotionIntegralCoeffs::new(c(1.2, 0.4), c(-0.3, 0.6)).unwrap();
        let tau = 0.37;
        let i = Complex64::i();
        let w = k.c1 + k.c2;
        assert!((k.f(tau) - (k.c1 + i * w * tau)).norm() < 1e-15);
        assert!((k.g(tau) - (k.c2 - i * w * tau)).norm() < 1e-15);
        assert!((k.f(tau) - k.g(tau) - k.difference(tau)).norm() < 1e-15);
        let b = 2.5;
        let alt = b * tau * ((k.f(tau) + k.g(tau)) * tau + i * (k.f(tau) - k.g(tau)));
        let direct = b * tau * (i * (k.c1 - k.c2) - w * tau);
        assert!((k.phi(b, tau) - direct).norm() < 1e-14);
        assert!((k.phi(b, tau) - alt).norm() < 1e-14);
    }

    #[test]
    fn physical_units_map() {
        let u = PhysicalUnits {
            mass: 2.0,
            force: 0.5,
            length: 1.5,
            hbar: 1.0,
        };
        let m = LinearModel::from_physical(u).unwrap();
        assert!((m.b() - SQRT_2 * 2.0 * 3.375 * 0.5).abs() < 1e-14);
        assert!(LinearModel::with_physical(m.b(), u).is_ok());
        assert!(LinearModel::with_physical(m.b() * (1.0 + 1e-9), u).is_err());
        assert!((u.dimensionless_time(4.5) - 4.5 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn label_round_trip_figure_parameters() {
        let k = MotionIntegralCoeffs::unit(c(3.0, 0.0), c(8f64.sqrt(), 0.0)).unwrap();
        let l = CsLabel::from_initial_data(0.0, 15.0, &k);
        assert!(l.x0(&k).abs() < 1e-12);
        assert!((l.p0(&k) - 15.0).abs() < 1e-12);
    }
}
