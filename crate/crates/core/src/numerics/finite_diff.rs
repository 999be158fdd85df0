use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Five-point central difference, fourth order in `step`.
pub fn fd_derivative<F>(f: F, at: f64, order: DerivativeOrder, step: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidDomain(format!("step must be > 0, got {step}")));
    }
    let h = step;
    let (m2, m1, p1, p2) = (f(at - 2.0 * h), f(at - h), f(at + h), f(at + 2.0 * h));
    let d = match order {
        DerivativeOrder::First => (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h),
        DerivativeOrder::Second => {
            let c = f(at);
            (-(m2 + p2) + (m1 + p1) * 16.0 - c * 30.0) / (12.0 * h * h)
        }
    };
    super::checked(d, "fd_derivative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn square_first_derivative() {
        let d = fd_derivative(|x| Complex64::new(x * x, 0.0), 3.0, DerivativeOrder::First, 1e-3).unwrap();
        assert!((d.re - 6.0).abs() < 1e-9);
    }

    #[test]
    fn phase_second_derivative() {
        let d = fd_derivative(|x| Complex64::from_polar(1.0, x), 0.0, DerivativeOrder::Second, 1e-3).unwrap();
        assert!((d - Complex64::new(-1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn sine_against_cosine() {
        let d = fd_derivative(|x| Complex64::new(x.sin(), 0.0), FRAC_PI_4, DerivativeOrder::First, 1e-3).unwrap();
        assert!((d.re - FRAC_PI_4.cos()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_step() {
        for h in [0.0, -1e-3, f64::NAN] {
            assert!(fd_derivative(|x| Complex64::new(x, 0.0), 0.0, DerivativeOrder::First, h).is_err());
        }
    }
}
