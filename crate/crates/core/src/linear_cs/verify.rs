use num_complex::Complex64;

use super::{CsLabel, MotionIntegralCoeffs};
use crate::error::Result;
use crate::numerics::{fd_derivative, integrate_plane, DerivativeOrder, QuadratureSpec, DEFAULT_FD_STEP};

/// `max(|i f' + f + g|, |i g' - f - g|, |i phi' + b (f - g)|)` at `tau` for the
/// closed-form coefficients.
pub fn ode_residual(coeffs: &MotionIntegralCoeffs, b: f64, tau: f64) -> f64 {
    ode_residual_of(|t| coeffs.f(t), |t| coeffs.g(t), |t| coeffs.phi(b, t), b, tau)
}

/// Same residual for arbitrary coefficient functions. Non-finite samples
/// yield `inf`.
pub fn ode_residual_of<F, G, P>(f: F, g: G, phi: P, b: f64, tau: f64) -> f64
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
    P: Fn(f64) -> Complex64,
{
    let i = Complex64::i();
    let d = |h: &dyn Fn(f64) -> Complex64| fd_derivative(h, tau, DerivativeOrder::First, DEFAULT_FD_STEP);
    let (Ok(df), Ok(dg), Ok(dphi)) = (d(&f), d(&g), d(&phi)) else {
        return f64::INFINITY;
    };
    let (fv, gv) = (f(tau), g(tau));
    let r1 = (i * df + fv + gv).norm();
    let r2 = (i * dg - fv - gv).norm();
    let r3 = (i * dphi + b * (fv - gv)).norm();
    r1.max(r2).max(r3)
}

/// `<bra | ket> = exp(F/2)` with `F = Z (Z'^* - Z^*) + Z'^* (Z - Z')`,
/// `Z` the ket label and `Z'` the bra label.
pub fn overlap(bra: &CsLabel, ket: &CsLabel) -> Complex64 {
    let (z, zp) = (ket.z, bra.z);
    let f = z * (zp.conj() - z.conj()) + zp.conj() * (z - zp);
    (f / 2.0).exp()
}

/// `|\int d^2Z/pi <Z1|Z><Z|Z2> - <Z1|Z2>|`.
pub fn kernel_completeness_check(
    coeffs: &MotionIntegralCoeffs,
    z1: &CsLabel,
    z2: &CsLabel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    coeffs.require_unit()?;
    let freq = (z1.z - z2.z).norm();
    let spec = spec.with_oscillation(freq);
    let integrand = |z: Complex64| {
        let mid = CsLabel::new(z);
        overlap(z1, &mid) * overlap(&mid, z2) / std::f64::consts::PI
    };
    let v = integrate_plane(integrand, 0.5, &spec)?;
    Ok((v - overlap(z1, z2)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_coefficients_solve_the_system() {
        let k = MotionIntegralCoeffs::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(ode_residual(&k, 0.0, 0.7) < 1e-8);
        let k = MotionIntegralCoeffs::new(c(3.0, 0.0), c(8f64.sqrt(), 0.0)).unwrap();
        assert!(ode_residual(&k, 180.0, 0.05) < 1e-8);
    }

    #[test]
    fn corrupted_f_is_detected() {
        let k = MotionIntegralCoeffs::new(c(3.0, 0.0), c(8f64.sqrt(), 0.0)).unwrap();
        let r = ode_residual_of(|t| k.f(t) + 0.01, |t| k.g(t), |t| k.phi(180.0, t), 180.0, 0.05);
        assert!(r > 1e-3);
    }

    #[test]
    fn overlap_examples() {
        let z = CsLabel::new(c(0.3, -1.1));
        assert!((overlap(&z, &z) - 1.0).norm() < 1e-15);
        let v = overlap(&CsLabel::new(c(0.0, 0.0)), &CsLabel::new(c(1.0, 0.0)));
        assert!((v - (-0.5f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn kernel_reproduces_itself() {
        let k = MotionIntegralCoeffs::standard();
        let spec = QuadratureSpec::default();
        for (a, b) in [(c(0.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(0.0, 1.0)), (c(2.0, 1.0), c(-1.0, 0.0))] {
            let r = kernel_completeness_check(&k, &CsLabel::new(a), &CsLabel::new(b), &spec).unwrap();
            assert!(r < 1e-8, "{a} {b}: {r}");
        }
    }
}
