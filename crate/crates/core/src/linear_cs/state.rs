use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::{CsLabel, LinearModel, MotionIntegralCoeffs};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::numerics::{
    checked, fd_derivative, try_integrate_interval, try_integrate_real_line, ComplexValue, DerivativeOrder,
    QuadratureSpec, DEFAULT_FD_STEP,
};

/// First and second moments of a state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub x_mean: f64,
    pub p_mean: f64,
    /// Position variance.
    pub sigma1: f64,
    /// Momentum variance.
    pub sigma2: f64,
    /// Symmetrized position-momentum covariance.
    pub sigma3: f64,
}

impl Moments {
    /// `J = sigma1 sigma2 - sigma3^2`.
    pub fn uncertainty(&self) -> f64 {
        self.sigma1 * self.sigma2 - self.sigma3 * self.sigma3
    }
}

/// A coherent state: model, integral-of-motion coefficients (with
/// `Delta = 1`) and eigenvalue label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCs {
    model: LinearModel,
    coeffs: MotionIntegralCoeffs,
    label: CsLabel,
}

/// Normalized solution of the eigenvalue equation at one instant, built by
/// integrating its log-derivative from an anchor point.
#[derive(Debug, Clone, Copy)]
pub struct EigenOdeSolution {
    state: LinearCs,
    tau: f64,
    anchor: f64,
    offset: Complex64,
}

impl LinearCs {
    pub fn new(model: LinearModel, coeffs: MotionIntegralCoeffs, label: CsLabel) -> Result<Self> {
        coeffs.require_unit()?;
        Ok(Self { model, coeffs, label })
    }

    pub fn from_initial_data(model: LinearModel, coeffs: MotionIntegralCoeffs, x0: f64, p0: f64) -> Result<Self> {
        coeffs.require_unit()?;
        let label = CsLabel::from_initial_data(x0, p0, &coeffs);
        Ok(Self { model, coeffs, label })
    }

    /// `c1 = 3, c2 = sqrt8, x0 = 0, p0 = 15, b = 180`.
    pub fn figure1() -> Self {
        let coeffs = MotionIntegralCoeffs {
            c1: Complex64::new(3.0, 0.0),
            c2: Complex64::new(8f64.sqrt(), 0.0),
        };
        Self {
            model: LinearModel::new(180.0).expect("finite b"),
            coeffs,
            label: CsLabel::from_initial_data(0.0, 15.0, &coeffs),
        }
    }

    pub fn model(&self) -> LinearModel {
        self.model
    }

    pub fn coeffs(&self) -> MotionIntegralCoeffs {
        self.coeffs
    }

    pub fn label(&self) -> CsLabel {
        self.label
    }

    pub fn with_label(&self, label: CsLabel) -> Self {
        Self { label, ..*self }
    }

    pub fn with_model(&self, model: LinearModel) -> Self {
        Self { model, ..*self }
    }

    fn b(&self) -> f64 {
        self.model.b()
    }

    /// `x(tau) = x0 + p0 tau - sqrt2 b tau^2` and `p(tau) = p0/2 - sqrt2 b tau`.
    pub fn classical_trajectory(&self, tau: f64) -> (f64, f64) {
        let (x0, p0) = (self.label.x0(&self.coeffs), self.label.p0(&self.coeffs));
        let b = self.b();
        (x0 + p0 * tau - SQRT_2 * b * tau * tau, p0 / 2.0 - SQRT_2 * b * tau)
    }

    /// `[Z (f-g)^* + Z^* (f-g) - 2 b tau^2] / sqrt2`.
    pub fn trajectory_from_label(&self, tau: f64) -> f64 {
        let u = self.coeffs.difference(tau);
        let z = self.label.z;
        ((z * u.conj() + z.conj() * u).re - 2.0 * self.b() * tau * tau) / SQRT_2
    }

    /// `d ln psi / dx = [sqrt2 (Z - phi) - (f+g) x] / (f-g)`, read off from
    /// `A psi = Z psi` with `A = [(f+g) x + (f-g) d/dx] / sqrt2 + phi`.
    pub fn log_derivative(&self, tau: f64, x: f64) -> Complex64 {
        let u = self.coeffs.difference(tau);
        let phi = self.coeffs.phi(self.b(), tau);
        (SQRT_2 * (self.label.z - phi) - self.coeffs.sum() * x) / u
    }

    /// `ln psi = A x^2 + B x + C(tau)`.
    ///
    /// `C` fixes the normalization and the time-dependent phase demanded by
    /// the Schrodinger equation; at `tau = 0, c1 = 1, c2 = 0` it reduces to
    /// the Glauber state `pi^{-1/4} exp(-x^2/2 + sqrt2 Z x - Z^2/2 - |Z|^2/2)`.
    pub fn log_wavefunction(&self, tau: f64, x: f64) -> Complex64 {
        let b = self.b();
        let w = self.coeffs.sum();
        let u0 = self.coeffs.c1 - self.coeffs.c2;
        let u = self.coeffs.difference(tau);
        let phi = self.coeffs.phi(b, tau);
        let z = self.label.z;
        let i = Complex64::i();

        let a = -w / (2.0 * u);
        let lin = SQRT_2 * (z - phi) / u;
        // sqrt(f-g) = sqrt(c1-c2) sqrt((f-g)/(c1-c2)); the ratio never crosses the
        // negative axis because Re[(c1+c2)/(c1-c2)] = 1/|c1-c2|^2 > 0
        let log_prefactor = -0.5 * ((u0 * PI.sqrt()).ln() + (u / u0).ln());
        let accumulated = tau
            * (6.0 * i * z * z + 6.0 * z * b * tau * u0 + b * b * tau.powi(3) * u0 * w
                - 2.0 * i * b * b * tau * tau * u0 * u0)
            / (3.0 * u0 * u);
        let c = log_prefactor - 0.5 * z.norm_sqr() - u0.conj() * z * z / (2.0 * u0) + accumulated;
        a * x * x + lin * x + c
    }

    pub fn wavefunction(&self, tau: f64, x: f64) -> Complex64 {
        self.log_wavefunction(tau, x).exp()
    }

    /// The exponent `R` exactly as printed in the closed form, for comparison:
    /// `(f+g)/(2(f-g)) (x + 2b tau^2 - sqrt2 Z/(f+g))^2
    ///  + Z[(f+g)Z - (f+g)^* Z^*] / (2 (f+g)^*) - i b tau (sqrt2 x + 2 b tau^2/3)`.
    pub fn printed_exponent(&self, tau: f64, x: f64) -> Complex64 {
        let b = self.b();
        let w = self.coeffs.sum();
        let u = self.coeffs.difference(tau);
        let z = self.label.z;
        let shift = x + 2.0 * b * tau * tau - SQRT_2 * z / w;
        w / (2.0 * u) * shift * shift + z * (w * z - w.conj() * z.conj()) / (2.0 * w.conj())
            - Complex64::i() * b * tau * (SQRT_2 * x + 2.0 * b * tau * tau / 3.0)
    }

    /// `exp(R) / sqrt((f-g) sqrt(pi))` with the printed `R`.
    pub fn printed_wavefunction(&self, tau: f64, x: f64) -> Complex64 {
        let u0 = self.coeffs.c1 - self.coeffs.c2;
        let u = self.coeffs.difference(tau);
        let log_prefactor = -0.5 * ((u0 * PI.sqrt()).ln() + (u / u0).ln());
        (self.printed_exponent(tau, x) + log_prefactor).exp()
    }

    /// Closed-form means and variances.
    pub fn moments(&self, tau: f64) -> Moments {
        let f = self.coeffs.f(tau);
        let g = self.coeffs.g(tau);
        let (_, p_mean) = self.classical_trajectory(tau);
        Moments {
            x_mean: self.trajectory_from_label(tau),
            p_mean,
            sigma1: (f - g).norm_sqr() / 2.0,
            sigma2: (f + g).norm_sqr() / 2.0,
            sigma3: (Complex64::i() / 2.0 * (g * f.conj() - g.conj() * f)).re,
        }
    }

    fn position_scale(&self, tau: f64) -> f64 {
        self.coeffs.difference(tau).norm() / SQRT_2
    }

    fn x_integral<F>(&self, tau: f64, center: f64, freq: f64, spec: &QuadratureSpec, mut f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let spec = spec.with_oscillation(freq);
        try_integrate_real_line(&mut f, center, self.position_scale(tau), &spec)
    }

    /// `\int |psi|^2 dx` by quadrature.
    pub fn norm(&self, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
        let center = self.trajectory_from_label(tau);
        let v = self.x_integral(tau, center, 0.0, spec, |x| {
            Ok(Complex64::new(self.wavefunction(tau, x).norm_sqr(), 0.0))
        })?;
        Ok(v.re)
    }

    /// Moments measured by x-quadrature of `psi`, with `d psi/dx` from
    /// five-point differences at step `1e-3` and one Richardson level.
    pub fn quadrature_moments(&self, tau: f64, spec: &QuadratureSpec) -> Result<Moments> {
        let psi = |x: f64| self.wavefunction(tau, x);
        let dpsi = |x: f64| -> Result<Complex64> {
            let coarse = fd_derivative(psi, x, DerivativeOrder::First, DEFAULT_FD_STEP)?;
            let fine = fd_derivative(psi, x, DerivativeOrder::First, DEFAULT_FD_STEP / 2.0)?;
            Ok((fine * 16.0 - coarse) / 15.0)
        };
        let start = self.trajectory_from_label(tau);
        let density = |x: f64| psi(x).norm_sqr();
        let real = |v: f64| Complex64::new(v, 0.0);

        let n = self.x_integral(tau, start, 0.0, spec, |x| Ok(real(density(x))))?.re;
        let x_mean = self.x_integral(tau, start, 0.0, spec, |x| Ok(real(x * density(x))))?.re / n;
        let sigma1 = self
            .x_integral(tau, start, 0.0, spec, |x| Ok(real((x - x_mean).powi(2) * density(x))))?
            .re
            / n;
        let minus_i = -Complex64::i();
        let p_mean = self
            .x_integral(tau, start, 0.0, spec, |x| Ok(psi(x).conj() * minus_i * dpsi(x)?))?
            .re
            / n;
        let p2 = self.x_integral(tau, start, 0.0, spec, |x| Ok(real(dpsi(x)?.norm_sqr())))?.re / n;
        let sigma3 = self
            .x_integral(tau, start, 0.0, spec, |x| {
                Ok(psi(x).conj() * (x - x_mean) * minus_i * dpsi(x)?)
            })?
            .re
            / n;
        Ok(Moments {
            x_mean,
            p_mean,
            sigma1,
            sigma2: p2 - p_mean * p_mean,
            sigma3,
        })
    }

    /// `<other | self>` at time `tau` by x-quadrature.
    pub fn quadrature_overlap(&self, other: &CsLabel, tau: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        let bra = self.with_label(*other);
        let center = 0.5 * (self.trajectory_from_label(tau) + bra.trajectory_from_label(tau));
        let u = self.coeffs.difference(tau);
        let freq = (SQRT_2 * (self.label.z - other.z) / u).im.abs();
        let v = self.x_integral(tau, center, freq, spec, |x| {
            Ok(bra.wavefunction(tau, x).conj() * self.wavefunction(tau, x))
        })?;
        checked(v, "quadrature_overlap")
    }

    /// `A(tau)` applied to `psi` at `x`:
    /// `[(f+g) x psi + (f-g) psi'] / sqrt2 + phi psi`.
    pub fn apply_integral_of_motion<F>(&self, psi: F, tau: f64, x: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let w = self.coeffs.sum();
        let u = self.coeffs.difference(tau);
        let phi = self.coeffs.phi(self.b(), tau);
        let d = fd_derivative(&psi, x, DerivativeOrder::First, DEFAULT_FD_STEP)?;
        Ok((w * x * psi(x) + u * d) / SQRT_2 + phi * psi(x))
    }

    /// `max |A psi - Z psi| / max |psi|` over the grid.
    pub fn eigen_residual(&self, tau: f64, grid: &GridSpec) -> Result<f64> {
        self.eigen_residual_of(|x| self.wavefunction(tau, x), tau, grid)
    }

    pub fn eigen_residual_of<F>(&self, psi: F, tau: f64, grid: &GridSpec) -> Result<f64>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for x in grid.points() {
            let r = self.apply_integral_of_motion(&psi, tau, x)? - self.label.z * psi(x);
            worst = worst.max(r.norm());
            peak = peak.max(psi(x).norm());
        }
        Ok(worst / peak)
    }

    /// Finite-difference step in `tau` small enough to resolve the local
    /// phase rotation rate of the state on the grid.
    pub fn time_step(&self, tau: f64, grid: &GridSpec) -> f64 {
        let m = self.moments(tau);
        let reach = grid.min.abs().max(grid.max.abs());
        let omega = SQRT_2 * self.b().abs() * reach + m.p_mean * m.p_mean + 1.0 / m.sigma1;
        DEFAULT_FD_STEP.min(0.005 / omega)
    }

    /// `max |i d_tau psi - (sqrt2 b x - d_x^2) psi| / max |psi|` over the grid.
    pub fn schrodinger_residual(&self, tau: f64, grid: &GridSpec) -> Result<f64> {
        self.schrodinger_residual_of(|t, x| self.wavefunction(t, x), tau, grid)
    }

    pub fn schrodinger_residual_of<F>(&self, psi: F, tau: f64, grid: &GridSpec) -> Result<f64>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let dt = self.time_step(tau, grid);
        let i = Complex64::i();
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for x in grid.points() {
            let d_tau = fd_derivative(|t| psi(t, x), tau, DerivativeOrder::First, dt)?;
            let d_xx = fd_derivative(|y| psi(tau, y), x, DerivativeOrder::Second, DEFAULT_FD_STEP)?;
            let here = psi(tau, x);
            let r = i * d_tau - (self.model.potential(x) * here - d_xx);
            worst = worst.max(r.norm());
            peak = peak.max(here.norm());
        }
        Ok(worst / peak)
    }

    /// Solves `A psi = Z psi` in x from the classical position, normalizes by
    /// quadrature and aligns the global phase with [`Self::wavefunction`] there.
    pub fn eigen_ode_solution(&self, tau: f64, spec: &QuadratureSpec) -> Result<EigenOdeSolution> {
        let anchor = self.trajectory_from_label(tau);
        let raw = EigenOdeSolution {
            state: *self,
            tau,
            anchor,
            offset: Complex64::new(0.0, 0.0),
        };
        let n = self.x_integral(tau, anchor, 0.0, spec, |x| {
            Ok(Complex64::new(raw.log_unnormalized(x, spec)?.exp().norm_sqr(), 0.0))
        })?;
        let phase = self.wavefunction(tau, anchor).arg();
        Ok(EigenOdeSolution {
            offset: Complex64::new(-0.5 * n.re.ln(), phase),
            ..raw
        })
    }

    pub fn wavefunction_via_eigen_ode(&self, tau: f64, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        self.eigen_ode_solution(tau, spec)?.eval(x, spec)
    }
}

impl EigenOdeSolution {
    fn log_unnormalized(&self, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        let st = self.state;
        let tau = self.tau;
        try_integrate_interval(|y| Ok(st.log_derivative(tau, y)), self.anchor, x, spec)
    }

    pub fn eval(&self, x: f64, spec: &QuadratureSpec) -> Result<ComplexValue> {
        checked((self.log_unnormalized(x, spec)? + self.offset).exp(), "eigen_ode")
    }
}
