//! Pseudo-action / angle coherent states over a continuous energy spectrum,
//! in the normal-law model.
//!
//! With `J = eta ln E` (dimensionless energies and actions throughout), the
//! energy eigendistributions are weighted by
//! `p_E(J) = (eps/pi)^{1/2} exp(-eps (J - eta ln E)^2)` and
//!
//! ```text
//! |J, gamma> = N(J)^{-1/2} \int_0^inf dE sqrt(p_E(J)) e^{-i alpha(E) gamma} |psi_E>
//! ```
//!
//! with `alpha(E) = sigma E` unless a custom phase is supplied.

mod overlap;
mod position;
mod quantize;

pub use position::FourierProfile;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{try_integrate_log_window, QuadratureSpec};

/// Phase function `E -> alpha(E)` multiplying the angle.
#[derive(Debug, Clone, Copy)]
pub enum PhaseFrequency {
    /// `alpha(E) = sigma E`.
    Linear { sigma: f64 },
    /// Arbitrary phase with a bound on `|alpha'(E)|`, used to size panels.
    Custom { alpha: fn(f64) -> f64, rate_bound: f64 },
}

impl PhaseFrequency {
    pub fn alpha(&self, energy: f64) -> f64 {
        match *self {
            Self::Linear { sigma } => sigma * energy,
            Self::Custom { alpha, .. } => alpha(energy),
        }
    }

    pub fn rate_bound(&self) -> f64 {
        match *self {
            Self::Linear { sigma } => sigma.abs(),
            Self::Custom { rate_bound, .. } => rate_bound.abs(),
        }
    }
}

/// Label `(J, gamma)` of a state; any point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaaCsLabel {
    pub j: f64,
    pub gamma: f64,
}

impl PaaCsLabel {
    pub fn new(j: f64, gamma: f64) -> Self {
        Self { j, gamma }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NormalLawModel {
    eps: f64,
    eta: f64,
    phase: PhaseFrequency,
    e_max: Option<f64>,
    energy_scale: f64,
    planck: f64,
    quad: QuadratureSpec,
}

impl NormalLawModel {
    pub fn new(eps: f64, eta: f64, sigma: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidDomain(format!("eps must be > 0, got {eps}")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidDomain(format!("eta must be > 0, got {eta}")));
        }
        if !(sigma != 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidDomain(format!("sigma must be finite and nonzero, got {sigma}")));
        }
        Ok(Self {
            eps,
            eta,
            phase: PhaseFrequency::Linear { sigma },
            e_max: None,
            energy_scale: 1.0,
            planck: 1.0,
            quad: QuadratureSpec::default(),
        })
    }

    /// `eps = eta = sigma = 1`.
    pub fn figure2() -> Self {
        Self::new(1.0, 1.0, 1.0).expect("valid parameters")
    }

    /// `eps = 2, sigma = eta = 1`.
    pub fn figure3() -> Self {
        Self::new(2.0, 1.0, 1.0).expect("valid parameters")
    }

    pub fn with_phase(mut self, phase: PhaseFrequency) -> Self {
        self.phase = phase;
        self
    }

    /// Restricts the spectrum to `[0, e_max)`.
    pub fn with_spectral_cap(mut self, e_max: f64) -> Result<Self> {
        if !(e_max > 0.0) {
            return Err(Error::InvalidDomain(format!("spectral cap must be > 0, got {e_max}")));
        }
        self.e_max = e_max.is_finite().then_some(e_max);
        Ok(self)
    }

    /// Characteristic energy and Planck constant for the physical-unit layer.
    pub fn with_units(mut self, energy_scale: f64, planck: f64) -> Result<Self> {
        if !(energy_scale > 0.0 && planck > 0.0) {
            return Err(Error::InvalidDomain("energy scale and planck constant must be > 0".into()));
        }
        self.energy_scale = energy_scale;
        self.planck = planck;
        Ok(self)
    }

    pub fn with_quadrature(mut self, spec: QuadratureSpec) -> Self {
        self.quad = spec;
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn phase(&self) -> PhaseFrequency {
        self.phase
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quad
    }

    pub fn e_max(&self) -> Option<f64> {
        self.e_max
    }

    /// `sigma` of the linear phase; an error for custom phases.
    pub fn sigma(&self) -> Result<f64> {
        match self.phase {
            PhaseFrequency::Linear { sigma } => Ok(sigma),
            PhaseFrequency::Custom { .. } => Err(Error::InvalidDomain(
                "operation defined only for the linear phase alpha(E) = sigma E".into(),
            )),
        }
    }

    pub fn dimensionless_energy(&self, energy: f64) -> f64 {
        energy / self.energy_scale
    }

    pub fn dimensionless_action(&self, action: f64) -> f64 {
        action / self.planck
    }

    pub fn physical_action(&self, j: f64) -> f64 {
        j * self.planck
    }

    /// `J = eta ln E`.
    pub fn j_of_e(&self, energy: f64) -> f64 {
        self.eta * energy.ln()
    }

    /// `E = e^{J/eta}`.
    pub fn e_of_j(&self, j: f64) -> f64 {
        (j / self.eta).exp()
    }

    /// `p_E(J)`; zero at `E <= 0`.
    pub fn density(&self, j: f64, energy: f64) -> f64 {
        if energy <= 0.0 {
            return 0.0;
        }
        let d = j - self.eta * energy.ln();
        (self.eps / PI).sqrt() * (-self.eps * d * d).exp()
    }

    /// `N(J) = (1/eta) exp(J/eta + 1/(4 eps eta^2))` for the uncapped spectrum.
    pub fn normalization_closed(&self, j: f64) -> f64 {
        (j / self.eta + 1.0 / (4.0 * self.eps * self.eta * self.eta)).exp() / self.eta
    }

    /// `\int_0^{E_max} p_E(J) dE` by quadrature.
    pub fn normalization_quadrature(&self, j: f64) -> Result<f64> {
        let win = self.energy_window(j, 1.0);
        let v = self.energy_integral(win, 0.0, |e| Ok(Complex64::new(self.density(j, e), 0.0)))?;
        Ok(v.re)
    }

    /// `N(J)`: closed form for the uncapped spectrum, quadrature otherwise.
    pub fn normalization(&self, j: f64) -> Result<f64> {
        match self.e_max {
            None => Ok(self.normalization_closed(j)),
            Some(_) => self.normalization_quadrature(j),
        }
    }

    fn check_energy(&self, energy: f64) -> Result<()> {
        let upper = self.e_max.unwrap_or(f64::INFINITY);
        if !(energy >= 0.0 && energy < upper) {
            return Err(Error::InvalidDomain(format!("energy {energy} outside [0, {upper})")));
        }
        Ok(())
    }

    /// `c_E(J, gamma) = sqrt(p_E(J) / N(J)) e^{-i alpha(E) gamma}`.
    pub fn cs_coefficient(&self, label: &PaaCsLabel, energy: f64) -> Result<Complex64> {
        self.check_energy(energy)?;
        let n = self.normalization(label.j)?;
        Ok(self.coefficient_with_norm(label, energy, n))
    }

    fn coefficient_with_norm(&self, label: &PaaCsLabel, energy: f64, n: f64) -> Complex64 {
        Complex64::from_polar((self.density(label.j, energy) / n).sqrt(), -self.phase.alpha(energy) * label.gamma)
    }

    /// `\int_0^inf |c_E|^2 dE` by quadrature.
    pub fn coefficient_norm(&self, label: &PaaCsLabel) -> Result<f64> {
        let n = self.normalization(label.j)?;
        let win = self.energy_window(label.j, 1.0);
        let v = self.energy_integral(win, 0.0, |e| {
            Ok(Complex64::new(self.coefficient_with_norm(label, e, n).norm_sqr(), 0.0))
        })?;
        Ok(v.re)
    }

    /// Interval in `E` carrying the mass of `E^{k-1} exp(-eps (jc - eta ln E)^2) dE`
    /// down to `abs_tol` of its peak, in the log variable `v = ln E`:
    /// the integrand is `exp(k v - eps eta^2 (v - jc/eta)^2)`.
    fn energy_window(&self, jc: f64, k: f64) -> LogWindow {
        LogWindow::gaussian(jc / self.eta, self.eps * self.eta * self.eta, k, &self.quad)
    }

    /// `\int f(E) dE` over the window clipped to the spectrum.
    fn energy_integral<F>(&self, win: LogWindow, freq: f64, f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let (lo, mut hi) = (win.lo, win.hi);
        if let Some(cap) = self.e_max {
            if lo >= cap {
                return Ok(Complex64::new(0.0, 0.0));
            }
            hi = hi.min(cap);
        }
        try_integrate_log_window(f, lo, hi, &self.quad.with_oscillation(freq))
    }
}

/// `[lo, hi]` in the original variable, from a Gaussian-in-log envelope
/// `exp(k v - s2 (v - c)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogWindow {
    pub lo: f64,
    pub hi: f64,
}

impl LogWindow {
    pub(crate) fn gaussian(c: f64, s2: f64, k: f64, spec: &QuadratureSpec) -> Self {
        let peak = c + k / (2.0 * s2);
        let half = ((1.0 / spec.abs_tol).ln().max(0.0) + 2.0).sqrt() / s2.sqrt();
        Self {
            lo: (peak - half).exp(),
            hi: (peak + half).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(NormalLawModel::new(0.0, 1.0, 1.0).is_err());
        assert!(NormalLawModel::new(1.0, -1.0, 1.0).is_err());
        assert!(NormalLawModel::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let m = NormalLawModel::figure2();
        let c = m.cs_coefficient(&PaaCsLabel::new(0.3, 0.0), 2.0).unwrap();
        assert!(c.im == 0.0 && c.re > 0.0);
        let c = m.cs_coefficient(&PaaCsLabel::new(0.0, 0.0), 1.0).unwrap();
        let expect = (PI.powf(-0.5) / 0.25f64.exp()).sqrt();
        assert!((c.re - expect).abs() < 1e-15);
        assert!(m.cs_coefficient(&PaaCsLabel::new(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn normalization_closed_vs_quadrature() {
        for (eps, eta) in [(0.5, 0.5), (1.0, 2.0), (4.0, 1.0)] {
            let m = NormalLawModel::new(eps, eta, 1.0).unwrap();
            for j in [-3.0, 0.0, 2.5] {
                let q = m.normalization_quadrature(j).unwrap();
                let c = m.normalization_closed(j);
                assert!((q - c).abs() < 1e-9 * c, "eps={eps} eta={eta} j={j}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn coefficients_have_unit_norm() {
        let m = NormalLawModel::new(1.5, 0.8, 2.0).unwrap();
        let n = m.coefficient_norm(&PaaCsLabel::new(0.7, -3.0)).unwrap();
        assert!((n - 1.0).abs() < 1e-10);
    }

    #[test]
    fn capped_spectrum_renormalizes() {
        let m = NormalLawModel::figure2().with_spectral_cap(2.0).unwrap();
        let label = PaaCsLabel::new(0.0, 1.0);
        assert!(m.normalization(0.0).unwrap() < m.normalization_closed(0.0));
        assert!((m.coefficient_norm(&label).unwrap() - 1.0).abs() < 1e-10);
        assert!(m.cs_coefficient(&label, 2.0).is_err());
    }
}
