use std::f64::consts::PI;

use num_complex::Complex64;

use super::{LogWindow, NormalLawModel, PaaCsLabel};
use crate::error::Result;
use crate::numerics::{try_integrate_log_window, QuadratureSpec};

/// `F(x) = (2 pi)^{-1/2} \int_0^inf du e^{-i x u} u^alpha e^{-delta ln^2 u} e^{-i beta u^2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierProfile {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl FourierProfile {
    pub fn eval(&self, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        // u^alpha e^{-delta ln^2 u} du = exp((alpha + 1) v - delta v^2) dv
        let win = LogWindow::gaussian(0.0, self.delta, self.alpha + 1.0, spec);
        let freq = 2.0 * self.beta.abs() * win.hi + x.abs();
        let v = try_integrate_log_window(
            |u| {
                let l = u.ln();
                Ok(Complex64::from_polar(
                    (self.alpha * l - self.delta * l * l).exp(),
                    -(self.beta * u * u + x * u),
                ))
            },
            win.lo,
            win.hi,
            &spec.with_oscillation(freq),
        )?;
        Ok(v / (2.0 * PI).sqrt())
    }

    /// `sqrt(2/delta) e^{(alpha+1)^2/(4 delta)}`, the bound stated alongside
    /// the profile.
    pub fn bound(&self) -> f64 {
        (2.0 / self.delta).sqrt() * ((self.alpha + 1.0).powi(2) / (4.0 * self.delta)).exp()
    }

    /// `sqrt(1/(2 delta)) e^{(alpha+1)^2/(4 delta)}`, from dropping the phases
    /// and integrating the envelope exactly.
    pub fn tight_bound(&self) -> f64 {
        (0.5 / self.delta).sqrt() * ((self.alpha + 1.0).powi(2) / (4.0 * self.delta)).exp()
    }
}

impl NormalLawModel {
    /// `alpha = 2 eps eta J + 1/2`, `beta = sigma gamma`, `delta = 2 eps eta^2`.
    pub fn fourier_profile(&self, label: &PaaCsLabel) -> Result<FourierProfile> {
        Ok(FourierProfile {
            alpha: 2.0 * self.eps * self.eta * label.j + 0.5,
            beta: self.sigma()? * label.gamma,
            delta: 2.0 * self.eps * self.eta * self.eta,
        })
    }

    /// `pi^{-1/2} (eps/pi)^{1/4} eta^{1/2} e^{-(eps/2)(J + 1/(2 eps eta))^2}`,
    /// which makes the line density integrate to one.
    pub fn position_prefactor(&self, label: &PaaCsLabel) -> f64 {
        let s = label.j + 1.0 / (2.0 * self.eps * self.eta);
        PI.powf(-0.5) * (self.eps / PI).powf(0.25) * self.eta.sqrt() * (-self.eps / 2.0 * s * s).exp()
    }

    /// `sqrt(eps eta^2 / pi^3) e^{-(eps/2)(J + 1/(2 eps eta))^2}` as printed.
    pub fn position_prefactor_printed(&self, label: &PaaCsLabel) -> f64 {
        let s = label.j + 1.0 / (2.0 * self.eps * self.eta);
        (self.eps * self.eta * self.eta / PI.powi(3)).sqrt() * (-self.eps / 2.0 * s * s).exp()
    }

    /// `<x | J, gamma>` from the `u = sqrt(E)` integral.
    pub fn position_amplitude(&self, label: &PaaCsLabel, x: f64) -> Result<Complex64> {
        if self.e_max.is_some() {
            return self.position_channels(label, x).map(|(c, s)| c + s);
        }
        let f = self.fourier_profile(label)?.eval(x, &self.quad)?;
        Ok(f * (2.0 * PI).sqrt() * self.position_prefactor(label))
    }

    /// `|<x | J, gamma>|^2`.
    pub fn line_density(&self, label: &PaaCsLabel, x: f64) -> Result<f64> {
        Ok(self.position_amplitude(label, x)?.norm_sqr())
    }

    /// Cosine and sine channels of `<x | J, gamma>` synthesized in the energy
    /// basis `psi+_E = cos(sqrt(E) x) / sqrt(4 pi sqrt E)`,
    /// `psi-_E = -i sin(sqrt(E) x) / sqrt(4 pi sqrt E)`. The first is even in
    /// `x`, the second odd, and their sum is the amplitude.
    pub fn position_channels(&self, label: &PaaCsLabel, x: f64) -> Result<(Complex64, Complex64)> {
        let sigma = self.sigma()?;
        let n = self.normalization(label.j)?;
        // |c_E|/E^{1/4} dE = exp((3/4) v - (eps eta^2 / 2)(v - J/eta)^2) dv
        let s2 = self.eps * self.eta * self.eta / 2.0;
        let win = LogWindow::gaussian(label.j / self.eta, s2, 0.75, &self.quad);
        let freq = (sigma * label.gamma).abs() + x.abs() / (2.0 * win.lo.sqrt());
        let mut upper = win.hi;
        if let Some(cap) = self.e_max {
            upper = upper.min(cap);
        }
        let spec = self.quad.with_oscillation(freq);
        let channel = |even: bool| {
            try_integrate_log_window(
                |e| {
                    let c = self.coefficient_with_norm(label, e, n);
                    let k = e.sqrt();
                    let scale = (4.0 * PI * k).sqrt().recip();
                    let basis = if even {
                        Complex64::new((k * x).cos() * scale, 0.0)
                    } else {
                        Complex64::new(0.0, -(k * x).sin() * scale)
                    };
                    Ok(c * basis)
                },
                win.lo,
                upper,
                &spec,
            )
        };
        Ok((channel(true)?, channel(false)?))
    }
}
