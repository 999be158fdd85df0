use std::f64::consts::PI;

use num_complex::Complex64;

use super::{NormalLawModel, PaaCsLabel};
use crate::error::{Error, Result};
use crate::numerics::{
    integrate_gaussian_weighted, try_integrate_gaussian_weighted, try_integrate_semi_infinite,
};

impl NormalLawModel {
    /// `\int dJ p_E(J)` by quadrature; exactly 1.
    pub fn probability_mass(&self, energy: f64) -> Result<f64> {
        self.quantize_action_function(|_| 1.0, energy)
    }

    /// `<f>_E = \int dJ f(J) p_E(J)`, the diagonal symbol of the quantized
    /// `f(J)`.
    pub fn quantize_action_function<F>(&self, f: F, energy: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if !(energy > 0.0) {
            return Err(Error::InvalidDomain(format!("energy must be > 0, got {energy}")));
        }
        let norm = (self.eps / PI).sqrt();
        let v = integrate_gaussian_weighted(
            |j| Complex64::new(norm * f(j), 0.0),
            self.j_of_e(energy),
            self.eps,
            &self.quad,
        )?;
        Ok(v.re)
    }

    /// `e^{1/(4 eps eta^2)}`: the classical energy averaged over `p_E` is this
    /// multiple of `E`.
    pub fn mean_energy_multiplier(&self) -> f64 {
        (1.0 / (4.0 * self.eps * self.eta * self.eta)).exp()
    }

    /// `<E^lambda>_E` by quadrature.
    pub fn energy_moment(&self, lambda: f64, energy: f64) -> Result<f64> {
        self.quantize_action_function(|j| self.e_of_j(j).powf(lambda), energy)
    }

    /// `e^{lambda^2/(4 eps eta^2)} E^lambda`.
    pub fn energy_moment_closed(&self, lambda: f64, energy: f64) -> f64 {
        (lambda * lambda / (4.0 * self.eps * self.eta * self.eta)).exp() * energy.powf(lambda)
    }

    /// `A_{H^lambda} = m(lambda) (A_H)^lambda` with
    /// `m(lambda) = e^{lambda (lambda - 1)/(4 eps eta^2)}`.
    pub fn energy_power_multiplier(&self, lambda: f64) -> f64 {
        (lambda * (lambda - 1.0) / (4.0 * self.eps * self.eta * self.eta)).exp()
    }

    /// `\int dJ sqrt(p_E(J) p_E'(J)) = exp(-(eps eta^2 / 4) ln^2(E/E'))`.
    pub fn action_kernel(&self, e1: f64, e2: f64) -> Result<f64> {
        if !(e1 > 0.0 && e2 > 0.0) {
            return Err(Error::InvalidDomain(format!("energies must be > 0, got {e1}, {e2}")));
        }
        let l = (e1 / e2).ln();
        Ok((-self.eps * self.eta * self.eta / 4.0 * l * l).exp())
    }

    /// The kernel with exponent `eps eta / 4`, as printed in the matrix
    /// elements of the quantized Fourier exponential.
    pub fn action_kernel_printed(&self, e1: f64, e2: f64) -> Result<f64> {
        if !(e1 > 0.0 && e2 > 0.0) {
            return Err(Error::InvalidDomain(format!("energies must be > 0, got {e1}, {e2}")));
        }
        let l = (e1 / e2).ln();
        Ok((-self.eps * self.eta / 4.0 * l * l).exp())
    }

    /// The kernel by quadrature: the weight `e^{-eps (J - eta ln E)^2/2}`
    /// goes into the Gaussian rule, the other factor is the integrand.
    pub fn action_kernel_quadrature(&self, e1: f64, e2: f64) -> Result<f64> {
        if !(e1 > 0.0 && e2 > 0.0) {
            return Err(Error::InvalidDomain(format!("energies must be > 0, got {e1}, {e2}")));
        }
        let (a, b) = (self.j_of_e(e1), self.j_of_e(e2));
        let norm = (self.eps / PI).sqrt();
        let v = integrate_gaussian_weighted(
            |j| Complex64::new(norm * (-self.eps * (j - b).powi(2) / 2.0).exp(), 0.0),
            a,
            self.eps / 2.0,
            &self.quad,
        )?;
        Ok(v.re)
    }

    /// Matrix element of the quantized `e^{i varpi gamma}`: it maps energy `E`
    /// to `E - varpi/sigma` with weight `(pi/sigma) K(E, E - varpi/sigma)`.
    pub fn fourier_exponential_kernel(&self, varpi: f64, energy: f64) -> Result<(f64, f64)> {
        let sigma = self.sigma()?;
        let shift = varpi / sigma;
        let shifted = energy - shift;
        let upper = self.e_max.unwrap_or(f64::INFINITY);
        if !(energy > 0.0_f64.max(shift)) || energy >= upper {
            return Err(Error::OutOfSpectralRange { shifted, upper });
        }
        Ok((shifted, PI / sigma * self.action_kernel(energy, shifted)?))
    }

    /// Same weight from the printed `eps eta / 4` exponent.
    pub fn fourier_weight_printed(&self, varpi: f64, energy: f64) -> Result<f64> {
        let (shifted, _) = self.fourier_exponential_kernel(varpi, energy)?;
        Ok(PI / self.sigma()? * self.action_kernel_printed(energy, shifted)?)
    }

    /// Lower symbol of the quantized `f(J)`:
    /// `\int dE (p_E(J)/N(J)) <f>_E`, independent of `gamma`.
    pub fn lower_symbol_action<F>(&self, f: F, label: &PaaCsLabel) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let n = self.normalization(label.j)?;
        let norm = (self.eps / PI).sqrt();
        let spec = self.quad.with_log_envelope();
        let upper = self.e_max.unwrap_or(f64::INFINITY);
        let outer = |e: f64| -> Result<Complex64> {
            if e <= 0.0 || e >= upper {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let weight = self.density(label.j, e) / n;
            if weight == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let inner = try_integrate_gaussian_weighted(
                |j| Ok(Complex64::new(norm * f(j), 0.0)),
                self.j_of_e(e),
                self.eps,
                &self.quad,
            )?;
            Ok(inner * weight)
        };
        Ok(try_integrate_semi_infinite(outer, 0.0, &spec)?.re)
    }

    /// `e^{J/eta + 1/(eps eta^2)}`, the lower symbol of `E(J)`.
    pub fn lower_symbol_energy_closed(&self, label: &PaaCsLabel) -> f64 {
        (label.j / self.eta + 1.0 / (self.eps * self.eta * self.eta)).exp()
    }

    /// `max |e^{-i E t} c_E(J, gamma) - c_E(J, gamma + t/sigma)|` over the samples.
    pub fn evolution_shift_check(&self, label: &PaaCsLabel, t: f64, energies: &[f64]) -> Result<f64> {
        let sigma = self.sigma()?;
        let moved = PaaCsLabel {
            gamma: label.gamma + t / sigma,
            ..*label
        };
        let mut worst: f64 = 0.0;
        for &e in energies {
            let evolved = Complex64::from_polar(1.0, -e * t) * self.cs_coefficient(label, e)?;
            worst = worst.max((evolved - self.cs_coefficient(&moved, e)?).norm());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_real_line, QuadratureSpec};

    #[test]
    fn quantized_action_examples() {
        let m = NormalLawModel::new(1.7, 0.6, 1.0).unwrap();
        let e = 3.2;
        assert!((m.probability_mass(e).unwrap() - 1.0).abs() < 1e-10);
        let mean_j = m.quantize_action_function(|j| j, e).unwrap();
        assert!((mean_j - 0.6 * e.ln()).abs() < 1e-10);
        let mean_e = m.quantize_action_function(|j| m.e_of_j(j), e).unwrap();
        assert!((mean_e - m.mean_energy_multiplier() * e).abs() < 1e-9 * mean_e);
    }

    #[test]
    fn power_multiplier_examples() {
        let m = NormalLawModel::figure2();
        assert_eq!(m.energy_power_multiplier(0.0), 1.0);
        assert_eq!(m.energy_power_multiplier(1.0), 1.0);
        assert!((m.energy_moment_closed(2.0, 1.0) - 1f64.exp()).abs() < 1e-15);
        assert!((m.energy_power_multiplier(2.0) - 0.5f64.exp()).abs() < 1e-15);
        let m = NormalLawModel::new(2.0, 1.0, 1.0).unwrap();
        assert!((m.energy_power_multiplier(0.5) - (-1.0f64 / 32.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn kernel_examples() {
        let m = NormalLawModel::figure2();
        assert_eq!(m.action_kernel(2.0, 2.0).unwrap(), 1.0);
        let e = 1f64.exp();
        assert!((m.action_kernel(e, 1.0).unwrap() - (-0.25f64).exp()).abs() < 1e-15);
        assert_eq!(m.action_kernel(3.0, 0.5).unwrap(), m.action_kernel(0.5, 3.0).unwrap());
        // brute force over the raw product, no completed square anywhere
        let m = NormalLawModel::new(1.4, 2.2, 1.0).unwrap();
        let (e1, e2) = (0.3, 4.0);
        let raw = integrate_real_line(
            |j| Complex64::new((m.density(j, e1) * m.density(j, e2)).sqrt(), 0.0),
            0.0,
            1.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((raw.re - m.action_kernel(e1, e2).unwrap()).abs() < 1e-10);
        assert!((m.action_kernel_quadrature(e1, e2).unwrap() - raw.re).abs() < 1e-10);
    }

    #[test]
    fn fourier_kernel_examples() {
        let m = NormalLawModel::figure2();
        let (s, w) = m.fourier_exponential_kernel(0.0, 2.0).unwrap();
        assert_eq!(s, 2.0);
        assert!((w - PI).abs() < 1e-15);
        for e in [0.5, 1.0] {
            assert!(matches!(
                m.fourier_exponential_kernel(1.0, e),
                Err(Error::OutOfSpectralRange { .. })
            ));
        }
        let e = 1f64.exp();
        let (s, w) = m.fourier_exponential_kernel(e - 1.0, e).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((w - PI * (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn lower_symbol_examples() {
        let m = NormalLawModel::figure2();
        let l = PaaCsLabel::new(0.0, 0.0);
        assert!((m.lower_symbol_action(|_| 1.0, &l).unwrap() - 1.0).abs() < 1e-9);
        let v = m.lower_symbol_action(|j| m.e_of_j(j), &l).unwrap();
        assert!((v - 1f64.exp()).abs() < 1e-8, "{v}");
        let shifted = PaaCsLabel::new(0.0, 5.0);
        assert_eq!(
            m.lower_symbol_action(|j| j * j, &l).unwrap(),
            m.lower_symbol_action(|j| j * j, &shifted).unwrap()
        );
    }

    #[test]
    fn evolution_is_an_angle_shift() {
        let m = NormalLawModel::new(1.0, 1.0, 2.5).unwrap();
        let l = PaaCsLabel::new(0.4, -1.0);
        let es = [0.1, 1.0, 3.0, 7.5];
        assert_eq!(m.evolution_shift_check(&l, 0.0, &es).unwrap(), 0.0);
        assert!(m.evolution_shift_check(&l, 1.7, &es).unwrap() < 1e-12);
    }
}
