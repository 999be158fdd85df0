use std::f64::consts::PI;

use num_complex::Complex64;

use super::{LogWindow, NormalLawModel, PaaCsLabel, PhaseFrequency};
use crate::error::Result;
use crate::numerics::try_integrate_interval;

impl NormalLawModel {
    /// `<bra | ket>` in the completed-square form
    ///
    /// ```text
    /// (N N')^{-1/2} e^{-eps (J - J')^2 / 4} (eps/pi)^{1/2}
    ///   \int_0^inf dE e^{-i alpha(E) (gamma - gamma')} e^{-eps ((J + J')/2 - eta ln E)^2}
    /// ```
    pub fn overlap(&self, bra: &PaaCsLabel, ket: &PaaCsLabel) -> Result<Complex64> {
        let dj = ket.j - bra.j;
        let jbar = 0.5 * (ket.j + bra.j);
        let dgamma = ket.gamma - bra.gamma;
        let prefactor = (-self.eps * dj * dj / 4.0).exp() * (self.eps / PI).sqrt()
            / (self.normalization(ket.j)? * self.normalization(bra.j)?).sqrt();
        let win = self.energy_window(jbar, 1.0);
        let freq = self.phase.rate_bound() * dgamma.abs();
        let integral = match self.phase {
            PhaseFrequency::Linear { sigma } if self.e_max.is_none() && dgamma != 0.0 => {
                self.rotated_energy_integral(jbar, sigma * dgamma, win)?
            }
            _ => self.energy_integral(win, freq, |e| {
                let d = jbar - self.eta * e.ln();
                Ok(Complex64::from_polar((-self.eps * d * d).exp(), -self.phase.alpha(e) * dgamma))
            })?,
        };
        Ok(integral * prefactor)
    }

    /// `\int_0^inf dE e^{-i k E} e^{-eps (jbar - eta ln E)^2}` with `v = ln E`
    /// moved to `v - i theta sign(k)`, where `e^{-i k E}` decays. The
    /// Gaussian grows by at most `e^{eps eta^2 theta^2}`, so `theta` is
    /// capped at `1 / (eta sqrt eps)`.
    pub(crate) fn rotated_energy_integral(&self, jbar: f64, k: f64, win: LogWindow) -> Result<Complex64> {
        let theta = (0.5 * PI).min(1.0 / (self.eta * self.eps.sqrt()));
        let shift = Complex64::new(0.0, -theta * k.signum());
        try_integrate_interval(
            |v| {
                let w = shift + v;
                let d = -w * self.eta + jbar;
                Ok((w - d * d * self.eps - Complex64::i() * k * w.exp()).exp())
            },
            win.lo.ln(),
            win.hi.ln(),
            &self.quad,
        )
    }

    /// `\int_0^inf conj(c_E(bra)) c_E(ket) dE`, straight from the coefficients.
    pub fn overlap_from_coefficients(&self, bra: &PaaCsLabel, ket: &PaaCsLabel) -> Result<Complex64> {
        let (nb, nk) = (self.normalization(bra.j)?, self.normalization(ket.j)?);
        let win = self.energy_window(0.5 * (ket.j + bra.j), 1.0);
        let freq = self.phase.rate_bound() * (ket.gamma - bra.gamma).abs();
        self.energy_integral(win, freq, |e| {
            Ok(self.coefficient_with_norm(bra, e, nb).conj() * self.coefficient_with_norm(ket, e, nk))
        })
    }

    /// The overlap integral with the phase factor removed; bounds `|<bra|ket>|`.
    pub fn overlap_bound(&self, bra: &PaaCsLabel, ket: &PaaCsLabel) -> Result<f64> {
        let stripped = |l: &PaaCsLabel| PaaCsLabel { gamma: 0.0, ..*l };
        Ok(self.overlap(&stripped(bra), &stripped(ket))?.re)
    }

    /// `N(J) |<probe | reference>|^2` with `J` the reference action.
    pub fn phase_space_density(&self, reference: &PaaCsLabel, probe: &PaaCsLabel) -> Result<f64> {
        Ok(self.normalization(reference.j)? * self.overlap(probe, reference)?.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on `(0, upper]` at step `h`; the integrand vanishes
    /// faster than any power at 0. `upper = 400` leaves a tail below 1e-15.
    fn simpson<F: Fn(f64) -> Complex64>(f: F, upper: f64, h: f64) -> Complex64 {
        let n = (upper / h).round() as usize;
        let n = n + n % 2;
        let mut s = f(upper);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * (h / 3.0)
    }

    #[test]
    fn self_overlap_is_one() {
        let m = NormalLawModel::figure2();
        for l in [PaaCsLabel::new(0.0, 0.0), PaaCsLabel::new(-1.3, 4.0)] {
            assert!((m.overlap(&l, &l).unwrap() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn overlap_matches_simpson_oracle() {
        let m = NormalLawModel::figure2();
        let bra = PaaCsLabel::new(0.0, 1.0);
        let ket = PaaCsLabel::new(0.0, 0.0);
        let v = m.overlap(&bra, &ket).unwrap();
        let n0 = m.normalization_closed(0.0);
        let oracle = simpson(
            |e| Complex64::from_polar((-(e.ln()).powi(2)).exp(), e) / (PI.sqrt() * n0),
            400.0,
            1e-4,
        );
        assert!((v - oracle).norm() < 1e-9, "{v} vs {oracle}");
    }

    #[test]
    fn overlap_matches_coefficient_form() {
        let m = NormalLawModel::new(1.3, 0.7, 1.5).unwrap();
        let a = PaaCsLabel::new(0.4, -1.0);
        let b = PaaCsLabel::new(-0.9, 2.0);
        let direct = m.overlap(&a, &b).unwrap();
        let coeff = m.overlap_from_coefficients(&a, &b).unwrap();
        assert!((direct - coeff).norm() < 1e-9);
        assert!((m.overlap(&b, &a).unwrap() - direct.conj()).norm() < 1e-12);
    }

    #[test]
    fn overlap_against_rotated_contour() {
        // e^{-i k E} decays along E = -i r for k > 0, so the energy integral
        // equals -i \int_0^inf dr e^{-k r} g(-i r) with g analytic off the cut
        let m = NormalLawModel::figure2();
        let bra = PaaCsLabel::new(0.5, 0.0);
        let ket = PaaCsLabel::new(-1.0, 3.0);
        let k = ket.gamma - bra.gamma;
        let jbar = 0.5 * (ket.j + bra.j);
        let g = |e: Complex64| {
            let d = jbar - e.ln();
            (-d * d).exp()
        };
        let spec = crate::numerics::QuadratureSpec::default();
        let rotated = crate::numerics::integrate_semi_infinite(
            |r| -Complex64::i() * (-k * r).exp() * g(Complex64::new(0.0, -r)),
            0.0,
            &spec.with_log_envelope(),
        )
        .unwrap();
        let dj = ket.j - bra.j;
        let pref = (-dj * dj / 4.0).exp() / PI.sqrt()
            / (m.normalization_closed(ket.j) * m.normalization_closed(bra.j)).sqrt();
        let v = m.overlap(&bra, &ket).unwrap();
        assert!((v - rotated * pref).norm() < 1e-10, "{v} vs {}", rotated * pref);
    }

    #[test]
    fn rotated_ray_agrees_with_real_axis() {
        let m = NormalLawModel::new(0.8, 1.2, -0.7).unwrap();
        for (jbar, dgamma) in [(0.3, 2.0), (-1.1, -3.5), (1.7, 0.4)] {
            let win = m.energy_window(jbar, 1.0);
            let k = -0.7 * dgamma;
            let direct = m
                .energy_integral(win, 0.7 * f64::abs(dgamma), |e| {
                    let d = jbar - 1.2 * e.ln();
                    Ok(Complex64::from_polar((-0.8 * d * d).exp(), -k * e))
                })
                .unwrap();
            let rotated = m.rotated_energy_integral(jbar, k, win).unwrap();
            assert!((direct - rotated).norm() < 1e-10, "{direct} vs {rotated}");
        }
    }

    #[test]
    fn wide_windows_with_fast_phase() {
        let m = NormalLawModel::new(0.5, 0.5, 0.5).unwrap();
        let a = PaaCsLabel::new(0.0, 0.0);
        let b = PaaCsLabel::new(0.0, 4.0);
        let v = m.overlap(&a, &b).unwrap();
        assert!(v.norm() <= 1.0 && v.is_finite());
        assert!((m.overlap(&b, &a).unwrap() - v.conj()).norm() < 1e-12);
    }

    #[test]
    fn bound_and_density() {
        let m = NormalLawModel::figure2();
        let r = PaaCsLabel::new(0.0, 0.0);
        let p = PaaCsLabel::new(1.0, 2.0);
        let v = m.overlap(&p, &r).unwrap().norm();
        let b = m.overlap_bound(&p, &r).unwrap();
        assert!(v <= b + 1e-9);
        assert!((b - (-0.25f64).exp()).abs() < 1e-10);
        let d = m.phase_space_density(&r, &r).unwrap();
        assert!((d - 0.25f64.exp()).abs() < 1e-9);
    }
}
