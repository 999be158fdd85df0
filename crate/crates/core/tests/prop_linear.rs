use num_complex::Complex64;
use proptest::prelude::*;
use wavecs::grid::GridSpec;
use wavecs::linear_cs::{delta, overlap, CsLabel, LinearCs, LinearModel, MotionIntegralCoeffs};
use wavecs::numerics::QuadratureSpec;

/// `c1` on the circle of radius `sqrt(1 + |c2|^2)`, so `Delta = 1`.
fn unit_coeffs() -> impl Strategy<Value = MotionIntegralCoeffs> {
    (0.0f64..1.5, -3.2f64..3.2, -3.2f64..3.2).prop_map(|(r2, a1, a2)| {
        let c2 = Complex64::from_polar(r2, a2);
        let c1 = Complex64::from_polar((1.0 + r2 * r2).sqrt(), a1);
        MotionIntegralCoeffs { c1, c2 }
    })
}

fn label() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

/// Cholesky of a Hermitian matrix; `None` when a pivot is not positive.
fn cholesky(a: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
    let n = a.len();
    let mut l = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            if i == j {
                if !(s.re > 0.0) {
                    return None;
                }
                l[i][i] = Complex64::new(s.re.sqrt(), 0.0);
            } else {
                l[i][j] = s / l[j][j].re;
            }
        }
    }
    Some(l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn delta_is_conserved(c in unit_coeffs(), tau in 0.0f64..1.0) {
        let d0 = delta(c.c1, c.c2);
        let dt = c.f(tau).norm_sqr() - c.g(tau).norm_sqr();
        prop_assert!((dt - d0).abs() < 1e-12 * (1.0 + c.f(tau).norm_sqr()));
    }

    #[test]
    fn label_round_trip(c in unit_coeffs(), x0 in -20.0f64..20.0, p0 in -20.0f64..20.0, z in label()) {
        let l = CsLabel::from_initial_data(x0, p0, &c);
        prop_assert!((l.x0(&c) - x0).abs() < 1e-12 * (1.0 + x0.abs() + p0.abs()));
        prop_assert!((l.p0(&c) - p0).abs() < 1e-12 * (1.0 + x0.abs() + p0.abs()));
        let back = CsLabel::from_initial_data(CsLabel::new(z).x0(&c), CsLabel::new(z).p0(&c), &c);
        prop_assert!((back.z - z).norm() < 1e-12 * (1.0 + z.norm()));
    }

    #[test]
    fn closed_form_uncertainty_is_quarter(c in unit_coeffs(), b in -5.0f64..5.0, tau in 0.0f64..1.0, z in label()) {
        let s = LinearCs::new(LinearModel::new(b).unwrap(), c, CsLabel::new(z)).unwrap();
        prop_assert!((s.moments(tau).uncertainty() - 0.25).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadrature_mean_tracks_parabola(tau in 0.0f64..0.1) {
        let s = LinearCs::figure1();
        let m = s.quadrature_moments(tau, &QuadratureSpec::default()).unwrap();
        let b = s.model().b();
        let parabola = 15.0 * tau - std::f64::consts::SQRT_2 * b * tau * tau;
        prop_assert!((m.x_mean - parabola).abs() < 1e-7, "{} vs {}", m.x_mean, parabola);
    }

    #[test]
    fn quadrature_uncertainty(c in unit_coeffs(), tau in 0.0f64..1.0, z in label()) {
        let s = LinearCs::new(LinearModel::new(2.0).unwrap(), c, CsLabel::new(z)).unwrap();
        let m = s.quadrature_moments(tau, &QuadratureSpec::default()).unwrap();
        prop_assert!((m.uncertainty() - 0.25).abs() < 1e-10, "{}", m.uncertainty());
    }

    #[test]
    fn eigen_ode_agrees_with_closed_form(c in unit_coeffs(), b in -5.0f64..5.0, tau in 0.0f64..0.5, z in label()) {
        let s = LinearCs::new(LinearModel::new(b).unwrap(), c, CsLabel::new(z)).unwrap();
        let spec = QuadratureSpec::default();
        let sol = s.eigen_ode_solution(tau, &spec).unwrap();
        let m = s.moments(tau);
        let w = 3.0 * m.sigma1.sqrt();
        let grid = GridSpec::new(m.x_mean - w, m.x_mean + w, 13).unwrap();
        // both are phase-matched at the mean, so the global phase is 1
        for x in grid.points() {
            let d = (sol.eval(x, &spec).unwrap() - s.wavefunction(tau, x)).norm();
            prop_assert!(d < 1e-8, "x={} d={}", x, d);
        }
    }

    #[test]
    fn gram_matrix_is_positive(zs in prop::array::uniform5(label())) {
        let mut g: Vec<Vec<Complex64>> = zs
            .iter()
            .map(|a| zs.iter().map(|b| overlap(&CsLabel::new(*a), &CsLabel::new(*b))).collect())
            .collect();
        for (i, row) in g.iter_mut().enumerate() {
            row[i] += 1e-10;
        }
        prop_assert!(cholesky(&g).is_some());
    }
}

#[test]
fn overlap_quadrature_spot() {
    let s = LinearCs::figure1();
    let other = CsLabel::new(Complex64::new(0.3, -1.1));
    let v = s.quadrature_overlap(&other, 0.02, &QuadratureSpec::default()).unwrap();
    let closed = overlap(&other, &s.label());
    assert!((v - closed).norm() < 1e-8, "{v} vs {closed}");
}
