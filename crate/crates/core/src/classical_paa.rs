//! Pseudo-action / angle coordinates for unbounded one-dimensional motion.
//!
//! For `H = p^2/2m + V(q)` on the positive-velocity branch, the pseudo-action
//! is any increasing function `J(E)` and its conjugate is
//! `gamma = t(q, E) / J'(E)`, with `t` the time of flight from `q0`.

use crate::error::{Error, Result};
use crate::numerics::{fd_derivative, try_integrate_interval, ComplexValue, DerivativeOrder, QuadratureSpec};

/// Smallest admitted kinetic energy `E - V` along an integration path.
pub const MIN_GAP: f64 = 1e-9;

pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-4;

pub trait Potential {
    fn value(&self, q: f64) -> f64;
    fn derivative(&self, q: f64) -> f64;
}

/// `V = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Free;

impl Potential for Free {
    fn value(&self, _q: f64) -> f64 {
        0.0
    }

    fn derivative(&self, _q: f64) -> f64 {
        0.0
    }
}

/// `V = slope * q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub slope: f64,
}

impl Potential for Linear {
    fn value(&self, q: f64) -> f64 {
        self.slope * q
    }

    fn derivative(&self, _q: f64) -> f64 {
        self.slope
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialModel<V> {
    pub potential: V,
    pub mass: f64,
    pub q0: f64,
}

impl<V: Potential> PotentialModel<V> {
    pub fn new(potential: V, mass: f64, q0: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidDomain(format!("mass must be > 0, got {mass}")));
        }
        if !q0.is_finite() {
            return Err(Error::InvalidDomain("q0 must be finite".into()));
        }
        Ok(Self { potential, mass, q0 })
    }

    pub fn energy(&self, q: f64, p: f64) -> f64 {
        p * p / (2.0 * self.mass) + self.potential.value(q)
    }

    /// `|V'(q) - dV/dq|` with the numerical derivative at step `1e-4`.
    pub fn derivative_mismatch(&self, q: f64) -> f64 {
        let numeric = fd_derivative(
            |x| ComplexValue::new(self.potential.value(x), 0.0),
            q,
            DerivativeOrder::First,
            1e-4,
        );
        match numeric {
            Ok(d) => (d.re - self.potential.derivative(q)).abs(),
            Err(_) => f64::INFINITY,
        }
    }

    fn gap(&self, q: f64, energy: f64) -> Result<f64> {
        let gap = energy - self.potential.value(q);
        if gap < MIN_GAP || !gap.is_finite() {
            return Err(Error::ClassicallyForbidden { q, gap });
        }
        Ok(gap)
    }
}

/// `p = sqrt(2m) sqrt(E - V(q))`.
pub fn momentum_of<V: Potential>(q: f64, energy: f64, pot: &PotentialModel<V>) -> Result<f64> {
    let gap = energy - pot.potential.value(q);
    if gap <= 0.0 || !gap.is_finite() {
        return Err(Error::ClassicallyForbidden { q, gap });
    }
    Ok((2.0 * pot.mass).sqrt() * gap.sqrt())
}

/// `t - t0 = sqrt(m/2) \int_{q0}^{q} dq' / sqrt(E - V(q'))`.
pub fn time_of_flight<V: Potential>(q: f64, energy: f64, pot: &PotentialModel<V>) -> Result<f64> {
    time_of_flight_with(q, energy, pot, &QuadratureSpec::default())
}

pub fn time_of_flight_with<V: Potential>(
    q: f64,
    energy: f64,
    pot: &PotentialModel<V>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    pot.gap(pot.q0, energy)?;
    pot.gap(q, energy)?;
    let v = try_integrate_interval(
        |x| Ok(ComplexValue::new(pot.gap(x, energy)?.sqrt().recip(), 0.0)),
        pot.q0,
        q,
        spec,
    )?;
    Ok((pot.mass / 2.0).sqrt() * v.re)
}

/// Strictly increasing map `E -> J` with its inverse and derivative.
pub trait PseudoAction {
    fn j_of_e(&self, energy: f64) -> Result<f64>;
    fn e_of_j(&self, j: f64) -> f64;
    fn jprime_of_e(&self, energy: f64) -> Result<f64>;
}

/// `J = eta ln E` on `E > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPseudoAction {
    pub eta: f64,
}

impl LogPseudoAction {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidDomain(format!("eta must be > 0, got {eta}")));
        }
        Ok(Self { eta })
    }

    fn domain(energy: f64) -> Result<()> {
        if energy > 0.0 && energy.is_finite() {
            Ok(())
        } else {
            Err(Error::DomainError(format!("J = eta ln E needs E > 0, got {energy}")))
        }
    }
}

impl PseudoAction for LogPseudoAction {
    fn j_of_e(&self, energy: f64) -> Result<f64> {
        Self::domain(energy)?;
        Ok(self.eta * energy.ln())
    }

    fn e_of_j(&self, j: f64) -> f64 {
        (j / self.eta).exp()
    }

    fn jprime_of_e(&self, energy: f64) -> Result<f64> {
        Self::domain(energy)?;
        Ok(self.eta / energy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngle {
    pub j: f64,
    pub gamma: f64,
}

/// `(q, p) -> (J, gamma)` with `J = J(E(q,p))` and `gamma = t(q,p) / J'(E)`.
pub fn to_action_angle<V: Potential, M: PseudoAction>(
    point: PhasePoint,
    pot: &PotentialModel<V>,
    map: &M,
) -> Result<ActionAngle> {
    if !(point.p > 0.0) {
        return Err(Error::DomainError(format!(
            "only the positive-velocity branch is implemented, got p = {}",
            point.p
        )));
    }
    let energy = pot.energy(point.q, point.p);
    let j = map.j_of_e(energy)?;
    let t = time_of_flight_with(point.q, energy, pot, &QuadratureSpec::default().tightened(100.0))?;
    Ok(ActionAngle {
        j,
        gamma: t / map.jprime_of_e(energy)?,
    })
}

/// `(q, p) -> (t, J)`, the intermediate map whose Jacobian is `J'(E)`.
pub fn to_time_action<V: Potential, M: PseudoAction>(
    point: PhasePoint,
    pot: &PotentialModel<V>,
    map: &M,
) -> Result<(f64, f64)> {
    let energy = pot.energy(point.q, point.p);
    let t = time_of_flight_with(point.q, energy, pot, &QuadratureSpec::default().tightened(100.0))?;
    Ok((t, map.j_of_e(energy)?))
}

/// Central difference of a vector map with one Richardson level.
fn richardson<F>(f: &F, point: PhasePoint, step: f64) -> Result<[[f64; 2]; 2]>
where
    F: Fn(PhasePoint) -> Result<(f64, f64)>,
{
    let central = |h: f64| -> Result<[[f64; 2]; 2]> {
        let dq = |s: f64| f(PhasePoint { q: point.q + s, ..point });
        let dp = |s: f64| f(PhasePoint { p: point.p + s, ..point });
        let (qa, qb) = (dq(h)?, dq(-h)?);
        let (pa, pb) = (dp(h)?, dp(-h)?);
        Ok([
            [(qa.0 - qb.0) / (2.0 * h), (pa.0 - pb.0) / (2.0 * h)],
            [(qa.1 - qb.1) / (2.0 * h), (pa.1 - pb.1) / (2.0 * h)],
        ])
    };
    let coarse = central(step)?;
    let fine = central(step / 2.0)?;
    let mut m = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = (4.0 * fine[r][c] - coarse[r][c]) / 3.0;
        }
    }
    Ok(m)
}

fn det(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// `det d(gamma, J)/d(q, p)`, coordinate first and conjugate momentum second.
pub fn jacobian_determinant<V: Potential, M: PseudoAction>(
    point: PhasePoint,
    pot: &PotentialModel<V>,
    map: &M,
    step: f64,
) -> Result<f64> {
    let f = |pt: PhasePoint| to_action_angle(pt, pot, map).map(|a| (a.gamma, a.j));
    Ok(det(richardson(&f, point, step)?))
}

/// `|det d(gamma, J)/d(q, p) - 1|`.
pub fn jacobian_check<V: Potential, M: PseudoAction>(
    point: PhasePoint,
    pot: &PotentialModel<V>,
    map: &M,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidDomain(format!("step must be > 0, got {step}")));
    }
    Ok((jacobian_determinant(point, pot, map, step)? - 1.0).abs())
}

/// `det d(t, J)/d(q, p)`, which equals `J'(E)`.
pub fn intermediate_determinant<V: Potential, M: PseudoAction>(
    point: PhasePoint,
    pot: &PotentialModel<V>,
    map: &M,
    step: f64,
) -> Result<f64> {
    let f = |pt: PhasePoint| to_time_action(pt, pot, map);
    Ok(det(richardson(&f, point, step)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(mass: f64) -> PotentialModel<Free> {
        PotentialModel::new(Free, mass, 0.0).unwrap()
    }

    fn linear(mass: f64) -> PotentialModel<Linear> {
        PotentialModel::new(Linear { slope: 1.0 }, mass, 0.0).unwrap()
    }

    #[test]
    fn momentum_examples() {
        assert_eq!(momentum_of(3.0, 1.0, &free(0.5)).unwrap(), 1.0);
        assert!((momentum_of(1.0, 2.0, &linear(0.5)).unwrap() - 1.0).abs() < 1e-15);
        assert!((momentum_of(1.0, 5.0, &linear(2.0)).unwrap() - 4.0).abs() < 1e-15);
        assert!(matches!(
            momentum_of(2.0, 1.0, &linear(1.0)),
            Err(Error::ClassicallyForbidden { .. })
        ));
    }

    #[test]
    fn time_of_flight_examples() {
        assert!((time_of_flight(3.0, 0.5, &free(1.0)).unwrap() - 3.0).abs() < 1e-14);
        // antiderivative of 1/sqrt(E - q) is -2 sqrt(E - q)
        let t = time_of_flight(0.75, 1.0, &linear(0.5)).unwrap();
        let oracle = 0.5f64.sqrt() * 0.5f64.sqrt() * (-2.0 * 0.25f64.sqrt() + 2.0);
        assert!((t - oracle).abs() < 1e-13);
        assert!((t - 0.5).abs() < 1e-13);
        assert_eq!(time_of_flight(0.0, 1.0, &linear(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn forbidden_path_is_rejected() {
        let e = time_of_flight(1.5, 1.0, &linear(0.5)).unwrap_err();
        assert!(matches!(e, Error::ClassicallyForbidden { .. }));
    }

    #[test]
    fn free_particle_action_angle() {
        let map = LogPseudoAction::new(1.0).unwrap();
        let a = to_action_angle(PhasePoint { q: 1.0, p: 1.0 }, &free(0.5), &map).unwrap();
        // E = 1, t = m q / p = 1/2, J'(1) = 1
        assert!(a.j.abs() < 1e-15);
        assert!((a.gamma - 0.5).abs() < 1e-13);
        let origin = to_action_angle(PhasePoint { q: 0.0, p: 3.0 }, &free(0.5), &map).unwrap();
        assert_eq!(origin.gamma, 0.0);
    }

    #[test]
    fn negative_velocity_rejected() {
        let map = LogPseudoAction::new(1.0).unwrap();
        let e = to_action_angle(PhasePoint { q: 1.0, p: -1.0 }, &free(0.5), &map).unwrap_err();
        assert!(matches!(e, Error::DomainError(_)));
    }

    #[test]
    fn unit_jacobian() {
        let map = LogPseudoAction::new(1.0).unwrap();
        let r = jacobian_check(PhasePoint { q: 1.0, p: 2.0 }, &free(0.5), &map, DEFAULT_JACOBIAN_STEP).unwrap();
        assert!(r < 1e-6, "{r}");
        let r = jacobian_check(PhasePoint { q: 0.3, p: 1.5 }, &linear(0.5), &map, DEFAULT_JACOBIAN_STEP).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn intermediate_jacobian_is_jprime() {
        let map = LogPseudoAction::new(1.0).unwrap();
        let pot = linear(0.5);
        let pt = PhasePoint { q: 0.3, p: 1.5 };
        let d = intermediate_determinant(pt, &pot, &map, DEFAULT_JACOBIAN_STEP).unwrap();
        let jp = map.jprime_of_e(pot.energy(pt.q, pt.p)).unwrap();
        assert!((d - jp).abs() < 1e-6, "{d} vs {jp}");
    }

    #[test]
    fn log_map_round_trip() {
        let map = LogPseudoAction::new(0.7).unwrap();
        for e in [1e-3, 0.5, 1.0, 42.0] {
            let back = map.e_of_j(map.j_of_e(e).unwrap());
            assert!((back - e).abs() < 1e-10 * e);
            assert!(map.jprime_of_e(e).unwrap() > 0.0);
        }
        assert!(map.j_of_e(0.0).is_err());
    }

    #[test]
    fn potential_derivatives_agree() {
        assert!(linear(1.0).derivative_mismatch(0.4) < 1e-6);
        assert!(free(1.0).derivative_mismatch(-2.0) < 1e-6);
    }
}
