use proptest::prelude::*;
use wavecs::classical_paa::{
    intermediate_determinant, jacobian_check, time_of_flight, Free, Linear, LogPseudoAction, PhasePoint,
    Potential, PotentialModel, PseudoAction, DEFAULT_JACOBIAN_STEP,
};

/// 5x5 grid of positive-velocity points with the origin of time at `q0 = 0`.
fn grid(q_lo: f64, p_lo: f64) -> Vec<PhasePoint> {
    let mut pts = Vec::new();
    for i in 0..5 {
        for k in 0..5 {
            pts.push(PhasePoint {
                q: q_lo + 0.4 * i as f64,
                p: p_lo + 0.35 * k as f64,
            });
        }
    }
    pts
}

fn worst_canonicity<V: Potential>(pot: &PotentialModel<V>, map: &LogPseudoAction, pts: &[PhasePoint]) -> f64 {
    pts.iter()
        .map(|&pt| jacobian_check(pt, pot, map, DEFAULT_JACOBIAN_STEP).unwrap())
        .fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn canonical_on_grids(
        mass in 0.5f64..2.0, eta in 0.5f64..3.0,
        q_lo in 0.2f64..1.0, p_lo in 0.5f64..1.5,
    ) {
        let map = LogPseudoAction::new(eta).unwrap();
        let pts = grid(q_lo, p_lo);
        let free = PotentialModel::new(Free, mass, 0.0).unwrap();
        let lin = PotentialModel::new(Linear { slope: 1.0 }, mass, 0.0).unwrap();
        prop_assert!(worst_canonicity(&free, &map, &pts) < 1e-6);
        prop_assert!(worst_canonicity(&lin, &map, &pts) < 1e-6);
        for pt in pts {
            let e = lin.energy(pt.q, pt.p);
            let d = intermediate_determinant(pt, &lin, &map, DEFAULT_JACOBIAN_STEP).unwrap();
            prop_assert!((d - map.jprime_of_e(e).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn angle_is_additive(mass in 0.5f64..2.0, eta in 0.5f64..3.0, energy in 2.5f64..6.0,
                         q1 in -1.0f64..1.0, q2 in -1.0f64..2.0) {
        let lin = PotentialModel::new(Linear { slope: 1.0 }, mass, 0.0).unwrap();
        let map = LogPseudoAction::new(eta).unwrap();
        let jp = map.jprime_of_e(energy).unwrap();
        let g = |q: f64| {
            let p = wavecs::classical_paa::momentum_of(q, energy, &lin).unwrap();
            wavecs::classical_paa::to_action_angle(PhasePoint { q, p }, &lin, &map).unwrap().gamma
        };
        let dt = time_of_flight(q2, energy, &lin).unwrap() - time_of_flight(q1, energy, &lin).unwrap();
        prop_assert!((g(q2) - g(q1) - dt / jp).abs() < 1e-10);
    }

    #[test]
    fn flight_time_increases(mass in 0.5f64..2.0, energy in 2.5f64..6.0, q in -1.0f64..2.0, dq in 1e-3f64..0.4) {
        let lin = PotentialModel::new(Linear { slope: 1.0 }, mass, 0.0).unwrap();
        prop_assert!(time_of_flight(q + dq, energy, &lin).unwrap() > time_of_flight(q, energy, &lin).unwrap());
        let free = PotentialModel::new(Free, mass, 0.0).unwrap();
        prop_assert!(time_of_flight(q + dq, energy, &free).unwrap() > time_of_flight(q, energy, &free).unwrap());
    }
}
