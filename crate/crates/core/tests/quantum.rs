use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;
use qthp::games::{builtin_game, classical_payoff, BuiltinGame};
use qthp::quantum::{expected_payoff, final_state, su2, Dims, Move, StrategyParams, UnitaryMatrix, OUTCOMES};
use qthp::{GameSpec, Player};

fn games() -> Vec<GameSpec> {
    [BuiltinGame::Pd, BuiltinGame::Eg, BuiltinGame::Sh]
        .into_iter()
        .map(builtin_game)
        .collect()
}

fn angles() -> impl Strategy<Value = (f64, f64, f64)> {
    (-PI..=PI, 0.0..2.0 * PI, 0.0..2.0 * PI)
}

fn params((t, a, b): (f64, f64, f64)) -> StrategyParams {
    StrategyParams::new(Dims::Three, t, a, b).unwrap()
}

// entries straight from the half-angle formula, independent of the library
fn explicit_gate(t: f64, a: f64, b: f64) -> Matrix2<Complex64> {
    let (c, s) = ((0.5 * t).cos(), (0.5 * t).sin());
    let e = |x: f64| Complex64::from_polar(1.0, 0.5 * x);
    Matrix2::new(e(a) * c, e(b) * s, -e(-b) * s, e(-a) * c)
}

#[test]
fn corner_profiles_reproduce_bimatrices() {
    for g in games() {
        for (alice, bob) in OUTCOMES {
            let ua = StrategyParams::from_move(alice, Dims::Three).gate();
            let ub = StrategyParams::from_move(bob, Dims::Three).gate();
            let (pa, pb) = expected_payoff(&g, &ua, &ub).unwrap();
            assert!(
                (pa - g.entry(Player::A, alice, bob)).abs() <= 1e-12,
                "{} {alice}{bob}",
                g.name
            );
            assert!(
                (pb - g.entry(Player::B, alice, bob)).abs() <= 1e-12,
                "{} {alice}{bob}",
                g.name
            );
        }
    }
}

#[test]
fn quantum_profiles() {
    let q = StrategyParams::quantum(Dims::Two).unwrap().gate();
    let d = StrategyParams::defect(Dims::Two).gate();
    let pd = builtin_game(BuiltinGame::Pd);
    let (a, b) = expected_payoff(&pd, &q, &q).unwrap();
    assert!((a - 3.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
    // Q against D lands on the (C, D) outcome of the swapped roles
    let (a, b) = expected_payoff(&pd, &q, &d).unwrap();
    assert!((a - 5.0).abs() < 1e-12 && b.abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gates_are_special_unitary(raw in angles()) {
        let u = su2(&params(raw));
        prop_assert!(u.unitarity_defect() < 1e-12);
        prop_assert!((u.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let want = explicit_gate(raw.0, raw.1, raw.2);
        prop_assert!((u.matrix() - want).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn payoffs_within_bimatrix_range(ra in angles(), rb in angles()) {
        let (ua, ub) = (params(ra).gate(), params(rb).gate());
        for g in games() {
            let (pa, pb) = expected_payoff(&g, &ua, &ub).unwrap();
            for (p, m) in [(pa, g.a), (pb, g.b)] {
                let flat = m.iter().flatten();
                let lo = flat.clone().cloned().fold(f64::INFINITY, f64::min);
                let hi = flat.cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn final_states_are_pure_density_matrices(ra in angles(), rb in angles()) {
        let rho = final_state(&params(ra).gate(), &params(rb).gate()).unwrap();
        prop_assert!(rho.is_valid());
        prop_assert!((rho.purity() - 1.0).abs() < 1e-12);
        let probs: f64 = rho.outcome_probabilities().iter().sum();
        prop_assert!((probs - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn global_phase_does_not_change_payoffs(ra in angles(), rb in angles()) {
        let (ua, ub) = (params(ra).gate(), params(rb).gate());
        let shifted = ua.with_phase(0.7);
        for g in games() {
            let x = expected_payoff(&g, &ua, &ub).unwrap();
            let y = expected_payoff(&g, &shifted, &ub).unwrap();
            prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_sector_is_the_mixed_bimatrix_game(ta in 0.0..PI, tb in 0.0..PI) {
        let ua = StrategyParams::new(Dims::One, ta, 0.0, 0.0).unwrap().gate();
        let ub = StrategyParams::new(Dims::One, tb, 0.0, 0.0).unwrap().gate();
        let (pa, pb) = ((0.5 * ta).cos().powi(2), (0.5 * tb).cos().powi(2));
        for g in games() {
            let q = expected_payoff(&g, &ua, &ub).unwrap();
            let c = classical_payoff(&g, pa, pb).unwrap();
            prop_assert!((q.0 - c.0).abs() < 1e-12 && (q.1 - c.1).abs() < 1e-12);
        }
    }

    #[test]
    fn gate_distance_ignores_global_phase(raw in angles(), phi in 0.0..2.0 * PI) {
        let u = params(raw).gate();
        prop_assert!(u.distance_up_to_phase(&u.with_phase(phi)) < 1e-9);
    }
}

#[test]
fn non_unitary_gates_rejected() {
    let m = Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.1, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    );
    assert!(UnitaryMatrix::from_matrix(m).is_err());
}

#[test]
fn moves_index_the_bell_basis() {
    assert_eq!(Move::C.index(), 0);
    assert_eq!(Move::D.index(), 1);
}
