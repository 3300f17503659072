//! Eisert-scheme two-qubit protocol.
//!
//! Both players start from the Bell state `(|00> + i|11>)/sqrt(2)`, apply a
//! local SU(2) gate each, and are paid according to the Bell-basis projections
//! of the final state. Qubit ordering is Alice first, so the computational
//! basis index of `|ab>` is `2a + b`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::GameSpec;

/// Tolerance used when validating unitarity of caller-supplied gates.
pub const UNITARITY_GATE_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of active strategy parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dims {
    One = 1,
    Two = 2,
    Three = 3,
}

impl Dims {
    pub const ALL: [Dims; 3] = [Dims::One, Dims::Two, Dims::Three];

    pub fn count(self) -> usize {
        self as usize
    }
}

impl TryFrom<u32> for Dims {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        match value {
            1 => Ok(Dims::One),
            2 => Ok(Dims::Two),
            3 => Ok(Dims::Three),
            other => Err(Error::InvalidDims(other)),
        }
    }
}

impl From<Dims> for u32 {
    fn from(d: Dims) -> u32 {
        d as u32
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u32)
    }
}

/// Classical basic strategy: `C` is the identity gate, `D` the bit flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    C,
    D,
}

impl Move {
    pub const BOTH: [Move; 2] = [Move::C, Move::D];

    pub fn index(self) -> usize {
        match self {
            Move::C => 0,
            Move::D => 1,
        }
    }

    pub fn other(self) -> Move {
        match self {
            Move::C => Move::D,
            Move::D => Move::C,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::C => "C",
            Move::D => "D",
        })
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn canonical_theta(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Reduce an angle to `[0, 2pi)`.
pub fn canonical_phase(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid may round tiny negative inputs up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A point `(theta, alpha, beta)` on the strategy torus.
///
/// Angles are stored canonicalized: `theta` in `(-pi, pi]`, `alpha` and
/// `beta` in `[0, 2pi)`. Parameters beyond `dims` are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyParams {
    coords: [f64; 3],
    dims: Dims,
}

impl StrategyParams {
    /// Builds a strategy, rejecting nonzero values in inactive coordinates.
    pub fn new(dims: Dims, theta: f64, alpha: f64, beta: f64) -> Result<Self> {
        let raw = [theta, alpha, beta];
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidStrategy("angles must be finite".into()));
        }
        for (name, &x) in ["alpha", "beta"].iter().zip(&raw[1..]).skip(dims.count() - 1) {
            if canonical_phase(x) != 0.0 {
                return Err(Error::InvalidStrategy(format!(
                    "{name} = {x} but only {dims} parameter(s) active"
                )));
            }
        }
        Ok(Self::from_coords(dims, raw))
    }

    /// Builds a strategy from raw coordinates, zeroing the inactive ones.
    pub fn from_coords(dims: Dims, raw: [f64; 3]) -> Self {
        let n = dims.count();
        let mut coords = [canonical_theta(raw[0]), 0.0, 0.0];
        for i in 1..n {
            coords[i] = canonical_phase(raw[i]);
        }
        StrategyParams { coords, dims }
    }

    pub fn from_move(mv: Move, dims: Dims) -> Self {
        match mv {
            Move::C => Self::cooperate(dims),
            Move::D => Self::defect(dims),
        }
    }

    /// `C = U(0, 0, 0)`.
    pub fn cooperate(dims: Dims) -> Self {
        Self::from_coords(dims, [0.0, 0.0, 0.0])
    }

    /// `D = U(pi, 0, 0)`.
    pub fn defect(dims: Dims) -> Self {
        Self::from_coords(dims, [PI, 0.0, 0.0])
    }

    /// `Q = U(0, pi, 0)`; needs at least two active parameters.
    pub fn quantum(dims: Dims) -> Result<Self> {
        if dims == Dims::One {
            return Err(Error::InvalidStrategy(
                "Q needs at least two active parameters".into(),
            ));
        }
        Ok(Self::from_coords(dims, [0.0, PI, 0.0]))
    }

    pub fn theta(&self) -> f64 {
        self.coords[0]
    }

    pub fn alpha(&self) -> f64 {
        self.coords[1]
    }

    pub fn beta(&self) -> f64 {
        self.coords[2]
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn coords(&self) -> [f64; 3] {
        self.coords
    }

    /// Active coordinates only.
    pub fn active(&self) -> &[f64] {
        &self.coords[..self.dims.count()]
    }

    /// Re-embeds the strategy with another number of active parameters.
    /// Lowering fails when a dropped coordinate is nonzero.
    pub fn with_dims(&self, dims: Dims) -> Result<Self> {
        Self::new(dims, self.coords[0], self.coords[1], self.coords[2])
    }

    /// The gate this point denotes.
    pub fn gate(&self) -> UnitaryMatrix {
        su2(self)
    }
}

impl fmt::Display for StrategyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [t, a, b] = self.coords;
        write!(f, "({t}, {a}, {b})")
    }
}

/// A 2x2 unitary gate.
///
/// Gates built by [`su2`] are special unitary; [`UnitaryMatrix::from_matrix`]
/// accepts any unitary so that global phases can be attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryMatrix(Matrix2<Complex64>);

impl UnitaryMatrix {
    pub fn from_matrix(m: Matrix2<Complex64>) -> Result<Self> {
        let u = UnitaryMatrix(m);
        let defect = u.unitarity_defect();
        if defect.is_nan() || defect > UNITARITY_GATE_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        UnitaryMatrix(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    /// Largest absolute entry of `U^dagger U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.0.adjoint() * self.0 - Matrix2::identity();
        max_abs(p.iter())
    }

    /// `e^{i phi} U`.
    pub fn with_phase(&self, phi: f64) -> Self {
        UnitaryMatrix(self.0 * Complex64::from_polar(1.0, phi))
    }

    /// `min_phi max_ij |U_ij - e^{i phi} V_ij|`: distance between the gates as
    /// physical operations, blind to global phase.
    pub fn distance_up_to_phase(&self, other: &UnitaryMatrix) -> f64 {
        let cost = |phi: f64| {
            let w = Complex64::from_polar(1.0, phi);
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(u, v)| (u - w * v).norm())
                .fold(0.0, f64::max)
        };
        const SCAN: usize = 720;
        let step = TAU / SCAN as f64;
        let (mut best_phi, mut best) = (0.0, f64::INFINITY);
        for k in 0..SCAN {
            let phi = k as f64 * step;
            let c = cost(phi);
            if c < best {
                best = c;
                best_phi = phi;
            }
        }
        // golden-section polish inside the winning scan cell
        let (mut lo, mut hi) = (best_phi - step, best_phi + step);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (cost(x1), cost(x2));
        for _ in 0..60 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = cost(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = cost(x2);
            }
        }
        best.min(f1).min(f2)
    }

    /// `A ⊗ B` in the `|ab>` basis.
    pub fn kron(&self, other: &UnitaryMatrix) -> Matrix4<Complex64> {
        kron2(&self.0, &other.0)
    }
}

pub(crate) fn kron2(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

fn max_abs<'a>(it: impl Iterator<Item = &'a Complex64>) -> f64 {
    it.map(|z| z.norm()).fold(0.0, f64::max)
}

/// The strategy gate
///
/// ```text
/// U(theta, alpha, beta) = [  e^{i alpha/2} cos(theta/2)   e^{i beta/2} sin(theta/2) ]
///                         [ -e^{-i beta/2} sin(theta/2)   e^{-i alpha/2} cos(theta/2) ]
/// ```
///
/// so that `C = U(0,0,0) = I`, `D = U(pi,0,0)` and `Q = U(0,pi,0) = diag(i, -i)`.
pub fn su2(params: &StrategyParams) -> UnitaryMatrix {
    su2_from_angles(params.theta(), params.alpha(), params.beta())
}

pub(crate) fn su2_from_angles(theta: f64, alpha: f64, beta: f64) -> UnitaryMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let ea = Complex64::from_polar(1.0, 0.5 * alpha);
    let eb = Complex64::from_polar(1.0, 0.5 * beta);
    UnitaryMatrix(Matrix2::new(ea * c, eb * s, -eb.conj() * s, ea.conj() * c))
}

/// Outcome labels of the Bell-basis measurement, in payoff-matrix order.
pub const OUTCOMES: [(Move, Move); 4] = [
    (Move::C, Move::C),
    (Move::C, Move::D),
    (Move::D, Move::C),
    (Move::D, Move::D),
];

/// `|psi_xy>` for the outcome `(x, y)`:
///
/// - `|psi_CC> = (|00> + i|11>)/sqrt 2`
/// - `|psi_CD> = (|01> - i|10>)/sqrt 2`
/// - `|psi_DC> = (|10> - i|01>)/sqrt 2`
/// - `|psi_DD> = (|11> + i|00>)/sqrt 2`
pub fn bell_state(alice: Move, bob: Move) -> Vector4<Complex64> {
    let h = FRAC_1_SQRT_2;
    let v = match (alice, bob) {
        (Move::C, Move::C) => [ONE, ZERO, ZERO, I],
        (Move::C, Move::D) => [ZERO, ONE, -I, ZERO],
        (Move::D, Move::C) => [ZERO, -I, ONE, ZERO],
        (Move::D, Move::D) => [I, ZERO, ZERO, ONE],
    };
    Vector4::from_iterator(v.into_iter().map(|z| z * h))
}

/// The four Bell projectors `pi_CC, pi_CD, pi_DC, pi_DD`.
pub fn bell_projectors() -> [Matrix4<Complex64>; 4] {
    OUTCOMES.map(|(x, y)| {
        let v = bell_state(x, y);
        v * v.adjoint()
    })
}

/// Two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState(Matrix4<Complex64>);

impl QuantumState {
    pub(crate) fn from_matrix_unchecked(m: Matrix4<Complex64>) -> Self {
        QuantumState(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs((self.0 - self.0.adjoint()).iter())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    /// Hermitian within 1e-12, unit trace within 1e-12, PSD down to -1e-10.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect() <= 1e-12
            && (self.trace() - ONE).norm() <= 1e-12
            && self.min_eigenvalue() >= -1e-10
    }

    /// `<psi_xy| rho |psi_xy>` for each outcome, in [`OUTCOMES`] order.
    pub fn outcome_probabilities(&self) -> [f64; 4] {
        OUTCOMES.map(|(x, y)| {
            let v = bell_state(x, y);
            (v.adjoint() * self.0 * v)[(0, 0)].re
        })
    }
}

/// `rho_i = |psi_CC><psi_CC|`.
pub fn initial_state() -> QuantumState {
    let v = bell_state(Move::C, Move::C);
    QuantumState(v * v.adjoint())
}

/// `rho_f = (A ⊗ B) rho_i (A ⊗ B)^dagger`.
pub fn final_state(alice: &UnitaryMatrix, bob: &UnitaryMatrix) -> Result<QuantumState> {
    for u in [alice, bob] {
        let defect = u.unitarity_defect();
        if defect.is_nan() || defect > UNITARITY_GATE_TOL {
            return Err(Error::NotUnitary { defect });
        }
    }
    let ab = alice.kron(bob);
    // rho_i is rank one, so propagate the state vector instead
    let psi = ab * bell_state(Move::C, Move::C);
    Ok(QuantumState(psi * psi.adjoint()))
}

/// Hermitian operator `sum_xy m_xy pi_xy` whose Bell-basis eigenvalues are a
/// player's bimatrix entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffOperator(Matrix4<Complex64>);

impl PayoffOperator {
    /// `entries[x][y]` is the payoff when Alice plays `x` and Bob plays `y`.
    pub fn new(entries: &[[f64; 2]; 2]) -> Self {
        let projectors = bell_projectors();
        let m = OUTCOMES
            .iter()
            .zip(projectors.iter())
            .fold(Matrix4::zeros(), |acc, (&(x, y), p)| {
                acc + p * Complex64::new(entries[x.index()][y.index()], 0.0)
            });
        PayoffOperator(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    /// `Tr(P rho)`.
    pub fn expectation(&self, state: &QuantumState) -> f64 {
        // Tr(P rho) = sum_ij P_ij rho_ji
        let (p, r) = (&self.0, &state.0);
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += p[(i, j)] * r[(j, i)];
            }
        }
        acc.re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `(Tr(P_A rho_f), Tr(P_B rho_f))`.
pub fn expected_payoff(game: &GameSpec, alice: &UnitaryMatrix, bob: &UnitaryMatrix) -> Result<(f64, f64)> {
    let rho = final_state(alice, bob)?;
    let (pa, pb) = game.payoff_operators();
    Ok((pa.expectation(&rho), pb.expectation(&rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{builtin_game, BuiltinGame};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff2(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
        max_abs((a - b).iter())
    }

    fn max_diff4(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> f64 {
        max_abs((a - b).iter())
    }

    #[test]
    fn canonicalization_ranges() {
        assert_eq!(canonical_theta(PI), PI);
        assert_eq!(canonical_theta(-PI), PI);
        assert!((canonical_theta(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(canonical_phase(TAU), 0.0);
        assert_eq!(canonical_phase(-1e-18), 0.0);
        assert!((canonical_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn inactive_coordinates_must_vanish() {
        assert!(StrategyParams::new(Dims::One, 0.3, 0.1, 0.0).is_err());
        assert!(StrategyParams::new(Dims::Two, 0.3, 0.1, 0.2).is_err());
        assert!(StrategyParams::new(Dims::One, 0.3, TAU, 0.0).is_ok());
        let p = StrategyParams::from_coords(Dims::One, [0.3, 1.0, 2.0]);
        assert_eq!(p.coords(), [0.3, 0.0, 0.0]);
        assert!(StrategyParams::quantum(Dims::One).is_err());
        assert!(StrategyParams::quantum(Dims::Two)
            .unwrap()
            .with_dims(Dims::One)
            .is_err());
        assert!(StrategyParams::new(Dims::Three, f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn su2_named_strategies() {
        let cm = su2(&StrategyParams::cooperate(Dims::Three));
        assert!(max_diff2(cm.matrix(), &Matrix2::identity()) < 1e-15);

        let d = su2(&StrategyParams::defect(Dims::One));
        let want = Matrix2::new(ZERO, ONE, -ONE, ZERO);
        assert!(max_diff2(d.matrix(), &want) < 1e-15);

        let q = su2(&StrategyParams::quantum(Dims::Two).unwrap());
        let want = Matrix2::new(I, ZERO, ZERO, -I);
        assert!(max_diff2(q.matrix(), &want) < 1e-15);
    }

    #[test]
    fn bell_projectors_resolve_identity() {
        let p = bell_projectors();
        let sum = p.iter().fold(Matrix4::zeros(), |a, b| a + b);
        assert!(max_diff4(&sum, &Matrix4::identity()) < 1e-15);
        for (i, pi) in p.iter().enumerate() {
            assert!(max_diff4(&(pi * pi), pi) < 1e-15);
            assert!(max_diff4(pi, &pi.adjoint()) < 1e-15);
            assert!((pi.trace() - ONE).norm() < 1e-15);
            for (j, pj) in p.iter().enumerate() {
                if i != j {
                    assert!(max_abs((pi * pj).iter()) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn initial_state_entries() {
        let rho = initial_state();
        let m = rho.matrix();
        for (k, want) in [0.5, 0.0, 0.0, 0.5].iter().enumerate() {
            assert!((m[(k, k)] - c(*want, 0.0)).norm() < 1e-15);
        }
        assert!((m[(0, 3)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!(rho.is_valid());
    }

    #[test]
    fn final_states_of_named_profiles() {
        let cm = StrategyParams::cooperate(Dims::Two).gate();
        let d = StrategyParams::defect(Dims::Two).gate();
        let q = StrategyParams::quantum(Dims::Two).unwrap().gate();
        let p = bell_projectors();

        let rho = final_state(&cm, &cm).unwrap();
        assert!(max_diff4(rho.matrix(), initial_state().matrix()) < 1e-15);
        assert!(max_diff4(final_state(&d, &d).unwrap().matrix(), &p[3]) < 1e-15);
        assert!(max_diff4(final_state(&q, &q).unwrap().matrix(), &p[0]) < 1e-15);
        assert!(max_diff4(final_state(&d, &q).unwrap().matrix(), &p[1]) < 1e-15);
    }

    #[test]
    fn final_state_rejects_non_unitary() {
        let bad = UnitaryMatrix(Matrix2::new(ONE, ONE, ZERO, ONE));
        let good = UnitaryMatrix::identity();
        assert!(matches!(final_state(&bad, &good), Err(Error::NotUnitary { .. })));
        assert!(UnitaryMatrix::from_matrix(*bad.matrix()).is_err());
        let slightly = UnitaryMatrix(Matrix2::identity() * c(1.0 + 1e-11, 0.0));
        assert!(final_state(&slightly, &good).is_ok());
    }

    #[test]
    fn payoff_operator_spectrum_is_bimatrix() {
        let g = builtin_game(BuiltinGame::Sh);
        let (pa, pb) = g.payoff_operators();
        let ev = pa.eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 7.0, 8.0, 10.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        let ev = pb.eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 7.0, 8.0, 10.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(max_diff4(pa.matrix(), &pa.matrix().adjoint()) < 1e-12);
    }

    #[test]
    fn expected_payoff_examples() {
        let pd = builtin_game(BuiltinGame::Pd);
        let eg = builtin_game(BuiltinGame::Eg);
        let cm = StrategyParams::cooperate(Dims::Two).gate();
        let d = StrategyParams::defect(Dims::Two).gate();
        let q = StrategyParams::quantum(Dims::Two).unwrap().gate();

        let (a, b) = expected_payoff(&pd, &cm, &cm).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
        let (a, b) = expected_payoff(&pd, &d, &d).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        let (a, b) = expected_payoff(&eg, &d, &q).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && b.abs() < 1e-12);
    }

    #[test]
    fn gate_distance_ignores_global_phase() {
        let q = StrategyParams::quantum(Dims::Two).unwrap().gate();
        assert!(q.distance_up_to_phase(&q.with_phase(0.7)) < 1e-12);
        let minus_identity = su2(&StrategyParams::from_coords(Dims::Two, [0.0, TAU - 1e-13, 0.0]));
        assert!(minus_identity.distance_up_to_phase(&UnitaryMatrix::identity()) < 1e-9);
        let d = StrategyParams::defect(Dims::Two).gate();
        assert!(d.distance_up_to_phase(&UnitaryMatrix::identity()) > 0.9);
    }
}
