//! Expected payoffs of trembled strategies.
//!
//! The smeared payoff integrates the pure-strategy payoff against both
//! players' tremble densities over their parameter tori. The payoff
//! `Tr(P (A⊗B) rho_i (A⊗B)^dagger)` is linear in each player's superoperator
//! `X -> A X A^dagger`, so each side's tremble is integrated once into an
//! averaged [`Channel`] and the double integral collapses to two single
//! integrals and one trace. [`smeared_payoff_direct`] keeps the unfactorized
//! double sum for cross-checking, and [`smeared_payoff_mc`] is an independent
//! Monte Carlo estimator.
//!
//! Quadrature is the tensor-product trapezoidal rule on the periodic torus:
//! `theta` nodes at `-pi + k h`, `alpha`/`beta` nodes at `k h`, `h = 2 pi / N`.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{sample_torus, TrembleSpec};
use crate::error::{Error, Result};
use crate::games::{GameSpec, Player};
use crate::quantum::{
    expected_payoff, final_state, initial_state, su2_from_angles, Dims, PayoffOperator, QuantumState,
    StrategyParams, UnitaryMatrix,
};

/// Nodes per dimension for one- and two-parameter trembles.
pub const DEFAULT_NODES_LOW: usize = 64;
/// Nodes per dimension for three-parameter trembles.
pub const DEFAULT_NODES_HIGH: usize = 48;
/// Smallest accepted quadrature resolution.
pub const MIN_QUADRATURE_NODES: usize = 8;
/// Largest change between `N` and `2N` nodes accepted by the self-check.
pub const SELF_CHECK_TOL: f64 = 1e-6;
/// Mixture weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

// The trapezoidal aliasing error of a von Mises density is roughly
// exp(-N^2 / (2 kappa)); keep it below exp(-38) ~ 3e-17.
const ALIAS_EXPONENT: f64 = 38.0;

/// Quadrature resolution settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub nodes_low: usize,
    pub nodes_high: usize,
    /// Raise the node count for concentrated trembles.
    pub adaptive: bool,
    /// Recompute with doubled resolution and fail when the result moves by
    /// more than [`SELF_CHECK_TOL`].
    pub self_check: bool,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            nodes_low: DEFAULT_NODES_LOW,
            nodes_high: DEFAULT_NODES_HIGH,
            adaptive: true,
            self_check: false,
        }
    }
}

impl Quadrature {
    /// Same resolution for every dimension count, no automatic refinement.
    pub fn fixed(nodes: usize) -> Self {
        Quadrature {
            nodes_low: nodes,
            nodes_high: nodes,
            adaptive: false,
            self_check: false,
        }
    }

    pub fn with_self_check(mut self, on: bool) -> Self {
        self.self_check = on;
        self
    }

    pub fn doubled(&self) -> Self {
        Quadrature {
            nodes_low: 2 * self.nodes_low,
            nodes_high: 2 * self.nodes_high,
            adaptive: self.adaptive,
            self_check: false,
        }
    }

    /// Grid for a tremble of the given dimension and concentration. Very
    /// concentrated trembles get more nodes so the density stays resolved.
    pub fn grid_for(&self, dims: Dims, kappa: f64) -> Result<QuadratureGrid> {
        let base = if dims == Dims::Three {
            self.nodes_high
        } else {
            self.nodes_low
        };
        if !self.adaptive {
            return QuadratureGrid::new(base, dims);
        }
        let needed = (2.0 * ALIAS_EXPONENT * kappa).sqrt().ceil() as usize;
        QuadratureGrid::new(base.max(needed), dims)
    }
}

/// Uniform periodic grid on the `d`-torus with equal weights `(2 pi / N)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    nodes_per_dim: usize,
    dims: Dims,
}

impl QuadratureGrid {
    pub fn new(nodes_per_dim: usize, dims: Dims) -> Result<Self> {
        if nodes_per_dim < MIN_QUADRATURE_NODES {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least {MIN_QUADRATURE_NODES} nodes per dimension, got {nodes_per_dim}"
            )));
        }
        Ok(QuadratureGrid { nodes_per_dim, dims })
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.nodes_per_dim
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.nodes_per_dim as f64
    }

    pub fn weight(&self) -> f64 {
        self.spacing().powi(self.dims.count() as i32)
    }

    pub fn len(&self) -> usize {
        self.nodes_per_dim.pow(self.dims.count() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node angles along one axis (0 = theta, 1 = alpha, 2 = beta).
    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        let start = if axis == 0 { -PI } else { 0.0 };
        let h = self.spacing();
        (0..self.nodes_per_dim).map(|k| start + k as f64 * h).collect()
    }
}

/// One component of a discrete mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Component {
    Pure(StrategyParams),
    Trembled(TrembleSpec),
}

impl Component {
    fn describe(&self) -> String {
        match self {
            Component::Pure(p) => format!("pure {p}"),
            Component::Trembled(t) => format!(
                "tremble around {} with kappa = {} over {} parameter(s)",
                t.center(),
                t.kappa(),
                t.dims()
            ),
        }
    }
}

/// A player's (possibly mixed) strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StrategyDistribution {
    Pure(StrategyParams),
    Trembled(TrembleSpec),
    Mixture(Vec<(f64, Component)>),
}

impl From<Component> for StrategyDistribution {
    fn from(c: Component) -> Self {
        match c {
            Component::Pure(p) => StrategyDistribution::Pure(p),
            Component::Trembled(t) => StrategyDistribution::Trembled(t),
        }
    }
}

fn validate_weights(parts: &[(f64, Component)]) -> Result<()> {
    if parts.is_empty() {
        return Err(Error::InvalidWeights("mixture has no components".into()));
    }
    if let Some((w, _)) = parts.iter().find(|(w, _)| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights(format!(
            "negative or non-finite weight {w}"
        )));
    }
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

impl StrategyDistribution {
    pub fn mixture(parts: Vec<(f64, Component)>) -> Result<Self> {
        validate_weights(&parts)?;
        Ok(StrategyDistribution::Mixture(parts))
    }

    /// Classical `(1 - eps, eps)` mixture of a pure move with the other move.
    pub fn classical_tremble(main: crate::quantum::Move, eps: f64, dims: Dims) -> Result<Self> {
        Self::mixture(vec![
            (1.0 - eps, Component::Pure(StrategyParams::from_move(main, dims))),
            (
                eps,
                Component::Pure(StrategyParams::from_move(main.other(), dims)),
            ),
        ])
    }

    /// Weighted components; a non-mixture is its own single component.
    pub fn components(&self) -> Vec<(f64, Component)> {
        match self {
            StrategyDistribution::Pure(p) => vec![(1.0, Component::Pure(*p))],
            StrategyDistribution::Trembled(t) => vec![(1.0, Component::Trembled(*t))],
            StrategyDistribution::Mixture(parts) => parts.clone(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StrategyDistribution::Pure(p) => Component::Pure(*p).describe(),
            StrategyDistribution::Trembled(t) => Component::Trembled(*t).describe(),
            StrategyDistribution::Mixture(parts) => parts
                .iter()
                .map(|(w, c)| format!("{w} x {}", c.describe()))
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }

    fn has_tremble(&self) -> bool {
        self.components()
            .iter()
            .any(|(_, c)| matches!(c, Component::Trembled(_)))
    }
}

/// Averaged single-qubit superoperator `X -> E[A X A^dagger]`, stored as the
/// 4x4 matrix `E[A ⊗ conj(A)]` acting on row-major `vec(X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel(Matrix4<Complex64>);

impl Channel {
    pub fn zero() -> Self {
        Channel(Matrix4::zeros())
    }

    pub fn from_gate(u: &UnitaryMatrix) -> Self {
        let m = u.matrix();
        Channel(Matrix4::from_fn(|r, c| {
            m[(r / 2, c / 2)] * m[(r % 2, c % 2)].conj()
        }))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    fn add_weighted(&mut self, w: f64, u: &UnitaryMatrix) {
        let m = u.matrix();
        for r in 0..4 {
            let a = m[(r / 2, 0)] * w;
            let b = m[(r / 2, 1)] * w;
            let row_conj = [m[(r % 2, 0)].conj(), m[(r % 2, 1)].conj()];
            self.0[(r, 0)] += a * row_conj[0];
            self.0[(r, 1)] += a * row_conj[1];
            self.0[(r, 2)] += b * row_conj[0];
            self.0[(r, 3)] += b * row_conj[1];
        }
    }

    fn add_scaled(&mut self, w: f64, other: &Channel) {
        self.0 += other.0 * Complex64::new(w, 0.0);
    }

    /// Applies the channel to Alice's qubit of a two-qubit operator.
    pub fn apply_alice(&self, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        Matrix4::from_fn(|row, col| {
            let (a1, b) = (row / 2, row % 2);
            let (c1, d) = (col / 2, col % 2);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for c in 0..2 {
                    acc += self.0[(2 * a1 + c1, 2 * a + c)] * rho[(2 * a + b, 2 * c + d)];
                }
            }
            acc
        })
    }

    /// Applies the channel to Bob's qubit of a two-qubit operator.
    pub fn apply_bob(&self, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        Matrix4::from_fn(|row, col| {
            let (a, b1) = (row / 2, row % 2);
            let (c, d1) = (col / 2, col % 2);
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..2 {
                for d in 0..2 {
                    acc += self.0[(2 * b1 + d1, 2 * b + d)] * rho[(2 * a + b, 2 * c + d)];
                }
            }
            acc
        })
    }
}

/// Per-axis quadrature weights (including the density factor) and node angles.
fn axis_tables(spec: &TrembleSpec, grid: &QuadratureGrid) -> Vec<(Vec<f64>, Vec<f64>)> {
    let density = spec.axis_weights();
    let center = spec.center().coords();
    let h = grid.spacing();
    (0..spec.dims().count())
        .map(|axis| {
            let nodes = grid.axis_nodes(axis);
            let weights = nodes.iter().map(|x| h * density.at(x - center[axis])).collect();
            (nodes, weights)
        })
        .collect()
}

fn trembled_channel(spec: &TrembleSpec, grid: &QuadratureGrid) -> Channel {
    let tables = axis_tables(spec, grid);
    let (thetas, theta_w) = &tables[0];
    let zero = (vec![0.0], vec![1.0]);
    let (alphas, alpha_w) = tables.get(1).unwrap_or(&zero);
    let (betas, beta_w) = tables.get(2).unwrap_or(&zero);

    // fixed-order reduction: one partial sum per theta node, summed in index order
    let partials: Vec<Channel> = (0..thetas.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Channel::zero();
            for (alpha, wa) in alphas.iter().zip(alpha_w) {
                for (beta, wb) in betas.iter().zip(beta_w) {
                    let u = su2_from_angles(thetas[i], *alpha, *beta);
                    acc.add_weighted(theta_w[i] * wa * wb, &u);
                }
            }
            acc
        })
        .collect();
    partials.iter().fold(Channel::zero(), |mut acc, p| {
        acc.0 += p.0;
        acc
    })
}

/// Averaged channel of a strategy distribution.
pub fn average_channel(dist: &StrategyDistribution, quad: &Quadrature) -> Result<Channel> {
    let mut out = Channel::zero();
    for (w, component) in dist.components() {
        let ch = match component {
            Component::Pure(p) => Channel::from_gate(&p.gate()),
            Component::Trembled(t) => trembled_channel(&t, &quad.grid_for(t.dims(), t.kappa())?),
        };
        out.add_scaled(w, &ch);
    }
    Ok(out)
}

fn payoffs_of(rho: &Matrix4<Complex64>, ops: &(PayoffOperator, PayoffOperator)) -> (f64, f64) {
    let state = QuantumState::from_matrix_unchecked(*rho);
    (ops.0.expectation(&state), ops.1.expectation(&state))
}

fn smeared_once(
    game: &GameSpec,
    alice: &StrategyDistribution,
    bob: &StrategyDistribution,
    quad: &Quadrature,
) -> Result<(f64, f64)> {
    let ca = average_channel(alice, quad)?;
    let cb = average_channel(bob, quad)?;
    let rho = cb.apply_bob(&ca.apply_alice(initial_state().matrix()));
    Ok(payoffs_of(&rho, &game.payoff_operators()))
}

/// Expected payoffs `(Alice, Bob)` when both players draw their gates from
/// the given distributions. Pure sides collapse to point evaluation.
pub fn smeared_payoff(
    game: &GameSpec,
    alice: &StrategyDistribution,
    bob: &StrategyDistribution,
    quad: &Quadrature,
) -> Result<(f64, f64)> {
    let value = smeared_once(game, alice, bob, quad)?;
    if quad.self_check && (alice.has_tremble() || bob.has_tremble()) {
        let fine = smeared_once(game, alice, bob, &quad.doubled())?;
        let change = (fine.0 - value.0).abs().max((fine.1 - value.1).abs());
        if change > SELF_CHECK_TOL {
            return Err(Error::GridTooCoarse { change });
        }
    }
    Ok(value)
}

/// Quadrature nodes of a distribution with their total weights.
pub fn weighted_gates(dist: &StrategyDistribution, quad: &Quadrature) -> Result<Vec<(f64, UnitaryMatrix)>> {
    let mut out = Vec::new();
    for (w, component) in dist.components() {
        match component {
            Component::Pure(p) => out.push((w, p.gate())),
            Component::Trembled(t) => {
                let grid = quad.grid_for(t.dims(), t.kappa())?;
                let tables = axis_tables(&t, &grid);
                let zero = (vec![0.0], vec![1.0]);
                let (thetas, tw) = &tables[0];
                let (alphas, aw) = tables.get(1).unwrap_or(&zero);
                let (betas, bw) = tables.get(2).unwrap_or(&zero);
                for (theta, w0) in thetas.iter().zip(tw) {
                    for (alpha, w1) in alphas.iter().zip(aw) {
                        for (beta, w2) in betas.iter().zip(bw) {
                            out.push((w * w0 * w1 * w2, su2_from_angles(*theta, *alpha, *beta)));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Unfactorized double sum over both players' quadrature nodes. Costs the
/// product of the two node counts; meant for small grids.
pub fn smeared_payoff_direct(
    game: &GameSpec,
    alice: &StrategyDistribution,
    bob: &StrategyDistribution,
    quad: &Quadrature,
) -> Result<(f64, f64)> {
    let ga = weighted_gates(alice, quad)?;
    let gb = weighted_gates(bob, quad)?;
    let partials: Vec<Result<(f64, f64)>> = ga
        .par_iter()
        .map(|(wa, ua)| {
            let mut acc = (0.0, 0.0);
            for (wb, ub) in &gb {
                let (pa, pb) = expected_payoff(game, ua, ub)?;
                acc.0 += wa * wb * pa;
                acc.1 += wa * wb * pb;
            }
            Ok(acc)
        })
        .collect();
    partials.into_iter().try_fold((0.0, 0.0), |acc, p| {
        let p = p?;
        Ok((acc.0 + p.0, acc.1 + p.1))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub stderr_a: f64,
    pub stderr_b: f64,
    pub samples: usize,
}

/// Smallest sample count accepted by [`smeared_payoff_mc`].
pub const MIN_MC_SAMPLES: usize = 1000;

fn sample_gate<R: Rng + ?Sized>(dist: &StrategyDistribution, rng: &mut R) -> UnitaryMatrix {
    let draw = |c: &Component, rng: &mut R| match c {
        Component::Pure(p) => p.gate(),
        Component::Trembled(t) => sample_torus(rng, t).gate(),
    };
    match dist {
        StrategyDistribution::Pure(p) => p.gate(),
        StrategyDistribution::Trembled(t) => sample_torus(rng, t).gate(),
        StrategyDistribution::Mixture(parts) => {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (w, c) in parts {
                acc += w;
                if u < acc {
                    return draw(c, rng);
                }
            }
            // u landed in the rounding gap above the cumulative sum
            draw(&parts[parts.len() - 1].1, rng)
        }
    }
}

/// Monte Carlo estimate of [`smeared_payoff`] with standard errors from the
/// sample variance. Reproducible for a fixed seed.
pub fn smeared_payoff_mc(
    game: &GameSpec,
    alice: &StrategyDistribution,
    bob: &StrategyDistribution,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = game.payoff_operators();
    // Welford running moments for both players
    let (mut mean_a, mut mean_b, mut m2_a, mut m2_b) = (0.0, 0.0, 0.0, 0.0);
    for k in 1..=n_samples {
        let ua = sample_gate(alice, &mut rng);
        let ub = sample_gate(bob, &mut rng);
        let rho = final_state(&ua, &ub)?;
        let (pa, pb) = (ops.0.expectation(&rho), ops.1.expectation(&rho));
        let n = k as f64;
        let da = pa - mean_a;
        mean_a += da / n;
        m2_a += da * (pa - mean_a);
        let db = pb - mean_b;
        mean_b += db / n;
        m2_b += db * (pb - mean_b);
    }
    let n = n_samples as f64;
    Ok(McEstimate {
        payoff_a: mean_a,
        payoff_b: mean_b,
        stderr_a: (m2_a.max(0.0) / (n - 1.0) / n).sqrt(),
        stderr_b: (m2_b.max(0.0) / (n - 1.0) / n).sqrt(),
        samples: n_samples,
    })
}

/// `sum_ij p_i q_j <payoff>(component_i, component_j)` over both players'
/// mixture components.
pub fn discrete_mixture_payoff(
    game: &GameSpec,
    mix_a: &StrategyDistribution,
    mix_b: &StrategyDistribution,
    quad: &Quadrature,
) -> Result<(f64, f64)> {
    let ca = mix_a.components();
    let cb = mix_b.components();
    validate_weights(&ca)?;
    validate_weights(&cb)?;
    let mut total = (0.0, 0.0);
    for (wa, a) in &ca {
        for (wb, b) in &cb {
            let (pa, pb) = smeared_payoff(game, &(*a).into(), &(*b).into(), quad)?;
            total.0 += wa * wb * pa;
            total.1 += wa * wb * pb;
        }
    }
    Ok(total)
}

/// Payoffs as a function of one player's pure strategy, the opponent's
/// distribution integrated out once up front.
#[derive(Debug, Clone)]
pub struct ResponseLandscape {
    responder: Player,
    ops: (PayoffOperator, PayoffOperator),
    // state after the opponent's averaged channel
    rho: Matrix4<Complex64>,
}

impl ResponseLandscape {
    pub fn new(
        game: &GameSpec,
        responder: Player,
        opponent: &StrategyDistribution,
        quad: &Quadrature,
    ) -> Result<Self> {
        let channel = average_channel(opponent, quad)?;
        let rho0 = initial_state();
        let rho = match responder {
            Player::A => channel.apply_bob(rho0.matrix()),
            Player::B => channel.apply_alice(rho0.matrix()),
        };
        Ok(ResponseLandscape {
            responder,
            ops: game.payoff_operators(),
            rho,
        })
    }

    pub fn responder(&self) -> Player {
        self.responder
    }

    /// `(Alice, Bob)` payoffs when the responder plays `strategy`.
    pub fn payoffs(&self, strategy: &StrategyParams) -> (f64, f64) {
        let ch = Channel::from_gate(&strategy.gate());
        let rho = match self.responder {
            Player::A => ch.apply_alice(&self.rho),
            Player::B => ch.apply_bob(&self.rho),
        };
        payoffs_of(&rho, &self.ops)
    }

    /// The responder's own payoff.
    pub fn payoff(&self, strategy: &StrategyParams) -> f64 {
        let (a, b) = self.payoffs(strategy);
        match self.responder {
            Player::A => a,
            Player::B => b,
        }
    }
}
