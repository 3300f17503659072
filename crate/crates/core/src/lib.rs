//! Quantum 2x2 games in the Eisert scheme and trembling-hand perfectness of
//! their equilibria under von Mises trembles.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: SU(2) strategy gates, the entangled initial state, Bell-basis
//!   payoff operators and trace-formula payoffs.
//! - [`distributions`]: modified Bessel functions, von Mises densities on the
//!   strategy torus, von Mises–Fisher densities on spheres and exact samplers.
//! - [`integration`]: expected payoffs of trembled (continuously mixed)
//!   strategies by periodic quadrature, with a Monte Carlo cross-check.
//! - [`games`]: bimatrix definitions, classical analysis and payoff surfaces.
//! - [`thp`]: best responses, equilibrium classification, robustness scans
//!   over the concentration parameter and threshold bisection.
//! - [`cli`]: the command-line front end used by the `qthp` binary.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod games;
pub mod integration;
pub mod quantum;
pub mod thp;

pub use error::{Error, Result};
pub use games::{builtin_game, BuiltinGame, GameSpec, Player};
pub use quantum::{Dims, Move, StrategyParams, UnitaryMatrix};
