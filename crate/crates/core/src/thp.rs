//! Trembling-hand perfectness of quantum equilibria.
//!
//! A profile is tested at a finite list of concentrations: one player's
//! equilibrium gate is smeared by a von Mises tremble and the opponent's best
//! pure response is searched on a grid (then polished by coordinate descent).
//! The equilibrium survives at that concentration when the best response is
//! the equilibrium gate itself, or pays no more than it.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::TrembleSpec;
use crate::error::{Error, Result};
use crate::games::{classical_payoff, EquilibriumKind, GameSpec, Player, StrategyGrid};
use crate::integration::{Quadrature, ResponseLandscape, StrategyDistribution};
use crate::quantum::{Dims, Move, StrategyParams};

/// Payoff differences within this bound are ties.
pub const PAYOFF_TOL: f64 = 1e-9;
/// Gates closer than this (operator distance up to phase) are the same strategy.
pub const ANGULAR_TOL: f64 = 0.05;
/// Coordinate descent stops once its step falls below this many radians.
pub const REFINE_MIN_STEP: f64 = 1e-4;

const REFINE_MAX_ROUNDS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub argmax: StrategyParams,
    pub value: f64,
    /// `value` minus the best probed payoff among grid nodes whose gate is
    /// farther than [`ANGULAR_TOL`] from `argmax`.
    pub runner_up_gap: f64,
}

struct GridScan {
    grid: StrategyGrid,
    values: Vec<f64>,
}

impl GridScan {
    fn run(landscape: &ResponseLandscape, dims: Dims, nodes: usize) -> Result<Self> {
        let grid = StrategyGrid::new(dims, nodes)?;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| landscape.payoff(&grid.point(i)))
            .collect();
        Ok(GridScan { grid, values })
    }

    // lowest index wins ties, i.e. the lexicographically smallest node
    fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Best probed value among nodes whose gate is farther than the angular
    /// tolerance from `reference`.
    fn best_away_from(&self, reference: &StrategyParams) -> Option<f64> {
        let gate = reference.gate();
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&i, &j| {
            self.values[j]
                .partial_cmp(&self.values[i])
                .unwrap_or(Ordering::Equal)
        });
        order
            .into_iter()
            .find(|&i| self.grid.point(i).gate().distance_up_to_phase(&gate) > ANGULAR_TOL)
            .map(|i| self.values[i])
    }
}

fn polish(
    landscape: &ResponseLandscape,
    dims: Dims,
    start: [f64; 3],
    start_value: f64,
    step: f64,
) -> ([f64; 3], f64) {
    let mut x = start;
    let mut fx = start_value;
    let mut step = step;
    let mut rounds = 0;
    while step >= REFINE_MIN_STEP && rounds < REFINE_MAX_ROUNDS {
        rounds += 1;
        let mut improved = false;
        for axis in 0..dims.count() {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[axis] += dir * step;
                let fy = landscape.payoff(&StrategyParams::from_coords(dims, y));
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

fn search(
    landscape: &ResponseLandscape,
    dims: Dims,
    grid_nodes: usize,
    refine: bool,
) -> Result<(BestResponse, GridScan)> {
    let scan = GridScan::run(landscape, dims, grid_nodes)?;
    let i = scan.argmax();
    let (mut coords, mut value) = (scan.grid.raw(i), scan.values[i]);
    if refine {
        (coords, value) = polish(landscape, dims, coords, value, 0.5 * scan.grid.spacing());
    }
    let argmax = StrategyParams::from_coords(dims, coords);
    let runner_up_gap = scan.best_away_from(&argmax).map_or(f64::INFINITY, |v| value - v);
    Ok((
        BestResponse {
            argmax,
            value,
            runner_up_gap,
        },
        scan,
    ))
}

/// Best pure response of `responder` (over `dims` parameters) to `opponent`.
pub fn best_response(
    game: &GameSpec,
    responder: Player,
    dims: Dims,
    opponent: &StrategyDistribution,
    grid_nodes: usize,
    refine: bool,
    quad: &Quadrature,
) -> Result<BestResponse> {
    let landscape = ResponseLandscape::new(game, responder, opponent, quad)?;
    Ok(search(&landscape, dims, grid_nodes, refine)?.0)
}

fn profile_strategy(profile: &(StrategyParams, StrategyParams), player: Player) -> StrategyParams {
    match player {
        Player::A => profile.0,
        Player::B => profile.1,
    }
}

/// Classifies a pure profile: each player's strategy against their best
/// response to the opponent's pure strategy, both embedded in `dims` parameters.
pub fn check_equilibrium(
    game: &GameSpec,
    profile: (StrategyParams, StrategyParams),
    dims: Dims,
    grid_nodes: usize,
) -> Result<EquilibriumKind> {
    let quad = Quadrature::default();
    let mut kind = EquilibriumKind::Strict;
    for player in [Player::A, Player::B] {
        let own = profile_strategy(&profile, player).with_dims(dims)?;
        let other = profile_strategy(&profile, player.opponent()).with_dims(dims)?;
        let landscape = ResponseLandscape::new(game, player, &StrategyDistribution::Pure(other), &quad)?;
        let (best, scan) = search(&landscape, dims, grid_nodes, true)?;
        let own_value = landscape.payoff(&own);
        if own_value < best.value - PAYOFF_TOL {
            return Ok(EquilibriumKind::NotEquilibrium);
        }
        let gap = scan.best_away_from(&own).map_or(f64::INFINITY, |v| own_value - v);
        if gap <= PAYOFF_TOL {
            kind = EquilibriumKind::Weak;
        }
    }
    Ok(kind)
}

/// Which players' equilibrium strategies are trembled during a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanSides {
    Both,
    /// Enough for symmetric games.
    AliceTrembles,
    BobTrembles,
}

impl ScanSides {
    fn tremblers(self) -> &'static [Player] {
        match self {
            ScanSides::Both => &[Player::A, Player::B],
            ScanSides::AliceTrembles => &[Player::A],
            ScanSides::BobTrembles => &[Player::B],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig {
    pub tremble_dims: Dims,
    pub response_dims: Dims,
    pub grid_nodes: usize,
    pub sides: ScanSides,
    pub quad: Quadrature,
}

impl ScanConfig {
    /// Responders search two parameters when trembles use three, as a
    /// three-parameter responder can exploit any tremble of `Q`.
    pub fn new(tremble_dims: Dims) -> Self {
        ScanConfig {
            tremble_dims,
            response_dims: tremble_dims.min(Dims::Two),
            grid_nodes: crate::games::DEFAULT_SURFACE_NODES,
            sides: ScanSides::Both,
            quad: Quadrature::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustnessVerdict {
    pub kappa: f64,
    pub holds: bool,
    /// Gate distance from the responder's equilibrium strategy to the best response.
    pub distance: f64,
    /// Equilibrium-strategy payoff minus best-response payoff.
    pub margin: f64,
    /// The responder with the smallest margin and their best response.
    pub responder: Player,
    pub best_response: StrategyParams,
}

fn side_verdict(
    game: &GameSpec,
    profile: &(StrategyParams, StrategyParams),
    cfg: &ScanConfig,
    kappa: f64,
    trembler: Player,
) -> Result<RobustnessVerdict> {
    let responder = trembler.opponent();
    let center = profile_strategy(profile, trembler).with_dims(cfg.tremble_dims)?;
    let own = profile_strategy(profile, responder).with_dims(cfg.response_dims)?;
    let tremble = StrategyDistribution::Trembled(TrembleSpec::new(center, kappa)?);
    let landscape = ResponseLandscape::new(game, responder, &tremble, &cfg.quad)?;
    let (best, _) = search(&landscape, cfg.response_dims, cfg.grid_nodes, true)?;
    let distance = best.argmax.gate().distance_up_to_phase(&own.gate());
    let margin = landscape.payoff(&own) - best.value;
    Ok(RobustnessVerdict {
        kappa,
        holds: distance <= ANGULAR_TOL || margin >= -PAYOFF_TOL,
        distance,
        margin,
        responder,
        best_response: best.argmax,
    })
}

/// Verdict at one concentration, combining the scanned sides.
pub fn verdict_at(
    game: &GameSpec,
    profile: (StrategyParams, StrategyParams),
    cfg: &ScanConfig,
    kappa: f64,
) -> Result<RobustnessVerdict> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::InvalidKappa(kappa));
    }
    let mut combined: Option<RobustnessVerdict> = None;
    for &trembler in cfg.sides.tremblers() {
        let v = side_verdict(game, &profile, cfg, kappa, trembler)?;
        combined = Some(match combined {
            None => v,
            Some(prev) => {
                let worst = if v.margin < prev.margin { v } else { prev };
                RobustnessVerdict {
                    holds: prev.holds && v.holds,
                    distance: prev.distance.max(v.distance),
                    margin: prev.margin.min(v.margin),
                    ..worst
                }
            }
        });
    }
    Ok(combined.expect("at least one trembling side"))
}

/// Robustness verdicts for each concentration in ascending `kappas`.
pub fn thp_scan(
    game: &GameSpec,
    profile: (StrategyParams, StrategyParams),
    cfg: &ScanConfig,
    kappas: &[f64],
) -> Result<Vec<RobustnessVerdict>> {
    if kappas.is_empty() {
        return Err(Error::InvalidArgument("empty kappa list".into()));
    }
    if let Some(&k) = kappas.iter().find(|k| !k.is_finite() || **k <= 0.0) {
        return Err(Error::InvalidKappa(k));
    }
    if kappas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "kappa list must be strictly ascending".into(),
        ));
    }
    kappas
        .par_iter()
        .map(|&k| verdict_at(game, profile, cfg, k))
        .collect()
}

/// First concentration at which a scan falls back from holding to failing,
/// if any. Bisection assumes a single crossing from failing to holding.
pub fn single_crossing_violation(verdicts: &[RobustnessVerdict]) -> Option<f64> {
    let mut seen_hold = false;
    for v in verdicts {
        if v.holds {
            seen_hold = true;
        } else if seen_hold {
            return Some(v.kappa);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub kappa_star: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub holds_lo: bool,
    pub holds_hi: bool,
    pub evaluations: usize,
}

/// Bisects the verdict between `kappa_lo` and `kappa_hi` until the bracket is
/// no wider than `tol`; `kappa_star` is the midpoint of the final bracket.
pub fn threshold_search(
    game: &GameSpec,
    profile: (StrategyParams, StrategyParams),
    cfg: &ScanConfig,
    kappa_lo: f64,
    kappa_hi: f64,
    tol: f64,
) -> Result<Threshold> {
    if !(kappa_lo > 0.0 && kappa_hi > kappa_lo && kappa_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bracket must satisfy 0 < lo < hi, got [{kappa_lo}, {kappa_hi}]"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let holds = |k: f64| verdict_at(game, profile, cfg, k).map(|v| v.holds);
    let (holds_lo, holds_hi) = (holds(kappa_lo)?, holds(kappa_hi)?);
    if holds_lo == holds_hi {
        return Err(Error::NoBracket {
            lo: kappa_lo,
            hi: kappa_hi,
            holds: holds_lo,
        });
    }
    let (mut lo, mut hi) = (kappa_lo, kappa_hi);
    let mut evaluations = 2;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        if holds(mid)? == holds_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold {
        kappa_star: 0.5 * (lo + hi),
        lo,
        hi,
        tol,
        holds_lo,
        holds_hi,
        evaluations,
    })
}

/// Classical check: each player's pure strategy is perturbed to the
/// `(1 - eps, eps)` mixture and the opponent's equilibrium move must remain a
/// best reply among pure moves.
pub fn classical_thp_check(game: &GameSpec, profile: (Move, Move), eps: f64) -> Result<bool> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1/2), got {eps}"
        )));
    }
    let p_c = |m: Move| if m == Move::C { 1.0 - eps } else { eps };
    let pure_p = |m: Move| if m == Move::C { 1.0 } else { 0.0 };
    let (alice, bob) = profile;

    // Bob against Alice's trembled move
    let bob_eq = classical_payoff(game, p_c(alice), pure_p(bob))?.1;
    let bob_alt = classical_payoff(game, p_c(alice), pure_p(bob.other()))?.1;
    // Alice against Bob's trembled move
    let alice_eq = classical_payoff(game, pure_p(alice), p_c(bob))?.0;
    let alice_alt = classical_payoff(game, pure_p(alice.other()), p_c(bob))?.0;

    Ok(bob_eq >= bob_alt - PAYOFF_TOL && alice_eq >= alice_alt - PAYOFF_TOL)
}
