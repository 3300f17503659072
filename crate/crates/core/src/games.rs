//! Bimatrix games, their classical analysis, and payoff surfaces.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integration::{Quadrature, ResponseLandscape, StrategyDistribution};
use crate::quantum::{Dims, Move, PayoffOperator, StrategyParams};

/// Default number of surface nodes per axis (odd, so the axis midpoint is a node).
pub const DEFAULT_SURFACE_NODES: usize = 65;

/// Row player is Alice, column player is Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::A => "A",
            Player::B => "B",
        })
    }
}

impl FromStr for Player {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" | "alice" | "Alice" => Ok(Player::A),
            "B" | "b" | "bob" | "Bob" => Ok(Player::B),
            other => Err(Error::InvalidArgument(format!("unknown player '{other}'"))),
        }
    }
}

/// A 2x2 bimatrix game. `a[x][y]` and `b[x][y]` are Alice's and Bob's payoffs
/// when Alice plays `x` and Bob plays `y` (index 0 = C, 1 = D).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub name: String,
    pub a: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
}

impl GameSpec {
    pub fn new(name: impl Into<String>, a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Result<Self> {
        let game = GameSpec {
            name: name.into(),
            a,
            b,
        };
        game.validate()?;
        Ok(game)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.iter().chain(&self.b).flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGame(format!(
                "game '{}' has non-finite payoffs",
                self.name
            )));
        }
        Ok(())
    }

    /// Parses the `{"name": .., "a": [[..],[..]], "b": [[..],[..]]}` format.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let game: GameSpec = serde_json::from_str(s).map_err(|e| Error::InvalidGame(e.to_string()))?;
        game.validate()?;
        Ok(game)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidGame(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn matrix(&self, player: Player) -> &[[f64; 2]; 2] {
        match player {
            Player::A => &self.a,
            Player::B => &self.b,
        }
    }

    pub fn entry(&self, player: Player, alice: Move, bob: Move) -> f64 {
        self.matrix(player)[alice.index()][bob.index()]
    }

    pub fn payoff_operators(&self) -> (PayoffOperator, PayoffOperator) {
        (PayoffOperator::new(&self.a), PayoffOperator::new(&self.b))
    }

    /// Adds `c` to every entry of one player's matrix.
    pub fn shifted(&self, player: Player, c: f64) -> GameSpec {
        let mut g = self.clone();
        let m = match player {
            Player::A => &mut g.a,
            Player::B => &mut g.b,
        };
        m.iter_mut().flatten().for_each(|x| *x += c);
        g
    }

    pub fn is_symmetric(&self) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.a[i][j] == self.b[j][i]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinGame {
    /// Prisoners' Dilemma.
    Pd,
    /// Two equilibria, `(D,D)` weak.
    Eg,
    /// Stag Hunt.
    Sh,
}

impl BuiltinGame {
    pub const ALL: [BuiltinGame; 3] = [BuiltinGame::Pd, BuiltinGame::Eg, BuiltinGame::Sh];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinGame::Pd => "PD",
            BuiltinGame::Eg => "EG",
            BuiltinGame::Sh => "SH",
        }
    }
}

impl FromStr for BuiltinGame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PD" => Ok(BuiltinGame::Pd),
            "EG" => Ok(BuiltinGame::Eg),
            "SH" => Ok(BuiltinGame::Sh),
            _ => Err(Error::UnknownGame(s.to_string())),
        }
    }
}

pub fn builtin_game(which: BuiltinGame) -> GameSpec {
    let (a, b) = match which {
        BuiltinGame::Pd => ([[3.0, 0.0], [5.0, 1.0]], [[3.0, 5.0], [0.0, 1.0]]),
        BuiltinGame::Eg => ([[1.0, 2.0], [0.0, 2.0]], [[1.0, 0.0], [2.0, 2.0]]),
        BuiltinGame::Sh => ([[10.0, 0.0], [8.0, 7.0]], [[10.0, 8.0], [0.0, 7.0]]),
    };
    GameSpec {
        name: which.name().to_string(),
        a,
        b,
    }
}

pub fn builtin_game_by_name(name: &str) -> Result<GameSpec> {
    Ok(builtin_game(name.parse()?))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Expected payoffs when Alice plays C with probability `p_a` and Bob with `p_b`.
pub fn classical_payoff(game: &GameSpec, p_a: f64, p_b: f64) -> Result<(f64, f64)> {
    check_probability(p_a)?;
    check_probability(p_b)?;
    let wa = [p_a, 1.0 - p_a];
    let wb = [p_b, 1.0 - p_b];
    let mix = |m: &[[f64; 2]; 2]| -> f64 {
        (0..2)
            .map(|i| (0..2).map(|j| wa[i] * wb[j] * m[i][j]).sum::<f64>())
            .sum()
    };
    Ok((mix(&game.a), mix(&game.b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    Strict,
    Weak,
    NotEquilibrium,
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumKind::Strict => "strict",
            EquilibriumKind::Weak => "weak",
            EquilibriumKind::NotEquilibrium => "not-equilibrium",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassicalEquilibrium {
    pub alice: Move,
    pub bob: Move,
    pub kind: EquilibriumKind,
}

/// Classifies one pure profile by its unilateral deviations.
pub fn classify_pure_profile(game: &GameSpec, alice: Move, bob: Move) -> EquilibriumKind {
    let a_gain = game.entry(Player::A, alice.other(), bob) - game.entry(Player::A, alice, bob);
    let b_gain = game.entry(Player::B, alice, bob.other()) - game.entry(Player::B, alice, bob);
    if a_gain > 0.0 || b_gain > 0.0 {
        EquilibriumKind::NotEquilibrium
    } else if a_gain == 0.0 || b_gain == 0.0 {
        EquilibriumKind::Weak
    } else {
        EquilibriumKind::Strict
    }
}

/// All pure-strategy Nash equilibria of the classical game, in `CC, CD, DC, DD` order.
pub fn classical_equilibria(game: &GameSpec) -> Vec<ClassicalEquilibrium> {
    crate::quantum::OUTCOMES
        .iter()
        .filter_map(|&(alice, bob)| match classify_pure_profile(game, alice, bob) {
            EquilibriumKind::NotEquilibrium => None,
            kind => Some(ClassicalEquilibrium { alice, bob, kind }),
        })
        .collect()
}

/// Endpoint-inclusive grid over a player's pure strategies: `theta` spans
/// `[-pi, pi]`, `alpha` and `beta` span `[0, 2pi]`. Nodes are ordered
/// lexicographically with `theta` slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyGrid {
    dims: Dims,
    nodes: usize,
}

impl StrategyGrid {
    pub fn new(dims: Dims, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidArgument(format!(
                "strategy grid needs at least 2 nodes per axis, got {nodes}"
            )));
        }
        Ok(StrategyGrid { dims, nodes })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(self.dims.count() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        TAU / (self.nodes - 1) as f64
    }

    pub fn axis_values(&self, axis: usize) -> Vec<f64> {
        let start = if axis == 0 { -PI } else { 0.0 };
        let h = self.spacing();
        (0..self.nodes)
            .map(|k| {
                if k + 1 == self.nodes {
                    start + TAU
                } else {
                    start + k as f64 * h
                }
            })
            .collect()
    }

    /// Raw (uncanonicalized) coordinates of node `index`.
    pub fn raw(&self, index: usize) -> [f64; 3] {
        let d = self.dims.count();
        let mut coords = [0.0; 3];
        let mut rest = index;
        for axis in (0..d).rev() {
            let k = rest % self.nodes;
            rest /= self.nodes;
            let start = if axis == 0 { -PI } else { 0.0 };
            coords[axis] = if k + 1 == self.nodes {
                start + TAU
            } else {
                start + k as f64 * self.spacing()
            };
        }
        coords
    }

    pub fn point(&self, index: usize) -> StrategyParams {
        StrategyParams::from_coords(self.dims, self.raw(index))
    }
}

pub const AXIS_NAMES: [&str; 3] = ["theta", "alpha", "beta"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceAxis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Payoffs sampled over a grid, stored row-major with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surface {
    pub axes: Vec<SurfaceAxis>,
    pub values_a: Vec<f64>,
    pub values_b: Vec<f64>,
    pub context: String,
}

impl Surface {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.values_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_a.is_empty()
    }

    /// Axis coordinates of row `index`.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        let mut rest = index;
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            out[k] = axis.values[rest % n];
            rest /= n;
        }
        out
    }

    /// Row index of the largest value for `player` (first on ties).
    pub fn argmax(&self, player: Player) -> usize {
        let values = match player {
            Player::A => &self.values_a,
            Player::B => &self.values_b,
        };
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        best
    }

    pub fn values(&self, player: Player) -> &[f64] {
        match player {
            Player::A => &self.values_a,
            Player::B => &self.values_b,
        }
    }
}

/// Which player's pure strategy varies over the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSpec {
    pub player: Player,
    pub dims: Dims,
    pub nodes: usize,
}

/// Smeared payoffs of both players at every node of `spec.player`'s pure
/// strategy grid, the opponent playing `opponent`.
///
/// Grid nodes are canonicalized before evaluation, so the `alpha = 2 pi` and
/// `beta = 2 pi` endpoint rows repeat the values at 0.
pub fn payoff_surface(
    game: &GameSpec,
    spec: SurfaceSpec,
    opponent: &StrategyDistribution,
    quad: &Quadrature,
) -> Result<Surface> {
    let grid = StrategyGrid::new(spec.dims, spec.nodes)?;
    let landscape = ResponseLandscape::new(game, spec.player, opponent, quad)?;
    let values: Vec<(f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| landscape.payoffs(&grid.point(i)))
        .collect();
    let (values_a, values_b) = values.into_iter().unzip();
    let axes = (0..spec.dims.count())
        .map(|k| SurfaceAxis {
            name: AXIS_NAMES[k].to_string(),
            values: grid.axis_values(k),
        })
        .collect();
    Ok(Surface {
        axes,
        values_a,
        values_b,
        context: format!(
            "{}: player {} varies over {} parameter(s); opponent plays {}",
            game.name,
            spec.player,
            spec.dims,
            opponent.describe()
        ),
    })
}

/// Classical mixed-strategy payoffs over `(theta_A, theta_B) in [0, pi]^2`
/// with `p_C = cos^2(theta / 2)` for each player.
pub fn classical_surface(game: &GameSpec, nodes: usize) -> Result<Surface> {
    if nodes < 2 {
        return Err(Error::InvalidArgument(format!(
            "surface needs at least 2 nodes per axis, got {nodes}"
        )));
    }
    let thetas: Vec<f64> = (0..nodes).map(|k| PI * k as f64 / (nodes - 1) as f64).collect();
    let mut values_a = Vec::with_capacity(nodes * nodes);
    let mut values_b = Vec::with_capacity(nodes * nodes);
    for &ta in &thetas {
        for &tb in &thetas {
            let pa = (0.5 * ta).cos().powi(2).clamp(0.0, 1.0);
            let pb = (0.5 * tb).cos().powi(2).clamp(0.0, 1.0);
            let (a, b) = classical_payoff(game, pa, pb)?;
            values_a.push(a);
            values_b.push(b);
        }
    }
    Ok(Surface {
        axes: vec![
            SurfaceAxis {
                name: "theta_a".into(),
                values: thetas.clone(),
            },
            SurfaceAxis {
                name: "theta_b".into(),
                values: thetas,
            },
        ],
        values_a,
        values_b,
        context: format!("{}: classical mixed strategies, p_C = cos^2(theta/2)", game.name),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_bimatrices() {
        let pd = builtin_game(BuiltinGame::Pd);
        assert_eq!(pd.a, [[3.0, 0.0], [5.0, 1.0]]);
        assert_eq!(pd.b, [[3.0, 5.0], [0.0, 1.0]]);
        let eg = builtin_game(BuiltinGame::Eg);
        assert_eq!(eg.a, [[1.0, 2.0], [0.0, 2.0]]);
        assert_eq!(eg.b, [[1.0, 0.0], [2.0, 2.0]]);
        let sh = builtin_game(BuiltinGame::Sh);
        assert_eq!(sh.a, [[10.0, 0.0], [8.0, 7.0]]);
        assert_eq!(sh.b, [[10.0, 8.0], [0.0, 7.0]]);
        for g in BuiltinGame::ALL {
            assert!(builtin_game(g).is_symmetric());
        }
        assert!(matches!(builtin_game_by_name("XX"), Err(Error::UnknownGame(_))));
        assert_eq!(builtin_game_by_name("sh").unwrap(), sh);
    }

    #[test]
    fn classical_payoff_examples() {
        let eg = builtin_game(BuiltinGame::Eg);
        let eps = 0.1;
        let (_, b) = classical_payoff(&eg, 1.0 - eps, 1.0).unwrap();
        assert!((b - (1.0 + eps)).abs() < 1e-12);
        for g in BuiltinGame::ALL.map(builtin_game) {
            assert_eq!(classical_payoff(&g, 1.0, 1.0).unwrap(), (g.a[0][0], g.b[0][0]));
        }
        let pd = builtin_game(BuiltinGame::Pd);
        let (a, b) = classical_payoff(&pd, 0.5, 0.5).unwrap();
        assert!((a - 2.25).abs() < 1e-15 && (b - 2.25).abs() < 1e-15);
        assert!(matches!(
            classical_payoff(&pd, 1.5, 0.5),
            Err(Error::InvalidProbability(_))
        ));
    }

    fn brute_force_equilibria(game: &GameSpec) -> Vec<(Move, Move, bool)> {
        let mut out = Vec::new();
        for alice in Move::BOTH {
            for bob in Move::BOTH {
                let mut weak = false;
                let mut ok = true;
                for alt in Move::BOTH.into_iter().filter(|&m| m != alice) {
                    let d = game.a[alt.index()][bob.index()] - game.a[alice.index()][bob.index()];
                    ok &= d <= 0.0;
                    weak |= d == 0.0;
                }
                for alt in Move::BOTH.into_iter().filter(|&m| m != bob) {
                    let d = game.b[alice.index()][alt.index()] - game.b[alice.index()][bob.index()];
                    ok &= d <= 0.0;
                    weak |= d == 0.0;
                }
                if ok {
                    out.push((alice, bob, weak));
                }
            }
        }
        out
    }

    #[test]
    fn classical_equilibria_of_builtins() {
        use EquilibriumKind::*;
        let eq = |g| {
            classical_equilibria(&builtin_game(g))
                .into_iter()
                .map(|e| (e.alice, e.bob, e.kind))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            eq(BuiltinGame::Eg),
            vec![(Move::C, Move::C, Strict), (Move::D, Move::D, Weak)]
        );
        assert_eq!(eq(BuiltinGame::Pd), vec![(Move::D, Move::D, Strict)]);
        assert_eq!(
            eq(BuiltinGame::Sh),
            vec![(Move::C, Move::C, Strict), (Move::D, Move::D, Strict)]
        );
        for g in BuiltinGame::ALL {
            let game = builtin_game(g);
            let brute = brute_force_equilibria(&game);
            let fast: Vec<_> = classical_equilibria(&game)
                .into_iter()
                .map(|e| (e.alice, e.bob, e.kind == Weak))
                .collect();
            assert_eq!(brute, fast);
        }
    }

    #[test]
    fn game_json_round_trip() {
        let g = GameSpec::from_json_str(r#"{"name":"X","a":[[1,2],[3,4]],"b":[[5,6],[7,8.5]]}"#).unwrap();
        assert_eq!(g.a, [[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(g.b[1][1], 8.5);
        assert!(GameSpec::from_json_str(r#"{"name":"X","a":[[1,2,3],[3,4]],"b":[[5,6],[7,8]]}"#).is_err());
        assert!(GameSpec::from_json_str(r#"{"a":[[1,2],[3,4]],"b":[[5,6],[7,8]]}"#).is_err());
        assert!(GameSpec::new("bad", [[f64::NAN, 0.0], [0.0, 0.0]], [[0.0; 2]; 2]).is_err());
    }

    #[test]
    fn strategy_grid_layout() {
        let g = StrategyGrid::new(Dims::Two, 5).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.raw(0), [-PI, 0.0, 0.0]);
        assert_eq!(g.raw(1), [-PI, PI / 2.0, 0.0]);
        assert_eq!(g.raw(5), [-PI / 2.0, 0.0, 0.0]);
        assert_eq!(g.raw(24), [PI, TAU, 0.0]);
        let axis = StrategyGrid::new(Dims::One, 65).unwrap().axis_values(0);
        assert_eq!(axis[32], 0.0);
        assert!(StrategyGrid::new(Dims::One, 1).is_err());
    }
}
