//! Command-line front end.
//!
//! Every command builds a [`Table`] and writes it as CSV or JSON, either to
//! stdout or atomically to `--output`. Output contains no timestamps, so equal
//! arguments give byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::distributions::TrembleSpec;
use crate::error::Error;
use crate::games::{
    builtin_game_by_name, classical_equilibria, classical_surface, classify_pure_profile, payoff_surface,
    GameSpec, Player, Surface, SurfaceSpec, DEFAULT_SURFACE_NODES,
};
use crate::integration::{smeared_payoff, smeared_payoff_mc, Quadrature, StrategyDistribution};
use crate::quantum::{Dims, Move, StrategyParams, OUTCOMES};
use crate::thp::{
    check_equilibrium, classical_thp_check, single_crossing_violation, thp_scan, threshold_search,
    ScanConfig, ScanSides,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_BRACKET: i32 = 3;
pub const EXIT_SELF_CHECK: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_FAILURE,
            CliError::Core(e) => match e {
                Error::NoBracket { .. } => EXIT_NO_BRACKET,
                Error::GridTooCoarse { .. } => EXIT_SELF_CHECK,
                Error::Overflow(_) | Error::NotUnitary { .. } => EXIT_FAILURE,
                _ => EXIT_CONFIG,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "qthp",
    version,
    about = "Quantum 2x2 games and trembling-hand perfectness under von Mises trembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Payoffs over one player's pure strategy grid against a fixed opponent.
    Surface(SurfaceArgs),
    /// Robustness verdicts of a profile at a list of concentrations.
    Thp(ThpArgs),
    /// Bisect the concentration at which a profile becomes robust.
    Threshold(ThresholdArgs),
    /// Classical equilibria, classical tremble verdicts or mixed-payoff surface.
    Classical(ClassicalArgs),
    /// Classify a pure profile as strict, weak or no equilibrium.
    Check(CheckArgs),
    /// Expected payoffs of two (possibly trembled) strategies.
    Payoff(PayoffArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sides {
    Both,
    Alice,
    Bob,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Destination file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Recompute trembled payoffs on a doubled grid and fail if they move.
    #[arg(long)]
    pub self_check: bool,
    /// Fixed quadrature nodes per tremble dimension (disables automatic refinement).
    #[arg(long)]
    pub quad_nodes: Option<usize>,
}

impl OutputArgs {
    fn quadrature(&self) -> Quadrature {
        self.quad_nodes
            .map_or_else(Quadrature::default, Quadrature::fixed)
            .with_self_check(self.self_check)
    }
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Builtin game (PD, EG, SH) or path to a game JSON file.
    #[arg(long)]
    pub game: String,
    /// Player whose pure strategy varies.
    #[arg(long, value_parser = parse_player)]
    pub vary: Player,
    #[arg(long, value_parser = parse_dims, default_value = "2")]
    pub dims: Dims,
    /// `pure:S`, `tremble:S,kappa=K[,dims=D]` or `classical:M,eps=E`.
    #[arg(long)]
    pub opponent: String,
    #[arg(long, default_value_t = DEFAULT_SURFACE_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub game: String,
    /// `C,D`-style pair of named moves or `S;S` with strategy literals.
    #[arg(long)]
    pub profile: String,
    #[arg(long, value_parser = parse_dims, default_value = "2")]
    pub tremble_dims: Dims,
    /// Parameters searched by the responder; defaults to min(tremble dims, 2).
    #[arg(long, value_parser = parse_dims)]
    pub response_dims: Option<Dims>,
    /// Response grid nodes per axis.
    #[arg(long, default_value_t = DEFAULT_SURFACE_NODES)]
    pub nodes: usize,
    /// Whose equilibrium strategy trembles.
    #[arg(long, value_enum, default_value = "both")]
    pub sides: Sides,
}

impl ScanArgs {
    fn config(&self, quad: Quadrature) -> ScanConfig {
        let mut cfg = ScanConfig::new(self.tremble_dims);
        if let Some(d) = self.response_dims {
            cfg.response_dims = d;
        }
        cfg.grid_nodes = self.nodes;
        cfg.quad = quad;
        cfg.sides = match self.sides {
            Sides::Both => ScanSides::Both,
            Sides::Alice => ScanSides::AliceTrembles,
            Sides::Bob => ScanSides::BobTrembles,
        };
        cfg
    }
}

#[derive(Debug, Args)]
pub struct ThpArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Comma-separated ascending concentrations.
    #[arg(long, default_value = "0.5,1,5,25")]
    pub kappas: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
    /// `lo,hi` concentrations with differing verdicts.
    #[arg(long)]
    pub bracket: String,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[arg(long)]
    pub game: String,
    /// Tremble probability of the classical check.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Emit the mixed-payoff surface instead of the verdict table.
    #[arg(long)]
    pub surface: bool,
    #[arg(long, default_value_t = DEFAULT_SURFACE_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub game: String,
    #[arg(long)]
    pub profile: String,
    #[arg(long, value_parser = parse_dims, default_value = "2")]
    pub dims: Dims,
    #[arg(long, default_value_t = DEFAULT_SURFACE_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PayoffArgs {
    #[arg(long)]
    pub game: String,
    /// Alice's strategy, same syntax as `surface --opponent`.
    #[arg(long)]
    pub alice: String,
    #[arg(long)]
    pub bob: String,
    /// Strategy dimension for named literals.
    #[arg(long, value_parser = parse_dims, default_value = "2")]
    pub dims: Dims,
    /// Also estimate by Monte Carlo with this many samples.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_dims(s: &str) -> std::result::Result<Dims, String> {
    let n: u32 = s.trim().parse().map_err(|_| format!("not a dimension: {s}"))?;
    Dims::try_from(n).map_err(|e| e.to_string())
}

fn parse_player(s: &str) -> std::result::Result<Player, String> {
    s.parse::<Player>().map_err(|e| e.to_string())
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_f64(s: &str, what: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| config(format!("invalid {what}: {s:?}")))?;
    if !v.is_finite() {
        return Err(config(format!("{what} must be finite, got {s}")));
    }
    Ok(v)
}

pub fn load_game(arg: &str) -> CliResult<GameSpec> {
    match builtin_game_by_name(arg) {
        Ok(g) => Ok(g),
        Err(Error::UnknownGame(_)) if Path::new(arg).exists() => {
            Ok(GameSpec::from_json_file(Path::new(arg))?)
        }
        Err(e) => Err(e.into()),
    }
}

/// `C`, `D`, `Q` or up to three comma-separated angles `theta[,alpha[,beta]]`.
pub fn parse_strategy(s: &str, dims: Dims) -> CliResult<StrategyParams> {
    let s = s.trim();
    match s.to_ascii_uppercase().as_str() {
        "C" => return Ok(StrategyParams::cooperate(dims)),
        "D" => return Ok(StrategyParams::defect(dims)),
        "Q" => return Ok(StrategyParams::quantum(dims)?),
        _ => {}
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() > 3 {
        return Err(config(format!(
            "strategy literal has more than three angles: {s:?}"
        )));
    }
    let mut coords = [0.0; 3];
    for (c, p) in coords.iter_mut().zip(&parts) {
        *c = parse_f64(p, "angle")?;
    }
    Ok(StrategyParams::new(dims, coords[0], coords[1], coords[2])?)
}

/// `A,B` with named moves, or `A;B` with arbitrary strategy literals.
pub fn parse_profile(s: &str, dims: Dims) -> CliResult<(StrategyParams, StrategyParams)> {
    let (a, b) = if let Some((a, b)) = s.split_once(';') {
        (a, b)
    } else {
        match s.split(',').collect::<Vec<_>>().as_slice() {
            [a, b] => (*a, *b),
            _ => {
                return Err(config(format!(
                    "profile must be `X,Y` with named strategies or `S;S`, got {s:?}"
                )))
            }
        }
    };
    Ok((parse_strategy(a, dims)?, parse_strategy(b, dims)?))
}

/// `pure:S`, `tremble:S,kappa=K[,dims=D]` or `classical:M,eps=E`.
pub fn parse_distribution(s: &str, default_dims: Dims) -> CliResult<StrategyDistribution> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| config(format!("strategy spec needs a `kind:` prefix, got {s:?}")))?;
    let mut literal = Vec::new();
    let mut kappa = None;
    let mut eps = None;
    let mut dims = default_dims;
    for tok in rest.split(',') {
        match tok.split_once('=') {
            Some(("kappa", v)) => kappa = Some(parse_f64(v, "kappa")?),
            Some(("eps", v)) => eps = Some(parse_f64(v, "eps")?),
            Some(("dims", v)) => dims = parse_dims(v).map_err(config)?,
            Some((k, _)) => return Err(config(format!("unknown key {k:?} in {s:?}"))),
            None => literal.push(tok),
        }
    }
    let literal = literal.join(",");
    match kind {
        "pure" => Ok(StrategyDistribution::Pure(parse_strategy(&literal, dims)?)),
        "tremble" => {
            let kappa = kappa.ok_or_else(|| config(format!("tremble needs kappa=: {s:?}")))?;
            let center = parse_strategy(&literal, dims)?;
            Ok(StrategyDistribution::Trembled(TrembleSpec::new(center, kappa)?))
        }
        "classical" => {
            let eps = eps.ok_or_else(|| config(format!("classical tremble needs eps=: {s:?}")))?;
            let mv = match literal.trim().to_ascii_uppercase().as_str() {
                "C" => Move::C,
                "D" => Move::D,
                _ => return Err(config(format!("classical tremble needs C or D, got {literal:?}"))),
            };
            Ok(StrategyDistribution::classical_tremble(mv, eps, dims)?)
        }
        _ => Err(config(format!("unknown strategy kind {kind:?}"))),
    }
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(|v| parse_f64(v, what)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(t) => json!(t),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Command result: metadata plus a rectangular table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &str, out: &OutputArgs, columns: &[&str]) -> Self {
        let mut metadata = Map::new();
        metadata.insert("command".into(), json!(command));
        metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        metadata.insert("seed".into(), json!(out.seed));
        metadata.insert("self_check".into(), json!(out.self_check));
        metadata.insert("quadrature".into(), json!(out.quadrature()));
        Table {
            metadata,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.into(), value);
    }

    /// Metadata as `# key=value` comment lines, then header and rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "metadata": self.metadata,
            "columns": self.columns,
            "records": records,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

fn write_output(table: &Table, out: &OutputArgs) -> CliResult<()> {
    let text = match out.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &out.output {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
        }
    }
    Ok(())
}

fn surface_rows(table: &mut Table, surface: &Surface) {
    for i in 0..surface.len() {
        let mut row: Vec<Cell> = surface.coords(i).into_iter().map(Cell::Num).collect();
        row.push(Cell::Num(surface.values_a[i]));
        row.push(Cell::Num(surface.values_b[i]));
        table.rows.push(row);
    }
}

fn surface_columns(surface: &Surface) -> Vec<&str> {
    let mut cols: Vec<&str> = surface.axes.iter().map(|a| a.name.as_str()).collect();
    cols.extend(["payoff_a", "payoff_b"]);
    cols
}

fn cmd_surface(args: &SurfaceArgs) -> CliResult<Table> {
    let game = load_game(&args.game)?;
    let opponent = parse_distribution(&args.opponent, args.dims)?;
    let spec = SurfaceSpec {
        player: args.vary,
        dims: args.dims,
        nodes: args.nodes,
    };
    let surface = payoff_surface(&game, spec, &opponent, &args.out.quadrature())?;
    let mut table = Table::new("surface", &args.out, &surface_columns(&surface));
    table.meta("game", json!(game));
    table.meta("vary", json!(args.vary.to_string()));
    table.meta("dims", json!(args.dims));
    table.meta("nodes", json!(args.nodes));
    table.meta("opponent", json!(opponent.describe()));
    let best = surface.argmax(args.vary);
    table.meta("argmax_row", json!(best));
    table.meta("argmax_coords", json!(surface.coords(best)));
    surface_rows(&mut table, &surface);
    Ok(table)
}

fn scan_metadata(table: &mut Table, game: &GameSpec, args: &ScanArgs, cfg: &ScanConfig) {
    table.meta("game", json!(game));
    table.meta("profile", json!(args.profile));
    table.meta("tremble_dims", json!(cfg.tremble_dims));
    table.meta("response_dims", json!(cfg.response_dims));
    table.meta("grid_nodes", json!(cfg.grid_nodes));
    table.meta("sides", json!(cfg.sides));
}

fn cmd_thp(args: &ThpArgs) -> CliResult<Table> {
    let game = load_game(&args.scan.game)?;
    let cfg = args.scan.config(args.out.quadrature());
    let profile = parse_profile(&args.scan.profile, cfg.tremble_dims)?;
    let kappas = parse_list(&args.kappas, "kappa")?;
    let verdicts = thp_scan(&game, profile, &cfg, &kappas)?;
    let mut table = Table::new(
        "thp",
        &args.out,
        &[
            "kappa",
            "holds",
            "distance",
            "margin",
            "responder",
            "best_theta",
            "best_alpha",
            "best_beta",
        ],
    );
    scan_metadata(&mut table, &game, &args.scan, &cfg);
    table.meta(
        "single_crossing_violation",
        json!(single_crossing_violation(&verdicts)),
    );
    for v in &verdicts {
        let [t, a, b] = v.best_response.coords();
        table.rows.push(vec![
            Cell::Num(v.kappa),
            Cell::Bool(v.holds),
            Cell::Num(v.distance),
            Cell::Num(v.margin),
            Cell::Text(v.responder.to_string()),
            Cell::Num(t),
            Cell::Num(a),
            Cell::Num(b),
        ]);
    }
    Ok(table)
}

fn cmd_threshold(args: &ThresholdArgs) -> CliResult<Table> {
    let game = load_game(&args.scan.game)?;
    let cfg = args.scan.config(args.out.quadrature());
    let profile = parse_profile(&args.scan.profile, cfg.tremble_dims)?;
    let bracket = parse_list(&args.bracket, "bracket")?;
    let [lo, hi] = bracket[..] else {
        return Err(config(format!("bracket must be `lo,hi`, got {:?}", args.bracket)));
    };
    let t = threshold_search(&game, profile, &cfg, lo, hi, args.tol)?;
    let mut table = Table::new(
        "threshold",
        &args.out,
        &[
            "kappa_star",
            "bracket_lo",
            "bracket_hi",
            "final_lo",
            "final_hi",
            "tol",
            "holds_lo",
            "holds_hi",
            "evaluations",
        ],
    );
    scan_metadata(&mut table, &game, &args.scan, &cfg);
    table.rows.push(vec![
        Cell::Num(t.kappa_star),
        Cell::Num(lo),
        Cell::Num(hi),
        Cell::Num(t.lo),
        Cell::Num(t.hi),
        Cell::Num(t.tol),
        Cell::Bool(t.holds_lo),
        Cell::Bool(t.holds_hi),
        Cell::Int(t.evaluations as u64),
    ]);
    Ok(table)
}

fn cmd_classical(args: &ClassicalArgs) -> CliResult<Table> {
    let game = load_game(&args.game)?;
    if args.surface {
        let surface = classical_surface(&game, args.nodes)?;
        let mut table = Table::new("classical", &args.out, &surface_columns(&surface));
        table.meta("game", json!(game));
        table.meta("nodes", json!(args.nodes));
        surface_rows(&mut table, &surface);
        return Ok(table);
    }
    let mut table = Table::new(
        "classical",
        &args.out,
        &["alice", "bob", "payoff_a", "payoff_b", "equilibrium", "thp"],
    );
    table.meta("game", json!(game));
    table.meta("eps", json!(args.eps));
    table.meta("equilibria", json!(classical_equilibria(&game)));
    for (alice, bob) in OUTCOMES {
        let kind = classify_pure_profile(&game, alice, bob);
        let thp = match kind {
            crate::games::EquilibriumKind::NotEquilibrium => false,
            _ => classical_thp_check(&game, (alice, bob), args.eps)?,
        };
        table.rows.push(vec![
            Cell::Text(alice.to_string()),
            Cell::Text(bob.to_string()),
            Cell::Num(game.entry(Player::A, alice, bob)),
            Cell::Num(game.entry(Player::B, alice, bob)),
            Cell::Text(kind.to_string()),
            Cell::Bool(thp),
        ]);
    }
    Ok(table)
}

fn cmd_check(args: &CheckArgs) -> CliResult<Table> {
    let game = load_game(&args.game)?;
    let profile = parse_profile(&args.profile, args.dims)?;
    let kind = check_equilibrium(&game, profile, args.dims, args.nodes)?;
    let mut table = Table::new("check", &args.out, &["profile", "dims", "equilibrium"]);
    table.meta("game", json!(game));
    table.meta("nodes", json!(args.nodes));
    table.rows.push(vec![
        Cell::Text(args.profile.clone()),
        Cell::Int(u32::from(args.dims) as u64),
        Cell::Text(kind.to_string()),
    ]);
    Ok(table)
}

fn cmd_payoff(args: &PayoffArgs) -> CliResult<Table> {
    let game = load_game(&args.game)?;
    let alice = parse_distribution(&args.alice, args.dims)?;
    let bob = parse_distribution(&args.bob, args.dims)?;
    let (pa, pb) = smeared_payoff(&game, &alice, &bob, &args.out.quadrature())?;
    let mut columns = vec!["payoff_a", "payoff_b"];
    let mut row = vec![Cell::Num(pa), Cell::Num(pb)];
    if let Some(n) = args.mc_samples {
        let mc = smeared_payoff_mc(&game, &alice, &bob, n, args.out.seed)?;
        columns.extend([
            "mc_payoff_a",
            "mc_payoff_b",
            "mc_stderr_a",
            "mc_stderr_b",
            "mc_samples",
        ]);
        row.extend([
            Cell::Num(mc.payoff_a),
            Cell::Num(mc.payoff_b),
            Cell::Num(mc.stderr_a),
            Cell::Num(mc.stderr_b),
            Cell::Int(mc.samples as u64),
        ]);
    }
    let mut table = Table::new("payoff", &args.out, &columns);
    table.meta("game", json!(game));
    table.meta("alice", json!(alice.describe()));
    table.meta("bob", json!(bob.describe()));
    table.rows.push(row);
    Ok(table)
}

/// Runs a parsed command and writes its output.
pub fn run(cli: &Cli) -> CliResult<()> {
    let (table, out) = match &cli.command {
        Command::Surface(a) => (cmd_surface(a)?, &a.out),
        Command::Thp(a) => (cmd_thp(a)?, &a.out),
        Command::Threshold(a) => (cmd_threshold(a)?, &a.out),
        Command::Classical(a) => (cmd_classical(a)?, &a.out),
        Command::Check(a) => (cmd_check(a)?, &a.out),
        Command::Payoff(a) => (cmd_payoff(a)?, &a.out),
    };
    write_output(&table, out)
}
