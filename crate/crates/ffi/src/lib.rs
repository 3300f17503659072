//! C ABI for `qthp`.
//!
//! Games live behind an opaque [`QthpGame`] handle. Every fallible function
//! returns a [`QthpStatus`] and writes results through out-pointers; on failure
//! [`qthp_last_error_message`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qthp::distributions::{bessel_i, TrembleSpec};
use qthp::games::{builtin_game_by_name, EquilibriumKind, GameSpec};
use qthp::integration::{smeared_payoff, Quadrature, StrategyDistribution};
use qthp::quantum::{expected_payoff, Dims, StrategyParams};
use qthp::thp::{check_equilibrium, threshold_search, ScanConfig};
use qthp::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QthpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidStrategy = 3,
    InvalidGame = 4,
    NoBracket = 5,
    GridTooCoarse = 6,
    Numeric = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QthpEquilibrium {
    Strict = 0,
    Weak = 1,
    NotEquilibrium = 2,
}

/// Pure strategy: Euler angles in radians and the number of active ones (1 to 3).
/// Inactive angles must be zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QthpStrategy {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub dims: u32,
}

/// A player's strategy, trembled around `strategy` with concentration `kappa`
/// when `trembled` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QthpSide {
    pub strategy: QthpStrategy,
    pub trembled: bool,
    pub kappa: f64,
}

/// Opaque game handle.
pub struct QthpGame {
    inner: GameSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QthpStatus {
    match e {
        Error::InvalidStrategy(_) | Error::InvalidDims(_) | Error::NotUnitary { .. } => {
            QthpStatus::InvalidStrategy
        }
        Error::InvalidGame(_) | Error::UnknownGame(_) => QthpStatus::InvalidGame,
        Error::NoBracket { .. } => QthpStatus::NoBracket,
        Error::GridTooCoarse { .. } => QthpStatus::GridTooCoarse,
        Error::Overflow(_) => QthpStatus::Numeric,
        _ => QthpStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), QthpStatus>) -> QthpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QthpStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            QthpStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, QthpStatus>;
}

impl<T> OrStatus<T> for qthp::Result<T> {
    fn or_status(self) -> Result<T, QthpStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null(what: &str) -> QthpStatus {
    set_error(&format!("{what} is null"));
    QthpStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, QthpStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        QthpStatus::InvalidArgument
    })
}

unsafe fn game_ref<'a>(game: *const QthpGame) -> Result<&'a GameSpec, QthpStatus> {
    game.as_ref().map(|g| &g.inner).ok_or_else(|| null("game"))
}

fn dims_of(n: u32) -> Result<Dims, QthpStatus> {
    Dims::try_from(n).or_status()
}

fn params_of(s: &QthpStrategy) -> Result<StrategyParams, QthpStatus> {
    StrategyParams::new(dims_of(s.dims)?, s.theta, s.alpha, s.beta).or_status()
}

fn distribution_of(side: &QthpSide) -> Result<StrategyDistribution, QthpStatus> {
    let p = params_of(&side.strategy)?;
    if side.trembled {
        Ok(StrategyDistribution::Trembled(
            TrembleSpec::new(p, side.kappa).or_status()?,
        ))
    } else {
        Ok(StrategyDistribution::Pure(p))
    }
}

unsafe fn store<T>(out: *mut T, value: T, what: &str) -> Result<(), QthpStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn store_game(out: *mut *mut QthpGame, game: GameSpec) -> Result<(), QthpStatus> {
    store(out, Box::into_raw(Box::new(QthpGame { inner: game })), "out")
}

/// Builtin game by name: `PD`, `EG` or `SH` (case-insensitive).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qthp_game_builtin(name: *const c_char, out: *mut *mut QthpGame) -> QthpStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        store_game(out, builtin_game_by_name(name).or_status()?)
    })
}

/// Game from two row-major 2x2 payoff matrices (rows: Alice's move C, D).
///
/// # Safety
/// `a` and `b` must point to 4 readable doubles each; `name` may be null.
#[no_mangle]
pub unsafe extern "C" fn qthp_game_from_matrices(
    name: *const c_char,
    a: *const f64,
    b: *const f64,
    out: *mut *mut QthpGame,
) -> QthpStatus {
    guard(|| {
        if a.is_null() || b.is_null() {
            return Err(null("payoff matrix"));
        }
        let name = if name.is_null() {
            "custom"
        } else {
            read_str(name, "name")?
        };
        let read = |p: *const f64| {
            let s = std::slice::from_raw_parts(p, 4);
            [[s[0], s[1]], [s[2], s[3]]]
        };
        store_game(out, GameSpec::new(name, read(a), read(b)).or_status()?)
    })
}

/// Game from the JSON game-file format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qthp_game_from_json(json: *const c_char, out: *mut *mut QthpGame) -> QthpStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        store_game(out, GameSpec::from_json_str(text).or_status()?)
    })
}

/// # Safety
/// `game` must come from one of the constructors and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qthp_game_free(game: *mut QthpGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Payoffs `(Alice, Bob)` of a pure strategy profile.
///
/// # Safety
/// `game` must be a live handle; `out_a` and `out_b` writable.
#[no_mangle]
pub unsafe extern "C" fn qthp_expected_payoff(
    game: *const QthpGame,
    alice: QthpStrategy,
    bob: QthpStrategy,
    out_a: *mut f64,
    out_b: *mut f64,
) -> QthpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let (a, b) = (params_of(&alice)?, params_of(&bob)?);
        let (pa, pb) = expected_payoff(g, &a.gate(), &b.gate()).or_status()?;
        store(out_a, pa, "out_a")?;
        store(out_b, pb, "out_b")
    })
}

/// Expected payoffs when either side may tremble; `quad_nodes == 0` uses the
/// default quadrature.
///
/// # Safety
/// `game` must be a live handle; `out_a` and `out_b` writable.
#[no_mangle]
pub unsafe extern "C" fn qthp_smeared_payoff(
    game: *const QthpGame,
    alice: QthpSide,
    bob: QthpSide,
    quad_nodes: u32,
    out_a: *mut f64,
    out_b: *mut f64,
) -> QthpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let quad = match quad_nodes {
            0 => Quadrature::default(),
            n => Quadrature::fixed(n as usize),
        };
        let (a, b) = (distribution_of(&alice)?, distribution_of(&bob)?);
        let (pa, pb) = smeared_payoff(g, &a, &b, &quad).or_status()?;
        store(out_a, pa, "out_a")?;
        store(out_b, pb, "out_b")
    })
}

/// Classifies a pure profile with both strategies embedded in `dims` parameters.
///
/// # Safety
/// `game` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qthp_check_equilibrium(
    game: *const QthpGame,
    alice: QthpStrategy,
    bob: QthpStrategy,
    dims: u32,
    grid_nodes: u32,
    out: *mut QthpEquilibrium,
) -> QthpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let profile = (params_of(&alice)?, params_of(&bob)?);
        let kind = check_equilibrium(g, profile, dims_of(dims)?, grid_nodes as usize).or_status()?;
        let kind = match kind {
            EquilibriumKind::Strict => QthpEquilibrium::Strict,
            EquilibriumKind::Weak => QthpEquilibrium::Weak,
            EquilibriumKind::NotEquilibrium => QthpEquilibrium::NotEquilibrium,
        };
        store(out, kind, "out")
    })
}

/// Concentration at which the profile becomes (or stops being) robust, using
/// default scan settings for `tremble_dims`. Returns `NoBracket` when the
/// verdict agrees at both ends.
///
/// # Safety
/// `game` must be a live handle; `out_kappa` writable.
#[no_mangle]
pub unsafe extern "C" fn qthp_threshold_search(
    game: *const QthpGame,
    alice: QthpStrategy,
    bob: QthpStrategy,
    tremble_dims: u32,
    kappa_lo: f64,
    kappa_hi: f64,
    tol: f64,
    out_kappa: *mut f64,
) -> QthpStatus {
    guard(|| {
        let g = game_ref(game)?;
        let profile = (params_of(&alice)?, params_of(&bob)?);
        let cfg = ScanConfig::new(dims_of(tremble_dims)?);
        let t = threshold_search(g, profile, &cfg, kappa_lo, kappa_hi, tol).or_status()?;
        store(out_kappa, t.kappa_star, "out_kappa")
    })
}

/// Modified Bessel function of the first kind, order a multiple of 1/2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qthp_bessel_i(nu: f64, x: f64, out: *mut f64) -> QthpStatus {
    guard(|| store(out, bessel_i(nu, x).or_status()?, "out"))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qthp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn qthp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
