//! C ABI for the tiebreak solver.
//!
//! Games and solve results cross the boundary as opaque handles; everything
//! else is UTF-8 text (games in the `.gdl` syntax, reports as the same
//! tab-separated tables the command line prints, policies in the
//! `first` / `friendly:I` / `unfriendly:I` / `profile:1=F,2=U` syntax).
//! Calls that can fail return a [`TbStatus`]; on failure a thread-local
//! message is available through [`tb_last_error`].
//!
//! Every `char*` returned by this library must be released with
//! [`tb_string_free`], every game with [`tb_game_free`], and every solve
//! result with [`tb_result_free`]. The generated header lives at
//! `include/tiebreak.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use tiebreak::game::{validate, Game};
use tiebreak::gdl;
use tiebreak::induction::{solve_generic, solve_with_policy, SolveResult};
use tiebreak::repeated::{simultaneous_indifference, StrategyRule};
use tiebreak::report;

/// Result of a tiebreak call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8, or an output string could not
    /// be encoded for C.
    Encoding = 2,
    /// The game text did not parse; `tb_last_error` carries line and column.
    Parse = 3,
    /// The game breaks a structural invariant.
    InvalidGame = 4,
    /// Generic backward induction hit a tie; `tb_last_error` names the node.
    Indifference = 5,
    /// A policy or strategy specification was rejected.
    InvalidArgument = 6,
}

/// An immutable game handle.
pub struct TbGame {
    inner: Game,
}

/// A backward-induction result, bound to the game it was computed on.
pub struct TbSolveResult {
    game: Game,
    inner: SolveResult,
}

/// Which tab-separated report to produce.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbReport {
    /// All pure subgame-perfect equilibria.
    Spe = 0,
    /// Solve results under every disposition profile.
    Scenarios = 1,
    /// Friendly/unfriendly classification of tied actions.
    Friendliness = 2,
    /// The full normal-form payoff tensor.
    NormalForm = 3,
    /// Pure Nash equilibria of the normal form.
    Nash = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes removed");
    });
}

fn fail(status: TbStatus, message: &str) -> TbStatus {
    set_last_error(message);
    status
}

/// The message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn export_string(text: String) -> Result<*mut c_char, TbStatus> {
    match CString::new(text) {
        Ok(c) => Ok(c.into_raw()),
        Err(_) => {
            set_last_error("output contained an interior nul byte");
            Err(TbStatus::Encoding)
        }
    }
}

/// # Safety
/// `text` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

unsafe fn input_str<'a>(pointer: *const c_char) -> Result<&'a str, TbStatus> {
    if pointer.is_null() {
        set_last_error("string argument is null");
        return Err(TbStatus::NullPointer);
    }
    CStr::from_ptr(pointer).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8");
        TbStatus::Encoding
    })
}

unsafe fn game_ref<'a>(game: *const TbGame) -> Result<&'a Game, TbStatus> {
    if game.is_null() {
        set_last_error("game handle is null");
        return Err(TbStatus::NullPointer);
    }
    Ok(&(*game).inner)
}

fn export_game(game: Game) -> *mut TbGame {
    Box::into_raw(Box::new(TbGame { inner: game }))
}

/// Parses a game description and stores a new handle in `out_game`.
///
/// # Safety
/// `source` must point to a NUL-terminated string and `out_game` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn tb_game_parse(
    source: *const c_char,
    out_game: *mut *mut TbGame,
) -> TbStatus {
    if out_game.is_null() {
        return fail(TbStatus::NullPointer, "out_game is null");
    }
    let text = match input_str(source) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match gdl::parse_game(text) {
        Ok(game) => {
            *out_game = export_game(game);
            TbStatus::Ok
        }
        Err(e) => fail(TbStatus::Parse, &e.to_string()),
    }
}

/// The bundled one-step indifference game.
#[no_mangle]
pub extern "C" fn tb_game_indifference() -> *mut TbGame {
    export_game(gdl::indifference_game())
}

/// The bundled reduced game (the indifference game collapsed under a
/// friendliness-matching opponent).
#[no_mangle]
pub extern "C" fn tb_game_tft_reduced() -> *mut TbGame {
    export_game(gdl::tft_reduced_game())
}

/// The bundled three-stage game.
#[no_mangle]
pub extern "C" fn tb_game_three_stage() -> *mut TbGame {
    export_game(gdl::three_stage_game())
}

/// The alternating gift game with the given number of moves, 1 to 24
/// inclusive (the tree has 2^moves leaves); returns null outside that range.
#[no_mangle]
pub extern "C" fn tb_game_alternating(moves: usize) -> *mut TbGame {
    if moves == 0 {
        set_last_error("the alternating game needs at least one move");
        return ptr::null_mut();
    }
    if moves > 24 {
        set_last_error("refusing to build an alternating game with more than 2^24 leaves");
        return ptr::null_mut();
    }
    export_game(tiebreak::repeated::alternating_game(moves))
}

/// # Safety
/// `game` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tb_game_free(game: *mut TbGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of players, or 0 when `game` is null.
///
/// # Safety
/// `game` must be null or a live game handle.
#[no_mangle]
pub unsafe extern "C" fn tb_game_num_players(game: *const TbGame) -> usize {
    match game_ref(game) {
        Ok(g) => g.num_players,
        Err(_) => 0,
    }
}

/// Canonical text of the game; free with `tb_string_free`. Null on error.
///
/// # Safety
/// `game` must be null or a live game handle.
#[no_mangle]
pub unsafe extern "C" fn tb_game_serialize(game: *const TbGame) -> *mut c_char {
    match game_ref(game).map(gdl::serialize) {
        Ok(text) => export_string(text).unwrap_or(ptr::null_mut()),
        Err(_) => ptr::null_mut(),
    }
}

/// Checks the structural invariants. Returns `Ok` on a well-formed game and
/// `InvalidGame` otherwise; when `out_report` is non-null it receives the
/// violation table either way.
///
/// # Safety
/// `game` must be a live game handle; `out_report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn tb_game_validate(
    game: *const TbGame,
    out_report: *mut *mut c_char,
) -> TbStatus {
    let game = match game_ref(game) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let violations = validate(game);
    if !out_report.is_null() {
        match export_string(report::render_violations(&violations)) {
            Ok(text) => *out_report = text,
            Err(status) => return status,
        }
    }
    if violations.is_empty() {
        TbStatus::Ok
    } else {
        fail(
            TbStatus::InvalidGame,
            &format!("game breaks {} invariant(s)", violations.len()),
        )
    }
}

/// Solves the game by backward induction. A null `policy` demands
/// genericity and fails with `Indifference` on the first tie; otherwise the
/// policy string is parsed as on the command line.
///
/// # Safety
/// `game` must be a live game handle, `policy` null or a NUL-terminated
/// string, `out_result` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_solve(
    game: *const TbGame,
    policy: *const c_char,
    out_result: *mut *mut TbSolveResult,
) -> TbStatus {
    if out_result.is_null() {
        return fail(TbStatus::NullPointer, "out_result is null");
    }
    let game = match game_ref(game) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let solved = if policy.is_null() {
        match solve_generic(game) {
            Ok(result) => result,
            Err(e) => return fail(TbStatus::Indifference, &e.to_string()),
        }
    } else {
        let spec = match input_str(policy) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let policy = match report::parse_policy(spec, game.num_players) {
            Ok(p) => p,
            Err(e) => return fail(TbStatus::InvalidArgument, &e),
        };
        match solve_with_policy(game, &policy) {
            Ok(result) => result,
            Err(e) => return fail(TbStatus::InvalidArgument, &e.to_string()),
        }
    };
    *out_result = Box::into_raw(Box::new(TbSolveResult {
        game: game.clone(),
        inner: solved,
    }));
    TbStatus::Ok
}

/// # Safety
/// `result` must be null or an unfreed result handle.
#[no_mangle]
pub unsafe extern "C" fn tb_result_free(result: *mut TbSolveResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

unsafe fn result_ref<'a>(result: *const TbSolveResult) -> Result<&'a TbSolveResult, TbStatus> {
    if result.is_null() {
        set_last_error("result handle is null");
        return Err(TbStatus::NullPointer);
    }
    Ok(&*result)
}

/// The root value as space-separated rationals, e.g. `"1 1"`. Free with
/// `tb_string_free`; null on error.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tb_result_value(result: *const TbSolveResult) -> *mut c_char {
    match result_ref(result) {
        Ok(r) => {
            export_string(report::render_utilities(&r.inner.root_value)).unwrap_or(ptr::null_mut())
        }
        Err(_) => ptr::null_mut(),
    }
}

/// The realized play as space-separated action labels, e.g. `"R L"`. Free
/// with `tb_string_free`; null on error.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tb_result_path(result: *const TbSolveResult) -> *mut c_char {
    match result_ref(result) {
        Ok(r) => export_string(report::render_path(&r.game, &r.inner.chosen_path))
            .unwrap_or(ptr::null_mut()),
        Err(_) => ptr::null_mut(),
    }
}

/// How many decision nodes had tied best sets; 0 on a null handle.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tb_result_tie_count(result: *const TbSolveResult) -> usize {
    match result_ref(result) {
        Ok(r) => r.inner.tie_nodes.len(),
        Err(_) => 0,
    }
}

/// Produces one of the tab-separated reports, byte-identical to the command
/// line's output for the same game.
///
/// # Safety
/// `game` must be a live game handle and `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_report(
    game: *const TbGame,
    kind: TbReport,
    out_text: *mut *mut c_char,
) -> TbStatus {
    if out_text.is_null() {
        return fail(TbStatus::NullPointer, "out_text is null");
    }
    let game = match game_ref(game) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let text = match kind {
        TbReport::Spe => Ok(report::render_spe(game)),
        TbReport::Scenarios => report::render_scenarios(game),
        TbReport::Friendliness => report::render_friendliness(game),
        TbReport::NormalForm => Ok(report::render_normal_form(game)),
        TbReport::Nash => Ok(report::render_nash(game)),
    };
    match text {
        Ok(text) => match export_string(text) {
            Ok(exported) => {
                *out_text = exported;
                TbStatus::Ok
            }
            Err(status) => status,
        },
        Err(e) => fail(TbStatus::InvalidArgument, &e.to_string()),
    }
}

/// Plays the repeated stage game (or, with `alternating`, the alternating
/// gift game) between two named strategies (`tft`, `allf`, `allu`) and
/// returns the per-round table.
///
/// # Safety
/// `p1` and `p2` must be NUL-terminated strings and `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_simulate(
    p1: *const c_char,
    p2: *const c_char,
    rounds: usize,
    alternating: bool,
    out_text: *mut *mut c_char,
) -> TbStatus {
    if out_text.is_null() {
        return fail(TbStatus::NullPointer, "out_text is null");
    }
    let s1 = match named_strategy(p1) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let s2 = match named_strategy(p2) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let table = if alternating {
        report::render_alternating(&s1, &s2, rounds)
    } else {
        report::render_simulation(&simultaneous_indifference(), &s1, &s2, rounds)
    };
    match table {
        Ok(text) => match export_string(text) {
            Ok(exported) => {
                *out_text = exported;
                TbStatus::Ok
            }
            Err(status) => status,
        },
        Err(e) => fail(TbStatus::InvalidArgument, &e.to_string()),
    }
}

unsafe fn named_strategy(name: *const c_char) -> Result<StrategyRule, TbStatus> {
    let name = input_str(name)?;
    StrategyRule::by_name(name).ok_or_else(|| {
        set_last_error(&format!(
            "unknown strategy {name:?}; use tft, allf, or allu"
        ));
        TbStatus::InvalidArgument
    })
}
