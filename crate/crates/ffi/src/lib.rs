//! C interface: opaque sessions over the procedure catalog, flat buffers
//! for numeric answers, JSON strings for the structured reports.
//!
//! Every entry point returns a [`QgtStatus`]; on anything but `Ok` a
//! description is readable through [`qgt_last_error_message`] until the
//! next call from the same thread. Strings handed out through `*mut c_char`
//! outputs belong to the caller and must be released with
//! [`qgt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use qgt::claims;
use qgt::config::OutputFormat;
use qgt::equilibrium::{
    classical_deterministic_bound_with_budget, find_pure_nash_with_budget,
    grid_search_symmetric_max_with_budget, DEFAULT_BUDGET,
};
use qgt::ewl::{
    catalog, induced_game, outcome_distribution, payoff, EwlProcedure, PlayerStrategy, Strategy,
    StrategyProfile,
};
use qgt::qmat::bits_of_index;
use qgt::report::{render, Artifact};
use qgt::scenario::Scenario;
use qgt::states_gates::GateLabel;
use qgt::Error;

/// Result code carried by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QgtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// No catalog entry or gate under that name.
    UnknownName = 3,
    /// An argument was rejected (wrong count, inadmissible gate, bad input).
    InvalidArgument = 4,
    /// A numerical consistency check tripped during evaluation.
    NumericalFailure = 5,
    /// An exhaustive search would exceed its evaluation budget.
    BudgetExceeded = 6,
    /// Unexpected internal failure.
    InternalError = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
}

fn fail(status: QgtStatus, message: &str) -> QgtStatus {
    set_error(message);
    status
}

fn fail_with(e: &Error) -> QgtStatus {
    let status = match e {
        Error::UnknownName(_) => QgtStatus::UnknownName,
        Error::BudgetExceeded { .. } => QgtStatus::BudgetExceeded,
        Error::NumericalConsistency(_) => QgtStatus::NumericalFailure,
        Error::Io(_) => QgtStatus::InternalError,
        _ => QgtStatus::InvalidArgument,
    };
    fail(status, &e.to_string())
}

/// Message for the most recent failure on this thread, empty when the last
/// call succeeded. The pointer stays valid until the next toolkit call from
/// the same thread.
#[no_mangle]
pub extern "C" fn qgt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Toolkit version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn qgt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned through a `*mut c_char` output.
///
/// # Safety
/// `s` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn qgt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque handle pairing a procedure with its scenario.
pub struct QgtSession {
    procedure: EwlProcedure,
    scenario: Scenario,
}

/// Opens a session for a named catalog entry (see `qgt list-catalog`).
/// The handle must be released with [`qgt_session_close`].
///
/// # Safety
/// `name` must be a nul-terminated string and `out_session` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qgt_session_open(
    name: *const c_char,
    out_session: *mut *mut QgtSession,
) -> QgtStatus {
    clear_error();
    if name.is_null() || out_session.is_null() {
        return fail(QgtStatus::NullArgument, "name and out_session must be non-null");
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return fail(QgtStatus::InvalidUtf8, "name is not valid UTF-8");
    };
    match catalog(name) {
        Ok((procedure, scenario)) => {
            *out_session = Box::into_raw(Box::new(QgtSession { procedure, scenario }));
            QgtStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Releases a session handle. Null is accepted and ignored.
///
/// # Safety
/// `session` must come from [`qgt_session_open`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qgt_session_close(session: *mut QgtSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Number of players in the session's procedure, or 0 on a null handle.
///
/// # Safety
/// `session` must be a live handle from [`qgt_session_open`] or null.
#[no_mangle]
pub unsafe extern "C" fn qgt_session_players(session: *const QgtSession) -> usize {
    session.as_ref().map_or(0, |s| s.procedure.players())
}

/// Number of measurement outcomes (2^players), or 0 on a null handle.
/// This is the buffer length [`qgt_outcome_distribution`] expects.
///
/// # Safety
/// `session` must be a live handle from [`qgt_session_open`] or null.
#[no_mangle]
pub unsafe extern "C" fn qgt_session_outcome_count(session: *const QgtSession) -> usize {
    session.as_ref().map_or(0, |s| 1usize << s.procedure.players())
}

unsafe fn gate_at(labels: *const *const c_char, i: usize) -> Result<Strategy, Error> {
    let ptr = *labels.add(i);
    if ptr.is_null() {
        return Err(Error::InvalidParameter(format!("gate label {i} is null")));
    }
    let text = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Error::InvalidParameter(format!("gate label {i} is not valid UTF-8")))?;
    Strategy::from_label(&text.parse::<GateLabel>()?)
}

/// One fixed gate per player when `on_one` is null, otherwise an
/// input-conditioned pair per player.
unsafe fn parse_profile(
    session: &QgtSession,
    on_zero: *const *const c_char,
    on_one: *const *const c_char,
    count: usize,
) -> Result<StrategyProfile, Error> {
    let n = session.procedure.players();
    if count != n {
        return Err(Error::Profile(format!("{count} gate labels for {n} players")));
    }
    let mut players = Vec::with_capacity(n);
    for i in 0..n {
        let zero = gate_at(on_zero, i)?;
        players.push(if on_one.is_null() {
            PlayerStrategy::Single(zero)
        } else {
            PlayerStrategy::PerInput { on_zero: zero, on_one: gate_at(on_one, i)? }
        });
    }
    StrategyProfile::new(players)
}

unsafe fn payoff_into(
    session: *const QgtSession,
    on_zero: *const *const c_char,
    on_one: *const *const c_char,
    label_count: usize,
    out_payoffs: *mut f64,
) -> QgtStatus {
    clear_error();
    let Some(session) = session.as_ref() else {
        return fail(QgtStatus::NullArgument, "session is null");
    };
    if on_zero.is_null() || out_payoffs.is_null() {
        return fail(QgtStatus::NullArgument, "gate labels and out_payoffs must be non-null");
    }
    let profile = match parse_profile(session, on_zero, on_one, label_count) {
        Ok(p) => p,
        Err(e) => return fail_with(&e),
    };
    match payoff(&session.procedure, &session.scenario, &profile) {
        Ok(values) => {
            std::ptr::copy_nonoverlapping(values.as_ptr(), out_payoffs, values.len());
            QgtStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Expected payoffs for one fixed gate per player. `gate_labels` holds
/// `label_count` nul-terminated names (such as "identity", "pauli_x",
/// "hadamard", "su2(0.5,0.1,0.0)"); `out_payoffs` receives one value per
/// player.
///
/// # Safety
/// Pointers must be valid for the stated counts; `out_payoffs` must have
/// room for `qgt_session_players` values.
#[no_mangle]
pub unsafe extern "C" fn qgt_payoff(
    session: *const QgtSession,
    gate_labels: *const *const c_char,
    label_count: usize,
    out_payoffs: *mut f64,
) -> QgtStatus {
    payoff_into(session, gate_labels, std::ptr::null(), label_count, out_payoffs)
}

/// Expected payoffs when each player conditions on their input bit:
/// player i applies `on_zero[i]` on a 0 bit and `on_one[i]` on a 1 bit.
/// Requires a scenario with inputs.
///
/// # Safety
/// Pointers must be valid for the stated counts; `out_payoffs` must have
/// room for `qgt_session_players` values.
#[no_mangle]
pub unsafe extern "C" fn qgt_payoff_per_input(
    session: *const QgtSession,
    on_zero: *const *const c_char,
    on_one: *const *const c_char,
    label_count: usize,
    out_payoffs: *mut f64,
) -> QgtStatus {
    if on_one.is_null() {
        return fail(QgtStatus::NullArgument, "on_one must be non-null");
    }
    payoff_into(session, on_zero, on_one, label_count, out_payoffs)
}

/// Measurement distribution for one fixed gate per player. Masses land in
/// `out_masses` indexed by outcome with player 1 in the most significant
/// bit; `mass_count` must equal `qgt_session_outcome_count`. Pass a null
/// `input_bits` (with `input_len` 0) unless the scenario has inputs and
/// the distribution for one specific input is wanted.
///
/// # Safety
/// Pointers must be valid for the stated counts.
#[no_mangle]
pub unsafe extern "C" fn qgt_outcome_distribution(
    session: *const QgtSession,
    gate_labels: *const *const c_char,
    label_count: usize,
    input_bits: *const u8,
    input_len: usize,
    out_masses: *mut f64,
    mass_count: usize,
) -> QgtStatus {
    clear_error();
    let Some(session) = session.as_ref() else {
        return fail(QgtStatus::NullArgument, "session is null");
    };
    if gate_labels.is_null() || out_masses.is_null() {
        return fail(QgtStatus::NullArgument, "gate labels and out_masses must be non-null");
    }
    let n = session.procedure.players();
    if mass_count != 1usize << n {
        return fail(
            QgtStatus::InvalidArgument,
            &format!("mass_count {mass_count} does not match {} outcomes", 1usize << n),
        );
    }
    let profile = match parse_profile(session, gate_labels, std::ptr::null(), label_count) {
        Ok(p) => p,
        Err(e) => return fail_with(&e),
    };
    let input = if input_bits.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(input_bits, input_len))
    };
    match outcome_distribution(&session.procedure, &profile, input) {
        Ok(d) => {
            for idx in 0..mass_count {
                *out_masses.add(idx) = d.mass(&bits_of_index(idx, n));
            }
            QgtStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

unsafe fn return_json(artifact: &Artifact, out_json: *mut *mut c_char) -> QgtStatus {
    let text = render(artifact, OutputFormat::ReportJson);
    match CString::new(text) {
        Ok(c) => {
            *out_json = c.into_raw();
            QgtStatus::Ok
        }
        Err(_) => fail(QgtStatus::InternalError, "report contains a nul byte"),
    }
}

fn effective_budget(budget: u64) -> u64 {
    if budget == 0 {
        DEFAULT_BUDGET
    } else {
        budget
    }
}

/// Pure Nash equilibria of the induced game at gain threshold `epsilon`,
/// as a JSON report. `budget` caps payoff evaluations; 0 means the
/// default. Free the string with [`qgt_string_free`].
///
/// # Safety
/// `session` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qgt_find_pure_nash_json(
    session: *const QgtSession,
    epsilon: f64,
    budget: u64,
    out_json: *mut *mut c_char,
) -> QgtStatus {
    clear_error();
    let Some(session) = session.as_ref() else {
        return fail(QgtStatus::NullArgument, "session is null");
    };
    if out_json.is_null() {
        return fail(QgtStatus::NullArgument, "out_json is null");
    }
    let result = induced_game(&session.procedure, &session.scenario).and_then(|g| {
        find_pure_nash_with_budget(&g, epsilon, effective_budget(budget))
    });
    match result {
        Ok(reports) => {
            return_json(&Artifact::Nash { threshold: epsilon, reports }, out_json)
        }
        Err(e) => fail_with(&e),
    }
}

/// Symmetric profile maximizing the minimum payoff, as a JSON report.
/// `budget` caps payoff evaluations; 0 means the default.
///
/// # Safety
/// `session` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qgt_symmetric_max_json(
    session: *const QgtSession,
    budget: u64,
    out_json: *mut *mut c_char,
) -> QgtStatus {
    clear_error();
    let Some(session) = session.as_ref() else {
        return fail(QgtStatus::NullArgument, "session is null");
    };
    if out_json.is_null() {
        return fail(QgtStatus::NullArgument, "out_json is null");
    }
    let result = induced_game(&session.procedure, &session.scenario)
        .and_then(|g| grid_search_symmetric_max_with_budget(&g, effective_budget(budget)));
    match result {
        Ok(report) => return_json(&Artifact::SymmetricMax(report), out_json),
        Err(e) => fail_with(&e),
    }
}

/// Best deterministic classical play for the session's scenario, as a
/// JSON report. `budget` caps evaluations; 0 means the default.
///
/// # Safety
/// `session` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qgt_classical_bound_json(
    session: *const QgtSession,
    budget: u64,
    out_json: *mut *mut c_char,
) -> QgtStatus {
    clear_error();
    let Some(session) = session.as_ref() else {
        return fail(QgtStatus::NullArgument, "session is null");
    };
    if out_json.is_null() {
        return fail(QgtStatus::NullArgument, "out_json is null");
    }
    match classical_deterministic_bound_with_budget(&session.scenario, effective_budget(budget)) {
        Ok(report) => return_json(&Artifact::ClassicalBound(report), out_json),
        Err(e) => fail_with(&e),
    }
}

/// Runs the built-in claim battery and returns the JSON report. `samples`
/// sets the card-deck draw count (0 means the default) and `seed` fixes
/// the sampler. Check the `all_pass` field in the result.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qgt_verify_claims_json(
    samples: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> QgtStatus {
    clear_error();
    if out_json.is_null() {
        return fail(QgtStatus::NullArgument, "out_json is null");
    }
    let samples = if samples == 0 { claims::DEFAULT_SAMPLES } else { samples };
    match claims::verify_claims_with(samples, seed) {
        Ok(results) => return_json(&Artifact::Claims(results), out_json),
        Err(e) => fail_with(&e),
    }
}
