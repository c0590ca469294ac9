//! C ABI for modal-lift.
//!
//! Programs, bindings sessions and run reports are opaque handles created by
//! `modal_*_new`/`modal_run` and released with the matching `*_free`. Every
//! fallible call returns a [`ModalStatus`]; on failure the message is
//! available from [`modal_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use modal_lift::bindings::{BindingsError, Session};
use modal_lift::driver::{run_session, Exit, Mode, Report, RunOptions};
use modal_lift::labels::LabelError;
use modal_lift::lang::{parse, Program};
use modal_lift::modal::IntervalEmpty;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidBindings = 4,
    BudgetExceeded = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalMode {
    Plain = 0,
    Shallow = 1,
    Deep = 2,
    Oracle = 3,
    Check = 4,
}

/// Append counters to the report.
pub const MODAL_FLAG_STATS: u32 = 1;
/// Validate every intermediate modal value.
pub const MODAL_FLAG_CHECK_INVARIANTS: u32 = 2;
/// Repair inverted ranges instead of rejecting them.
pub const MODAL_FLAG_SWAP_EMPTY: u32 = 4;

/// A parsed, load-checked program.
pub struct ModalProgram {
    program: Program,
}

/// A validated bindings file and its label algebra.
pub struct ModalSession {
    session: Session,
}

/// Output of one run. The strings stay valid until the report is freed.
pub struct ModalReport {
    stdout: CString,
    stderr: CString,
    exit: Exit,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guarded(f: impl FnOnce() -> ModalStatus) -> ModalStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            ModalStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, ModalStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(ModalStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        ModalStatus::InvalidUtf8
    })
}

fn c_string(s: String) -> CString {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed")
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn modal_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a program from NUL-terminated UTF-8 source.
///
/// # Safety
/// `source` must be NULL or a valid C string; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn modal_program_new(source: *const c_char, out: *mut *mut ModalProgram) -> ModalStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return ModalStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let src = match text(source) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse(src) {
            Ok(program) => {
                *out = Box::into_raw(Box::new(ModalProgram { program }));
                ModalStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                ModalStatus::ParseError
            }
        }
    })
}

/// # Safety
/// `p` must be NULL or a handle from [`modal_program_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn modal_program_free(p: *mut ModalProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Loads and validates a bindings file. `feature_limit` of 0 selects the
/// default limit.
///
/// # Safety
/// `source` must be NULL or a valid C string; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn modal_session_new(
    source: *const c_char,
    feature_limit: usize,
    flags: u32,
    out: *mut *mut ModalSession,
) -> ModalStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return ModalStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let src = match text(source) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let limit = if feature_limit == 0 {
            RunOptions::default().feature_limit
        } else {
            feature_limit
        };
        let policy = if flags & MODAL_FLAG_SWAP_EMPTY != 0 {
            IntervalEmpty::Swap
        } else {
            IntervalEmpty::Reject
        };
        match Session::load(src, limit, policy) {
            Ok(session) => {
                *out = Box::into_raw(Box::new(ModalSession { session }));
                ModalStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                match e {
                    BindingsError::Modality(LabelError::TooManyFeatures { .. }) => ModalStatus::BudgetExceeded,
                    BindingsError::Invalid { .. } => ModalStatus::InvalidBindings,
                    _ => ModalStatus::ParseError,
                }
            }
        }
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`modal_session_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn modal_session_free(s: *mut ModalSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Evaluates `program` over `session`. Evaluation failures are not call
/// failures: they are described by the report's exit code and stderr.
///
/// # Safety
/// Handles must be live; `config` must be NULL or a valid C string; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn modal_run(
    program: *const ModalProgram,
    session: *const ModalSession,
    mode: ModalMode,
    flags: u32,
    config: *const c_char,
    out: *mut *mut ModalReport,
) -> ModalStatus {
    guarded(|| {
        if program.is_null() || session.is_null() || out.is_null() {
            set_error("null handle");
            return ModalStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let config = if config.is_null() {
            None
        } else {
            match text(config) {
                Ok(s) => Some(s.to_string()),
                Err(st) => return st,
            }
        };
        let opts = RunOptions {
            mode: match mode {
                ModalMode::Plain => Mode::Plain,
                ModalMode::Shallow => Mode::Shallow,
                ModalMode::Deep => Mode::Deep,
                ModalMode::Oracle => Mode::Oracle,
                ModalMode::Check => Mode::Check,
            },
            config,
            stats: flags & MODAL_FLAG_STATS != 0,
            check_invariants: flags & MODAL_FLAG_CHECK_INVARIANTS != 0,
            ..RunOptions::default()
        };
        let Report { stdout, stderr, exit } = run_session(&(*program).program, &(*session).session, &opts);
        *out = Box::into_raw(Box::new(ModalReport {
            stdout: c_string(stdout),
            stderr: c_string(stderr),
            exit,
        }));
        ModalStatus::Ok
    })
}

/// Report text as the CLI would print it on stdout.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn modal_report_stdout(r: *const ModalReport) -> *const c_char {
    if r.is_null() {
        return ptr::null();
    }
    (*r).stdout.as_ptr()
}

/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn modal_report_stderr(r: *const ModalReport) -> *const c_char {
    if r.is_null() {
        return ptr::null();
    }
    (*r).stderr.as_ptr()
}

/// CLI exit code of the run: 0 success, 1 usage, 2 invariant violation,
/// 3 budget exceeded; -1 for a NULL report.
///
/// # Safety
/// `r` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn modal_report_exit_code(r: *const ModalReport) -> i32 {
    if r.is_null() {
        return -1;
    }
    (*r).exit as i32
}

/// # Safety
/// `r` must be NULL or a handle from [`modal_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn modal_report_free(r: *mut ModalReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
