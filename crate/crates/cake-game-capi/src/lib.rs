//! C ABI over the simulator: run a configured game from JSON and walk the
//! resulting trajectory. All entry points are panic-safe; failures set a
//! thread-local message readable through `cg_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cake_game::config::RunConfig;
use cake_game::engine::{bob_regret, stackelberg_regret, Choice};
use cake_game::runner::{run_once, CompletedRun, RunnerError};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    /// A null pointer, non-UTF-8 string, or out-of-range index.
    InvalidArgument = 1,
    /// The configuration failed to parse or validate.
    BadConfig = 2,
    /// The simulation itself failed.
    RuntimeError = 3,
    /// A panic was caught at the boundary.
    Panic = 4,
}

/// One completed round, in play order.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CgRound {
    /// Alice's cut point in [0, 1].
    pub cut: f64,
    /// 0 if Bob took the left piece, 1 if the right.
    pub choice: i32,
    pub u_alice: f64,
    pub u_bob: f64,
}

/// Opaque handle to a finished run.
pub struct CgRun {
    done: CompletedRun,
    summary: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_for(err: &RunnerError) -> CgStatus {
    match err.exit_code() {
        2 => CgStatus::BadConfig,
        _ => CgStatus::RuntimeError,
    }
}

fn guarded<F: FnOnce() -> CgStatus>(f: F) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&msg);
            CgStatus::Panic
        }
    }
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `config_json` (the same schema the CLI's `run` command reads),
/// plays the configured game in memory, and returns a handle through
/// `out_run`. No files are written. The handle must be released with
/// `cg_run_free`.
///
/// # Safety
/// `config_json` must point to a NUL-terminated string and `out_run` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cg_run_config_json(
    config_json: *const c_char,
    out_run: *mut *mut CgRun,
) -> CgStatus {
    guarded(|| {
        if config_json.is_null() || out_run.is_null() {
            set_error("null pointer argument");
            return CgStatus::InvalidArgument;
        }
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config_json is not valid UTF-8");
                return CgStatus::InvalidArgument;
            }
        };
        let cfg: RunConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(&format!("cannot parse config: {e}"));
                return CgStatus::BadConfig;
            }
        };
        let done = match run_once(&cfg) {
            Ok(d) => d,
            Err(e) => {
                let status = status_for(&e);
                set_error(&e.to_string());
                return status;
            }
        };
        let h = &done.history;
        let t = h.len() as f64;
        let summary = serde_json::json!({
            "T": h.len(),
            "total_u_alice": h.total_alice(),
            "total_u_bob": h.total_bob(),
            "avg_u_alice": h.total_alice() / t,
            "avg_u_bob": h.total_bob() / t,
            "stackelberg_regret": stackelberg_regret(h, &cfg.v_alice, &cfg.v_bob),
            "bob_regret": bob_regret(h, &cfg.v_bob),
        });
        let summary = CString::new(summary.to_string()).unwrap_or_default();
        let run = Box::new(CgRun { done, summary });
        unsafe { *out_run = Box::into_raw(run) };
        CgStatus::Ok
    })
}

/// Number of completed rounds in the run.
///
/// # Safety
/// `run` must be a live handle from `cg_run_config_json`.
#[no_mangle]
pub unsafe extern "C" fn cg_run_rounds(run: *const CgRun) -> usize {
    if run.is_null() {
        return 0;
    }
    unsafe { &*run }.done.history.len()
}

/// Copies round `index` (0-based) into `out_round`.
///
/// # Safety
/// `run` must be a live handle and `out_round` writable.
#[no_mangle]
pub unsafe extern "C" fn cg_run_round(
    run: *const CgRun,
    index: usize,
    out_round: *mut CgRound,
) -> CgStatus {
    guarded(|| {
        if run.is_null() || out_round.is_null() {
            set_error("null pointer argument");
            return CgStatus::InvalidArgument;
        }
        let h = &unsafe { &*run }.done.history;
        if index >= h.len() {
            set_error(&format!("round {index} out of range (T = {})", h.len()));
            return CgStatus::InvalidArgument;
        }
        unsafe {
            *out_round = CgRound {
                cut: h.cuts[index],
                choice: match h.choices[index] {
                    Choice::L => 0,
                    Choice::R => 1,
                },
                u_alice: h.alice_payoffs[index],
                u_bob: h.bob_payoffs[index],
            };
        }
        CgStatus::Ok
    })
}

/// Totals and regrets as a JSON string owned by the run handle; the
/// pointer stays valid until `cg_run_free`.
///
/// # Safety
/// `run` must be a live handle from `cg_run_config_json`.
#[no_mangle]
pub unsafe extern "C" fn cg_run_summary_json(run: *const CgRun) -> *const c_char {
    if run.is_null() {
        return ptr::null();
    }
    unsafe { &*run }.summary.as_ptr()
}

/// Releases a run handle. Passing null is a no-op.
///
/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_run_free(run: *mut CgRun) {
    if !run.is_null() {
        drop(unsafe { Box::from_raw(run) });
    }
}
