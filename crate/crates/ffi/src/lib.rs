//! C interface to the `wqcm` engine.
//!
//! Structures are opaque handles. Every fallible call returns a
//! [`WqcmStatus`]; on error, [`wqcm_last_error_message`] describes the
//! failure on the calling thread. Strings returned by the library are
//! released with [`wqcm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wqcm::catalog;
use wqcm::classify::Tolerances;
use wqcm::expr::load_structure_def;
use wqcm::structure::WeakAcm;
use wqcm::suites::{
    emit_report, run_all_suites, run_curvature_suite, run_identity_suite, run_theorem_suite,
    run_validate_suite, ReportFormat, SamplePlan, Strategy,
};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WqcmStatus {
    Ok = 0,
    /// The report was produced and at least one asserted check failed.
    CheckFailed = 1,
    InvalidInput = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    EvalError = 5,
    Panic = 6,
}

/// Opaque structure handle.
pub struct WqcmStructure {
    acm: WeakAcm,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: WqcmStatus, msg: impl Into<String>) -> WqcmStatus {
    set_error(msg);
    status
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, WqcmStatus> {
    if p.is_null() {
        return Err(fail(WqcmStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(WqcmStatus::InvalidUtf8, e.to_string()))
}

fn guarded(f: impl FnOnce() -> WqcmStatus) -> WqcmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(WqcmStatus::Panic, "internal panic"),
    }
}

unsafe fn store(out: *mut *mut WqcmStructure, acm: WeakAcm) {
    *out = Box::into_raw(Box::new(WqcmStructure { acm }));
}

/// Parse a structure document (JSON text).
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqcm_structure_from_json(
    json: *const c_char,
    out: *mut *mut WqcmStructure,
) -> WqcmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(WqcmStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_structure_def(text.as_bytes()) {
            Ok(def) => {
                store(out, WeakAcm::new(def));
                WqcmStatus::Ok
            }
            Err(e) => fail(WqcmStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Build a catalog structure from a key such as `sasakian-r3` or
/// `builtin:scaled?s=2`.
///
/// # Safety
/// `key` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqcm_structure_from_builtin(
    key: *const c_char,
    out: *mut *mut WqcmStructure,
) -> WqcmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(WqcmStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let key = match read_str(key) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match catalog::catalog(key) {
            Ok(def) => {
                store(out, WeakAcm::new(def));
                WqcmStatus::Ok
            }
            Err(e) => fail(WqcmStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `s` must come from a constructor above and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wqcm_structure_free(s: *mut WqcmStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Chart dimension `2n + 1`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqcm_structure_dim(s: *const WqcmStructure, out: *mut usize) -> WqcmStatus {
    guarded(|| {
        if s.is_null() || out.is_null() {
            return fail(WqcmStatus::NullPointer, "null argument");
        }
        *out = (*s).acm.dim();
        WqcmStatus::Ok
    })
}

/// Run a suite (`validate`, `identity`, `curvature`, `theorems` or `all`)
/// with default tolerances and write the JSON report, without timestamp, to
/// `report_json`. Returns `Ok` or `CheckFailed` when a report was produced.
///
/// # Safety
/// `s` must be a live handle, `suite` a nul-terminated string and
/// `report_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wqcm_run_check(
    s: *const WqcmStructure,
    suite: *const c_char,
    points: u32,
    seed: u64,
    report_json: *mut *mut c_char,
) -> WqcmStatus {
    guarded(|| {
        if s.is_null() || report_json.is_null() {
            return fail(WqcmStatus::NullPointer, "null argument");
        }
        *report_json = ptr::null_mut();
        let suite = match read_str(suite) {
            Ok(t) => t,
            Err(st) => return st,
        };
        let acm = &(*s).acm;
        let plan = SamplePlan {
            count: points as usize,
            seed,
            strategy: Strategy::Halton,
        };
        let tol = Tolerances::default();
        let report = match suite {
            "validate" => run_validate_suite(acm, &plan, &tol),
            "identity" => run_identity_suite(acm, &plan, &tol),
            "curvature" => run_curvature_suite(acm, &plan, &tol),
            "theorems" => run_theorem_suite(acm, &plan, &tol),
            "all" => run_all_suites(acm, &plan, &tol),
            other => return fail(WqcmStatus::InvalidInput, format!("unknown suite {other:?}")),
        };
        let report = match report {
            Ok(r) => r,
            Err(e) => return fail(WqcmStatus::EvalError, e.to_string()),
        };
        let bytes = emit_report(&report, ReportFormat::Json);
        let c = CString::new(bytes).expect("JSON has no nul bytes");
        *report_json = c.into_raw();
        if report.failed() {
            WqcmStatus::CheckFailed
        } else {
            WqcmStatus::Ok
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wqcm_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Message for the last error on this thread, or null. Valid until the next
/// call into the library on the same thread.
#[no_mangle]
pub extern "C" fn wqcm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
