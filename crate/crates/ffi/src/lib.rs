//! C bindings for torick.
//!
//! Models and cones are opaque handles created by `*_load` / `*_parse` and
//! released with the matching `*_free`. Every report function returns a
//! [`TorickStatus`] and, on success, writes a heap-allocated JSON string that
//! the caller releases with [`torick_string_free`]. After a failure,
//! [`torick_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use torick::io::{load_cone, load_model, parse_cone, parse_model};
use torick::model::FiberedModel;
use torick::report::{self, Outcome};
use torick::toric::Cone;
use torick::TorickError;

/// Result codes. The numeric values match the exit codes of the `torick` tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorickStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8 or an out-of-range argument.
    InvalidArgument = 1,
    /// Malformed or unreadable input.
    Schema = 2,
    /// A mathematical precondition failed.
    Precondition = 3,
    /// The report was produced but an internal cross-check disagreed.
    Mismatch = 4,
    Internal = 5,
}

/// Opaque fibered model.
pub struct TorickModel(FiberedModel);

/// Opaque rational polyhedral cone.
pub struct TorickCone(Cone);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).unwrap()));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(TorickStatus, String);

impl From<TorickError> for Failure {
    fn from(e: TorickError) -> Self {
        let status = if e.is_schema() { TorickStatus::Schema } else { TorickStatus::Precondition };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(TorickStatus::InvalidArgument, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<TorickStatus, Failure>) -> TorickStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            TorickStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(&format!("{name} is not valid UTF-8")))
}

unsafe fn model_arg<'a>(m: *const TorickModel) -> Result<&'a FiberedModel, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| invalid("model handle is null"))
}

unsafe fn cone_arg<'a>(c: *const TorickCone) -> Result<&'a Cone, Failure> {
    c.as_ref().map(|c| &c.0).ok_or_else(|| invalid("cone handle is null"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("reports contain no NUL bytes").into_raw()
}

unsafe fn emit(outcome: Outcome, out: *mut *mut c_char) -> Result<TorickStatus, Failure> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    let text = serde_json::to_string(&outcome.report).expect("report serializes");
    *out = into_c_string(text);
    if outcome.mismatch {
        set_error("cross-check mismatch");
        Ok(TorickStatus::Mismatch)
    } else {
        Ok(TorickStatus::Ok)
    }
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<TorickStatus, Failure> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(TorickStatus::Ok)
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn torick_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn torick_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn torick_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a model file; fan references resolve relative to the file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_model_load(path: *const c_char, out: *mut *mut TorickModel) -> TorickStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        store(out, TorickModel(load_model(Path::new(path))?))
    })
}

/// Parses a model from JSON text. `base_dir` may be null.
///
/// # Safety
/// `json` and a non-null `base_dir` must be NUL-terminated strings; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn torick_model_parse(
    json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut TorickModel,
) -> TorickStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let dir = if base_dir.is_null() { None } else { Some(Path::new(str_arg(base_dir, "base_dir")?)) };
        store(out, TorickModel(parse_model(text, dir)?))
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn torick_model_free(m: *mut TorickModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the total space, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn torick_model_dim(m: *const TorickModel) -> u32 {
    m.as_ref().map_or(0, |m| m.0.dim() as u32)
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_cone_load(path: *const c_char, out: *mut *mut TorickCone) -> TorickStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        store(out, TorickCone(load_cone(Path::new(path))?))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_cone_parse(json: *const c_char, out: *mut *mut TorickCone) -> TorickStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        store(out, TorickCone(parse_cone(text)?))
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn torick_cone_free(c: *mut TorickCone) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_volume(m: *const TorickModel, out: *mut *mut c_char) -> TorickStatus {
    guard(|| emit(report::volume(model_arg(m)?)?, out))
}

/// With `derivative_check`, also recomputes DF as a derivative and returns
/// `TORICK_STATUS_MISMATCH` (with the report) on disagreement.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_df(m: *const TorickModel, derivative_check: bool, out: *mut *mut c_char) -> TorickStatus {
    guard(|| emit(report::df(model_arg(m)?, derivative_check)?, out))
}

/// DF along `L + tE`. `direction` is `zero`, `canonical`, `ray:<i>` or a
/// comma-separated coefficient list. `out_csv` may be null.
///
/// # Safety
/// `m` must be a live handle, `direction` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn torick_path(
    m: *const TorickModel,
    direction: *const c_char,
    samples: usize,
    out: *mut *mut c_char,
    out_csv: *mut *mut c_char,
) -> TorickStatus {
    guard(|| {
        let m = model_arg(m)?;
        let direction = str_arg(direction, "direction")?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let (outcome, csv) = report::path(m, direction, samples)?;
        if !out_csv.is_null() {
            *out_csv = into_c_string(csv);
        }
        emit(outcome, out)
    })
}

/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_multiplicities(m: *const TorickModel, out: *mut *mut c_char) -> TorickStatus {
    guard(|| emit(report::multiplicities(model_arg(m)?)?, out))
}

/// Returns `TORICK_STATUS_MISMATCH` (with the report) if any refinement changes V or DF.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_pullback_check(
    m: *const TorickModel,
    trials: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> TorickStatus {
    guard(|| emit(report::pullback_check(model_arg(m)?, trials, seed, false)?, out))
}

/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_classify(c: *const TorickCone, out: *mut *mut c_char) -> TorickStatus {
    guard(|| emit(report::classify_cone(cone_arg(c)?)?, out))
}

/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torick_search(c: *const TorickCone, bound: u32, out: *mut *mut c_char) -> TorickStatus {
    guard(|| {
        if bound == 0 {
            return Err(invalid("bound must be positive"));
        }
        emit(report::search(cone_arg(c)?, bound)?, out)
    })
}

/// Seed used by `torick pullback-check` when none is given.
#[no_mangle]
pub extern "C" fn torick_default_seed() -> u64 {
    report::DEFAULT_SEED
}
