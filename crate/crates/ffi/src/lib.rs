//! C interface to rigidlab.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every call returns an [`RlStatus`]; on failure
//! `rl_last_error` describes the problem until the next call on the same thread.
//! Strings returned through `char **` must be released with `rl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rigidlab::cli::{self, CliError, ExperimentConfig};
use rigidlab::dynamics::{lyapunov_with, LyapunovMethod, WordSource};
use rigidlab::subres::{self, MapDocument, SubresonantMap};
use rigidlab::walk::{WalkJson, WalkMeasure};

/// Result of an FFI call. The numeric failure classes match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    Numeric = 1,
    Schema = 2,
    Budget = 3,
    /// Null pointer, bad UTF-8 or a buffer that is too small.
    InvalidArgument = 4,
    Panic = 5,
}

/// A validated subresonant map.
pub struct RlMap(SubresonantMap);

/// A finitely supported random walk on generators.
pub struct RlWalk(WalkMeasure);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(RlStatus, String);

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e.exit_code() {
            2 => RlStatus::Schema,
            3 => RlStatus::Budget,
            _ => RlStatus::Numeric,
        };
        Failure(status, e.to_string())
    }
}

impl From<subres::SubresError> for Failure {
    fn from(e: subres::SubresError) -> Self {
        CliError::from(e).into()
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(RlStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid("null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid("null handle"))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("null output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("null output pointer"));
    }
    *out = CString::new(s).map_err(|_| invalid("output contains a nul byte"))?.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a map document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_from_json(json: *const c_char, strict: bool, out: *mut *mut RlMap) -> RlStatus {
    guard(|| {
        let doc: MapDocument = cli::parse_json(text(json)?, "map")?;
        emit(out, RlMap(subres::validate(doc.to_map()?, strict)?))
    })
}

/// # Safety
/// `map` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rl_map_free(map: *mut RlMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Map document of `map` as pretty JSON.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_to_json(map: *const RlMap, out: *mut *mut c_char) -> RlStatus {
    guard(|| emit_string(out, subres::map_to_json(deref(map)?.0.map())))
}

/// Writes whether `map` is strictly subresonant.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_is_strict(map: *const RlMap, out: *mut bool) -> RlStatus {
    guard(|| {
        let strict = deref(map)?.0.is_strict();
        out.as_mut().map(|o| *o = strict).ok_or_else(|| invalid("null output pointer"))
    })
}

/// `f ∘ g`.
///
/// # Safety
/// `f` and `g` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_compose(f: *const RlMap, g: *const RlMap, out: *mut *mut RlMap) -> RlStatus {
    guard(|| emit(out, RlMap(subres::compose(&deref(f)?.0, &deref(g)?.0)?)))
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_invert(f: *const RlMap, out: *mut *mut RlMap) -> RlStatus {
    guard(|| emit(out, RlMap(subres::invert(&deref(f)?.0)?)))
}

/// Linearization as CSV: a header of basis monomials, then one row per monomial
/// with exact rational entries.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_map_linearize_csv(f: *const RlMap, affine: bool, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let l = subres::linearize(&deref(f)?.0, affine)?;
        emit_string(out, cli::run::linearization_csv(&l))
    })
}

/// Parses a walk `{"atoms":[{"system":{...},"p":"1/2"}, ...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_walk_from_json(json: *const c_char, out: *mut *mut RlWalk) -> RlStatus {
    guard(|| {
        let j: WalkJson = cli::parse_json(text(json)?, "walk")?;
        let m = WalkMeasure::try_from(j).map_err(CliError::from)?;
        emit(out, RlWalk(m))
    })
}

/// # Safety
/// `walk` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rl_walk_free(walk: *mut RlWalk) {
    if !walk.is_null() {
        drop(Box::from_raw(walk));
    }
}

/// Dimension of the space the walk acts on.
///
/// # Safety
/// `walk` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_walk_dim(walk: *const RlWalk, out: *mut usize) -> RlStatus {
    guard(|| {
        let d = deref(walk)?.0.dim();
        out.as_mut().map(|o| *o = d).ok_or_else(|| invalid("null output pointer"))
    })
}

/// How Lyapunov spectra are accumulated.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlMethod {
    /// Exact integer products for toral automorphisms, float QR otherwise.
    Auto = 0,
    Qr = 1,
    Exact = 2,
}

/// Lyapunov spectrum along `n` counted steps after `transient` warm-up steps,
/// written descending into `exponents[0..dim]`.
///
/// # Safety
/// `q0` must point to `dim` doubles and `exponents` to `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rl_lyapunov(
    walk: *const RlWalk,
    q0: *const f64,
    dim: usize,
    transient: usize,
    n: usize,
    seed: u64,
    method: RlMethod,
    exponents: *mut f64,
) -> RlStatus {
    guard(|| {
        let w = &deref(walk)?.0;
        if q0.is_null() || exponents.is_null() {
            return Err(invalid("null array"));
        }
        if dim != w.dim() {
            return Err(invalid(format!("walk acts in dimension {}, got {dim}", w.dim())));
        }
        let q = std::slice::from_raw_parts(q0, dim);
        let method = match method {
            RlMethod::Auto => LyapunovMethod::Auto,
            RlMethod::Qr => LyapunovMethod::Qr,
            RlMethod::Exact => LyapunovMethod::Exact,
        };
        let r = lyapunov_with(method, WordSource::Walk(w), q, transient, n, seed).map_err(CliError::from)?;
        std::slice::from_raw_parts_mut(exponents, dim).copy_from_slice(&r.exponents);
        Ok(())
    })
}

/// Runs a full experiment config in memory and returns its CSV (or JSON) payload.
/// Nothing is written to disk.
///
/// # Safety
/// `config_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_run_config(config_json: *const c_char, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let config: ExperimentConfig = cli::parse_json(text(config_json)?, "config")?;
        let artifact = cli::execute(&config)?;
        let payload = String::from_utf8(artifact.payload).map_err(|_| invalid("payload is not UTF-8"))?;
        emit_string(out, payload)
    })
}
