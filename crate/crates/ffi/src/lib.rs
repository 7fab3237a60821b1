//! C ABI over the `qstream` solvers.
//!
//! Classes are opaque handles built from the same JSON the CLI reads and
//! released with the matching `_free`. Every fallible call returns a
//! [`QsStatus`]; on failure [`qs_last_error`] describes the cause for the
//! calling thread. Strings handed out by the library must be released with
//! [`qs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qstream::arena::{exact_blind_error, run_uniform_sampler};
use qstream::blind::{bld, bp_soa_strategy, game_value, qld_value, worst_case_mistakes};
use qstream::littlestone::littlestone_dimension;
use qstream::{ConceptClass, Error, PatternClass, PiecewiseStream, QueryBudgetPolicy};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not UTF-8.
    Utf8 = 2,
    /// Malformed JSON or a value that fails validation.
    InvalidInput = 3,
    /// The input is not realizable by the class.
    NotRealizable = 4,
    /// A query placement or strategy exceeds the budget.
    BudgetExceeded = 5,
    /// The class has too small a Littlestone dimension for the request.
    ClassTooShallow = 6,
    /// A bug inside the library; the message carries the panic text.
    Internal = 7,
}

/// A validated concept class.
pub struct QsConceptClass(ConceptClass);

/// A validated finite-horizon pattern class.
pub struct QsPatternClass(PatternClass);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::NotRealizable(_) => QsStatus::NotRealizable,
        Error::BudgetExceeded(_) => QsStatus::BudgetExceeded,
        Error::ClassTooShallow { .. } => QsStatus::ClassTooShallow,
        _ => QsStatus::InvalidInput,
    }
}

struct Fail(QsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            QsStatus::Internal
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(QsStatus::NullArgument, format!("{name} is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(QsStatus::Utf8, format!("{name}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn qs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a concept class.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_concept_class_from_json(
    json: *const c_char,
    out: *mut *mut QsConceptClass,
) -> QsStatus {
    guard(|| {
        let h = ConceptClass::from_json(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(QsConceptClass(h))), "out")
    })
}

/// # Safety
/// `h` must come from [`qs_concept_class_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qs_concept_class_free(h: *mut QsConceptClass) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses and validates a pattern class.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_pattern_class_from_json(
    json: *const c_char,
    out: *mut *mut QsPatternClass,
) -> QsStatus {
    guard(|| {
        let p = PatternClass::from_json(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(QsPatternClass(p))), "out")
    })
}

/// # Safety
/// `p` must come from [`qs_pattern_class_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qs_pattern_class_free(p: *mut QsPatternClass) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_littlestone_dimension(
    h: *const QsConceptClass,
    out: *mut u32,
) -> QsStatus {
    guard(|| {
        let d = littlestone_dimension(&handle(h, "h")?.0)?;
        put(out, d, "out")
    })
}

/// Blind learning dimension. `witness`, when non-null, receives the optimal
/// prediction vector as a string of `0`/`1`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_blind_learning_dimension(
    p: *const QsPatternClass,
    out: *mut u32,
    witness: *mut *mut c_char,
) -> QsStatus {
    guard(|| {
        let w = bld(&handle(p, "p")?.0)?;
        put(out, w.value, "out")?;
        if !witness.is_null() {
            witness.write(owned_string(w.witness.to_string()));
        }
        Ok(())
    })
}

/// Query learning distance with budget `q`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_qld(p: *const QsPatternClass, q: u32, out: *mut u32) -> QsStatus {
    guard(|| {
        let v = qld_value(&handle(p, "p")?.0, q)?;
        put(out, v, "out")
    })
}

/// Minimax value of the blind prediction game with budget `q`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_game_value(
    p: *const QsPatternClass,
    q: u32,
    out: *mut u32,
) -> QsStatus {
    guard(|| {
        let v = game_value(&handle(p, "p")?.0, q)?;
        put(out, v, "out")
    })
}

/// Worst-case mistakes of the BP-SOA strategy over every pattern in `p`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_bp_soa_worst_case(
    p: *const QsPatternClass,
    q: u32,
    out: *mut u32,
) -> QsStatus {
    guard(|| {
        let p = &handle(p, "p")?.0;
        let s = bp_soa_strategy(p, q)?;
        put(out, worst_case_mistakes(&s, p, q)?, "out")
    })
}

/// Exact expected blind error of a query placement against the two-point
/// stream with `units` unit intervals and budget slope `slope_num/slope_den`.
/// `exact` receives the value as `"p/q"` (or an integer), `approx` its
/// nearest double.
///
/// # Safety
/// `times` must point to `n_times` doubles (it may be null when `n_times`
/// is 0); `exact` and `approx` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_exact_blind_error(
    units: u64,
    slope_num: u64,
    slope_den: u64,
    times: *const f64,
    n_times: usize,
    exact: *mut *mut c_char,
    approx: *mut f64,
) -> QsStatus {
    guard(|| {
        let times: &[f64] = match (times.is_null(), n_times) {
            (_, 0) => &[],
            (true, _) => return Err(null("times")),
            (false, n) => std::slice::from_raw_parts(times, n),
        };
        let budget = QueryBudgetPolicy::new(slope_num, slope_den)?;
        let v = exact_blind_error(units, &budget, times)?;
        if exact.is_null() {
            return Err(null("exact"));
        }
        put(approx, num_to_f64(&v), "approx")?;
        exact.write(owned_string(v.to_string()));
        Ok(())
    })
}

fn num_to_f64(v: &num_rational::BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

/// One seeded run of the uniform sampler with SOA. `report` receives the
/// run report as JSON.
///
/// # Safety
/// `h` must be a live handle; `stream_json` a nul-terminated string;
/// `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_run_uniform_sampler(
    h: *const QsConceptClass,
    stream_json: *const c_char,
    delta: f64,
    seed: u64,
    report: *mut *mut c_char,
) -> QsStatus {
    guard(|| {
        let h = &handle(h, "h")?.0;
        let stream = PiecewiseStream::from_json(text(stream_json, "stream_json")?)?;
        let r = run_uniform_sampler(h, &stream, delta, seed)?;
        let json = serde_json::to_string(&r).map_err(Error::from)?;
        put(report, owned_string(json), "report")
    })
}
