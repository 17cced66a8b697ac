//! C ABI over the higher-commutator kernel.
//!
//! Handles are opaque pointers owned by this library: everything returned
//! through an out-parameter must be released with the matching `_free`
//! function. Every entry point returns a status code; out-parameters are
//! written only on `Ok`, and a human-readable message for the most recent
//! failure on the current thread is available from `hicomm_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hicomm::algebra::con;
use hicomm::commutator::{build_delta, hyper_commutator, tc_commutator};
use hicomm::corpus;
use hicomm::error::Error;
use hicomm::limits::{Limits, DEFAULT_MAX_CUBES};
use hicomm::partition::Partition;
use hicomm::FiniteAlgebra;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HicommStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Malformed input text.
    ParseError = 2,
    /// Well-formed input that violates a precondition.
    InvalidArgument = 3,
    /// The cube budget or time limit was exhausted, or an internal cap hit.
    BudgetExceeded = 4,
    /// The caller's output buffer is too small (the needed size was reported).
    BufferTooSmall = 5,
    /// A defect in this library, never bad input.
    InternalError = 6,
}

/// Opaque handle: a finite algebra (universe size plus operation tables).
pub struct HicommAlgebra(FiniteAlgebra);

/// Opaque handle: a partition of the algebra's universe.
pub struct HicommPartition(Partition);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HicommStatus, message: &str) -> HicommStatus {
    let cleaned: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
    status
}

fn fail_error(e: &Error) -> HicommStatus {
    let status = match e {
        Error::Parse(_) => HicommStatus::ParseError,
        Error::Invalid(_) => HicommStatus::InvalidArgument,
        Error::Budget { .. } | Error::Timeout(_) | Error::Cap { .. } => {
            HicommStatus::BudgetExceeded
        }
        Error::Internal(_) | Error::Io(_) => HicommStatus::InternalError,
    };
    fail(status, &e.to_string())
}

/// Run a body with panics converted to InternalError (unwinding across the
/// C boundary is undefined behavior).
fn guard(body: impl FnOnce() -> HicommStatus) -> HicommStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(HicommStatus::InternalError, "internal panic"),
    }
}

/// Read a required C string argument.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, HicommStatus> {
    if ptr.is_null() {
        return Err(fail(HicommStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(HicommStatus::ParseError, "string argument is not valid UTF-8"))
}

fn limits_from(max_cubes: u64, time_limit_ms: u64) -> Limits {
    Limits {
        max_cubes: if max_cubes == 0 { DEFAULT_MAX_CUBES } else { max_cubes as usize },
        deadline: if time_limit_ms == 0 {
            None
        } else {
            Some(Instant::now() + Duration::from_millis(time_limit_ms))
        },
    }
}

/// Collect a non-empty array of partition handles into owned partitions.
///
/// # Safety
/// `thetas` must point to `count` valid handle pointers (checked for null).
unsafe fn read_thetas(
    thetas: *const *const HicommPartition,
    count: usize,
) -> Result<Vec<Partition>, HicommStatus> {
    if thetas.is_null() {
        return Err(fail(HicommStatus::NullArgument, "null partition array"));
    }
    if count == 0 {
        return Err(fail(HicommStatus::InvalidArgument, "empty partition array"));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let p = *thetas.add(i);
        if p.is_null() {
            return Err(fail(HicommStatus::NullArgument, "null partition in array"));
        }
        out.push((*p).0.clone());
    }
    Ok(out)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hicomm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on the calling thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hicomm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse an algebra from its text format (`algebra <name>` / `size <k>` /
/// `op <name> <arity>` followed by the operation table).
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_algebra_parse(
    text: *const c_char,
    out: *mut *mut HicommAlgebra,
) -> HicommStatus {
    guard(|| {
        if out.is_null() {
            return fail(HicommStatus::NullArgument, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match FiniteAlgebra::parse(text) {
            Ok(alg) => {
                *out = Box::into_raw(Box::new(HicommAlgebra(alg)));
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Look up a built-in corpus algebra by name.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_algebra_corpus(
    name: *const c_char,
    out: *mut *mut HicommAlgebra,
) -> HicommStatus {
    guard(|| {
        if out.is_null() {
            return fail(HicommStatus::NullArgument, "null output pointer");
        }
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match corpus::algebra(name) {
            Ok(alg) => {
                *out = Box::into_raw(Box::new(HicommAlgebra(alg)));
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Universe size, or -1 for a null handle.
///
/// # Safety
/// `alg` must be null or a live algebra handle.
#[no_mangle]
pub unsafe extern "C" fn hicomm_algebra_size(alg: *const HicommAlgebra) -> c_int {
    if alg.is_null() {
        return -1;
    }
    (*alg).0.size as c_int
}

/// Release an algebra handle (null is a no-op).
///
/// # Safety
/// `alg` must be null or a handle this library returned, freed once.
#[no_mangle]
pub unsafe extern "C" fn hicomm_algebra_free(alg: *mut HicommAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Number of congruences of the algebra.
///
/// # Safety
/// `alg` must be a live algebra handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_congruence_count(
    alg: *const HicommAlgebra,
    out: *mut usize,
) -> HicommStatus {
    guard(|| {
        if alg.is_null() || out.is_null() {
            return fail(HicommStatus::NullArgument, "null argument");
        }
        match con(&(*alg).0) {
            Ok(cons) => {
                *out = cons.len();
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Fetch one congruence by index (0-based, ordered as enumerated).
///
/// # Safety
/// `alg` must be a live algebra handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_congruence_get(
    alg: *const HicommAlgebra,
    index: usize,
    out: *mut *mut HicommPartition,
) -> HicommStatus {
    guard(|| {
        if alg.is_null() || out.is_null() {
            return fail(HicommStatus::NullArgument, "null argument");
        }
        let cons = match con(&(*alg).0) {
            Ok(c) => c,
            Err(e) => return fail_error(&e),
        };
        match cons.into_iter().nth(index) {
            Some(p) => {
                *out = Box::into_raw(Box::new(HicommPartition(p)));
                HicommStatus::Ok
            }
            None => fail(HicommStatus::InvalidArgument, "congruence index out of range"),
        }
    })
}

/// Parse a partition literal such as `0 2|1 3` over a universe of `size`
/// elements.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_partition_parse(
    text: *const c_char,
    size: usize,
    out: *mut *mut HicommPartition,
) -> HicommStatus {
    guard(|| {
        if out.is_null() {
            return fail(HicommStatus::NullArgument, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Partition::parse(text, size) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(HicommPartition(p)));
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Write the partition's class literal (`0 2|1 3` style) into `buf` as a
/// NUL-terminated string. `*needed` always receives the required size
/// including the terminator; BufferTooSmall is returned when `cap` is short.
///
/// # Safety
/// `p` must be a live partition handle; `buf` must point to `cap` writable
/// bytes; `needed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_partition_format(
    p: *const HicommPartition,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> HicommStatus {
    guard(|| {
        if p.is_null() || needed.is_null() {
            return fail(HicommStatus::NullArgument, "null argument");
        }
        let text = (*p).0.to_string();
        *needed = text.len() + 1;
        if buf.is_null() || cap < text.len() + 1 {
            return fail(HicommStatus::BufferTooSmall, "output buffer too small");
        }
        std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
        *buf.add(text.len()) = 0;
        HicommStatus::Ok
    })
}

/// 1 if the partitions are equal, 0 if not, -1 on a null handle.
///
/// # Safety
/// Both arguments must be null or live partition handles.
#[no_mangle]
pub unsafe extern "C" fn hicomm_partition_equals(
    a: *const HicommPartition,
    b: *const HicommPartition,
) -> c_int {
    if a.is_null() || b.is_null() {
        return -1;
    }
    ((*a).0 == (*b).0) as c_int
}

/// 1 if every class of `a` lies inside a class of `b` (refinement order),
/// 0 if not, -1 on a null handle.
///
/// # Safety
/// Both arguments must be null or live partition handles.
#[no_mangle]
pub unsafe extern "C" fn hicomm_partition_leq(
    a: *const HicommPartition,
    b: *const HicommPartition,
) -> c_int {
    if a.is_null() || b.is_null() {
        return -1;
    }
    (*a).0.leq(&(*b).0) as c_int
}

/// Release a partition handle (null is a no-op).
///
/// # Safety
/// `p` must be null or a handle this library returned, freed once.
#[no_mangle]
pub unsafe extern "C" fn hicomm_partition_free(p: *mut HicommPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Term-condition commutator of `count` congruences in the given direction.
/// `max_cubes` and `time_limit_ms` of 0 mean the defaults (16M cubes, no
/// deadline).
///
/// # Safety
/// `alg` must be a live algebra handle, `thetas` an array of `count` live
/// partition handles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hicomm_tc_commutator(
    alg: *const HicommAlgebra,
    thetas: *const *const HicommPartition,
    count: usize,
    direction: usize,
    max_cubes: u64,
    time_limit_ms: u64,
    out: *mut *mut HicommPartition,
) -> HicommStatus {
    guard(|| {
        if alg.is_null() || out.is_null() {
            return fail(HicommStatus::NullArgument, "null argument");
        }
        let tuple = match read_thetas(thetas, count) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let limits = limits_from(max_cubes, time_limit_ms);
        match tc_commutator(&(*alg).0, &tuple, direction, &limits) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(HicommPartition(p)));
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Relational commutator of `count` congruences in the given direction.
/// Limits as in hicomm_tc_commutator.
///
/// # Safety
/// As for hicomm_tc_commutator.
#[no_mangle]
pub unsafe extern "C" fn hicomm_hyper_commutator(
    alg: *const HicommAlgebra,
    thetas: *const *const HicommPartition,
    count: usize,
    direction: usize,
    max_cubes: u64,
    time_limit_ms: u64,
    out: *mut *mut HicommPartition,
) -> HicommStatus {
    guard(|| {
        if alg.is_null() || out.is_null() {
            return fail(HicommStatus::NullArgument, "null argument");
        }
        let tuple = match read_thetas(thetas, count) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let limits = limits_from(max_cubes, time_limit_ms);
        match hyper_commutator(&(*alg).0, &tuple, direction, &limits) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(HicommPartition(p)));
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Number of cubes in the directional-transitive closure of the matrix
/// tolerance of `count` congruences. Limits as in hicomm_tc_commutator.
///
/// # Safety
/// As for hicomm_tc_commutator, with `out` receiving the count.
#[no_mangle]
pub unsafe extern "C" fn hicomm_delta_size(
    alg: *const HicommAlgebra,
    thetas: *const *const HicommPartition,
    count: usize,
    max_cubes: u64,
    time_limit_ms: u64,
    out: *mut u64,
) -> HicommStatus {
    guard(|| {
        if alg.is_null() || out.is_null() {
            return fail(HicommStatus::NullArgument, "null argument");
        }
        let tuple = match read_thetas(thetas, count) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let limits = limits_from(max_cubes, time_limit_ms);
        match build_delta(&(*alg).0, &tuple, &limits) {
            Ok(d) => {
                *out = d.len() as u64;
                HicommStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}
