//! C ABI for the classprod engines.
//!
//! Groups and class tuples live behind opaque handles created and freed by
//! this library. Every fallible function returns a [`CpStatus`]; on failure
//! the message is available from [`cp_last_error`] on the same thread.
//! Panics never cross the boundary and are reported as
//! [`CpStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use classprod::burnside::{n_count, ClassTuple};
use classprod::classes::{GroupSpec, Kind};
use classprod::decide::{decide, decide_p};
use classprod::Error;

/// Status codes. Values 2 and 3 match the CLI exit codes for bad input and
/// capacity limits.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Capacity = 3,
    Internal = 4,
    /// The result does not fit the requested integer type.
    Overflow = 5,
    InvalidUtf8 = 6,
}

/// A group such as GL(3,q) or PSU(3,q²).
pub struct CpGroup {
    spec: GroupSpec,
}

/// A tuple of conjugacy classes of one group.
pub struct CpTuple {
    tuple: ClassTuple,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> CpStatus {
    set_error(e.to_string());
    match e.exit_code() {
        2 => CpStatus::InvalidInput,
        3 => CpStatus::Capacity,
        _ => CpStatus::Internal,
    }
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> CpStatus) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            CpStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, CpStatus> {
    if p.is_null() {
        set_error("null string");
        return Err(CpStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        CpStatus::InvalidUtf8
    })
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!(stringify!($p), " is null"));
            return CpStatus::NullPointer;
        })+
    };
}

/// Message for the last failure on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a group name such as `"GL3:4"` or `"PSU3:5"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_group_new(name: *const c_char, out: *mut *mut CpGroup) -> CpStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let name = try_status!(read_str(name));
        let spec: GroupSpec = try_status!(name.parse().map_err(|e: Error| status_of(&e)));
        *out = Box::into_raw(Box::new(CpGroup { spec }));
        CpStatus::Ok
    })
}

/// # Safety
/// `g` must come from [`cp_group_new`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cp_group_free(g: *mut CpGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Group order as a decimal string, to be released with [`cp_string_free`].
///
/// # Safety
/// `g` must be a live group handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_group_order(g: *const CpGroup, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        non_null!(g, out);
        let s = classprod::classes::group_order(&(*g).spec).to_string();
        *out = CString::new(s).unwrap().into_raw();
        CpStatus::Ok
    })
}

/// Parses a comma-separated class list such as `"C7[1,1],C7[1,1],C2[0]"`.
///
/// # Safety
/// `g` must be a live group handle, `labels` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_tuple_new(
    g: *const CpGroup,
    labels: *const c_char,
    out: *mut *mut CpTuple,
) -> CpStatus {
    guard(|| {
        non_null!(g, out);
        *out = ptr::null_mut();
        let labels = try_status!(read_str(labels));
        let tuple = try_status!(ClassTuple::parse(&(*g).spec, labels).map_err(|e| status_of(&e)));
        *out = Box::into_raw(Box::new(CpTuple { tuple }));
        CpStatus::Ok
    })
}

/// # Safety
/// `t` must come from [`cp_tuple_new`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cp_tuple_free(t: *mut CpTuple) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of classes in the tuple, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live tuple handle.
#[no_mangle]
pub unsafe extern "C" fn cp_tuple_len(t: *const CpTuple) -> usize {
    t.as_ref().map_or(0, |t| t.tuple.len())
}

/// The structure constant N as a decimal string, to be released with
/// [`cp_string_free`].
///
/// # Safety
/// `t` must be a live tuple handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_n_count(t: *const CpTuple, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        non_null!(t, out);
        *out = ptr::null_mut();
        let (n, _) = try_status!(n_count(&(*t).tuple).map_err(|e| status_of(&e)));
        *out = CString::new(n.to_string()).unwrap().into_raw();
        CpStatus::Ok
    })
}

/// The structure constant N when it fits in 64 bits.
///
/// # Safety
/// `t` must be a live tuple handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_n_count_u64(t: *const CpTuple, out: *mut u64) -> CpStatus {
    guard(|| {
        non_null!(t, out);
        let (n, _) = try_status!(n_count(&(*t).tuple).map_err(|e| status_of(&e)));
        match u64::try_from(&n) {
            Ok(v) => {
                *out = v;
                CpStatus::Ok
            }
            Err(_) => {
                set_error(format!("N = {n} does not fit in 64 bits"));
                CpStatus::Overflow
            }
        }
    })
}

/// Whether the identity lies in the product of the classes. Writes 1 or 0.
///
/// # Safety
/// `t` must be a live tuple handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_decide(t: *const CpTuple, out: *mut i32) -> CpStatus {
    guard(|| {
        non_null!(t, out);
        let tuple = &(*t).tuple;
        let d = if tuple.spec.kind() == Kind::P {
            decide_p(tuple)
        } else {
            decide(tuple)
        };
        let d = try_status!(d.map_err(|e| status_of(&e)));
        *out = d.contains_identity as i32;
        CpStatus::Ok
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
