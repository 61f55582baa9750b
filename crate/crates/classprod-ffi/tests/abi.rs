use std::ffi::{CStr, CString};
use std::ptr;

use classprod_ffi::*;

fn group(name: &str) -> *mut CpGroup {
    let name = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cp_group_new(name.as_ptr(), &mut g) }, CpStatus::Ok);
    g
}

fn tuple(g: *const CpGroup, labels: &str) -> Result<*mut CpTuple, CpStatus> {
    let labels = CString::new(labels).unwrap();
    let mut t = ptr::null_mut();
    match unsafe { cp_tuple_new(g, labels.as_ptr(), &mut t) } {
        CpStatus::Ok => Ok(t),
        s => {
            assert!(t.is_null());
            Err(s)
        }
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cp_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn count_and_decide() {
    let g = group("GL3:2");
    let t = tuple(g, "C7[1,1],C7[1,1],C2[0]").unwrap();
    assert_eq!(unsafe { cp_tuple_len(t) }, 3);

    let mut n = 0u64;
    assert_eq!(unsafe { cp_n_count_u64(t, &mut n) }, CpStatus::Ok);
    assert_eq!(n, 336);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cp_n_count(t, &mut s) }, CpStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "336");
    unsafe { cp_string_free(s) };

    let mut yes = -1;
    assert_eq!(unsafe { cp_decide(t, &mut yes) }, CpStatus::Ok);
    assert_eq!(yes, 1);

    let mut order = ptr::null_mut();
    assert_eq!(unsafe { cp_group_order(g, &mut order) }, CpStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(order) }.to_str().unwrap(), "168");
    unsafe {
        cp_string_free(order);
        cp_tuple_free(t);
        cp_group_free(g);
    }
}

#[test]
fn projective_decision() {
    let g = group("PSU3:5");
    let t = tuple(g, "C6[0,2,4],C6[0,2,4],C2[0]").unwrap();
    let mut yes = -1;
    assert_eq!(unsafe { cp_decide(t, &mut yes) }, CpStatus::Ok);
    assert_eq!(yes, 0);
    unsafe {
        cp_tuple_free(t);
        cp_group_free(g);
    }
}

#[test]
fn error_codes() {
    let bad = CString::new("GL3:6").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { cp_group_new(bad.as_ptr(), &mut g) },
        CpStatus::InvalidInput
    );
    assert!(g.is_null());
    assert!(last_error().contains("prime power"), "{}", last_error());

    assert_eq!(
        unsafe { cp_group_new(ptr::null(), &mut g) },
        CpStatus::NullPointer
    );
    let name = CString::new("GL3:3").unwrap();
    assert_eq!(
        unsafe { cp_group_new(name.as_ptr(), ptr::null_mut()) },
        CpStatus::NullPointer
    );

    let g = group("GL3:3");
    assert_eq!(tuple(g, "C9[0]").unwrap_err(), CpStatus::InvalidInput);
    assert_eq!(
        tuple(g, &vec!["C2[0]"; 13].join(",")).unwrap_err(),
        CpStatus::Capacity
    );

    let invalid = [0xffu8, 0];
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { cp_tuple_new(g, invalid.as_ptr().cast(), &mut t) },
        CpStatus::InvalidUtf8
    );

    let mut n = 0u64;
    assert_eq!(
        unsafe { cp_n_count_u64(ptr::null(), &mut n) },
        CpStatus::NullPointer
    );
    assert_eq!(unsafe { cp_tuple_len(ptr::null()) }, 0);
    unsafe {
        cp_group_free(g);
        cp_group_free(ptr::null_mut());
        cp_tuple_free(ptr::null_mut());
        cp_string_free(ptr::null_mut());
    }
}

#[test]
fn large_counts_overflow_u64() {
    let g = group("GL3:9");
    let labels = ["C2[0]"; 8].join(",");
    let t = tuple(g, &labels).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cp_n_count(t, &mut s) }, CpStatus::Ok);
    let digits = unsafe { CStr::from_ptr(s) }.to_str().unwrap().len();
    unsafe { cp_string_free(s) };
    let mut n = 0u64;
    let st = unsafe { cp_n_count_u64(t, &mut n) };
    if digits > 19 {
        assert_eq!(st, CpStatus::Overflow);
    }
    assert!(
        digits > 19,
        "expected a count past 64 bits, got {digits} digits"
    );
    unsafe {
        cp_tuple_free(t);
        cp_group_free(g);
    }
}
