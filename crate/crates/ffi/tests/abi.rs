use std::ffi::{CStr, CString};
use std::ptr;

use nearring_ffi::*;

fn last_error() -> String {
    let p = nr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn group_handles() {
    let name = CString::new("d16").unwrap();
    let mut g: *mut NrGroup = ptr::null_mut();
    unsafe {
        assert_eq!(nr_group_new(name.as_ptr(), 0, &mut g), NrStatus::Ok);
        let (mut order, mut exp) = (0u64, 0u32);
        assert_eq!(nr_group_order(g, &mut order), NrStatus::Ok);
        assert_eq!(nr_group_exponent(g, &mut exp), NrStatus::Ok);
        assert_eq!((order, exp), (16, 8));
        for a in 0..16 {
            let (mut n, mut s) = (0u32, 0u32);
            assert_eq!(nr_group_neg(g, a, &mut n), NrStatus::Ok);
            assert_eq!(nr_group_add(g, a, n, &mut s), NrStatus::Ok);
            assert_eq!(s, 0);
        }
        let mut s = 0;
        assert_eq!(nr_group_add(g, 16, 0, &mut s), NrStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        nr_group_free(g);
    }
}

#[test]
fn error_codes() {
    let h1 = CString::new("h1").unwrap();
    let bogus = CString::new("c17").unwrap();
    let mut g: *mut NrGroup = ptr::null_mut();
    unsafe {
        assert_eq!(nr_group_new(h1.as_ptr(), 4, &mut g), NrStatus::NotPrime);
        assert_eq!(nr_group_new(h1.as_ptr(), 3, &mut g), NrStatus::PrimeTooSmall);
        assert_eq!(nr_group_new(bogus.as_ptr(), 0, &mut g), NrStatus::UnknownGroup);
        assert_eq!(nr_group_new(ptr::null(), 0, &mut g), NrStatus::NullPointer);
        assert_eq!(nr_group_new(h1.as_ptr(), 5, ptr::null_mut()), NrStatus::NullPointer);
        assert!(g.is_null());
        let mut order = 0;
        assert_eq!(nr_group_order(ptr::null(), &mut order), NrStatus::NullPointer);
        nr_group_free(ptr::null_mut());
        nr_nearring_free(ptr::null_mut());
        nr_string_free(ptr::null_mut());
    }
}

#[test]
fn example_nearring() {
    let mut n: *mut NrNearring = ptr::null_mut();
    unsafe {
        assert_eq!(nr_example_nearring_new(5, &mut n), NrStatus::Ok);
        let (mut order, mut one) = (0u64, 0u32);
        assert_eq!(nr_nearring_order(n, &mut order), NrStatus::Ok);
        assert_eq!(nr_nearring_identity(n, &mut one), NrStatus::Ok);
        assert_eq!((order, one), (625, 125));
        let mut prod = 0;
        for x in [0u32, 7, 200, 624] {
            assert_eq!(nr_nearring_mul(n, x, one, &mut prod), NrStatus::Ok);
            assert_eq!(prod, x);
            assert_eq!(nr_nearring_mul(n, one, x, &mut prod), NrStatus::Ok);
            assert_eq!(prod, x);
        }
        let mut sum = 0;
        assert_eq!(nr_nearring_add(n, 1, 624, &mut sum), NrStatus::Ok);

        let mut ax = NrAxiomSummary::default();
        assert_eq!(nr_nearring_verify(n, false, 20_000, 3, &mut ax), NrStatus::Ok);
        assert!(ax.is_nearring && ax.associativity && ax.left_distributivity && ax.zero_symmetric);

        let mut loc = NrLocality::default();
        assert_eq!(nr_nearring_locality(n, &mut loc), NrStatus::Ok);
        assert!(loc.is_local);
        assert_eq!((loc.unit_count, loc.non_unit_count), (500, 125));

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(nr_nearring_report_json(n, false, 1000, 1, &mut json), NrStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["locality"]["is_local"], true);
        assert_eq!(v["axioms"]["associativity"]["pass"], true);
        nr_string_free(json);
        nr_nearring_free(n);

        assert_eq!(nr_example_nearring_new(9, &mut n), NrStatus::NotPrime);
    }
}

#[test]
fn search_summary() {
    let mut s = NrSearchSummary::default();
    let q16 = CString::new("q16").unwrap();
    let c16 = CString::new("c16").unwrap();
    let big = CString::new("g81-7").unwrap();
    unsafe {
        assert_eq!(nr_search(q16.as_ptr(), true, false, 0, &mut s), NrStatus::Ok);
        assert!(s.exhaustive);
        assert_eq!(s.result_count, 0);
        assert_eq!(s.identity_candidates, 4);
        assert_eq!(nr_search(c16.as_ptr(), true, false, 0, &mut s), NrStatus::Ok);
        assert_eq!((s.result_count, s.endomorphisms), (8, 16));
        assert_eq!(nr_search(big.as_ptr(), true, false, 0, &mut s), NrStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nearring.h")).unwrap();
    for sym in [
        "typedef struct NrGroup NrGroup;",
        "typedef struct NrNearring NrNearring;",
        "NR_STATUS_OK = 0",
        "NR_STATUS_INCONCLUSIVE = 8",
        "nr_last_error_message(void)",
        "nr_group_new(",
        "nr_group_free(",
        "nr_group_add(",
        "nr_example_nearring_new(",
        "nr_nearring_mul(",
        "nr_nearring_verify(",
        "nr_nearring_locality(",
        "nr_nearring_report_json(",
        "nr_string_free(",
        "nr_search(",
    ] {
        assert!(header.contains(sym), "missing {sym}");
    }
}
