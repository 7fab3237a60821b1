use std::ffi::{CStr, CString};
use std::ptr;

use qstream_ffi::*;

const FULL2: &str = r#"{"instances":["a","b"],"concepts":[
    {"name":"h00","labels":[0,0]},{"name":"h01","labels":[0,1]},
    {"name":"h10","labels":[1,0]},{"name":"h11","labels":[1,1]}]}"#;

const TWO_PATTERNS: &str = r#"{"instances":["a"],"horizon":4,"patterns":[
    [["a",0],["a",0],["a",0],["a",0]],[["a",1],["a",1],["a",1],["a",1]]]}"#;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = qs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn concept_class(json: &str) -> *mut QsConceptClass {
    let mut h = ptr::null_mut();
    let s = unsafe { qs_concept_class_from_json(cs(json).as_ptr(), &mut h) };
    assert_eq!(s, QsStatus::Ok);
    h
}

fn pattern_class(json: &str) -> *mut QsPatternClass {
    let mut p = ptr::null_mut();
    let s = unsafe { qs_pattern_class_from_json(cs(json).as_ptr(), &mut p) };
    assert_eq!(s, QsStatus::Ok);
    p
}

#[test]
fn littlestone_dimension_of_full_class() {
    let h = concept_class(FULL2);
    let mut d = 99;
    assert_eq!(unsafe { qs_littlestone_dimension(h, &mut d) }, QsStatus::Ok);
    assert_eq!(d, 2);
    assert!(qs_last_error().is_null());
    unsafe { qs_concept_class_free(h) };
}

#[test]
fn empty_class_is_invalid_input() {
    let mut h = ptr::null_mut();
    let s = unsafe {
        qs_concept_class_from_json(cs(r#"{"instances":["a"],"concepts":[]}"#).as_ptr(), &mut h)
    };
    assert_eq!(s, QsStatus::InvalidInput);
    assert!(h.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_arguments_are_reported() {
    let mut d = 0;
    assert_eq!(
        unsafe { qs_littlestone_dimension(ptr::null(), &mut d) },
        QsStatus::NullArgument
    );
    assert!(last_error().contains("null"));
    let h = concept_class(FULL2);
    assert_eq!(
        unsafe { qs_littlestone_dimension(h, ptr::null_mut()) },
        QsStatus::NullArgument
    );
    unsafe { qs_concept_class_free(h) };
}

#[test]
fn non_utf8_is_rejected() {
    let bad = [0xffu8, 0xfe, 0];
    let mut h = ptr::null_mut();
    let s = unsafe { qs_concept_class_from_json(bad.as_ptr().cast(), &mut h) };
    assert_eq!(s, QsStatus::Utf8);
}

#[test]
fn blind_solvers_agree_on_two_constant_patterns() {
    let p = pattern_class(TWO_PATTERNS);
    let (mut b, mut q0, mut q1, mut g1, mut w1) = (0, 0, 0, 0, 0);
    let mut witness = ptr::null_mut();
    unsafe {
        assert_eq!(
            qs_blind_learning_dimension(p, &mut b, &mut witness),
            QsStatus::Ok
        );
        assert_eq!(CStr::from_ptr(witness).to_str().unwrap().len(), 4);
        qs_string_free(witness);
        assert_eq!(qs_qld(p, 0, &mut q0), QsStatus::Ok);
        assert_eq!(qs_qld(p, 1, &mut q1), QsStatus::Ok);
        assert_eq!(qs_game_value(p, 1, &mut g1), QsStatus::Ok);
        assert_eq!(qs_bp_soa_worst_case(p, 1, &mut w1), QsStatus::Ok);
        qs_pattern_class_free(p);
    }
    assert_eq!((b, q0), (2, 2));
    assert_eq!((q1, g1), (1, 1));
    assert!(w1 <= q1);
}

#[test]
fn exact_blind_error_strings() {
    let mut exact = ptr::null_mut();
    let mut approx = 0.0;
    let s = unsafe { qs_exact_blind_error(1, 2, 1, ptr::null(), 0, &mut exact, &mut approx) };
    assert_eq!(s, QsStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(exact) }.to_str().unwrap(), "1/2");
    assert_eq!(approx, 0.5);
    unsafe { qs_string_free(exact) };

    let times = [0.1, 0.6];
    let s = unsafe { qs_exact_blind_error(1, 2, 1, times.as_ptr(), 2, &mut exact, &mut approx) };
    assert_eq!(s, QsStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(exact) }.to_str().unwrap(), "1/4");
    unsafe { qs_string_free(exact) };
}

#[test]
fn over_budget_placement() {
    let times = [0.1, 0.2, 0.3];
    let mut exact = ptr::null_mut();
    let mut approx = 0.0;
    let s = unsafe { qs_exact_blind_error(1, 2, 1, times.as_ptr(), 3, &mut exact, &mut approx) };
    assert_eq!(s, QsStatus::BudgetExceeded);
    assert!(exact.is_null());
}

#[test]
fn uniform_sampler_report_is_json_and_seeded() {
    let h = concept_class(FULL2);
    let stream = cs(r#"{"horizon":4.0,"segments":[
        {"start":0.0,"end":2.0,"x":"a","y":1},{"start":2.0,"end":4.0,"x":"b","y":0}]}"#);
    let run = |seed| {
        let mut out = ptr::null_mut();
        let s = unsafe { qs_run_uniform_sampler(h, stream.as_ptr(), 1.0, seed, &mut out) };
        assert_eq!(s, QsStatus::Ok);
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
        unsafe { qs_string_free(out) };
        text
    };
    let a = run(7);
    assert_eq!(a, run(7));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["mistake_integral"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["seed"], 7);
    unsafe { qs_concept_class_free(h) };
}

#[test]
fn non_realizable_stream_status() {
    let h = concept_class(r#"{"instances":["a"],"concepts":[{"name":"h","labels":[0]}]}"#);
    let stream = cs(r#"{"horizon":2.0,"segments":[{"start":0.0,"end":2.0,"x":"a","y":1}]}"#);
    let mut out = ptr::null_mut();
    let s = unsafe { qs_run_uniform_sampler(h, stream.as_ptr(), 1.0, 1, &mut out) };
    assert_eq!(s, QsStatus::NotRealizable);
    unsafe { qs_concept_class_free(h) };
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        qs_concept_class_free(ptr::null_mut());
        qs_pattern_class_free(ptr::null_mut());
        qs_string_free(ptr::null_mut());
    }
}
