use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use serde_json::Value;
use torick_ffi::*;

fn fixture(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn take(s: *mut std::ffi::c_char) -> Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { torick_string_free(s) };
    v
}

fn last_error() -> String {
    let p = torick_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(name: &str) -> *mut TorickModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { torick_model_load(fixture(name).as_ptr(), &mut m) }, TorickStatus::Ok);
    m
}

#[test]
fn model_reports() {
    let m = load("dnc-p2.model");
    assert_eq!(unsafe { torick_model_dim(m) }, 3);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { torick_df(m, true, &mut out) }, TorickStatus::Ok);
    let v = take(out);
    assert_eq!(v["schema"], "torick/1");
    assert_eq!(v["df"]["text"], "36/1");
    assert!(torick_last_error().is_null());

    let dir = CString::new("canonical").unwrap();
    let (mut json, mut csv) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { torick_path(m, dir.as_ptr(), 3, &mut json, &mut csv) }, TorickStatus::Ok);
    assert_eq!(take(json)["path"]["t_max"], "1/1");
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { torick_string_free(csv) };
    assert!(text.starts_with("t,DF,dDF_sign\n0/1,36/1,"));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { torick_pullback_check(m, 4, torick_default_seed(), &mut out) }, TorickStatus::Ok);
    assert_eq!(take(out)["all_equal"], true);
    unsafe { torick_model_free(m) };
}

#[test]
fn cone_reports() {
    let json = CString::new(r#"{"rank": 2, "rays": [[0,1],[3,-1]]}"#).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { torick_cone_parse(json.as_ptr(), &mut c) }, TorickStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { torick_classify(c, &mut out) }, TorickStatus::Ok);
    assert_eq!(take(out)["report"]["classification"], "not-canonical");
    assert_eq!(unsafe { torick_search(c, 2, &mut out) }, TorickStatus::Ok);
    assert_eq!(take(out)["outcome"], "witness");
    assert_eq!(unsafe { torick_search(c, 0, &mut out) }, TorickStatus::InvalidArgument);
    unsafe { torick_cone_free(c) };

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { torick_cone_load(fixture("a1.cone").as_ptr(), &mut c) }, TorickStatus::Ok);
    assert_eq!(unsafe { torick_classify(c, &mut out) }, TorickStatus::Ok);
    assert_eq!(take(out)["report"]["classification"], "canonical-not-terminal");
    unsafe { torick_cone_free(c) };
}

#[test]
fn status_codes() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { torick_model_load(ptr::null(), &mut m) }, TorickStatus::InvalidArgument);
    assert!(last_error().contains("null"));

    let bad = CString::new("{\"total\": 1}").unwrap();
    assert_eq!(unsafe { torick_model_parse(bad.as_ptr(), ptr::null(), &mut m) }, TorickStatus::Schema);
    assert!(m.is_null());

    let m = load("a1-crepant.model");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { torick_multiplicities(m, &mut out) }, TorickStatus::Precondition);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { torick_volume(m, &mut out) }, TorickStatus::Ok);
    assert_eq!(take(out)["volume"]["text"], "-2/1");
    assert_eq!(unsafe { torick_volume(m, ptr::null_mut()) }, TorickStatus::InvalidArgument);
    unsafe { torick_model_free(m) };

    assert_eq!(unsafe { torick_volume(ptr::null(), &mut out) }, TorickStatus::InvalidArgument);
    unsafe {
        torick_model_free(ptr::null_mut());
        torick_cone_free(ptr::null_mut());
        torick_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { CStr::from_ptr(torick_version()) }.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/torick.h")).unwrap();
    for symbol in ["torick_model_load", "torick_df", "torick_search", "TORICK_STATUS_MISMATCH = 4", "size_t samples"] {
        assert!(header.contains(symbol), "{symbol}");
    }
}
