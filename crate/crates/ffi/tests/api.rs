use std::ffi::{CStr, CString};
use std::ptr;

use rigidlab_ffi::*;

const EXAMPLE: &str = r#"{"weights":[["2",1],["1",1]],"coeffs":[
  {"out":0,"mono":{"0":1},"c":"3"},{"out":0,"mono":{"1":1},"c":"1"},
  {"out":0,"mono":{"1":2},"c":"2"},{"out":1,"mono":{"1":1},"c":"2"}]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rl_last_error()) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    rl_string_free(s);
    out
}

#[test]
fn map_round_trip() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(rl_map_from_json(c(EXAMPLE).as_ptr(), false, &mut f), RlStatus::Ok);
        assert_eq!(last_error(), "");
        let mut strict = true;
        assert_eq!(rl_map_is_strict(f, &mut strict), RlStatus::Ok);
        assert!(!strict);

        let mut csv = ptr::null_mut();
        assert_eq!(rl_map_linearize_csv(f, false, &mut csv), RlStatus::Ok);
        assert_eq!(take(csv), "row,u1^2,u1,u0\nu1^2,4,0,0\nu1,0,2,0\nu0,2,1,3\n");

        let mut inv = ptr::null_mut();
        assert_eq!(rl_map_invert(f, &mut inv), RlStatus::Ok);
        let mut id = ptr::null_mut();
        assert_eq!(rl_map_compose(f, inv, &mut id), RlStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(rl_map_to_json(id, &mut json), RlStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(doc["coeffs"].as_array().unwrap().len(), 2);
        for h in [f, inv, id] {
            rl_map_free(h);
        }
    }
}

#[test]
fn errors_map_to_status() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(rl_map_from_json(c("{\"weights\":").as_ptr(), false, &mut f), RlStatus::Schema);
        assert!(!last_error().is_empty());
        assert!(f.is_null());
        assert_eq!(rl_map_from_json(c(EXAMPLE).as_ptr(), true, &mut f), RlStatus::Numeric);
        assert!(last_error().contains("NotStrict"), "{}", last_error());
        assert_eq!(rl_map_from_json(ptr::null(), false, &mut f), RlStatus::InvalidArgument);
        assert_eq!(rl_map_from_json(c(EXAMPLE).as_ptr(), false, ptr::null_mut()), RlStatus::InvalidArgument);
        rl_map_free(ptr::null_mut());
        rl_string_free(ptr::null_mut());
    }
}

#[test]
fn cat_map_lyapunov() {
    let walk = r#"{"atoms":[{"system":{"kind":"toral","matrix":[[2,1],[1,1]]},"p":"1"}]}"#;
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(rl_walk_from_json(c(walk).as_ptr(), &mut w), RlStatus::Ok);
        let mut dim = 0;
        assert_eq!(rl_walk_dim(w, &mut dim), RlStatus::Ok);
        assert_eq!(dim, 2);
        let mut ex = [0.0; 2];
        assert_eq!(rl_lyapunov(w, [0.3, 0.7].as_ptr(), 2, 50, 1000, 1, RlMethod::Qr, ex.as_mut_ptr()), RlStatus::Ok);
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((ex[0] - golden).abs() < 1e-10 && (ex[1] + golden).abs() < 1e-10);
        assert_eq!(rl_lyapunov(w, [0.3].as_ptr(), 1, 0, 10, 1, RlMethod::Auto, ex.as_mut_ptr()), RlStatus::InvalidArgument);
        assert_eq!(rl_lyapunov(w, [0.3, 0.7].as_ptr(), 2, 0, 0, 1, RlMethod::Auto, ex.as_mut_ptr()), RlStatus::Schema);
        let pair = r#"{"atoms":[{"system":{"kind":"toral","matrix":[[2,1],[1,1]]},"p":"1/2"},
                                {"system":{"kind":"toral","matrix":[[1,-1],[-1,2]]},"p":"1/2"}]}"#;
        let mut p = ptr::null_mut();
        assert_eq!(rl_walk_from_json(c(pair).as_ptr(), &mut p), RlStatus::Ok);
        let mut exact = [0.0; 2];
        assert_eq!(rl_lyapunov(p, [0.1, 0.2].as_ptr(), 2, 0, 5000, 3, RlMethod::Exact, exact.as_mut_ptr()), RlStatus::Ok);
        let mut auto = [0.0; 2];
        assert_eq!(rl_lyapunov(p, [0.1, 0.2].as_ptr(), 2, 0, 5000, 3, RlMethod::Auto, auto.as_mut_ptr()), RlStatus::Ok);
        assert_eq!(exact, auto);
        rl_walk_free(p);
        rl_walk_free(w);
    }
}

#[test]
fn run_config_in_memory() {
    let config = format!(r#"{{"kind":"subres","payload":{{"op":"check","map":{EXAMPLE}}}}}"#);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(rl_run_config(c(&config).as_ptr(), &mut out), RlStatus::Ok);
        assert_eq!(take(out), "validated,strict,dim\ntrue,false,2\n");
        let budget = r#"{"kind":"lyapunov","budgets":{"samples":5},"payload":{"system":{"kind":"toral","matrix":[[2,1],[1,1]]},"q0":[0.1,0.2],"n":100}}"#;
        assert_eq!(rl_run_config(c(budget).as_ptr(), &mut out), RlStatus::Budget);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rigidlab.h")).unwrap();
    for name in [
        "rl_last_error", "rl_string_free", "rl_map_from_json", "rl_map_free", "rl_map_to_json", "rl_map_is_strict",
        "rl_map_compose", "rl_map_invert", "rl_map_linearize_csv", "rl_walk_from_json", "rl_walk_free", "rl_walk_dim",
        "rl_lyapunov", "rl_run_config", "typedef struct RlMap RlMap", "RL_STATUS_BUDGET = 3",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
