//! Exercises the C ABI through the exported symbols, the way a foreign
//! binding would.

use std::ffi::{CStr, CString};
use std::ptr;

use pspec_ffi::*;

const SOURCE: &str = "\
process Step(d = 2) {
  in a: Int;
  out y: Int;
  buf a = 0;
  init n: Int = d;
  initProcess n = d;
  wcet 2;
  ending: n == 1;
  calc {
    y = <ft(a)>;
    n' = n - 1;
  }
}
compose Twice = Step ; Step
env Kick {
  entry @ 0 = <ev>;
  Step.a @ 0 = <7>;
}
";

unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
    pspec_string_free(ptr);
    s
}

#[test]
fn parse_check_simulate_and_export_round_trip() {
    unsafe {
        let source = CString::new(SOURCE).unwrap();
        let mut doc: *mut PspecDocument = ptr::null_mut();
        assert_eq!(pspec_parse(source.as_ptr(), &mut doc), PspecStatus::Ok);
        assert!(!doc.is_null());

        // Validation: clean document, empty diagnostics array.
        let mut diags: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(pspec_check(doc, &mut diags), PspecStatus::Ok);
        assert_eq!(take_string(diags), "[]");

        // Canonical print parses again.
        let mut printed: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(pspec_print(doc, &mut printed), PspecStatus::Ok);
        let printed = take_string(printed);
        let reparsed_src = CString::new(printed).unwrap();
        let mut doc2: *mut PspecDocument = ptr::null_mut();
        assert_eq!(pspec_parse(reparsed_src.as_ptr(), &mut doc2), PspecStatus::Ok);
        pspec_document_free(doc2);

        // Simulation and both trace exports.
        let compose = CString::new("Twice").unwrap();
        let env = CString::new("Kick").unwrap();
        let mut trace: *mut PspecTrace = ptr::null_mut();
        assert_eq!(
            pspec_simulate(doc, compose.as_ptr(), env.as_ptr(), 12, &mut trace),
            PspecStatus::Ok
        );
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(pspec_trace_to_json(trace, &mut json), PspecStatus::Ok);
        let json = take_string(json);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["horizon"], 12);
        // Two back-to-back 2-tick stages: exits at ticks 2 and 4.
        assert_eq!(value["channels"]["Step.stop"][2][0], "ev");
        assert_eq!(value["channels"]["Step_2.stop"][4][0], "ev");

        let mut text: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(pspec_trace_to_text(trace, &mut text), PspecStatus::Ok);
        let text = take_string(text);
        assert_eq!(text.lines().count(), 12);
        pspec_trace_free(trace);

        // wcet with derivation.
        let mut bound = 0u64;
        let mut derivation: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            pspec_wcet(doc, compose.as_ptr(), false, &mut bound, &mut derivation),
            PspecStatus::Ok
        );
        assert_eq!(bound, 4);
        assert!(take_string(derivation).contains("seq = 4"));

        // Exporters.
        let mut dot: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(pspec_export_dot(doc, compose.as_ptr(), &mut dot), PspecStatus::Ok);
        assert!(take_string(dot).starts_with("digraph network"));
        let mut xml: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(pspec_export_pnml(doc, compose.as_ptr(), &mut xml), PspecStatus::Ok);
        assert!(take_string(xml).contains("<pnml"));

        pspec_document_free(doc);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        // Parse error.
        let bad = CString::new("process {").unwrap();
        let mut doc: *mut PspecDocument = ptr::null_mut();
        assert_eq!(pspec_parse(bad.as_ptr(), &mut doc), PspecStatus::ParseError);
        assert!(doc.is_null());
        let msg = CStr::from_ptr(pspec_last_error()).to_str().unwrap();
        assert!(msg.contains("unexpected"), "{msg}");

        // Unknown composition.
        let source = CString::new(SOURCE).unwrap();
        assert_eq!(pspec_parse(source.as_ptr(), &mut doc), PspecStatus::Ok);
        let missing = CString::new("Nope").unwrap();
        let env = CString::new("Kick").unwrap();
        let mut trace: *mut PspecTrace = ptr::null_mut();
        assert_eq!(
            pspec_simulate(doc, missing.as_ptr(), env.as_ptr(), 5, &mut trace),
            PspecStatus::UnknownName
        );
        assert!(trace.is_null());

        // Null argument.
        assert_eq!(
            pspec_parse(ptr::null(), &mut doc),
            PspecStatus::InvalidArgument
        );
        pspec_document_free(doc);
    }
}

#[test]
fn header_compiles_as_c99() {
    let header = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("pspec.h");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    match std::process::Command::new(&cc)
        .args(["-std=c99", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
    {
        Ok(status) => assert!(status.success(), "{cc} rejected the generated header"),
        Err(_) => eprintln!("skipping: no C compiler available"),
    }
}

#[test]
fn generated_header_exists_and_declares_the_surface() {
    let header = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("pspec.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for needle in [
        "typedef struct PspecDocument PspecDocument;",
        "typedef struct PspecTrace PspecTrace;",
        "pspec_parse",
        "pspec_simulate",
        "pspec_wcet",
        "pspec_last_error",
        "PSPEC_STATUS_OK",
    ] {
        assert!(text.contains(needle), "header missing `{needle}`:\n{text}");
    }
}
