//! C ABI over the pspec toolkit. Callers hold opaque handles to parsed
//! documents and traces; every function returns a status code, with a
//! per-thread message available through `pspec_last_error`. Strings returned
//! through out-parameters are owned by the caller and must be released with
//! `pspec_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use pspec::analysis::{declared_bounds, wcet, ConnectorCostMode};
use pspec::compose::compile;
use pspec::dsl::{parse, print, SpecDocument};
use pspec::export::dot::export_dot;
use pspec::export::pnml::{export_petri_net, to_pnml_xml};
use pspec::export::{trace_to_json_string, trace_to_text};
use pspec::process::validate;
use pspec::sim::{check_assumptions, run, Trace};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PspecStatus {
    Ok = 0,
    ParseError = 1,
    ValidationError = 2,
    UnknownName = 3,
    ComposeError = 4,
    SimError = 5,
    AnalysisError = 6,
    InvalidArgument = 7,
}

/// Opaque handle to a parsed specification document.
pub struct PspecDocument {
    doc: SpecDocument,
}

/// Opaque handle to a recorded simulation trace.
pub struct PspecTrace {
    trace: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', "?");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

fn fail(status: PspecStatus, message: impl Into<String>) -> PspecStatus {
    set_error(message);
    status
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pspec_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through one of this library's
/// out-parameters, not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn pspec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn arg_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, PspecStatus> {
    if ptr.is_null() {
        return Err(fail(PspecStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(PspecStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn give_string(s: String, out: *mut *mut c_char) -> PspecStatus {
    if out.is_null() {
        return fail(PspecStatus::InvalidArgument, "output pointer is null");
    }
    match CString::new(s) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            PspecStatus::Ok
        }
        Err(_) => fail(PspecStatus::InvalidArgument, "output contains a NUL byte"),
    }
}

/// Parse a `.pspec` document from UTF-8 source text.
///
/// # Safety
/// `source` must point to a NUL-terminated string and `out` to a writable
/// pointer slot. On success the slot holds a document that must be released
/// with `pspec_document_free`.
#[no_mangle]
pub unsafe extern "C" fn pspec_parse(
    source: *const c_char,
    out: *mut *mut PspecDocument,
) -> PspecStatus {
    if out.is_null() {
        return fail(PspecStatus::InvalidArgument, "out is null");
    }
    *out = ptr::null_mut();
    let source = match arg_str(source, "source") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match parse(source) {
        Ok(doc) => {
            *out = Box::into_raw(Box::new(PspecDocument { doc }));
            PspecStatus::Ok
        }
        Err(diags) => {
            let joined: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            fail(PspecStatus::ParseError, joined.join("\n"))
        }
    }
}

/// # Safety
/// `doc` must come from `pspec_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pspec_document_free(doc: *mut PspecDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

unsafe fn doc_ref<'a>(doc: *const PspecDocument) -> Result<&'a SpecDocument, PspecStatus> {
    if doc.is_null() {
        return Err(fail(PspecStatus::InvalidArgument, "document is null"));
    }
    Ok(&(*doc).doc)
}

/// Validate every process in the document. Writes a JSON array of
/// diagnostic strings; the array is empty when the document is well-formed.
///
/// # Safety
/// `doc` must be a live document handle; `diagnostics_json` must be a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pspec_check(
    doc: *const PspecDocument,
    diagnostics_json: *mut *mut c_char,
) -> PspecStatus {
    let doc = match doc_ref(doc) {
        Ok(d) => d,
        Err(status) => return status,
    };
    let mut diags = Vec::new();
    for p in &doc.processes {
        for d in validate(p) {
            diags.push(format!("process {}: {d}", p.name));
        }
    }
    let json = json_string_array(&diags);
    let status = if diags.is_empty() {
        PspecStatus::Ok
    } else {
        fail(PspecStatus::ValidationError, diags.join("\n"))
    };
    let write_status = give_string(json, diagnostics_json);
    if write_status != PspecStatus::Ok {
        return write_status;
    }
    status
}

fn json_string_array(items: &[String]) -> String {
    let mut out = String::from("[");
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('"');
        for c in item.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                c => out.push(c),
            }
        }
        out.push('"');
    }
    out.push(']');
    out
}

/// Render the document back to canonical `.pspec` text.
///
/// # Safety
/// `doc` must be a live document handle; `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pspec_print(
    doc: *const PspecDocument,
    out: *mut *mut c_char,
) -> PspecStatus {
    let doc = match doc_ref(doc) {
        Ok(d) => d,
        Err(status) => return status,
    };
    give_string(print(doc), out)
}

/// Simulate a named composition under a named env for `horizon` ticks.
/// Assumption violations do not fail the call; they are visible in the
/// trace exports.
///
/// # Safety
/// `doc` must be a live document handle, the strings NUL-terminated, and
/// `out` a writable slot. On success the slot holds a trace that must be
/// released with `pspec_trace_free`.
#[no_mangle]
pub unsafe extern "C" fn pspec_simulate(
    doc: *const PspecDocument,
    compose: *const c_char,
    env: *const c_char,
    horizon: u64,
    out: *mut *mut PspecTrace,
) -> PspecStatus {
    if out.is_null() {
        return fail(PspecStatus::InvalidArgument, "out is null");
    }
    *out = ptr::null_mut();
    let doc = match doc_ref(doc) {
        Ok(d) => d,
        Err(status) => return status,
    };
    let compose = match arg_str(compose, "compose") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let env_name = match arg_str(env, "env") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let expr = match doc.composition(compose) {
        Ok(e) => e,
        Err(e) => return fail(PspecStatus::UnknownName, e.to_string()),
    };
    let mut network = match compile(&expr) {
        Ok(n) => n,
        Err(e) => return fail(PspecStatus::ComposeError, e.to_string()),
    };
    let env_inputs = match doc.bind_env(env_name, &network, horizon as usize) {
        Ok(e) => e,
        Err(e) => return fail(PspecStatus::UnknownName, e.to_string()),
    };
    match run(&mut network, &env_inputs, horizon as usize) {
        Ok(trace) => {
            let _ = check_assumptions(&network, &trace);
            *out = Box::into_raw(Box::new(PspecTrace { trace }));
            PspecStatus::Ok
        }
        Err(e) => fail(PspecStatus::SimError, e.to_string()),
    }
}

/// # Safety
/// `trace` must come from `pspec_simulate` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pspec_trace_free(trace: *mut PspecTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

unsafe fn trace_ref<'a>(trace: *const PspecTrace) -> Result<&'a Trace, PspecStatus> {
    if trace.is_null() {
        return Err(fail(PspecStatus::InvalidArgument, "trace is null"));
    }
    Ok(&(*trace).trace)
}

/// Structured JSON export of a trace.
///
/// # Safety
/// `trace` must be a live trace handle; `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pspec_trace_to_json(
    trace: *const PspecTrace,
    out: *mut *mut c_char,
) -> PspecStatus {
    let trace = match trace_ref(trace) {
        Ok(t) => t,
        Err(status) => return status,
    };
    give_string(trace_to_json_string(trace), out)
}

/// Line-oriented text export of a trace.
///
/// # Safety
/// `trace` must be a live trace handle; `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pspec_trace_to_text(
    trace: *const PspecTrace,
    out: *mut *mut c_char,
) -> PspecStatus {
    let trace = match trace_ref(trace) {
        Ok(t) => t,
        Err(status) => return status,
    };
    give_string(trace_to_text(trace), out)
}

/// Compositional wcet bound of a named composition, from declared
/// per-process bounds. When `measured_connector_cost` is true, connector
/// costs are measured instead of taken as zero. `derivation` may be null;
/// otherwise it receives the rendered derivation tree.
///
/// # Safety
/// `doc` must be a live document handle, `compose` NUL-terminated,
/// `out_bound` writable, `derivation` writable or null.
#[no_mangle]
pub unsafe extern "C" fn pspec_wcet(
    doc: *const PspecDocument,
    compose: *const c_char,
    measured_connector_cost: bool,
    out_bound: *mut u64,
    derivation: *mut *mut c_char,
) -> PspecStatus {
    if out_bound.is_null() {
        return fail(PspecStatus::InvalidArgument, "out_bound is null");
    }
    let doc = match doc_ref(doc) {
        Ok(d) => d,
        Err(status) => return status,
    };
    let compose = match arg_str(compose, "compose") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let expr = match doc.composition(compose) {
        Ok(e) => e,
        Err(e) => return fail(PspecStatus::UnknownName, e.to_string()),
    };
    let bounds = match declared_bounds(&expr) {
        Ok(b) => b,
        Err(e) => return fail(PspecStatus::AnalysisError, e.to_string()),
    };
    let mode = if measured_connector_cost {
        ConnectorCostMode::Measured
    } else {
        ConnectorCostMode::Zero
    };
    match wcet(&expr, &bounds, mode) {
        Ok(report) => {
            *out_bound = report.bound;
            if !derivation.is_null() {
                return give_string(report.render(), derivation);
            }
            PspecStatus::Ok
        }
        Err(e) => fail(PspecStatus::AnalysisError, e.to_string()),
    }
}

unsafe fn export_with(
    doc: *const PspecDocument,
    compose: *const c_char,
    out: *mut *mut c_char,
    render: impl Fn(&pspec::compose::ProcessExpr) -> Result<String, String>,
) -> PspecStatus {
    let doc = match doc_ref(doc) {
        Ok(d) => d,
        Err(status) => return status,
    };
    let compose = match arg_str(compose, "compose") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let expr = match doc.composition(compose) {
        Ok(e) => e,
        Err(e) => return fail(PspecStatus::UnknownName, e.to_string()),
    };
    match render(&expr) {
        Ok(text) => give_string(text, out),
        Err(e) => fail(PspecStatus::ComposeError, e),
    }
}

/// DOT rendering of a compiled composition.
///
/// # Safety
/// Same contract as `pspec_export_pnml`.
#[no_mangle]
pub unsafe extern "C" fn pspec_export_dot(
    doc: *const PspecDocument,
    compose: *const c_char,
    out: *mut *mut c_char,
) -> PspecStatus {
    export_with(doc, compose, out, |expr| {
        compile(expr).map(|n| export_dot(&n)).map_err(|e| e.to_string())
    })
}

/// PNML rendering of the control-flow skeleton.
///
/// # Safety
/// `doc` must be a live document handle, `compose` NUL-terminated, `out` a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn pspec_export_pnml(
    doc: *const PspecDocument,
    compose: *const c_char,
    out: *mut *mut c_char,
) -> PspecStatus {
    export_with(doc, compose, out, |expr| {
        export_petri_net(expr)
            .map(|m| to_pnml_xml(&m))
            .map_err(|e| e.to_string())
    })
}
