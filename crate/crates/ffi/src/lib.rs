//! C interface to `qsplit`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`QsStatus`]; on failure [`qs_last_error_message`] describes the error on
//! the calling thread. Strings handed out by the library are NUL-terminated
//! UTF-8 and must be released with [`qs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsplit::attack::{attack_complexity, AttackParams};
use qsplit::circuit::{circuits_equivalent, Circuit};
use qsplit::io::{emit_qasm, from_json, parse_qasm};
use qsplit::obfuscate::{build_obfuscated, write_record, InsertionPolicy, ObfuscatedCircuit, ObfuscationError};
use qsplit::sim::{tvd, CountDist};
use qsplit::split::{
    generate_interlock_pattern, read_manifest, recombine, split, write_manifest, Segment, Side, SplitError,
    SplitManifest,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Infeasible = 5,
    NotEquivalent = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsSide {
    Left = 0,
    Right = 1,
}

/// A circuit.
pub struct QsCircuit(Circuit);

/// An obfuscated circuit with its insertion record.
pub struct QsObfuscated(ObfuscatedCircuit);

/// Two segments and the manifest that joins them.
pub struct QsSplit {
    left: Segment,
    right: Segment,
    manifest: SplitManifest,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(QsStatus, String);

impl Failure {
    fn new(status: QsStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<ObfuscationError> for Failure {
    fn from(e: ObfuscationError) -> Self {
        let status = match e {
            ObfuscationError::NoSlot(_) => QsStatus::Infeasible,
            ObfuscationError::NotEquivalent(_) => QsStatus::NotEquivalent,
            _ => QsStatus::Validation,
        };
        Failure::new(status, e)
    }
}

impl From<SplitError> for Failure {
    fn from(e: SplitError) -> Self {
        let status = match e {
            SplitError::Infeasible(_) => QsStatus::Infeasible,
            _ => QsStatus::Validation,
        };
        Failure::new(status, e)
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `body`, turning errors and panics into a status plus message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QsStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(QsStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(QsStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(QsStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(QsStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("library strings contain no NUL").into_raw()
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses OpenQASM 2.0 text.
///
/// # Safety
/// `qasm` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_from_qasm(qasm: *const c_char, out_circuit: *mut *mut QsCircuit) -> QsStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        let c = parse_qasm(text(qasm, "qasm")?).map_err(|e| Failure::new(QsStatus::Parse, e))?;
        *slot = boxed(QsCircuit(c));
        Ok(())
    })
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_to_qasm(circuit: *const QsCircuit, out_qasm: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let slot = out(out_qasm, "out_qasm")?;
        *slot = owned_string(emit_qasm(&arg(circuit, "circuit")?.0));
        Ok(())
    })
}

/// Qubit count, or 0 for NULL.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_num_qubits(circuit: *const QsCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.num_qubits())
}

/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_gate_count(circuit: *const QsCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.gate_count())
}

/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_depth(circuit: *const QsCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.depth())
}

/// # Safety
/// `circuit` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_circuit_free(circuit: *mut QsCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Inserts a random circuit and its inverse. `policy_json` may be NULL for
/// the default policy.
///
/// # Safety
/// `circuit` must be a live handle, `policy_json` NULL or a NUL-terminated
/// string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qs_obfuscate(
    circuit: *const QsCircuit,
    policy_json: *const c_char,
    seed: u64,
    out_obfuscated: *mut *mut QsObfuscated,
) -> QsStatus {
    guard(|| {
        let slot = out(out_obfuscated, "out_obfuscated")?;
        let c = &arg(circuit, "circuit")?.0;
        let policy: InsertionPolicy = if policy_json.is_null() {
            InsertionPolicy::default()
        } else {
            from_json(text(policy_json, "policy_json")?).map_err(|e| Failure::new(QsStatus::Parse, e))?
        };
        policy.validate()?;
        *slot = boxed(QsObfuscated(build_obfuscated(c, &policy, seed)?));
        Ok(())
    })
}

/// Copy of the obfuscated circuit.
///
/// # Safety
/// `obfuscated` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_obfuscated_circuit(
    obfuscated: *const QsObfuscated,
    out_circuit: *mut *mut QsCircuit,
) -> QsStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        *slot = boxed(QsCircuit(arg(obfuscated, "obfuscated")?.0.circuit().clone()));
        Ok(())
    })
}

/// The insertion record as JSON.
///
/// # Safety
/// `obfuscated` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_obfuscated_record_json(
    obfuscated: *const QsObfuscated,
    out_json: *mut *mut c_char,
) -> QsStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = owned_string(write_record(arg(obfuscated, "obfuscated")?.0.record()));
        Ok(())
    })
}

/// # Safety
/// `obfuscated` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_obfuscated_free(obfuscated: *mut QsObfuscated) {
    if !obfuscated.is_null() {
        drop(Box::from_raw(obfuscated));
    }
}

/// Draws an interlocking cut and splits along it.
///
/// # Safety
/// `obfuscated` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_split(
    obfuscated: *const QsObfuscated,
    seed: u64,
    min_distinct: usize,
    out_split: *mut *mut QsSplit,
) -> QsStatus {
    guard(|| {
        let slot = out(out_split, "out_split")?;
        let o = &arg(obfuscated, "obfuscated")?.0;
        let manifest = generate_interlock_pattern(o, seed, min_distinct)?;
        let (left, right) = split(o.circuit(), &manifest)?;
        *slot = boxed(QsSplit { left, right, manifest });
        Ok(())
    })
}

/// Copy of one segment.
///
/// # Safety
/// `split` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_split_segment(
    split: *const QsSplit,
    side: QsSide,
    out_circuit: *mut *mut QsCircuit,
) -> QsStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        let s = arg(split, "split")?;
        let seg = match side {
            QsSide::Left => &s.left,
            QsSide::Right => &s.right,
        };
        *slot = boxed(QsCircuit(seg.circuit.clone()));
        Ok(())
    })
}

/// # Safety
/// `split` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_split_manifest_json(split: *const QsSplit, out_json: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = owned_string(write_manifest(&arg(split, "split")?.manifest));
        Ok(())
    })
}

/// # Safety
/// `split` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_split_free(split: *mut QsSplit) {
    if !split.is_null() {
        drop(Box::from_raw(split));
    }
}

/// Joins two uncompiled segments through a manifest.
///
/// # Safety
/// Handles must be live, `manifest_json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qs_recombine(
    left: *const QsCircuit,
    right: *const QsCircuit,
    manifest_json: *const c_char,
    out_circuit: *mut *mut QsCircuit,
) -> QsStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        let m = read_manifest(text(manifest_json, "manifest_json")?).map_err(|e| Failure::new(QsStatus::Parse, e))?;
        let l = Segment {
            circuit: arg(left, "left")?.0.clone(),
            side: Side::L,
        };
        let r = Segment {
            circuit: arg(right, "right")?.0.clone(),
            side: Side::R,
        };
        *slot = boxed(QsCircuit(recombine(&l, &r, &m)?));
        Ok(())
    })
}

/// Functional comparison within `tol`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_equivalent(
    a: *const QsCircuit,
    b: *const QsCircuit,
    tol: f64,
    seed: u64,
    out_equivalent: *mut bool,
) -> QsStatus {
    guard(|| {
        let slot = out(out_equivalent, "out_equivalent")?;
        let eq = circuits_equivalent(&arg(a, "a")?.0, &arg(b, "b")?.0, tol, seed)
            .map_err(|e| Failure::new(QsStatus::Validation, e))?;
        *slot = eq.equivalent;
        Ok(())
    })
}

/// Total variation distance between two count files given as JSON.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_tvd_json(a_json: *const c_char, b_json: *const c_char, out_tvd: *mut f64) -> QsStatus {
    guard(|| {
        let slot = out(out_tvd, "out_tvd")?;
        let a = CountDist::from_json(text(a_json, "a_json")?).map_err(|e| Failure::new(QsStatus::Parse, e))?;
        let b = CountDist::from_json(text(b_json, "b_json")?).map_err(|e| Failure::new(QsStatus::Parse, e))?;
        *slot = tvd(&a, &b).map_err(|e| Failure::new(QsStatus::Validation, e))?;
        Ok(())
    })
}

/// Exact mapping count as a decimal string. `k` holds `k_len` entries,
/// `k[i-1]` being the number of candidate segments with `i` qubits.
///
/// # Safety
/// `k` must point to `k_len` readable values (or be NULL with `k_len == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_attack_complexity(
    n: usize,
    n_max: usize,
    k: *const u64,
    k_len: usize,
    out_decimal: *mut *mut c_char,
) -> QsStatus {
    guard(|| {
        let slot = out(out_decimal, "out_decimal")?;
        let k = match (k.is_null(), k_len) {
            (_, 0) => Vec::new(),
            (true, _) => return Err(Failure::new(QsStatus::NullArgument, "`k` is null")),
            (false, len) => std::slice::from_raw_parts(k, len).to_vec(),
        };
        let p = AttackParams::new(n, n_max, k).map_err(|e| Failure::new(QsStatus::Validation, e))?;
        *slot = owned_string(attack_complexity(&p).to_string());
        Ok(())
    })
}
