//! C ABI over the `qsat` library.
//!
//! Graphs and projector sets live behind opaque handles created by
//! `qsat_*_new`/`_sample`-style constructors and released with the matching
//! `_free`. Every fallible call returns a `QsatErrorCode` and writes its
//! result through an out-pointer; on failure `qsat_last_error_message`
//! describes what went wrong on the calling thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsat::hamiltonian::kernel_dimension;
use qsat::lanczos::{decide_sat, SatOptions, Verdict};
use qsat::projectors::{ProjectorForm, ProjectorSet};
use qsat::{EnsembleMode, EnsembleParams, Error, InteractionGraph, ReferenceInstance};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsatErrorCode {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    LimitExceeded = 4,
    ComputationFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsatVerdict {
    Sat = 0,
    Unsat = 1,
    Undecided = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsatEnsembleMode {
    Binomial = 0,
    FixedCount = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsatProjectorForm {
    Generic = 0,
    Product = 1,
}

/// Opaque interaction graph.
pub struct QsatGraph(InteractionGraph);

/// Opaque set of rank-1 projectors, one per clause of a graph.
pub struct QsatProjectors(ProjectorSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_for(e: &Error) -> QsatErrorCode {
    match e {
        Error::InvalidGraph(_) => QsatErrorCode::InvalidGraph,
        Error::LimitExceeded { .. } => QsatErrorCode::LimitExceeded,
        Error::ImpossibleParameters(_) | Error::InvalidInput(_) | Error::Domain(_) | Error::Json(_) => {
            QsatErrorCode::InvalidArgument
        }
        _ => QsatErrorCode::ComputationFailed,
    }
}

/// Runs `f`, translating errors and panics into codes.
fn guard<F: FnOnce() -> Result<(), (QsatErrorCode, String)>>(f: F) -> QsatErrorCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsatErrorCode::Ok,
        Ok(Err((code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic".into());
            QsatErrorCode::Panic
        }
    }
}

fn lib<T>(r: qsat::Result<T>) -> Result<T, (QsatErrorCode, String)> {
    r.map_err(|e| (code_for(&e), e.to_string()))
}

fn null(what: &str) -> (QsatErrorCode, String) {
    (QsatErrorCode::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const QsatGraph) -> Result<&'a InteractionGraph, (QsatErrorCode, String)> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (QsatErrorCode, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn boxed_graph(g: InteractionGraph) -> *mut QsatGraph {
    Box::into_raw(Box::new(QsatGraph(g)))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qsat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph from `num_clauses * k` qubit indices laid out clause by clause.
///
/// # Safety
/// `clauses` must point to `num_clauses * k` readable values (or be NULL when
/// `num_clauses` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_new(
    n_qubits: usize,
    k: usize,
    clauses: *const usize,
    num_clauses: usize,
    out: *mut *mut QsatGraph,
) -> QsatErrorCode {
    guard(|| {
        let flat: &[usize] = if num_clauses == 0 {
            &[]
        } else if clauses.is_null() {
            return Err(null("clauses"));
        } else {
            let len = num_clauses.checked_mul(k).ok_or_else(|| (QsatErrorCode::InvalidArgument, "clause array too large".into()))?;
            std::slice::from_raw_parts(clauses, len)
        };
        let lists = if k == 0 { Vec::new() } else { flat.chunks(k).map(<[usize]>::to_vec).collect() };
        let g = lib(InteractionGraph::new(n_qubits, k, lists))?;
        write(out, boxed_graph(g))
    })
}

/// Parses the graph JSON format `{"n_qubits":..,"k":..,"clauses":[[..],..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_from_json(json: *const c_char, out: *mut *mut QsatGraph) -> QsatErrorCode {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json).to_str().map_err(|e| (QsatErrorCode::InvalidArgument, e.to_string()))?;
        let g = lib(InteractionGraph::from_json(s))?;
        write(out, boxed_graph(g))
    })
}

/// Samples a random k-uniform graph with clause density `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_sample(
    n_qubits: usize,
    k: usize,
    alpha: f64,
    mode: QsatEnsembleMode,
    seed: u64,
    out: *mut *mut QsatGraph,
) -> QsatErrorCode {
    guard(|| {
        let mode = match mode {
            QsatEnsembleMode::Binomial => EnsembleMode::Binomial,
            QsatEnsembleMode::FixedCount => EnsembleMode::FixedCount,
        };
        let g = lib(qsat::sample_graph(&EnsembleParams { n_qubits, k, clause_density: alpha, mode, seed }))?;
        write(out, boxed_graph(g))
    })
}

/// One of the bundled N = M = 10 instances, selected by 'a', 'b' or 'c'.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_reference_instance(letter: c_char, out: *mut *mut QsatGraph) -> QsatErrorCode {
    guard(|| {
        let inst = match letter as u8 {
            b'a' | b'A' => ReferenceInstance::A,
            b'b' | b'B' => ReferenceInstance::B,
            b'c' | b'C' => ReferenceInstance::C,
            other => return Err((QsatErrorCode::InvalidArgument, format!("no reference instance {:?}", other as char))),
        };
        write(out, boxed_graph(inst.graph()))
    })
}

/// # Safety
/// `g` must come from a qsat constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_free(g: *mut QsatGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of qubits, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_n_qubits(g: *const QsatGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n_qubits())
}

/// Number of clauses, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_num_clauses(g: *const QsatGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.num_clauses())
}

/// Serializes the graph; release the string with `qsat_string_free`.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_to_json(g: *const QsatGraph, out: *mut *mut c_char) -> QsatErrorCode {
    guard(|| {
        let s = lib(graph_ref(g)?.to_json())?;
        let c = CString::new(s).map_err(|e| (QsatErrorCode::ComputationFailed, e.to_string()))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `s` must come from a qsat function returning an owned string.
#[no_mangle]
pub unsafe extern "C" fn qsat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whether every clause can be matched to a distinct qubit of its own.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_is_coverable(g: *const QsatGraph, out: *mut bool) -> QsatErrorCode {
    guard(|| write(out, qsat::is_clause_coverable(graph_ref(g)?)))
}

/// Exact number of dimer coverings; fails above `limit` active qubits or
/// when the count exceeds 64 bits.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_count_coverings(g: *const QsatGraph, limit: usize, out: *mut u64) -> QsatErrorCode {
    guard(|| {
        let n = lib(qsat::count_dimer_coverings(graph_ref(g)?, limit))?;
        let n = u64::try_from(n).map_err(|_| (QsatErrorCode::LimitExceeded, format!("{n} coverings do not fit in 64 bits")))?;
        write(out, n)
    })
}

/// Number of clauses in the hypercore.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_core_clauses(g: *const QsatGraph, out: *mut usize) -> QsatErrorCode {
    guard(|| write(out, graph_ref(g)?.core_clause_indices().len()))
}

/// Whether the clause-qubit incidence matrix has full row rank over GF(2).
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_graph_gf2_surjective(g: *const QsatGraph, out: *mut bool) -> QsatErrorCode {
    guard(|| write(out, qsat::gf2::gf2_surjective(graph_ref(g)?)))
}

/// Draws one random projector per clause of `g`.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_projectors_sample(
    g: *const QsatGraph,
    seed: u64,
    form: QsatProjectorForm,
    out: *mut *mut QsatProjectors,
) -> QsatErrorCode {
    guard(|| {
        let form = match form {
            QsatProjectorForm::Generic => ProjectorForm::Generic,
            QsatProjectorForm::Product => ProjectorForm::Product,
        };
        let p = ProjectorSet::sample(graph_ref(g)?, seed, form);
        write(out, Box::into_raw(Box::new(QsatProjectors(p))))
    })
}

/// # Safety
/// `p` must come from `qsat_projectors_sample` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qsat_projectors_free(p: *mut QsatProjectors) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn projectors_ref<'a>(p: *const QsatProjectors) -> Result<&'a ProjectorSet, (QsatErrorCode, String)> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| null("projectors"))
}

/// Dimension of ker H by dense diagonalization. `tol <= 0` selects the
/// default relative threshold. `marginal` reports an unstable count.
///
/// # Safety
/// `g`, `p` must be live handles (with `p` sampled on `g`); outputs writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_kernel_dimension(
    g: *const QsatGraph,
    p: *const QsatProjectors,
    tol: f64,
    dense_limit: usize,
    dimension: *mut usize,
    marginal: *mut bool,
) -> QsatErrorCode {
    guard(|| {
        let tol = (tol > 0.0).then_some(tol);
        let r = lib(kernel_dimension(graph_ref(g)?, projectors_ref(p)?, tol, dense_limit))?;
        write(dimension, r.dimension)?;
        write(marginal, r.marginal)
    })
}

/// Lanczos SAT/UNSAT decision with default tolerances.
///
/// # Safety
/// `g`, `p` must be live handles (with `p` sampled on `g`); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_decide_sat(
    g: *const QsatGraph,
    p: *const QsatProjectors,
    max_iters: usize,
    seed: u64,
    out: *mut QsatVerdict,
) -> QsatErrorCode {
    guard(|| {
        let opts = SatOptions { max_iters, seed, ..SatOptions::default() };
        let v = lib(decide_sat(graph_ref(g)?, projectors_ref(p)?, &opts))?;
        write(
            out,
            match v.verdict {
                Verdict::Sat => QsatVerdict::Sat,
                Verdict::Unsat => QsatVerdict::Unsat,
                Verdict::Undecided => QsatVerdict::Undecided,
            },
        )
    })
}

/// Root of the sunflower entropy S(k, α) in α.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsat_sunflower_alpha_upper(k: usize, out: *mut f64) -> QsatErrorCode {
    guard(|| write(out, lib(qsat::sunflower::sunflower_alpha_upper(k))?.alpha_upper))
}
