//! C ABI over `randrank`.
//!
//! Graphs live behind the opaque [`RrGraph`] handle. Every fallible call
//! returns an [`RrStatus`]; on failure a message is kept per thread and can
//! be read with [`rr_last_error_message`]. Output vectors are written into
//! caller-owned buffers whose length must equal the page count.
//!
//! Panics never cross the boundary: they are caught and reported as
//! `RR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use randrank::async_iter::simulate_async;
use randrank::dist_simul::{mhat_simul, simulate_simul};
use randrank::dist_single::{mhat_single, simulate_single};
use randrank::harness::reference_pagerank;
use randrank::termination::{run_algorithm1, TerminationParams};
use randrank::webgraph::{example_web, load_edge_list, random_web};
use randrank::{power_method, Error, LinkMatrix, RankVector, RunConfig, SchemeParams, WebGraph};

/// Sentinel for "no value" in `uint64_t` outputs.
pub const RR_NONE: u64 = u64::MAX;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    NonConvergence = 5,
    Capacity = 6,
    Consistency = 7,
    DimensionMismatch = 8,
    Io = 9,
    Panic = 10,
}

/// Opaque graph handle with its link matrix.
pub struct RrGraph {
    graph: WebGraph,
    matrix: LinkMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RrStatus {
    match e {
        Error::Parse { .. } => RrStatus::Parse,
        Error::Validation(_) => RrStatus::Validation,
        Error::NonConvergence { .. } => RrStatus::NonConvergence,
        Error::Capacity(_) => RrStatus::Capacity,
        Error::Consistency(_) => RrStatus::Consistency,
        Error::DimensionMismatch { .. } => RrStatus::DimensionMismatch,
        _ => RrStatus::Io,
    }
}

struct Failure(RrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RrStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const RrGraph) -> Result<&'a RrGraph, Failure> {
    g.as_ref().ok_or_else(|| null("graph handle"))
}

unsafe fn out_buffer<'a>(buf: *mut f64, len: size_t, n: usize) -> Result<&'a mut [f64], Failure> {
    if buf.is_null() {
        return Err(null("output buffer"));
    }
    if len != n {
        return Err(Failure(RrStatus::DimensionMismatch, format!("buffer length {len} does not match {n} pages")));
    }
    Ok(std::slice::from_raw_parts_mut(buf, len))
}

fn install(g: WebGraph, out: *mut *mut RrGraph) -> Result<(), Failure> {
    let matrix = g.link_matrix()?;
    let handle = Box::into_raw(Box::new(RrGraph { graph: g, matrix }));
    // SAFETY: `out` was checked non-null by the caller.
    unsafe { *out = handle };
    Ok(())
}

/// Parses an edge list (NUL-terminated UTF-8) into a new graph handle.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_graph_from_edge_list(text: *const c_char, out: *mut *mut RrGraph) -> RrStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure(RrStatus::InvalidUtf8, "edge list is not valid UTF-8".into()))?;
        install(load_edge_list(s)?, out)
    })
}

/// Random web with `hubs` hub pages and out-degrees in `min_deg..=max_deg`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_graph_random(
    n: size_t,
    seed: u64,
    hubs: size_t,
    min_deg: size_t,
    max_deg: size_t,
    out: *mut *mut RrGraph,
) -> RrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        install(random_web(n, seed, hubs, min_deg, max_deg)?, out)
    })
}

/// The built-in 4-page example web.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_graph_example(out: *mut *mut RrGraph) -> RrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        install(example_web(), out)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must come from one of the constructors and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rr_graph_free(g: *mut RrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Page count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rr_graph_page_count(g: *const RrGraph) -> size_t {
    g.as_ref().map_or(0, |g| g.graph.page_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rr_graph_edge_count(g: *const RrGraph) -> size_t {
    g.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Power method from the uniform vector. `iterations` may be null.
///
/// # Safety
/// `g` must be a live handle and `out` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rr_pagerank(
    g: *const RrGraph,
    m: f64,
    tol: f64,
    max_iter: size_t,
    out: *mut f64,
    len: size_t,
    iterations: *mut size_t,
) -> RrStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let n = g.matrix.dim();
        let buf = out_buffer(out, len, n)?;
        let r = power_method(&g.matrix, m, &RankVector::uniform(n), tol, max_iter)?;
        buf.copy_from_slice(&r.x_star);
        if !iterations.is_null() {
            *iterations = r.iterations;
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn rr_mhat_single(m: f64, n: size_t) -> f64 {
    mhat_single(m, n)
}

#[no_mangle]
pub extern "C" fn rr_mhat_simul(m: f64, alpha: f64) -> f64 {
    mhat_simul(m, alpha)
}

/// Final time average of a single-update run.
///
/// # Safety
/// `g` must be a live handle and `out_y` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rr_simulate_single(
    g: *const RrGraph,
    m: f64,
    seed: u64,
    steps: u64,
    out_y: *mut f64,
    len: size_t,
) -> RrStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = out_buffer(out_y, len, g.matrix.dim())?;
        let x_star = reference_pagerank(&g.matrix, m)?;
        let t = simulate_single(&g.matrix, &x_star, &SchemeParams::new(m, 1.0, seed), &RunConfig::new(steps, steps.max(1)))?;
        buf.copy_from_slice(&t.final_y);
        Ok(())
    })
}

/// Final time average of a simultaneous-update run.
///
/// # Safety
/// `g` must be a live handle and `out_y` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rr_simulate_simul(
    g: *const RrGraph,
    m: f64,
    alpha: f64,
    seed: u64,
    steps: u64,
    out_y: *mut f64,
    len: size_t,
) -> RrStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = out_buffer(out_y, len, g.matrix.dim())?;
        let x_star = reference_pagerank(&g.matrix, m)?;
        let t = simulate_simul(&g.matrix, &x_star, &SchemeParams::new(m, alpha, seed), &RunConfig::new(steps, steps.max(1)))?;
        buf.copy_from_slice(&t.final_y);
        Ok(())
    })
}

/// Final normalized state `x / sum(x)` of an asynchronous run. `stopped_at`
/// (nullable) receives the step the tolerance was met, or `RR_NONE`.
///
/// # Safety
/// `g` must be a live handle and `out_x` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rr_simulate_async(
    g: *const RrGraph,
    m: f64,
    alpha: f64,
    seed: u64,
    steps: u64,
    tol: f64,
    out_x: *mut f64,
    len: size_t,
    stopped_at: *mut u64,
) -> RrStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = out_buffer(out_x, len, g.matrix.dim())?;
        let x_star = reference_pagerank(&g.matrix, m)?;
        let cfg = RunConfig::new(steps, steps.max(1));
        let t = simulate_async(&g.matrix, &x_star, &SchemeParams::new(m, alpha, seed), &cfg, tol)?;
        buf.copy_from_slice(&t.final_y);
        if !stopped_at.is_null() {
            *stopped_at = t.stopped_at.unwrap_or(RR_NONE);
        }
        Ok(())
    })
}

/// Final time average of a terminating run. `term_times` (nullable, `len`
/// entries) receives each page's freezing step or `RR_NONE`.
///
/// # Safety
/// `g` must be a live handle, `out_y` hold `len` doubles and `term_times`
/// be null or hold `len` integers.
#[no_mangle]
pub unsafe extern "C" fn rr_simulate_terminate(
    g: *const RrGraph,
    m: f64,
    alpha: f64,
    delta: f64,
    ns: size_t,
    seed: u64,
    steps: u64,
    out_y: *mut f64,
    len: size_t,
    term_times: *mut u64,
) -> RrStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = out_buffer(out_y, len, g.matrix.dim())?;
        let x_star = reference_pagerank(&g.matrix, m)?;
        let tp = TerminationParams::new(delta, ns)?;
        let cfg = RunConfig::new(steps, steps.max(1));
        let t = run_algorithm1(&g.matrix, &x_star, &SchemeParams::new(m, alpha, seed), &tp, &cfg)?;
        buf.copy_from_slice(&t.final_y);
        if !term_times.is_null() {
            let times = std::slice::from_raw_parts_mut(term_times, len);
            for (dst, src) in times.iter_mut().zip(t.term_times.unwrap_or_default()) {
                *dst = src.unwrap_or(RR_NONE);
            }
        }
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn rr_status_string(status: RrStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RrStatus::Ok => c"ok",
        RrStatus::NullPointer => c"null pointer argument",
        RrStatus::InvalidUtf8 => c"invalid UTF-8",
        RrStatus::Parse => c"parse error",
        RrStatus::Validation => c"invalid argument",
        RrStatus::NonConvergence => c"iteration did not converge",
        RrStatus::Capacity => c"problem too large",
        RrStatus::Consistency => c"internal consistency check failed",
        RrStatus::DimensionMismatch => c"dimension mismatch",
        RrStatus::Io => c"I/O or serialization error",
        RrStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
