//! C ABI for `laplacian-sketch`.
//!
//! Graphs and sketches are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`LskStatus`]; on failure the
//! message is available from [`lsk_last_error`] on the same thread until the
//! next failing call. Panics are caught at the boundary and reported as
//! `LSK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use laplacian_sketch::sketch::{build_sketch, Algorithm, Sketch};
use laplacian_sketch::sketchfile::{load, save};
use laplacian_sketch::textio::read_edge_list;
use laplacian_sketch::{quadratic_form, BuildOptions, SketchError, SketchParams, WeightedGraph};

/// Weighted undirected graph.
pub struct LskGraph(WeightedGraph);

/// Replicated sketch answering median queries.
pub struct LskSketch(Sketch);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LskStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidEdge = 3,
    DimensionMismatch = 4,
    Parse = 5,
    Format = 6,
    Io = 7,
    Numerical = 8,
    Invariant = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LskAlgorithm {
    Basic = 0,
    Improved = 1,
}

/// Mirrors the library's size report; `records = stored_edges + sample_records`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LskSizeReport {
    pub stored_edges: u64,
    pub sample_records: u64,
    pub draws: u64,
    pub degree_entries: u64,
    pub records: u64,
    pub stored_edge_bits: u64,
    pub sample_bits: u64,
    pub degree_table_bits: u64,
    pub total_bits: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &SketchError) -> LskStatus {
    match e {
        SketchError::DimensionMismatch { .. } => LskStatus::DimensionMismatch,
        SketchError::InvalidEdge { .. } => LskStatus::InvalidEdge,
        SketchError::InvalidParameter(_)
        | SketchError::GraphTooLarge { .. }
        | SketchError::Disconnected { .. }
        | SketchError::WeightSpread { .. }
        | SketchError::WeightRatio { .. } => LskStatus::InvalidArgument,
        SketchError::EigenSolver(_) | SketchError::SparsifierVerification { .. } => LskStatus::Numerical,
        SketchError::RecursionDepth { .. } | SketchError::Invariant(_) => LskStatus::Invariant,
        SketchError::Parse { .. } => LskStatus::Parse,
        SketchError::Format(_) => LskStatus::Format,
        SketchError::Io(_) => LskStatus::Io,
    }
}

/// Runs `f`, mapping errors and panics to a status code.
fn guard(f: impl FnOnce() -> Result<(), (LskStatus, String)>) -> LskStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LskStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LskStatus::Panic
        }
    }
}

fn lib_err(e: SketchError) -> (LskStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (LskStatus, String) {
    (LskStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (LskStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (LskStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (LskStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lsk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph on `n` vertices from `m` edges `(us[i], vs[i], ws[i])`.
/// Repeated pairs are merged by summing weights.
///
/// # Safety
/// `us`, `vs`, `ws` must point to `m` readable elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_graph_new(
    n: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    m: usize,
    out: *mut *mut LskGraph,
) -> LskStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (us, vs, ws) = (slice_arg(us, m, "us")?, slice_arg(vs, m, "vs")?, slice_arg(ws, m, "ws")?);
        let g = WeightedGraph::new(n, (0..m).map(|i| (us[i], vs[i], ws[i]))).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LskGraph(g)));
        Ok(())
    })
}

/// Reads a `u v w` edge list.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_graph_load(path: *const c_char, out: *mut *mut LskGraph) -> LskStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = read_edge_list(path_arg(path)?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LskGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lsk_graph_free(g: *mut LskGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn lsk_graph_vertex_count(g: *const LskGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn lsk_graph_edge_count(g: *const LskGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Exact `x^T L x`.
///
/// # Safety
/// `g` must be a live handle, `x` must point to `len` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_quadratic_form(
    g: *const LskGraph,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> LskStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = quadratic_form(&g.0, slice_arg(x, len, "x")?).map_err(lib_err)?;
        Ok(())
    })
}

/// Builds a replicated sketch with default constants.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_build(
    g: *const LskGraph,
    algorithm: LskAlgorithm,
    eps: f64,
    delta: f64,
    seed: u64,
    out: *mut *mut LskSketch,
) -> LskStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let params = SketchParams::new(eps, delta).map_err(lib_err)?;
        let algo = match algorithm {
            LskAlgorithm::Basic => Algorithm::Basic,
            LskAlgorithm::Improved => Algorithm::Improved,
        };
        let sk = build_sketch(&g.0, algo, &params, &BuildOptions::default(), seed).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LskSketch(sk)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_load(path: *const c_char, out: *mut *mut LskSketch) -> LskStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sk = load(path_arg(path)?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LskSketch(sk)));
        Ok(())
    })
}

/// # Safety
/// `sk` must be a live handle; `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_save(sk: *const LskSketch, path: *const c_char) -> LskStatus {
    guard(|| {
        let sk = sk.as_ref().ok_or_else(|| null("sketch"))?;
        save(&sk.0, path_arg(path)?).map_err(lib_err)
    })
}

/// Median-of-replicas estimate of `x^T L x`. Safe to call concurrently on
/// one handle.
///
/// # Safety
/// `sk` must be a live handle, `x` must point to `len` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_query(
    sk: *const LskSketch,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> LskStatus {
    guard(|| {
        let sk = sk.as_ref().ok_or_else(|| null("sketch"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = sk.0.query(slice_arg(x, len, "x")?).map_err(lib_err)?.estimate;
        Ok(())
    })
}

/// # Safety
/// `sk` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_size(sk: *const LskSketch, out: *mut LskSizeReport) -> LskStatus {
    guard(|| {
        let sk = sk.as_ref().ok_or_else(|| null("sketch"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = sk.0.size();
        *out = LskSizeReport {
            stored_edges: s.stored_edges,
            sample_records: s.sample_records,
            draws: s.draws,
            degree_entries: s.degree_entries,
            records: s.records(),
            stored_edge_bits: s.stored_edge_bits,
            sample_bits: s.sample_bits,
            degree_table_bits: s.degree_table_bits,
            total_bits: s.total_bits(),
        };
        Ok(())
    })
}

/// # Safety
/// `sk` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_vertex_count(sk: *const LskSketch) -> usize {
    sk.as_ref().map_or(0, |s| s.0.n)
}

/// # Safety
/// `sk` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_replica_count(sk: *const LskSketch) -> usize {
    sk.as_ref().map_or(0, |s| s.0.replicas.len())
}

/// # Safety
/// `sk` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lsk_sketch_free(sk: *mut LskSketch) {
    if !sk.is_null() {
        drop(Box::from_raw(sk));
    }
}
