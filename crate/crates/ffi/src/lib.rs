//! C interface to `contact-meta`.
//!
//! Every function returns a [`CpmStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be read with
//! [`cpm_last_error_message`]. Graphs are opaque [`CpmGraph`] handles owned
//! by the caller and released with [`cpm_graph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use contact_meta::birthdeath::{complete_graph_spec, expected_hitting_times};
use contact_meta::bounds_cm::{mu0, Mu0Options, RateFunction};
use contact_meta::bounds_er::tau0_sparse;
use contact_meta::contact::{estimate_mean_extinction, ContactConfig};
use contact_meta::degree::DegreeDistribution;
use contact_meta::graph::{cut_size, gen_configuration, gen_erdos_renyi, min_cut_over_size, CutQuery, Graph};
use contact_meta::pairing::{ln_mixed_pair_prob, phi, tail_bound, PhiArgs};
use contact_meta::Error;

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    BudgetExceeded = 3,
    NoUncensoredSamples = 4,
    Inapplicable = 5,
    ParseError = 6,
    IoError = 7,
    Panic = 8,
}

/// Opaque graph handle.
pub struct CpmGraph {
    inner: Graph,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CpmStatus {
    match e {
        Error::Parameter(_) => CpmStatus::InvalidParameter,
        Error::BudgetExceeded { .. } => CpmStatus::BudgetExceeded,
        Error::NoUncensoredSamples { .. } => CpmStatus::NoUncensoredSamples,
        Error::Inapplicable(_) => CpmStatus::Inapplicable,
        Error::Parse { .. } => CpmStatus::ParseError,
        Error::Io(_) => CpmStatus::IoError,
    }
}

struct Fail(CpmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CpmStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> CpmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CpmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CpmStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `g` must be null or a live handle.
unsafe fn graph_ref<'a>(g: *const CpmGraph) -> Result<&'a Graph, Fail> {
    g.as_ref().map(|h| &h.inner).ok_or_else(|| null("graph"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cpm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cpm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

fn boxed(g: Graph) -> *mut CpmGraph {
    Box::into_raw(Box::new(CpmGraph { inner: g }))
}

/// Generates `G(n, p)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_erdos_renyi(n: usize, p: f64, seed: u64, out: *mut *mut CpmGraph) -> CpmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = gen_erdos_renyi(n, p, seed)?;
        write(out, boxed(g), "out")
    })
}

/// Generates a configuration-model graph. `dist` is `constant:d`,
/// `poisson:mu` or `empirical:p0,p1,...`.
///
/// # Safety
/// `dist` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_configuration(
    n: usize,
    dist: *const c_char,
    seed: u64,
    out: *mut *mut CpmGraph,
) -> CpmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = parse_dist(dist)?;
        let g = gen_configuration(n, &d, seed)?;
        write(out, boxed(g), "out")
    })
}

/// Builds a graph from `m` edges given as parallel arrays; repeated pairs add
/// up to a multiplicity.
///
/// # Safety
/// `us` and `vs` must each be valid for `m` reads; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_from_edges(
    n: usize,
    us: *const usize,
    vs: *const usize,
    m: usize,
    out: *mut *mut CpmGraph,
) -> CpmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (us, vs) = if m == 0 {
            (&[][..], &[][..])
        } else {
            if us.is_null() || vs.is_null() {
                return Err(null("edge array"));
            }
            (std::slice::from_raw_parts(us, m), std::slice::from_raw_parts(vs, m))
        };
        let g = Graph::from_edges(n, us.iter().zip(vs).map(|(&u, &v)| (u, v, 1)))?;
        write(out, boxed(g), "out")
    })
}

/// Reads the edge-list format from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_read(path: *const c_char, out: *mut *mut CpmGraph) -> CpmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = c_str(path, "path")?;
        let file = std::fs::File::open(path).map_err(Error::from)?;
        let g = Graph::read_edge_list(std::io::BufReader::new(file))?;
        write(out, boxed(g), "out")
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_free(g: *mut CpmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_node_count(g: *const CpmGraph, out: *mut usize) -> CpmStatus {
    guard(|| write(out, graph_ref(g)?.n_nodes(), "out"))
}

/// Number of edges counted with multiplicity.
///
/// # Safety
/// `g` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_edge_count(g: *const CpmGraph, out: *mut u64) -> CpmStatus {
    guard(|| write(out, graph_ref(g)?.edge_count(), "out"))
}

/// Edges between `nodes[0..len]` and the rest of the graph.
///
/// # Safety
/// `g` live; `nodes` valid for `len` reads; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_cut_size(
    g: *const CpmGraph,
    nodes: *const usize,
    len: usize,
    out: *mut u64,
) -> CpmStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if nodes.is_null() && len > 0 {
            return Err(null("nodes"));
        }
        let nodes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(nodes, len) };
        let q = CutQuery::new(g.n_nodes(), nodes)?;
        write(out, cut_size(g, &q)?, "out")
    })
}

/// Exact minimum cut over all subsets of size `k`, refusing with
/// `BudgetExceeded` when `C(n, k) > budget`. When `witness` is non-null it
/// receives the `k` nodes of a minimizing set.
///
/// # Safety
/// `g` live; `out` valid for writes; `witness` null or valid for `k` writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_graph_min_cut(
    g: *const CpmGraph,
    k: usize,
    budget: u64,
    out: *mut u64,
    witness: *mut usize,
) -> CpmStatus {
    guard(|| {
        let mc = min_cut_over_size(graph_ref(g)?, k, budget)?;
        if !witness.is_null() {
            ptr::copy_nonoverlapping(mc.witness.as_ptr(), witness, mc.witness.len());
        }
        write(out, mc.size, "out")
    })
}

/// Mean extinction time from all-infected over `reps` replications.
/// `t_max <= 0` disables censoring. `censored` receives the number of
/// replications cut off at `t_max`.
///
/// # Safety
/// `g` live; all out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_simulate_extinction(
    g: *const CpmGraph,
    tau: f64,
    reps: u64,
    t_max: f64,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
    censored: *mut u64,
) -> CpmStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if mean.is_null() || std_error.is_null() || censored.is_null() {
            return Err(null("output"));
        }
        let mut cfg = ContactConfig::new(tau).with_seed(seed);
        if t_max > 0.0 {
            cfg = cfg.with_t_max(t_max);
        }
        let s = estimate_mean_extinction(g, &cfg, reps)?;
        write(mean, s.mean.unwrap_or(f64::NAN), "mean")?;
        write(std_error, s.stderr.unwrap_or(f64::NAN), "std_error")?;
        write(censored, s.censored_count, "censored")
    })
}

/// `ln P(L = l)` for the mixed-pair count with `n1`, `n2` stubs.
///
/// # Safety
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_ln_mixed_pair_prob(n1: u64, n2: u64, l: u64, out: *mut f64) -> CpmStatus {
    guard(|| write(out, ln_mixed_pair_prob(n1, n2, l), "out"))
}

/// Upper bound on `P(L <= l)`.
///
/// # Safety
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_tail_bound(n1: u64, n2: u64, l: u64, out: *mut f64) -> CpmStatus {
    guard(|| write(out, tail_bound(n1, n2, l), "out"))
}

/// # Safety
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_phi(a1: f64, a2: f64, rho: f64, out: *mut f64) -> CpmStatus {
    guard(|| write(out, phi(PhiArgs::new(a1, a2, rho)?), "out"))
}

/// `ln E[T]` from all-infected for the contact process on `K_n` with
/// per-edge rate `lambda/n`, solved exactly.
///
/// # Safety
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_complete_graph_log_extinction(n: usize, lambda: f64, out: *mut f64) -> CpmStatus {
    guard(|| {
        let spec = complete_graph_spec(n, lambda)?;
        write(out, expected_hitting_times(&spec).at(n).ln(), "out")
    })
}

/// Sparse Erdős–Rényi threshold `τ₀(σ)` for `p = σ/N`.
///
/// # Safety
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_sparse_er_tau0(sigma: f64, out: *mut f64) -> CpmStatus {
    guard(|| write(out, tau0_sparse(sigma)?, "out"))
}

/// Certified lower estimate of `μ₀` for a degree law; the infection
/// threshold is `1/μ₀`. `gamma_points` of 0 selects the default grid.
///
/// # Safety
/// `dist` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cpm_mu0(dist: *const c_char, gamma_points: usize, out: *mut f64) -> CpmStatus {
    guard(|| {
        let d = parse_dist(dist)?;
        let mut opts = Mu0Options::default();
        if gamma_points > 0 {
            opts.gamma_points = gamma_points;
        }
        write(out, mu0(&RateFunction::new(d), opts)?.mu0, "out")
    })
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(CpmStatus::InvalidParameter, format!("{what} is not UTF-8")))
}

unsafe fn parse_dist(s: *const c_char) -> Result<DegreeDistribution, Fail> {
    Ok(c_str(s, "dist")?.parse()?)
}
