//! C ABI over `polyzeta`.
//!
//! Every fallible function returns a [`PzStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`pz_last_error`] on the same thread. Panics are caught at the boundary
//! and reported as `PZ_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyzeta::combinatorics::AdmissibleTuple;
use polyzeta::monte_carlo::{estimate_S, sample_stream, McConfig};
use polyzeta::quadrature::{assemble_formula_with, direct_i, ProbabilityBreakdown, TupleConstant};
use polyzeta::series::evaluate_series;
use polyzeta::special::{cdf, inverse_cdf_xi, DistributionKind, Kind};
use polyzeta::{Error, EvalResult, Method, QuadConfig, SeriesSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PzStatus {
    Ok = 0,
    InvalidParameter = 1,
    DomainViolation = 2,
    ToleranceUnachievable = 3,
    NonConvergence = 4,
    UnsupportedDimension = 5,
    NonFinite = 6,
    RootSearch = 7,
    NullPointer = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PzMethod {
    Series = 0,
    DirectQuad = 1,
    PolytopeFormula = 2,
    MonteCarlo = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PzDist {
    Xi = 0,
    Theta = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PzResult {
    pub value: f64,
    pub error_estimate: f64,
    pub work: u64,
    pub method: PzMethod,
}

/// Opaque result of the polytope formula, with per-tuple terms.
pub struct PzBreakdown {
    inner: ProbabilityBreakdown,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> PzStatus {
    match e {
        Error::InvalidParameter { .. } => PzStatus::InvalidParameter,
        Error::DomainViolation(_) => PzStatus::DomainViolation,
        Error::ToleranceUnachievable { .. } => PzStatus::ToleranceUnachievable,
        Error::NonConvergence { .. } => PzStatus::NonConvergence,
        Error::UnsupportedDimension { .. } => PzStatus::UnsupportedDimension,
        Error::NonFinite { .. } => PzStatus::NonFinite,
        Error::RootSearch { .. } => PzStatus::RootSearch,
    }
}

enum Failure {
    Lib(Error),
    Status(PzStatus, &'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            PzStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            PzStatus::Panic
        }
    }
}

fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either null or a valid, aligned, writable pointer.
    unsafe { p.as_mut() }.ok_or(Failure::Status(
        PzStatus::NullPointer,
        "null output pointer",
    ))
}

fn breakdown_ref<'a>(p: *const PzBreakdown) -> Result<&'a PzBreakdown, Failure> {
    // SAFETY: non-null handles come from `pz_formula` and are live until freed.
    unsafe { p.as_ref() }.ok_or(Failure::Status(
        PzStatus::NullPointer,
        "null breakdown handle",
    ))
}

fn to_c(r: &EvalResult) -> PzResult {
    PzResult {
        value: r.value,
        error_estimate: r.error_estimate,
        work: r.work,
        method: match r.method {
            Method::Series => PzMethod::Series,
            Method::DirectQuad => PzMethod::DirectQuad,
            Method::PolytopeFormula => PzMethod::PolytopeFormula,
            Method::MonteCarlo => PzMethod::MonteCarlo,
        },
    }
}

fn kind(d: PzDist) -> Kind {
    match d {
        PzDist::Xi => Kind::Xi,
        PzDist::Theta => Kind::Theta,
    }
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn pz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn pz_status_name(status: PzStatus) -> *const c_char {
    let name: &'static CStr = match status {
        PzStatus::Ok => c"ok",
        PzStatus::InvalidParameter => c"invalid_parameter",
        PzStatus::DomainViolation => c"domain_violation",
        PzStatus::ToleranceUnachievable => c"tolerance_unachievable",
        PzStatus::NonConvergence => c"non_convergence",
        PzStatus::UnsupportedDimension => c"unsupported_dimension",
        PzStatus::NonFinite => c"non_finite",
        PzStatus::RootSearch => c"root_search",
        PzStatus::NullPointer => c"null_pointer",
        PzStatus::BufferTooSmall => c"buffer_too_small",
        PzStatus::Panic => c"panic",
    };
    name.as_ptr()
}

/// S(k,a) by the accelerated two-sided series.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_series(k: u32, a: u32, tol: f64, out: *mut PzResult) -> PzStatus {
    guard(|| {
        let out = out_ref(out)?;
        let r = evaluate_series(&SeriesSpec::new(k, a)?, tol)?;
        *out = to_c(&r);
        Ok(())
    })
}

/// S(k,a) as the unit-cube integral, `k <= 3`.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_direct_quad(k: u32, a: u32, tol: f64, out: *mut PzResult) -> PzStatus {
    guard(|| {
        let out = out_ref(out)?;
        let r = direct_i(&SeriesSpec::new(k, a)?, &QuadConfig::with_tol(tol)?)?;
        *out = to_c(&r);
        Ok(())
    })
}

/// S(k,a) by the polytope formula, `k <= 6`. On success `*out` owns a handle
/// that must be released with [`pz_breakdown_free`]. `printed_constant`
/// selects the diagnostic constant `(π/a)sin(π/a)`.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_formula(
    k: u32,
    a: u32,
    tol: f64,
    printed_constant: bool,
    out: *mut *mut PzBreakdown,
) -> PzStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let constant = if printed_constant {
            TupleConstant::Printed
        } else {
            TupleConstant::Density
        };
        let inner = assemble_formula_with(
            &SeriesSpec::new(k, a)?,
            &QuadConfig::with_tol(tol)?,
            constant,
        )?;
        *out = Box::into_raw(Box::new(PzBreakdown { inner }));
        Ok(())
    })
}

/// Release a handle from [`pz_formula`]. Null is ignored.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_breakdown_free(handle: *mut PzBreakdown) {
    if !handle.is_null() {
        // SAFETY: the handle was produced by `Box::into_raw` in `pz_formula`
        // and is freed at most once.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Assembled value of a breakdown.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_breakdown_result(
    handle: *const PzBreakdown,
    out: *mut PzResult,
) -> PzStatus {
    guard(|| {
        let b = breakdown_ref(handle)?;
        *out_ref(out)? = to_c(&b.inner.to_eval_result());
        Ok(())
    })
}

/// `ψ(1)^k`, `φ(1)^k` and the total probability.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_breakdown_probabilities(
    handle: *const PzBreakdown,
    easy_xi: *mut f64,
    easy_theta: *mut f64,
    total: *mut f64,
) -> PzStatus {
    guard(|| {
        let b = &breakdown_ref(handle)?.inner;
        *out_ref(easy_xi)? = b.easy_xi;
        *out_ref(easy_theta)? = b.easy_theta;
        *out_ref(total)? = b.total_probability;
        Ok(())
    })
}

/// Number of admissible tuples in a breakdown; 0 for a null handle.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_breakdown_len(handle: *const PzBreakdown) -> usize {
    breakdown_ref(handle).map_or(0, |b| b.inner.contributions.len())
}

/// Tuple `index`: writes its length to `*len` and, when `capacity` allows,
/// its 1-based indices and exponents into the two buffers. Passing
/// `capacity = 0` with null buffers queries the length.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_breakdown_tuple(
    handle: *const PzBreakdown,
    index: usize,
    indices: *mut u32,
    alphas: *mut u32,
    capacity: usize,
    len: *mut usize,
) -> PzStatus {
    guard(|| {
        let tuple: &AdmissibleTuple = &tuple_at(handle, index)?.tuple;
        let n = tuple.len();
        *out_ref(len)? = n;
        if capacity == 0 && indices.is_null() && alphas.is_null() {
            return Ok(());
        }
        if capacity < n {
            return Err(Failure::Status(
                PzStatus::BufferTooSmall,
                "capacity below tuple length",
            ));
        }
        if indices.is_null() || alphas.is_null() {
            return Err(Failure::Status(PzStatus::NullPointer, "null tuple buffer"));
        }
        // SAFETY: both buffers are non-null and hold at least `capacity >= n` elements.
        let (ix, al) = unsafe {
            (
                std::slice::from_raw_parts_mut(indices, n),
                std::slice::from_raw_parts_mut(alphas, n),
            )
        };
        for (slot, &r) in ix.iter_mut().zip(&tuple.indices) {
            *slot = r as u32;
        }
        al.copy_from_slice(&tuple.alphas);
        Ok(())
    })
}

/// `J` and `K` for tuple `index`.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_breakdown_terms(
    handle: *const PzBreakdown,
    index: usize,
    j: *mut f64,
    k: *mut f64,
) -> PzStatus {
    guard(|| {
        let c = tuple_at(handle, index)?;
        *out_ref(j)? = c.j;
        *out_ref(k)? = c.k;
        Ok(())
    })
}

fn tuple_at<'a>(
    handle_ptr: *const PzBreakdown,
    index: usize,
) -> Result<&'a polyzeta::quadrature::TupleContribution, Failure> {
    breakdown_ref(handle_ptr)?
        .inner
        .contributions
        .get(index)
        .ok_or(Failure::Status(
            PzStatus::InvalidParameter,
            "tuple index out of range",
        ))
}

/// S(k,a) by Monte Carlo with `samples` trials per probability.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_monte_carlo(
    k: u32,
    a: u32,
    seed: u64,
    samples: u64,
    out: *mut PzResult,
) -> PzStatus {
    guard(|| {
        let out = out_ref(out)?;
        let m = estimate_S(&SeriesSpec::new(k, a)?, &McConfig::new(seed, samples))?;
        *out = to_c(&m.to_eval_result());
        Ok(())
    })
}

/// ψ(t) for `PZ_DIST_XI`, φ(t) for `PZ_DIST_THETA`.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_cdf(a: u32, dist: PzDist, t: f64, out: *mut f64) -> PzStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = cdf(DistributionKind::new(kind(dist), a)?, t)?;
        Ok(())
    })
}

/// ψ⁻¹(u) for `u` in (0, 1).
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_inverse_cdf_xi(a: u32, u: f64, out: *mut f64) -> PzStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = inverse_cdf_xi(a, u)?;
        Ok(())
    })
}

/// Fill `buffer[0..n]` with the seeded sample stream of Ξ or Θ.
///
/// # Safety
/// Pointer arguments must be null or valid for the reads and writes described above.
#[no_mangle]
pub unsafe extern "C" fn pz_sample(
    a: u32,
    dist: PzDist,
    seed: u64,
    buffer: *mut f64,
    n: usize,
) -> PzStatus {
    guard(|| {
        if buffer.is_null() {
            return Err(Failure::Status(PzStatus::NullPointer, "null sample buffer"));
        }
        let values = sample_stream(DistributionKind::new(kind(dist), a)?, n, seed)?;
        // SAFETY: `buffer` is non-null and holds at least `n` doubles.
        unsafe { std::slice::from_raw_parts_mut(buffer, n) }.copy_from_slice(&values);
        Ok(())
    })
}
