//! C ABI over `sepscope`.
//!
//! States and polytopes cross the boundary as opaque handles created by a
//! `*_new`/`*_from_*` function and released with the matching `*_free`.
//! Every fallible call returns a [`SepStatus`]; on failure a message is
//! available from [`sep_last_error_message`] on the same thread. Strings
//! returned through out-parameters are owned by the caller and released
//! with [`sep_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sepscope::geometry::{css_report, hull_membership_with, VertexSet};
use sepscope::separability::{is_product_with, ppt_min_eigenvalue, segment_scan_with, ScanVerdict};
use sepscope::state::vn_entropy;
use sepscope::{json, Complex64, ComplexMatrix, DensityMatrix, Error, ProductPolytope, Tolerances};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    DimMismatch = 5,
    NoFactorDims = 6,
    BadParameter = 7,
    Panic = 99,
}

/// Summary of a segment scan.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepScanResult {
    /// Some point of the segment has a negative partial transpose.
    pub entangled: bool,
    /// The verdict is decisive for these dimensions.
    pub conclusive: bool,
    /// Smallest partial-transpose eigenvalue over all sampled points.
    pub min_pt_eigenvalue: f64,
}

/// Opaque bipartite or single-system state.
pub struct SepDensity {
    inner: DensityMatrix,
}

/// Opaque vertex-represented polytope of bipartite states.
pub struct SepPolytope {
    inner: ProductPolytope,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_for(e: &Error) -> SepStatus {
    match e {
        Error::Parse(_) => SepStatus::Parse,
        Error::DimMismatch { .. } => SepStatus::DimMismatch,
        Error::NoFactorDims => SepStatus::NoFactorDims,
        Error::BadParameter(_) | Error::BadCount(_) => SepStatus::BadParameter,
        _ => SepStatus::Validation,
    }
}

fn fail(status: SepStatus, msg: impl Into<String>) -> SepStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard<F>(f: F) -> SepStatus
where
    F: FnOnce() -> Result<(), SepStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SepStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(SepStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

fn lib<T>(r: sepscope::Result<T>) -> Result<T, SepStatus> {
    r.map_err(|e| fail(status_for(&e), e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SepStatus> {
    if p.is_null() {
        return Err(fail(SepStatus::NullPointer, "string argument is NULL"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(SepStatus::InvalidUtf8, e.to_string()))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, SepStatus> {
    p.as_ref().ok_or_else(|| fail(SepStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), SepStatus> {
    if out.is_null() {
        return Err(fail(SepStatus::NullPointer, "output pointer is NULL"));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sep_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a state from its JSON form (`{"dims": [...], "matrix": [...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sep_density_from_json(json: *const c_char, out: *mut *mut SepDensity) -> SepStatus {
    guard(|| {
        let text = str_arg(json)?;
        let inner = lib(json::parse_state(text))?;
        write_out(out, Box::into_raw(Box::new(SepDensity { inner })))
    })
}

/// Builds a state from row-major real and imaginary parts of a `dim × dim`
/// matrix. Pass `n = k = 0` for a state without a bipartite split.
///
/// # Safety
/// `re` and `im` must each point to `dim * dim` readable doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sep_density_from_parts(
    re: *const f64,
    im: *const f64,
    dim: usize,
    n: usize,
    k: usize,
    out: *mut *mut SepDensity,
) -> SepStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(fail(SepStatus::NullPointer, "matrix data is NULL"));
        }
        if dim == 0 {
            return Err(fail(SepStatus::BadParameter, "dim must be positive"));
        }
        let len = dim.checked_mul(dim).ok_or_else(|| fail(SepStatus::BadParameter, "dim too large"))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i * dim + j], im[i * dim + j]));
        let split = if n == 0 && k == 0 { None } else { Some((n, k)) };
        let inner = lib(DensityMatrix::new(m, split))?;
        write_out(out, Box::into_raw(Box::new(SepDensity { inner })))
    })
}

/// The two-qubit Werner state `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sep_werner_new(p: f64, out: *mut *mut SepDensity) -> SepStatus {
    guard(|| {
        let inner = lib(sepscope::families::make_werner(p))?;
        write_out(out, Box::into_raw(Box::new(SepDensity { inner })))
    })
}

/// Releases a state. NULL is ignored.
///
/// # Safety
/// `rho` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sep_density_free(rho: *mut SepDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Total Hilbert-space dimension, or 0 for NULL.
///
/// # Safety
/// `rho` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sep_density_dim(rho: *const SepDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.inner.dim())
}

/// `‖ρ − ρᴬ⊗ρᴮ‖²_HS`.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sep_sm_measure(rho: *const SepDensity, out: *mut f64) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        write_out(out, lib(sepscope::sm_measure(&rho.inner))?)
    })
}

/// Smallest eigenvalue of the partial transpose on the second factor.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sep_ppt_min_eigenvalue(rho: *const SepDensity, out: *mut f64) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        write_out(out, lib(ppt_min_eigenvalue(&rho.inner))?)
    })
}

/// Von Neumann entropy in nats.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sep_vn_entropy(rho: *const SepDensity, out: *mut f64) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        write_out(out, vn_entropy(&rho.inner))
    })
}

/// Whether `ρ = ρᴬ⊗ρᴮ` within the default product tolerance.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sep_is_product(rho: *const SepDensity, out: *mut bool) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        write_out(out, lib(is_product_with(&rho.inner, Tolerances::default().product))?)
    })
}

/// PPT scan over `n_points` points of the segment from `Ω(ρ)` to `ρ`.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sep_segment_scan(
    rho: *const SepDensity,
    n_points: usize,
    out: *mut SepScanResult,
) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        let scan = lib(segment_scan_with(&rho.inner, n_points, &Tolerances::default()))?;
        let min = scan.min_pt_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        write_out(
            out,
            SepScanResult {
                entangled: scan.verdict == ScanVerdict::EntangledDetected,
                conclusive: scan.conclusive,
                min_pt_eigenvalue: min,
            },
        )
    })
}

/// Fano decomposition as JSON; free the result with [`sep_string_free`].
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sep_fano_json(rho: *const SepDensity, out: *mut *mut c_char) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        let f = lib(sepscope::fano_decompose(&rho.inner))?;
        write_out(out, into_c_string(json::fano_to_json(&f)))
    })
}

/// Parses a polytope from `{"factor_dims": [N, K], "vertices": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sep_polytope_from_json(json: *const c_char, out: *mut *mut SepPolytope) -> SepStatus {
    guard(|| {
        let text = str_arg(json)?;
        let inner = lib(json::parse_polytope(text))?;
        write_out(out, Box::into_raw(Box::new(SepPolytope { inner })))
    })
}

/// Releases a polytope. NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sep_polytope_free(p: *mut SepPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sep_polytope_vertex_count(p: *const SepPolytope) -> usize {
    p.as_ref().map_or(0, |p| p.inner.len())
}

/// Whether `Λ∘τ(P) = P`; `max_residual` (may be NULL) receives the largest
/// hull residual seen.
///
/// # Safety
/// `p` must be a live handle, `out` writable, `max_residual` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sep_polytope_is_css(
    p: *const SepPolytope,
    out: *mut bool,
    max_residual: *mut f64,
) -> SepStatus {
    guard(|| {
        let p = ref_arg(p, "polytope")?;
        let report = css_report(&p.inner, &Tolerances::default());
        if !max_residual.is_null() {
            max_residual.write(report.max_residual);
        }
        write_out(out, report.is_css)
    })
}

/// Hull membership of `rho` in `p`; `residual` (may be NULL) receives the
/// HS distance to the hull.
///
/// # Safety
/// Both handles must be live, `inside` writable, `residual` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sep_hull_membership(
    rho: *const SepDensity,
    p: *const SepPolytope,
    inside: *mut bool,
    residual: *mut f64,
) -> SepStatus {
    guard(|| {
        let rho = ref_arg(rho, "state")?;
        let p = ref_arg(p, "polytope")?;
        if p.inner.state_dim() != rho.inner.dim() {
            return Err(fail(SepStatus::DimMismatch, "state and polytope dimensions differ"));
        }
        let cert = lib(hull_membership_with(&rho.inner, &p.inner, Tolerances::default().hull))?;
        if !residual.is_null() {
            residual.write(cert.residual);
        }
        write_out(inside, cert.inside)
    })
}
