//! C ABI for the certification library.
//!
//! Objects cross the boundary as opaque handles created by `agler_*_new`
//! style constructors and released by the matching `*_free`. Every fallible
//! call returns an [`AglerCode`]; on a negative code the message is available
//! from [`agler_last_error`] on the same thread. Strings returned by the
//! library are owned by the caller and released with [`agler_string_free`].
//! Panics never unwind across the boundary; they surface as
//! [`AglerCode::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use agler::agler::{
    agler_radius, certify_with_matrix, degree4_closed_form, extract_certificate, verify_certificate, AglerConfig,
    CertReport, CertStatus, RadiusOptions, SosCertificate,
};
use agler::kummert::{kummert_certificate, verify_kummert, KummertOptions, KummertReport};
use agler::poly::{symmetrize, MultiAffine3Poly, SymMultiAffinePoly, UniPoly};
use agler::{Complex64, Error};

/// Result of a library call. Non-negative values are successful outcomes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AglerCode {
    Ok = 0,
    /// The call succeeded and the polynomial is not certified.
    NotCertified = 1,
    NullPointer = -1,
    InvalidInput = -2,
    Unstable = -3,
    NoConvergence = -4,
    DegreeCap = -5,
    Json = -6,
    Numerical = -7,
    Panic = -8,
}

/// Verdict of the PSD test.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AglerStatus {
    AglerDenominator = 0,
    Boundary = 1,
    NotCertified = 2,
}

impl From<CertStatus> for AglerStatus {
    fn from(s: CertStatus) -> Self {
        match s {
            CertStatus::AglerDenominator => Self::AglerDenominator,
            CertStatus::Boundary => Self::Boundary,
            CertStatus::NotCertified => Self::NotCertified,
        }
    }
}

/// Symmetric multi-affine polynomial.
pub struct AglerPoly {
    inner: SymMultiAffinePoly,
}

/// Certification outcome, with the certificate when one exists.
pub struct AglerReport {
    report: CertReport,
    certificate: Option<SosCertificate>,
}

/// Three-variable decomposition and its sampled residual.
pub struct AglerKummert {
    report: KummertReport,
    residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn code_of(e: &Error) -> AglerCode {
    match e {
        Error::Unstable { .. } | Error::NotPositive { .. } => AglerCode::Unstable,
        Error::NoConvergence { .. } => AglerCode::NoConvergence,
        Error::DegreeCap { .. } => AglerCode::DegreeCap,
        Error::Json(_) => AglerCode::Json,
        Error::NotPsd { .. } | Error::Pole(_) | Error::BlockStructure { .. } => AglerCode::Numerical,
        _ => AglerCode::InvalidInput,
    }
}

struct Failure(AglerCode, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AglerCode::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure and converting panics.
fn guard(f: impl FnOnce() -> Result<AglerCode, Failure>) -> AglerCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(code)) => code,
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("panic inside the library");
            AglerCode::Panic
        }
    }
}

/// Reads `len` complex values from split real and imaginary arrays; a null
/// `im` means all imaginary parts are zero.
unsafe fn read_complex(re: *const f64, im: *const f64, len: usize) -> Result<Vec<Complex64>, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(im, len))
    };
    Ok((0..len)
        .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect())
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn agler_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn agler_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be null or a pointer returned by a `*_to_json` function that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn agler_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a polynomial from its `len = d + 1` weights.
///
/// # Safety
/// `re` must point to `len` doubles; `im` must be null or point to `len`
/// doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn agler_poly_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut AglerPoly,
) -> AglerCode {
    guard(|| {
        let inner = SymMultiAffinePoly::new(read_complex(re, im, len)?)?;
        write_out(out, AglerPoly { inner })?;
        Ok(AglerCode::Ok)
    })
}

/// Symmetrizes the univariate polynomial with `len` coefficients into `d`
/// variables.
///
/// # Safety
/// As for [`agler_poly_new`].
#[no_mangle]
pub unsafe extern "C" fn agler_poly_symmetrize(
    re: *const f64,
    im: *const f64,
    len: usize,
    d: usize,
    out: *mut *mut AglerPoly,
) -> AglerCode {
    guard(|| {
        let q = UniPoly::new(read_complex(re, im, len)?)?;
        write_out(
            out,
            AglerPoly {
                inner: symmetrize(&q, d)?,
            },
        )?;
        Ok(AglerCode::Ok)
    })
}

/// Parses `{"d": ..., "weights": [[re, im], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn agler_poly_from_json(json: *const c_char, out: *mut *mut AglerPoly) -> AglerCode {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(AglerCode::InvalidInput, e.to_string()))?;
        let inner: SymMultiAffinePoly = serde_json::from_str(text).map_err(Error::from)?;
        write_out(out, AglerPoly { inner })?;
        Ok(AglerCode::Ok)
    })
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn agler_poly_degree(p: *const AglerPoly) -> usize {
    p.as_ref().map_or(0, |p| p.inner.d())
}

/// # Safety
/// `p` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn agler_poly_free(p: *mut AglerPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the PSD test with band `tol` (non-positive selects the default). When
/// certified, extracts the certificate and samples its residual at `samples`
/// points from `seed`. Returns `Ok` or `NotCertified` with a report in `out`.
///
/// # Safety
/// `p` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn agler_certify(
    p: *const AglerPoly,
    tol: f64,
    samples: usize,
    seed: u64,
    out: *mut *mut AglerReport,
) -> AglerCode {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let mut cfg = AglerConfig::default();
        if tol > 0.0 {
            cfg.tol = tol;
        }
        let (mut report, m) = certify_with_matrix(&p.inner, &cfg)?;
        let certificate = if report.status.is_certified() {
            let cert = extract_certificate(&m, cfg.tol)?;
            report.residual = Some(verify_certificate(&p.inner, &cert, samples, seed)?);
            Some(cert)
        } else {
            None
        };
        let code = if report.status.is_certified() {
            AglerCode::Ok
        } else {
            AglerCode::NotCertified
        };
        write_out(out, AglerReport { report, certificate })?;
        Ok(code)
    })
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn agler_report_status(r: *const AglerReport) -> AglerStatus {
    r.as_ref().map_or(AglerStatus::NotCertified, |r| r.report.status.into())
}

/// Smallest eigenvalue of the subset matrix; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn agler_report_min_eigenvalue(r: *const AglerReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.report.min_eigenvalue)
}

/// Sampled certificate residual; NaN when there is no certificate.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn agler_report_residual(r: *const AglerReport) -> f64 {
    r.as_ref().and_then(|r| r.report.residual).unwrap_or(f64::NAN)
}

/// Number of squares in the certificate; 0 when there is none.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn agler_report_rank(r: *const AglerReport) -> usize {
    r.as_ref().and_then(|r| r.certificate.as_ref()).map_or(0, |c| c.rank)
}

/// `{"report": ..., "certificate": ... | null}`; null on failure.
///
/// # Safety
/// `r` must be a live handle. Free the result with [`agler_string_free`].
#[no_mangle]
pub unsafe extern "C" fn agler_report_to_json(r: *const AglerReport) -> *mut c_char {
    let Some(r) = r.as_ref() else {
        set_error("report is null");
        return ptr::null_mut();
    };
    let value = serde_json::json!({ "report": r.report, "certificate": r.certificate });
    to_c_string(value.to_string())
}

/// # Safety
/// `r` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn agler_report_free(r: *mut AglerReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Closed-form four-variable test.
///
/// # Safety
/// `p` must be a live handle; `lhs`, `rhs` and `pass` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn agler_degree4(
    p: *const AglerPoly,
    tol: f64,
    lhs: *mut f64,
    rhs: *mut f64,
    pass: *mut bool,
) -> AglerCode {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        if lhs.is_null() || rhs.is_null() || pass.is_null() {
            return Err(null("output"));
        }
        let check = degree4_closed_form(&p.inner, tol)?;
        *lhs = check.lhs;
        *rhs = check.rhs;
        *pass = check.pass;
        Ok(AglerCode::Ok)
    })
}

/// Agler radius with the default scan; `r_hi` not finite or non-positive
/// selects the stability radius.
///
/// # Safety
/// `p` must be a live handle; `radius` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn agler_radius_scan(p: *const AglerPoly, r_hi: f64, radius: *mut f64) -> AglerCode {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        if radius.is_null() {
            return Err(null("radius"));
        }
        let opts = RadiusOptions {
            r_hi: (r_hi.is_finite() && r_hi > 0.0).then_some(r_hi),
            ..RadiusOptions::default()
        };
        *radius = agler_radius(&p.inner, &opts)?.radius;
        Ok(AglerCode::Ok)
    })
}

/// Three-variable decomposition of the polynomial with coefficients indexed
/// by bitmask (bit 0: `z1`, bit 1: `z2`, bit 2: `z3`).
///
/// # Safety
/// `re` must point to 8 doubles; `im` must be null or point to 8 doubles;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn agler_kummert(
    re: *const f64,
    im: *const f64,
    samples: usize,
    seed: u64,
    out: *mut *mut AglerKummert,
) -> AglerCode {
    guard(|| {
        let coeffs: [Complex64; 8] = read_complex(re, im, 8)?.try_into().expect("eight values");
        let p = MultiAffine3Poly::new(coeffs)?;
        let opts = KummertOptions {
            seed,
            ..KummertOptions::default()
        };
        let report = kummert_certificate(&p, &opts)?;
        let residual = verify_kummert(&p, &report.certificate, samples, seed)?;
        write_out(out, AglerKummert { report, residual })?;
        Ok(AglerCode::Ok)
    })
}

/// Sampled decomposition residual; NaN for a null handle.
///
/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn agler_kummert_residual(k: *const AglerKummert) -> f64 {
    k.as_ref().map_or(f64::NAN, |k| k.residual)
}

/// Full report as JSON; null on failure.
///
/// # Safety
/// `k` must be a live handle. Free the result with [`agler_string_free`].
#[no_mangle]
pub unsafe extern "C" fn agler_kummert_to_json(k: *const AglerKummert) -> *mut c_char {
    let Some(k) = k.as_ref() else {
        set_error("decomposition is null");
        return ptr::null_mut();
    };
    match serde_json::to_string(&k.report) {
        Ok(s) => to_c_string(s),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `k` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn agler_kummert_free(k: *mut AglerKummert) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}
