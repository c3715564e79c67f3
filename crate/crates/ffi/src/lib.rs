//! C ABI over the `sosident` certificates.
//!
//! Every entry point returns an [`SosStatus`]; results come back through out
//! pointers. Reports are opaque handles released with their `_free`
//! function. On failure, [`sos_last_error`] describes the error for the
//! calling thread until its next call into the library.
//!
//! A modulus of 0 selects the default, 101.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sosident::contact::{generic_identifiability, HessianMode, IdentifiabilityCertificate};
use sosident::gf::{Modulus, DEFAULT_MODULUS};
use sosident::poly::{parse_poly_json, HomogeneousPoly};
use sosident::secant::{secant_dim_sample, DimensionReport, DimensionVerdict, SecantParams};
use sosident::{generic_rank, middle_cat_rank, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SosStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    OddDegree = 3,
    BadModulus = 4,
    NotSubgeneric = 5,
    DependentInput = 6,
    Parse = 7,
    Arithmetic = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SosHessianMode {
    Combination = 0,
    FullStack = 1,
}

impl From<SosHessianMode> for HessianMode {
    fn from(m: SosHessianMode) -> Self {
        match m {
            SosHessianMode::Combination => HessianMode::RandomCombination,
            SosHessianMode::FullStack => HessianMode::FullStack,
        }
    }
}

/// Identifiability certificate.
pub struct SosCertificate(IdentifiabilityCertificate);

/// Secant dimension report.
pub struct SosDimensionReport(DimensionReport);

/// A form over Z/p.
pub struct SosPoly(HomogeneousPoly);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SosStatus {
    match e {
        Error::OddDegree(_) => SosStatus::OddDegree,
        Error::NotPrime(_) | Error::BadModulus { .. } | Error::NoImaginaryUnit(_) | Error::ModulusMismatch(..) => {
            SosStatus::BadModulus
        }
        Error::NotSubgeneric { .. } => SosStatus::NotSubgeneric,
        Error::DependentInput => SosStatus::DependentInput,
        Error::Parse(_) => SosStatus::Parse,
        Error::DivisionByZero(_) | Error::NotApolar => SosStatus::Arithmetic,
        _ => SosStatus::InvalidParams,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SosStatus>) -> SosStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SosStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SosStatus::Panic
        }
    }
}

fn lift<T>(r: sosident::Result<T>) -> Result<T, SosStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, SosStatus> {
    // SAFETY: callers pass either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error("null output pointer".into());
        SosStatus::NullPointer
    })
}

fn in_ref<'a, T>(p: *const T) -> Result<&'a T, SosStatus> {
    // SAFETY: callers pass either null or a handle obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| {
        set_error("null handle".into());
        SosStatus::NullPointer
    })
}

fn modulus(p: u32) -> Result<Modulus, SosStatus> {
    lift(Modulus::new(if p == 0 { DEFAULT_MODULUS } else { p }))
}

fn json_string<T: serde::Serialize>(value: &T) -> Result<*mut c_char, SosStatus> {
    let text = serde_json::to_string(value).map_err(|e| {
        set_error(e.to_string());
        SosStatus::InvalidParams
    })?;
    Ok(CString::new(text).expect("json has no nul").into_raw())
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library.
#[no_mangle]
pub extern "C" fn sos_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by a `_to_json` function.
///
/// # Safety
/// `s` must be null or a string from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sos_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `r N - C(r, 2)` with `N = C(d/2 + n, n)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sos_expected_dim(n: usize, d: usize, r: usize, out: *mut usize) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = lift(SecantParams::new(n, d, r))?.expected_dim();
        Ok(())
    })
}

/// Least `r` whose expected dimension fills the degree-`d` forms.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sos_generic_rank(n: usize, d: usize, out: *mut usize) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = lift(generic_rank(d, n))?;
        Ok(())
    })
}

/// Generic identifiability certificate for `(n, d, r)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sos_identifiable(
    n: usize,
    d: usize,
    r: usize,
    p: u32,
    seed: u64,
    trials: usize,
    hessian: SosHessianMode,
    out: *mut *mut SosCertificate,
) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let params = lift(SecantParams::new(n, d, r))?;
        let cert = lift(generic_identifiability(&params, modulus(p)?, seed, trials, hessian.into()))?;
        *out = Box::into_raw(Box::new(SosCertificate(cert)));
        Ok(())
    })
}

/// 1 when certified, 0 when inconclusive, -1 for a null handle.
///
/// # Safety
/// `cert` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sos_certificate_is_certified(cert: *const SosCertificate) -> i32 {
    cert.as_ref().map_or(-1, |c| c.0.is_certified() as i32)
}

/// Writes the Terracini, Hessian and target ranks.
///
/// # Safety
/// `cert` must be null or a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sos_certificate_ranks(
    cert: *const SosCertificate,
    terracini_rank: *mut usize,
    hessian_rank: *mut usize,
    target_rank: *mut usize,
) -> SosStatus {
    guard(|| {
        let c = &in_ref(cert)?.0;
        *out_ptr(terracini_rank)? = c.terracini_rank;
        *out_ptr(hessian_rank)? = c.hessian_rank;
        *out_ptr(target_rank)? = c.target_rank;
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sos_certificate_to_json(cert: *const SosCertificate, out: *mut *mut c_char) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = json_string(&in_ref(cert)?.0)?;
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sos_certificate_free(cert: *mut SosCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Sampled Terracini rank of `sigma_r` for `(n, d, r)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sos_dimension(
    n: usize,
    d: usize,
    r: usize,
    p: u32,
    seed: u64,
    trials: usize,
    out: *mut *mut SosDimensionReport,
) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let params = lift(SecantParams::new(n, d, r))?;
        let report = lift(secant_dim_sample(&params, modulus(p)?, seed, trials))?;
        *out = Box::into_raw(Box::new(SosDimensionReport(report)));
        Ok(())
    })
}

/// 1 when the expected dimension is certified, 0 when inconclusive, -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sos_dimension_is_certified(report: *const SosDimensionReport) -> i32 {
    report.as_ref().map_or(-1, |r| (r.0.verdict == DimensionVerdict::NonDefectiveCertified) as i32)
}

/// # Safety
/// `report` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sos_dimension_observed_rank(report: *const SosDimensionReport, out: *mut usize) -> SosStatus {
    guard(|| {
        *out_ptr(out)? = in_ref(report)?.0.observed_rank;
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sos_dimension_to_json(report: *const SosDimensionReport, out: *mut *mut c_char) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = json_string(&in_ref(report)?.0)?;
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sos_dimension_free(report: *mut SosDimensionReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parses `{"n":..,"d":..,"p":..,"terms":[{"exp":[..],"c":..}]}`.
///
/// # Safety
/// `json` must be null or a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sos_poly_from_json(json: *const c_char, out: *mut *mut SosPoly) -> SosStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = ptr::null_mut();
        let text = in_ref(json).map(|_| CStr::from_ptr(json))?;
        let text = text.to_str().map_err(|_| {
            set_error("input is not UTF-8".into());
            SosStatus::Parse
        })?;
        let f = lift(parse_poly_json(text))?;
        *out = Box::into_raw(Box::new(SosPoly(f)));
        Ok(())
    })
}

/// # Safety
/// `poly` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sos_poly_free(poly: *mut SosPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Rank of the middle catalecticant of an even-degree form.
///
/// # Safety
/// `poly` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sos_middle_cat_rank(poly: *const SosPoly, out: *mut usize) -> SosStatus {
    guard(|| {
        *out_ptr(out)? = lift(middle_cat_rank(&in_ref(poly)?.0))?;
        Ok(())
    })
}
