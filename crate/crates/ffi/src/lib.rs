//! C ABI over `hus-core`.
//!
//! Every entry point returns a [`HusStatus`]; results come back through out
//! pointers. Reports are opaque handles released with [`hus_report_free`].
//! Strings handed out by the library are released with [`hus_string_free`].
//! Panics are caught at the boundary and reported as `HUS_STATUS_PANIC`.

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hus_core::harness::{certify, standard_specs};
use hus_core::linalg::{expm_closed, Mat2};
use hus_core::report::ReportJson;
use hus_core::second_order::repeated_root_threshold;
use hus_core::stability::{analyze, lower_bound, CaseLabel, StabilityReport};
use hus_core::HusError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HusStatus {
    Ok = 0,
    NullPointer = 1,
    NonFinite = 2,
    Singular = 3,
    NotStable = 4,
    IsStable = 5,
    HorizonTooLarge = 6,
    Resonant = 7,
    InvalidPerturbation = 8,
    InvalidArgument = 9,
    IncompatibleSubstitution = 10,
    DegenerateClass = 11,
    CaseMismatch = 12,
    OutOfRange = 13,
    Panic = 99,
}

impl From<&HusError> for HusStatus {
    fn from(e: &HusError) -> Self {
        match e {
            HusError::Singular { .. } => HusStatus::Singular,
            HusError::NonFinite(_) => HusStatus::NonFinite,
            HusError::DegenerateClass => HusStatus::DegenerateClass,
            HusError::CaseMismatch(_) => HusStatus::CaseMismatch,
            HusError::NotStable => HusStatus::NotStable,
            HusError::IsStable => HusStatus::IsStable,
            HusError::HorizonTooLarge { .. } => HusStatus::HorizonTooLarge,
            HusError::Resonant { .. } => HusStatus::Resonant,
            HusError::InvalidPerturbation(_) => HusStatus::InvalidPerturbation,
            HusError::IncompatibleSubstitution => HusStatus::IncompatibleSubstitution,
            HusError::InvalidArgument(_) => HusStatus::InvalidArgument,
        }
    }
}

/// Opaque stability report.
pub struct HusReport {
    inner: StabilityReport,
}

fn guard(f: impl FnOnce() -> Result<(), HusStatus>) -> HusStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HusStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => HusStatus::Panic,
    }
}

fn status(e: HusError) -> HusStatus {
    HusStatus::from(&e)
}

unsafe fn read_matrix(m: *const f64) -> Result<Mat2, HusStatus> {
    if m.is_null() {
        return Err(HusStatus::NullPointer);
    }
    let entries = *(m as *const [f64; 4]);
    Mat2::try_from_row_major(entries).map_err(status)
}

unsafe fn report_ref<'a>(report: *const HusReport) -> Result<&'a StabilityReport, HusStatus> {
    report
        .as_ref()
        .map(|r| &r.inner)
        .ok_or(HusStatus::NullPointer)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), HusStatus> {
    if out.is_null() {
        return Err(HusStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn hus_status_message(status: HusStatus) -> *const c_char {
    let msg: &CStr = match status {
        HusStatus::Ok => c"ok",
        HusStatus::NullPointer => c"null pointer argument",
        HusStatus::NonFinite => c"non-finite input",
        HusStatus::Singular => c"matrix is singular",
        HusStatus::NotStable => c"system is not Hyers-Ulam stable",
        HusStatus::IsStable => c"system is Hyers-Ulam stable",
        HusStatus::HorizonTooLarge => c"horizon exceeds the growth limit",
        HusStatus::Resonant => c"sinusoidal forcing resonates with the spectrum",
        HusStatus::InvalidPerturbation => c"invalid perturbation",
        HusStatus::InvalidArgument => c"invalid argument",
        HusStatus::IncompatibleSubstitution => c"triangular substitution requires real roots",
        HusStatus::DegenerateClass => c"operation requires real distinct eigenvalues",
        HusStatus::CaseMismatch => c"constant formula does not apply",
        HusStatus::OutOfRange => c"index out of range",
        HusStatus::Panic => c"internal panic",
    };
    msg.as_ptr()
}

/// Analyzes the row-major matrix `m[4]`. On success `*out` owns a new report.
///
/// # Safety
/// `m` must point to four doubles and `out` to writable storage for a pointer.
#[no_mangle]
pub unsafe extern "C" fn hus_analyze(
    m: *const f64,
    tol: f64,
    out: *mut *mut HusReport,
) -> HusStatus {
    guard(|| {
        if out.is_null() {
            return Err(HusStatus::NullPointer);
        }
        out.write(ptr::null_mut());
        if !(tol.is_finite() && tol > 0.0) {
            return Err(HusStatus::InvalidArgument);
        }
        let a = read_matrix(m)?;
        let inner = analyze(&a, tol).map_err(status)?;
        out.write(Box::into_raw(Box::new(HusReport { inner })));
        Ok(())
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from [`hus_analyze`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hus_report_free(report: *mut HusReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_stable(report: *const HusReport, out: *mut c_int) -> HusStatus {
    guard(|| write(out, report_ref(report)?.stable as c_int))
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_marginal(
    report: *const HusReport,
    out: *mut c_int,
) -> HusStatus {
    guard(|| write(out, report_ref(report)?.marginal as c_int))
}

/// The reported constant `K`; `HUS_STATUS_NOT_STABLE` when none exists.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_k(report: *const HusReport, out: *mut f64) -> HusStatus {
    guard(|| {
        write(
            out,
            report_ref(report)?.k_reported.ok_or(HusStatus::NotStable)?,
        )
    })
}

/// `‖A⁻¹‖∞`; `HUS_STATUS_NOT_STABLE` when none exists.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_lower_bound(
    report: *const HusReport,
    out: *mut f64,
) -> HusStatus {
    guard(|| {
        write(
            out,
            report_ref(report)?
                .lower_bound
                .ok_or(HusStatus::NotStable)?,
        )
    })
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_best(report: *const HusReport, out: *mut c_int) -> HusStatus {
    guard(|| write(out, report_ref(report)?.best_attained as c_int))
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_candidate_count(
    report: *const HusReport,
    out: *mut usize,
) -> HusStatus {
    guard(|| write(out, report_ref(report)?.candidates.len()))
}

fn label_cstr(label: CaseLabel) -> &'static CStr {
    match label {
        CaseLabel::SameSignBetween => c"same_sign_between",
        CaseLabel::SameSignBelow => c"same_sign_below",
        CaseLabel::SameSignAbove => c"same_sign_above",
        CaseLabel::SameSignAtUpper => c"same_sign_at_upper",
        CaseLabel::SameSignAtLower => c"same_sign_at_lower",
        CaseLabel::RepeatedPositive => c"repeated_positive",
        CaseLabel::RepeatedNegative => c"repeated_negative",
        CaseLabel::Projection => c"projection",
        CaseLabel::Complex => c"complex",
    }
}

/// Candidate `index`: its value and a static label string. Either out
/// pointer may be null.
///
/// # Safety
/// `report` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_candidate(
    report: *const HusReport,
    index: usize,
    value: *mut f64,
    label: *mut *const c_char,
) -> HusStatus {
    guard(|| {
        let c = report_ref(report)?
            .candidates
            .get(index)
            .ok_or(HusStatus::OutOfRange)?;
        if !value.is_null() {
            value.write(c.value);
        }
        if !label.is_null() {
            label.write(label_cstr(c.label).as_ptr());
        }
        Ok(())
    })
}

/// The report as JSON. Release `*out` with [`hus_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hus_report_json(
    report: *const HusReport,
    out: *mut *mut c_char,
) -> HusStatus {
    guard(|| {
        let json = ReportJson::new(report_ref(report)?).to_json();
        let s = CString::new(json).map_err(|_| HusStatus::InvalidArgument)?;
        write(out, s.into_raw())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hus_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `out[4] = e^{tA}` for the row-major `m[4]`.
///
/// # Safety
/// `m` must point to four doubles and `out` to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hus_expm(m: *const f64, t: f64, out: *mut f64) -> HusStatus {
    guard(|| {
        let a = read_matrix(m)?;
        if !t.is_finite() {
            return Err(HusStatus::NonFinite);
        }
        write(out as *mut [f64; 4], expm_closed(&a, t).row_major())
    })
}

/// Certifies the constant, sinusoid and sign-switch families along the
/// lower-bound maximizer. Writes the largest `sup‖φ − x‖∞ / ε` and whether
/// every run stayed under its threshold.
///
/// # Safety
/// `m` must point to four doubles; `max_ratio` and `all_pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hus_certify(
    m: *const f64,
    epsilon: f64,
    horizon: f64,
    step: f64,
    omega: f64,
    period: f64,
    tol: f64,
    max_ratio: *mut f64,
    all_pass: *mut c_int,
) -> HusStatus {
    guard(|| {
        if max_ratio.is_null() || all_pass.is_null() {
            return Err(HusStatus::NullPointer);
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(HusStatus::InvalidArgument);
        }
        let a = read_matrix(m)?;
        let report = analyze(&a, tol).map_err(status)?;
        if !report.stable {
            return Err(HusStatus::NotStable);
        }
        let dir = lower_bound(&a).map_err(status)?.maximizer;
        let specs = standard_specs(epsilon, dir, omega, period);
        let summary = certify(&a, &specs, &report, horizon, step, tol).map_err(status)?;
        max_ratio.write(summary.max_ratio());
        all_pass.write(summary.all_pass as c_int);
        Ok(())
    })
}

/// The repeated root `λ*` at which the direct-substitution constant switches
/// between its two branches.
#[no_mangle]
pub extern "C" fn hus_repeated_root_threshold() -> f64 {
    repeated_root_threshold()
}
