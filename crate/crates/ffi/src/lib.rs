//! C ABI over `podles-core`.
//!
//! Parameters and algebra elements are opaque heap handles owned by the
//! caller and released with the matching `*_free` function. Every fallible
//! call returns a [`PodlesStatus`] and writes its result through an out
//! pointer. On failure the message stays available from
//! [`podles_last_error`] on the calling thread until the next failure.
//! Panics never cross the boundary; they are reported as
//! [`PodlesStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num::complex::Complex64;
use podles_core::podles::{berezin_coeff, generators_podles, state_hn};
use podles_core::qmetric::{dq_upper, gns_norm, lipnorm, rho_q, NormEstimate, TruncationConfig, XqPoint};
use podles_core::{AlgebraElement, Error, QParam};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PodlesStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ParameterMismatch = 3,
    DegreeTooLarge = 4,
    NotPodles = 5,
    BranchMismatch = 6,
    InvalidArgument = 7,
    Parse = 8,
    Panic = 9,
    Internal = 10,
}

/// Deformation parameter `q` in `(0, 1]`.
pub struct PodlesParam(QParam);

/// Element of the coordinate algebra in PBW normal form.
pub struct PodlesElement(AlgebraElement);

/// Named elements available from [`podles_element_new`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PodlesGenerator {
    One = 0,
    A = 1,
    AStar = 2,
    B = 3,
    BStar = 4,
    /// `b b*`
    SphereA = 5,
    /// `a b*`
    SphereB = 6,
    /// `b a*`
    SphereBStar = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PodlesComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PodlesPointKind {
    /// `q^(2 power)`, for `q < 1`.
    Power = 0,
    /// The point `0`.
    Zero = 1,
    /// A real number in `[0, 1]`, for `q = 1`.
    Real = 2,
}

/// Point of the spectrum of `A`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PodlesPoint {
    pub kind: PodlesPointKind,
    pub power: u32,
    pub value: f64,
}

/// Lower bound for an operator norm with convergence diagnostics.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PodlesNorm {
    pub value: f64,
    pub last_increment: f64,
    pub degree_used: u32,
    pub converged: bool,
}

impl From<NormEstimate> for PodlesNorm {
    fn from(e: NormEstimate) -> Self {
        PodlesNorm {
            value: e.value,
            last_increment: e.last_increment,
            degree_used: e.degree_used,
            converged: e.converged,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PodlesStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter(_) | Error::InvalidExactParameter { .. } => PodlesStatus::InvalidParameter,
            Error::ParameterMismatch => PodlesStatus::ParameterMismatch,
            Error::DegreeTooLarge { .. } => PodlesStatus::DegreeTooLarge,
            Error::NotPodles | Error::NotPodlesSupport => PodlesStatus::NotPodles,
            Error::BranchMismatch => PodlesStatus::BranchMismatch,
            Error::IncompatibleTag { .. } | Error::Config { .. } => PodlesStatus::InvalidArgument,
            Error::Json(_) => PodlesStatus::Parse,
            Error::Csv(_) | Error::Io(_) => PodlesStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> PodlesStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PodlesStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
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
            PodlesStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PodlesStatus::NullPointer, format!("{what} is null"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn element(x: AlgebraElement) -> *mut PodlesElement {
    Box::into_raw(Box::new(PodlesElement(x)))
}

fn truncation(max_degree: u32, stop_tol: f64) -> Result<TruncationConfig, Failure> {
    if max_degree == 0 || stop_tol.is_nan() || stop_tol <= 0.0 {
        return Err(Failure(
            PodlesStatus::InvalidArgument,
            "max_degree and stop_tol must be positive".into(),
        ));
    }
    Ok(TruncationConfig {
        max_degree,
        stop_tol,
        ..Default::default()
    })
}

/// Message of the last failure on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn podles_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn podles_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a parameter for `q` in `(0, 1]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_param_new(q: f64, out: *mut *mut PodlesParam) -> PodlesStatus {
    guard(|| {
        let p = QParam::new(q)?;
        put(out, Box::into_raw(Box::new(PodlesParam(p))))
    })
}

/// Releases a parameter. Null is ignored.
///
/// # Safety
/// `p` must come from [`podles_param_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn podles_param_free(p: *mut PodlesParam) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The value of `q`, or NaN for a null handle.
///
/// # Safety
/// `p` must be null or a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn podles_param_q(p: *const PodlesParam) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.0.q())
}

/// Creates one of the named elements.
///
/// # Safety
/// `p` must be a live parameter handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_new(
    p: *const PodlesParam,
    which: PodlesGenerator,
    out: *mut *mut PodlesElement,
) -> PodlesStatus {
    guard(|| {
        let p = get(p, "param")?.0;
        let (sa, sb, sbs) = generators_podles::<Complex64>(&p);
        let x = match which {
            PodlesGenerator::One => AlgebraElement::one(p),
            PodlesGenerator::A => AlgebraElement::a(p),
            PodlesGenerator::AStar => AlgebraElement::a_star(p),
            PodlesGenerator::B => AlgebraElement::b(p),
            PodlesGenerator::BStar => AlgebraElement::b_star(p),
            PodlesGenerator::SphereA => sa,
            PodlesGenerator::SphereB => sb,
            PodlesGenerator::SphereBStar => sbs,
        };
        put(out, element(x))
    })
}

/// Releases an element. Null is ignored.
///
/// # Safety
/// `x` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn podles_element_free(x: *mut PodlesElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// `x + y`.
///
/// # Safety
/// `x`, `y` must be live element handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_add(
    x: *const PodlesElement,
    y: *const PodlesElement,
    out: *mut *mut PodlesElement,
) -> PodlesStatus {
    guard(|| {
        let z = get(x, "x")?.0.try_add(&get(y, "y")?.0)?;
        put(out, element(z))
    })
}

/// `x y`.
///
/// # Safety
/// `x`, `y` must be live element handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_multiply(
    x: *const PodlesElement,
    y: *const PodlesElement,
    out: *mut *mut PodlesElement,
) -> PodlesStatus {
    guard(|| {
        let z = get(x, "x")?.0.multiply(&get(y, "y")?.0)?;
        put(out, element(z))
    })
}

/// `c x` for a complex scalar `c`.
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_scale(
    x: *const PodlesElement,
    c: PodlesComplex,
    out: *mut *mut PodlesElement,
) -> PodlesStatus {
    guard(|| {
        let z = get(x, "x")?.0.scale(&Complex64::new(c.re, c.im));
        put(out, element(z))
    })
}

/// `x*`.
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_adjoint(x: *const PodlesElement, out: *mut *mut PodlesElement) -> PodlesStatus {
    guard(|| put(out, element(get(x, "x")?.0.adjoint())))
}

/// Whether `x` lies in the Podles sphere. False for a null handle.
///
/// # Safety
/// `x` must be null or a live element handle.
#[no_mangle]
pub unsafe extern "C" fn podles_element_is_podles(x: *const PodlesElement) -> bool {
    x.as_ref().is_some_and(|x| x.0.is_podles())
}

/// Haar state `h(x)`.
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_haar(x: *const PodlesElement, out: *mut PodlesComplex) -> PodlesStatus {
    guard(|| {
        let h = get(x, "x")?.0.haar();
        put(out, PodlesComplex { re: h.re, im: h.im })
    })
}

/// JSON form of `x`, released with [`podles_string_free`].
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_to_json(x: *const PodlesElement, out: *mut *mut c_char) -> PodlesStatus {
    guard(|| {
        let text = get(x, "x")?.0.to_json()?;
        let c = CString::new(text).map_err(|e| Failure(PodlesStatus::Internal, e.to_string()))?;
        put(out, c.into_raw())
    })
}

/// Parses an element from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_element_from_json(json: *const c_char, out: *mut *mut PodlesElement) -> PodlesStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(PodlesStatus::Parse, e.to_string()))?;
        put(out, element(AlgebraElement::from_json(text)?))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn podles_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `h_N(x) = <N+1> h(a*^N x a^N)`.
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_state_hn(n: u32, x: *const PodlesElement, out: *mut PodlesComplex) -> PodlesStatus {
    guard(|| {
        let v = state_hn(n, &get(x, "x")?.0)?;
        put(out, PodlesComplex { re: v.re, im: v.im })
    })
}

/// Berezin coefficient `B(N, m)`.
///
/// # Safety
/// `p` must be a live parameter handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_berezin_coeff(n: u32, m: u32, p: *const PodlesParam, out: *mut f64) -> PodlesStatus {
    guard(|| put(out, berezin_coeff(n, m, &get(p, "param")?.0)))
}

/// Upper bound for the distance between `h_N` and the counit.
///
/// # Safety
/// `p` must be a live parameter handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_dq_upper(n: u32, p: *const PodlesParam, out: *mut f64) -> PodlesStatus {
    guard(|| put(out, dq_upper(n, &get(p, "param")?.0)))
}

/// Spectral metric between two points of the spectrum of `A`.
///
/// # Safety
/// `p` must be a live parameter handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_rho_q(
    x: PodlesPoint,
    y: PodlesPoint,
    p: *const PodlesParam,
    out: *mut f64,
) -> PodlesStatus {
    let point = |z: PodlesPoint| match z.kind {
        PodlesPointKind::Power => XqPoint::Power(z.power),
        PodlesPointKind::Zero => XqPoint::Zero,
        PodlesPointKind::Real => XqPoint::Real(z.value),
    };
    guard(|| put(out, rho_q(point(x), point(y), &get(p, "param")?.0)?))
}

/// Operator norm estimate of `x` in the GNS representation of the Haar state.
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_gns_norm(
    x: *const PodlesElement,
    max_degree: u32,
    stop_tol: f64,
    out: *mut PodlesNorm,
) -> PodlesStatus {
    guard(|| {
        let cfg = truncation(max_degree, stop_tol)?;
        put(out, gns_norm(&get(x, "x")?.0, &cfg).into())
    })
}

/// Lip-norm estimate `max(|∂_1 x|, |∂_2 x|)` of a Podles element.
///
/// # Safety
/// `x` must be a live element handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn podles_lipnorm(
    x: *const PodlesElement,
    max_degree: u32,
    stop_tol: f64,
    out: *mut PodlesNorm,
) -> PodlesStatus {
    guard(|| {
        let cfg = truncation(max_degree, stop_tol)?;
        put(out, lipnorm(&get(x, "x")?.0, &cfg)?.into())
    })
}
