//! C ABI over `capture-core`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`CrgStatus`]; `CRG_STATUS_OK` is zero.
//!   On failure, [`crg_last_error_message`] describes the error on the calling
//!   thread until the next failing call.
//! * Results go through caller-provided out-pointers, which are only written on
//!   success.
//! * Exact values cross the boundary as `"p/q"` strings allocated here and
//!   released with [`crg_string_free`].
//! * Handles are opaque; each `*_new` has a matching `*_free`. Handles are
//!   immutable after construction and may be shared across threads.
//! * A null config pointer means the default integrator settings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use capture_core::closed_form::{self, Branch, InitialConditions, SolutionConstants};
use capture_core::coefficients::CoefficientTable;
use capture_core::critical::CriticalSeries;
use capture_core::domb_sykes;
use capture_core::oracle::{self, Fate, IntegratorConfig};
use capture_core::rational::{self, Rational};
use capture_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonZeroConstant = 3,
    SolverDegenerate = 4,
    RowOutOfRange = 5,
    Breakdown = 6,
    Pole = 7,
    Stiffness = 8,
    TraceIncomplete = 9,
    Bracket = 10,
    Undecided = 11,
    InsufficientData = 12,
    DegenerateFit = 13,
    Internal = 14,
    Panic = 15,
}

impl From<&Error> for CrgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonZeroConstant { .. } => CrgStatus::NonZeroConstant,
            Error::Internal(_) => CrgStatus::Internal,
            Error::InvalidArgument(_) => CrgStatus::InvalidArgument,
            Error::SolverDegenerate { .. } => CrgStatus::SolverDegenerate,
            Error::RowOutOfRange { .. } => CrgStatus::RowOutOfRange,
            Error::Breakdown { .. } => CrgStatus::Breakdown,
            Error::Pole { .. } => CrgStatus::Pole,
            Error::Stiffness { .. } => CrgStatus::Stiffness,
            Error::TraceIncomplete { .. } => CrgStatus::TraceIncomplete,
            Error::Bracket { .. } => CrgStatus::Bracket,
            Error::Undecided { .. } => CrgStatus::Undecided,
            Error::InsufficientData(_) => CrgStatus::InsufficientData,
            Error::DegenerateFit(_) => CrgStatus::DegenerateFit,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

struct Failure(CrgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CrgStatus::from(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(CrgStatus::NullPointer, format!("{name} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CrgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CrgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(&message);
            CrgStatus::Panic
        }
    }
}

/// Writes `value` through `out`, failing on null.
unsafe fn put<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, value: &Rational) -> Result<(), Failure> {
    let text = CString::new(value.to_string()).map_err(|e| Failure(CrgStatus::Internal, e.to_string()))?;
    put(out, "out", text.into_raw())
}

unsafe fn borrow<'a, T>(handle: *const T, name: &str) -> Result<&'a T, Failure> {
    handle.as_ref().ok_or_else(|| null(name))
}

/// Message for the most recent failure on this thread (empty if none).
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn crg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn crg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn crg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a `"p/q"` string and writes its nearest `double`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_rational_to_double(text: *const c_char, out: *mut f64) -> CrgStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(CrgStatus::InvalidArgument, e.to_string()))?;
        let value = rational::parse_rational(text)?;
        put(out, "out", rational::to_f64(&value))
    })
}

/// Exact separatrix coefficients `B_0..B_max_order`.
pub struct CrgCoefficientTable {
    inner: CoefficientTable,
}

/// # Safety
/// `out` must be writable. The handle is released with [`crg_coefficients_free`].
#[no_mangle]
pub unsafe extern "C" fn crg_coefficients_new(max_order: usize, out: *mut *mut CrgCoefficientTable) -> CrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let handle = Box::new(CrgCoefficientTable {
            inner: CoefficientTable::generate(max_order),
        });
        put(out, "out", Box::into_raw(handle))
    })
}

/// # Safety
/// `table` must come from [`crg_coefficients_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn crg_coefficients_free(table: *mut CrgCoefficientTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of coefficients held (`max_order + 1`); 0 for null.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn crg_coefficients_len(table: *const CrgCoefficientTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.coeffs().len())
}

/// `B_n` as a newly allocated `"p/q"` string.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_coefficients_get(
    table: *const CrgCoefficientTable,
    n: usize,
    out: *mut *mut c_char,
) -> CrgStatus {
    guard(|| {
        let table = borrow(table, "table")?;
        let value = table.inner.get(n).ok_or_else(|| {
            Error::InvalidArgument(format!("n = {n} beyond max order {}", table.inner.max_order()))
        })?;
        put_string(out, value)
    })
}

/// `b_n = n!(n+1)! B_n` as a decimal string.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_coefficients_get_integer(
    table: *const CrgCoefficientTable,
    n: usize,
    out: *mut *mut c_char,
) -> CrgStatus {
    guard(|| {
        let table = borrow(table, "table")?;
        let ints = table.inner.integer_b()?;
        let value = ints.get(n).ok_or_else(|| {
            Error::InvalidArgument(format!("n = {n} beyond max order {}", table.inner.max_order()))
        })?;
        put_string(out, &Rational::from_integer(value.clone()))
    })
}

/// Series for `εz_c` and `εx_c` at a fixed order.
pub struct CrgCriticalSeries {
    inner: CriticalSeries,
}

/// # Safety
/// `out` must be writable. The handle is released with [`crg_critical_free`].
#[no_mangle]
pub unsafe extern "C" fn crg_critical_new(order: usize, out: *mut *mut CrgCriticalSeries) -> CrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = CriticalSeries::compute(order, &CoefficientTable::generate(order))?;
        put(out, "out", Box::into_raw(Box::new(CrgCriticalSeries { inner })))
    })
}

/// # Safety
/// `series` must come from [`crg_critical_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn crg_critical_free(series: *mut CrgCriticalSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Series order; 0 for null.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn crg_critical_order(series: *const CrgCriticalSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.order())
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrgCriticalQuantity {
    /// `εz_c`.
    Zc = 0,
    /// `εx_c`.
    Xc = 1,
}

/// Coefficient of `θ^n` (`0 <= n <= order`) as a `"p/q"` string.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_critical_term(
    series: *const CrgCriticalSeries,
    which: CrgCriticalQuantity,
    n: usize,
    out: *mut *mut c_char,
) -> CrgStatus {
    guard(|| {
        let s = &borrow(series, "series")?.inner;
        let poly = match which {
            CrgCriticalQuantity::Zc => s.zc(),
            CrgCriticalQuantity::Xc => s.xc(),
        };
        let value = poly
            .coeff(n)
            .ok_or(Error::RowOutOfRange { row: n, max: s.order() })?;
        put_string(out, value)
    })
}

/// Partial sum through `θ^n` (`1 <= n <= order`) as a `"p/q"` string.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_critical_partial_sum(
    series: *const CrgCriticalSeries,
    which: CrgCriticalQuantity,
    n: usize,
    out: *mut *mut c_char,
) -> CrgStatus {
    guard(|| {
        let s = &borrow(series, "series")?.inner;
        let value = match which {
            CrgCriticalQuantity::Zc => s.zc_sum(n)?,
            CrgCriticalQuantity::Xc => s.xc_sum(n)?,
        };
        put_string(out, &value)
    })
}

/// Integrator settings. Obtain defaults from [`crg_integrator_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrgIntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Time budget.
    pub t_max: f64,
    pub max_step: f64,
}

impl From<CrgIntegratorConfig> for IntegratorConfig {
    fn from(c: CrgIntegratorConfig) -> Self {
        IntegratorConfig {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            t_max: c.t_max,
            max_step: c.max_step,
            ..Default::default()
        }
    }
}

#[no_mangle]
pub extern "C" fn crg_integrator_default() -> CrgIntegratorConfig {
    let d = IntegratorConfig::default();
    CrgIntegratorConfig {
        rel_tol: d.rel_tol,
        abs_tol: d.abs_tol,
        t_max: d.t_max,
        max_step: d.max_step,
    }
}

unsafe fn config_or_default(cfg: *const CrgIntegratorConfig) -> IntegratorConfig {
    cfg.as_ref().map_or_else(IntegratorConfig::default, |c| (*c).into())
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrgFate {
    Capture = 0,
    Escape = 1,
    Undecided = 2,
}

impl From<Fate> for CrgFate {
    fn from(f: Fate) -> Self {
        match f {
            Fate::Capture => CrgFate::Capture,
            Fate::Escape => CrgFate::Escape,
            Fate::Undecided => CrgFate::Undecided,
        }
    }
}

/// Fate of `x(0) = x0`, `ẋ(0) = u0`; `t_event` may be null.
///
/// # Safety
/// `cfg` must be null or readable; `fate` must be writable; `t_event` null or writable.
#[no_mangle]
pub unsafe extern "C" fn crg_classify_fate(
    x0: f64,
    u0: f64,
    cfg: *const CrgIntegratorConfig,
    fate: *mut CrgFate,
    t_event: *mut f64,
) -> CrgStatus {
    guard(|| {
        if fate.is_null() {
            return Err(null("fate"));
        }
        let result = oracle::classify_fate(InitialConditions::new(x0, u0), &config_or_default(cfg))?;
        put(fate, "fate", result.fate.into())?;
        if !t_event.is_null() {
            t_event.write(result.t_event);
        }
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrgXcEstimate {
    pub xc: f64,
    pub lo: f64,
    pub hi: f64,
    pub probes: usize,
}

/// Bisection for the critical release point on `u0 = -x0²` within `[lo, hi]`.
///
/// # Safety
/// `cfg` must be null or readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_find_xc(
    lo: f64,
    hi: f64,
    tol: f64,
    cfg: *const CrgIntegratorConfig,
    out: *mut CrgXcEstimate,
) -> CrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = oracle::find_xc_in(lo, hi, &config_or_default(cfg), tol)?;
        put(
            out,
            "out",
            CrgXcEstimate {
                xc: e.xc,
                lo: e.lo,
                hi: e.hi,
                probes: e.probes,
            },
        )
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrgSeparatrixTrace {
    pub delta: f64,
    pub xc: f64,
    pub uc: f64,
    pub t_cross: f64,
    pub zc: f64,
    pub error_estimate: f64,
}

/// Backward numerical trace of the separatrix to the nullcline.
///
/// # Safety
/// `cfg` must be null or readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_trace_separatrix(
    delta: f64,
    cfg: *const CrgIntegratorConfig,
    out: *mut CrgSeparatrixTrace,
) -> CrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = oracle::trace_separatrix(delta, &config_or_default(cfg))?;
        put(
            out,
            "out",
            CrgSeparatrixTrace {
                delta: t.delta,
                xc: t.xc,
                uc: t.uc,
                t_cross: t.t_cross,
                zc: t.zc,
                error_estimate: t.error_estimate,
            },
        )
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrgDombSykes {
    /// Fitted offset.
    pub delta: f64,
    /// Offset used in the growth fit.
    pub delta_used: f64,
    pub growth: f64,
    pub offset_lo: usize,
    pub offset_hi: usize,
    pub growth_lo: usize,
    pub growth_hi: usize,
}

/// Domb-Sykes fits over `B_0..B_max_order`.
///
/// `window_lo = window_hi = 0` selects the default windows; a NaN `delta`
/// uses the fitted offset in the growth fit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_domb_sykes(
    max_order: usize,
    window_lo: usize,
    window_hi: usize,
    delta: f64,
    out: *mut CrgDombSykes,
) -> CrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let table = CoefficientTable::generate(max_order);
        let window = (window_lo, window_hi) != (0, 0);
        let r = domb_sykes::analyse(
            table.coeffs(),
            window.then_some((window_lo, window_hi)),
            (!delta.is_nan()).then_some(delta),
        )?;
        put(
            out,
            "out",
            CrgDombSykes {
                delta: r.delta,
                delta_used: r.delta_used,
                growth: r.growth,
                offset_lo: r.offset_window.0,
                offset_hi: r.offset_window.1,
                growth_lo: r.growth_window.0,
                growth_hi: r.growth_window.1,
            },
        )
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrgBranch {
    Plus = 0,
    Minus = 1,
}

/// Constants of the closed-form solutions. `inv_c` is `1/C`, zero on the separatrix.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrgSolutionConstants {
    pub inv_c: f64,
    pub b: f64,
    pub d: f64,
    pub epsilon: f64,
}

impl From<CrgSolutionConstants> for SolutionConstants {
    fn from(c: CrgSolutionConstants) -> Self {
        SolutionConstants {
            inv_c: c.inv_c,
            b: c.b,
            d: c.d,
            epsilon: c.epsilon,
        }
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crg_constants_from_ic(
    x0: f64,
    u0: f64,
    epsilon: f64,
    branch: CrgBranch,
    out: *mut CrgSolutionConstants,
) -> CrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let branch = match branch {
            CrgBranch::Plus => Branch::Plus,
            CrgBranch::Minus => Branch::Minus,
        };
        let c = closed_form::constants_from_ic(InitialConditions::new(x0, u0), epsilon, branch)?;
        put(
            out,
            "out",
            CrgSolutionConstants {
                inv_c: c.inv_c,
                b: c.b,
                d: c.d,
                epsilon: c.epsilon,
            },
        )
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrgMethod {
    Matched = 0,
    Rg = 1,
}

/// `x(t)` and `ẋ(t)` of the chosen closed-form solution; `u` may be null.
///
/// # Safety
/// `constants` must be readable; `x` writable; `u` null or writable.
#[no_mangle]
pub unsafe extern "C" fn crg_solution_eval(
    constants: *const CrgSolutionConstants,
    method: CrgMethod,
    t: f64,
    x: *mut f64,
    u: *mut f64,
) -> CrgStatus {
    guard(|| {
        let c: SolutionConstants = (*borrow(constants, "constants")?).into();
        if x.is_null() {
            return Err(null("x"));
        }
        let (xv, uv) = match method {
            CrgMethod::Matched => closed_form::matched_state(&c, t)?,
            CrgMethod::Rg => closed_form::rg_state(&c, t)?,
        };
        x.write(xv);
        if !u.is_null() {
            u.write(uv);
        }
        Ok(())
    })
}
