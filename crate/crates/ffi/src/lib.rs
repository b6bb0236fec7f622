//! C ABI over `flucstat`.
//!
//! Every fallible function returns a [`FlucstatStatus`]; on failure the
//! message is available from [`flucstat_last_error`] on the same thread.
//! Series live behind an opaque handle that must be released with
//! [`flucstat_series_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use flucstat::corr::{abs_acf, acf};
use flucstat::dist::{
    alpha_from_q, q_from_alpha, stable_pdf, stable_sample, QGaussianParams, StableParams,
};
use flucstat::fit::{empirical_pdf, fit_qexponential_acf, fit_qgaussian, BinScheme, QGaussFitOptions};
use flucstat::ingest::ReturnSeries;
use flucstat::scaling::{default_scales, dfa, hurst_fit};
use flucstat::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlucstatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Degenerate = 4,
    Insufficient = 5,
    NoConvergence = 6,
    Io = 7,
    Parse = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

impl From<&Error> for FlucstatStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) | Error::GaussianAttractor(_) => FlucstatStatus::Domain,
            Error::Degenerate(_) => FlucstatStatus::Degenerate,
            Error::Insufficient(_) => FlucstatStatus::Insufficient,
            Error::NoConvergence { .. } | Error::FitFailed { .. } => FlucstatStatus::NoConvergence,
            Error::Io(_) | Error::HttpStatus { .. } | Error::Network { .. } => FlucstatStatus::Io,
            Error::Parse { .. } | Error::Csv(_) => FlucstatStatus::Parse,
            _ => FlucstatStatus::InvalidArgument,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FlucstatStatus, msg: impl Into<String>) -> FlucstatStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), FlucstatStatus>) -> FlucstatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlucstatStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(FlucstatStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: flucstat::Result<T>) -> Result<T, FlucstatStatus> {
    r.map_err(|e| fail(FlucstatStatus::from(&e), e.to_string()))
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), FlucstatStatus> {
    if p.is_null() {
        Err(fail(FlucstatStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Opaque handle to a normalized return series.
pub struct FlucstatSeries {
    inner: ReturnSeries,
}

/// Result of a q-Gaussian density fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlucstatQFit {
    pub q: f64,
    pub b: f64,
    pub q_stderr: f64,
    pub b_stderr: f64,
    pub chi2_per_n: f64,
    /// NaN when undefined.
    pub r2: f64,
    pub n_points: usize,
}

/// Result of a q-exponential autocorrelation fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlucstatQexpFit {
    pub q_c: f64,
    pub t: f64,
    pub q_c_stderr: f64,
    pub t_stderr: f64,
    pub chi2_per_n: f64,
    pub r2: f64,
    pub n_points: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlucstatHurst {
    pub h: f64,
    pub h_stderr: f64,
    pub r2: f64,
    pub n_scales: usize,
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn flucstat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn flucstat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Density of the q-Gaussian with index `q` and inverse width `b` at `x`.
///
/// # Safety
/// `out` must be valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_qgauss_pdf(q: f64, b: f64, x: f64, out: *mut f64) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        let p = lib(QGaussianParams::new(q, b))?;
        *out = p.pdf(x);
        Ok(())
    })
}

/// Symmetric stable density with characteristic function `exp(-a |k|^alpha)`.
///
/// # Safety
/// `out` must be valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_stable_pdf(
    alpha: f64,
    a: f64,
    x: f64,
    tol: f64,
    out: *mut f64,
) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        let p = lib(StableParams::new(alpha, a))?;
        *out = lib(stable_pdf(&p, x, tol))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_alpha_from_q(q: f64, out: *mut f64) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        *out = lib(alpha_from_q(q))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_q_from_alpha(alpha: f64, out: *mut f64) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        *out = lib(q_from_alpha(alpha))?;
        Ok(())
    })
}

/// Fill `out[0..n]` with symmetric stable variates.
///
/// # Safety
/// `out` must be valid for `n` `double` writes.
#[no_mangle]
pub unsafe extern "C" fn flucstat_stable_sample(
    alpha: f64,
    a: f64,
    n: usize,
    seed: u64,
    out: *mut f64,
) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        let p = lib(StableParams::new(alpha, a))?;
        let v = stable_sample(&p, n, seed);
        ptr::copy_nonoverlapping(v.as_ptr(), out, n);
        Ok(())
    })
}

/// Normalize `n` raw log-returns into a new series handle.
///
/// # Safety
/// `values` must be valid for `n` reads and `out` for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_series_from_values(
    values: *const f64,
    n: usize,
    out: *mut *mut FlucstatSeries,
) -> FlucstatStatus {
    guard(|| {
        nonnull(values, "values")?;
        nonnull(out, "out")?;
        let raw = std::slice::from_raw_parts(values, n);
        let start = epoch();
        let inner = lib(ReturnSeries::from_values(raw, start))?;
        *out = Box::into_raw(Box::new(FlucstatSeries { inner }));
        Ok(())
    })
}

fn epoch() -> flucstat::ingest::NaiveDate {
    flucstat::ingest::NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date")
}

/// Read a `date,r` series file into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_series_read(
    path: *const c_char,
    out: *mut *mut FlucstatSeries,
) -> FlucstatStatus {
    guard(|| {
        nonnull(path, "path")?;
        nonnull(out, "out")?;
        let p = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(FlucstatStatus::InvalidArgument, "path is not UTF-8"))?;
        let (inner, _) = lib(ReturnSeries::read(Path::new(p)))?;
        *out = Box::into_raw(Box::new(FlucstatSeries { inner }));
        Ok(())
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn flucstat_series_free(s: *mut FlucstatSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of returns, 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flucstat_series_len(s: *const FlucstatSeries) -> usize {
    s.as_ref().map_or(0, |s| s.inner.len())
}

unsafe fn series<'a>(s: *const FlucstatSeries) -> Result<&'a ReturnSeries, FlucstatStatus> {
    s.as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| fail(FlucstatStatus::NullPointer, "series is null"))
}

unsafe fn copy_out(v: &[f64], out: *mut f64, cap: usize) -> Result<(), FlucstatStatus> {
    nonnull(out, "out")?;
    if cap < v.len() {
        return Err(fail(
            FlucstatStatus::BufferTooSmall,
            format!("buffer holds {cap} values, need {}", v.len()),
        ));
    }
    ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
    Ok(())
}

/// Copy the normalized returns into `out`, which holds `cap` values.
///
/// # Safety
/// `s` must be a live handle and `out` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn flucstat_series_values(
    s: *const FlucstatSeries,
    out: *mut f64,
    cap: usize,
) -> FlucstatStatus {
    guard(|| copy_out(series(s)?.values(), out, cap))
}

/// Autocorrelation at lags `0..=max_lag` of the returns, or of their
/// absolute values when `absolute` is nonzero. `out` needs `max_lag + 1` slots.
///
/// # Safety
/// `s` must be a live handle and `out` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn flucstat_acf(
    s: *const FlucstatSeries,
    max_lag: usize,
    absolute: i32,
    out: *mut f64,
    cap: usize,
) -> FlucstatStatus {
    guard(|| {
        let r = series(s)?.values();
        let c = lib(if absolute != 0 { abs_acf(r, max_lag) } else { acf(r, max_lag) })?;
        copy_out(&c.values, out, cap)
    })
}

/// Semilog q-Gaussian fit of the returns histogram. Bins are
/// `bin_width_sigma` standard deviations wide; a finite `fixed_q` holds q.
///
/// # Safety
/// `s` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_fit_qgaussian(
    s: *const FlucstatSeries,
    bin_width_sigma: f64,
    fixed_q: f64,
    out: *mut FlucstatQFit,
) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        let r = series(s)?.values();
        let pdf = lib(BinScheme::linear_sigma(r, bin_width_sigma).and_then(|b| empirical_pdf(r, b)))?;
        let opts = QGaussFitOptions {
            fixed_q: fixed_q.is_finite().then_some(fixed_q),
            ..Default::default()
        };
        let f = lib(fit_qgaussian(&pdf, &opts))?;
        *out = FlucstatQFit {
            q: f.param("q"),
            b: f.param("B"),
            q_stderr: f.se("q"),
            b_stderr: f.se("B"),
            chi2_per_n: f.chi2_per_n,
            r2: f.r2.unwrap_or(f64::NAN),
            n_points: f.n_points,
        };
        Ok(())
    })
}

/// q-exponential fit of the absolute-return autocorrelation over lags
/// `lag_lo..=lag_hi`.
///
/// # Safety
/// `s` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_fit_qexp_acf(
    s: *const FlucstatSeries,
    lag_lo: usize,
    lag_hi: usize,
    out: *mut FlucstatQexpFit,
) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        let c = lib(abs_acf(series(s)?.values(), lag_hi))?;
        let f = lib(fit_qexponential_acf(&c, lag_lo, lag_hi))?;
        *out = FlucstatQexpFit {
            q_c: f.param("q_c"),
            t: f.param("T"),
            q_c_stderr: f.se("q_c"),
            t_stderr: f.se("T"),
            chi2_per_n: f.chi2_per_n,
            r2: f.r2.unwrap_or(f64::NAN),
            n_points: f.n_points,
        };
        Ok(())
    })
}

/// DFA Hurst exponent of the returns (or of `|r|` when `absolute` is
/// nonzero) over the default scale grid restricted to `scale_lo..=scale_hi`.
///
/// # Safety
/// `s` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn flucstat_dfa_hurst(
    s: *const FlucstatSeries,
    absolute: i32,
    detrend_order: usize,
    scale_lo: usize,
    scale_hi: usize,
    out: *mut FlucstatHurst,
) -> FlucstatStatus {
    guard(|| {
        nonnull(out, "out")?;
        let r = series(s)?.values();
        let x: Vec<f64> = if absolute != 0 { r.iter().map(|v| v.abs()).collect() } else { r.to_vec() };
        let scales: Vec<usize> = default_scales(x.len(), detrend_order)
            .into_iter()
            .filter(|&n| n >= scale_lo && n <= scale_hi)
            .collect();
        let d = lib(dfa(&x, &scales, detrend_order))?;
        let f = lib(hurst_fit(&d, scale_lo, scale_hi))?;
        *out = FlucstatHurst {
            h: f.param("H"),
            h_stderr: f.se("H"),
            r2: f.r2.unwrap_or(f64::NAN),
            n_scales: f.n_points,
        };
        Ok(())
    })
}
