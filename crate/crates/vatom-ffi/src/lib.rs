//! C ABI for vatom.
//!
//! Every fallible call returns a [`VatomStatus`]; on failure the message is
//! kept per thread and can be read with [`vatom_last_error`]. Spectra are
//! opaque handles created by [`vatom_spectrum_new`] and released with
//! [`vatom_spectrum_free`]. Complex arrays are interleaved `re, im` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vatom::dressed::{coefficients, DressedSpectrum, InitialState};
use vatom::evolve::amplitudes_from_spectrum;
use vatom::oracle::{compare, convergence_shift_from, Integrator, ReservoirConfig};
use vatom::{Complex64, ModelKind, ModelParams};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VatomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Computation = 3,
    NotFound = 4,
    Panic = 5,
}

/// Dispersion model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VatomModel {
    Anisotropic = 0,
    Isotropic = 1,
}

impl From<VatomModel> for ModelKind {
    fn from(m: VatomModel) -> Self {
        match m {
            VatomModel::Anisotropic => ModelKind::Anisotropic,
            VatomModel::Isotropic => ModelKind::Isotropic,
        }
    }
}

/// One dressed state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VatomMode {
    pub x_re: f64,
    pub x_im: f64,
    pub alpha1_re: f64,
    pub alpha1_im: f64,
    pub alpha2_re: f64,
    pub alpha2_im: f64,
    /// 1 for a bound (non-decaying) state
    pub bound: i32,
}

/// Discretized-reservoir settings. `method` is 0 for the exponential
/// integrator and 1 for classical RK4.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VatomOracleConfig {
    pub n_modes: usize,
    pub u_max: f64,
    pub dt: f64,
    pub taper: f64,
    pub method: i32,
}

/// Oracle comparison summary.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VatomOracleReport {
    pub max_deviation: f64,
    pub norm_drift: f64,
    /// negative when the doubling check was not requested
    pub convergence_shift: f64,
}

/// Opaque dressed-state spectrum.
pub struct VatomSpectrum {
    inner: DressedSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: VatomStatus, msg: impl Into<String>) -> VatomStatus {
    set_error(msg.into());
    status
}

fn computation(e: vatom::Error) -> VatomStatus {
    let status = match e {
        vatom::Error::InvalidParameter(_) | vatom::Error::InvalidGrid(_) => VatomStatus::InvalidArgument,
        _ => VatomStatus::Computation,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`VatomStatus::Panic`].
fn guard(f: impl FnOnce() -> VatomStatus) -> VatomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(VatomStatus::Panic, msg)
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vatom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no error. `buf` may be NULL to query the length.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vatom_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Scaled complementary error function exp(z^2) erfc(z).
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vatom_erfcx(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> VatomStatus {
    if out_re.is_null() || out_im.is_null() {
        return fail(VatomStatus::NullPointer, "output pointer is NULL");
    }
    guard(|| {
        let w = vatom::specfun::erfcx(Complex64::new(re, im));
        *out_re = w.re;
        *out_im = w.im;
        VatomStatus::Ok
    })
}

/// Number of bound dressed states (0, 1 or 2) for the given detunings.
///
/// # Safety
/// `out_count` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vatom_classify(model: VatomModel, delta1: f64, delta2: f64, out_count: *mut u32) -> VatomStatus {
    if out_count.is_null() {
        return fail(VatomStatus::NullPointer, "output pointer is NULL");
    }
    guard(|| match ModelParams::new(model.into(), delta1, delta2, 1.0) {
        Ok(p) => {
            *out_count = vatom::dressed::classify_regime(&p).bound_count as u32;
            VatomStatus::Ok
        }
        Err(e) => computation(e),
    })
}

fn params_init(model: VatomModel, delta1: f64, delta2: f64, a: [f64; 4]) -> Result<(ModelParams, InitialState), VatomStatus> {
    let params = ModelParams::new(model.into(), delta1, delta2, 1.0).map_err(computation)?;
    let init = InitialState::new(Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])).map_err(computation)?;
    Ok((params, init))
}

/// Builds the dressed-state spectrum for a normalized initial state.
///
/// # Safety
/// `out` must be valid for writes. On success `*out` owns a handle that
/// must be released with [`vatom_spectrum_free`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn vatom_spectrum_new(
    model: VatomModel,
    delta1: f64,
    delta2: f64,
    a1_re: f64,
    a1_im: f64,
    a2_re: f64,
    a2_im: f64,
    out: *mut *mut VatomSpectrum,
) -> VatomStatus {
    if out.is_null() {
        return fail(VatomStatus::NullPointer, "output pointer is NULL");
    }
    *out = ptr::null_mut();
    guard(|| {
        let (params, init) = match params_init(model, delta1, delta2, [a1_re, a1_im, a2_re, a2_im]) {
            Ok(v) => v,
            Err(s) => return s,
        };
        match coefficients(&params, &init) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VatomSpectrum { inner }));
                VatomStatus::Ok
            }
            Err(e) => computation(e),
        }
    })
}

/// Releases a spectrum. NULL is ignored.
///
/// # Safety
/// `spectrum` must be NULL or a handle from [`vatom_spectrum_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn vatom_spectrum_free(spectrum: *mut VatomSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of dressed states, or 0 for NULL.
///
/// # Safety
/// `spectrum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vatom_spectrum_mode_count(spectrum: *const VatomSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.inner.modes.len())
}

/// Number of bound dressed states, or 0 for NULL.
///
/// # Safety
/// `spectrum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vatom_spectrum_bound_count(spectrum: *const VatomSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.inner.bound_count())
}

/// Copies dressed state `index`.
///
/// # Safety
/// `spectrum` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vatom_spectrum_mode(spectrum: *const VatomSpectrum, index: usize, out: *mut VatomMode) -> VatomStatus {
    let (Some(s), false) = (spectrum.as_ref(), out.is_null()) else {
        return fail(VatomStatus::NullPointer, "spectrum or output pointer is NULL");
    };
    let Some(m) = s.inner.modes.get(index) else {
        return fail(
            VatomStatus::InvalidArgument,
            format!("mode index {index} out of range ({} modes)", s.inner.modes.len()),
        );
    };
    *out = VatomMode {
        x_re: m.x.re,
        x_im: m.x.im,
        alpha1_re: m.alpha1.re,
        alpha1_im: m.alpha1.im,
        alpha2_re: m.alpha2.re,
        alpha2_im: m.alpha2.im,
        bound: m.is_bound() as i32,
    };
    VatomStatus::Ok
}

/// Beat frequency between the two populated bound states.
/// [`VatomStatus::NotFound`] when fewer than two bound states carry weight.
///
/// # Safety
/// `spectrum` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn vatom_spectrum_rabi(spectrum: *const VatomSpectrum, out: *mut f64) -> VatomStatus {
    let (Some(s), false) = (spectrum.as_ref(), out.is_null()) else {
        return fail(VatomStatus::NullPointer, "spectrum or output pointer is NULL");
    };
    match vatom::dressed::rabi_frequency(&s.inner) {
        Some(w) => {
            *out = w;
            VatomStatus::Ok
        }
        None => fail(VatomStatus::NotFound, "no pair of populated bound states"),
    }
}

/// Evaluates A1, A2 at `n` times. `a1` and `a2` receive `2 n` doubles each.
///
/// # Safety
/// `tau` must point to `n` readable doubles, `a1` and `a2` to `2 n`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vatom_spectrum_evaluate(
    spectrum: *const VatomSpectrum,
    tau: *const f64,
    n: usize,
    a1: *mut f64,
    a2: *mut f64,
) -> VatomStatus {
    let Some(s) = spectrum.as_ref() else {
        return fail(VatomStatus::NullPointer, "spectrum is NULL");
    };
    if n == 0 {
        return VatomStatus::Ok;
    }
    if tau.is_null() || a1.is_null() || a2.is_null() {
        return fail(VatomStatus::NullPointer, "array pointer is NULL");
    }
    let tau = std::slice::from_raw_parts(tau, n);
    let a1 = std::slice::from_raw_parts_mut(a1, 2 * n);
    let a2 = std::slice::from_raw_parts_mut(a2, 2 * n);
    guard(|| match amplitudes_from_spectrum(&s.inner, tau) {
        Ok(series) => {
            for k in 0..n {
                a1[2 * k] = series.a1[k].re;
                a1[2 * k + 1] = series.a1[k].im;
                a2[2 * k] = series.a2[k].re;
                a2[2 * k + 1] = series.a2[k].im;
            }
            VatomStatus::Ok
        }
        Err(e) => computation(e),
    })
}

/// Default oracle settings.
#[no_mangle]
pub extern "C" fn vatom_oracle_default_config() -> VatomOracleConfig {
    let d = ReservoirConfig::default();
    VatomOracleConfig {
        n_modes: d.n_modes,
        u_max: d.u_max,
        dt: d.dt,
        taper: d.taper,
        method: 0,
    }
}

/// Compares the analytic populations with the discretized reservoir on
/// `steps` uniform points over [0, tau_max]. With `check_convergence`
/// nonzero the run is repeated at doubled resolution.
///
/// # Safety
/// `config` must be readable and `out` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn vatom_oracle_compare(
    model: VatomModel,
    delta1: f64,
    delta2: f64,
    theta: f64,
    tau_max: f64,
    steps: usize,
    config: *const VatomOracleConfig,
    check_convergence: i32,
    out: *mut VatomOracleReport,
) -> VatomStatus {
    let (Some(c), false) = (config.as_ref(), out.is_null()) else {
        return fail(VatomStatus::NullPointer, "config or output pointer is NULL");
    };
    let method = match c.method {
        0 => Integrator::Etdrk4,
        1 => Integrator::Rk4,
        m => return fail(VatomStatus::InvalidArgument, format!("unknown method {m}")),
    };
    let config = ReservoirConfig {
        n_modes: c.n_modes,
        u_max: c.u_max,
        dt: c.dt,
        taper: c.taper,
        method,
        ..ReservoirConfig::default()
    };
    guard(|| {
        let run = || -> vatom::Result<VatomOracleReport> {
            let params = ModelParams::new(model.into(), delta1, delta2, 1.0)?;
            let init = InitialState::from_theta(theta);
            let grid = vatom::evolve::uniform_grid(tau_max, steps)?;
            let cmp = compare(&params, &init, &grid, &config)?;
            let shift = if check_convergence != 0 {
                convergence_shift_from(&cmp.oracle, &params, &init, &config)?
            } else {
                -1.0
            };
            Ok(VatomOracleReport {
                max_deviation: cmp.max_deviation,
                norm_drift: cmp.oracle.norm_drift,
                convergence_shift: shift,
            })
        };
        match run() {
            Ok(r) => {
                *out = r;
                VatomStatus::Ok
            }
            Err(e) => computation(e),
        }
    })
}
