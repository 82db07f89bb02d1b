//! Special functions used by the analytic solution.

mod erfcx;
mod gamma;

pub use erfcx::{erfcx, erfcx_real};
pub use gamma::{gamma, ln_gamma, rgamma};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Principal square root of X^2, i.e. +X or -X with nonnegative real part
/// (ties on the imaginary axis go to nonnegative imaginary part).
pub fn principal_root_of_square(x: Complex64) -> Complex64 {
    if x.re > 0.0 || (x.re == 0.0 && x.im >= 0.0) {
        x
    } else {
        -x
    }
}

/// [Y erf(Y sqrt t) + X] e^{X^2 t} in the overflow-free form
/// (Y + X) e^{X^2 t} - Y erfcx(Y sqrt t), Y = sqrt(X^2).
///
/// Equivalent to X erfcx(-X sqrt t). With Y = X this is the growing-branch
/// form used for roots with Re X > 0; otherwise the first term vanishes.
pub fn dressed_term(x: Complex64, t: f64) -> Result<Complex64> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("dressed term undefined at X = 0".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("dressed term needs t >= 0, got {t}")));
    }
    Ok(dressed_term_unchecked(x, t))
}

#[inline]
pub(crate) fn dressed_term_unchecked(x: Complex64, t: f64) -> Complex64 {
    let y = principal_root_of_square(x);
    let tail = y * erfcx(y * t.sqrt());
    if y == x {
        x * 2.0 * (x * x * t).exp() - tail
    } else {
        -tail
    }
}

/// Truncated fractional exponential with its truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracExp {
    pub value: Complex64,
    pub truncation: f64,
}

/// Relative accuracy frac_exp must certify.
pub const FRAC_EXP_TOL: f64 = 1e-12;

/// E_t(gamma, a) = t^gamma sum_{n < nterms} (a t)^n / Gamma(gamma + n + 1).
///
/// The truncation estimate bounds the discarded tail by a geometric series
/// once term ratios fall below 1. Fails when that bound exceeds
/// `FRAC_EXP_TOL` times the result, or when cancellation between terms would
/// eat more than six digits.
pub fn frac_exp(gamma_order: f64, a: Complex64, t: f64, nterms: usize) -> Result<FracExp> {
    if nterms == 0 {
        return Err(Error::InvalidParameter("nterms must be at least 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("frac_exp needs t > 0, got {t}")));
    }
    if !(gamma_order > -1.0) {
        return Err(Error::Domain(format!(
            "frac_exp needs gamma > -1, got {gamma_order}"
        )));
    }
    let at = a * t;
    let mut term = Complex64::new(t.powf(gamma_order) * rgamma(gamma_order + 1.0), 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut largest = 0.0f64;
    for n in 0..nterms {
        sum += term;
        largest = largest.max(term.norm());
        term = term * at / (gamma_order + n as f64 + 1.0);
    }
    // term now holds the first omitted term
    let ratio = at.norm() / (gamma_order + nterms as f64 + 1.0);
    let truncation = if ratio < 1.0 {
        term.norm() / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    let scale = sum.norm();
    if truncation > FRAC_EXP_TOL * scale.max(f64::MIN_POSITIVE) || largest > 1e6 * scale {
        return Err(Error::SeriesAccuracy {
            estimate: truncation,
            nterms,
        });
    }
    Ok(FracExp {
        value: sum,
        truncation,
    })
}
