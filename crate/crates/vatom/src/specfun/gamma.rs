//! Real gamma function.
//!
//! Stirling's series for x >= 10 with the power evaluated as
//! x^((x-1/2)/2) e^{-x} x^((x-1/2)/2) so that no rounded base is raised to a
//! large exponent; downward recurrence below 10; reflection for x < 1/2.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut sum = 0.0;
    for &c in STIRLING.iter().rev() {
        sum = sum * inv2 + c;
    }
    sum * inv
}

/// Gamma(x) for real x. Returns NaN at non-positive integers and +inf past
/// the overflow threshold (about 171.6).
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    if x >= 10.0 {
        let half = x.powf(0.5 * (x - 0.5));
        return SQRT_2PI * half * ((-x).exp() * half) * stirling_correction(x).exp();
    }
    let mut prod = 1.0;
    let mut y = x;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    gamma(y) / prod
}

/// 1 / Gamma(x), zero at non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / gamma(x)
}

/// ln |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x >= 10.0 {
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x)
    } else {
        gamma(x).abs().ln()
    }
}
