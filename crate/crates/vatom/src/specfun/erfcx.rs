//! Scaled complementary error function for complex argument.
//!
//! erfcx(z) = exp(z^2) erfc(z) = w(iz), with w the Faddeeva function.
//! w is evaluated with the Gautschi / Poppe-Wijers scheme: Taylor series
//! inside a small ellipse around the origin, a Taylor-shifted Laplace
//! continued fraction in the intermediate zone and the bare continued
//! fraction outside the ellipse x^2/6.3^2 + y^2/4.4^2 = 1.

use num_complex::Complex64;

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Faddeeva w(x + iy) for y >= 0.
fn faddeeva_upper(x: f64, y: f64) -> Complex64 {
    debug_assert!(y >= 0.0);
    let xabs = x.abs();
    let xs = xabs / 6.3;
    let ys = y / 4.4;
    let qrho = xs * xs + ys * ys;
    let xquad = xabs * xabs - y * y;
    let yquad = 2.0 * xabs * y;

    let (u, v) = if qrho < 0.085264 {
        // power series of w around the origin, times exp(-z^2)
        let q = (1.0 - 0.85 * ys) * qrho.sqrt();
        let n = (6.0 + 72.0 * q).round() as i32;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let xaux = (xsum * xquad - ysum * yquad) / i as f64;
            ysum = (xsum * yquad + ysum * xquad) / i as f64;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * y + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * y);
        let daux = (-xquad).exp();
        let u2 = daux * yquad.cos();
        let v2 = -daux * yquad.sin();
        (u1 * u2 - v1 * v2, u1 * v2 + v1 * u2)
    } else {
        let (h, kapn, nu) = if qrho > 1.0 {
            let q = qrho.sqrt();
            (0.0, 0, (3.0 + 1442.0 / (26.0 * q + 77.0)) as i32)
        } else {
            let q = (1.0 - ys) * (1.0 - qrho).sqrt();
            (
                1.88 * q,
                (7.0 + 34.0 * q).round() as i32,
                (16.0 + 26.0 * q).round() as i32,
            )
        };
        let shifted = h > 0.0;
        let h2 = 2.0 * h;
        let mut qlambda = if shifted { h2.powi(kapn) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = y + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if shifted && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if shifted {
            (TWO_OVER_SQRT_PI * sx, TWO_OVER_SQRT_PI * sy)
        } else {
            (TWO_OVER_SQRT_PI * rx, TWO_OVER_SQRT_PI * ry)
        }
    };
    let u = if y == 0.0 { (-xabs * xabs).exp() } else { u };
    if x < 0.0 {
        Complex64::new(u, -v)
    } else {
        Complex64::new(u, v)
    }
}

/// exp(z^2) erfc(z).
///
/// Accurate to about 1e-13 relative for Re z >= 0. For Re z < 0 the value
/// is obtained from erfcx(z) = 2 exp(z^2) - erfcx(-z), which overflows
/// once Re(z^2) exceeds about 709.
pub fn erfcx(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        // w(iz), iz = -im + i re, upper half plane
        faddeeva_upper(-z.im, z.re)
    } else {
        let w = faddeeva_upper(z.im, -z.re);
        (z * z).exp() * 2.0 - w
    }
}

/// Real erfcx for x >= 0 (convenience).
pub fn erfcx_real(x: f64) -> f64 {
    erfcx(Complex64::new(x, 0.0)).re
}
