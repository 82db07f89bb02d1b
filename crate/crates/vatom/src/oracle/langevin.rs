//! Residual of the fractional Langevin equation for the slow amplitudes.
//!
//! With C_n = e^{-i Delta_n tau} A_n and S = C_1 + C_2 the amplitudes obey
//!
//!   D^{1/2} C_n + i Delta_n I^{1/2} C_n + rho S = 0          (anisotropic)
//!   D^{1/2} C_n + i Delta_n I^{1/2} C_n + rho' I^1 S = 0     (isotropic)
//!
//! with D^{1/2} the Caputo semi-derivative, I^{1/2} the Riemann-Liouville
//! semi-integral, rho = e^{i pi/4}, rho' = e^{-i pi/4}. Both operators are
//! discretized by product integration: C is interpolated by quadratics on
//! pairs of grid intervals and the weakly singular kernel is integrated
//! exactly against each piece. Near tau = 0 the amplitudes behave like
//! a + b sqrt(tau), so the first few panels interpolate in sqrt(tau) instead.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::quad::gauss_legendre;
use crate::error::{Error, Result};
use crate::evolve::TimeSeries;
use crate::model::{ModelKind, ModelParams};

type C64 = Complex64;

/// Fewest grid points accepted.
pub const LANGEVIN_MIN_POINTS: usize = 500;

/// Residuals are reported for tau at or above this.
const TAU_FLOOR: f64 = 0.01;

/// Panels starting below this node interpolate in sqrt(tau).
const ROOT_PANELS: usize = 16;

/// Distance (in steps) beyond which the kernel is smooth enough for Gauss-Legendre.
const SMOOTH_DISTANCE: f64 = 3.0;

/// Kernel-weighted integrals over one interval, for both operators and the
/// plain integral: (I^{1/2} part, D^{1/2} part, I^1 part), all unscaled by sqrt(pi).
#[derive(Clone, Copy, Default)]
struct Piece {
    semi_int: C64,
    semi_der: C64,
    plain: C64,
}

impl std::ops::AddAssign for Piece {
    fn add_assign(&mut self, o: Piece) {
        self.semi_int += o.semi_int;
        self.semi_der += o.semi_der;
        self.plain += o.plain;
    }
}

/// Moments int_{x0}^{x1} x^m (a - x)^{-1/2} dx, m = 0, 1, 2, with a > x1.
fn kernel_moments(a: f64, x0: f64, x1: f64, rule: &(Vec<f64>, Vec<f64>)) -> [f64; 3] {
    if a - x1 >= SMOOTH_DISTANCE {
        let half = 0.5 * (x1 - x0);
        let mid = 0.5 * (x1 + x0);
        let mut m = [0.0; 3];
        for (&xi, &wi) in rule.0.iter().zip(&rule.1) {
            let x = mid + half * xi;
            let w = wi * half / (a - x).sqrt();
            m[0] += w;
            m[1] += w * x;
            m[2] += w * x * x;
        }
        m
    } else {
        // v = a - x: int v^{-1/2} (a - v)^m dv over [a - x1, a - x0]
        let prim = |v: f64| {
            let s = v.sqrt();
            let p0 = 2.0 * s;
            let p1 = 2.0 * s * v / 3.0;
            let p2 = 2.0 * s * v * v / 5.0;
            [p0, a * p0 - p1, a * a * p0 - 2.0 * a * p1 + p2]
        };
        let hi = prim(a - x0);
        let lo = prim(a - x1);
        [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]]
    }
}

/// Quadratic in tau through nodes (jc-1, jc, jc+1), integrated over
/// [jc + x0, jc + x1] against the kernels at node k.
fn tau_piece(c: &[C64], k: usize, jc: usize, x0: f64, x1: f64, h: f64, rule: &(Vec<f64>, Vec<f64>)) -> Piece {
    let (fm, f0, fp) = (c[jc - 1], c[jc], c[jc + 1]);
    let b0 = f0;
    let b1 = (fp - fm) * 0.5;
    let b2 = (fp + fm) * 0.5 - f0;
    let a = k as f64 - jc as f64;
    let m = kernel_moments(a, x0, x1, rule);
    let semi_int = (b0 * m[0] + b1 * m[1] + b2 * m[2]) * h.sqrt();
    let semi_der = (b1 * m[0] + b2 * (2.0 * m[1])) / h.sqrt();
    let p = |x: f64| b0 * x + b1 * (x * x / 2.0) + b2 * (x * x * x / 3.0);
    let plain = (p(x1) - p(x0)) * h;
    Piece {
        semi_int,
        semi_der,
        plain,
    }
}

/// Antiderivatives of v^m / sqrt(k - v^2), m = 0..3, at v = sqrt(j).
fn root_primitives(k: usize, j: usize) -> [f64; 4] {
    let kf = k as f64;
    let v = (j as f64).sqrt();
    let w = ((k - j) as f64).sqrt();
    let g0 = v.atan2(w);
    [
        g0,
        -w,
        0.5 * kf * g0 - 0.5 * v * w,
        -w * (2.0 * kf + v * v) / 3.0,
    ]
}

/// Quadratic in v = sqrt(tau / h) through nodes (j0, j0+1, j0+2), integrated
/// over [lo, hi] (node indices) against the kernels at node k.
fn root_piece(c: &[C64], k: usize, j0: usize, lo: usize, hi: usize, h: f64) -> Piece {
    let v: [f64; 3] = [0, 1, 2].map(|i| ((j0 + i) as f64).sqrt());
    // monomial coefficients of the Lagrange interpolant
    let mut coef = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        let (p, q) = match i {
            0 => (v[1], v[2]),
            1 => (v[0], v[2]),
            _ => (v[0], v[1]),
        };
        let denom = (v[i] - p) * (v[i] - q);
        let f = c[j0 + i] / denom;
        coef[0] += f * (p * q);
        coef[1] -= f * (p + q);
        coef[2] += f;
    }
    let g_hi = root_primitives(k, hi);
    let g_lo = root_primitives(k, lo);
    let g = [0, 1, 2, 3].map(|m| g_hi[m] - g_lo[m]);
    // dtau = 2 h v dv, (t - tau)^{-1/2} = h^{-1/2} (k - v^2)^{-1/2}
    let semi_int = (coef[0] * g[1] + coef[1] * g[2] + coef[2] * g[3]) * (2.0 * h.sqrt());
    let semi_der = (coef[1] * g[0] + coef[2] * (2.0 * g[1])) / h.sqrt();
    let (vl, vh) = ((lo as f64).sqrt(), (hi as f64).sqrt());
    let poly = |x: f64| coef[0] * (x * x / 2.0) + coef[1] * (x * x * x / 3.0) + coef[2] * (x.powi(4) / 4.0);
    let plain = (poly(vh) - poly(vl)) * (2.0 * h);
    Piece {
        semi_int,
        semi_der,
        plain,
    }
}

/// Operator values at node k for one amplitude history.
fn operators_at(c: &[C64], k: usize, h: f64, rule: &(Vec<f64>, Vec<f64>)) -> Piece {
    let mut acc = Piece::default();
    let even_end = k - k % 2;
    let mut j0 = 0;
    while j0 < even_end {
        if j0 < ROOT_PANELS {
            acc += root_piece(c, k, j0, j0, j0 + 2, h);
        } else {
            acc += tau_piece(c, k, j0 + 1, -1.0, 1.0, h, rule);
        }
        j0 += 2;
    }
    if k % 2 == 1 {
        // last interval [k-1, k] from the quadratic through k-2, k-1, k
        let first = if k == 1 { 0 } else { k - 2 };
        if first < ROOT_PANELS {
            acc += root_piece(c, k, first, k - 1, k, h);
        } else {
            acc += tau_piece(c, k, k - 1, 0.0, 1.0, h, rule);
        }
    }
    acc
}

fn uniform_step(tau: &[f64]) -> Result<f64> {
    if tau.len() < LANGEVIN_MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "need at least {LANGEVIN_MIN_POINTS} points, got {}",
            tau.len()
        )));
    }
    if tau[0] != 0.0 {
        return Err(Error::InvalidGrid(format!("grid must start at 0, got {}", tau[0])));
    }
    let n = tau.len() - 1;
    let h = tau[n] / n as f64;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGrid("grid must be ascending".into()));
    }
    let tol = 1e-9 * tau[n].max(1.0);
    for (k, &t) in tau.iter().enumerate() {
        if (t - k as f64 * h).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "grid is not uniform: tau[{k}] = {t}, expected {}",
                k as f64 * h
            )));
        }
    }
    Ok(h)
}

/// Max residual over tau >= 0.01 of the fractional Langevin equation for the
/// amplitudes in `series`.
pub fn langevin_residual(series: &TimeSeries, params: &ModelParams) -> Result<f64> {
    langevin_residual_with_coupling(series, params, 1.0)
}

/// As [`langevin_residual`] with the reservoir term multiplied by `coupling`
/// (0 leaves the free atom).
pub fn langevin_residual_with_coupling(series: &TimeSeries, params: &ModelParams, coupling: f64) -> Result<f64> {
    if !coupling.is_finite() {
        return Err(Error::InvalidParameter("coupling must be finite".into()));
    }
    let h = uniform_step(&series.tau)?;
    let deltas = params.deltas();
    let slow: [Vec<C64>; 2] = [0, 1].map(|n| {
        series
            .amplitude(n)
            .iter()
            .zip(&series.tau)
            .map(|(a, &t)| a * C64::from_polar(1.0, -deltas[n] * t))
            .collect()
    });
    let sum: Vec<C64> = slow[0].iter().zip(&slow[1]).map(|(a, b)| a + b).collect();
    let rule = gauss_legendre(12);
    let norm = 1.0 / PI.sqrt();
    let (rho, integrated) = match params.kind() {
        ModelKind::Anisotropic => (C64::from_polar(coupling, FRAC_PI_4), false),
        ModelKind::Isotropic => (C64::from_polar(coupling, -FRAC_PI_4), true),
    };
    let i = C64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for k in 1..series.tau.len() {
        if series.tau[k] < TAU_FLOOR {
            continue;
        }
        let reservoir = if integrated {
            operators_at(&sum, k, h, &rule).plain
        } else {
            sum[k]
        };
        for n in 0..2 {
            let ops = operators_at(&slow[n], k, h, &rule);
            let r = (ops.semi_der + i * deltas[n] * ops.semi_int) * norm + rho * reservoir;
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}
