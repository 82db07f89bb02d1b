//! Discretized reservoir: mode grid, cutoff counterterms and the steppers.
//!
//! The atom couples to modes eps_j = u_j^2 on a midpoint grid in u. The modes
//! above the cutoff are not simulated; their effect on the slow dynamics is
//! restored by two counterterms in the band-edge frame,
//!
//!   K(s) ~ K_grid(s) - i c + kappa s,
//!
//! with c cancelling the constant (Lamb) shift of the truncated sum and kappa
//! the leading s-term of the missing tail. The kappa term is handled exactly by
//! integrating D = C + kappa S (1,1)^T instead of C. A smooth cos^2 roll-off of
//! the coupling over the top `taper` fraction of the band suppresses the
//! ringing a hard edge produces at tau ~ 1/u_max^3.

use num_complex::Complex64;

use super::quad::{gauss_legendre, integrate};
use super::{Integrator, ReservoirConfig};
use crate::model::ModelKind;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

pub(crate) struct ModeGrid {
    pub eps: Vec<f64>,
    pub g: Vec<f64>,
    /// constant counterterm
    pub c: f64,
    /// s-linear counterterm
    pub kappa: f64,
}

fn taper_weight(u: f64, u_max: f64, taper: f64) -> f64 {
    if taper <= 0.0 {
        return 1.0;
    }
    let width = taper * u_max;
    let x = ((u - (u_max - width)) / width).clamp(0.0, 1.0);
    let c = (std::f64::consts::FRAC_PI_2 * x).cos();
    c * c
}

/// integral of (1 - w(u)) / u^p over the roll-off, plus the hard tail beyond u_max
fn missing_moment(u_max: f64, taper: f64, p: i32) -> f64 {
    let tail = u_max.powi(1 - p) / (p - 1) as f64;
    if taper <= 0.0 {
        return tail;
    }
    let rule = gauss_legendre(48);
    let lo = u_max * (1.0 - taper);
    let roll = integrate(
        |u| (1.0 - taper_weight(u, u_max, taper)) / u.powi(p),
        lo,
        u_max,
        &rule,
    );
    tail + roll
}

impl ModeGrid {
    pub fn new(kind: ModelKind, config: &ReservoirConfig) -> Self {
        let n = config.n_modes;
        let du = config.u_max / n as f64;
        let scale = config.coupling_scale;
        let two_over_pi = 2.0 / std::f64::consts::PI;
        let mut eps = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        for j in 0..n {
            let u = (j as f64 + 0.5) * du;
            let w = taper_weight(u, config.u_max, config.taper);
            let g2 = match kind {
                ModelKind::Anisotropic => scale * two_over_pi * u * u * du * w,
                ModelKind::Isotropic => scale * two_over_pi * du * w,
            };
            eps.push(u * u);
            g.push(g2.sqrt());
        }
        let (c, kappa) = match kind {
            ModelKind::Anisotropic => {
                let c = g.iter().zip(&eps).map(|(g, e)| g * g / e).sum::<f64>();
                (c, scale * two_over_pi * missing_moment(config.u_max, config.taper, 2))
            }
            ModelKind::Isotropic => (
                -scale * two_over_pi * missing_moment(config.u_max, config.taper, 2),
                scale * two_over_pi * missing_moment(config.u_max, config.taper, 4),
            ),
        };
        ModeGrid { eps, g, c, kappa }
    }
}

/// Atom part in the D variables.
#[derive(Clone, Copy)]
pub(crate) struct Atom {
    pub delta: [f64; 2],
    pub c: f64,
    pub kappa: f64,
    pub shift: f64,
}

impl Atom {
    /// (C, S) from D.
    #[inline]
    pub fn unpack(&self, d: [C64; 2]) -> ([C64; 2], C64) {
        let sum = d[0] + d[1];
        let f = self.kappa / (1.0 + 2.0 * self.kappa);
        ([d[0] - sum * f, d[1] - sum * f], sum / (1.0 + 2.0 * self.kappa))
    }

    /// dD/dtau given the reservoir field G = sum g_j B_j; also returns S.
    #[inline]
    pub fn rhs(&self, d: [C64; 2], field: C64) -> ([C64; 2], C64) {
        let (c, s) = self.unpack(d);
        let common = -I * self.c * s - field;
        let f = |n: usize| -I * (self.shift * d[n] + self.delta[n] * c[n]) + common;
        ([f(0), f(1)], s)
    }

    pub fn norm(&self, d: [C64; 2]) -> f64 {
        let (c, s) = self.unpack(d);
        c[0].norm_sqr() + c[1].norm_sqr() + self.kappa * s.norm_sqr()
    }
}

fn axpy(d: [C64; 2], h: f64, k: [C64; 2]) -> [C64; 2] {
    [d[0] + k[0] * h, d[1] + k[1] * h]
}

/// phi_1, phi_2, phi_3 of z.
fn phis(z: C64) -> (C64, C64, C64) {
    if z.norm() < 1.0 {
        let mut p = [C64::new(0.0, 0.0); 3];
        let mut term = C64::new(1.0, 0.0); // z^m / m!
        let mut fact_shift = [1.0, 1.0, 1.0];
        // phi_k = sum_m z^m / (m + k)!
        let mut zm = C64::new(1.0, 0.0);
        for m in 0..30 {
            let mf = m as f64;
            fact_shift[0] = if m == 0 { 1.0 } else { fact_shift[0] * (mf + 1.0) };
            fact_shift[1] = if m == 0 { 2.0 } else { fact_shift[1] * (mf + 2.0) };
            fact_shift[2] = if m == 0 { 6.0 } else { fact_shift[2] * (mf + 3.0) };
            p[0] += zm / fact_shift[0];
            p[1] += zm / fact_shift[1];
            p[2] += zm / fact_shift[2];
            zm *= z;
            term *= z;
        }
        (p[0], p[1], p[2])
    } else {
        let e = z.exp();
        let one = C64::new(1.0, 0.0);
        let p1 = (e - one) / z;
        let p2 = (e - one - z) / (z * z);
        let p3 = (e - one - z - z * z * 0.5) / (z * z * z);
        (p1, p2, p3)
    }
}

/// Observer invoked after every step: (step index, D, B, sum |B|^2).
pub(crate) trait Observer {
    fn observe(&mut self, step: usize, d: [C64; 2], reservoir: f64) -> bool;
}

pub(crate) fn run<O: Observer>(
    atom: Atom,
    grid: &ModeGrid,
    config: &ReservoirConfig,
    init: [C64; 2],
    steps: usize,
    observer: &mut O,
) {
    match config.method {
        Integrator::Etdrk4 => run_etdrk4(atom, grid, config.dt, init, steps, observer),
        Integrator::Rk4 => run_rk4(atom, grid, config.dt, init, steps, observer),
    }
}

/// Per-mode constants of the exponential step, split into real and imaginary parts.
const LANES: usize = 8;
type Lane = [f64; LANES];

/// Per-step coefficients for LANES modes. Padding modes have all zeros and
/// stay empty.
#[derive(Clone, Copy, Default)]
struct ModeBlock {
    e_re: Lane,
    e_im: Lane,
    ge_re: Lane,
    ge_im: Lane,
    ge2_re: Lane,
    ge2_im: Lane,
    g: Lane,
    /// g f1, 2 g f2, g f3 (re, im)
    c: [Lane; 6],
}

/// B <- E B + c1 S0 + c2 (Sa + Sb) + c3 Sc, fused with the sums needed by
/// the next step: sum g B, sum g E2 B, sum g E B (re, im each) and sum |B|^2.
fn update_modes(k: &[ModeBlock], b_re: &mut [Lane], b_im: &mut [Lane], s: [C64; 3]) -> [f64; 7] {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("fma") {
            // SAFETY: the required features were detected at runtime
            return unsafe { update_modes_avx2(k, b_re, b_im, s) };
        }
    }
    update_modes_generic(k, b_re, b_im, s)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn update_modes_avx2(k: &[ModeBlock], b_re: &mut [Lane], b_im: &mut [Lane], s: [C64; 3]) -> [f64; 7] {
    update_modes_generic(k, b_re, b_im, s)
}

#[inline(always)]
fn update_modes_generic(k: &[ModeBlock], b_re: &mut [Lane], b_im: &mut [Lane], s: [C64; 3]) -> [f64; 7] {
    let [s0, sab, sc] = s;
    let mut acc = [[0.0f64; LANES]; 7];
    for ((m, br), bi) in k.iter().zip(b_re.iter_mut()).zip(b_im.iter_mut()) {
        for l in 0..LANES {
            let (er, ei) = (m.e_re[l], m.e_im[l]);
            let (xr, xi) = (br[l], bi[l]);
            let [c1r, c1i, c2r, c2i, c3r, c3i] = [m.c[0][l], m.c[1][l], m.c[2][l], m.c[3][l], m.c[4][l], m.c[5][l]];
            let nr = er * xr - ei * xi + c1r * s0.re - c1i * s0.im + c2r * sab.re - c2i * sab.im + c3r * sc.re
                - c3i * sc.im;
            let ni = er * xi + ei * xr + c1r * s0.im + c1i * s0.re + c2r * sab.im + c2i * sab.re + c3r * sc.im
                + c3i * sc.re;
            br[l] = nr;
            bi[l] = ni;
            let g = m.g[l];
            acc[0][l] += g * nr;
            acc[1][l] += g * ni;
            acc[2][l] += m.ge2_re[l] * nr - m.ge2_im[l] * ni;
            acc[3][l] += m.ge2_re[l] * ni + m.ge2_im[l] * nr;
            acc[4][l] += m.ge_re[l] * nr - m.ge_im[l] * ni;
            acc[5][l] += m.ge_re[l] * ni + m.ge_im[l] * nr;
            acc[6][l] += nr * nr + ni * ni;
        }
    }
    acc.map(|a| a.iter().sum())
}

fn run_etdrk4<O: Observer>(
    atom: Atom,
    grid: &ModeGrid,
    h: f64,
    init: [C64; 2],
    steps: usize,
    observer: &mut O,
) {
    let n = grid.eps.len();
    let mut k = vec![ModeBlock::default(); n.div_ceil(LANES)];
    let mut w1 = C64::new(0.0, 0.0);
    let mut w2 = C64::new(0.0, 0.0);
    for j in 0..n {
        let z = -I * (grid.eps[j] + atom.shift) * h;
        let e = z.exp();
        let e2 = (z * 0.5).exp();
        let (q1, _, _) = phis(z * 0.5);
        let q = q1 * (0.5 * h);
        let (p1, p2, p3) = phis(z);
        let f1 = (p1 - p2 * 3.0 + p3 * 4.0) * h;
        let f2 = (p2 - p3 * 2.0) * h;
        let f3 = (-p2 + p3 * 4.0) * h;
        let gj = grid.g[j];
        let (m, l) = (&mut k[j / LANES], j % LANES);
        m.e_re[l] = e.re;
        m.e_im[l] = e.im;
        m.ge_re[l] = gj * e.re;
        m.ge_im[l] = gj * e.im;
        m.ge2_re[l] = gj * e2.re;
        m.ge2_im[l] = gj * e2.im;
        m.g[l] = gj;
        m.c = {
            let mut c = m.c;
            for (i, v) in [f1, f2 * 2.0, f3].into_iter().enumerate() {
                c[2 * i][l] = gj * v.re;
                c[2 * i + 1][l] = gj * v.im;
            }
            c
        };
        w1 += q * (gj * gj);
        w2 += e2 * q * (gj * gj);
    }
    let mut b_re = vec![[0.0; LANES]; k.len()];
    let mut b_im = vec![[0.0; LANES]; k.len()];
    let mut d = init;
    // sum g B, sum g E2 B, sum g E B for the current B
    let (mut p0, mut p1, mut p2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));

    for step in 1..=steps {
        let (k0, s0) = atom.rhs(d, p0);
        let da = axpy(d, 0.5 * h, k0);
        let (ka, sa) = atom.rhs(da, p1 + s0 * w1);
        let db = axpy(d, 0.5 * h, ka);
        let (kb, sb) = atom.rhs(db, p1 + sa * w1);
        let dc = axpy(d, h, kb);
        let (kc, sc) = atom.rhs(dc, p2 + s0 * w2 + (sb * 2.0 - s0) * w1);
        for k in 0..2 {
            d[k] += (k0[k] + (ka[k] + kb[k]) * 2.0 + kc[k]) * (h / 6.0);
        }
        let acc = update_modes(&k, &mut b_re, &mut b_im, [s0, sa + sb, sc]);
        p0 = C64::new(acc[0], acc[1]);
        p1 = C64::new(acc[2], acc[3]);
        p2 = C64::new(acc[4], acc[5]);
        if !observer.observe(step, d, acc[6]) {
            return;
        }
    }
}

fn run_rk4<O: Observer>(
    atom: Atom,
    grid: &ModeGrid,
    h: f64,
    init: [C64; 2],
    steps: usize,
    observer: &mut O,
) {
    let n = grid.eps.len();
    let freq: Vec<f64> = grid.eps.iter().map(|e| e + atom.shift).collect();
    let g = &grid.g;
    let zero = C64::new(0.0, 0.0);
    let mut b = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut acc = vec![zero; n];
    let mut d = init;
    let field = |b: &[C64]| b.iter().zip(g).map(|(b, g)| b * g).sum::<C64>();
    for step in 1..=steps {
        // stage 1
        let (k1, s1) = atom.rhs(d, field(&b));
        for j in 0..n {
            let kb = -I * freq[j] * b[j] + s1 * g[j];
            acc[j] = kb;
            tmp[j] = b[j] + kb * (0.5 * h);
        }
        let d2 = axpy(d, 0.5 * h, k1);
        let (k2, s2) = atom.rhs(d2, field(&tmp));
        for j in 0..n {
            let kb = -I * freq[j] * tmp[j] + s2 * g[j];
            acc[j] += kb * 2.0;
            tmp[j] = b[j] + kb * (0.5 * h);
        }
        let d3 = axpy(d, 0.5 * h, k2);
        let (k3, s3) = atom.rhs(d3, field(&tmp));
        for j in 0..n {
            let kb = -I * freq[j] * tmp[j] + s3 * g[j];
            acc[j] += kb * 2.0;
            tmp[j] = b[j] + kb * h;
        }
        let d4 = axpy(d, h, k3);
        let (k4, s4) = atom.rhs(d4, field(&tmp));
        let mut reservoir = 0.0;
        for j in 0..n {
            let kb = -I * freq[j] * tmp[j] + s4 * g[j];
            b[j] += (acc[j] + kb) * (h / 6.0);
            reservoir += b[j].norm_sqr();
        }
        for k in 0..2 {
            d[k] += (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (h / 6.0);
        }
        if !observer.observe(step, d, reservoir) {
            return;
        }
    }
}
