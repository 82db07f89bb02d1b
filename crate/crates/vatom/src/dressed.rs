//! Dressed-state spectrum: roots, partial-fraction residues, bound/decaying
//! classification and the dynamical regime.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bound_ray_polynomial, characteristic_polynomial, ray, two_level_polynomial_with,
    ComplexPolynomial, ModelKind, ModelParams,
};
use crate::polyroot::{all_roots, positive_real_roots, CLUSTER_DISTANCE};

const ROOT_TOL: f64 = 1e-14;
const CANCEL_TOL: f64 = 1e-12;
const BOUND_ARG_TOL: f64 = 1e-6;
const BOUND_MIN_MODULUS: f64 = 1e-10;
const RESIDUE_ZERO: f64 = 1e-12;

/// Initial amplitudes of the two excited levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub a1: Complex64,
    pub a2: Complex64,
}

impl InitialState {
    /// Normalized state; fails if |a1|^2 + |a2|^2 differs from 1 by more than 1e-12.
    pub fn new(a1: Complex64, a2: Complex64) -> Result<Self> {
        Self::with_tolerance(a1, a2, 1e-12)
    }

    pub fn with_tolerance(a1: Complex64, a2: Complex64, tol: f64) -> Result<Self> {
        let norm = a1.norm_sqr() + a2.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "initial state norm {norm} differs from 1 by more than {tol:e}"
            )));
        }
        Ok(InitialState { a1, a2 })
    }

    /// (cos theta, sin theta).
    pub fn from_theta(theta: f64) -> Self {
        InitialState {
            a1: Complex64::new(theta.cos(), 0.0),
            a2: Complex64::new(theta.sin(), 0.0),
        }
    }

    /// Any pair, including the zero state; the dynamics are linear so such
    /// states are useful for superposition checks.
    pub fn unnormalized(a1: Complex64, a2: Complex64) -> Self {
        InitialState { a1, a2 }
    }

    pub fn component(&self, n: usize) -> Complex64 {
        if n == 0 {
            self.a1
        } else {
            self.a2
        }
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        InitialState {
            a1: self.a1 * phase,
            a2: self.a2 * phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Bound,
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedMode {
    pub x: Complex64,
    /// X^2; the lab frequency of the mode is omega_c - Im(s).
    pub s: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub kind: ModeKind,
}

impl DressedMode {
    pub fn alpha(&self, n: usize) -> Complex64 {
        if n == 0 {
            self.alpha1
        } else {
            self.alpha2
        }
    }

    pub fn is_bound(&self) -> bool {
        self.kind == ModeKind::Bound
    }

    /// Whether the mode carries an exponential factor e^{s t} in the solution.
    pub fn has_exponential(&self) -> bool {
        self.x.re > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    NonMarkovianDecay,
    DampedQI,
    QI,
}

impl Regime {
    pub fn from_bound_count(count: usize) -> Self {
        match count {
            0 => Regime::NonMarkovianDecay,
            1 => Regime::DampedQI,
            _ => Regime::QI,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Regime::NonMarkovianDecay => 0,
            Regime::DampedQI => 1,
            Regime::QI => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::NonMarkovianDecay => "non-markovian-decay",
            Regime::DampedQI => "damped-quantum-interference",
            Regime::QI => "quantum-interference",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DressedSpectrum {
    pub modes: Vec<DressedMode>,
    pub regime: Regime,
    pub params: ModelParams,
    pub init: InitialState,
}

impl DressedSpectrum {
    pub fn bound_modes(&self) -> impl Iterator<Item = &DressedMode> {
        self.modes.iter().filter(|m| m.is_bound())
    }

    pub fn bound_count(&self) -> usize {
        self.bound_modes().count()
    }
}

fn is_bound_root(x: Complex64) -> bool {
    x.norm() > BOUND_MIN_MODULUS && (x.arg() - FRAC_PI_4).abs() < BOUND_ARG_TOL
}

/// Divide by (X - r), dropping the remainder.
fn deflate(poly: &[Complex64], r: Complex64) -> Vec<Complex64> {
    let n = poly.len();
    if n <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut carry = poly[n - 1];
    out[n - 2] = carry;
    for k in (1..n - 1).rev() {
        carry = poly[k] + r * carry;
        out[k - 1] = carry;
    }
    out
}

fn coarse_magnitude(poly: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm().max(1.0);
    poly.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Partial-fraction residues of numerator / prod(X - roots).
///
/// Root factors shared with the numerator are cancelled first and get a
/// zero residue. Remaining roots closer than the cluster distance make the
/// expansion confluent, which is refused.
pub fn residues(roots: &[Complex64], numerator: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = roots.len();
    let zero = Complex64::new(0.0, 0.0);
    if numerator.iter().all(|c| *c == zero) {
        return Ok(vec![zero; n]);
    }
    let mut active = vec![true; n];
    let mut num = numerator.to_vec();
    loop {
        let mut cancelled = false;
        for m in 0..n {
            if !active[m] || num.len() <= 1 {
                continue;
            }
            let value = ComplexPolynomial::new(num.clone()).eval(roots[m]);
            if value.norm() <= CANCEL_TOL * coarse_magnitude(&num, roots[m]) {
                num = deflate(&num, roots[m]);
                active[m] = false;
                cancelled = true;
                break;
            }
        }
        if !cancelled {
            break;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if active[i] && active[j] && (roots[i] - roots[j]).norm() < CLUSTER_DISTANCE {
                return Err(Error::DegenerateSpectrum(format!(
                    "roots {} and {} coincide within {CLUSTER_DISTANCE:e}",
                    roots[i], roots[j]
                )));
            }
        }
    }
    let num_poly = ComplexPolynomial::new(num);
    Ok((0..n)
        .map(|m| {
            if !active[m] {
                return zero;
            }
            let denom: Complex64 = (0..n)
                .filter(|&j| j != m && active[j])
                .map(|j| roots[m] - roots[j])
                .product();
            num_poly.eval(roots[m]) / denom
        })
        .collect())
}

/// Numerator polynomial of the Laplace amplitude of level n (0 or 1).
fn numerator(kind: ModelKind, deltas: [f64; 2], init: &InitialState, n: usize) -> Vec<Complex64> {
    let an = init.component(n);
    let other = deltas[1 - n];
    let diff = init.a1 - init.a2;
    // -(-1)^n with levels numbered 1, 2
    let sign = if n == 0 { 1.0 } else { -1.0 };
    let i = Complex64::new(0.0, 1.0);
    match kind {
        ModelKind::Anisotropic => {
            let rho = ray();
            vec![an * i * other, rho * diff * sign, an]
        }
        ModelKind::Isotropic => {
            let rho = ray().conj();
            vec![rho * diff * sign, an * i * other, Complex64::new(0.0, 0.0), an]
        }
    }
}

/// Roots, residues and classification for the given parameters and state.
pub fn coefficients(params: &ModelParams, init: &InitialState) -> Result<DressedSpectrum> {
    let poly = characteristic_polynomial(params);
    let set = all_roots(&poly, ROOT_TOL)?;
    let deltas = params.deltas();
    let alpha1 = residues(&set.roots, &numerator(params.kind(), deltas, init, 0))?;
    let alpha2 = residues(&set.roots, &numerator(params.kind(), deltas, init, 1))?;
    let modes: Vec<DressedMode> = set
        .roots
        .iter()
        .enumerate()
        .map(|(m, &x)| DressedMode {
            x,
            s: x * x,
            alpha1: alpha1[m],
            alpha2: alpha2[m],
            kind: if is_bound_root(x) {
                ModeKind::Bound
            } else {
                ModeKind::Decaying
            },
        })
        .collect();
    let bound = modes.iter().filter(|m| m.is_bound()).count();
    Ok(DressedSpectrum {
        modes,
        regime: Regime::from_bound_count(bound),
        params: *params,
        init: *init,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeInfo {
    pub regime: Regime,
    pub bound_count: usize,
    pub bound_roots: Vec<Complex64>,
}

/// Regime from the positive roots of the ray polynomial.
pub fn classify_regime(params: &ModelParams) -> RegimeInfo {
    let a = positive_real_roots(&bound_ray_polynomial(params), 1e-10);
    RegimeInfo {
        regime: Regime::from_bound_count(a.len()),
        bound_count: a.len(),
        bound_roots: a.iter().map(|&a| ray() * a).collect(),
    }
}

fn carries_weight(m: &DressedMode) -> bool {
    m.alpha1.norm() + m.alpha2.norm() > RESIDUE_ZERO
}

/// Beat frequency |Im(s_i - s_j)| of the two most populated bound modes,
/// present only when at least two bound modes carry weight.
pub fn rabi_frequency(spectrum: &DressedSpectrum) -> Option<f64> {
    let mut weighted: Vec<&DressedMode> = spectrum
        .bound_modes()
        .filter(|m| carries_weight(m))
        .collect();
    if weighted.len() < 2 {
        return None;
    }
    weighted.sort_by(|a, b| {
        let wa = (a.alpha1 * a.x).norm() + (a.alpha2 * a.x).norm();
        let wb = (b.alpha1 * b.x).norm() + (b.alpha2 * b.x).norm();
        wb.total_cmp(&wa)
    });
    Some((weighted[0].s - weighted[1].s).im.abs())
}

/// Bound-mode part of the amplitudes, A_n^inf(t) = e^{i t Delta_n} sum 2 alpha X e^{s t}.
pub fn steady_state_amplitudes(spectrum: &DressedSpectrum, t: f64) -> (Complex64, Complex64) {
    let deltas = spectrum.params.deltas();
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    for m in spectrum.bound_modes() {
        let e = m.x * 2.0 * (m.s * t).exp();
        acc[0] += m.alpha1 * e;
        acc[1] += m.alpha2 * e;
    }
    (
        acc[0] * Complex64::from_polar(1.0, t * deltas[0]),
        acc[1] * Complex64::from_polar(1.0, t * deltas[1]),
    )
}

/// Roots and residues of the two-level problem with unit initial amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSpectrum {
    pub kind: ModelKind,
    pub delta: f64,
    pub coupling: f64,
    pub roots: Vec<Complex64>,
    pub residues: Vec<Complex64>,
}

pub fn two_level_spectrum(kind: ModelKind, delta: f64, coupling: f64) -> Result<TwoLevelSpectrum> {
    let poly = two_level_polynomial_with(kind, delta, coupling);
    let set = all_roots(&poly, ROOT_TOL)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let num = match kind {
        ModelKind::Anisotropic => vec![one],
        ModelKind::Isotropic => vec![zero, one],
    };
    let residues = residues(&set.roots, &num)?;
    Ok(TwoLevelSpectrum {
        kind,
        delta,
        coupling,
        roots: set.roots,
        residues,
    })
}
