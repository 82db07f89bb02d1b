//! Problem parameters and the polynomials that define the dressed states.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reservoir dispersion model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Anisotropic band edge, density of states ~ sqrt(eps).
    Anisotropic,
    /// Isotropic band edge, density of states ~ 1/sqrt(eps).
    Isotropic,
}

impl ModelKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::Anisotropic => "aniso",
            ModelKind::Isotropic => "iso",
        }
    }

    /// Exponent p such that detunings scale as r^p and tau = r^p t.
    fn scaling_exponent(self) -> f64 {
        match self {
            ModelKind::Anisotropic => 2.0,
            ModelKind::Isotropic => 2.0 / 3.0,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aniso" | "anisotropic" => Ok(ModelKind::Anisotropic),
            "iso" | "isotropic" => Ok(ModelKind::Isotropic),
            other => Err(Error::InvalidParameter(format!(
                "unknown model '{other}' (expected aniso or iso)"
            ))),
        }
    }
}

/// Detunings and coupling, stored in units where the coupling is 1.
///
/// A coupling `r != 1` passed to [`ModelParams::new`] is absorbed into the
/// detunings: `delta = Delta / r^2` (anisotropic) or `Delta / r^(2/3)`
/// (isotropic). Time then reads `tau = r^2 t` or `r^(2/3) t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    kind: ModelKind,
    delta1: f64,
    delta2: f64,
    coupling: f64,
}

impl ModelParams {
    pub fn new(kind: ModelKind, delta1: f64, delta2: f64, coupling: f64) -> Result<Self> {
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite and positive, got {coupling}"
            )));
        }
        if !delta1.is_finite() || !delta2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detunings must be finite, got ({delta1}, {delta2})"
            )));
        }
        let scale = coupling.powf(kind.scaling_exponent());
        Ok(ModelParams {
            kind,
            delta1: delta1 / scale,
            delta2: delta2 / scale,
            coupling,
        })
    }

    pub fn anisotropic(delta1: f64, delta2: f64) -> Result<Self> {
        Self::new(ModelKind::Anisotropic, delta1, delta2, 1.0)
    }

    pub fn isotropic(delta1: f64, delta2: f64) -> Result<Self> {
        Self::new(ModelKind::Isotropic, delta1, delta2, 1.0)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Nondimensional detuning of level 1.
    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    /// Nondimensional detuning of level 2.
    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn deltas(&self) -> [f64; 2] {
        [self.delta1, self.delta2]
    }

    /// The coupling constant as given on construction.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Factor converting physical time t into tau.
    pub fn time_scale(&self) -> f64 {
        self.coupling.powf(self.kind.scaling_exponent())
    }

    /// Same model with the two levels exchanged.
    pub fn swapped(&self) -> Self {
        ModelParams {
            delta1: self.delta2,
            delta2: self.delta1,
            ..*self
        }
    }
}

/// Polynomial with complex coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    pub coefficients: Vec<Complex64>,
    pub monic: bool,
}

impl ComplexPolynomial {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        let monic = coefficients.last() == Some(&Complex64::new(1.0, 0.0));
        ComplexPolynomial {
            coefficients,
            monic,
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coefficients.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    /// sum |c_k| |x|^k, the natural scale for residuals at x.
    pub fn magnitude_at(&self, x: Complex64) -> f64 {
        let r = x.norm();
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }
}

/// Polynomial with real coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    pub coefficients: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        RealPolynomial { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coefficients.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn to_complex(&self) -> ComplexPolynomial {
        ComplexPolynomial::new(
            self.coefficients
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        )
    }
}

/// e^{i pi/4}, direction of the bound-state ray.
pub fn ray() -> Complex64 {
    Complex64::from_polar(1.0, FRAC_PI_4)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Characteristic polynomial in X = sqrt(s) for explicit coupling `r`.
pub fn characteristic_polynomial_with(
    kind: ModelKind,
    delta1: f64,
    delta2: f64,
    r: f64,
) -> ComplexPolynomial {
    let sum = delta1 + delta2;
    let prod = delta1 * delta2;
    let i = c(0.0, 1.0);
    match kind {
        ModelKind::Anisotropic => {
            let rho = ray() * r;
            ComplexPolynomial::new(vec![
                c(-prod, 0.0),
                i * rho * sum,
                c(0.0, sum),
                rho * 2.0,
                c(1.0, 0.0),
            ])
        }
        ModelKind::Isotropic => {
            let rho = ray().conj() * r;
            ComplexPolynomial::new(vec![
                i * rho * sum,
                c(-prod, 0.0),
                rho * 2.0,
                c(0.0, sum),
                c(0.0, 0.0),
                c(1.0, 0.0),
            ])
        }
    }
}

/// Quartic (anisotropic) or quintic (isotropic) whose roots are the dressed states.
pub fn characteristic_polynomial(params: &ModelParams) -> ComplexPolynomial {
    characteristic_polynomial_with(params.kind, params.delta1, params.delta2, 1.0)
}

/// Two-level characteristic polynomial for explicit coupling `r`.
pub fn two_level_polynomial_with(kind: ModelKind, delta: f64, r: f64) -> ComplexPolynomial {
    match kind {
        ModelKind::Anisotropic => {
            ComplexPolynomial::new(vec![c(0.0, delta), ray() * r, c(1.0, 0.0)])
        }
        ModelKind::Isotropic => ComplexPolynomial::new(vec![
            ray().conj() * r,
            c(0.0, delta),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]),
    }
}

/// Two-level limit in units where the coupling is 1.
pub fn two_level_polynomial(delta: f64, kind: ModelKind) -> ComplexPolynomial {
    two_level_polynomial_with(kind, delta, 1.0)
}

/// Real polynomial in a obtained from the characteristic polynomial at
/// X = a e^{i pi/4}, divided by [`ray_phase`].
pub fn bound_ray_polynomial_with(
    kind: ModelKind,
    delta1: f64,
    delta2: f64,
    r: f64,
) -> RealPolynomial {
    let sum = delta1 + delta2;
    let prod = delta1 * delta2;
    match kind {
        ModelKind::Anisotropic => RealPolynomial::new(vec![prod, r * sum, sum, 2.0 * r, 1.0]),
        ModelKind::Isotropic => {
            RealPolynomial::new(vec![-r * sum, prod, -2.0 * r, sum, 0.0, 1.0])
        }
    }
}

pub fn bound_ray_polynomial(params: &ModelParams) -> RealPolynomial {
    bound_ray_polynomial_with(params.kind, params.delta1, params.delta2, 1.0)
}

/// Ray reduction of the two-level polynomial.
pub fn two_level_ray_polynomial(delta: f64, kind: ModelKind) -> RealPolynomial {
    match kind {
        ModelKind::Anisotropic => RealPolynomial::new(vec![delta, 1.0, 1.0]),
        ModelKind::Isotropic => RealPolynomial::new(vec![-1.0, delta, 0.0, 1.0]),
    }
}

/// Global phase relating ray and characteristic polynomials:
/// `P(a e^{i pi/4}) = phase * R(a)`.
pub fn ray_phase(kind: ModelKind, two_level: bool) -> Complex64 {
    let angle = match (kind, two_level) {
        (ModelKind::Anisotropic, false) => std::f64::consts::PI,
        (ModelKind::Isotropic, false) => 5.0 * FRAC_PI_4,
        (ModelKind::Anisotropic, true) => 2.0 * FRAC_PI_4,
        (ModelKind::Isotropic, true) => 3.0 * FRAC_PI_4,
    };
    Complex64::from_polar(1.0, angle)
}

/// Photon density of states J(eps) measured from the band edge.
///
/// Zero inside the gap (eps < 0). The isotropic density diverges at the edge
/// and returns `f64::INFINITY` there.
pub fn spectral_density(eps: f64, params: &ModelParams) -> f64 {
    spectral_density_with(params.kind, eps, 1.0)
}

pub fn spectral_density_with(kind: ModelKind, eps: f64, r: f64) -> f64 {
    if eps < 0.0 {
        return 0.0;
    }
    match kind {
        ModelKind::Anisotropic => r * FRAC_1_PI * eps.sqrt(),
        ModelKind::Isotropic => {
            if eps == 0.0 {
                f64::INFINITY
            } else {
                r * FRAC_1_PI / eps.sqrt()
            }
        }
    }
}
