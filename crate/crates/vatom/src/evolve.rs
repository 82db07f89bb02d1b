//! Analytic amplitudes on a time grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{coefficients, two_level_spectrum, DressedSpectrum, InitialState, TwoLevelSpectrum};
use crate::error::{Error, Result};
use crate::model::{ModelKind, ModelParams};
use crate::specfun::dressed_term_unchecked;

/// Sampled amplitudes (lab-rotating frame of the atomic levels) and populations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub tau: Vec<f64>,
    pub a1: Vec<Complex64>,
    pub a2: Vec<Complex64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub pt: Vec<f64>,
}

impl TimeSeries {
    pub fn from_amplitudes(tau: Vec<f64>, a1: Vec<Complex64>, a2: Vec<Complex64>) -> Self {
        let p1: Vec<f64> = a1.iter().map(|a| a.norm_sqr()).collect();
        let p2: Vec<f64> = a2.iter().map(|a| a.norm_sqr()).collect();
        let pt = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
        TimeSeries {
            tau,
            a1,
            a2,
            p1,
            p2,
            pt,
        }
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Amplitude of level n (0 or 1).
    pub fn amplitude(&self, n: usize) -> &[Complex64] {
        if n == 0 {
            &self.a1
        } else {
            &self.a2
        }
    }
}

/// Evenly spaced grid of `steps` points on [0, tau_max].
pub fn uniform_grid(tau_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 steps, got {steps}")));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::InvalidGrid(format!("tau_max must be positive, got {tau_max}")));
    }
    let h = tau_max / (steps - 1) as f64;
    Ok((0..steps).map(|k| k as f64 * h).collect())
}

pub(crate) fn check_grid(tau_grid: &[f64]) -> Result<()> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if !(tau_grid[0] >= 0.0) {
        return Err(Error::InvalidGrid(format!(
            "grid must start at tau >= 0, got {}",
            tau_grid[0]
        )));
    }
    for w in tau_grid.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidGrid("grid must be strictly ascending and finite".into()));
        }
    }
    Ok(())
}

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Band-edge frame amplitude sum_m alpha_m D(X_m, tau); zero roots drop out.
fn frame_sum(spectrum: &DressedSpectrum, tau: f64) -> [Complex64; 2] {
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    for m in &spectrum.modes {
        if m.x == Complex64::new(0.0, 0.0) {
            continue;
        }
        if m.alpha1 == Complex64::new(0.0, 0.0) && m.alpha2 == Complex64::new(0.0, 0.0) {
            continue;
        }
        let d = dressed_term_unchecked(m.x, tau);
        acc[0] += m.alpha1 * d;
        acc[1] += m.alpha2 * d;
    }
    acc
}

/// Amplitudes for a precomputed spectrum.
pub fn amplitudes_from_spectrum(spectrum: &DressedSpectrum, tau_grid: &[f64]) -> Result<TimeSeries> {
    check_grid(tau_grid)?;
    let deltas = spectrum.params.deltas();
    let values: Vec<(Complex64, Complex64)> = tau_grid
        .par_iter()
        .map(|&tau| {
            let c = frame_sum(spectrum, tau);
            (c[0] * phase(tau * deltas[0]), c[1] * phase(tau * deltas[1]))
        })
        .collect();
    let (a1, a2) = values.into_iter().unzip();
    Ok(TimeSeries::from_amplitudes(tau_grid.to_vec(), a1, a2))
}

/// A_n(tau) = e^{i tau Delta_n} sum_m alpha_{n,m} D(X_m, tau).
pub fn amplitudes(params: &ModelParams, init: &InitialState, tau_grid: &[f64]) -> Result<TimeSeries> {
    let spectrum = coefficients(params, init)?;
    amplitudes_from_spectrum(&spectrum, tau_grid)
}

/// Two-level amplitude with unit initial amplitude for the given spectrum.
pub fn two_level_amplitudes_from(spec: &TwoLevelSpectrum, tau_grid: &[f64]) -> Result<Vec<Complex64>> {
    check_grid(tau_grid)?;
    Ok(tau_grid
        .par_iter()
        .map(|&tau| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (&x, &alpha) in spec.roots.iter().zip(&spec.residues) {
                if x != Complex64::new(0.0, 0.0) && alpha != Complex64::new(0.0, 0.0) {
                    acc += alpha * dressed_term_unchecked(x, tau);
                }
            }
            acc * phase(tau * spec.delta)
        })
        .collect())
}

/// Two-level amplitude for coupling `coupling` (1 in native units).
pub fn two_level_amplitudes(
    kind: ModelKind,
    delta: f64,
    coupling: f64,
    tau_grid: &[f64],
) -> Result<Vec<Complex64>> {
    let spec = two_level_spectrum(kind, delta, coupling)?;
    two_level_amplitudes_from(&spec, tau_grid)
}

/// max_tau |A_1(tau; delta, delta, theta = pi/4) - A_tl(tau; coupling 2, delta) / sqrt 2|.
pub fn degenerate_reduction_check(delta: f64, tau_grid: &[f64]) -> Result<f64> {
    degenerate_reduction_check_for(ModelKind::Anisotropic, delta, tau_grid)
}

pub fn degenerate_reduction_check_for(kind: ModelKind, delta: f64, tau_grid: &[f64]) -> Result<f64> {
    let params = ModelParams::new(kind, delta, delta, 1.0)?;
    let init = InitialState::from_theta(std::f64::consts::FRAC_PI_4);
    let three = amplitudes(&params, &init, tau_grid)?;
    let two = two_level_amplitudes(kind, delta, 2.0, tau_grid)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(three
        .a1
        .iter()
        .zip(&two)
        .map(|(a, b)| (a - b * s).norm())
        .fold(0.0, f64::max))
}
