//! Interference strength, excited-state coherence and parameter sweeps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{classify_regime, coefficients, rabi_frequency, DressedSpectrum, InitialState, Regime};
use crate::error::{Error, Result};
use crate::evolve::{amplitudes_from_spectrum, TimeSeries};
use crate::model::{ModelKind, ModelParams};

/// How the post-transient window is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterferenceOptions {
    /// Window length in Rabi periods (when a Rabi frequency exists).
    pub window_periods: usize,
    /// Lower bound on the transient time.
    pub transient_floor: f64,
    pub points_per_period: usize,
}

impl Default for InterferenceOptions {
    fn default() -> Self {
        InterferenceOptions {
            window_periods: 10,
            transient_floor: 100.0,
            points_per_period: 64,
        }
    }
}

/// Window length used when fewer than two bound modes beat.
const FALLBACK_WINDOW: f64 = 50.0;
const FALLBACK_PERIODS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceReport {
    /// max - min of P2 over the window
    pub q2: f64,
    /// max - min of P1 + P2 over the window
    pub qt: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub transient_tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Window {
    start: f64,
    end: f64,
    points: usize,
}

impl Window {
    fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let h = (self.end - self.start) / (n - 1) as f64;
        (0..n).map(|k| self.start + k as f64 * h).collect()
    }
}

/// max(floor, 3 max(-1 / Re s)) over the exponentially decaying dressed states.
pub fn transient_time(spectrum: &DressedSpectrum, floor: f64) -> f64 {
    spectrum
        .modes
        .iter()
        .filter(|m| !m.is_bound() && m.has_exponential() && m.s.re < 0.0)
        .map(|m| -3.0 / m.s.re)
        .fold(floor, f64::max)
}

fn window_for(spectrum: &DressedSpectrum, opts: &InterferenceOptions) -> Result<Window> {
    if opts.window_periods == 0 || opts.points_per_period < 2 {
        return Err(Error::InvalidParameter(
            "window needs at least one period and two points per period".into(),
        ));
    }
    if !(opts.transient_floor >= 0.0 && opts.transient_floor.is_finite()) {
        return Err(Error::InvalidParameter("transient floor must be finite and >= 0".into()));
    }
    let start = transient_time(spectrum, opts.transient_floor);
    let w = match rabi_frequency(spectrum) {
        Some(omega) if omega > 0.0 => Window {
            start,
            end: start + opts.window_periods as f64 * 2.0 * std::f64::consts::PI / omega,
            points: opts.window_periods * opts.points_per_period + 1,
        },
        _ => Window {
            start,
            end: start + FALLBACK_WINDOW,
            points: FALLBACK_PERIODS * opts.points_per_period + 1,
        },
    };
    Ok(w)
}

fn windowed(params: &ModelParams, init: &InitialState, opts: &InterferenceOptions) -> Result<(TimeSeries, Window)> {
    let spectrum = coefficients(params, init)?;
    let w = window_for(&spectrum, opts)?;
    Ok((amplitudes_from_spectrum(&spectrum, &w.grid())?, w))
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

fn report(series: &TimeSeries, w: Window) -> InterferenceReport {
    InterferenceReport {
        q2: spread(&series.p2),
        qt: spread(&series.pt),
        window_start: w.start,
        window_end: w.end,
        transient_tau: w.start,
    }
}

/// Post-transient peak-to-peak variation of P2 and of P1 + P2.
pub fn interference(params: &ModelParams, init: &InitialState, opts: &InterferenceOptions) -> Result<InterferenceReport> {
    let (series, w) = windowed(params, init, opts)?;
    Ok(report(&series, w))
}

/// <C1* C2> / sqrt(<|C1|^2><|C2|^2>) over the post-transient window, with
/// C_n = e^{-i tau Delta_n} A_n the amplitudes in the common band-edge frame.
///
/// In the frame of each level the cross term would carry the bare beat
/// e^{i tau (Delta_2 - Delta_1)}, which only averages the product away.
pub fn coherence(params: &ModelParams, init: &InitialState, opts: &InterferenceOptions) -> Result<Complex64> {
    let (series, _) = windowed(params, init, opts)?;
    coherence_of(&series, params)
}

fn coherence_of(series: &TimeSeries, params: &ModelParams) -> Result<Complex64> {
    let n = series.len() as f64;
    let p1 = series.p1.iter().sum::<f64>() / n;
    let p2 = series.p2.iter().sum::<f64>() / n;
    if !(p1 > 1e-12 && p2 > 1e-12) {
        return Err(Error::UndefinedCoherence { p1, p2 });
    }
    let beat = params.delta2() - params.delta1();
    let cross = series
        .a1
        .iter()
        .zip(&series.a2)
        .zip(&series.tau)
        .map(|((a1, a2), &t)| a1.conj() * a2 * Complex64::from_polar(1.0, -beat * t))
        .sum::<Complex64>()
        / n;
    Ok(cross / (p1 * p2).sqrt())
}

/// Evenly spaced axis values, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis needs finite ends and at least one step, got [{start}, {end}] x {steps}"
            )));
        }
        Ok(Axis { start, end, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.start + k as f64 * h).collect()
    }
}

/// Band-edge cells: a detuning this close to 0 puts a level at the edge.
pub const BAND_EDGE_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCell {
    pub delta1: f64,
    pub delta2: f64,
    pub bound_count: usize,
    pub regime: Regime,
    /// delta1 == delta2 < 0, where one bound mode can go dark
    pub degenerate: bool,
    /// a detuning within the band-edge exclusion of 0
    pub band_edge: bool,
}

/// Bound-state count over a delta1 x delta2 grid.
///
/// Cells are ordered with delta1 varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeMap {
    pub kind: ModelKind,
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
    pub cells: Vec<RegimeCell>,
}

impl RegimeMap {
    pub fn cell(&self, i1: usize, i2: usize) -> &RegimeCell {
        &self.cells[i2 * self.delta1.len() + i1]
    }
}

pub fn regime_map(kind: ModelKind, delta1: &Axis, delta2: &Axis) -> Result<RegimeMap> {
    let d1 = delta1.values();
    let d2 = delta2.values();
    let pairs: Vec<(f64, f64)> = d2.iter().flat_map(|&b| d1.iter().map(move |&a| (a, b))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(a, b)| {
            let p = ModelParams::new(kind, a, b, 1.0)?;
            let info = classify_regime(&p);
            Ok(RegimeCell {
                delta1: a,
                delta2: b,
                bound_count: info.bound_count,
                regime: info.regime,
                degenerate: a == b && a < 0.0,
                band_edge: a.abs() < BAND_EDGE_EXCLUSION || b.abs() < BAND_EDGE_EXCLUSION,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegimeMap {
        kind,
        delta1: d1,
        delta2: d2,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceRow {
    pub theta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub regime: Regime,
    pub q2: f64,
    pub qt: f64,
    /// None when a level carries no post-transient population.
    pub coherence: Option<Complex64>,
    pub mean_pt: f64,
    pub transient_tau: f64,
}

/// Rows ordered by theta, then delta1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSweep {
    pub kind: ModelKind,
    pub thetas: Vec<f64>,
    pub delta1: Vec<f64>,
    pub delta2: f64,
    pub rows: Vec<InterferenceRow>,
}

impl InterferenceSweep {
    /// Rows belonging to the `i`-th theta.
    pub fn rows_for(&self, i: usize) -> &[InterferenceRow] {
        let n = self.delta1.len();
        &self.rows[i * n..(i + 1) * n]
    }
}

pub fn interference_row(
    kind: ModelKind,
    delta1: f64,
    delta2: f64,
    theta: f64,
    opts: &InterferenceOptions,
) -> Result<InterferenceRow> {
    let params = ModelParams::new(kind, delta1, delta2, 1.0)?;
    let init = InitialState::from_theta(theta);
    let spectrum = coefficients(&params, &init)?;
    let w = window_for(&spectrum, opts)?;
    let series = amplitudes_from_spectrum(&spectrum, &w.grid())?;
    let r = report(&series, w);
    let coherence = match coherence_of(&series, &params) {
        Ok(c) => Some(c),
        Err(Error::UndefinedCoherence { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(InterferenceRow {
        theta,
        delta1,
        delta2,
        regime: spectrum.regime,
        q2: r.q2,
        qt: r.qt,
        coherence,
        mean_pt: series.pt.iter().sum::<f64>() / series.len() as f64,
        transient_tau: r.transient_tau,
    })
}

/// Interference metrics along delta1 at fixed delta2 for each initial angle.
pub fn sweep_interference(
    kind: ModelKind,
    delta1: &Axis,
    delta2: f64,
    thetas: &[f64],
    opts: &InterferenceOptions,
) -> Result<InterferenceSweep> {
    let d1 = delta1.values();
    let jobs: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| d1.iter().map(move |&a| (t, a))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(theta, a)| interference_row(kind, a, delta2, theta, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterferenceSweep {
        kind,
        thetas: thetas.to_vec(),
        delta1: d1,
        delta2,
        rows,
    })
}

/// delta1 of the largest q2 in a sweep row set, refined by golden-section
/// search on the bracketing cells.
pub fn q2_argmax(
    kind: ModelKind,
    delta1: &Axis,
    delta2: f64,
    theta: f64,
    opts: &InterferenceOptions,
) -> Result<(f64, f64)> {
    let sweep = sweep_interference(kind, delta1, delta2, &[theta], opts)?;
    let rows = sweep.rows_for(0);
    let (best, _) = rows
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bq), (i, r)| if r.q2 > bq { (i, r.q2) } else { (bi, bq) });
    let lo = rows[best.saturating_sub(1)].delta1;
    let hi = rows[(best + 1).min(rows.len() - 1)].delta1;
    let q = |d: f64| interference_row(kind, d, delta2, theta, opts).map(|r| r.q2);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (q(c)?, q(d)?);
    for _ in 0..40 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = q(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = q(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = q(x)?;
    let rb = rows[best];
    Ok(if fx >= rb.q2 { (x, fx) } else { (rb.delta1, rb.q2) })
}

/// Strongest nonzero angular frequency of a uniformly sampled signal, from
/// the periodogram of the mean-removed, Hann-windowed samples. Returns the
/// frequency and the bin width `2 pi / (n dt)`.
pub fn dominant_frequency(values: &[f64], dt: f64) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 4 || !(dt > 0.0) {
        return Err(Error::InvalidGrid(format!("need at least 4 samples and dt > 0, got {n} and {dt}")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            Complex64::new((v - mean) * w, 0.0)
        })
        .collect();
    rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (peak, _) = buf[1..=n / 2]
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bp), (i, c)| if c.norm_sqr() > bp { (i + 1, c.norm_sqr()) } else { (bi, bp) });
    let bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    Ok((peak as f64 * bin, bin))
}
