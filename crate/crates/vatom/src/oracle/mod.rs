//! Independent checks of the analytic solution.
//!
//! [`simulate`] integrates the Schrodinger equation of the atom plus a finite
//! set of sampled reservoir modes. [`langevin_residual`] plugs a time series
//! into the fractional integro-differential equation for the amplitudes and
//! reports how badly it is violated.

mod langevin;
mod quad;
mod reservoir;

pub use langevin::{langevin_residual, langevin_residual_with_coupling, LANGEVIN_MIN_POINTS};
pub use quad::{gauss_legendre, integrate};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::InitialState;
use crate::error::{Error, Result};
use crate::evolve::{amplitudes, check_grid, TimeSeries};
use crate::model::ModelParams;
use reservoir::{Atom, ModeGrid, Observer};

/// Norm drift above which a run is rejected.
pub const DRIFT_LIMIT: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Exponential RK4: free mode rotation exact, coupling to fourth order.
    #[default]
    Etdrk4,
    /// Classical RK4 on the full system. Needs dt * u_max^2 below ~2.8.
    Rk4,
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "etdrk4" | "etd" => Ok(Integrator::Etdrk4),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(Error::InvalidParameter(format!(
                "unknown integrator '{other}' (expected etdrk4 or rk4)"
            ))),
        }
    }
}

/// Reservoir discretization.
///
/// Modes sit at eps_j = u_j^2 with u_j = (j + 1/2) u_max / n_modes. The
/// spacing sets a recurrence time ~ pi / (u_max du) beyond which the finite
/// reservoir re-emits; keep it above the longest tau of interest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReservoirConfig {
    pub n_modes: usize,
    pub u_max: f64,
    pub dt: f64,
    pub method: Integrator,
    /// Fraction of [0, u_max] over which the coupling rolls off to zero.
    pub taper: f64,
    /// Multiplies every g_j^2. 0 decouples the atom.
    pub coupling_scale: f64,
    /// Extra rotating-frame frequency; populations must not depend on it.
    pub frame_shift: f64,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        ReservoirConfig {
            n_modes: 16_000,
            u_max: 20.0,
            dt: 1.25e-3,
            method: Integrator::Etdrk4,
            taper: 0.25,
            coupling_scale: 1.0,
            frame_shift: 0.0,
        }
    }
}

impl ReservoirConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 100 {
            return Err(Error::InvalidParameter(format!(
                "n_modes must be at least 100, got {}",
                self.n_modes
            )));
        }
        if !(self.u_max > 0.0 && self.u_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("u_max must be positive, got {}", self.u_max)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(0.0..1.0).contains(&self.taper) {
            return Err(Error::InvalidParameter(format!("taper must lie in [0, 1), got {}", self.taper)));
        }
        if !(self.coupling_scale >= 0.0 && self.coupling_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coupling_scale must be finite and nonnegative, got {}",
                self.coupling_scale
            )));
        }
        if !self.frame_shift.is_finite() {
            return Err(Error::InvalidParameter("frame_shift must be finite".into()));
        }
        Ok(())
    }

    /// Twice the modes over twice the band at half the step.
    pub fn doubled(&self) -> Self {
        ReservoirConfig {
            n_modes: 2 * self.n_modes,
            u_max: 2.0 * self.u_max,
            dt: 0.5 * self.dt,
            ..*self
        }
    }

    /// Time after which the discrete reservoir starts to re-emit.
    pub fn recurrence_time(&self) -> f64 {
        let du = self.u_max / self.n_modes as f64;
        std::f64::consts::PI / (self.u_max * du)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub series: TimeSeries,
    /// max over all steps of |N(tau) - N(0+)|, N the conserved norm.
    pub norm_drift: f64,
    /// Population outside the atom at each grid point, including the part
    /// carried by the modes above the cutoff.
    pub reservoir_pop: Vec<f64>,
    /// Weight kappa of the unresolved high-frequency tail.
    pub tail_weight: f64,
    /// Population handed to the unresolved tail at tau = 0+.
    pub initial_tail_loss: f64,
}

struct Recorder<'a> {
    atom: Atom,
    grid_steps: &'a [usize],
    next: usize,
    n0: f64,
    drift: f64,
    failed_at: Option<usize>,
    c: Vec<[Complex64; 2]>,
    reservoir: Vec<f64>,
}

impl Observer for Recorder<'_> {
    fn observe(&mut self, step: usize, d: [Complex64; 2], reservoir: f64) -> bool {
        let norm = self.atom.norm(d) + reservoir;
        let dev = (norm - self.n0).abs();
        if !(dev <= DRIFT_LIMIT) {
            self.drift = if dev.is_nan() { f64::INFINITY } else { dev };
            self.failed_at = Some(step);
            return false;
        }
        self.drift = self.drift.max(dev);
        while self.next < self.grid_steps.len() && self.grid_steps[self.next] == step {
            let (c, s) = self.atom.unpack(d);
            self.c.push(c);
            self.reservoir.push(reservoir + self.atom.kappa * s.norm_sqr());
            self.next += 1;
        }
        true
    }
}

fn grid_steps(tau_grid: &[f64], dt: f64) -> Result<Vec<usize>> {
    check_grid(tau_grid)?;
    tau_grid
        .iter()
        .map(|&tau| {
            let k = (tau / dt).round();
            if (k * dt - tau).abs() > 1e-9 * tau.max(1.0) {
                Err(Error::InvalidGrid(format!(
                    "tau = {tau} is not a multiple of dt = {dt}"
                )))
            } else {
                Ok(k as usize)
            }
        })
        .collect()
}

/// Integrate atom plus discretized reservoir and sample A_n on `tau_grid`.
///
/// Every grid point must be an integer multiple of `config.dt`. The tau = 0
/// row is the initial state itself.
pub fn simulate(
    params: &ModelParams,
    init: &InitialState,
    tau_grid: &[f64],
    config: &ReservoirConfig,
) -> Result<OracleResult> {
    config.validate()?;
    let steps = grid_steps(tau_grid, config.dt)?;
    let grid = ModeGrid::new(params.kind(), config);
    let atom = Atom {
        delta: params.deltas(),
        c: grid.c,
        kappa: grid.kappa,
        shift: config.frame_shift,
    };
    let d0 = [init.a1, init.a2];
    let total_steps = *steps.last().unwrap_or(&0);
    let mut rec = Recorder {
        atom,
        grid_steps: &steps,
        next: 0,
        n0: atom.norm(d0),
        drift: 0.0,
        failed_at: None,
        c: Vec::with_capacity(steps.len()),
        reservoir: Vec::with_capacity(steps.len()),
    };
    // tau = 0 rows report the state before the tail takes its share
    while rec.next < steps.len() && steps[rec.next] == 0 {
        rec.c.push(d0);
        rec.reservoir.push(0.0);
        rec.next += 1;
    }
    reservoir::run(atom, &grid, config, d0, total_steps, &mut rec);
    if let Some(step) = rec.failed_at {
        return Err(Error::OracleDiverged {
            drift: rec.drift,
            tau: step as f64 * config.dt,
            limit: DRIFT_LIMIT,
            n_modes: config.n_modes,
            u_max: config.u_max,
            dt: config.dt,
        });
    }
    let deltas = params.deltas();
    let mut a1 = Vec::with_capacity(tau_grid.len());
    let mut a2 = Vec::with_capacity(tau_grid.len());
    for (&tau, c) in tau_grid.iter().zip(&rec.c) {
        let frame = Complex64::from_polar(1.0, config.frame_shift * tau);
        a1.push(c[0] * frame * Complex64::from_polar(1.0, deltas[0] * tau));
        a2.push(c[1] * frame * Complex64::from_polar(1.0, deltas[1] * tau));
    }
    Ok(OracleResult {
        series: TimeSeries::from_amplitudes(tau_grid.to_vec(), a1, a2),
        norm_drift: rec.drift,
        reservoir_pop: rec.reservoir,
        tail_weight: grid.kappa,
        initial_tail_loss: grid.kappa * (init.a1 + init.a2).norm_sqr() / (1.0 + 2.0 * grid.kappa),
    })
}

/// max over the grid and both levels of |P_n(a) - P_n(b)|.
pub fn max_population_difference(a: &TimeSeries, b: &TimeSeries) -> f64 {
    let d1 = a.p1.iter().zip(&b.p1).map(|(x, y)| (x - y).abs());
    let d2 = a.p2.iter().zip(&b.p2).map(|(x, y)| (x - y).abs());
    d1.chain(d2).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub analytic: TimeSeries,
    pub oracle: OracleResult,
    /// max |P_n^analytic - P_n^oracle|
    pub max_deviation: f64,
}

/// Run both the analytic solution and the oracle on the same grid.
pub fn compare(
    params: &ModelParams,
    init: &InitialState,
    tau_grid: &[f64],
    config: &ReservoirConfig,
) -> Result<Comparison> {
    let oracle = simulate(params, init, tau_grid, config)?;
    let analytic = if config.coupling_scale == 0.0 {
        decoupled(params, init, tau_grid)
    } else {
        amplitudes(params, init, tau_grid)?
    };
    let max_deviation = max_population_difference(&analytic, &oracle.series);
    Ok(Comparison {
        analytic,
        oracle,
        max_deviation,
    })
}

/// Free evolution A_n = a_n e^{-i tau Delta_n} e^{i tau Delta_n} = a_n.
fn decoupled(_params: &ModelParams, init: &InitialState, tau_grid: &[f64]) -> TimeSeries {
    let n = tau_grid.len();
    TimeSeries::from_amplitudes(tau_grid.to_vec(), vec![init.a1; n], vec![init.a2; n])
}

/// Shift of the oracle populations when the discretization is doubled.
pub fn convergence_shift(
    params: &ModelParams,
    init: &InitialState,
    tau_grid: &[f64],
    config: &ReservoirConfig,
) -> Result<f64> {
    let base = simulate(params, init, tau_grid, config)?;
    convergence_shift_from(&base, params, init, config)
}

/// As [`convergence_shift`] with the base run already done.
pub fn convergence_shift_from(
    base: &OracleResult,
    params: &ModelParams,
    init: &InitialState,
    config: &ReservoirConfig,
) -> Result<f64> {
    let fine = simulate(params, init, &base.series.tau, &config.doubled())?;
    Ok(max_population_difference(&base.series, &fine.series))
}
