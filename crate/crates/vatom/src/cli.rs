//! Command-line front end. `run` is what the `vatom` binary calls.
//!
//! Every flag can also come from a flat JSON object given with `--config`
//! (keys are the flag names without dashes prefix, e.g. `"tau-max": 50`).
//! Flags given on the command line win over the file.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dressed::{classify_regime, coefficients, rabi_frequency, two_level_spectrum, InitialState};
use crate::error::Error;
use crate::evolve::{amplitudes_from_spectrum, uniform_grid};
use crate::metrics::{regime_map, sweep_interference, Axis, InterferenceOptions};
use crate::model::{ModelKind, ModelParams};
use crate::oracle::{compare, convergence_shift_from, Integrator, ReservoirConfig};
use crate::report::{
    fmt_g, line_plot_svg, regime_map_svg, write_map_csv, write_series_csv, write_spectrum_csv, write_sweep_csv,
    Curve,
};

#[derive(Debug, Parser)]
#[command(name = "vatom", version, about = "Band-edge spontaneous emission of a V-type atom")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dressed-state roots, residues and regime.
    Roots(RunConfig),
    /// Amplitudes and populations on a time grid.
    Evolve(RunConfig),
    /// Analytic populations against the discretized-reservoir simulation.
    OracleCompare(RunConfig),
    /// Bound-state count over a delta1 x delta2 grid.
    Map(RunConfig),
    /// Interference and coherence along delta1 at fixed delta2.
    Sweep(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// All run parameters. Unset values fall back to the config file, then to
/// the per-command defaults.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// JSON file with default values for any of these flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// aniso or iso
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub d1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub d2: Option<f64>,
    /// Coupling constant; detunings and tau are rescaled by it
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,

    /// Initial state (cos theta, sin theta), radians; accepts forms like -pi/4
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2_im: Option<f64>,

    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Number of grid points including tau = 0
    #[arg(long)]
    pub steps: Option<usize>,

    /// Single-level problem at detuning d1 (roots only)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub two_level: Option<bool>,

    #[arg(long)]
    pub n_modes: Option<usize>,
    #[arg(long)]
    pub u_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// etdrk4 or rk4
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub taper: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub frame_shift: Option<f64>,
    /// Rerun with doubled modes and band and halved step, report the shift
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub check_convergence: Option<bool>,

    #[arg(long, allow_hyphen_values = true)]
    pub d1_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub d1_max: Option<f64>,
    #[arg(long)]
    pub d1_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub d2_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub d2_max: Option<f64>,
    #[arg(long)]
    pub d2_steps: Option<usize>,
    /// Comma-separated initial angles for sweep
    #[arg(long, allow_hyphen_values = true)]
    pub thetas: Option<String>,
    #[arg(long)]
    pub window_periods: Option<usize>,
    #[arg(long)]
    pub transient_floor: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($a:ident, $b:ident; $($f:ident),* $(,)?) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f.clone(); } )*
    };
}

impl RunConfig {
    /// Fill unset fields from `other`.
    pub fn or(mut self, other: &RunConfig) -> RunConfig {
        // the two ways of giving the initial state replace each other as a whole
        let explicit = [self.a1_re, self.a1_im, self.a2_re, self.a2_im].iter().any(Option::is_some);
        if self.theta.is_none() && !explicit {
            merge_fields!(self, other; theta, a1_re, a1_im, a2_re, a2_im);
        }
        merge_fields!(self, other;
            model, d1, d2, coupling, tau_max, steps,
            two_level, n_modes, u_max, dt, method, taper, frame_shift, check_convergence,
            d1_min, d1_max, d1_steps, d2_min, d2_max, d2_steps, thetas, window_periods,
            transient_floor, out, format, svg);
        self
    }

    pub fn from_json_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    fn kind(&self) -> Result<ModelKind, CliError> {
        self.model.as_deref().unwrap_or("aniso").parse().map_err(usage)
    }

    fn detunings(&self) -> Result<(f64, f64), CliError> {
        match (self.d1, self.d2) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CliError::Usage("--d1 and --d2 are required".into())),
        }
    }

    fn params(&self, allow_zero_coupling: bool) -> Result<(ModelParams, f64), CliError> {
        let (d1, d2) = self.detunings()?;
        let r = self.coupling.unwrap_or(1.0);
        if r == 0.0 && allow_zero_coupling {
            return Ok((ModelParams::new(self.kind()?, d1, d2, 1.0).map_err(usage)?, 0.0));
        }
        Ok((ModelParams::new(self.kind()?, d1, d2, r).map_err(usage)?, r))
    }

    fn init(&self) -> Result<InitialState, CliError> {
        let explicit = [self.a1_re, self.a1_im, self.a2_re, self.a2_im];
        let any_explicit = explicit.iter().any(Option::is_some);
        match (&self.theta, any_explicit) {
            (Some(_), true) => Err(CliError::Usage("give either --theta or --a1-*/--a2-*, not both".into())),
            (Some(t), false) => Ok(InitialState::from_theta(parse_angle(t)?)),
            (None, true) => {
                let [a, b, c, d] = explicit.map(|v| v.unwrap_or(0.0));
                InitialState::with_tolerance(Complex64::new(a, b), Complex64::new(c, d), 1e-9).map_err(usage)
            }
            (None, false) => Ok(InitialState::from_theta(0.0)),
        }
    }

    fn grid(&self) -> Result<Vec<f64>, CliError> {
        uniform_grid(self.tau_max.unwrap_or(50.0), self.steps.unwrap_or(501)).map_err(usage)
    }

    fn reservoir(&self, coupling_scale: f64) -> Result<ReservoirConfig, CliError> {
        let d = ReservoirConfig::default();
        let method: Integrator = match &self.method {
            Some(m) => m.parse().map_err(usage)?,
            None => d.method,
        };
        let c = ReservoirConfig {
            n_modes: self.n_modes.unwrap_or(d.n_modes),
            u_max: self.u_max.unwrap_or(d.u_max),
            dt: self.dt.unwrap_or(d.dt),
            method,
            taper: self.taper.unwrap_or(d.taper),
            coupling_scale,
            frame_shift: self.frame_shift.unwrap_or(d.frame_shift),
        };
        c.validate().map_err(usage)?;
        Ok(c)
    }

    fn interference_options(&self) -> InterferenceOptions {
        let d = InterferenceOptions::default();
        InterferenceOptions {
            window_periods: self.window_periods.unwrap_or(d.window_periods),
            transient_floor: self.transient_floor.unwrap_or(d.transient_floor),
            ..d
        }
    }
}

/// Radians, optionally as a multiple of pi: `0.3`, `pi/4`, `-pi/4`, `3pi/4`, `0.5*pi`.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || CliError::Usage(format!("cannot parse angle '{s}'"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let k = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(k * std::f64::consts::PI / den)
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration: exit 1.
    Usage(String),
    /// Failure inside the computation: exit 2.
    Compute(Error),
    /// Output could not be written: exit 2.
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Where the main output goes.
struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn write(&self, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
        match &self.out {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                f(&mut w)?;
                w.flush()
            }
            None => f(stdout),
        }
    }
}

fn write_svg(path: &Option<PathBuf>, svg: impl FnOnce() -> String) -> io::Result<()> {
    if let Some(p) = path {
        std::fs::write(p, svg())?;
    }
    Ok(())
}

/// `re+imi` with both parts at 12 significant digits.
fn fmt_c(z: Complex64) -> String {
    let im = fmt_g(z.im);
    if im.starts_with('-') {
        format!("{}{im}i", fmt_g(z.re))
    } else {
        format!("{}+{im}i", fmt_g(z.re))
    }
}

fn c_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn cmd_roots(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let kind = cfg.kind()?;
    let sink = Sink { out: cfg.out.clone() };
    let format = cfg.format.unwrap_or(Format::Text);
    if cfg.two_level.unwrap_or(false) {
        let d1 = cfg.d1.ok_or_else(|| CliError::Usage("--d1 is required".into()))?;
        let r = cfg.coupling.unwrap_or(1.0);
        let spec = two_level_spectrum(kind, d1, r)?;
        let bound: Vec<Complex64> = spec
            .roots
            .iter()
            .copied()
            .filter(|x| x.norm() > 1e-10 && (x.arg() - std::f64::consts::FRAC_PI_4).abs() < 1e-6)
            .collect();
        sink.write(stdout, |w| match format {
            Format::Json => {
                let doc = json!({
                    "model": kind.short_name(),
                    "delta": d1,
                    "coupling": r,
                    "roots": spec.roots.iter().map(|&x| c_json(x)).collect::<Vec<_>>(),
                    "residues": spec.residues.iter().map(|&x| c_json(x)).collect::<Vec<_>>(),
                    "bound_roots": bound.iter().map(|&x| c_json(x)).collect::<Vec<_>>(),
                });
                writeln!(w, "{}", serde_json::to_string_pretty(&doc).expect("json"))
            }
            _ => {
                writeln!(w, "two-level {} delta={} coupling={}", kind.short_name(), fmt_g(d1), fmt_g(r))?;
                for (x, a) in spec.roots.iter().zip(&spec.residues) {
                    let tag = if bound.contains(x) { "bound" } else { "decaying" };
                    writeln!(
                        w,
                        "X = {}  |X| = {}  arg/pi = {}  residue = {}  {tag}",
                        fmt_c(*x),
                        fmt_g(x.norm()),
                        fmt_g(x.arg() / std::f64::consts::PI),
                        fmt_c(*a)
                    )?;
                }
                Ok(())
            }
        })?;
        writeln!(stderr, "bound roots: {}", bound.len())?;
        return Ok(());
    }
    let (params, _) = cfg.params(false)?;
    let init = cfg.init()?;
    let spec = coefficients(&params, &init)?;
    let info = classify_regime(&params);
    let rabi = rabi_frequency(&spec);
    sink.write(stdout, |w| match format {
        Format::Csv => write_spectrum_csv(w, &spec),
        Format::Json => {
            let modes: Vec<_> = spec
                .modes
                .iter()
                .map(|m| {
                    json!({
                        "x": c_json(m.x), "s": c_json(m.s),
                        "alpha1": c_json(m.alpha1), "alpha2": c_json(m.alpha2),
                        "kind": if m.is_bound() { "bound" } else { "decaying" },
                    })
                })
                .collect();
            let doc = json!({
                "model": params.kind().short_name(),
                "delta1": params.delta1(),
                "delta2": params.delta2(),
                "modes": modes,
                "regime": spec.regime.name(),
                "regime_code": spec.regime.code(),
                "bound_count": info.bound_count,
                "bound_roots": info.bound_roots.iter().map(|&x| c_json(x)).collect::<Vec<_>>(),
                "rabi_frequency": rabi,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc).expect("json"))
        }
        Format::Text => {
            writeln!(
                w,
                "{} delta1={} delta2={}",
                params.kind().short_name(),
                fmt_g(params.delta1()),
                fmt_g(params.delta2())
            )?;
            for m in &spec.modes {
                writeln!(
                    w,
                    "X = {}  |X| = {}  arg/pi = {}  X^2 = {}  alpha1 = {}  alpha2 = {}  {}",
                    fmt_c(m.x),
                    fmt_g(m.x.norm()),
                    fmt_g(m.x.arg() / std::f64::consts::PI),
                    fmt_c(m.s),
                    fmt_c(m.alpha1),
                    fmt_c(m.alpha2),
                    if m.is_bound() { "bound" } else { "decaying" }
                )?;
            }
            writeln!(w, "regime: {} ({} bound)", spec.regime, info.bound_count)?;
            if let Some(om) = rabi {
                writeln!(w, "rabi frequency: {}", fmt_g(om))?;
            }
            Ok(())
        }
    })?;
    writeln!(stderr, "regime: {} ({} bound)", spec.regime, info.bound_count)?;
    Ok(())
}

fn cmd_evolve(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (params, _) = cfg.params(false)?;
    let init = cfg.init()?;
    let grid = cfg.grid()?;
    let spec = coefficients(&params, &init)?;
    let series = amplitudes_from_spectrum(&spec, &grid)?;
    let sink = Sink { out: cfg.out.clone() };
    sink.write(stdout, |w| match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => writeln!(w, "{}", serde_json::to_string(&series).expect("json")),
        _ => write_series_csv(w, &series, None),
    })?;
    write_svg(&cfg.svg, || {
        line_plot_svg(
            &format!("{} delta1={} delta2={}", params.kind().short_name(), fmt_g(params.delta1()), fmt_g(params.delta2())),
            "tau",
            &[
                Curve { label: "P1".into(), x: &series.tau, y: &series.p1 },
                Curve { label: "P2".into(), x: &series.tau, y: &series.p2 },
                Curve { label: "PT".into(), x: &series.tau, y: &series.pt },
            ],
        )
    })?;
    let pmax = series.pt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    writeln!(
        stderr,
        "regime: {}  rows: {}  final PT: {}  max PT: {}",
        spec.regime,
        series.len(),
        fmt_g(*series.pt.last().unwrap_or(&f64::NAN)),
        fmt_g(pmax)
    )?;
    Ok(())
}

fn cmd_oracle_compare(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (params, r) = cfg.params(true)?;
    let init = cfg.init()?;
    let grid = cfg.grid()?;
    let rc = cfg.reservoir(if r == 0.0 { 0.0 } else { 1.0 })?;
    let cmp = compare(&params, &init, &grid, &rc)?;
    let shift = if cfg.check_convergence.unwrap_or(false) {
        Some(convergence_shift_from(&cmp.oracle, &params, &init, &rc)?)
    } else {
        None
    };
    let sink = Sink { out: cfg.out.clone() };
    sink.write(stdout, |w| match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let doc = json!({
                "max_deviation": cmp.max_deviation,
                "norm_drift": cmp.oracle.norm_drift,
                "tail_weight": cmp.oracle.tail_weight,
                "initial_tail_loss": cmp.oracle.initial_tail_loss,
                "convergence_shift": shift,
                "config": rc,
                "analytic": cmp.analytic,
                "oracle": cmp.oracle.series,
                "reservoir_pop": cmp.oracle.reservoir_pop,
            });
            writeln!(w, "{}", serde_json::to_string(&doc).expect("json"))
        }
        _ => write_series_csv(w, &cmp.oracle.series, Some(&cmp.oracle.reservoir_pop)),
    })?;
    write_svg(&cfg.svg, || {
        line_plot_svg(
            "analytic vs oracle",
            "tau",
            &[
                Curve { label: "P1 analytic".into(), x: &grid, y: &cmp.analytic.p1 },
                Curve { label: "P2 analytic".into(), x: &grid, y: &cmp.analytic.p2 },
                Curve { label: "P1 oracle".into(), x: &grid, y: &cmp.oracle.series.p1 },
                Curve { label: "P2 oracle".into(), x: &grid, y: &cmp.oracle.series.p2 },
            ],
        )
    })?;
    writeln!(stderr, "max |dP|: {}", fmt_g(cmp.max_deviation))?;
    writeln!(stderr, "norm drift: {}", fmt_g(cmp.oracle.norm_drift))?;
    if let Some(s) = shift {
        writeln!(stderr, "convergence shift: {}", fmt_g(s))?;
    }
    Ok(())
}

fn axis(min: Option<f64>, max: Option<f64>, steps: Option<usize>, d: (f64, f64, usize)) -> Result<Axis, CliError> {
    Axis::new(min.unwrap_or(d.0), max.unwrap_or(d.1), steps.unwrap_or(d.2)).map_err(usage)
}

fn cmd_map(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let kind = cfg.kind()?;
    let a1 = axis(cfg.d1_min, cfg.d1_max, cfg.d1_steps, (-1.0, 1.0, 101))?;
    let a2 = axis(cfg.d2_min, cfg.d2_max, cfg.d2_steps, (-1.0, 1.0, 101))?;
    let map = regime_map(kind, &a1, &a2)?;
    let sink = Sink { out: cfg.out.clone() };
    sink.write(stdout, |w| match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => writeln!(w, "{}", serde_json::to_string(&map).expect("json")),
        _ => write_map_csv(w, &map),
    })?;
    write_svg(&cfg.svg, || regime_map_svg(&map))?;
    let mut counts = [0usize; 3];
    for c in &map.cells {
        counts[c.bound_count.min(2)] += 1;
    }
    writeln!(stderr, "cells: {}  bound 0/1/2: {}/{}/{}", map.cells.len(), counts[0], counts[1], counts[2])?;
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let kind = cfg.kind()?;
    let a1 = axis(cfg.d1_min, cfg.d1_max, cfg.d1_steps, (-2.0, 0.0, 41))?;
    let d2 = cfg.d2.unwrap_or(-1.0);
    let thetas = match &cfg.thetas {
        Some(list) => list.split(',').map(parse_angle).collect::<Result<Vec<_>, _>>()?,
        None => vec![0.0, std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4],
    };
    if thetas.is_empty() {
        return Err(CliError::Usage("--thetas is empty".into()));
    }
    let sweep = sweep_interference(kind, &a1, d2, &thetas, &cfg.interference_options())?;
    let sink = Sink { out: cfg.out.clone() };
    sink.write(stdout, |w| match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => writeln!(w, "{}", serde_json::to_string(&sweep).expect("json")),
        _ => write_sweep_csv(w, &sweep),
    })?;
    let cols: Vec<(Vec<f64>, Vec<f64>)> = (0..thetas.len())
        .map(|i| {
            let rows = sweep.rows_for(i);
            (rows.iter().map(|r| r.q2).collect(), rows.iter().map(|r| r.qt).collect())
        })
        .collect();
    write_svg(&cfg.svg, || {
        let mut curves = Vec::new();
        for (i, (q2, qt)) in cols.iter().enumerate() {
            curves.push(Curve { label: format!("Q2 theta={}", fmt_g(thetas[i])), x: &sweep.delta1, y: q2 });
            curves.push(Curve { label: format!("QT theta={}", fmt_g(thetas[i])), x: &sweep.delta1, y: qt });
        }
        line_plot_svg(&format!("interference, delta2={}", fmt_g(d2)), "delta1", &curves)
    })?;
    writeln!(stderr, "rows: {}", sweep.rows.len())?;
    Ok(())
}

fn init_threads() {
    if let Some(n) = std::env::var("VATOM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // a second call fails harmlessly when the pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

type Handler = fn(&RunConfig, &mut dyn Write, &mut dyn Write) -> Result<(), CliError>;

/// Parse arguments, dispatch, and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    init_threads();
    let (cfg, f): (RunConfig, Handler) = match cli.command {
        Command::Roots(c) => (c, cmd_roots),
        Command::Evolve(c) => (c, cmd_evolve),
        Command::OracleCompare(c) => (c, cmd_oracle_compare),
        Command::Map(c) => (c, cmd_map),
        Command::Sweep(c) => (c, cmd_sweep),
    };
    let result = match &cfg.config {
        Some(path) => RunConfig::from_json_file(path).map(|file| cfg.clone().or(&file)),
        None => Ok(cfg),
    }
    .and_then(|cfg| f(&cfg, stdout, stderr));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
