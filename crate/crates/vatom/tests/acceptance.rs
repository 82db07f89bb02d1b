//! Acceptance suite. Prints one PASS/FAIL line per criterion, then checks
//! that the failing set is exactly the known one.

use std::f64::consts::{FRAC_PI_4, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use vatom::dressed::{coefficients, rabi_frequency, two_level_spectrum};
use vatom::evolve::{amplitudes, degenerate_reduction_check, two_level_amplitudes, uniform_grid};
use vatom::metrics::{
    coherence, dominant_frequency, interference, q2_argmax, regime_map, Axis, InterferenceOptions, BAND_EDGE_EXCLUSION,
};
use vatom::model::ray;
use vatom::oracle::{compare, convergence_shift_from, langevin_residual, simulate, ReservoirConfig};
use vatom::specfun::{dressed_term, erfcx, frac_exp};
use vatom::{Complex64, InitialState, ModelKind, ModelParams};

/// Criteria expected to fail; see the notes in the README.
const KNOWN_RED: &[usize] = &[9];

const SETS: [(f64, f64); 3] = [(0.5, 0.25), (0.5, -0.5), (-0.5, -0.25)];
const THETAS: [f64; 3] = [0.0, FRAC_PI_4, -FRAC_PI_4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// The lines go straight to the process stderr so the test harness does not
// swallow them.
fn report(n: usize, o: &Outcome, took: Duration, budget: Option<Duration>) -> bool {
    let in_time = budget.is_none_or(|b| took <= b);
    let pass = o.pass && in_time;
    let budget = budget.map_or(String::new(), |b| format!(" / {:.0} s", b.as_secs_f64()));
    let _ = writeln!(
        std::io::stderr(),
        "{} criterion {n}: {} [{:.2} s{budget}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    pass
}

fn closed_form_roots() -> Outcome {
    let p = ModelParams::anisotropic(-1.0, -1.0).unwrap();
    let s = coefficients(&p, &InitialState::from_theta(0.0)).unwrap();
    let mut bound: Vec<Complex64> = s.bound_modes().map(|m| m.x).collect();
    bound.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let want = [ray() * (2f64.sqrt() - 1.0), ray()];
    let three = if bound.len() == 2 { (bound[0] - want[0]).norm().max((bound[1] - want[1]).norm()) } else { f64::INFINITY };
    let tl = two_level_spectrum(ModelKind::Anisotropic, -1.0, 1.0).unwrap();
    let golden = ray() * (0.5 * (5f64.sqrt() - 1.0));
    let two = tl.roots.iter().map(|x| (x - golden).norm()).fold(f64::INFINITY, f64::min);
    outcome(three < 1e-9 && two < 1e-9, format!("degenerate bound roots err {three:.1e}, two-level err {two:.1e}"))
}

fn regime_quadrants() -> Outcome {
    let axis = Axis::new(-1.0, 1.0, 101).unwrap();
    let map = regime_map(ModelKind::Anisotropic, &axis, &axis).unwrap();
    let (mut checked, mut wrong) = (0, 0);
    for cell in &map.cells {
        if cell.delta1.abs() < BAND_EDGE_EXCLUSION || cell.delta2.abs() < BAND_EDGE_EXCLUSION {
            continue;
        }
        checked += 1;
        let want = (cell.delta1 < 0.0) as usize + (cell.delta2 < 0.0) as usize;
        wrong += (cell.bound_count != want) as usize;
    }
    outcome(wrong == 0 && checked == 100 * 100, format!("{wrong} of {checked} off-edge cells violate the quadrant rule"))
}

struct OracleRuns {
    worst_dev: f64,
    worst_shift: f64,
    worst_drift: f64,
}

fn oracle_runs() -> OracleRuns {
    let config = ReservoirConfig::default();
    let grid = uniform_grid(50.0, 501).unwrap();
    let mut runs = OracleRuns { worst_dev: 0.0, worst_shift: 0.0, worst_drift: 0.0 };
    for (d1, d2) in SETS {
        let p = ModelParams::anisotropic(d1, d2).unwrap();
        for theta in THETAS {
            let init = InitialState::from_theta(theta);
            match compare(&p, &init, &grid, &config).and_then(|cmp| {
                let shift = convergence_shift_from(&cmp.oracle, &p, &init, &config)?;
                Ok((cmp, shift))
            }) {
                Ok((cmp, shift)) => {
                    runs.worst_dev = runs.worst_dev.max(cmp.max_deviation);
                    runs.worst_drift = runs.worst_drift.max(cmp.oracle.norm_drift);
                    runs.worst_shift = runs.worst_shift.max(shift);
                }
                Err(_) => {
                    runs.worst_dev = f64::INFINITY;
                    runs.worst_drift = f64::INFINITY;
                }
            }
        }
    }
    runs
}

fn oracle_equivalence(runs: &OracleRuns) -> Outcome {
    outcome(
        runs.worst_dev < 1e-3 && runs.worst_shift < 1e-4,
        format!("max |dP| {:.2e}, doubling shift {:.2e} over 9 runs", runs.worst_dev, runs.worst_shift),
    )
}

fn sum_rules() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut samples = 0;
    for kind in [ModelKind::Anisotropic, ModelKind::Isotropic] {
        while samples < 1000 {
            let p = ModelParams::new(kind, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 1.0).unwrap();
            let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if norm < 1e-3 {
                continue;
            }
            let init = InitialState::new(a / norm, b / norm).unwrap();
            let s = coefficients(&p, &init).unwrap();
            for n in 0..2 {
                let sum: Complex64 = s.modes.iter().map(|m| m.alpha(n)).sum();
                let first: Complex64 = s.modes.iter().map(|m| m.alpha(n) * m.x).sum();
                worst = worst.max(sum.norm()).max((first - init.component(n)).norm());
            }
            samples += 1;
        }
        samples = 0;
    }
    outcome(worst < 1e-10, format!("worst sum-rule error {worst:.1e} over 1000 samples per model"))
}

fn degenerate_reduction() -> Outcome {
    let grid = uniform_grid(40.0, 401).unwrap();
    let worst = [-1.0, 0.0, 0.5]
        .iter()
        .map(|&d| degenerate_reduction_check(d, &grid).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    outcome(worst < 1e-9, format!("worst reduction deviation {worst:.1e}"))
}

fn two_level_limit() -> Outcome {
    let grid = uniform_grid(20.0, 401).unwrap();
    let init = InitialState::from_theta(0.0);
    let devs: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&d2| {
            let p = ModelParams::anisotropic(-1.0, d2).unwrap();
            let three = amplitudes(&p, &init, &grid).unwrap();
            let two = two_level_amplitudes(ModelKind::Anisotropic, -1.0, 1.0, &grid).unwrap();
            three.a1.iter().zip(&two).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        })
        .collect();
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    outcome(monotone, format!("deviations {:.2e}, {:.2e}, {:.2e}", devs[0], devs[1], devs[2]))
}

fn rabi_beat() -> Outcome {
    let p = ModelParams::anisotropic(-1.0, -1.0).unwrap();
    let init = InitialState::from_theta(0.0);
    // recurrence time 314, past the end of the window
    let config = ReservoirConfig { n_modes: 6400, u_max: 8.0, dt: 2e-3, ..ReservoirConfig::default() };
    let grid = uniform_grid(300.0, 3001).unwrap();
    let Ok(run) = simulate(&p, &init, &grid, &config) else {
        return outcome(false, "oracle run failed".into());
    };
    let (w, bin) = dominant_frequency(&run.series.p2[500..], 0.1).unwrap();
    let rabi = rabi_frequency(&coefficients(&p, &init).unwrap()).unwrap_or(f64::NAN);
    let expected = 2.0 * (2f64.sqrt() - 1.0);
    outcome(
        (w - expected).abs() <= bin && (rabi - expected).abs() < 1e-12,
        format!("FFT peak {w:.5} vs {expected:.6} (bin {bin:.5})"),
    )
}

fn special_functions() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/erfcx_reference.txt");
    let rows: Vec<Vec<f64>> = std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    let table = rows
        .iter()
        .map(|v| {
            let want = c(v[2], v[3]);
            (erfcx(c(v[0], v[1])) - want).norm() / want.norm()
        })
        .fold(0.0, f64::max);

    // per term the series carries an extra 1 / sqrt(pi t)
    let mut series = 0.0f64;
    for x in [c(0.3, 0.1), c(0.5, 0.5), ray() * 0.414, c(-0.7, 0.2), c(1.2, -0.4), Complex64::from_polar(1.6, 1.25 * PI)] {
        for t in [1e-4, 1e-3, 0.01, 0.1, 0.5] {
            let raw = frac_exp(-0.5, x * x, t, 80).unwrap().value + x * (x * x * t).exp();
            let stable = dressed_term(x, t).unwrap() + 1.0 / (PI * t).sqrt();
            series = series.max((raw - stable).norm());
        }
    }

    // E_t(1/2, X) = e^{X t} erf(sqrt(X t)) / sqrt(X)
    let mut half = 0.0f64;
    for x in [c(1.0, 0.0), c(0.3, 0.2), c(-0.4, 0.9), c(-1.5, -0.3), c(2.0, 1.0)] {
        for t in [0.05, 0.3, 1.0, 2.5] {
            let w = (x * t).sqrt();
            let closed = ((x * t).exp() - erfcx(w)) / w * t.sqrt();
            let got = frac_exp(0.5, x, t, 120).unwrap().value;
            half = half.max((got - closed).norm() / closed.norm().max(1.0));
        }
    }
    outcome(
        rows.len() == 64 && table < 1e-12 && series < 1e-10 && half < 1e-10,
        format!("erfcx table {table:.1e} ({} rows), series {series:.1e}, half-order identity {half:.1e}", rows.len()),
    )
}

fn metrics_structure() -> Outcome {
    let opts = InterferenceOptions::default();
    let deg = ModelParams::anisotropic(-1.0, -1.0).unwrap();
    let inphase = interference(&deg, &InitialState::from_theta(FRAC_PI_4), &opts).unwrap();
    let zero = interference(&deg, &InitialState::from_theta(0.0), &opts).unwrap();
    let axis = Axis::new(-2.0, 0.0, 41).unwrap();
    let (arg, _) = q2_argmax(ModelKind::Anisotropic, &axis, -1.0, 0.0, &opts).unwrap();
    let re = coherence(&ModelParams::anisotropic(-0.5, -1.0).unwrap(), &InitialState::from_theta(0.0), &opts).unwrap().re;
    let plus = coherence(&deg, &InitialState::from_theta(FRAC_PI_4), &opts).unwrap();
    let minus = coherence(&deg, &InitialState::from_theta(-FRAC_PI_4), &opts).unwrap();
    let checks = [
        inphase.q2 < 1e-3 && inphase.qt < 1e-3,
        (arg + 1.0).abs() <= 0.1,
        zero.qt < 1e-3,
        re < 0.0,
        (plus - 1.0).norm() < 1e-9 && (minus + 1.0).norm() < 1e-9,
    ];
    outcome(
        checks.iter().all(|&b| b),
        format!(
            "pi/4 Q2 {:.1e} QT {:.1e}; Q2 argmax at delta1 = {arg:.4}; theta 0 QT {:.1e}; Re coherence {re:.3}; \
             degenerate coherence {:.3} / {:.3}",
            inphase.q2, inphase.qt, zero.qt, plus.re, minus.re
        ),
    )
}

fn langevin() -> Outcome {
    let mut worst = 0.0f64;
    let mut refines = true;
    for (d1, d2) in SETS {
        let p = ModelParams::anisotropic(d1, d2).unwrap();
        for theta in THETAS {
            let init = InitialState::from_theta(theta);
            let coarse = amplitudes(&p, &init, &uniform_grid(20.0, 4096).unwrap())
                .and_then(|ts| langevin_residual(&ts, &p))
                .unwrap_or(f64::INFINITY);
            let fine = amplitudes(&p, &init, &uniform_grid(20.0, 8191).unwrap())
                .and_then(|ts| langevin_residual(&ts, &p))
                .unwrap_or(f64::INFINITY);
            worst = worst.max(coarse);
            refines &= fine < coarse;
        }
    }
    outcome(worst < 1e-2 && refines, format!("worst residual {worst:.2e} at 4096 points, decreasing under refinement: {refines}"))
}

fn conservation(runs: &OracleRuns) -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let grid = uniform_grid(100.0, 1001).unwrap();
    let mut max_pt = 0.0f64;
    for kind in [ModelKind::Anisotropic, ModelKind::Isotropic] {
        for _ in 0..100 {
            let p = ModelParams::new(kind, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 1.0).unwrap();
            let init = InitialState::from_theta(rng.gen_range(-PI..PI));
            let ts = amplitudes(&p, &init, &grid).unwrap();
            max_pt = ts.pt.iter().copied().fold(max_pt, f64::max);
        }
    }
    let late: Vec<f64> = (0..=200).map(|k| 200.0 + k as f64).collect();
    let mut decay = 0.0f64;
    for (d1, d2) in [(0.5, 0.25), (1.0, 2.0), (0.1, 0.3)] {
        let p = ModelParams::anisotropic(d1, d2).unwrap();
        for theta in THETAS {
            let ts = amplitudes(&p, &InitialState::from_theta(theta), &late).unwrap();
            decay = ts.pt.iter().copied().fold(decay, f64::max);
        }
    }
    outcome(
        max_pt <= 1.0 + 1e-9 && runs.worst_drift < 1e-6 && decay < 0.05,
        format!("max PT {max_pt:.12}; oracle norm drift {:.1e}; no-bound PT after tau 200 {decay:.3}", runs.worst_drift),
    )
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut failed = Vec::new();
    let mut check = |n: usize, budget: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        if !report(n, &o, start.elapsed(), budget) {
            failed.push(n);
        }
    };
    check(1, Some(secs(1)), &mut closed_form_roots);
    check(2, Some(secs(10)), &mut regime_quadrants);
    // the oracle runs are shared with criterion 11
    let mut runs = None;
    check(3, Some(secs(300)), &mut || oracle_equivalence(runs.insert(oracle_runs())));
    let runs = runs.unwrap();
    check(4, Some(secs(10)), &mut sum_rules);
    check(5, Some(secs(1)), &mut degenerate_reduction);
    check(6, Some(secs(10)), &mut two_level_limit);
    check(7, Some(secs(60)), &mut rabi_beat);
    check(8, None, &mut special_functions);
    check(9, Some(secs(120)), &mut metrics_structure);
    check(10, Some(secs(60)), &mut langevin);
    check(11, None, &mut || conservation(&runs));
    assert_eq!(failed, KNOWN_RED, "failing criteria differ from the known set");
}
