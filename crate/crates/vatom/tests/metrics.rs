use std::f64::consts::FRAC_PI_4;

use vatom::dressed::{coefficients, steady_state_amplitudes};
use vatom::metrics::{
    coherence, interference, regime_map, sweep_interference, Axis, InterferenceOptions, BAND_EDGE_EXCLUSION,
};
use vatom::{Complex64, InitialState, ModelKind, ModelParams, Regime};

fn opts() -> InterferenceOptions {
    InterferenceOptions::default()
}

#[test]
fn in_phase_degenerate_state_shows_no_interference() {
    let p = ModelParams::anisotropic(-1.0, -1.0).unwrap();
    let r = interference(&p, &InitialState::from_theta(FRAC_PI_4), &opts()).unwrap();
    assert!(r.q2 < 1e-3 && r.qt < 1e-3, "{r:?}");
}

#[test]
fn bound_part_of_total_population_is_constant_at_degeneracy() {
    let p = ModelParams::anisotropic(-1.0, -1.0).unwrap();
    for theta in [0.0, 0.3, FRAC_PI_4, -FRAC_PI_4, 1.2] {
        let s = coefficients(&p, &InitialState::from_theta(theta)).unwrap();
        let pt: Vec<f64> = (0..=640)
            .map(|k| {
                let (a, b) = steady_state_amplitudes(&s, 100.0 + 0.5 * k as f64);
                a.norm_sqr() + b.norm_sqr()
            })
            .collect();
        let spread = pt.iter().cloned().fold(f64::MIN, f64::max) - pt.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-6, "theta {theta}: {spread:e}");
    }
}

#[test]
fn metrics_ignore_global_phase() {
    let p = ModelParams::anisotropic(-0.5, -0.25).unwrap();
    let init = InitialState::from_theta(0.4);
    let turned = init.scaled(Complex64::from_polar(1.0, 2.1));
    let a = interference(&p, &init, &opts()).unwrap();
    let b = interference(&p, &turned, &opts()).unwrap();
    assert!((a.q2 - b.q2).abs() < 1e-12 && (a.qt - b.qt).abs() < 1e-12);
    let ca = coherence(&p, &init, &opts()).unwrap();
    let cb = coherence(&p, &turned, &opts()).unwrap();
    assert!((ca - cb).norm() < 1e-12);
}

#[test]
fn doubling_the_window_barely_moves_the_metrics() {
    let long = InterferenceOptions { window_periods: 20, ..opts() };
    for (d1, d2) in [(-0.5, -0.25), (-1.5, -1.0), (-0.5, -1.0)] {
        let p = ModelParams::anisotropic(d1, d2).unwrap();
        for theta in [0.0, FRAC_PI_4, -FRAC_PI_4] {
            let init = InitialState::from_theta(theta);
            let a = interference(&p, &init, &opts()).unwrap();
            let b = interference(&p, &init, &long).unwrap();
            assert!((a.q2 - b.q2).abs() <= 0.05 * a.q2, "({d1}, {d2}) {theta}: q2 {} vs {}", a.q2, b.q2);
            assert!((a.qt - b.qt).abs() <= 0.05 * a.qt, "({d1}, {d2}) {theta}: qt {} vs {}", a.qt, b.qt);
        }
    }
}

#[test]
fn coherence_structure() {
    let p = ModelParams::anisotropic(-0.5, -1.0).unwrap();
    assert!(coherence(&p, &InitialState::from_theta(0.0), &opts()).unwrap().re < 0.0);
    let deg = ModelParams::anisotropic(-1.0, -1.0).unwrap();
    let plus = coherence(&deg, &InitialState::from_theta(FRAC_PI_4), &opts()).unwrap();
    let minus = coherence(&deg, &InitialState::from_theta(-FRAC_PI_4), &opts()).unwrap();
    assert!((plus - 1.0).norm() < 1e-9, "{plus}");
    assert!((minus + 1.0).norm() < 1e-9, "{minus}");
}

#[test]
fn sweep_structure() {
    let axis = Axis::new(-2.0, 0.0, 41).unwrap();
    let sweep = sweep_interference(ModelKind::Anisotropic, &axis, -1.0, &[0.0, FRAC_PI_4, -FRAC_PI_4], &opts()).unwrap();
    // theta = 0: coherence mostly negative
    let rows = sweep.rows_for(0);
    let negative = rows.iter().filter(|r| r.coherence.is_some_and(|c| c.re < 0.0)).count();
    assert!(2 * negative > rows.len(), "{negative} of {}", rows.len());
    // theta = pi/4 at degeneracy: no interference
    let at = sweep.rows_for(1).iter().find(|r| (r.delta1 + 1.0).abs() < 1e-12).unwrap();
    assert!(at.q2 < 1e-3 && at.qt < 1e-3);
    // theta = -pi/4: largest mean PT at the degenerate point
    let best = sweep.rows_for(2).iter().max_by(|a, b| a.mean_pt.total_cmp(&b.mean_pt)).unwrap();
    assert!((best.delta1 + 1.0).abs() < 0.1, "max PT at {}", best.delta1);
    // deterministic row order
    let again = sweep_interference(ModelKind::Anisotropic, &axis, -1.0, &[0.0, FRAC_PI_4, -FRAC_PI_4], &opts()).unwrap();
    assert_eq!(sweep, again);
}

#[test]
fn regime_map_follows_quadrants() {
    let axis = Axis::new(-1.0, 1.0, 41).unwrap();
    let map = regime_map(ModelKind::Anisotropic, &axis, &axis).unwrap();
    for c in &map.cells {
        if c.delta1.abs() < BAND_EDGE_EXCLUSION || c.delta2.abs() < BAND_EDGE_EXCLUSION {
            assert!(c.band_edge);
            continue;
        }
        let want = (c.delta1 < 0.0) as usize + (c.delta2 < 0.0) as usize;
        assert_eq!(c.bound_count, want, "({}, {})", c.delta1, c.delta2);
        assert_eq!(c.regime, Regime::from_bound_count(want));
    }
}
