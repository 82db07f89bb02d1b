use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;
use vatom::dressed::{coefficients, classify_regime, rabi_frequency, DressedSpectrum};
use vatom::evolve::{amplitudes, uniform_grid};
use vatom::model::{
    bound_ray_polynomial, characteristic_polynomial, ray, ray_phase, spectral_density,
};
use vatom::oracle::{gauss_legendre, integrate};
use vatom::polyroot::{all_roots, positive_real_roots};
use vatom::{Complex64, InitialState, ModelKind, ModelParams};

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Anisotropic), Just(ModelKind::Isotropic)]
}

fn detuning() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn state() -> impl Strategy<Value = InitialState> {
    (0.0..PI / 2.0, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(t, p1, p2)| {
        InitialState::unnormalized(Complex64::from_polar(t.cos(), p1), Complex64::from_polar(t.sin(), p2))
    })
}

fn spectrum(kind: ModelKind, d1: f64, d2: f64, init: &InitialState) -> Option<DressedSpectrum> {
    let p = ModelParams::new(kind, d1, d2, 1.0).unwrap();
    // clustered root sets are refused by design
    coefficients(&p, init).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn residue_sum_rules(kind in kind(), d1 in detuning(), d2 in detuning(), init in state()) {
        let Some(s) = spectrum(kind, d1, d2, &init) else { return Ok(()) };
        for n in 0..2 {
            let sum: Complex64 = s.modes.iter().map(|m| m.alpha(n)).sum();
            let first: Complex64 = s.modes.iter().map(|m| m.alpha(n) * m.x).sum();
            prop_assert!(sum.norm() < 1e-10, "sum {sum}");
            prop_assert!((first - init.component(n)).norm() < 1e-10, "first moment {first}");
        }
    }

    #[test]
    fn global_phase_only_rotates_residues(
        kind in kind(), d1 in detuning(), d2 in detuning(), init in state(), phi in 0.0..2.0 * PI
    ) {
        let Some(s) = spectrum(kind, d1, d2, &init) else { return Ok(()) };
        let u = Complex64::from_polar(1.0, phi);
        let t = spectrum(kind, d1, d2, &init.scaled(u)).unwrap();
        prop_assert_eq!(s.regime, t.regime);
        for (a, b) in s.modes.iter().zip(&t.modes) {
            prop_assert!((a.alpha1 * u - b.alpha1).norm() < 1e-12 * (1.0 + a.alpha1.norm()));
            prop_assert!((a.alpha2 * u - b.alpha2).norm() < 1e-12 * (1.0 + a.alpha2.norm()));
        }
        match (rabi_frequency(&s), rabi_frequency(&t)) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
            (None, None) => {}
            other => prop_assert!(false, "rabi presence changed: {other:?}"),
        }
    }

    #[test]
    fn swapping_levels_swaps_residue_families(kind in kind(), d1 in detuning(), d2 in detuning(), init in state()) {
        let Some(s) = spectrum(kind, d1, d2, &init) else { return Ok(()) };
        let swapped = InitialState::unnormalized(init.a2, init.a1);
        let Some(t) = spectrum(kind, d2, d1, &swapped) else { return Ok(()) };
        for m in &s.modes {
            let partner = t.modes.iter().min_by(|a, b| (a.x - m.x).norm().total_cmp(&(b.x - m.x).norm())).unwrap();
            prop_assert!((partner.x - m.x).norm() < 1e-9);
            prop_assert!((partner.alpha2 - m.alpha1).norm() < 1e-8 * (1.0 + m.alpha1.norm()));
            prop_assert!((partner.alpha1 - m.alpha2).norm() < 1e-8 * (1.0 + m.alpha2.norm()));
        }
    }

    #[test]
    fn ray_polynomial_is_the_characteristic_polynomial_on_the_ray(
        kind in kind(), d1 in detuning(), d2 in detuning(), a in 0.0..4.0f64
    ) {
        let p = ModelParams::new(kind, d1, d2, 1.0).unwrap();
        let lhs = characteristic_polynomial(&p).eval(ray() * a);
        let rhs = ray_phase(kind, false) * bound_ray_polynomial(&p).eval(a);
        let scale = characteristic_polynomial(&p).magnitude_at(ray() * a).max(1e-300);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn roots_rebuild_the_polynomial(kind in kind(), d1 in detuning(), d2 in detuning()) {
        let p = ModelParams::new(kind, d1, d2, 1.0).unwrap();
        let poly = characteristic_polynomial(&p);
        let set = all_roots(&poly, 1e-12).unwrap();
        prop_assert_eq!(set.roots.len(), poly.degree());
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        for &r in &set.roots {
            let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
            for (k, &c) in prod.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            prod = next;
        }
        let scale: f64 = poly.coefficients.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (a, b) in prod.iter().zip(&poly.coefficients) {
            prop_assert!((a - b).norm() < 1e-9 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn ray_roots_are_the_bound_roots(kind in kind(), d1 in detuning(), d2 in detuning()) {
        let p = ModelParams::new(kind, d1, d2, 1.0).unwrap();
        let positive = positive_real_roots(&bound_ray_polynomial(&p), 1e-10);
        let set = all_roots(&characteristic_polynomial(&p), 1e-12).unwrap();
        let on_ray: Vec<Complex64> = set
            .roots
            .iter()
            .copied()
            .filter(|x| x.norm() > 1e-10 && (x.arg() - FRAC_PI_4).abs() < 1e-6)
            .collect();
        prop_assert_eq!(positive.len(), on_ray.len());
        for a in positive {
            prop_assert!(on_ray.iter().any(|x| (x.norm() - a).abs() < 1e-8));
        }
    }

    #[test]
    fn bound_count_follows_quadrant_rule(d1 in detuning(), d2 in detuning()) {
        prop_assume!(d1.abs() > 1e-3 && d2.abs() > 1e-3);
        let p = ModelParams::anisotropic(d1, d2).unwrap();
        let want = match (d1 < 0.0, d2 < 0.0) {
            (false, false) => 0,
            (true, true) => 2,
            _ => 1,
        };
        prop_assert_eq!(classify_regime(&p).bound_count, want);
    }

    #[test]
    fn total_population_never_exceeds_one(kind in kind(), d1 in detuning(), d2 in detuning(), theta in -PI..PI) {
        let p = ModelParams::new(kind, d1, d2, 1.0).unwrap();
        let Ok(ts) = amplitudes(&p, &InitialState::from_theta(theta), &uniform_grid(60.0, 241).unwrap()) else {
            return Ok(());
        };
        prop_assert!((ts.pt[0] - 1.0).abs() < 1e-12);
        for &pt in &ts.pt {
            prop_assert!(pt <= 1.0 + 1e-9, "pt {pt}");
        }
    }
}

/// int_0^inf J(eps) e^{-i eps t} d eps with a smooth cutoff at eps = 1e4,
/// by Gauss-Legendre panels in u = sqrt(eps).
fn kernel(kind: ModelKind, t: f64) -> Complex64 {
    let p = ModelParams::new(kind, 1.0, 1.0, 1.0).unwrap();
    let u_max = 100.0f64;
    let u_taper = 50.0;
    let rule = gauss_legendre(16);
    let panels = 10_000;
    let h = u_max / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        let f = |u: f64, part: usize| {
            let eps = u * u;
            let w = if u < u_taper {
                1.0
            } else {
                (0.5 * PI * (u - u_taper) / (u_max - u_taper)).cos().powi(2)
            };
            let z = Complex64::from_polar(spectral_density(eps, &p) * 2.0 * u * w, -eps * t);
            if part == 0 {
                z.re
            } else {
                z.im
            }
        };
        acc += Complex64::new(integrate(|u| f(u, 0), a, b, &rule), integrate(|u| f(u, 1), a, b, &rule));
    }
    acc
}

#[test]
fn spectral_density_reproduces_the_memory_kernel() {
    for t in [0.5, 1.0, 2.0, 3.5, 5.0] {
        let aniso = kernel(ModelKind::Anisotropic, t);
        let want = 1.0 / (2.0 * PI.sqrt() * t.powf(1.5));
        assert!((aniso.norm() / want - 1.0).abs() < 0.01, "t = {t}: {} vs {want}", aniso.norm());
        assert!((aniso.arg() + 0.75 * PI).abs() < 0.01, "phase {}", aniso.arg());

        let iso = kernel(ModelKind::Isotropic, t);
        let want = 1.0 / (PI * t).sqrt();
        assert!((iso.norm() / want - 1.0).abs() < 0.01, "t = {t}: {} vs {want}", iso.norm());
        assert!((iso.arg() + FRAC_PI_4).abs() < 0.01, "phase {}", iso.arg());
    }
}
