//! Roots of low-degree complex polynomials (Aberth iteration) and positive
//! real roots of real polynomials.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexPolynomial, RealPolynomial};

/// Roots closer than this are reported as clustered.
pub const CLUSTER_DISTANCE: f64 = 1e-8;

/// Acceptance bound for the scaled residual of every root.
pub const RESIDUAL_BOUND: f64 = 1e-10;

const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// max over roots of |p(x)| / sum |c_k| |x|^k
    pub residual_max: f64,
    pub clustered: bool,
}

fn scaled_residual(poly: &ComplexPolynomial, x: Complex64) -> f64 {
    let scale = poly.magnitude_at(x);
    if scale == 0.0 {
        0.0
    } else {
        poly.eval(x).norm() / scale
    }
}

fn root_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.arg()
        .total_cmp(&b.arg())
        .then_with(|| a.norm().total_cmp(&b.norm()))
        .then_with(|| a.re.total_cmp(&b.re))
        .then_with(|| a.im.total_cmp(&b.im))
}

/// Upper bound on root moduli of a monic polynomial (Cauchy).
fn cauchy_radius(monic: &[Complex64]) -> f64 {
    let n = monic.len() - 1;
    1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Lower-radius refinement: the unique positive root of
/// |c_n| x^n = sum_{k<n} |c_k| x^k, found by bisection on [0, cauchy].
fn root_radius(monic: &[Complex64]) -> f64 {
    let n = monic.len() - 1;
    let mags: Vec<f64> = monic.iter().map(|c| c.norm()).collect();
    let f = |x: f64| {
        let mut lower = 0.0;
        for k in (0..n).rev() {
            lower = lower * x + mags[k];
        }
        x.powi(n as i32) - lower
    };
    let (mut lo, mut hi) = (0.0, cauchy_radius(monic));
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn aberth_step(poly: &ComplexPolynomial, z: &mut [Complex64]) -> f64 {
    let n = z.len();
    let mut max_rel = 0.0f64;
    for k in 0..n {
        let (p, dp) = poly.eval_with_derivative(z[k]);
        if p == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ratio = p / dp;
        let mut repulsion = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if j != k {
                let d = z[k] - z[j];
                if d != Complex64::new(0.0, 0.0) {
                    repulsion += d.inv();
                }
            }
        }
        let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
        let step = if denom.norm() > 0.0 && denom.is_finite() {
            ratio / denom
        } else {
            ratio
        };
        if !step.is_finite() {
            continue;
        }
        z[k] -= step;
        let rel = step.norm() / z[k].norm().max(f64::MIN_POSITIVE);
        max_rel = max_rel.max(rel);
    }
    max_rel
}

/// All complex roots of `poly`, sorted by argument then modulus.
///
/// Exact zero low-order coefficients are split off as exact zero roots.
/// `tol` is the relative step size at which iteration stops.
pub fn all_roots(poly: &ComplexPolynomial, tol: f64) -> Result<RootSet> {
    let coeffs = &poly.coefficients;
    if coeffs.len() < 2 {
        return Err(Error::InvalidParameter(
            "polynomial degree must be at least 1".into(),
        ));
    }
    let lead = *coeffs.last().unwrap();
    if lead == Complex64::new(0.0, 0.0) || !lead.is_finite() {
        return Err(Error::InvalidParameter(
            "leading coefficient must be nonzero and finite".into(),
        ));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter(
            "polynomial coefficients must be finite".into(),
        ));
    }

    let zeros = coeffs
        .iter()
        .take_while(|c| **c == Complex64::new(0.0, 0.0))
        .count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let reduced: Vec<Complex64> = coeffs[zeros..].iter().map(|&c| c / lead).collect();
    let n = reduced.len() - 1;

    if n > 0 {
        let reduced_poly = ComplexPolynomial::new(reduced.clone());
        let radius = root_radius(&reduced);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
                Complex64::from_polar(radius, angle)
            })
            .collect();

        let mut converged = false;
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            iterations += 1;
            let step = aberth_step(&reduced_poly, &mut z);
            if step <= tol {
                converged = true;
                break;
            }
        }
        // polishing: a few more simultaneous corrections at full precision
        for _ in 0..3 {
            aberth_step(&reduced_poly, &mut z);
        }
        let residual = z
            .iter()
            .map(|&x| scaled_residual(&reduced_poly, x))
            .fold(0.0, f64::max);
        if !converged && residual > RESIDUAL_BOUND {
            return Err(Error::RootsNotConverged {
                iterations,
                residual,
                best: z,
            });
        }
        roots.extend(z);
    }

    roots.sort_by(root_order);
    let residual_max = roots
        .iter()
        .map(|&x| scaled_residual(poly, x))
        .fold(0.0, f64::max);
    if residual_max > RESIDUAL_BOUND {
        return Err(Error::RootsNotConverged {
            iterations: MAX_ITERATIONS,
            residual: residual_max,
            best: roots,
        });
    }
    let clustered = has_cluster(&roots);
    Ok(RootSet {
        roots,
        residual_max,
        clustered,
    })
}

pub fn has_cluster(roots: &[Complex64]) -> bool {
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < CLUSTER_DISTANCE {
                return true;
            }
        }
    }
    false
}

/// Strictly positive real roots, ascending, deduplicated within `tol`.
pub fn positive_real_roots(poly: &RealPolynomial, tol: f64) -> Vec<f64> {
    // trailing zero leading coefficients would break the complex solver
    let mut coeffs = poly.coefficients.clone();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let trimmed = RealPolynomial::new(coeffs);
    let set = match all_roots(&trimmed.to_complex(), 1e-14) {
        Ok(s) => s.roots,
        Err(Error::RootsNotConverged { best, .. }) => best,
        Err(_) => return Vec::new(),
    };
    let mut out: Vec<f64> = Vec::new();
    for z in set {
        if z.im.abs() > 1e-6 * z.norm().max(1.0) || z.re <= tol {
            continue;
        }
        let mut a = z.re;
        for _ in 0..4 {
            let (p, dp) = trimmed.eval_with_derivative(a);
            if dp == 0.0 || p == 0.0 {
                break;
            }
            let next = a - p / dp;
            if !next.is_finite() || (next - a).abs() > 1e-6 * a.abs().max(1.0) {
                break;
            }
            a = next;
        }
        if a > tol {
            out.push(a);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|b, a| (*b - *a).abs() <= tol);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        characteristic_polynomial, two_level_polynomial, ray, ModelKind, ModelParams,
    };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_unity_in_order() {
        let p = ComplexPolynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let set = all_roots(&p, 1e-12).unwrap();
        let expected = [c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        for (r, e) in set.roots.iter().zip(expected.iter()) {
            assert!((r - e).norm() < 1e-14, "{r} vs {e}");
        }
        assert!(!set.clustered);
    }

    #[test]
    fn degenerate_quartic_contains_closed_form_roots() {
        let p = characteristic_polynomial(&ModelParams::anisotropic(-1.0, -1.0).unwrap());
        let set = all_roots(&p, 1e-12).unwrap();
        for target in [ray(), ray() * (2f64.sqrt() - 1.0)] {
            assert!(set.roots.iter().any(|r| (r - target).norm() < 1e-10));
        }
        assert!(set.residual_max < 1e-10);
    }

    #[test]
    fn two_level_golden_roots() {
        let set = all_roots(&two_level_polynomial(-1.0, ModelKind::Anisotropic), 1e-12).unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!(set.roots.iter().any(|r| (r - ray() * g).norm() < 1e-12));
        assert!(set.roots.iter().any(|r| (r + ray() * (1.0 + g)).norm() < 1e-12));
    }

    #[test]
    fn zero_constant_term_gives_exact_zero_root() {
        let set = all_roots(&two_level_polynomial(0.0, ModelKind::Anisotropic), 1e-12).unwrap();
        assert!(set.roots.contains(&c(0.0, 0.0)));
        assert!(set.roots.iter().any(|r| (r + ray()).norm() < 1e-14));
    }

    #[test]
    fn double_root_is_flagged() {
        // (x - 1)^2 (x + 2)
        let p = ComplexPolynomial::new(vec![c(2.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let set = all_roots(&p, 1e-12).unwrap();
        assert!(set.clustered);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(all_roots(&ComplexPolynomial::new(vec![c(1.0, 0.0)]), 1e-12).is_err());
        assert!(all_roots(&ComplexPolynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0)]), 1e-12).is_err());
    }

    #[test]
    fn positive_real_fixtures() {
        let r = positive_real_roots(&RealPolynomial::new(vec![1.0, -2.0, -2.0, 2.0, 1.0]), 1e-10);
        assert_eq!(r.len(), 2);
        assert!((r[0] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-12);
        let g = positive_real_roots(&RealPolynomial::new(vec![-1.0, 1.0, 1.0]), 1e-10);
        assert_eq!(g.len(), 1);
        assert!((g[0] - 0.618_033_988_749_895).abs() < 1e-14);
        assert!(positive_real_roots(&RealPolynomial::new(vec![1.0, 1.0, 1.0]), 1e-10).is_empty());
        // root at zero excluded
        assert!(positive_real_roots(&RealPolynomial::new(vec![0.0, 1.0, 1.0]), 1e-10).is_empty());
    }
}
