//! Composite Simpson integration.

use crate::error::{Error, Result};

/// Composite Simpson rule on `[a, b]` with `panels` subintervals (rounded up
/// to an even count).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let y = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

pub const DEFAULT_REL_TOL: f64 = 1e-8;
const START_PANELS: usize = 8;
const MAX_DOUBLINGS: u32 = 20;

/// Doubles the panel count until two successive estimates agree to
/// `rel_tol`, and returns the finer one.
pub fn simpson_refined<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut panels = START_PANELS;
    let mut prev = simpson(&f, a, b, panels);
    for depth in 1..=MAX_DOUBLINGS {
        panels *= 2;
        let next = simpson(&f, a, b, panels);
        let err = (next - prev).abs();
        if !next.is_finite() {
            return Err(Error::Quadrature {
                lo: a,
                hi: b,
                estimate: next,
                error_estimate: err,
                depth,
            });
        }
        if err <= rel_tol * next.abs() || err <= f64::MIN_POSITIVE {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        lo: a,
        hi: b,
        estimate: prev,
        error_estimate: f64::NAN,
        depth: MAX_DOUBLINGS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn refined_matches_closed_form() {
        let v = simpson_refined(|x: f64| (-x).exp(), 0.0, 3.0, 1e-10).unwrap();
        assert!((v - (1.0 - (-3.0f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn nonfinite_integrand_is_reported() {
        let r = simpson_refined(|x: f64| 1.0 / x, 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
