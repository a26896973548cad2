//! Adaptive Simpson quadrature for the numeric antiderivative path.

use num_traits::Float;

use crate::{Error, Result};

const MAX_DEPTH: usize = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with adaptive
/// Simpson bisection. Returns the estimate; errors out with the achieved
/// tolerance if the recursion depth is exhausted before convergence.
pub fn integrate<F, G>(f: G, a: F, b: F, tol: F) -> Result<F>
where
    F: Float,
    G: Fn(F) -> F,
{
    if a == b {
        return Ok(F::zero());
    }
    let m = mid(a, b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let mut worst = F::zero();
    let v = adapt(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut worst);
    if worst > tol {
        return Err(Error::Quadrature {
            achieved: worst.to_f64().unwrap_or(f64::NAN),
            requested: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(v)
}

fn mid<F: Float>(a: F, b: F) -> F {
    (a + b) / F::from(2).unwrap()
}

fn simpson<F: Float>(a: F, b: F, fa: F, fm: F, fb: F) -> F {
    (b - a) / F::from(6).unwrap() * (fa + F::from(4).unwrap() * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Float, G: Fn(F) -> F>(
    f: &G,
    a: F,
    b: F,
    fa: F,
    fm: F,
    fb: F,
    whole: F,
    tol: F,
    depth: usize,
    worst: &mut F,
) -> F {
    let m = mid(a, b);
    let lm = mid(a, m);
    let rm = mid(m, b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let fifteen = F::from(15).unwrap();
    if depth == 0 || delta.abs() <= fifteen * tol {
        if depth == 0 {
            let local = delta.abs() / fifteen;
            if local > *worst {
                *worst = local;
            }
        }
        return left + right + delta / fifteen;
    }
    let half = tol / F::from(2).unwrap();
    adapt(f, a, m, fa, flm, fm, left, half, depth - 1, worst)
        + adapt(f, m, b, fm, frm, fb, right, half, depth - 1, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = integrate(|x: f64| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-11);
        let v = integrate(|x: f64| x.cos(), 0.0, 1.5, 1e-12).unwrap();
        assert!((v - 1.5f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|x: f64| x.exp(), 2.0, 2.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let fwd = integrate(|x: f64| x.sin(), 0.0, 1.0, 1e-12).unwrap();
        let rev = integrate(|x: f64| x.sin(), 1.0, 0.0, 1e-12).unwrap();
        assert!((fwd + rev).abs() < 1e-11);
    }
}
