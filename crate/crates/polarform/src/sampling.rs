//! Deterministic instance generation for the verification batches.
//!
//! All randomness is ChaCha8 from explicit seeds, and values are drawn off
//! integer grids mapped through `from_ratio`, so the same seed produces the
//! same instances in float and exact mode alike.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::blossom::HomPoint;
use crate::gamma::GammaSystem;
use crate::pi::PiElement;
use crate::scalar::Scalar;

const GRID: i64 = 1_000_000;

/// Stable sub-seed for a labelled batch (FNV-1a of the label, xor base).
pub fn subseed(base: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ base
}

/// A domain point at least `margin` (fraction of the span) away from both
/// endpoints.
pub fn interior_point<S: Scalar>(rng: &mut ChaCha8Rng, sys: &GammaSystem<S>, margin: f64) -> S {
    let lo_idx = (GRID as f64 * margin) as i64;
    let hi_idx = GRID - lo_idx;
    let i = rng.random_range(lo_idx..=hi_idx);
    grid_point(sys, i)
}

fn grid_point<S: Scalar>(sys: &GammaSystem<S>, index: i64) -> S {
    let (lo, hi) = sys.domain();
    lo.clone() + (hi.clone() - lo.clone()) * S::from_ratio(index, GRID)
}

/// `count` pairwise-separated interior points (at least 0.5% of the span
/// apart), in draw order.
pub fn distinct_interior_nodes<S: Scalar>(
    rng: &mut ChaCha8Rng,
    sys: &GammaSystem<S>,
    count: usize,
) -> Vec<S> {
    let sep = GRID / 200;
    let mut indices: Vec<i64> = Vec::with_capacity(count);
    while indices.len() < count {
        let i = rng.random_range(20_000..=(GRID - 20_000));
        if indices.iter().all(|j| (j - i).abs() >= sep) {
            indices.push(i);
        }
    }
    indices.into_iter().map(|i| grid_point(sys, i)).collect()
}

/// Random element of the stated degree with small-rational coefficients.
pub fn random_element<S: Scalar>(
    rng: &mut ChaCha8Rng,
    sys: &GammaSystem<S>,
    degree: usize,
) -> PiElement<S> {
    let coeffs: Vec<S> = (0..=degree)
        .map(|_| S::from_ratio(rng.random_range(-12..=12), rng.random_range(1..=4)))
        .collect();
    PiElement::new(sys, coeffs).expect("nonempty coefficients")
}

/// Random element whose leading coefficient is bounded away from zero, for
/// instances where a degenerate top coefficient would make both sides of an
/// identity vanish.
pub fn random_element_nonzero_lead<S: Scalar>(
    rng: &mut ChaCha8Rng,
    sys: &GammaSystem<S>,
    degree: usize,
) -> PiElement<S> {
    let mut coeffs: Vec<S> = (0..=degree)
        .map(|_| S::from_ratio(rng.random_range(-12..=12), rng.random_range(1..=4)))
        .collect();
    let sign = if rng.random_range(0..2) == 0 { 1 } else { -1 };
    coeffs[degree] = S::from_ratio(sign * rng.random_range(1..=12), rng.random_range(1..=4));
    PiElement::new(sys, coeffs).expect("nonempty coefficients")
}

/// A free homogeneous pair with small-rational coordinates, kept away from
/// the zero pair.
pub fn random_free_point<S: Scalar>(rng: &mut ChaCha8Rng) -> HomPoint<S> {
    loop {
        let x = S::from_ratio(rng.random_range(-8..=8), rng.random_range(1..=3));
        let w = S::from_ratio(rng.random_range(-8..=8), rng.random_range(1..=3));
        if x.abs().approx_f64() + w.abs().approx_f64() > 0.25 {
            return HomPoint::new(x, w);
        }
    }
}

/// A curve point of a random interior parameter.
pub fn random_curve_point<S: Scalar>(
    rng: &mut ChaCha8Rng,
    sys: &GammaSystem<S>,
) -> HomPoint<S> {
    let t = interior_point(rng, sys, 0.02);
    sys.curve_point(&t)
}

/// Small random scalar from the coefficient grid (for linearity weights).
pub fn small_scalar<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    S::from_ratio(rng.random_range(-6..=6), rng.random_range(1..=3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn subseed_is_stable() {
        assert_eq!(subseed(42, "hom/polynomial"), subseed(42, "hom/polynomial"));
        assert_ne!(subseed(42, "hom/polynomial"), subseed(42, "hom/trig"));
        assert_ne!(subseed(42, "x"), subseed(43, "x"));
    }

    #[test]
    fn same_seed_same_instances_across_modes() {
        let sys_f = GammaSystem::<f64>::polynomial((-1.0, 1.0)).unwrap();
        let sys_q = GammaSystem::<crate::Rational>::polynomial((
            crate::Rational::from_int(-1),
            crate::Rational::from_int(1),
        ))
        .unwrap();
        let mut rng_f = ChaCha8Rng::seed_from_u64(99);
        let mut rng_q = ChaCha8Rng::seed_from_u64(99);
        let nodes_f = distinct_interior_nodes(&mut rng_f, &sys_f, 4);
        let nodes_q = distinct_interior_nodes(&mut rng_q, &sys_q, 4);
        for (a, b) in nodes_f.iter().zip(&nodes_q) {
            assert!((a - b.approx_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn distinct_nodes_are_separated() {
        let sys = GammaSystem::<f64>::polynomial((0.0, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let nodes = distinct_interior_nodes(&mut rng, &sys, 7);
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                assert!((nodes[i] - nodes[j]).abs() >= 0.004);
            }
        }
    }
}
