//! Homogeneous and extended blossoms.
//!
//! The homogeneous blossom of `G` in `m` arguments is evaluated through the
//! constructive sum
//! `sum_j (-1)^(m-j) / m! * D^j Psi(tau) * D^(m-j) G(tau)` with
//! `Psi(x) = prod_i (x_i g2(x) - w_i g1(x))`. Every derivative is an exact
//! coefficient-space operation, so on the polynomial preset the whole sum is
//! exact in rational mode and the tau-independence of the value is a
//! testable property rather than an assumption.
//!
//! Extended blossoms of positive order enumerate signed point selections
//! (distinct x-indices, u-multisets); negative order goes through an
//! anchored antiderivative and a divided difference over the u-nodes.



use crate::combin::{index_multisets, index_subsets, multiset_count, subset_count};
use crate::divdiff::{divdiff, Evaluand, NodeList};
use crate::gamma::{DerivRule, GammaSystem};
use crate::pi::{iterated_antiderivative_numeric, PiElement};
use crate::scalar::{factorial, falling_binomial, midpoint, RealScalar, Scalar};
use crate::{Error, Result};

/// Default cap on the number of enumerated blossom terms.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// A homogeneous parameter pair `(x, w)`; the diagonal embedding of a
/// curve parameter `t` is `(g1(t), g2(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoint<S> {
    pub x: S,
    pub w: S,
}

impl<S: Scalar> HomPoint<S> {
    pub fn new(x: S, w: S) -> Self {
        HomPoint { x, w }
    }

    /// `a * self + b * other`, the combination used by linearity checks.
    pub fn combine(&self, a: &S, other: &Self, b: &S) -> Self {
        HomPoint {
            x: a.clone() * self.x.clone() + b.clone() * other.x.clone(),
            w: a.clone() * self.w.clone() + b.clone() * other.w.clone(),
        }
    }

    pub fn scale(&self, a: &S) -> Self {
        HomPoint {
            x: a.clone() * self.x.clone(),
            w: a.clone() * self.w.clone(),
        }
    }
}

/// Argument blocks for the extended blossoms: `x_block` of size `m`,
/// `u_block` of size `n`, and optionally the curve parameters behind the
/// u-points (required by the negative-order path).
#[derive(Debug, Clone)]
pub struct BlossomQuery<S: Scalar> {
    pub x_block: Vec<HomPoint<S>>,
    pub u_block: Vec<HomPoint<S>>,
    pub u_nodes: Option<Vec<S>>,
}

impl<S: Scalar> BlossomQuery<S> {
    pub fn new(x_block: Vec<HomPoint<S>>, u_block: Vec<HomPoint<S>>) -> Self {
        BlossomQuery {
            x_block,
            u_block,
            u_nodes: None,
        }
    }

    /// Builds the u-block as curve points of the given parameters.
    pub fn with_u_nodes(
        sys: &GammaSystem<S>,
        x_block: Vec<HomPoint<S>>,
        u_nodes: Vec<S>,
    ) -> Result<Self> {
        for eps in &u_nodes {
            sys.check_domain(eps)?;
        }
        let u_block = u_nodes.iter().map(|eps| sys.curve_point(eps)).collect();
        Ok(BlossomQuery {
            x_block,
            u_block,
            u_nodes: Some(u_nodes),
        })
    }

    /// Order `k = m - n` of the extended blossom this query describes.
    pub fn order(&self) -> i64 {
        self.x_block.len() as i64 - self.u_block.len() as i64
    }

    /// Checks the u-block against its claimed curve parameters.
    pub fn validate(&self, sys: &GammaSystem<S>) -> Result<()> {
        if let Some(nodes) = &self.u_nodes {
            if nodes.len() != self.u_block.len() {
                return Err(Error::Input(format!(
                    "{} u-nodes for {} u-points",
                    nodes.len(),
                    self.u_block.len()
                )));
            }
            for (eps, u) in nodes.iter().zip(&self.u_block) {
                let p = sys.curve_point(eps);
                let dx = (p.x.clone() - u.x.clone()).abs().approx_f64();
                let dw = (p.w.clone() - u.w.clone()).abs().approx_f64();
                if dx > 1e-12 || dw > 1e-12 {
                    return Err(Error::Input(format!(
                        "u-point ({}, {}) does not match curve point of {}",
                        u.x.approx_f64(),
                        u.w.approx_f64(),
                        eps.approx_f64()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The product `Psi(x) = prod_i (p.x * g2(x) - p.w * g1(x))` as an element
/// of degree `pts.len()`.
pub fn psi_element<S: Scalar>(sys: &GammaSystem<S>, pts: &[HomPoint<S>]) -> PiElement<S> {
    let mut psi = PiElement::one(sys);
    for p in pts {
        psi = psi.multiply_linear_factor(p);
    }
    psi
}

/// Homogeneous blossom of `G` in `pts.len()` arguments, evaluated at the
/// expansion point `tau` (any point of the domain; values are
/// tau-independent whenever the underlying theorem applies, which the test
/// suite measures rather than assumes).
pub fn hom_blossom<S: Scalar>(
    g: &PiElement<S>,
    pts: &[HomPoint<S>],
    tau: &S,
) -> Result<S> {
    let sys = g.system().clone();
    let m = pts.len();
    if g.degree() > m {
        return Err(Error::DegreeTooHigh {
            degree: g.degree(),
            order: m,
        });
    }
    sys.check_domain(tau)?;
    let psi = psi_element(&sys, pts);

    // D^j Psi(tau) for j = 0..m and D^i G(tau) for i = 0..m
    let mut psi_vals = Vec::with_capacity(m + 1);
    let mut g_vals = Vec::with_capacity(m + 1);
    let mut dpsi = psi;
    let mut dg = g.clone();
    for j in 0..=m {
        psi_vals.push(dpsi.eval_unchecked(tau));
        g_vals.push(dg.eval_unchecked(tau));
        if j < m {
            dpsi = dpsi.gen_derivative(1)?;
            dg = dg.gen_derivative(1)?;
        }
    }

    let m_fac: S = factorial(m);
    let mut acc = S::zero();
    for (j, psi_j) in psi_vals.iter().enumerate() {
        let term = psi_j.clone() * g_vals[m - j].clone();
        if (m - j) % 2 == 0 {
            acc = acc + term;
        } else {
            acc = acc - term;
        }
    }
    Ok(acc / m_fac)
}

fn default_tau<S: Scalar>(sys: &GammaSystem<S>) -> S {
    let (lo, hi) = sys.domain();
    midpoint(lo, hi)
}

/// Extended blossom of non-negative order `k = m - n` (the `d = k` case of
/// the scaled formula): the signed sum over all selections of `alpha`
/// distinct x-points and `beta`-multisets of u-points with
/// `alpha + beta = k`, each evaluated through the homogeneous blossom.
pub fn ext_blossom_pos<S: Scalar>(
    g: &PiElement<S>,
    query: &BlossomQuery<S>,
    tau: Option<&S>,
    term_cap: usize,
) -> Result<S> {
    let sys = g.system().clone();
    query.validate(&sys)?;
    let m = query.x_block.len();
    let n = query.u_block.len();
    let k = m as i64 - n as i64;
    if k < 0 || (g.degree() as i64) > k {
        return Err(Error::DegreeTooHigh {
            degree: g.degree(),
            order: k.max(0) as usize,
        });
    }
    let k = k as usize;
    let tau = tau.cloned().unwrap_or_else(|| default_tau(&sys));
    signed_selection_sum(g, query, k, &tau, term_cap)
}

/// The scaled combinatorial formula: the same signed selection sum with
/// `alpha + beta = d`, divided by the generalized binomial `C(k, d)` (a
/// falling factorial, valid for negative `k` as well). `C(k, d) = 0` —
/// i.e. `0 <= k < d` — is rejected as an unsupported case.
pub fn ext_blossom_scaled<S: Scalar>(
    g: &PiElement<S>,
    query: &BlossomQuery<S>,
    d: usize,
    tau: Option<&S>,
    term_cap: usize,
) -> Result<S> {
    let sys = g.system().clone();
    query.validate(&sys)?;
    let k = query.order();
    let denom: S = falling_binomial(k, d);
    if denom.is_zero() {
        return Err(Error::ZeroBinomial { k, d });
    }
    if g.degree() > d {
        return Err(Error::DegreeTooHigh {
            degree: g.degree(),
            order: d,
        });
    }
    let tau = tau.cloned().unwrap_or_else(|| default_tau(&sys));
    let total = signed_selection_sum(g, query, d, &tau, term_cap)?;
    Ok(total / denom)
}

/// `sum over alpha+beta=d of (-1)^beta g(x-subset, u-multiset)` with fixed
/// lexicographic enumeration order.
fn signed_selection_sum<S: Scalar>(
    g: &PiElement<S>,
    query: &BlossomQuery<S>,
    d: usize,
    tau: &S,
    term_cap: usize,
) -> Result<S> {
    let m = query.x_block.len();
    let n = query.u_block.len();
    let mut terms = 0usize;
    for beta in 0..=d {
        let alpha = d - beta;
        terms = terms.saturating_add(subset_count(m, alpha).saturating_mul(multiset_count(n, beta)));
    }
    if terms > term_cap {
        return Err(Error::TermCap {
            terms,
            cap: term_cap,
        });
    }
    let mut acc = S::zero();
    for beta in 0..=d {
        let alpha = d - beta;
        if alpha > m {
            continue;
        }
        for subset in index_subsets(m, alpha) {
            for multiset in index_multisets(n, beta) {
                let mut pts: Vec<HomPoint<S>> = Vec::with_capacity(d);
                pts.extend(subset.iter().map(|&i| query.x_block[i].clone()));
                pts.extend(multiset.iter().map(|&j| query.u_block[j].clone()));
                let value = hom_blossom(g, &pts, tau)?;
                if beta % 2 == 0 {
                    acc = acc + value;
                } else {
                    acc = acc - value;
                }
            }
        }
    }
    Ok(acc)
}

/// Options for the negative-order blossom: the antiderivative anchor
/// (domain midpoint when unset; the value is anchor-independent, which the
/// suite verifies) and the quadrature tolerance for the numeric path.
#[derive(Debug, Clone)]
pub struct NegOptions<S> {
    pub anchor: Option<S>,
    pub quad_tol: f64,
}

impl<S> Default for NegOptions<S> {
    fn default() -> Self {
        NegOptions {
            anchor: None,
            quad_tol: 1e-10,
        }
    }
}

/// Negative-order extended blossom, exact path: `H` must be a coefficient
/// element over a unital system. Computes
/// `(n-m-1)! * { Psi * D^-(n-m-1) H }[eps_1, ..., eps_n]`.
pub fn ext_blossom_neg<S: Scalar>(
    sys: &GammaSystem<S>,
    h: &Evaluand<S>,
    query: &BlossomQuery<S>,
    opts: &NegOptions<S>,
) -> Result<S> {
    let (r, eps) = neg_preflight(sys, query)?;
    let elem = match h {
        Evaluand::Pi(elem) => elem,
        Evaluand::Func(_) => {
            return Err(Error::Unsupported(
                "exact negative-order blossom needs a coefficient element; \
                 use ext_blossom_neg_numeric"
                    .into(),
            ))
        }
    };
    if !matches!(sys.deriv_rule(), DerivRule::Unital { .. }) {
        return Err(Error::Unsupported(
            "exact negative-order blossom needs a unital system; \
             use ext_blossom_neg_numeric"
                .into(),
        ));
    }
    let anchor = opts.anchor.clone().unwrap_or_else(|| default_tau(sys));
    let mut anti = elem.clone();
    for _ in 0..r {
        anti = anti.gen_antiderivative(&anchor)?;
    }
    let psi = psi_element(sys, &query.x_block);
    let f = psi.multiply(&anti)?;
    let dd = divdiff(sys, &Evaluand::from_pi(f), &NodeList::new(eps)?)?;
    Ok(factorial::<S>(r) * dd)
}

/// Negative-order extended blossom, numeric path: anchored antiderivatives
/// by adaptive quadrature and a divided difference of the resulting
/// function. Confluent u-nodes are supported whenever `Psi` has a total
/// derivative rule and `H` carries derivative data of sufficient order.
pub fn ext_blossom_neg_numeric<S: RealScalar>(
    sys: &GammaSystem<S>,
    h: &Evaluand<S>,
    query: &BlossomQuery<S>,
    opts: &NegOptions<S>,
) -> Result<S> {
    let (r, eps) = neg_preflight(sys, query)?;
    let anchor = opts.anchor.clone().unwrap_or_else(|| default_tau(sys));
    let tol = opts.quad_tol;
    let psi = psi_element(sys, &query.x_block);

    let h_value = h.clone();
    let sys_value = sys.clone();
    let value = {
        let psi = psi.clone();
        move |x: &S| {
            let g_r = iterated_antiderivative_numeric(
                &sys_value,
                &|t| h_value.value(&t),
                anchor,
                r,
                tol,
                *x,
            )
            .unwrap_or(S::nan());
            psi.eval_unchecked(x) * g_r
        }
    };

    // D^j (Psi * G_r) by Leibniz; D^s G_r is a lower antiderivative for
    // s < r and D^(s-r) H beyond that.
    let psi_derivs: Option<Vec<PiElement<S>>> = (0..eps.len())
        .scan(Some(psi.clone()), |state, _| {
            let current = state.clone()?;
            *state = current.gen_derivative(1).ok();
            Some(Some(current))
        })
        .collect();
    let max_order = match (&psi_derivs, h) {
        (Some(_), Evaluand::Pi(_)) => eps.len().saturating_sub(1),
        (Some(_), Evaluand::Func(f)) => r + f.max_order,
        (None, _) => 0,
    };
    let evaluand = match psi_derivs {
        Some(derivs) => {
            let h_inner = h.clone();
            let sys_inner = sys.clone();
            Evaluand::from_fn_with_derivs(
                value,
                move |t: &S, j: usize| {
                    let mut acc = S::zero();
                    for i in 0..=j.min(derivs.len() - 1) {
                        let psi_i = derivs[i].eval_unchecked(t);
                        if psi_i == S::zero() {
                            continue;
                        }
                        let s = j - i;
                        let g_s = if s <= r {
                            iterated_antiderivative_numeric(
                                &sys_inner,
                                &|u| h_inner.value(&u),
                                anchor,
                                r - s,
                                tol,
                                *t,
                            )?
                        } else {
                            h_inner.gen_derivative_at(t, s - r)?
                        };
                        acc = acc + crate::scalar::binomial::<S>(j, i) * psi_i * g_s;
                    }
                    Ok(acc)
                },
                max_order,
            )
        }
        None => Evaluand::from_fn(value),
    };
    let dd = divdiff(sys, &evaluand, &NodeList::new(eps)?)?;
    Ok(factorial::<S>(r) * dd)
}

fn neg_preflight<S: Scalar>(
    sys: &GammaSystem<S>,
    query: &BlossomQuery<S>,
) -> Result<(usize, Vec<S>)> {
    query.validate(sys)?;
    let m = query.x_block.len();
    let n = query.u_block.len();
    if m >= n {
        return Err(Error::Input(format!(
            "negative-order blossom needs m < n, got m={m}, n={n}"
        )));
    }
    let eps = query.u_nodes.clone().ok_or(Error::MissingUNodes)?;
    Ok((n - m - 1, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::index_subsets;
    use crate::Rational;
    use num_traits::One;
    use rand::Rng;
    use rand::SeedableRng;

    fn poly() -> GammaSystem<f64> {
        GammaSystem::<f64>::polynomial((-10.0, 10.0)).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    /// Classical blossom of a polynomial in homogeneous form, expanded by
    /// brute force: `g = sum_k c_k * e_k-ish symmetric average`. Independent
    /// of the derivative machinery.
    fn classical_blossom(coeffs: &[f64], pts: &[(f64, f64)]) -> f64 {
        let m = pts.len();
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let subsets = index_subsets(m, k);
            let count = subsets.len() as f64;
            let mut sym = 0.0;
            for subset in subsets {
                let mut term = 1.0;
                for (i, (x, w)) in pts.iter().enumerate() {
                    term *= if subset.contains(&i) { *w } else { *x };
                }
                sym += term;
            }
            acc += c * sym / count;
        }
        acc
    }

    #[test]
    fn blossom_of_constant_is_one_on_normalized_points() {
        let sys = poly();
        let one = PiElement::one(&sys);
        // curve points and unit-first-coordinate points both normalize
        let pts = vec![
            sys.curve_point(&2.0),
            HomPoint::new(1.0, -3.5),
            HomPoint::new(1.0, 0.25),
        ];
        let v = hom_blossom(&one, &pts, &0.3).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blossom_of_g2_is_w() {
        let sys = poly();
        let g2 = PiElement::new(&sys, vec![0.0, 1.0]).unwrap();
        let v = hom_blossom(&g2, &[HomPoint::new(2.0, 5.0)], &0.7).unwrap();
        assert_eq!(v, 5.0);
        let sine = GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap();
        let g2 = PiElement::new(&sine, vec![0.0, 1.0]).unwrap();
        let v = hom_blossom(&g2, &[HomPoint::new(-0.3, 1.7)], &0.2).unwrap();
        assert!((v - 1.7).abs() < 1e-13);
    }

    #[test]
    fn classical_x_squared_blossom() {
        let sys = poly();
        let x2 = PiElement::new(&sys, vec![0.0, 0.0, 1.0]).unwrap();
        let pts = vec![HomPoint::new(1.0, 2.0), HomPoint::new(1.0, 3.0)];
        let v = hom_blossom(&x2, &pts, &0.0).unwrap();
        assert_eq!(v, 6.0);
        let oracle = classical_blossom(&[0.0, 0.0, 1.0], &[(1.0, 2.0), (1.0, 3.0)]);
        assert_eq!(v, oracle);
    }

    #[test]
    fn matches_classical_blossom_on_random_instances() {
        let sys = poly();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let m = rng.random_range(1..5usize);
            let deg = rng.random_range(0..=m);
            let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-2.0..2.0)).collect();
            let g = PiElement::new(&sys, coeffs.clone()).unwrap();
            let pts: Vec<HomPoint<f64>> = (0..m)
                .map(|_| HomPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let tau = rng.random_range(-5.0..5.0);
            let v = hom_blossom(&g, &pts, &tau).unwrap();
            // oracle expands G in monomials of degree exactly m
            let mut padded = vec![0.0; m + 1];
            for (k, c) in coeffs.iter().enumerate() {
                padded[k] = *c; // x^k = 1^(m-k) x^k, same index in degree-m basis
            }
            let raw: Vec<(f64, f64)> = pts.iter().map(|p| (p.x, p.w)).collect();
            let oracle = classical_blossom(&padded, &raw);
            assert!(
                (v - oracle).abs() <= 1e-9 * oracle.abs().max(1.0),
                "m={m}: {v} vs {oracle}"
            );
        }
    }

    #[test]
    fn degree_above_argument_count_is_rejected() {
        let sys = poly();
        let x2 = PiElement::new(&sys, vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            hom_blossom(&x2, &[HomPoint::new(1.0, 1.0)], &0.0),
            Err(Error::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn tau_independence_exact_in_rational_mode() {
        let sys = GammaSystem::<Rational>::polynomial((rat(-5, 1), rat(5, 1))).unwrap();
        let g = PiElement::new(&sys, vec![rat(1, 3), rat(-2, 1), rat(1, 2)]).unwrap();
        let pts = vec![
            HomPoint::new(rat(1, 1), rat(2, 1)),
            HomPoint::new(rat(1, 2), rat(-1, 3)),
            HomPoint::new(rat(2, 1), rat(1, 7)),
        ];
        let taus = [rat(0, 1), rat(1, 2), rat(-3, 1), rat(22, 7)];
        let base = hom_blossom(&g, &pts, &taus[0]).unwrap();
        for tau in &taus[1..] {
            assert_eq!(hom_blossom(&g, &pts, tau).unwrap(), base);
        }
    }

    #[test]
    fn diagonal_reproduces_the_function() {
        let sine = GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap();
        let g = PiElement::new(&sine, vec![0.5, -1.0, 2.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let t = rng.random_range(-1.1..1.1);
            let pts = vec![sine.curve_point(&t); 3];
            let tau = rng.random_range(-1.1..1.1);
            let v = hom_blossom(&g, &pts, &tau).unwrap();
            assert!((v - g.eval(&t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn ext_pos_of_constant_one_is_exactly_one() {
        let sys = GammaSystem::<Rational>::polynomial((rat(-5, 1), rat(5, 1))).unwrap();
        let one = PiElement::one(&sys);
        let x_block: Vec<HomPoint<Rational>> = [rat(1, 2), rat(-1, 1), rat(3, 2), rat(2, 1)]
            .iter()
            .map(|t| sys.curve_point(t))
            .collect();
        let u_block: Vec<HomPoint<Rational>> =
            [rat(0, 1), rat(1, 1)].iter().map(|t| sys.curve_point(t)).collect();
        let q = BlossomQuery::new(x_block, u_block);
        let v = ext_blossom_pos(&one, &q, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(v, Rational::one());
    }

    #[test]
    fn ext_pos_cancellation_and_diagonal() {
        let sys = poly();
        let g = PiElement::new(&sys, vec![0.3, -1.0, 0.5]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let x_block: Vec<HomPoint<f64>> = (0..4)
                .map(|_| HomPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let u_block: Vec<HomPoint<f64>> = (0..2)
                .map(|_| HomPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let base = ext_blossom_pos(
                &g,
                &BlossomQuery::new(x_block.clone(), u_block.clone()),
                None,
                DEFAULT_TERM_CAP,
            )
            .unwrap();

            // cancellation: append the same point to both blocks
            let extra = HomPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let mut x2 = x_block.clone();
            let mut u2 = u_block.clone();
            x2.push(extra.clone());
            u2.push(extra);
            let appended =
                ext_blossom_pos(&g, &BlossomQuery::new(x2, u2), None, DEFAULT_TERM_CAP).unwrap();
            assert!((appended - base).abs() <= 1e-10 * base.abs().max(1.0));
        }
        // diagonal
        for _ in 0..20 {
            let t = rng.random_range(-5.0..5.0);
            let q = BlossomQuery::new(vec![sys.curve_point(&t); 4], vec![sys.curve_point(&t); 2]);
            let v = ext_blossom_pos(&g, &q, None, DEFAULT_TERM_CAP).unwrap();
            assert!((v - g.eval(&t).unwrap()).abs() <= 1e-10 * v.abs().max(1.0));
        }
    }

    #[test]
    fn scaled_with_d_equal_k_matches_pos_exactly() {
        let sys = GammaSystem::<Rational>::polynomial((rat(-5, 1), rat(5, 1))).unwrap();
        let g = PiElement::new(&sys, vec![rat(1, 2), rat(2, 3), rat(-1, 1)]).unwrap();
        let x_block: Vec<HomPoint<Rational>> = (0..4)
            .map(|i| HomPoint::new(rat(1, 1), rat(i as i64 - 2, 2)))
            .collect();
        let u_block: Vec<HomPoint<Rational>> = (0..2)
            .map(|i| HomPoint::new(rat(1, 1), rat(i as i64, 3)))
            .collect();
        let q = BlossomQuery::new(x_block, u_block);
        let pos = ext_blossom_pos(&g, &q, None, DEFAULT_TERM_CAP).unwrap();
        let scaled = ext_blossom_scaled(&g, &q, 2, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(pos, scaled);
    }

    #[test]
    fn scaled_rejects_zero_binomial() {
        let sys = poly();
        let g = PiElement::one(&sys);
        let q = BlossomQuery::new(
            vec![HomPoint::new(1.0, 0.0); 2],
            vec![HomPoint::new(1.0, 1.0)],
        );
        // k = 1, d = 2 -> C(1, 2) = 0
        assert!(matches!(
            ext_blossom_scaled(&g, &q, 2, None, DEFAULT_TERM_CAP),
            Err(Error::ZeroBinomial { .. })
        ));
    }

    #[test]
    fn neg_blossom_single_node_is_the_value() {
        let sys = poly();
        let h = PiElement::new(&sys, vec![1.0, 2.0]).unwrap();
        let q = BlossomQuery::with_u_nodes(&sys, vec![], vec![1.5]).unwrap();
        let v = ext_blossom_neg(&sys, &Evaluand::from_pi(h.clone()), &q, &Default::default())
            .unwrap();
        assert_eq!(v, h.eval(&1.5).unwrap());
    }

    #[test]
    fn neg_blossom_hand_oracle_exact() {
        // H = x, m = 0, n = 2: value is (eps1 + eps2)/2
        let sys = GammaSystem::<Rational>::polynomial((rat(-5, 1), rat(5, 1))).unwrap();
        let h = PiElement::new(&sys, vec![rat(0, 1), rat(1, 1)]).unwrap();
        let eps = vec![rat(1, 3), rat(7, 4)];
        let q = BlossomQuery::with_u_nodes(&sys, vec![], eps.clone()).unwrap();
        let v = ext_blossom_neg(&sys, &Evaluand::from_pi(h), &q, &Default::default()).unwrap();
        let expect = (eps[0].clone() + eps[1].clone()) / rat(2, 1);
        assert_eq!(v, expect);
    }

    #[test]
    fn neg_blossom_confluent_diagonal_recovers_h() {
        let sine = GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap();
        let h = PiElement::new(&sine, vec![0.4, 1.0, -0.3]).unwrap();
        let t = 0.35;
        let q = BlossomQuery::with_u_nodes(
            &sine,
            vec![sine.curve_point(&t); 1],
            vec![t; 3],
        )
        .unwrap();
        let v = ext_blossom_neg(&sine, &Evaluand::from_pi(h.clone()), &q, &Default::default())
            .unwrap();
        assert!((v - h.eval(&t).unwrap()).abs() < 1e-10);

        let v_num =
            ext_blossom_neg_numeric(&sine, &Evaluand::from_pi(h.clone()), &q, &Default::default())
                .unwrap();
        assert!((v_num - h.eval(&t).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn neg_blossom_is_anchor_independent() {
        let tanh = GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap();
        let h = PiElement::new(&tanh, vec![1.0, -0.5]).unwrap();
        let q = BlossomQuery::with_u_nodes(
            &tanh,
            vec![HomPoint::new(0.3, 1.2)],
            vec![-1.0, 0.2, 1.4],
        )
        .unwrap();
        let a = ext_blossom_neg(
            &tanh,
            &Evaluand::from_pi(h.clone()),
            &q,
            &NegOptions {
                anchor: Some(-1.5),
                quad_tol: 1e-10,
            },
        )
        .unwrap();
        let b = ext_blossom_neg(
            &tanh,
            &Evaluand::from_pi(h),
            &q,
            &NegOptions {
                anchor: Some(1.1),
                quad_tol: 1e-10,
            },
        )
        .unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn neg_blossom_requires_u_nodes() {
        let sys = poly();
        let h = PiElement::one(&sys);
        let q = BlossomQuery::new(vec![], vec![HomPoint::new(1.0, 0.5); 2]);
        assert!(matches!(
            ext_blossom_neg(&sys, &Evaluand::from_pi(h), &q, &Default::default()),
            Err(Error::MissingUNodes)
        ));
    }

    #[test]
    fn neg_vs_scaled_cross_check() {
        // k < 0: the combinatorial route with the falling-factorial binomial
        // agrees with the antiderivative route
        let sys = poly();
        let g = PiElement::new(&sys, vec![0.0, 1.0]).unwrap(); // x
        let eps = vec![0.5, 2.0];
        let q = BlossomQuery::with_u_nodes(&sys, vec![], eps).unwrap();
        let neg =
            ext_blossom_neg(&sys, &Evaluand::from_pi(g.clone()), &q, &Default::default()).unwrap();
        let scaled = ext_blossom_scaled(&g, &q, 1, None, DEFAULT_TERM_CAP).unwrap();
        assert!((neg - scaled).abs() < 1e-12);
        assert!((neg - 1.25).abs() < 1e-12); // (0.5 + 2.0)/2
    }

    #[test]
    fn term_cap_guards_combinatorial_explosion() {
        let sys = poly();
        let g = PiElement::one(&sys);
        let q = BlossomQuery::new(
            (0..8).map(|i| HomPoint::new(1.0, i as f64)).collect(),
            (0..6).map(|i| HomPoint::new(1.0, i as f64 / 2.0)).collect(),
        );
        assert!(matches!(
            ext_blossom_pos(&g, &q, None, 10),
            Err(Error::TermCap { .. })
        ));
    }
}
