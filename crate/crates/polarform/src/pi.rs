//! Elements of the two-generator space of degree `n`: coefficient vectors
//! over the basis `{g1^(n-k) g2^k}`, with exact product, generalized
//! derivative and antiderivative, and the generalized Taylor expansion.
//!
//! The generalized derivative `D f = f' / W` acts on basis monomials through
//! the per-preset [`DerivRule`], so repeated differentiation stays exact —
//! there is no nested numerical differentiation anywhere in the blossom
//! formulas built on top of this module.



use crate::blossom::HomPoint;
use crate::gamma::{DerivRule, GammaSystem};
use crate::quad::integrate;
use crate::scalar::{factorial, RealScalar, Scalar};
use crate::{Error, Result};

/// An element of the degree-`n` space as a dense coefficient vector;
/// `coeffs[k]` multiplies `g1^(n-k) g2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiElement<S: Scalar> {
    sys: GammaSystem<S>,
    coeffs: Vec<S>,
}

impl<S: Scalar> PiElement<S> {
    pub fn new(sys: &GammaSystem<S>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Input("coefficient vector must be nonempty".into()));
        }
        Ok(PiElement {
            sys: sys.clone(),
            coeffs,
        })
    }

    pub fn zero(sys: &GammaSystem<S>, degree: usize) -> Self {
        PiElement {
            sys: sys.clone(),
            coeffs: vec![S::zero(); degree + 1],
        }
    }

    pub fn constant(sys: &GammaSystem<S>, value: S) -> Self {
        PiElement {
            sys: sys.clone(),
            coeffs: vec![value],
        }
    }

    pub fn one(sys: &GammaSystem<S>) -> Self {
        Self::constant(sys, S::one())
    }

    /// The basis monomial `g1^(degree-k) g2^k`.
    pub fn monomial(sys: &GammaSystem<S>, degree: usize, k: usize) -> Result<Self> {
        if k > degree {
            return Err(Error::Input(format!("monomial index {k} > degree {degree}")));
        }
        let mut coeffs = vec![S::zero(); degree + 1];
        coeffs[k] = S::one();
        Ok(PiElement {
            sys: sys.clone(),
            coeffs,
        })
    }

    /// The degree-1 element representing `t -> d(a, t)`.
    pub fn d_at(sys: &GammaSystem<S>, a: &S) -> Result<Self> {
        sys.check_domain(a)?;
        Ok(PiElement {
            sys: sys.clone(),
            coeffs: vec![-sys.gamma2(a), sys.gamma1(a)],
        })
    }

    /// The constant-one function written in degree `n`; unital systems only
    /// (it is the n-th power of `c1*g1 + c2*g2`).
    pub fn unit_power(sys: &GammaSystem<S>, n: usize) -> Result<Self> {
        let (c1, c2) = sys
            .unit_coeffs()
            .ok_or_else(|| Error::Unsupported("unit power needs a unital system".into()))?;
        let mut elem = Self::one(sys);
        for _ in 0..n {
            elem = elem.multiply(&PiElement::new(
                sys,
                vec![c1.clone(), c2.clone()],
            )?)?;
        }
        Ok(elem)
    }

    pub fn system(&self) -> &GammaSystem<S> {
        &self.sys
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_same_system(&self, other: &Self) -> Result<()> {
        if self.sys == other.sys {
            Ok(())
        } else {
            Err(Error::SystemMismatch(
                self.sys.name().to_string(),
                other.sys.name().to_string(),
            ))
        }
    }

    pub fn eval(&self, t: &S) -> Result<S> {
        self.sys.check_domain(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub fn eval_unchecked(&self, t: &S) -> S {
        let n = self.degree();
        let y1 = self.sys.gamma1(t);
        let y2 = self.sys.gamma2(t);
        // powers g1^(n-k) g2^k accumulated from both ends
        let mut pow1 = vec![S::one(); n + 1];
        for i in 1..=n {
            pow1[i] = pow1[i - 1].clone() * y1.clone();
        }
        let mut acc = S::zero();
        let mut pow2 = S::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc = acc + c.clone() * pow1[n - k].clone() * pow2.clone();
            pow2 = pow2 * y2.clone();
        }
        acc
    }

    /// Pointwise product; coefficients convolve, degrees add.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_system(other)?;
        let mut out = vec![S::zero(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(PiElement {
            sys: self.sys.clone(),
            coeffs: out,
        })
    }

    /// Multiplies by the homogeneous linear factor
    /// `t -> p.x * g2(t) - p.w * g1(t)`; degree goes up by one.
    pub fn multiply_linear_factor(&self, p: &HomPoint<S>) -> Self {
        let mut out = vec![S::zero(); self.degree() + 2];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = out[k + 1].clone() + p.x.clone() * c.clone();
            out[k] = out[k].clone() - p.w.clone() * c.clone();
        }
        PiElement {
            sys: self.sys.clone(),
            coeffs: out,
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        PiElement {
            sys: self.sys.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_system(other)?;
        if self.degree() != other.degree() {
            return Err(Error::Input(format!(
                "degree mismatch in add: {} vs {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(PiElement {
            sys: self.sys.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn pow(&self, exponent: usize) -> Result<Self> {
        let mut acc = Self::one(&self.sys);
        for _ in 0..exponent {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// One application of the generalized derivative rule.
    fn derivative_once(&self) -> Result<Self> {
        let n = self.degree();
        match self.sys.deriv_rule().clone() {
            DerivRule::Unital { c1, c2 } => {
                if n == 0 {
                    return Ok(Self::zero(&self.sys, 0));
                }
                let mut out = vec![S::zero(); n];
                for (k, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let a = (n - k) as i64;
                    if a >= 1 {
                        out[k] = out[k].clone() - S::from_int(a) * c2.clone() * c.clone();
                    }
                    if k >= 1 {
                        out[k - 1] =
                            out[k - 1].clone() + S::from_int(k as i64) * c1.clone() * c.clone();
                    }
                }
                Ok(PiElement {
                    sys: self.sys.clone(),
                    coeffs: out,
                })
            }
            DerivRule::Rotational { hyperbolic } => {
                if n == 0 {
                    return Ok(Self::zero(&self.sys, 0));
                }
                let sign = if hyperbolic {
                    S::one()
                } else {
                    -S::one()
                };
                let mut out = vec![S::zero(); n + 1];
                for (k, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let a = n - k;
                    if a >= 1 {
                        out[k + 1] = out[k + 1].clone()
                            + sign.clone() * S::from_int(a as i64) * c.clone();
                    }
                    if k >= 1 {
                        out[k - 1] = out[k - 1].clone() + S::from_int(k as i64) * c.clone();
                    }
                }
                Ok(PiElement {
                    sys: self.sys.clone(),
                    coeffs: out,
                })
            }
            DerivRule::PowerLattice { p, q } => {
                let mut out = vec![S::zero(); n.max(2) - 1];
                for (k, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let a = n - k;
                    if a == 0 && k == 0 {
                        continue; // constant
                    }
                    if a == 0 || k == 0 {
                        return Err(Error::Unsupported(format!(
                            "Müntz derivative of the pure power g1^{a} g2^{k} leaves the \
                             monomial lattice; use the numeric path"
                        )));
                    }
                    let scale = S::from_f64((a as f64 * p + k as f64 * q) / (q - p))
                        .ok_or_else(|| Error::Unsupported("scale not representable".into()))?;
                    out[k - 1] = out[k - 1].clone() + scale * c.clone();
                }
                if n < 2 {
                    // surviving terms were constants only
                    return Ok(Self::zero(&self.sys, 0));
                }
                Ok(PiElement {
                    sys: self.sys.clone(),
                    coeffs: out,
                })
            }
        }
    }

    /// `order` applications of the generalized derivative. Unital rules drop
    /// the degree by one per application, trig/hyperbolic preserve it.
    pub fn gen_derivative(&self, order: usize) -> Result<Self> {
        let mut acc = self.clone();
        for _ in 0..order {
            acc = acc.derivative_once()?;
        }
        Ok(acc)
    }

    /// The antiderivative `F` with `D F = self` and `F(anchor) = 0`.
    ///
    /// Exact path for unital systems: the derivative rule is a banded linear
    /// map whose one-dimensional kernel (the unit direction) is fixed by the
    /// anchor condition.
    pub fn gen_antiderivative(&self, anchor: &S) -> Result<Self> {
        let (c1, c2) = match self.sys.deriv_rule() {
            DerivRule::Unital { c1, c2 } => (c1.clone(), c2.clone()),
            _ => {
                return Err(Error::Unsupported(
                    "exact antiderivative needs a unital system; use the numeric path".into(),
                ))
            }
        };
        self.sys.check_domain(anchor)?;
        let n = self.degree();
        let m = n + 1; // degree of the antiderivative
        let mut raw = vec![S::zero(); m + 1];
        if !c1.is_zero() {
            for k in 0..=n {
                // f[k] = -(m-k) c2 F[k] + (k+1) c1 F[k+1]
                let num = self.coeffs[k].clone()
                    + S::from_int((m - k) as i64) * c2.clone() * raw[k].clone();
                raw[k + 1] = num / (S::from_int((k + 1) as i64) * c1.clone());
            }
        } else {
            for k in (0..=n).rev() {
                let num = S::from_int((k + 1) as i64) * c1.clone() * raw[k + 1].clone()
                    - self.coeffs[k].clone();
                raw[k] = num / (S::from_int((m - k) as i64) * c2.clone());
            }
        }
        let mut f = PiElement {
            sys: self.sys.clone(),
            coeffs: raw,
        };
        let at_anchor = f.eval_unchecked(anchor);
        if !at_anchor.is_zero() {
            let unit = Self::unit_power(&self.sys, m)?;
            f = f.add(&unit.scale(&(-at_anchor)))?;
        }
        Ok(f)
    }
}

/// Generalized Taylor expansion: `sum_k derivs[k] / k! * d(x0, x)^k` from the
/// supplied derivative values `D^k f(x0)`. Unital systems only.
pub fn taylor_expand<S: Scalar>(
    sys: &GammaSystem<S>,
    derivs: &[S],
    x0: &S,
    x: &S,
) -> Result<S> {
    if !sys.is_unital() {
        return Err(Error::Unsupported(
            "generalized Taylor expansion needs a unital system".into(),
        ));
    }
    sys.check_domain(x0)?;
    sys.check_domain(x)?;
    let d = sys.d_unchecked(x0, x);
    let mut acc = S::zero();
    let mut d_pow = S::one();
    for (k, v) in derivs.iter().enumerate() {
        acc = acc + v.clone() * d_pow.clone() / factorial::<S>(k);
        d_pow = d_pow * d.clone();
    }
    Ok(acc)
}

/// Numeric generalized derivative of a plain function: order 0 is `f(x)`,
/// order 1 is `f'(x) / W(x)` using the supplied derivative oracle or a
/// central difference with step `1e-6`.
pub fn gen_derivative_numeric<S: RealScalar>(
    sys: &GammaSystem<S>,
    f: &dyn Fn(S) -> S,
    f_prime: Option<&dyn Fn(S) -> S>,
    x: S,
    order: usize,
) -> Result<S> {
    sys.check_domain(&x)?;
    match order {
        0 => Ok(f(x)),
        1 => {
            let w = sys.wronskian(&x)?;
            let fp = match f_prime {
                Some(p) => p(x),
                None => {
                    let h = S::from(1e-6).unwrap();
                    sys.check_domain(&(x - h))?;
                    sys.check_domain(&(x + h))?;
                    (f(x + h) - f(x - h)) / (S::from(2.0).unwrap() * h)
                }
            };
            Ok(fp / w)
        }
        _ => Err(Error::Unsupported(
            "numeric generalized derivative supports orders 0 and 1 only".into(),
        )),
    }
}

/// Numeric anchored antiderivative: `x -> int_anchor^x H(t) W(t) dt` by
/// adaptive quadrature, so that `D(result) = H` by construction.
pub fn gen_antiderivative_numeric<'a, S: RealScalar>(
    sys: &'a GammaSystem<S>,
    h: impl Fn(S) -> S + 'a,
    anchor: S,
    tol: f64,
) -> impl Fn(S) -> Result<S> + 'a {
    move |x: S| iterated_antiderivative_numeric(sys, &h, anchor, 1, tol, x)
}

/// `order`-fold anchored antiderivative in one quadrature, using the closed
/// form of `int W`:
/// `D^(-r) H(x) = int_anchor^x H(t) W(t) Omega(t,x)^(r-1) / (r-1)! dt`
/// with `Omega(t, x) = int_t^x W`. Order 0 returns `H(x)`.
pub fn iterated_antiderivative_numeric<S: RealScalar>(
    sys: &GammaSystem<S>,
    h: &dyn Fn(S) -> S,
    anchor: S,
    order: usize,
    tol: f64,
    x: S,
) -> Result<S> {
    sys.check_domain(&anchor)?;
    sys.check_domain(&x)?;
    if order == 0 {
        return Ok(h(x));
    }
    let r1 = order - 1;
    let fac: S = factorial(r1);
    let tol_s = S::from(tol).unwrap();
    let value = integrate(
        |t: S| {
            let mut kernel = h(t) * sys.wronskian_unchecked(&t);
            for _ in 0..r1 {
                kernel = kernel * sys.omega(&t, &x);
            }
            kernel
        },
        anchor,
        x,
        tol_s,
    )?;
    Ok(value / fac)
}
