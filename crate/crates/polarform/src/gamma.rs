//! Generator pairs `(g1, g2)` and the structure they induce: the
//! antisymmetric kernel `d`, the Wronskian, the generalized-derivative
//! direction pair, and the closed-form pieces each preset contributes.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::blossom::HomPoint;
use crate::scalar::{midpoint, RealScalar, Scalar};
use crate::{Error, Rational, Result};

type Func<S> = Arc<dyn Fn(&S) -> S + Send + Sync>;

/// Threshold below which a Wronskian counts as singular.
pub const WRONSKIAN_MIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Polynomial,
    Trig,
    Hyperbolic,
    Muntz,
    UnitalSine,
    UnitalTanh,
    UnitalMuntz,
}

impl PresetKind {
    pub const ALL: [PresetKind; 7] = [
        PresetKind::Polynomial,
        PresetKind::Trig,
        PresetKind::Hyperbolic,
        PresetKind::Muntz,
        PresetKind::UnitalSine,
        PresetKind::UnitalTanh,
        PresetKind::UnitalMuntz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PresetKind::Polynomial => "polynomial",
            PresetKind::Trig => "trig",
            PresetKind::Hyperbolic => "hyperbolic",
            PresetKind::Muntz => "muntz",
            PresetKind::UnitalSine => "unital_sine",
            PresetKind::UnitalTanh => "unital_tanh",
            PresetKind::UnitalMuntz => "unital_muntz",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        PresetKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == text)
            .ok_or_else(|| Error::Preset(format!("unknown preset {text:?}")))
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent parameters for the Müntz presets; empty for every other kind.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PresetParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

/// Action of the generalized derivative on basis monomials `g1^a g2^b`.
///
/// * `Unital`: `(a,b) -> -a*c2*(a-1,b) + b*c1*(a,b-1)` — degree drops by one.
/// * `Rotational` (trig/hyperbolic): `(a,b) -> s*a*(a-1,b+1) + b*(a+1,b-1)`
///   with `s = -1` for `(cos, sin)` and `s = +1` for `(cosh, sinh)` — degree
///   is preserved.
/// * `PowerLattice` (Müntz): `(a,b) -> (a*p + b*q)/(q-p) * (a-1,b-1)`; the
///   pure powers `g1^a` and `g2^b` leave the monomial lattice, so the rule is
///   partial and callers get an `Unsupported` error on such terms.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivRule<S> {
    Unital { c1: S, c2: S },
    Rotational { hyperbolic: bool },
    PowerLattice { p: f64, q: f64 },
}

/// A generator pair on a closed interval, with everything the rest of the
/// crate needs evaluated through closures installed by the preset.
#[derive(Clone)]
pub struct GammaSystem<S: Scalar> {
    name: String,
    kind: PresetKind,
    params: PresetParams,
    domain: (S, S),
    g1: Func<S>,
    g2: Func<S>,
    g1_prime: Func<S>,
    g2_prime: Func<S>,
    /// Closed form for `d(x1, x2)` when the preset has a better-conditioned
    /// expression than the generic product difference.
    d_closed: Option<Arc<dyn Fn(&S, &S) -> S + Send + Sync>>,
    /// Antiderivative `V` of the Wronskian (`V' = W`), used by the numeric
    /// antiderivative path.
    w_antideriv: Func<S>,
    unit_coeffs: Option<(S, S)>,
    rule: DerivRule<S>,
}

impl<S: Scalar> fmt::Debug for GammaSystem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaSystem")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl<S: Scalar> PartialEq for GammaSystem<S> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.params == other.params && self.domain == other.domain
    }
}

impl<S: Scalar> GammaSystem<S> {
    /// The classical pair `g1 = 1`, `g2 = x`. Available for every scalar,
    /// including exact rationals.
    pub fn polynomial(domain: (S, S)) -> Result<Self> {
        let sys = GammaSystem {
            name: "polynomial".to_string(),
            kind: PresetKind::Polynomial,
            params: PresetParams::default(),
            domain: checked_domain(domain)?,
            g1: Arc::new(|_: &S| S::one()),
            g2: Arc::new(|t: &S| t.clone()),
            g1_prime: Arc::new(|_: &S| S::zero()),
            g2_prime: Arc::new(|_: &S| S::one()),
            d_closed: Some(Arc::new(|x1: &S, x2: &S| x2.clone() - x1.clone())),
            w_antideriv: Arc::new(|t: &S| t.clone()),
            unit_coeffs: Some((S::one(), S::zero())),
            rule: DerivRule::Unital {
                c1: S::one(),
                c2: S::zero(),
            },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> PresetKind {
        self.kind
    }

    pub fn params(&self) -> PresetParams {
        self.params
    }

    pub fn domain(&self) -> (&S, &S) {
        (&self.domain.0, &self.domain.1)
    }

    pub fn domain_midpoint(&self) -> S {
        midpoint(&self.domain.0, &self.domain.1)
    }

    /// Unit coefficients `(c1, c2)` with `c1*g1 + c2*g2 = 1`, present exactly
    /// when the constant function lies in the generator span.
    pub fn unit_coeffs(&self) -> Option<(&S, &S)> {
        self.unit_coeffs.as_ref().map(|(a, b)| (a, b))
    }

    pub fn is_unital(&self) -> bool {
        self.unit_coeffs.is_some()
    }

    pub fn deriv_rule(&self) -> &DerivRule<S> {
        &self.rule
    }

    pub fn gamma1(&self, t: &S) -> S {
        (self.g1)(t)
    }

    pub fn gamma2(&self, t: &S) -> S {
        (self.g2)(t)
    }

    pub fn gamma1_prime(&self, t: &S) -> S {
        (self.g1_prime)(t)
    }

    pub fn gamma2_prime(&self, t: &S) -> S {
        (self.g2_prime)(t)
    }

    pub fn contains(&self, t: &S) -> bool {
        *t >= self.domain.0 && *t <= self.domain.1
    }

    pub fn check_domain(&self, t: &S) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain {
                value: t.approx_f64(),
                lo: self.domain.0.approx_f64(),
                hi: self.domain.1.approx_f64(),
            })
        }
    }

    /// The kernel `d(x1, x2) = g1(x1) g2(x2) - g1(x2) g2(x1)`.
    ///
    /// Antisymmetric, zero on the diagonal, and nonzero for distinct
    /// arguments on a valid domain. Uses the preset's closed form when one
    /// is installed (e.g. `sin(x2 - x1)` for the trig pair).
    pub fn d_fn(&self, x1: &S, x2: &S) -> Result<S> {
        self.check_domain(x1)?;
        self.check_domain(x2)?;
        Ok(self.d_unchecked(x1, x2))
    }

    pub(crate) fn d_unchecked(&self, x1: &S, x2: &S) -> S {
        match &self.d_closed {
            Some(rule) => rule(x1, x2),
            None => self.d_generic(x1, x2),
        }
    }

    /// The defining product difference, bypassing any closed form.
    pub fn d_generic(&self, x1: &S, x2: &S) -> S {
        self.gamma1(x1) * self.gamma2(x2) - self.gamma1(x2) * self.gamma2(x1)
    }

    /// `W(x) = g1(x) g2'(x) - g1'(x) g2(x)`; errors when singular.
    pub fn wronskian(&self, x: &S) -> Result<S> {
        self.check_domain(x)?;
        let w = self.wronskian_unchecked(x);
        if wronskian_singular(&w) {
            return Err(Error::SingularWronskian {
                at: x.approx_f64(),
                wronskian: w.approx_f64(),
            });
        }
        Ok(w)
    }

    pub fn wronskian_unchecked(&self, x: &S) -> S {
        self.gamma1(x) * self.gamma2_prime(x) - self.gamma1_prime(x) * self.gamma2(x)
    }

    /// `int_t^x W(u) du`, from the preset's closed-form antiderivative of
    /// the Wronskian. For unital systems this equals `d(t, x)`.
    pub fn omega(&self, t: &S, x: &S) -> S {
        (self.w_antideriv)(x) - (self.w_antideriv)(t)
    }

    /// The pair `(D g1(a), D g2(a)) = (g1'(a), g2'(a)) / W(a)` used as a
    /// blossom argument in the differentiation identities. Constant
    /// `(-c2, c1)` on unital systems.
    pub fn delta_pair(&self, a: &S) -> Result<HomPoint<S>> {
        let w = self.wronskian(a)?;
        Ok(HomPoint::new(
            self.gamma1_prime(a) / w.clone(),
            self.gamma2_prime(a) / w,
        ))
    }

    /// The diagonal embedding `t -> (g1(t), g2(t))`.
    pub fn curve_point(&self, t: &S) -> HomPoint<S> {
        HomPoint::new(self.gamma1(t), self.gamma2(t))
    }

    /// Grid validation of the construction invariants: nonsingular Wronskian
    /// everywhere, and the unit identity when unit coefficients are present.
    pub fn validate_grid(&self, samples: usize) -> Result<()> {
        let n = samples.max(2);
        let lo = self.domain.0.clone();
        let span = self.domain.1.clone() - lo.clone();
        for i in 0..n {
            let t = lo.clone() + span.clone() * S::from_ratio(i as i64, (n - 1) as i64);
            let w = self.wronskian_unchecked(&t);
            if wronskian_singular(&w) {
                return Err(Error::SingularWronskian {
                    at: t.approx_f64(),
                    wronskian: w.approx_f64(),
                });
            }
            if let Some((c1, c2)) = &self.unit_coeffs {
                let unit = c1.clone() * self.gamma1(&t) + c2.clone() * self.gamma2(&t) - S::one();
                if unit.abs().approx_f64() > 1e-12 {
                    return Err(Error::Preset(format!(
                        "unit coefficients fail at t = {}: residual {:e}",
                        t.approx_f64(),
                        unit.approx_f64()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> SystemSpec {
        SystemSpec {
            preset: self.kind.name().to_string(),
            params: self.params,
            domain: [self.domain.0.to_json(), self.domain.1.to_json()],
        }
    }
}

fn wronskian_singular<S: Scalar>(w: &S) -> bool {
    if S::EXACT {
        w.is_zero()
    } else {
        w.abs().approx_f64() < WRONSKIAN_MIN
    }
}

fn checked_domain<S: Scalar>(domain: (S, S)) -> Result<(S, S)> {
    if domain.0 < domain.1 {
        Ok(domain)
    } else {
        Err(Error::Preset(format!(
            "empty domain [{}, {}]",
            domain.0.approx_f64(),
            domain.1.approx_f64()
        )))
    }
}

impl<S: RealScalar> GammaSystem<S> {
    /// Builds any preset. `domain: None` selects the preset's default
    /// interval. Exact-mode construction goes through
    /// [`GammaSystem::polynomial`] instead, since only the classical pair
    /// evaluates rationally.
    pub fn make_preset(
        kind: PresetKind,
        params: PresetParams,
        domain: Option<(S, S)>,
    ) -> Result<Self> {
        let dom = |default: (f64, f64)| -> (S, S) {
            domain.clone().unwrap_or_else(|| {
                (
                    S::from(default.0).unwrap(),
                    S::from(default.1).unwrap(),
                )
            })
        };
        match kind {
            PresetKind::Polynomial => Self::polynomial(dom((-1.0, 1.0))),
            PresetKind::Trig => Self::trig(dom((0.0, 1.5))),
            PresetKind::Hyperbolic => Self::hyperbolic(dom((-1.0, 1.0))),
            PresetKind::Muntz => Self::muntz(
                params.p.unwrap_or(1.0),
                params.q.unwrap_or(2.0),
                dom((0.5, 2.0)),
            ),
            PresetKind::UnitalSine => Self::unital_sine(dom((-1.2, 1.2))),
            PresetKind::UnitalTanh => Self::unital_tanh(dom((-2.0, 2.0))),
            PresetKind::UnitalMuntz => Self::unital_muntz(params.q.unwrap_or(2.0), dom((0.5, 2.0))),
        }
    }

    /// `(cos, sin)`. The domain must be shorter than pi so that
    /// `d(x1, x2) = sin(x2 - x1)` cannot vanish for distinct nodes.
    pub fn trig(domain: (S, S)) -> Result<Self> {
        let domain = checked_domain(domain)?;
        let len = (domain.1 - domain.0).approx_f64();
        if len >= std::f64::consts::PI {
            return Err(Error::Preset(format!(
                "trig domain length {len} must be strictly less than pi"
            )));
        }
        let sys = GammaSystem {
            name: "trig".to_string(),
            kind: PresetKind::Trig,
            params: PresetParams::default(),
            domain,
            g1: Arc::new(|t: &S| t.cos()),
            g2: Arc::new(|t: &S| t.sin()),
            g1_prime: Arc::new(|t: &S| -t.sin()),
            g2_prime: Arc::new(|t: &S| t.cos()),
            d_closed: Some(Arc::new(|x1: &S, x2: &S| (*x2 - *x1).sin())),
            w_antideriv: Arc::new(|t: &S| *t),
            unit_coeffs: None,
            rule: DerivRule::Rotational { hyperbolic: false },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }

    /// `(cosh, sinh)`; Wronskian is identically one.
    pub fn hyperbolic(domain: (S, S)) -> Result<Self> {
        let sys = GammaSystem {
            name: "hyperbolic".to_string(),
            kind: PresetKind::Hyperbolic,
            params: PresetParams::default(),
            domain: checked_domain(domain)?,
            g1: Arc::new(|t: &S| t.cosh()),
            g2: Arc::new(|t: &S| t.sinh()),
            g1_prime: Arc::new(|t: &S| t.sinh()),
            g2_prime: Arc::new(|t: &S| t.cosh()),
            d_closed: Some(Arc::new(|x1: &S, x2: &S| (*x2 - *x1).sinh())),
            w_antideriv: Arc::new(|t: &S| *t),
            unit_coeffs: None,
            rule: DerivRule::Rotational { hyperbolic: true },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }

    /// `(x^p, x^q)` with `p < q` on a positive interval.
    pub fn muntz(p: f64, q: f64, domain: (S, S)) -> Result<Self> {
        let domain = checked_domain(domain)?;
        if q <= p {
            return Err(Error::Preset(format!("muntz needs p < q, got p={p}, q={q}")));
        }
        if domain.0 <= S::zero() {
            return Err(Error::Preset(
                "muntz domain must be strictly positive".to_string(),
            ));
        }
        let (ps, qs) = (S::from(p).unwrap(), S::from(q).unwrap());
        let scale = S::from((q - p) / (p + q)).unwrap();
        let sum = S::from(p + q).unwrap();
        let sys = GammaSystem {
            name: format!("muntz(p={p},q={q})"),
            kind: PresetKind::Muntz,
            params: PresetParams {
                p: Some(p),
                q: Some(q),
            },
            domain,
            g1: Arc::new(move |t: &S| t.powf(ps)),
            g2: Arc::new(move |t: &S| t.powf(qs)),
            g1_prime: Arc::new(move |t: &S| ps * t.powf(ps - S::one())),
            g2_prime: Arc::new(move |t: &S| qs * t.powf(qs - S::one())),
            d_closed: None,
            w_antideriv: Arc::new(move |t: &S| scale * t.powf(sum)),
            unit_coeffs: None,
            rule: DerivRule::PowerLattice { p, q },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }

    /// `(1, sin)`; the domain must stay inside `(-pi/2, pi/2)` so the
    /// Wronskian `cos` keeps its sign.
    pub fn unital_sine(domain: (S, S)) -> Result<Self> {
        let domain = checked_domain(domain)?;
        let half_pi = std::f64::consts::FRAC_PI_2;
        if domain.0.approx_f64() <= -half_pi || domain.1.approx_f64() >= half_pi {
            return Err(Error::Preset(
                "unital_sine domain must lie strictly inside (-pi/2, pi/2)".to_string(),
            ));
        }
        let sys = GammaSystem {
            name: "unital_sine".to_string(),
            kind: PresetKind::UnitalSine,
            params: PresetParams::default(),
            domain,
            g1: Arc::new(|_: &S| S::one()),
            g2: Arc::new(|t: &S| t.sin()),
            g1_prime: Arc::new(|_: &S| S::zero()),
            g2_prime: Arc::new(|t: &S| t.cos()),
            d_closed: Some(Arc::new(|x1: &S, x2: &S| x2.sin() - x1.sin())),
            w_antideriv: Arc::new(|t: &S| t.sin()),
            unit_coeffs: Some((S::one(), S::zero())),
            rule: DerivRule::Unital {
                c1: S::one(),
                c2: S::zero(),
            },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }

    /// `(1, tanh)`; valid on any interval.
    pub fn unital_tanh(domain: (S, S)) -> Result<Self> {
        let sys = GammaSystem {
            name: "unital_tanh".to_string(),
            kind: PresetKind::UnitalTanh,
            params: PresetParams::default(),
            domain: checked_domain(domain)?,
            g1: Arc::new(|_: &S| S::one()),
            g2: Arc::new(|t: &S| t.tanh()),
            g1_prime: Arc::new(|_: &S| S::zero()),
            g2_prime: Arc::new(|t: &S| {
                let c = t.cosh();
                (c * c).recip()
            }),
            d_closed: Some(Arc::new(|x1: &S, x2: &S| x2.tanh() - x1.tanh())),
            w_antideriv: Arc::new(|t: &S| t.tanh()),
            unit_coeffs: Some((S::one(), S::zero())),
            rule: DerivRule::Unital {
                c1: S::one(),
                c2: S::zero(),
            },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }

    /// `(1, x^q)` with `q > 0` on a positive interval.
    pub fn unital_muntz(q: f64, domain: (S, S)) -> Result<Self> {
        let domain = checked_domain(domain)?;
        if q <= 0.0 {
            return Err(Error::Preset(format!("unital_muntz needs q > 0, got {q}")));
        }
        if domain.0 <= S::zero() {
            return Err(Error::Preset(
                "unital_muntz domain must be strictly positive".to_string(),
            ));
        }
        let qs = S::from(q).unwrap();
        let sys = GammaSystem {
            name: format!("unital_muntz(q={q})"),
            kind: PresetKind::UnitalMuntz,
            params: PresetParams {
                p: None,
                q: Some(q),
            },
            domain,
            g1: Arc::new(|_: &S| S::one()),
            g2: Arc::new(move |t: &S| t.powf(qs)),
            g1_prime: Arc::new(|_: &S| S::zero()),
            g2_prime: Arc::new(move |t: &S| qs * t.powf(qs - S::one())),
            d_closed: Some(Arc::new(move |x1: &S, x2: &S| {
                x2.powf(qs) - x1.powf(qs)
            })),
            w_antideriv: Arc::new(move |t: &S| t.powf(qs)),
            unit_coeffs: Some((S::one(), S::zero())),
            rule: DerivRule::Unital {
                c1: S::one(),
                c2: S::zero(),
            },
        };
        sys.validate_grid(1000)?;
        Ok(sys)
    }
}

/// Serializable description of a system: preset name, parameters, domain.
/// Round-trips through JSON; rebuilding re-runs preset validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemSpec {
    pub preset: String,
    #[serde(default)]
    pub params: PresetParams,
    pub domain: [serde_json::Value; 2],
}

impl SystemSpec {
    pub fn build<S: RealScalar>(&self) -> Result<GammaSystem<S>> {
        let kind = PresetKind::parse(&self.preset)?;
        let domain = self.parsed_domain::<S>()?;
        GammaSystem::make_preset(kind, self.params, Some(domain))
    }

    /// Exact-mode build; only the polynomial preset evaluates rationally.
    pub fn build_exact(&self) -> Result<GammaSystem<Rational>> {
        let kind = PresetKind::parse(&self.preset)?;
        if kind != PresetKind::Polynomial {
            return Err(Error::Unsupported(format!(
                "exact mode supports only the polynomial preset, got {kind}"
            )));
        }
        GammaSystem::polynomial(self.parsed_domain::<Rational>()?)
    }

    fn parsed_domain<S: Scalar>(&self) -> Result<(S, S)> {
        let lo = S::from_json(&self.domain[0]).map_err(Error::Input)?;
        let hi = S::from_json(&self.domain[1]).map_err(Error::Input)?;
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use num_traits::One;
    use rand::Rng;
    use rand::SeedableRng;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn polynomial_preset_has_unit_wronskian() {
        let sys = GammaSystem::<f64>::polynomial((-5.0, 5.0)).unwrap();
        for x in [-5.0, -1.3, 0.0, 2.0, 5.0] {
            assert_eq!(sys.wronskian(&x).unwrap(), 1.0);
        }
        let exact = GammaSystem::<Rational>::polynomial((rat(-5, 1), rat(5, 1))).unwrap();
        assert_eq!(exact.wronskian(&rat(2, 1)).unwrap(), Rational::one());
    }

    #[test]
    fn trig_preset_has_unit_wronskian() {
        let sys = GammaSystem::<f64>::trig((0.0, 1.5)).unwrap();
        for i in 0..20 {
            let x = 1.5 * i as f64 / 19.0;
            assert!((sys.wronskian(&x).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unital_muntz_wronskian_is_power() {
        let sys = GammaSystem::<f64>::unital_muntz(3.0, (0.5, 3.0)).unwrap();
        assert!((sys.wronskian(&2.0).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn d_fn_examples() {
        let poly = GammaSystem::<f64>::polynomial((0.0, 10.0)).unwrap();
        assert_eq!(poly.d_fn(&2.0, &5.0).unwrap(), 3.0);
        assert_eq!(poly.d_fn(&4.0, &4.0).unwrap(), 0.0);

        let trig = GammaSystem::<f64>::trig((0.0, 1.6)).unwrap();
        let v = trig.d_fn(&0.0, &std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn d_fn_rejects_out_of_domain() {
        let poly = GammaSystem::<f64>::polynomial((0.0, 1.0)).unwrap();
        assert!(matches!(
            poly.d_fn(&0.5, &2.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn d_is_antisymmetric_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for sys in [
            GammaSystem::<f64>::trig((0.0, 1.5)).unwrap(),
            GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap(),
            GammaSystem::<f64>::muntz(1.0, 2.0, (0.5, 2.0)).unwrap(),
        ] {
            let (lo, hi) = sys.domain();
            for _ in 0..1000 {
                let x1 = rng.random_range(*lo..*hi);
                let x2 = rng.random_range(*lo..*hi);
                let fwd = sys.d_fn(&x1, &x2).unwrap();
                let bwd = sys.d_fn(&x2, &x1).unwrap();
                assert!((fwd + bwd).abs() <= 1e-15 * fwd.abs().max(1.0));
            }
        }
        // exact mode: antisymmetry is literal
        let exact = GammaSystem::<Rational>::polynomial((rat(-3, 1), rat(3, 1))).unwrap();
        let a = rat(1, 3);
        let b = rat(-5, 7);
        assert_eq!(
            exact.d_fn(&a, &b).unwrap() + exact.d_fn(&b, &a).unwrap(),
            Rational::from_int(0)
        );
    }

    #[test]
    fn closed_form_d_matches_generic() {
        for sys in [
            GammaSystem::<f64>::trig((0.1, 1.4)).unwrap(),
            GammaSystem::<f64>::hyperbolic((-1.0, 1.0)).unwrap(),
            GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap(),
        ] {
            let (lo, hi) = sys.domain();
            for i in 0..30 {
                for j in 0..30 {
                    let x1 = lo + (hi - lo) * i as f64 / 29.0;
                    let x2 = lo + (hi - lo) * j as f64 / 29.0;
                    let a = sys.d_unchecked(&x1, &x2);
                    let b = sys.d_generic(&x1, &x2);
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn d_never_vanishes_for_distinct_interior_pairs() {
        for sys in [
            GammaSystem::<f64>::trig((0.0, 1.5)).unwrap(),
            GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap(),
            GammaSystem::<f64>::muntz(0.5, 2.5, (0.5, 2.0)).unwrap(),
        ] {
            let (lo, hi) = sys.domain();
            let n = 60;
            for i in 0..n {
                for j in (i + 1)..n {
                    let x1 = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
                    let x2 = lo + (hi - lo) * (j as f64 + 0.5) / n as f64;
                    assert!(sys.d_fn(&x1, &x2).unwrap().abs() > 0.0);
                }
            }
        }
    }

    #[test]
    fn delta_pair_examples() {
        let poly = GammaSystem::<f64>::polynomial((-2.0, 2.0)).unwrap();
        let d = poly.delta_pair(&0.7).unwrap();
        assert_eq!((d.x, d.w), (0.0, 1.0));

        let trig = GammaSystem::<f64>::trig((0.0, 1.5)).unwrap();
        let d = trig.delta_pair(&0.0).unwrap();
        assert!((d.x - 0.0).abs() < 1e-15 && (d.w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unital_delta_pair_is_constant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for sys in [
            GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap(),
            GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap(),
            GammaSystem::<f64>::unital_muntz(2.0, (0.5, 2.0)).unwrap(),
        ] {
            let (c1, c2) = sys.unit_coeffs().unwrap();
            let (expect_x, expect_w) = (-c2, *c1);
            let (lo, hi) = sys.domain();
            for _ in 0..10 {
                let a = rng.random_range(*lo..*hi);
                let d = sys.delta_pair(&a).unwrap();
                assert!((d.x - expect_x).abs() < 1e-12);
                assert!((d.w - expect_w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn preset_validation_errors() {
        assert!(GammaSystem::<f64>::trig((0.0, 3.2)).is_err());
        assert!(GammaSystem::<f64>::muntz(2.0, 1.0, (0.5, 2.0)).is_err());
        assert!(GammaSystem::<f64>::muntz(0.5, 1.5, (-1.0, 2.0)).is_err());
        assert!(GammaSystem::<f64>::unital_muntz(2.0, (0.0, 2.0)).is_err());
        assert!(GammaSystem::<f64>::polynomial((1.0, 1.0)).is_err());
    }

    #[test]
    fn system_spec_round_trips() {
        let sys = GammaSystem::<f64>::muntz(1.0, 2.5, (0.5, 2.0)).unwrap();
        let text = serde_json::to_string(&sys.spec()).unwrap();
        let spec: SystemSpec = serde_json::from_str(&text).unwrap();
        let back: GammaSystem<f64> = spec.build().unwrap();
        assert_eq!(sys, back);

        let exact = GammaSystem::<Rational>::polynomial((rat(-1, 2), rat(3, 2))).unwrap();
        let text = serde_json::to_string(&exact.spec()).unwrap();
        let spec: SystemSpec = serde_json::from_str(&text).unwrap();
        let back = spec.build_exact().unwrap();
        assert_eq!(exact, back);
        assert!(spec.build_exact().is_ok());

        let trig_spec = GammaSystem::<f64>::trig((0.0, 1.5)).unwrap().spec();
        assert!(trig_spec.build_exact().is_err());
    }

    #[test]
    fn omega_is_wronskian_antiderivative() {
        for sys in [
            GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap(),
            GammaSystem::<f64>::muntz(1.0, 2.0, (0.5, 2.0)).unwrap(),
            GammaSystem::<f64>::hyperbolic((-1.0, 1.0)).unwrap(),
        ] {
            let (lo, hi) = sys.domain();
            let t = lo + 0.25 * (hi - lo);
            let x = lo + 0.8 * (hi - lo);
            let quad = crate::quad::integrate(
                |u| sys.wronskian_unchecked(&u),
                t,
                x,
                1e-12,
            )
            .unwrap();
            assert!((sys.omega(&t, &x) - quad).abs() < 1e-10);
        }
    }
}
