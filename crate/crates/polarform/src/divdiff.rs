//! Non-polynomial divided differences with confluent nodes, the
//! divided-difference table, and Newton-form interpolation.
//!
//! Distinct nodes follow the defining recursion literally: the first
//! numerator term omits the second-to-last node, the second omits the last,
//! and the denominator is `d(second_to_last, last)`. No symmetry is assumed
//! anywhere on that path — for non-unital systems symmetry is a measurement,
//! not an axiom. Confluent clusters switch to a Hermite-style table whose
//! all-equal windows are seeded with `D^n f(x0) / n!`.

use std::sync::Arc;



use crate::gamma::GammaSystem;
use crate::identity::IdentityReport;
use crate::pi::PiElement;
use crate::scalar::{factorial, Scalar};
use crate::{Error, Result};

/// Default coincidence tolerance for node clustering (float mode).
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// Divided-difference abscissas with derived multiplicities.
///
/// Clustering sorts the values and merges runs within the coincidence
/// tolerance (literal equality in exact mode), so the resulting multiset of
/// `(value, multiplicity)` clusters does not depend on input order.
#[derive(Debug, Clone)]
pub struct NodeList<S: Scalar> {
    nodes: Vec<S>,
    tol: f64,
    clusters: Vec<(S, usize)>,
}

impl<S: Scalar> NodeList<S> {
    pub fn new(nodes: Vec<S>) -> Result<Self> {
        Self::with_tolerance(nodes, COINCIDENCE_TOL)
    }

    pub fn with_tolerance(nodes: Vec<S>, tol: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyNodes);
        }
        let mut sorted = nodes.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("nodes must be ordered"));
        let mut clusters: Vec<(S, usize)> = Vec::new();
        for value in sorted {
            match clusters.last_mut() {
                Some((rep, count)) if coincides(rep, &value, tol) => *count += 1,
                _ => clusters.push((value, 1)),
            }
        }
        Ok(NodeList {
            nodes,
            tol,
            clusters,
        })
    }

    /// Nodes in their original input order.
    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `(value, multiplicity)` clusters in ascending value order.
    pub fn clusters(&self) -> &[(S, usize)] {
        &self.clusters
    }

    pub fn max_multiplicity(&self) -> usize {
        self.clusters.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }

    pub fn has_confluent(&self) -> bool {
        self.max_multiplicity() > 1
    }

    /// Cluster representatives repeated by multiplicity, ascending — the
    /// node sequence used by the Hermite-style table.
    pub fn expanded(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.len());
        for (rep, mult) in &self.clusters {
            for _ in 0..*mult {
                out.push(rep.clone());
            }
        }
        out
    }
}

fn coincides<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.clone() - b.clone()).abs().approx_f64() <= tol
    }
}

/// What a divided difference gets applied to: an exact element of the
/// generator space, or a plain function with an optional generalized
/// derivative oracle for confluent nodes.
#[derive(Clone)]
pub enum Evaluand<S: Scalar> {
    Pi(PiElement<S>),
    Func(FuncEvaluand<S>),
}

#[derive(Clone)]
pub struct FuncEvaluand<S: Scalar> {
    pub value: Arc<dyn Fn(&S) -> S + Send + Sync>,
    /// `(x, k) -> D^k f(x)`; `None` limits the evaluand to distinct nodes.
    pub gen_derivs: Option<Arc<dyn Fn(&S, usize) -> Result<S> + Send + Sync>>,
    pub max_order: usize,
}

impl<S: Scalar> Evaluand<S> {
    pub fn from_pi(elem: PiElement<S>) -> Self {
        Evaluand::Pi(elem)
    }

    pub fn from_fn(value: impl Fn(&S) -> S + Send + Sync + 'static) -> Self {
        Evaluand::Func(FuncEvaluand {
            value: Arc::new(value),
            gen_derivs: None,
            max_order: 0,
        })
    }

    pub fn from_fn_with_derivs(
        value: impl Fn(&S) -> S + Send + Sync + 'static,
        gen_derivs: impl Fn(&S, usize) -> Result<S> + Send + Sync + 'static,
        max_order: usize,
    ) -> Self {
        Evaluand::Func(FuncEvaluand {
            value: Arc::new(value),
            gen_derivs: Some(Arc::new(gen_derivs)),
            max_order,
        })
    }

    fn check_system(&self, sys: &GammaSystem<S>) -> Result<()> {
        match self {
            Evaluand::Pi(f) if f.system() != sys => Err(Error::SystemMismatch(
                f.system().name().to_string(),
                sys.name().to_string(),
            )),
            _ => Ok(()),
        }
    }

    pub fn value(&self, t: &S) -> S {
        match self {
            Evaluand::Pi(f) => f.eval_unchecked(t),
            Evaluand::Func(f) => (f.value)(t),
        }
    }

    /// `D^k` of the evaluand at `t`; errors when the function path lacks
    /// derivative data of the requested order.
    pub fn gen_derivative_at(&self, t: &S, k: usize) -> Result<S> {
        if k == 0 {
            return Ok(self.value(t));
        }
        match self {
            Evaluand::Pi(f) => Ok(f.gen_derivative(k)?.eval_unchecked(t)),
            Evaluand::Func(f) => match &f.gen_derivs {
                Some(oracle) if k <= f.max_order => oracle(t, k),
                _ => Err(Error::InsufficientDerivatives {
                    need: k,
                    have: f.max_order,
                }),
            },
        }
    }
}

/// The full triangular divided-difference table.
///
/// `table[n][j] = f[x_j, ..., x_{j+n}]`, so column 0 holds the raw values
/// and `table[N][0]` is the divided difference over all nodes. With
/// confluent clusters the node sequence is the clustered, ascending one
/// from [`NodeList::expanded`].
pub fn divdiff_table<S: Scalar>(
    sys: &GammaSystem<S>,
    f: &Evaluand<S>,
    nodes: &NodeList<S>,
) -> Result<Vec<Vec<S>>> {
    f.check_system(sys)?;
    for x in nodes.nodes() {
        sys.check_domain(x)?;
    }
    if nodes.has_confluent() {
        hermite_table(sys, f, nodes)
    } else {
        literal_table(sys, f, nodes.nodes(), nodes.tolerance())
    }
}

/// The order-`(len-1)` divided difference over all nodes.
pub fn divdiff<S: Scalar>(
    sys: &GammaSystem<S>,
    f: &Evaluand<S>,
    nodes: &NodeList<S>,
) -> Result<S> {
    let table = divdiff_table(sys, f, nodes)?;
    Ok(table.last().expect("nonempty table")[0].clone())
}

/// Literal recursion on distinct nodes, one pass per suffix.
///
/// For the suffix starting at `j0`, the running vector starts at raw values
/// and stage `k` replaces `c[j]` (j >= k) with the divided difference over
/// `[y_0..y_{k-1}, y_j]`; after all stages `c[n]` is `f[y_0, ..., y_n]`.
fn literal_table<S: Scalar>(
    sys: &GammaSystem<S>,
    f: &Evaluand<S>,
    nodes: &[S],
    tol: f64,
) -> Result<Vec<Vec<S>>> {
    let n = nodes.len();
    let mut table: Vec<Vec<S>> = (0..n).map(|order| vec![S::zero(); n - order]).collect();
    for j0 in 0..n {
        let suffix = &nodes[j0..];
        let m = suffix.len();
        let mut c: Vec<S> = suffix.iter().map(|x| f.value(x)).collect();
        table[0][j0] = c[0].clone();
        for k in 1..m {
            let pivot = c[k - 1].clone();
            let y_prev = &suffix[k - 1];
            for j in k..m {
                let den = checked_d(sys, y_prev, &suffix[j], tol)?;
                c[j] = (c[j].clone() - pivot.clone()) / den;
            }
            table[k][j0] = c[k].clone();
        }
    }
    Ok(table)
}

fn checked_d<S: Scalar>(sys: &GammaSystem<S>, x1: &S, x2: &S, tol: f64) -> Result<S> {
    let den = sys.d_unchecked(x1, x2);
    let bad = if S::EXACT {
        den.is_zero()
    } else {
        den.abs().approx_f64() <= tol
    };
    if bad {
        return Err(Error::IllConditioned {
            x1: x1.approx_f64(),
            x2: x2.approx_f64(),
            d: den.approx_f64(),
        });
    }
    Ok(den)
}

/// Hermite-style table over the clustered ascending sequence: all-equal
/// windows are seeded from the differentiation rule
/// `f[x0,...,x0] = D^n f(x0) / n!`, everything else uses the two
/// sub-windows that drop one endpoint each.
fn hermite_table<S: Scalar>(
    sys: &GammaSystem<S>,
    f: &Evaluand<S>,
    nodes: &NodeList<S>,
) -> Result<Vec<Vec<S>>> {
    let z = nodes.expanded();
    let n = z.len();
    let mut cluster_of = vec![0usize; n];
    {
        let mut idx = 0;
        let mut pos = 0;
        for (c, (_, mult)) in nodes.clusters().iter().enumerate() {
            for _ in 0..*mult {
                cluster_of[pos] = c;
                pos += 1;
            }
            idx += 1;
        }
        debug_assert_eq!(idx, nodes.clusters().len());
    }
    let mut table: Vec<Vec<S>> = (0..n).map(|order| vec![S::zero(); n - order]).collect();
    for j in 0..n {
        table[0][j] = f.value(&z[j]);
    }
    for order in 1..n {
        for j in 0..(n - order) {
            let hi = j + order;
            table[order][j] = if cluster_of[j] == cluster_of[hi] {
                f.gen_derivative_at(&z[j], order)? / factorial::<S>(order)
            } else {
                let den = checked_d(sys, &z[j], &z[hi], nodes.tolerance())?;
                (table[order - 1][j + 1].clone() - table[order - 1][j].clone()) / den
            };
        }
    }
    Ok(table)
}

/// Interpolant in generalized Newton form:
/// `p(x) = sum_k c_k prod_{i<k} d(x_i, x)`.
#[derive(Debug, Clone)]
pub struct NewtonForm<S: Scalar> {
    sys: GammaSystem<S>,
    nodes: Vec<S>,
    coeffs: Vec<S>,
}

impl<S: Scalar> NewtonForm<S> {
    pub fn coefficients(&self) -> &[S] {
        &self.coeffs
    }

    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    pub fn eval(&self, t: &S) -> Result<S> {
        self.sys.check_domain(t)?;
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for k in (0..self.coeffs.len() - 1).rev() {
            acc = acc * self.sys.d_unchecked(&self.nodes[k], t) + self.coeffs[k].clone();
        }
        Ok(acc)
    }

    /// The interpolant as an element of the generator space.
    pub fn to_pi_element(&self) -> Result<PiElement<S>> {
        let mut acc = PiElement::constant(&self.sys, self.coeffs[0].clone());
        let mut basis = PiElement::one(&self.sys);
        for k in 1..self.coeffs.len() {
            basis = basis.multiply_linear_factor(&self.sys.curve_point(&self.nodes[k - 1]));
            let term = basis.scale(&self.coeffs[k]);
            // promote acc to the new degree by multiplying with the unit
            acc = promote(&acc, term.degree())?.add(&term)?;
        }
        Ok(acc)
    }
}

fn promote<S: Scalar>(f: &PiElement<S>, degree: usize) -> Result<PiElement<S>> {
    if f.degree() == degree {
        return Ok(f.clone());
    }
    let unit = PiElement::unit_power(f.system(), degree - f.degree())?;
    f.multiply(&unit)
}

/// Newton interpolation through distinct samples. Coefficient `k` is the
/// divided difference over the first `k+1` nodes.
pub fn newton_interpolate<S: Scalar>(
    sys: &GammaSystem<S>,
    samples: &[(S, S)],
) -> Result<NewtonForm<S>> {
    if samples.is_empty() {
        return Err(Error::EmptyNodes);
    }
    let nodes: Vec<S> = samples.iter().map(|(x, _)| x.clone()).collect();
    let list = NodeList::new(nodes.clone())?;
    if list.has_confluent() {
        let dup = list
            .clusters()
            .iter()
            .find(|(_, m)| *m > 1)
            .expect("confluent cluster");
        return Err(Error::DuplicateNodes(dup.0.approx_f64()));
    }
    for x in &nodes {
        sys.check_domain(x)?;
    }
    let mut c: Vec<S> = samples.iter().map(|(_, y)| y.clone()).collect();
    let m = c.len();
    for k in 1..m {
        let pivot = c[k - 1].clone();
        for j in k..m {
            let den = checked_d(sys, &nodes[k - 1], &nodes[j], list.tolerance())?;
            c[j] = (c[j].clone() - pivot.clone()) / den;
        }
    }
    Ok(NewtonForm {
        sys: sys.clone(),
        nodes,
        coeffs: c,
    })
}

/// Cancellation check: `{d(extra, .) f}[nodes, extra]` against `f[nodes]`.
/// Both sides are computed and reported; nothing is asserted here.
pub fn check_cancellation<S: Scalar>(
    sys: &GammaSystem<S>,
    f: &PiElement<S>,
    nodes: &NodeList<S>,
    extra: &S,
    tol: f64,
) -> Result<IdentityReport<S>> {
    sys.check_domain(extra)?;
    let weighted = f.multiply_linear_factor(&sys.curve_point(extra));
    let mut extended = nodes.nodes().to_vec();
    extended.push(extra.clone());
    let extended = NodeList::with_tolerance(extended, nodes.tolerance())?;
    let lhs = divdiff(sys, &Evaluand::from_pi(weighted), &extended)?;
    let rhs = divdiff(sys, &Evaluand::from_pi(f.clone()), nodes)?;
    Ok(IdentityReport::resolved_same_as_paper(
        "cancellation_dd",
        format!(
            "sys={}; nodes={:?}; extra={}",
            sys.name(),
            nodes.nodes().iter().map(|x| x.approx_f64()).collect::<Vec<_>>(),
            extra.approx_f64()
        ),
        lhs,
        rhs,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn poly() -> GammaSystem<f64> {
        GammaSystem::<f64>::polynomial((-10.0, 10.0)).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    /// Literal recursion, straight off the definition: the first term drops
    /// the second-to-last node, the second drops the last. Exponential; test
    /// oracle only.
    fn raw_recursion<S: Scalar>(sys: &GammaSystem<S>, f: &dyn Fn(&S) -> S, nodes: &[S]) -> S {
        let n = nodes.len();
        if n == 1 {
            return f(&nodes[0]);
        }
        let mut drop_second_last = nodes.to_vec();
        drop_second_last.remove(n - 2);
        let first = raw_recursion(sys, f, &drop_second_last);
        let second = raw_recursion(sys, f, &nodes[..n - 1]);
        (first - second) / sys.d_unchecked(&nodes[n - 2], &nodes[n - 1])
    }

    #[test]
    fn classical_table_for_x_squared() {
        let sys = poly();
        let f = Evaluand::from_pi(PiElement::new(&sys, vec![0.0, 0.0, 1.0]).unwrap());
        let nodes = NodeList::new(vec![0.0, 1.0, 2.0]).unwrap();
        let table = divdiff_table(&sys, &f, &nodes).unwrap();
        assert_eq!(table[0], vec![0.0, 1.0, 4.0]);
        assert_eq!(table[1], vec![1.0, 3.0]);
        assert_eq!(table[2], vec![1.0]);

        let nodes = NodeList::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(divdiff(&sys, &f, &nodes).unwrap(), 1.0);
    }

    #[test]
    fn single_node_table_is_value() {
        let sys = poly();
        let f = Evaluand::from_pi(PiElement::new(&sys, vec![2.0, 1.0]).unwrap());
        let nodes = NodeList::new(vec![3.0]).unwrap();
        let table = divdiff_table(&sys, &f, &nodes).unwrap();
        assert_eq!(table, vec![vec![5.0]]);
    }

    #[test]
    fn two_equal_nodes_give_the_derivative() {
        let sine = GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap();
        let f = PiElement::new(&sine, vec![0.0, 0.0, 1.0]).unwrap(); // sin^2
        let x0 = 0.4;
        let expect = f.gen_derivative(1).unwrap().eval(&x0).unwrap();
        let nodes = NodeList::new(vec![x0, x0]).unwrap();
        let got = divdiff(&sine, &Evaluand::from_pi(f), &nodes).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn sin_squared_matches_raw_recursion_oracle() {
        let sine = GammaSystem::<f64>::unital_sine((-1.3, 1.3)).unwrap();
        let f = PiElement::new(&sine, vec![0.0, 0.0, 1.0]).unwrap();
        let nodes_raw = vec![0.0, std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3];
        let oracle = raw_recursion(&sine, &|t| t.sin() * t.sin(), &nodes_raw);
        // frozen from the oracle: the order-2 difference of sin^2 is 1
        assert!((oracle - 1.0).abs() < 1e-13);
        let nodes = NodeList::new(nodes_raw).unwrap();
        let got = divdiff(&sine, &Evaluand::from_pi(f), &nodes).unwrap();
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn table_matches_raw_recursion_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for sys in [
            poly(),
            GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap(),
            GammaSystem::<f64>::trig((0.0, 1.5)).unwrap(),
        ] {
            let (lo, hi) = sys.domain();
            for _ in 0..50 {
                let deg = rng.random_range(0..4usize);
                let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-3.0..3.0)).collect();
                let f = PiElement::new(&sys, coeffs).unwrap();
                let count = rng.random_range(1..6usize);
                let mut nodes: Vec<f64> = Vec::new();
                while nodes.len() < count {
                    let x = lo + (hi - lo) * rng.random_range(0.05..0.95);
                    if nodes.iter().all(|y: &f64| (y - x).abs() > 1e-3) {
                        nodes.push(x);
                    }
                }
                let oracle = raw_recursion(&sys, &|t| f.eval_unchecked(t), &nodes);
                let got = divdiff(
                    &sys,
                    &Evaluand::from_pi(f.clone()),
                    &NodeList::new(nodes).unwrap(),
                )
                .unwrap();
                assert!(
                    (got - oracle).abs() <= 1e-9 * oracle.abs().max(1.0),
                    "{}: {got} vs {oracle}",
                    sys.name()
                );
            }
        }
    }

    #[test]
    fn permuting_nodes_preserves_top_entry_for_unital_systems() {
        let tanh = GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap();
        let f = PiElement::new(&tanh, vec![0.5, -1.0, 2.0]).unwrap();
        let nodes = [-1.5, -0.2, 0.9, 1.7];
        let base = divdiff(
            &tanh,
            &Evaluand::from_pi(f.clone()),
            &NodeList::new(nodes.to_vec()).unwrap(),
        )
        .unwrap();
        let perms = [
            [3, 1, 0, 2],
            [1, 0, 3, 2],
            [2, 3, 1, 0],
        ];
        for p in perms {
            let shuffled: Vec<f64> = p.iter().map(|&i| nodes[i]).collect();
            let v = divdiff(
                &tanh,
                &Evaluand::from_pi(f.clone()),
                &NodeList::new(shuffled).unwrap(),
            )
            .unwrap();
            assert!((v - base).abs() <= 1e-10 * base.abs().max(1.0));
        }
    }

    #[test]
    fn confluency_is_the_limit_of_coalescing_nodes() {
        let sine = GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap();
        let f = PiElement::new(&sine, vec![0.2, 1.0, -0.5, 0.3]).unwrap();
        let x0 = 0.3;
        let exact = divdiff(
            &sine,
            &Evaluand::from_pi(f.clone()),
            &NodeList::new(vec![x0, x0]).unwrap(),
        )
        .unwrap();
        let mut prev_err = f64::INFINITY;
        for h in [1e-3, 1e-4, 1e-5] {
            let v = divdiff(
                &sine,
                &Evaluand::from_pi(f.clone()),
                &NodeList::new(vec![x0, x0 + h]).unwrap(),
            )
            .unwrap();
            let err = (v - exact).abs();
            // first-order convergence: error shrinks roughly with h
            assert!(err < prev_err);
            assert!(err < 10.0 * h);
            prev_err = err;
        }
    }

    #[test]
    fn mixed_confluent_table_agrees_with_exact_rational() {
        // Hermite data {0, 0, 1} on x^3: f[0,0,1] = (f[0,1] - f'(0))/1
        let sys = GammaSystem::<Rational>::polynomial((rat(-2, 1), rat(2, 1))).unwrap();
        let f = PiElement::new(
            &sys,
            vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)],
        )
        .unwrap();
        let nodes = NodeList::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
        let got = divdiff(&sys, &Evaluand::from_pi(f), &nodes).unwrap();
        // f[0,0] = 0, f[0,1] = 1, so f[0,0,1] = (1 - 0)/(1 - 0) = 1
        assert_eq!(got, rat(1, 1));
    }

    #[test]
    fn function_evaluand_without_derivs_rejects_confluency() {
        let sys = poly();
        let f = Evaluand::from_fn(|x: &f64| x * x);
        let nodes = NodeList::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            divdiff(&sys, &f, &nodes),
            Err(Error::InsufficientDerivatives { .. })
        ));
    }

    #[test]
    fn tiny_kernel_between_distant_nodes_is_ill_conditioned() {
        // a trig domain of length just under pi: the kernel sin(x2 - x1)
        // collapses between the endpoints even though they are far apart
        let hi = std::f64::consts::PI - 1e-13;
        let sys = GammaSystem::<f64>::trig((0.0, hi)).unwrap();
        let f = Evaluand::from_fn(|x: &f64| *x);
        let nodes = NodeList::new(vec![0.0, hi]).unwrap();
        assert!(!nodes.has_confluent());
        assert!(matches!(
            divdiff(&sys, &f, &nodes),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn newton_interpolation_reproduces_samples() {
        let tanh = GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap();
        let samples = vec![(-1.5, 2.0), (-0.5, -1.0), (0.7, 0.3), (1.8, 1.1)];
        let p = newton_interpolate(&tanh, &samples).unwrap();
        for (x, y) in &samples {
            assert!((p.eval(x).unwrap() - y).abs() < 1e-10);
        }
    }

    #[test]
    fn newton_matches_classical_coefficients_exactly() {
        let sys = GammaSystem::<Rational>::polynomial((rat(-5, 1), rat(5, 1))).unwrap();
        let samples = vec![
            (rat(0, 1), rat(1, 1)),
            (rat(1, 1), rat(2, 1)),
            (rat(3, 1), rat(10, 1)),
        ];
        let p = newton_interpolate(&sys, &samples).unwrap();
        // classical: c0 = 1, c1 = (2-1)/1 = 1, c2 = ((10-2)/2 - 1)/3 = 1
        assert_eq!(p.coefficients(), &[rat(1, 1), rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn newton_degree_exactness() {
        let sine = GammaSystem::<f64>::unital_sine((-1.2, 1.2)).unwrap();
        let f = PiElement::new(&sine, vec![0.4, -1.0, 0.7, 0.2]).unwrap();
        let nodes = [-1.0, -0.4, 0.3, 1.1];
        let samples: Vec<(f64, f64)> = nodes
            .iter()
            .map(|x| (*x, f.eval(x).unwrap()))
            .collect();
        let p = newton_interpolate(&sine, &samples).unwrap();
        for i in 0..100 {
            let t = -1.15 + 2.3 * i as f64 / 99.0;
            assert!((p.eval(&t).unwrap() - f.eval(&t).unwrap()).abs() < 1e-9);
        }
        // and the Newton form converts to a coefficient vector of matching degree
        let as_pi = p.to_pi_element().unwrap();
        assert_eq!(as_pi.degree(), 3);
        assert!((as_pi.eval(&0.5).unwrap() - f.eval(&0.5).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn newton_rejects_duplicates() {
        let sys = poly();
        let samples = vec![(1.0, 2.0), (1.0, 3.0)];
        assert!(matches!(
            newton_interpolate(&sys, &samples),
            Err(Error::DuplicateNodes(_))
        ));
    }

    #[test]
    fn cancellation_examples() {
        let sys = poly();
        let f = PiElement::new(&sys, vec![0.0, 0.0, 1.0]).unwrap();
        let nodes = NodeList::new(vec![0.0, 1.0, 2.0]).unwrap();
        let report = check_cancellation(&sys, &f, &nodes, &5.0, 1e-10).unwrap();
        assert_eq!(report.lhs, 1.0);
        assert_eq!(report.rhs_resolved, 1.0);
        assert!(report.pass);

        // single node: left = {d(y,.) f}[x0, y] = f(x0)
        let g = PiElement::new(&sys, vec![1.0, 2.0]).unwrap();
        let x0 = 0.5;
        let y = 2.5;
        let single = NodeList::new(vec![x0]).unwrap();
        let report = check_cancellation(&sys, &g, &single, &y, 1e-10).unwrap();
        let direct = {
            let w = g.multiply_linear_factor(&sys.curve_point(&y));
            (w.eval(&y).unwrap() - w.eval(&x0).unwrap()) / (y - x0)
        };
        assert!((report.lhs - direct).abs() < 1e-12);
        assert!((report.lhs - g.eval(&x0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cancellation_property_random_tanh() {
        let tanh = GammaSystem::<f64>::unital_tanh((-2.0, 2.0)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let coeffs: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let f = PiElement::new(&tanh, coeffs).unwrap();
            let mut pts: Vec<f64> = Vec::new();
            while pts.len() < 4 {
                let x = rng.random_range(-1.9..1.9);
                if pts.iter().all(|y: &f64| (y - x).abs() > 1e-2) {
                    pts.push(x);
                }
            }
            let extra = pts.pop().unwrap();
            let nodes = NodeList::new(pts).unwrap();
            let report = check_cancellation(&tanh, &f, &nodes, &extra, 1e-10).unwrap();
            assert!(report.pass, "{} vs {}", report.lhs, report.rhs_resolved);
        }
    }

    proptest! {
        #[test]
        fn clustering_is_order_independent(mut xs in proptest::collection::vec(-100i64..100, 1..8)) {
            let sys_nodes: Vec<f64> = xs.iter().map(|&v| v as f64 / 10.0).collect();
            let base = NodeList::new(sys_nodes.clone()).unwrap();
            xs.reverse();
            let mut shuffled: Vec<f64> = xs.iter().map(|&v| v as f64 / 10.0).collect();
            let half = shuffled.len() / 2;
            shuffled.rotate_left(half);
            let other = NodeList::new(shuffled).unwrap();
            prop_assert_eq!(base.clusters(), other.clusters());
        }

        #[test]
        fn distinct_node_divdiff_degree_annihilation(
            seed in 0u64..500,
        ) {
            // order-n difference of an element of degree n-1 vanishes (polynomial preset)
            let sys = poly();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let deg = rng.random_range(0..3usize);
            let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-2.0..2.0)).collect();
            let f = PiElement::new(&sys, coeffs).unwrap();
            let mut nodes: Vec<f64> = Vec::new();
            while nodes.len() < deg + 2 {
                let x = rng.random_range(-9.0..9.0);
                if nodes.iter().all(|y: &f64| (y - x).abs() > 1e-2) {
                    nodes.push(x);
                }
            }
            let v = divdiff(&sys, &Evaluand::from_pi(f), &NodeList::new(nodes).unwrap()).unwrap();
            prop_assert!(v.abs() < 1e-8);
        }
    }
}
