//! Arithmetic, divided differences and blossoms for two-generator spaces.
//!
//! The crate works in the span of products `g1^(n-k) * g2^k` of a pair of
//! generator functions — degree-`n` polynomials when the pair is `(1, x)`,
//! trigonometric or hyperbolic "polynomials" for `(cos, sin)` / `(cosh,
//! sinh)`, Müntz spaces for power pairs. On top of that space it provides:
//!
//! * [`gamma`] — generator presets, the antisymmetric kernel `d`, Wronskians;
//! * [`pi`] — coefficient-vector arithmetic, the generalized derivative and
//!   its antiderivative as exact linear maps, generalized Taylor expansion;
//! * [`divdiff`] — divided differences with confluent (repeated) nodes,
//!   tables and Newton-form interpolation;
//! * [`blossom`] — homogeneous and extended (positive and negative order)
//!   blossoms with axiom checkers;
//! * [`identity`] / [`suite`] — an identity-verification harness that
//!   evaluates both sides of every supported identity, resolves signs and
//!   constants against brute-force oracles, and emits a machine-readable
//!   discrepancy ledger.
//!
//! Everything is generic over [`scalar::Scalar`]; `f64` is the everyday
//! choice and exact rationals back the bit-exact oracle comparisons on the
//! polynomial preset.

pub mod blossom;
pub mod combin;
pub mod divdiff;
pub mod gamma;
pub mod identity;
pub mod pi;
pub mod quad;
pub mod sampling;
pub mod scalar;
pub mod suite;

use thiserror::Error;

pub use blossom::{BlossomQuery, HomPoint};
pub use divdiff::{Evaluand, NodeList};
pub use gamma::{GammaSystem, PresetKind, PresetParams, SystemSpec};
pub use identity::{IdentityKind, IdentityReport};
pub use pi::PiElement;
pub use scalar::{RealScalar, Scalar};

/// Exact scalar: arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;

/// Default float system / element aliases.
pub type GammaSystem64 = GammaSystem<f64>;
pub type PiElement64 = PiElement<f64>;
/// Exact-mode aliases (polynomial preset only).
pub type GammaSystemExact = GammaSystem<Rational>;
pub type PiElementExact = PiElement<Rational>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid preset: {0}")]
    Preset(String),
    #[error("argument {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },
    #[error("singular system: |W({at})| = {wronskian:e} below 1e-14")]
    SingularWronskian { at: f64, wronskian: f64 },
    #[error("mismatched systems: {0} vs {1}")]
    SystemMismatch(String, String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("degree {degree} exceeds available order {order}")]
    DegreeTooHigh { degree: usize, order: usize },
    #[error("empty node list")]
    EmptyNodes,
    #[error("duplicate interpolation nodes at {0}")]
    DuplicateNodes(f64),
    #[error("ill-conditioned divided difference: |d({x1}, {x2})| = {d:e}")]
    IllConditioned { x1: f64, x2: f64, d: f64 },
    #[error("node multiplicity {need} exceeds derivative order {have}")]
    InsufficientDerivatives { need: usize, have: usize },
    #[error("negative-order blossom requires u-nodes on the curve")]
    MissingUNodes,
    #[error("generalized binomial C({k}, {d}) is zero")]
    ZeroBinomial { k: i64, d: usize },
    #[error("term cap exceeded: {terms} > {cap}")]
    TermCap { terms: usize, cap: usize },
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
