//! Concave functions appearing in the nonlinear constraint `w >= f(a'x)`.
//!
//! All stored functions are normalized so that `f(0) = 0`; the raw value at
//! zero is kept as an `offset` so callers can translate between the user
//! scale and the normalized scale (`w_user = w_normalized + offset`).

use crate::error::{Error, Result};
use crate::scalar::{rat_from_f64, Rat, Scalar};
use serde::{Deserialize, Serialize};

/// The supported concave shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum ConcaveKind {
    /// `-z^2`
    #[serde(rename = "neg-square")]
    NegSquare,
    /// `-e^{-z}`
    #[serde(rename = "neg-exp")]
    NegExp,
    /// `omega * sqrt(z)` with `omega > 0`
    #[serde(rename = "scaled-sqrt")]
    ScaledSqrt { omega: f64 },
    /// `min_p { alpha_p * z + beta_p }`
    #[serde(rename = "piecewise-linear-min")]
    PiecewiseLinearMin { pieces: Vec<(f64, f64)> },
}

/// A normalized concave function. Serializes as its [`ConcaveKind`] alone
/// (`{"kind": ..., "params": ...}`); the offset is rederived on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConcaveKind", into = "ConcaveKind")]
pub struct ConcaveFunction {
    kind: ConcaveKind,
    /// Raw `f(0)`, subtracted so the stored function vanishes at zero.
    offset: f64,
}

impl From<ConcaveFunction> for ConcaveKind {
    fn from(f: ConcaveFunction) -> ConcaveKind {
        f.kind
    }
}

impl TryFrom<ConcaveKind> for ConcaveFunction {
    type Error = Error;
    fn try_from(kind: ConcaveKind) -> Result<ConcaveFunction> {
        ConcaveFunction::new(kind)
    }
}

impl ConcaveFunction {
    pub fn new(kind: ConcaveKind) -> Result<Self> {
        match &kind {
            ConcaveKind::ScaledSqrt { omega } => {
                if !omega.is_finite() || *omega <= 0.0 {
                    return Err(Error::NonConcave(format!(
                        "scaled-sqrt requires omega > 0, got {omega}"
                    )));
                }
            }
            ConcaveKind::PiecewiseLinearMin { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::NonConcave("piecewise-linear-min has no pieces".into()));
                }
                if pieces.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                    return Err(Error::NonConcave(
                        "piecewise-linear-min has non-finite coefficients".into(),
                    ));
                }
            }
            _ => {}
        }
        let offset = raw_eval(&kind, 0.0);
        Ok(ConcaveFunction { kind, offset })
    }

    pub fn neg_square() -> Self {
        Self::new(ConcaveKind::NegSquare).unwrap()
    }

    pub fn neg_exp() -> Self {
        Self::new(ConcaveKind::NegExp).unwrap()
    }

    pub fn scaled_sqrt(omega: f64) -> Result<Self> {
        Self::new(ConcaveKind::ScaledSqrt { omega })
    }

    pub fn piecewise_min(pieces: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(ConcaveKind::PiecewiseLinearMin { pieces })
    }

    pub fn kind(&self) -> &ConcaveKind {
        &self.kind
    }

    /// Raw `f(0)`; the normalized function satisfies `eval(0) = 0`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Normalized evaluation: `f(z) - f(0)`.
    pub fn eval(&self, z: f64) -> f64 {
        raw_eval(&self.kind, z) - self.offset
    }

    /// Exact-rational twin of the normalized function, available for the
    /// kinds whose arithmetic is rational (neg-square and piecewise-linear).
    pub fn exact(&self) -> Option<ExactConcave> {
        match &self.kind {
            ConcaveKind::NegSquare => Some(ExactConcave::NegSquare),
            ConcaveKind::PiecewiseLinearMin { pieces } => {
                let pieces: Vec<(Rat, Rat)> = pieces
                    .iter()
                    .map(|&(a, b)| (rat_from_f64(a), rat_from_f64(b)))
                    .collect();
                let offset = pieces
                    .iter()
                    .map(|(_, b)| b.clone())
                    .min()
                    .expect("validated non-empty");
                Some(ExactConcave::PiecewiseLinearMin { pieces, offset })
            }
            _ => None,
        }
    }
}

fn raw_eval(kind: &ConcaveKind, z: f64) -> f64 {
    match kind {
        ConcaveKind::NegSquare => -(z * z),
        ConcaveKind::NegExp => -(-z).exp(),
        ConcaveKind::ScaledSqrt { omega } => omega * z.max(0.0).sqrt(),
        ConcaveKind::PiecewiseLinearMin { pieces } => pieces
            .iter()
            .map(|&(a, b)| a * z + b)
            .fold(f64::INFINITY, f64::min),
    }
}

/// Exact-rational evaluation for the rational kinds, normalized to vanish
/// at zero.
#[derive(Debug, Clone)]
pub enum ExactConcave {
    NegSquare,
    PiecewiseLinearMin { pieces: Vec<(Rat, Rat)>, offset: Rat },
}

impl ExactConcave {
    pub fn eval(&self, z: &Rat) -> Rat {
        match self {
            ExactConcave::NegSquare => -(z.clone() * z.clone()),
            ExactConcave::PiecewiseLinearMin { pieces, offset } => {
                let mut best: Option<Rat> = None;
                for (a, b) in pieces {
                    let v = a.clone() * z.clone() + b.clone();
                    best = Some(match best {
                        Some(cur) if cur <= v => cur,
                        _ => v,
                    });
                }
                best.expect("non-empty pieces") - offset.clone()
            }
        }
    }
}

/// Evaluation used by the generic cut kernels: `f64` instances evaluate the
/// stored function, exact instances evaluate the rational twin.
pub trait EvalFn<T: Scalar> {
    fn eval_at(&self, z: &T) -> T;
}

impl EvalFn<f64> for ConcaveFunction {
    fn eval_at(&self, z: &f64) -> f64 {
        self.eval(*z)
    }
}

impl EvalFn<Rat> for ExactConcave {
    fn eval_at(&self, z: &Rat) -> Rat {
        self.eval(z)
    }
}
