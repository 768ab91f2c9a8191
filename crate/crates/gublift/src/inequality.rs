//! Affine cuts with provenance.

use crate::perm::Permutation;
use serde::{Deserialize, Serialize};

/// Where a cut came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    Epi,
    Lepi,
    EpiPrime,
    LepiPrime,
    /// `x_i >= 0` or `x_i <= 1`.
    TrivialBound,
    /// A GUB row `sum_{i in N_k} x_i <= 1`.
    TrivialGub,
}

/// Cut orientation: an epigraph cut `w >= pi0 + pi'x`, or a pure-`x` row
/// `pi'x <= rhs` used when `w` is pinned to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutMode {
    Epigraph,
    FixedRhs { rhs: f64 },
}

/// An affine valid inequality over canonical item indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub kind: CutKind,
    pub mode: CutMode,
    pub pi0: f64,
    /// Item-indexed coefficients (canonical order).
    pub pi: Vec<f64>,
    /// Generating permutation, when the cut is permutation-derived.
    pub delta: Option<Permutation>,
}

impl Inequality {
    /// Amount by which `(w, x)` violates the cut; positive means violated.
    pub fn violation(&self, w: f64, x: &[f64]) -> f64 {
        let dot: f64 = self.pi.iter().zip(x).map(|(p, x)| p * x).sum();
        match self.mode {
            CutMode::Epigraph => self.pi0 + dot - w,
            CutMode::FixedRhs { rhs } => dot - rhs,
        }
    }
}

/// Cut coefficients produced by the lifting routines, before orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCoefficients {
    pub kind: CutKind,
    pub delta: Permutation,
    /// Item-indexed coefficient vector (canonical order).
    pub values: Vec<f64>,
}

impl CutCoefficients {
    /// `w >= sum_i values_i x_i`; the lifted seed is `w >= f(0) = 0`, so
    /// `pi0 = 0`.
    pub fn into_epigraph_cut(self) -> Inequality {
        Inequality {
            kind: self.kind,
            mode: CutMode::Epigraph,
            pi0: 0.0,
            pi: self.values,
            delta: Some(self.delta),
        }
    }

    /// `sum_i values_i x_i <= rhs` for a pinned epigraph value.
    pub fn into_fixed_rhs_cut(self, rhs: f64) -> Inequality {
        Inequality {
            kind: self.kind,
            mode: CutMode::FixedRhs { rhs },
            pi0: 0.0,
            pi: self.values,
            delta: Some(self.delta),
        }
    }
}
