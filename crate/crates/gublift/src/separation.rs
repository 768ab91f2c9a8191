//! Exact separation of the lifted-cut family.
//!
//! Given a box- and GUB-feasible point, a single sort produces the
//! permutation whose lifted cut maximizes `pi'x*` over the whole family; the
//! point is cut off iff that cut is violated. When it is not, the dual
//! solution is returned as an explicit convex-combination certificate
//! supported on the frontier chain.

use crate::concave::EvalFn;
use crate::inequality::{CutKind, CutMode, Inequality};
use crate::instance::{Blocks, GubInstance, Point};
use crate::lifting::{epi_kernel, lepi_fast_kernel};
use crate::oracle::shifted_core;
use crate::perm::{ascending_from_scores_in, Permutation};
use crate::scalar::Scalar;

/// Convex-combination proof that a point lies in the hull: weights on the
/// frontier chain `U_0 = {}, U_1, ..., U_n` of the generating permutation.
/// Only strictly positive weights are stored.
#[derive(Debug, Clone)]
pub struct CertificateData<T> {
    pub delta: Permutation,
    /// Ascending item lists, each a GUB-feasible support.
    pub supports: Vec<Vec<usize>>,
    pub weights: Vec<T>,
    /// `sum_i eta_i x*_i`, the best achievable right-hand side.
    pub best_rhs: T,
}

pub type MembershipCertificate = CertificateData<f64>;

/// Outcome of a separation call.
#[derive(Debug, Clone)]
pub enum SeparationResult {
    /// A cut violated by more than the tolerance, with its violation.
    Violated { cut: Inequality, violation: f64 },
    /// No valid inequality of the family cuts the point off.
    Inside(MembershipCertificate),
}

impl SeparationResult {
    pub fn is_violated(&self) -> bool {
        matches!(self, SeparationResult::Violated { .. })
    }
}

/// Per-block suffix sums `y*_l = sum_{i >= l, i in N_k} x*_i`. Requires the
/// point to respect bounds and GUB rows (within `tol`).
pub fn scores_y(inst: &GubInstance, x: &[f64], tol: f64) -> Result<Vec<f64>, crate::error::Error> {
    let blocks = inst.blocks();
    let mut y = vec![0.0; x.len()];
    for k in 0..blocks.t() {
        let r = blocks.range(k);
        let mut acc = 0.0;
        for i in r.rev() {
            acc += x[i];
            y[i] = acc;
        }
        let sum = y[blocks.first(k)];
        if sum > 1.0 + tol {
            return Err(crate::error::Error::GubViolated { block: k, sum });
        }
    }
    Ok(y)
}

/// Generic separation core over the `X0` form (no linear term): returns
/// either the maximizing permutation with its violated coefficient vector,
/// or the certificate.
pub fn separate_core<T: Scalar>(
    blocks: &Blocks,
    a: &[T],
    f: &impl EvalFn<T>,
    w: &T,
    x: &[T],
    tol: &T,
) -> Result<(Permutation, Vec<T>, T), CertificateData<T>> {
    let n = x.len();
    // Suffix scores within each block.
    let mut y = vec![T::zero(); n];
    for k in 0..blocks.t() {
        let mut acc = T::zero();
        for i in blocks.range(k).rev() {
            acc = acc + x[i].clone();
            y[i] = acc.clone();
        }
    }
    let delta = ascending_from_scores_in(blocks, &y);
    let eta = lepi_fast_kernel(blocks, a, f, &delta)
        .expect("score ordering is partial ascending by construction");
    let mut rhs = T::zero();
    for (e, xv) in eta.iter().zip(x) {
        rhs = rhs + e.clone() * xv.clone();
    }
    let violation = rhs.clone() - w.clone();
    if violation > *tol {
        return Ok((delta, eta, violation));
    }

    // Dual certificate: weights are consecutive differences of the sorted
    // scores along the frontier chain, clamped at 1 above and 0 below.
    let mut supports = Vec::new();
    let mut weights = Vec::new();
    let mut frontier: Vec<Option<usize>> = vec![None; blocks.t()];
    let mut prev_score = T::one();
    for j in 0..=n {
        let score = if j < n {
            y[delta.item(j)].clone()
        } else {
            T::zero()
        };
        let lambda = prev_score.clone() - score.clone();
        if lambda > T::zero() {
            let set: Vec<usize> = frontier.iter().filter_map(|&e| e).collect();
            supports.push(set);
            weights.push(lambda);
        }
        if j < n {
            let item = delta.item(j);
            frontier[blocks.of_item(item)] = Some(item);
            prev_score = score;
        }
    }
    Err(CertificateData {
        delta,
        supports,
        weights,
        best_rhs: rhs,
    })
}

/// Exact separation with trivial-inequality guards. Points violating a
/// bound or a GUB row are rejected with the corresponding trivial cut;
/// otherwise the point is separated from the hull (of `X0`, or of `X` after
/// the linear shift when `b` is present).
pub fn separate(inst: &GubInstance, point: &Point, tol: f64) -> SeparationResult {
    debug_assert_eq!(point.x.len(), inst.n());
    let n = inst.n();
    let blocks = inst.blocks();
    let guard_tol = tol.max(1e-9);
    for (i, &v) in point.x.iter().enumerate() {
        if v < -guard_tol {
            let mut pi = vec![0.0; n];
            pi[i] = -1.0;
            return SeparationResult::Violated {
                cut: Inequality {
                    kind: CutKind::TrivialBound,
                    mode: CutMode::FixedRhs { rhs: 0.0 },
                    pi0: 0.0,
                    pi,
                    delta: None,
                },
                violation: -v,
            };
        }
        if v > 1.0 + guard_tol {
            let mut pi = vec![0.0; n];
            pi[i] = 1.0;
            return SeparationResult::Violated {
                cut: Inequality {
                    kind: CutKind::TrivialBound,
                    mode: CutMode::FixedRhs { rhs: 1.0 },
                    pi0: 0.0,
                    pi,
                    delta: None,
                },
                violation: v - 1.0,
            };
        }
    }
    for k in 0..blocks.t() {
        let sum: f64 = blocks.range(k).map(|i| point.x[i]).sum();
        if sum > 1.0 + guard_tol {
            let mut pi = vec![0.0; n];
            for i in blocks.range(k) {
                pi[i] = 1.0;
            }
            return SeparationResult::Violated {
                cut: Inequality {
                    kind: CutKind::TrivialGub,
                    mode: CutMode::FixedRhs { rhs: 1.0 },
                    pi0: 0.0,
                    pi,
                    delta: None,
                },
                violation: sum - 1.0,
            };
        }
    }

    // Clamp away LP-level dirt so the suffix scores stay in [0, 1].
    let x: Vec<f64> = point.x.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    let (w_shifted, core) = shifted_core(inst, &Point::new(point.w, x.clone()));
    match separate_core(blocks, core.a(), core.f(), &w_shifted, &x, &tol) {
        Ok((delta, mut eta, violation)) => {
            let kind = if inst.has_b() {
                // Shift back onto the set with the linear term.
                for (e, b) in eta.iter_mut().zip(inst.b().unwrap()) {
                    *e += b;
                }
                CutKind::LepiPrime
            } else {
                CutKind::Lepi
            };
            SeparationResult::Violated {
                cut: Inequality {
                    kind,
                    mode: CutMode::Epigraph,
                    pi0: 0.0,
                    pi: eta,
                    delta: Some(delta),
                },
                violation,
            }
        }
        Err(cert) => SeparationResult::Inside(cert),
    }
}

/// Separation of the plain polymatroid family (no GUB awareness): the
/// marginals of the descending sort of `x*`. Exact for the unconstrained
/// epigraph; used as the weaker baseline cut family.
pub fn separate_epi(inst: &GubInstance, point: &Point, tol: f64) -> Option<Inequality> {
    let n = inst.n();
    debug_assert_eq!(point.x.len(), n);
    let x: Vec<f64> = point.x.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    let (w_shifted, core) = shifted_core(inst, &Point::new(point.w, x.clone()));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| x[j].partial_cmp(&x[i]).unwrap());
    let delta = Permutation::new(idx).unwrap();
    let mut rho = epi_kernel(core.a(), core.f(), &delta);
    let rhs: f64 = rho.iter().zip(&x).map(|(r, x)| r * x).sum();
    if rhs - w_shifted > tol {
        let kind = if inst.has_b() {
            for (r, b) in rho.iter_mut().zip(inst.b().unwrap()) {
                *r += b;
            }
            CutKind::EpiPrime
        } else {
            CutKind::Epi
        };
        Some(Inequality {
            kind,
            mode: CutMode::Epigraph,
            pi0: 0.0,
            pi: rho,
            delta: Some(delta),
        })
    } else {
        None
    }
}
