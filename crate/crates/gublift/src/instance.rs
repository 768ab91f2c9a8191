//! Canonical instance data: non-negative coefficients, contiguous GUB blocks
//! with ascending coefficients inside each block, and a normalized concave
//! function.
//!
//! User-facing item ids survive in `index_map`; everything else in the crate
//! works in canonical 0-based indices.

use crate::concave::{ConcaveFunction, ExactConcave};
use crate::error::{Error, Result};
use crate::scalar::{rat_from_f64, Rat};
use serde::{Deserialize, Serialize};

/// Contiguous partition of `0..n` into GUB blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocks {
    /// `bounds[k]..bounds[k+1]` is block `k`; `bounds[0] = 0`, last = `n`.
    bounds: Vec<usize>,
    /// Block index of each item.
    item_block: Vec<usize>,
}

impl Blocks {
    /// Build from block sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::BadPartition("empty block".into()));
        }
        let mut bounds = Vec::with_capacity(sizes.len() + 1);
        bounds.push(0);
        for &s in sizes {
            bounds.push(bounds.last().unwrap() + s);
        }
        let n = *bounds.last().unwrap();
        let mut item_block = vec![0; n];
        for k in 0..sizes.len() {
            for i in bounds[k]..bounds[k + 1] {
                item_block[i] = k;
            }
        }
        Ok(Blocks { bounds, item_block })
    }

    pub fn n(&self) -> usize {
        self.item_block.len()
    }

    /// Number of blocks `t`.
    pub fn t(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn of_item(&self, i: usize) -> usize {
        self.item_block[i]
    }

    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.bounds[k]..self.bounds[k + 1]
    }

    pub fn first(&self, k: usize) -> usize {
        self.bounds[k]
    }

    pub fn len(&self, k: usize) -> usize {
        self.bounds[k + 1] - self.bounds[k]
    }

    /// True if `i` is the smallest item of its block.
    pub fn is_block_first(&self, i: usize) -> bool {
        self.bounds[self.item_block[i]] == i
    }

    pub fn iter(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        (0..self.t()).map(|k| self.range(k))
    }
}

/// A canonical instance of the GUB-constrained epigraph set: `X0` when `b`
/// is absent, `X` when present.
#[derive(Debug, Clone)]
pub struct GubInstance {
    a: Vec<f64>,
    b: Option<Vec<f64>>,
    blocks: Blocks,
    f: ConcaveFunction,
    /// `index_map[canonical] = user item id` (0-based).
    index_map: Vec<usize>,
}

/// User-order input to [`normalize_instance`].
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub a: Vec<f64>,
    pub b: Option<Vec<f64>>,
    /// Disjoint groups of 0-based user item ids covering `0..a.len()`.
    pub groups: Vec<Vec<usize>>,
    pub f: ConcaveFunction,
}

/// Canonicalize: renumber items so blocks are contiguous and coefficients
/// ascend within each block (stable for ties).
pub fn normalize_instance(raw: RawInstance) -> Result<GubInstance> {
    let n = raw.a.len();
    for (i, &v) in raw.a.iter().enumerate() {
        if !(v >= 0.0) {
            return Err(Error::NegativeCoefficient { index: i, value: v });
        }
    }
    if let Some(b) = &raw.b {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
    }
    let mut seen = vec![false; n];
    for g in &raw.groups {
        if g.is_empty() {
            return Err(Error::BadPartition("empty group".into()));
        }
        for &i in g {
            if i >= n {
                return Err(Error::BadPartition(format!("item {i} out of range")));
            }
            if seen[i] {
                return Err(Error::BadPartition(format!("item {i} appears twice")));
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::BadPartition(format!("item {missing} not covered")));
    }

    let mut index_map = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(raw.groups.len());
    for g in &raw.groups {
        let mut members = g.clone();
        // Stable: ties keep the user's order within the group.
        members.sort_by(|&x, &y| raw.a[x].partial_cmp(&raw.a[y]).unwrap());
        sizes.push(members.len());
        index_map.extend(members);
    }
    let blocks = Blocks::from_sizes(&sizes)?;
    let a = index_map.iter().map(|&u| raw.a[u]).collect();
    let b = raw
        .b
        .map(|b| index_map.iter().map(|&u| b[u]).collect::<Vec<_>>());
    Ok(GubInstance {
        a,
        b,
        blocks,
        f: raw.f,
        index_map,
    })
}

impl GubInstance {
    /// Convenience constructor for data already in canonical order.
    pub fn canonical(
        a: Vec<f64>,
        b: Option<Vec<f64>>,
        block_sizes: &[usize],
        f: ConcaveFunction,
    ) -> Result<Self> {
        let groups: Vec<Vec<usize>> = {
            let blocks = Blocks::from_sizes(block_sizes)?;
            if blocks.n() != a.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    got: blocks.n(),
                });
            }
            blocks.iter().map(|r| r.collect()).collect()
        };
        let inst = normalize_instance(RawInstance { a, b, groups, f })?;
        // Canonical input must already be ascending within blocks.
        for k in 0..inst.blocks.t() {
            let r = inst.blocks.range(k);
            if inst.index_map[r.clone()] != (r.start..r.end).collect::<Vec<_>>()[..] {
                return Err(Error::BadPartition(format!(
                    "coefficients not ascending within block {k}"
                )));
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> Option<&[f64]> {
        self.b.as_deref()
    }

    pub fn has_b(&self) -> bool {
        self.b.is_some()
    }

    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }

    pub fn f(&self) -> &ConcaveFunction {
        &self.f
    }

    /// Canonical index -> user item id.
    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    pub fn to_user(&self, canonical: usize) -> usize {
        self.index_map[canonical]
    }

    pub fn to_canonical(&self, user: usize) -> Option<usize> {
        self.index_map.iter().position(|&u| u == user)
    }

    /// De-normalize a canonical item-indexed vector back to user order.
    pub fn unmap<T: Clone + Default>(&self, canonical: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); canonical.len()];
        for (c, v) in canonical.iter().enumerate() {
            out[self.index_map[c]] = v.clone();
        }
        out
    }

    /// Map a user-order vector into canonical order.
    pub fn map_to_canonical<T: Clone + Default>(&self, user: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); user.len()];
        for (c, &u) in self.index_map.iter().enumerate() {
            out[c] = user[u].clone();
        }
        out
    }

    /// `sum_{i in S} a_i`.
    pub fn a_sum(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.a[i]).sum()
    }

    /// `f(a'x) + b'x` (b absent means zero): the right-hand side deciding
    /// membership of `(w, x)` for binary `x`.
    pub fn membership_side(&self, x: &[f64]) -> f64 {
        let z: f64 = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        let lin: f64 = match &self.b {
            Some(b) => b.iter().zip(x).map(|(b, x)| b * x).sum(),
            None => 0.0,
        };
        self.f.eval(z) + lin
    }

    /// View of the instance without the linear term (the `X0` core used by
    /// the shift arguments for `X`).
    pub fn without_b(&self) -> GubInstance {
        GubInstance {
            b: None,
            ..self.clone()
        }
    }

    /// Exact-rational view, available when `f` has a rational twin.
    pub fn exact_view(&self) -> Option<ExactView> {
        let f = self.f.exact()?;
        let a = self.a.iter().map(|&v| rat_from_f64(v)).collect();
        let b = self
            .b
            .as_ref()
            .map(|b| b.iter().map(|&v| rat_from_f64(v)).collect());
        Some(ExactView {
            a,
            b,
            blocks: self.blocks.clone(),
            f,
        })
    }
}

/// Exact-rational twin of a [`GubInstance`].
#[derive(Debug, Clone)]
pub struct ExactView {
    pub a: Vec<Rat>,
    pub b: Option<Vec<Rat>>,
    pub blocks: Blocks,
    pub f: ExactConcave,
}

/// A fractional or binary point `(w, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub w: f64,
    pub x: Vec<f64>,
}

impl Point {
    pub fn new(w: f64, x: Vec<f64>) -> Self {
        Point { w, x }
    }
}

/// Operation form of [`GubInstance::membership_side`].
pub fn evaluate_membership_side(inst: &GubInstance, point: &Point) -> f64 {
    inst.membership_side(&point.x)
}
