//! Permutations of the item set, the partial-ascending property, the frontier
//! structures `U_j`/`h_j`/`W_j` driving the lifting coefficients, and the
//! rewrite procedure that turns any permutation into a partial ascending one
//! with the same tight-set collection.

use crate::error::{Error, Result};
use crate::instance::Blocks;
use crate::scalar::Scalar;

/// A bijection on `0..n`, stored order-first with a position lookup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut pos = vec![usize::MAX; n];
        for (j, &item) in order.iter().enumerate() {
            if item >= n {
                return Err(Error::InvalidPermutation(format!(
                    "item {item} out of range for n = {n}"
                )));
            }
            if pos[item] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("item {item} repeated")));
            }
            pos[item] = j;
        }
        Ok(Permutation { order, pos })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Item at 0-based position `j`.
    pub fn item(&self, j: usize) -> usize {
        self.order[j]
    }

    /// 0-based position of `item`.
    pub fn position(&self, item: usize) -> usize {
        self.pos[item]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// True iff items of each block appear in ascending index order.
pub fn is_partial_ascending(blocks: &Blocks, delta: &Permutation) -> bool {
    let mut last = vec![None; blocks.t()];
    for &item in delta.order() {
        let k = blocks.of_item(item);
        if let Some(prev) = last[k] {
            if prev > item {
                return false;
            }
        }
        last[k] = Some(item);
    }
    true
}

/// The frontier structures of a permutation: for each prefix length `j`,
/// `u[j]` holds the per-block maximum item seen so far; `h[j-1]` is the
/// 1-based position resolving item `delta_j`'s block conflict; `w[j-1]` is
/// the optimal tight set of the `j`-th lifting step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierSets {
    /// `u[j][k]` for `j` in `0..=n`: max item of block `k` among the first
    /// `j` items, `None` when the block is untouched.
    pub u: Vec<Vec<Option<usize>>>,
    /// `h[j-1]` in `1..=j` (1-based positions).
    pub h: Vec<usize>,
    /// `w[j-1]`: ascending item list.
    pub w: Vec<Vec<usize>>,
}

impl FrontierSets {
    /// `U_j` as an ascending item list (`j` in `0..=n`).
    pub fn u_set(&self, j: usize) -> Vec<usize> {
        self.u[j].iter().filter_map(|&e| e).collect()
    }

    /// The collection `{W_j}` as a sorted set of sorted sets.
    pub fn w_collection(&self) -> Vec<Vec<usize>> {
        let mut c = self.w.clone();
        c.sort();
        c
    }
}

/// Compute `U`, `h`, `W` for an arbitrary permutation. Quadratic worst case
/// from the `h` back-scans.
pub fn frontier_sets(blocks: &Blocks, delta: &Permutation) -> FrontierSets {
    let n = delta.len();
    let t = blocks.t();
    let mut u = Vec::with_capacity(n + 1);
    u.push(vec![None; t]);
    let mut cur = vec![None; t];
    for j in 1..=n {
        let item = delta.item(j - 1);
        let k = blocks.of_item(item);
        if cur[k].map_or(true, |m| item > m) {
            cur[k] = Some(item);
        }
        u.push(cur.clone());
    }

    let mut h = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for j in 1..=n {
        let item = delta.item(j - 1);
        let k = blocks.of_item(item);
        let hj = if u[j][k] == Some(item) {
            j
        } else {
            (1..j)
                .find(|&l| {
                    let cand = delta.item(l - 1);
                    blocks.of_item(cand) == k && cand > item
                })
                .expect("h is well-defined when delta_j is not its block maximum")
        };
        h.push(hj);
        // W_j = U_{h_j} with the block-k entry replaced by delta_j.
        let wj: Vec<usize> = (0..t)
            .filter_map(|kk| if kk == k { Some(item) } else { u[hj][kk] })
            .collect();
        w.push(wj);
    }
    FrontierSets { u, h, w }
}

/// Rewrite `delta` into a partial ascending permutation with the identical
/// `W`-collection: scan positions left to right and, whenever the item at
/// position `j` is not its block's prefix maximum, move it directly before
/// the first larger same-block item.
pub fn make_partial_ascending(blocks: &Blocks, delta: &Permutation) -> Permutation {
    make_partial_ascending_trace(blocks, delta, &mut |_| {})
}

/// Same as [`make_partial_ascending`] but reporting each intermediate
/// permutation (after every iteration) to `observe`; used by property tests.
pub(crate) fn make_partial_ascending_trace(
    blocks: &Blocks,
    delta: &Permutation,
    observe: &mut dyn FnMut(&[usize]),
) -> Permutation {
    let n = delta.len();
    let mut order = delta.order().to_vec();
    let mut blockmax: Vec<Option<usize>> = vec![None; blocks.t()];
    for j in 1..=n {
        let item = order[j - 1];
        let k = blocks.of_item(item);
        let is_max = blockmax[k].map_or(true, |m| item > m);
        if !is_max {
            let target = (1..j)
                .find(|&l| {
                    let cand = order[l - 1];
                    blocks.of_item(cand) == k && cand > item
                })
                .expect("a larger same-block item precedes a non-maximal one");
            order.remove(j - 1);
            order.insert(target - 1, item);
        } else {
            blockmax[k] = Some(item);
        }
        observe(&order);
    }
    Permutation::new(order).expect("moves preserve the permutation property")
}

/// Build the partial ascending permutation sorting `scores` descending:
/// a stable descending sort followed by within-block re-indexing, which
/// repairs tie orderings into the partial ascending class.
pub fn ascending_from_scores_in<T: Scalar>(blocks: &Blocks, scores: &[T]) -> Permutation {
    let n = scores.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).expect("orderable scores"));
    let mut taken = vec![0usize; blocks.t()];
    let mut order = Vec::with_capacity(n);
    for &item in &idx {
        let k = blocks.of_item(item);
        order.push(blocks.first(k) + taken[k]);
        taken[k] += 1;
    }
    Permutation::new(order).expect("re-indexing yields a permutation")
}

pub fn ascending_from_scores(blocks: &Blocks, scores: &[f64]) -> Permutation {
    ascending_from_scores_in(blocks, scores)
}

/// Every partial ascending permutation: all interleavings of the blocks with
/// each block's items kept in ascending order. The count is the multinomial
/// `n! / prod_k |N_k|!`; guarded to stay desk-sized.
pub fn enumerate_partial_ascending(blocks: &Blocks, limit: usize) -> Result<Vec<Permutation>> {
    let count = partial_ascending_count(blocks);
    if count > limit as u128 {
        return Err(Error::TooLarge(format!(
            "{count} partial ascending permutations exceeds limit {limit}"
        )));
    }
    let n = blocks.n();
    let t = blocks.t();
    let mut taken = vec![0usize; t];
    let mut cur = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(count as usize);
    fn rec(
        blocks: &Blocks,
        taken: &mut Vec<usize>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Permutation>,
    ) {
        if cur.len() == blocks.n() {
            out.push(Permutation::new(cur.clone()).unwrap());
            return;
        }
        for k in 0..blocks.t() {
            if taken[k] < blocks.len(k) {
                cur.push(blocks.first(k) + taken[k]);
                taken[k] += 1;
                rec(blocks, taken, cur, out);
                taken[k] -= 1;
                cur.pop();
            }
        }
    }
    rec(blocks, &mut taken, &mut cur, &mut out);
    Ok(out)
}

/// `n! / prod_k |N_k|!` without overflow for desk sizes.
pub fn partial_ascending_count(blocks: &Blocks) -> u128 {
    let mut count: u128 = 1;
    let mut placed: u128 = 0;
    for k in 0..blocks.t() {
        for i in 1..=blocks.len(k) as u128 {
            placed += 1;
            count = count * placed / i;
        }
    }
    count
}

/// All `n!` permutations of `0..n` (test oracles only).
pub fn enumerate_all(n: usize, limit: usize) -> Result<Vec<Permutation>> {
    let mut fact: usize = 1;
    for i in 1..=n {
        fact = fact.saturating_mul(i);
    }
    if fact > limit {
        return Err(Error::TooLarge(format!("{n}! exceeds limit {limit}")));
    }
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(fact);
    permute(&mut items, 0, &mut out);
    Ok(out)
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
    if k == items.len() {
        out.push(Permutation::new(items.clone()).unwrap());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}
