//! Brute-force ground truth for property tests: feasible-support
//! enumeration, the raw lifting problem, whole-hull membership by
//! permutation enumeration, and exhaustive model solving. Desk scale only;
//! every entry point is guarded.

use crate::concave::EvalFn;
use crate::error::{Error, Result};
use crate::instance::{GubInstance, Point};
use crate::lifting::lepi_fast_kernel;
use crate::perm::{enumerate_partial_ascending, Permutation};
use crate::scalar::Scalar;

/// Every GUB-feasible support, with cached weights and function values.
#[derive(Debug, Clone)]
pub struct FeasibleFamily {
    /// Ascending item lists, ordered by incidence mask (block 1 varies
    /// fastest).
    pub supports: Vec<Vec<usize>>,
    pub a_sums: Vec<f64>,
    pub f_values: Vec<f64>,
}

impl FeasibleFamily {
    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }
}

/// Enumerate the family `{S : |S cap N_k| <= 1 for all k}`. The count is
/// `prod_k (|N_k| + 1)`.
pub fn enumerate_feasible(inst: &GubInstance, limit: usize) -> Result<FeasibleFamily> {
    let blocks = inst.blocks();
    let mut count: u128 = 1;
    for k in 0..blocks.t() {
        count *= blocks.len(k) as u128 + 1;
        if count > limit as u128 {
            return Err(Error::TooLarge(format!(
                "feasible family exceeds limit {limit}"
            )));
        }
    }
    let t = blocks.t();
    let mut supports = Vec::with_capacity(count as usize);
    // Mixed-radix counter with block 0 least significant: choice 0 = skip
    // the block, choice c = take its c-th item.
    let mut choice = vec![0usize; t];
    loop {
        let mut s = Vec::new();
        for k in 0..t {
            if choice[k] > 0 {
                s.push(blocks.first(k) + choice[k] - 1);
            }
        }
        supports.push(s);
        let mut k = 0;
        loop {
            if k == t {
                let a_sums: Vec<f64> = supports.iter().map(|s| inst.a_sum(s)).collect();
                let f_values: Vec<f64> = a_sums.iter().map(|&z| inst.f().eval(z)).collect();
                return Ok(FeasibleFamily {
                    supports,
                    a_sums,
                    f_values,
                });
            }
            choice[k] += 1;
            if choice[k] <= blocks.len(k) {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Solve the `j`-th lifting problem by enumeration: minimize
/// `f(a(S)) - sum_{i in S \ delta_j} eta_i` over `S` containing `delta_j`,
/// drawn from the first `j` items, one item per block. `eta_prefix` is
/// positional: `eta_prefix[r]` is the coefficient of `delta_{r+1}`.
pub fn lifting_oracle<T: Scalar>(
    blocks: &crate::instance::Blocks,
    a: &[T],
    f: &impl EvalFn<T>,
    delta: &Permutation,
    j: usize,
    eta_prefix: &[T],
) -> T {
    assert!(j >= 1 && j <= delta.len());
    assert!(eta_prefix.len() >= j - 1);
    let item = delta.item(j - 1);
    let kj = blocks.of_item(item);
    // Available items per other block among delta(j).
    let mut per_block: Vec<Vec<usize>> = vec![Vec::new(); blocks.t()];
    for r in 0..j {
        let i = delta.item(r);
        let k = blocks.of_item(i);
        if k != kj {
            per_block[k].push(r);
        }
    }
    let eta_of = |r: usize| eta_prefix[r].clone();
    let mut best: Option<T> = None;
    // Mixed-radix enumeration over the other blocks' options (skip or take).
    let options: Vec<&Vec<usize>> = per_block
        .iter()
        .filter(|v| !v.is_empty())
        .collect();
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut arg = a[item].clone();
        let mut rest = T::zero();
        for (slot, &opts) in options.iter().enumerate() {
            if choice[slot] > 0 {
                let r = opts[choice[slot] - 1];
                arg = arg + a[delta.item(r)].clone();
                rest = rest + eta_of(r);
            }
        }
        let value = f.eval_at(&arg) - rest;
        best = Some(match best {
            Some(cur) if cur <= value => cur,
            _ => value,
        });
        let mut s = 0;
        loop {
            if s == options.len() {
                return best.expect("at least the singleton candidate");
            }
            choice[s] += 1;
            if choice[s] <= options[s].len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
    }
}

/// Whole-hull membership by enumeration: bounds, GUB rows, and the lifted
/// cut of every partial ascending permutation.
pub fn membership_oracle(inst: &GubInstance, point: &Point, tol: f64) -> Result<bool> {
    if inst.n() > 8 {
        return Err(Error::TooLarge(format!(
            "membership oracle limited to n <= 8, got {}",
            inst.n()
        )));
    }
    let blocks = inst.blocks();
    let x = &point.x;
    if x.len() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            got: x.len(),
        });
    }
    if x.iter().any(|&v| v < -tol || v > 1.0 + tol) {
        return Ok(false);
    }
    for k in 0..blocks.t() {
        let sum: f64 = blocks.range(k).map(|i| x[i]).sum();
        if sum > 1.0 + tol {
            return Ok(false);
        }
    }
    // For X, membership reduces to the core set after shifting w by b'x.
    let (w, core) = shifted_core(inst, point);
    for delta in enumerate_partial_ascending(blocks, 1_000_000)? {
        let eta = lepi_fast_kernel(blocks, core.a(), core.f(), &delta)
            .expect("enumerated permutations are partial ascending");
        let rhs: f64 = eta.iter().zip(x).map(|(e, x)| e * x).sum();
        if w < rhs - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact optimum of a desk-scale model by enumerating all GUB-feasible
/// binary assignments (free binaries by bitmask). Ground truth for the
/// branch-and-cut tests.
pub fn exhaustive_solve(model: &crate::model::Model) -> Result<(f64, Vec<f64>)> {
    model.validate()?;
    let n = model.num_vars();
    let mut grouped = vec![false; n];
    for g in &model.gub_groups {
        for &v in g {
            grouped[v] = true;
        }
    }
    let free: Vec<usize> = model.binary_vars().filter(|&v| !grouped[v]).collect();
    let mut combos: u128 = 1u128 << free.len();
    for g in &model.gub_groups {
        combos *= g.len() as u128 + 1;
    }
    if combos > 1 << 22 {
        return Err(Error::TooLarge(format!(
            "{combos} assignments exceed the exhaustive guard"
        )));
    }
    let better = |a: f64, b: f64| match model.sense {
        crate::model::Sense::Minimize => a < b,
        crate::model::Sense::Maximize => a > b,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut x = vec![0.0; n];
    let groups = &model.gub_groups;
    let mut choice = vec![0usize; groups.len()];
    loop {
        for mask in 0..(1u64 << free.len()) {
            for (b, &v) in free.iter().enumerate() {
                x[v] = ((mask >> b) & 1) as f64;
            }
            if let Some((obj, full)) = model.evaluate_binary(&x) {
                if best.as_ref().map_or(true, |(b, _)| better(obj, *b)) {
                    best = Some((obj, full));
                }
            }
        }
        let mut k = 0;
        loop {
            if k == groups.len() {
                return best.ok_or(Error::InfeasibleModel);
            }
            if choice[k] > 0 {
                x[groups[k][choice[k] - 1]] = 0.0;
            }
            choice[k] += 1;
            if choice[k] <= groups[k].len() {
                x[groups[k][choice[k] - 1]] = 1.0;
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// `(w - b'x, core-without-b)` when `b` is present, identity otherwise.
pub(crate) fn shifted_core(inst: &GubInstance, point: &Point) -> (f64, GubInstance) {
    match inst.b() {
        Some(b) => {
            let shift: f64 = b.iter().zip(&point.x).map(|(b, x)| b * x).sum();
            (point.w - shift, inst.without_b())
        }
        None => (point.w, inst.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::lepi_coefficients_general;
    use crate::rng::Lcg64;
    use crate::testutil::{example1, example5};

    fn p1(order: &[usize]) -> Permutation {
        Permutation::new(order.iter().map(|&i| i - 1).collect()).unwrap()
    }

    fn set1(items: &[usize]) -> Vec<usize> {
        items.iter().map(|&i| i - 1).collect()
    }

    #[test]
    fn feasible_family_example1() {
        let fam = enumerate_feasible(&example1(), 100).unwrap();
        let want: Vec<Vec<usize>> = vec![
            vec![],
            set1(&[1]),
            set1(&[2]),
            set1(&[3]),
            set1(&[1, 3]),
            set1(&[2, 3]),
        ];
        assert_eq!(fam.supports, want);
    }

    #[test]
    fn feasible_family_sizes() {
        let single = GubInstance::canonical(
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            None,
            &[5],
            crate::concave::ConcaveFunction::neg_square(),
        )
        .unwrap();
        assert_eq!(enumerate_feasible(&single, 100).unwrap().len(), 6);
        assert_eq!(enumerate_feasible(&example5(), 100).unwrap().len(), 9);
        assert!(enumerate_feasible(&example1(), 3).is_err());
    }

    #[test]
    fn lifting_oracle_examples() {
        let inst = example1();
        let b = inst.blocks();
        let v = lifting_oracle(b, inst.a(), inst.f(), &p1(&[1, 2, 3]), 3, &[-1.0, -4.0]);
        assert_eq!(v, -21.0);
        let v = lifting_oracle(b, inst.a(), inst.f(), &p1(&[3, 2, 1]), 3, &[-9.0, -16.0]);
        assert_eq!(v, -7.0);
        // j = 1: the singleton is the only feasible set.
        for delta in crate::perm::enumerate_all(3, 10).unwrap() {
            let v = lifting_oracle(b, inst.a(), inst.f(), &delta, 1, &[]);
            assert_eq!(v, inst.f().eval(inst.a()[delta.item(0)]));
        }
    }

    #[test]
    fn membership_examples() {
        let inst = example1();
        assert!(membership_oracle(&inst, &Point::new(0.0, vec![0.0; 3]), 1e-9).unwrap());
        assert!(!membership_oracle(&inst, &Point::new(-3.0, vec![0.5, 0.5, 0.0]), 1e-9).unwrap());
        // Lattice points are members.
        let fam = enumerate_feasible(&inst, 100).unwrap();
        for (s, fv) in fam.supports.iter().zip(&fam.f_values) {
            let mut x = vec![0.0; 3];
            for &i in s {
                x[i] = 1.0;
            }
            assert!(membership_oracle(&inst, &Point::new(*fv, x), 1e-9).unwrap());
        }
    }

    #[test]
    fn membership_guard() {
        let inst = GubInstance::canonical(
            (1..=9).map(|v| v as f64).collect(),
            None,
            &[9],
            crate::concave::ConcaveFunction::neg_square(),
        )
        .unwrap();
        assert!(matches!(
            membership_oracle(&inst, &Point::new(0.0, vec![0.0; 9]), 1e-9),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn general_lifting_matches_oracle_small() {
        let mut rng = Lcg64::new(5150);
        for trial in 0..60 {
            let n = rng.int_in(1, 6) as usize;
            let inst = crate::testutil::random_instance(&mut rng, n, trial, false);
            for delta in crate::perm::enumerate_all(n, 720).unwrap() {
                let eta = lepi_coefficients_general(&inst, &delta).values;
                let mut prefix: Vec<f64> = Vec::new();
                for j in 1..=n {
                    let want =
                        lifting_oracle(inst.blocks(), inst.a(), inst.f(), &delta, j, &prefix);
                    let got = eta[delta.item(j - 1)];
                    assert!(
                        (want - got).abs() <= 1e-8 * (1.0 + want.abs()),
                        "coefficient mismatch at j={j}: {got} vs oracle {want}"
                    );
                    prefix.push(got);
                }
            }
        }
    }

}
