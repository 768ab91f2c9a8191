//! Direct minimization of `d*w + c'x` over the epigraph set, without any LP
//! machinery.
//!
//! For `d > 0` the optimum sits at an extreme point of the projected
//! support polytope; every extreme point is optimal for some linear
//! functional `lambda_1 * a(S) + lambda_2 * c(S)`, and sweeping the ratio
//! `theta = lambda_2 / lambda_1` across the breakpoints where the per-block
//! argmin can change yields a complete candidate list of quadratic size.

use crate::concave::EvalFn;
use crate::instance::{Blocks, GubInstance};
use crate::scalar::{Rat, Scalar};

/// Outcome of the direct optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum LinOptOutcome<T> {
    /// `d < 0`: `(w, x) = (1, 0)` is an improving ray.
    Unbounded,
    Optimal {
        value: T,
        /// Ascending optimal support.
        support: Vec<usize>,
        /// Epigraph value at the optimum, `f(a(S*))` (+ `b(S*)` with a
        /// linear term).
        w: T,
    },
}

pub type LinOptResult = LinOptOutcome<f64>;

/// Smallest-index argmin selection: per block pick the first item attaining
/// the minimal score, keep it only when the score is strictly negative.
fn score_candidate<T: Scalar>(blocks: &Blocks, score: impl Fn(usize) -> T) -> Vec<usize> {
    let mut s = Vec::new();
    for k in 0..blocks.t() {
        let mut best: Option<(T, usize)> = None;
        for i in blocks.range(k) {
            let v = score(i);
            match &best {
                Some((bv, _)) if *bv <= v => {}
                _ => best = Some((v, i)),
            }
        }
        if let Some((v, i)) = best {
            if v < T::zero() {
                s.push(i);
            }
        }
    }
    s
}

/// Breakpoints of the per-block argmin of `base_i + theta * c_i`, widened to
/// interval midpoints plus one representative on each side. Deduplicated, so
/// at most `(n + n^2)/2 + 1` values.
pub(crate) fn theta_midpoints<T: Scalar>(blocks: &Blocks, base: &[T], c: &[T]) -> Vec<T> {
    let mut thetas: Vec<T> = Vec::new();
    for k in 0..blocks.t() {
        let r = blocks.range(k);
        for i in r.clone() {
            for j in (i + 1)..r.end {
                if c[i] != c[j] {
                    thetas.push(
                        (base[i].clone() - base[j].clone()) / (c[j].clone() - c[i].clone()),
                    );
                }
            }
            if c[i] != T::zero() {
                thetas.push(-(base[i].clone() / c[i].clone()));
            }
        }
    }
    thetas.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    thetas.dedup();
    if thetas.is_empty() {
        return vec![T::zero()];
    }
    let two = T::from_int(2);
    let mut mids = Vec::with_capacity(thetas.len() + 1);
    mids.push(thetas[0].clone() - T::one());
    for pair in thetas.windows(2) {
        mids.push((pair[0].clone() + pair[1].clone()) / two.clone());
    }
    mids.push(thetas[thetas.len() - 1].clone() + T::one());
    mids
}

/// Generic optimizer core over the `X0` form.
pub fn optimize_kernel<T: Scalar>(
    blocks: &Blocks,
    a: &[T],
    f: &impl EvalFn<T>,
    d: &T,
    c: &[T],
) -> LinOptOutcome<T> {
    let zero = T::zero();
    if *d < zero {
        return LinOptOutcome::Unbounded;
    }
    let evaluate = |s: &[usize]| -> T {
        let mut arg = T::zero();
        let mut lin = T::zero();
        for &i in s {
            arg = arg + a[i].clone();
            lin = lin + c[i].clone();
        }
        d.clone() * f.eval_at(&arg) + lin
    };
    if *d == zero {
        let support = score_candidate(blocks, |i| c[i].clone());
        let value = evaluate(&support);
        let w = f.eval_at(&support.iter().fold(T::zero(), |acc, &i| acc + a[i].clone()));
        return LinOptOutcome::Optimal { value, support, w };
    }

    let mut candidates: Vec<Vec<usize>> = vec![Vec::new()];
    // lambda_1 = 0: the sign of lambda_2 selects c or -c.
    candidates.push(score_candidate(blocks, |i| c[i].clone()));
    candidates.push(score_candidate(blocks, |i| -c[i].clone()));
    // lambda_1 > 0: scores a + theta c.
    for theta in theta_midpoints(blocks, a, c) {
        candidates.push(score_candidate(blocks, |i| {
            a[i].clone() + theta.clone() * c[i].clone()
        }));
    }
    // lambda_1 < 0: same sweep on negated weights.
    let neg_a: Vec<T> = a.iter().map(|v| -v.clone()).collect();
    for theta in theta_midpoints(blocks, &neg_a, c) {
        candidates.push(score_candidate(blocks, |i| {
            neg_a[i].clone() + theta.clone() * c[i].clone()
        }));
    }

    let mut best: Option<(T, Vec<usize>)> = None;
    for s in candidates {
        let v = evaluate(&s);
        match &best {
            Some((bv, _)) if *bv <= v => {}
            _ => best = Some((v, s)),
        }
    }
    let (value, support) = best.expect("candidate list is never empty");
    let w = f.eval_at(&support.iter().fold(T::zero(), |acc, &i| acc + a[i].clone()));
    LinOptOutcome::Optimal { value, support, w }
}

/// Minimize `d*w + c'x` over the instance's epigraph set. An instance with
/// a linear term is folded into the core problem (`w = v + b'x` turns the
/// objective into `d*v + (c + d*b)'x` over the `X0` form); the reported `w`
/// is translated back.
pub fn optimize_linear(inst: &GubInstance, d: f64, c: &[f64]) -> LinOptResult {
    assert_eq!(c.len(), inst.n());
    match inst.b() {
        None => optimize_kernel(inst.blocks(), inst.a(), inst.f(), &d, c),
        Some(b) => {
            let folded: Vec<f64> = c.iter().zip(b).map(|(c, b)| c + d * b).collect();
            match optimize_kernel(inst.blocks(), inst.a(), inst.f(), &d, &folded) {
                LinOptOutcome::Unbounded => LinOptOutcome::Unbounded,
                LinOptOutcome::Optimal { value, support, w } => {
                    let bsum: f64 = support.iter().map(|&i| b[i]).sum();
                    LinOptOutcome::Optimal {
                        value,
                        w: w + bsum,
                        support,
                    }
                }
            }
        }
    }
}

/// Exact-rational optimizer over an exact view (no linear term).
pub fn optimize_linear_exact(
    view: &crate::instance::ExactView,
    d: &Rat,
    c: &[Rat],
) -> LinOptOutcome<Rat> {
    optimize_kernel(&view.blocks, &view.a, &view.f, d, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_feasible;
    use crate::rng::Lcg64;
    use crate::testutil::{example1, random_instance};

    fn brute_force(inst: &GubInstance, d: f64, c: &[f64]) -> (f64, Vec<usize>) {
        let fam = enumerate_feasible(inst, 1 << 20).unwrap();
        let mut best = (f64::INFINITY, Vec::new());
        for (s, fv) in fam.supports.iter().zip(&fam.f_values) {
            let lin: f64 = s.iter().map(|&i| c[i]).sum();
            let v = d * fv + lin;
            if v < best.0 {
                best = (v, s.clone());
            }
        }
        best
    }

    #[test]
    fn unbounded_below() {
        let inst = example1();
        assert_eq!(
            optimize_linear(&inst, -1.0, &[0.0, 0.0, 0.0]),
            LinOptOutcome::Unbounded
        );
    }

    #[test]
    fn zero_weight_closed_form() {
        let inst = example1();
        match optimize_linear(&inst, 0.0, &[-1.0, -2.0, 3.0]) {
            LinOptOutcome::Optimal { value, support, .. } => {
                assert_eq!(value, -2.0);
                assert_eq!(support, vec![1]);
            }
            _ => panic!("bounded"),
        }
    }

    #[test]
    fn pure_epigraph_minimum() {
        let inst = example1();
        match optimize_linear(&inst, 1.0, &[0.0, 0.0, 0.0]) {
            LinOptOutcome::Optimal { value, support, w } => {
                assert_eq!(value, -25.0);
                assert_eq!(support, vec![1, 2]);
                assert_eq!(w, -25.0);
            }
            _ => panic!("bounded"),
        }
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = Lcg64::new(60902);
        for trial in 0..400 {
            let n = rng.int_in(1, 10) as usize;
            let inst = random_instance(&mut rng, n, trial, false);
            let c: Vec<f64> = (0..n).map(|_| rng.f64_in(-8.0, 8.0)).collect();
            let d = match trial % 3 {
                0 => 0.0,
                1 => rng.f64_in(0.01, 4.0),
                _ => rng.f64_in(0.01, 1.0),
            };
            let (want, _) = brute_force(&inst, d, &c);
            match optimize_linear(&inst, d, &c) {
                LinOptOutcome::Optimal { value, support, .. } => {
                    assert!(
                        (value - want).abs() <= 1e-8 * (1.0 + want.abs()),
                        "n={n} d={d} got {value}, brute force {want}"
                    );
                    // reported support must reproduce the reported value
                    let lin: f64 = support.iter().map(|&i| c[i]).sum();
                    let v = d * inst.f().eval(inst.a_sum(&support)) + lin;
                    assert!((v - value).abs() <= 1e-9 * (1.0 + value.abs()));
                }
                _ => panic!("d >= 0 is bounded"),
            }
        }
    }

    #[test]
    fn folded_linear_term_matches_brute_force() {
        let mut rng = Lcg64::new(80111);
        for trial in 0..200 {
            let n = rng.int_in(1, 8) as usize;
            let inst = random_instance(&mut rng, n, trial, true);
            let c: Vec<f64> = (0..n).map(|_| rng.f64_in(-8.0, 8.0)).collect();
            let d = rng.f64_in(0.0, 3.0);
            let fam = enumerate_feasible(&inst, 1 << 20).unwrap();
            let b = inst.b().unwrap();
            let mut want = f64::INFINITY;
            for (s, fv) in fam.supports.iter().zip(&fam.f_values) {
                let lin: f64 = s.iter().map(|&i| c[i]).sum();
                let bs: f64 = s.iter().map(|&i| b[i]).sum();
                want = want.min(d * (fv + bs) + lin);
            }
            match optimize_linear(&inst, d, &c) {
                LinOptOutcome::Optimal { value, .. } => {
                    assert!((value - want).abs() <= 1e-8 * (1.0 + want.abs()));
                }
                _ => panic!("bounded"),
            }
        }
    }

    #[test]
    fn candidate_count_bound() {
        let mut rng = Lcg64::new(424242);
        for trial in 0..200 {
            let n = rng.int_in(1, 10) as usize;
            let inst = random_instance(&mut rng, n, trial, false);
            let c: Vec<f64> = (0..n).map(|_| rng.f64_in(-5.0, 5.0)).collect();
            let bound = (n + n * n) / 2 + 1;
            let mids = theta_midpoints(inst.blocks(), inst.a(), &c);
            assert!(mids.len() <= bound, "case (iii): {} > {bound}", mids.len());
            let neg_a: Vec<f64> = inst.a().iter().map(|v| -v).collect();
            let mids = theta_midpoints(inst.blocks(), &neg_a, &c);
            assert!(mids.len() <= bound, "case (iv): {} > {bound}", mids.len());
        }
    }
}
