//! Cut coefficient computation.
//!
//! Three routes produce coefficient vectors:
//! - `epi_*`: the classic polymatroid marginals of the permutation,
//! - `lepi_*_general`: sequential lifting under the GUB constraints via the
//!   tight sets `W_j`, quadratic in `n`,
//! - `lepi_*_fast`: the linear-time recursion available for partial
//!   ascending permutations.
//!
//! The kernels are generic over the scalar so the exact-rational path shares
//! the exact same code.

use crate::concave::EvalFn;
use crate::error::{Error, Result};
use crate::inequality::{CutCoefficients, CutKind};
use crate::instance::{Blocks, ExactView, GubInstance};
use crate::perm::{frontier_sets, is_partial_ascending, Permutation};
use crate::scalar::{Rat, Scalar};

/// Marginal-gain coefficients `rho_{delta_j} = f(a(delta(j))) - f(a(delta(j-1)))`,
/// item-indexed.
pub fn epi_kernel<T: Scalar>(
    a: &[T],
    f: &impl EvalFn<T>,
    delta: &Permutation,
) -> Vec<T> {
    let n = delta.len();
    let mut out = vec![T::zero(); n];
    let mut prefix = T::zero();
    let mut prev = f.eval_at(&prefix);
    for j in 0..n {
        let item = delta.item(j);
        prefix = prefix + a[item].clone();
        let cur = f.eval_at(&prefix);
        out[item] = cur.clone() - prev;
        prev = cur;
    }
    out
}

/// Lifting coefficients for an arbitrary permutation:
/// `eta_{delta_j} = f(a(W_j)) - sum_{i in W_j \ delta_j} eta_i`,
/// filled in lifting order.
pub fn lepi_general_kernel<T: Scalar>(
    blocks: &Blocks,
    a: &[T],
    f: &impl EvalFn<T>,
    delta: &Permutation,
) -> Vec<T> {
    let n = delta.len();
    let fs = frontier_sets(blocks, delta);
    let mut eta = vec![T::zero(); n];
    for j in 0..n {
        let item = delta.item(j);
        let wj = &fs.w[j];
        let mut arg = T::zero();
        let mut rest = T::zero();
        for &i in wj {
            arg = arg + a[i].clone();
            if i != item {
                rest = rest + eta[i].clone();
            }
        }
        eta[item] = f.eval_at(&arg) - rest;
    }
    eta
}

/// Linear-time lifting coefficients for a partial ascending permutation,
/// maintaining the frontier weight `A_j = a(U_j)`:
/// block-first items take `f(A_j) - f(A_{j-1})`, later items add the
/// coefficient of their block predecessor.
pub fn lepi_fast_kernel<T: Scalar>(
    blocks: &Blocks,
    a: &[T],
    f: &impl EvalFn<T>,
    delta: &Permutation,
) -> Result<Vec<T>> {
    if !is_partial_ascending(blocks, delta) {
        return Err(Error::NotPartialAscending);
    }
    let n = delta.len();
    let mut eta = vec![T::zero(); n];
    let mut weight = T::zero();
    let mut prev = f.eval_at(&weight);
    for j in 0..n {
        let item = delta.item(j);
        let first = blocks.is_block_first(item);
        weight = if first {
            weight + a[item].clone()
        } else {
            weight + a[item].clone() - a[item - 1].clone()
        };
        let cur = f.eval_at(&weight);
        let gain = cur.clone() - prev;
        eta[item] = if first {
            gain
        } else {
            gain + eta[item - 1].clone()
        };
        prev = cur;
    }
    Ok(eta)
}

pub fn epi_coefficients(inst: &GubInstance, delta: &Permutation) -> CutCoefficients {
    CutCoefficients {
        kind: CutKind::Epi,
        delta: delta.clone(),
        values: epi_kernel(inst.a(), inst.f(), delta),
    }
}

pub fn lepi_coefficients_general(inst: &GubInstance, delta: &Permutation) -> CutCoefficients {
    CutCoefficients {
        kind: CutKind::Lepi,
        delta: delta.clone(),
        values: lepi_general_kernel(inst.blocks(), inst.a(), inst.f(), delta),
    }
}

pub fn lepi_coefficients_fast(inst: &GubInstance, delta: &Permutation) -> Result<CutCoefficients> {
    Ok(CutCoefficients {
        kind: CutKind::Lepi,
        delta: delta.clone(),
        values: lepi_fast_kernel(inst.blocks(), inst.a(), inst.f(), delta)?,
    })
}

/// Exact-rational variants, for piecewise-linear / polynomial instances.
pub fn epi_coefficients_exact(view: &ExactView, delta: &Permutation) -> Vec<Rat> {
    epi_kernel(&view.a, &view.f, delta)
}

pub fn lepi_general_exact(view: &ExactView, delta: &Permutation) -> Vec<Rat> {
    lepi_general_kernel(&view.blocks, &view.a, &view.f, delta)
}

pub fn lepi_fast_exact(view: &ExactView, delta: &Permutation) -> Result<Vec<Rat>> {
    lepi_fast_kernel(&view.blocks, &view.a, &view.f, delta)
}

/// Shift a cut for the `X0` core onto the set with the linear term: the
/// coefficient of each item gains `b_i`.
pub fn shift_for_x(coeffs: &CutCoefficients, inst: &GubInstance) -> CutCoefficients {
    let b = inst.b().expect("shift_for_x requires an instance with b");
    let values = coeffs
        .values
        .iter()
        .zip(b)
        .map(|(v, b)| v + b)
        .collect();
    let kind = match coeffs.kind {
        CutKind::Epi => CutKind::EpiPrime,
        CutKind::Lepi => CutKind::LepiPrime,
        other => other,
    };
    CutCoefficients {
        kind,
        delta: coeffs.delta.clone(),
        values,
    }
}

/// Test utility: the lifted coefficients dominate the marginals,
/// `eta_{delta_j} >= rho_{delta_j}` for every position.
pub fn dominance_check(inst: &GubInstance, delta: &Permutation) -> bool {
    let eta = lepi_general_kernel(inst.blocks(), inst.a(), inst.f(), delta);
    let rho = epi_kernel(inst.a(), inst.f(), delta);
    // Tolerance scaled by the magnitude of the evaluated values.
    let scale = eta
        .iter()
        .chain(rho.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    eta.iter()
        .zip(rho.iter())
        .all(|(e, r)| *e >= *r - 1e-9 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave::ConcaveFunction;
    use crate::rng::Lcg64;
    use crate::testutil::{example1, example5, random_instance};

    fn p1(order: &[usize]) -> Permutation {
        Permutation::new(order.iter().map(|&i| i - 1).collect()).unwrap()
    }

    #[test]
    fn epi_example1_all_permutations() {
        let inst = example1();
        let cases: [(&[usize], [f64; 3]); 6] = [
            (&[1, 2, 3], [-1.0, -8.0, -27.0]),
            (&[1, 3, 2], [-1.0, -20.0, -15.0]),
            (&[2, 1, 3], [-5.0, -4.0, -27.0]),
            (&[2, 3, 1], [-11.0, -4.0, -21.0]),
            (&[3, 1, 2], [-7.0, -20.0, -9.0]),
            (&[3, 2, 1], [-11.0, -16.0, -9.0]),
        ];
        for (order, want) in cases {
            let got = epi_coefficients(&inst, &p1(order));
            assert_eq!(got.values, want, "delta = {order:?}");
        }
    }

    #[test]
    fn epi_single_item() {
        let inst = GubInstance::canonical(
            vec![2.0],
            None,
            &[1],
            ConcaveFunction::neg_square(),
        )
        .unwrap();
        let got = epi_coefficients(&inst, &Permutation::identity(1));
        assert_eq!(got.values, vec![-4.0]);
    }

    #[test]
    fn lepi_example1_all_permutations() {
        let inst = example1();
        let cases: [(&[usize], [f64; 3]); 6] = [
            (&[1, 2, 3], [-1.0, -4.0, -21.0]),
            (&[1, 3, 2], [-1.0, -10.0, -15.0]),
            (&[2, 1, 3], [-1.0, -4.0, -21.0]),
            (&[2, 3, 1], [-1.0, -4.0, -21.0]),
            (&[3, 1, 2], [-7.0, -16.0, -9.0]),
            (&[3, 2, 1], [-7.0, -16.0, -9.0]),
        ];
        for (order, want) in cases {
            let got = lepi_coefficients_general(&inst, &p1(order));
            assert_eq!(got.values, want, "delta = {order:?}");
        }
    }

    #[test]
    fn lepi_fast_examples() {
        let inst = example5();
        let got = lepi_coefficients_fast(&inst, &p1(&[1, 2, 3, 4])).unwrap();
        assert_eq!(got.values, vec![2.0, 4.0, 6.0, 7.0]);
        let got = lepi_coefficients_fast(&inst, &p1(&[1, 3, 2, 4])).unwrap();
        assert_eq!(got.values, vec![2.0, 4.0, 6.0, 7.0]);

        let inst = example1();
        let got = lepi_coefficients_fast(&inst, &p1(&[3, 1, 2])).unwrap();
        assert_eq!(got.values, vec![-7.0, -16.0, -9.0]);

        assert!(matches!(
            lepi_coefficients_fast(&inst, &p1(&[2, 1, 3])),
            Err(Error::NotPartialAscending)
        ));
    }

    #[test]
    fn shift_examples() {
        let inst = example1();
        let with_b = GubInstance::canonical(
            vec![1.0, 2.0, 3.0],
            Some(vec![1.0, 1.0, 1.0]),
            &[2, 1],
            ConcaveFunction::neg_square(),
        )
        .unwrap();
        let lepi = lepi_coefficients_general(&inst, &p1(&[1, 2, 3]));
        let shifted = shift_for_x(&lepi, &with_b);
        assert_eq!(shifted.values, vec![0.0, -3.0, -20.0]);
        assert_eq!(shifted.kind, CutKind::LepiPrime);

        let zero_b = GubInstance::canonical(
            vec![1.0, 2.0, 3.0],
            Some(vec![0.0, 0.0, 0.0]),
            &[2, 1],
            ConcaveFunction::neg_square(),
        )
        .unwrap();
        let same = shift_for_x(&lepi, &zero_b);
        assert_eq!(same.values, lepi.values);
    }

    #[test]
    fn shifted_cut_valid_on_binary_points() {
        // LEPI' validity: sum_{i in S} (eta_i + b_i) <= f(a(S)) + b(S) for
        // every GUB-feasible support S.
        let mut rng = Lcg64::new(99);
        for trial in 0..100 {
            let n = rng.int_in(1, 6) as usize;
            let inst = random_instance(&mut rng, n, trial, true);
            let feas = crate::oracle::enumerate_feasible(&inst, 1 << 20).unwrap();
            let deltas =
                crate::perm::enumerate_partial_ascending(inst.blocks(), 10_000).unwrap();
            for delta in deltas.iter().take(20) {
                let cut = shift_for_x(&lepi_coefficients_general(&inst, delta), &inst);
                for s in &feas.supports {
                    let lhs: f64 = s.iter().map(|&i| cut.values[i]).sum();
                    let mut x = vec![0.0; n];
                    for &i in s {
                        x[i] = 1.0;
                    }
                    let rhs = inst.membership_side(&x);
                    assert!(
                        lhs <= rhs + 1e-8,
                        "invalid shifted cut at S = {s:?}: {lhs} > {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn dominance_examples() {
        let inst = example1();
        assert!(dominance_check(&inst, &p1(&[1, 2, 3])));
        // Linear f: eta equals rho exactly.
        let lin = GubInstance::canonical(
            vec![1.0, 2.0, 4.0],
            None,
            &[2, 1],
            ConcaveFunction::piecewise_min(vec![(3.0, 0.0)]).unwrap(),
        )
        .unwrap();
        for delta in crate::perm::enumerate_all(3, 10).unwrap() {
            let eta = lepi_coefficients_general(&lin, &delta).values;
            let rho = epi_coefficients(&lin, &delta).values;
            assert_eq!(eta, rho);
            assert!(dominance_check(&lin, &delta));
        }
    }

    #[test]
    fn dominance_random() {
        let mut rng = Lcg64::new(7);
        for trial in 0..1000 {
            let n = rng.int_in(1, 8) as usize;
            let inst = random_instance(&mut rng, n, trial, false);
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.int_in(0, i as i64) as usize;
                order.swap(i, j);
            }
            let delta = Permutation::new(order).unwrap();
            assert!(dominance_check(&inst, &delta));
        }
    }

    #[test]
    fn fast_equals_general_on_partial_ascending() {
        let mut rng = Lcg64::new(301);
        for trial in 0..200 {
            let n = rng.int_in(1, 12) as usize;
            let inst = random_instance(&mut rng, n, trial, false);
            let deltas =
                crate::perm::enumerate_partial_ascending(inst.blocks(), 2000);
            let deltas = match deltas {
                Ok(d) => d,
                Err(_) => continue,
            };
            for delta in deltas {
                let fast = lepi_coefficients_fast(&inst, &delta).unwrap().values;
                let gen = lepi_coefficients_general(&inst, &delta).values;
                for (f, g) in fast.iter().zip(&gen) {
                    assert!((f - g).abs() <= 1e-9 * (1.0 + f.abs().max(g.abs())));
                }
            }
        }
    }

    #[test]
    fn seed_holds_with_equality_at_origin() {
        // pi0 = 0 and the cut is tight at x = 0.
        let inst = example1();
        let cut = lepi_coefficients_general(&inst, &p1(&[1, 2, 3])).into_epigraph_cut();
        assert_eq!(cut.pi0, 0.0);
        assert_eq!(cut.violation(0.0, &[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn exact_matches_float_on_example5() {
        let inst = example5();
        let view = inst.exact_view().unwrap();
        for delta in crate::perm::enumerate_all(4, 100).unwrap() {
            let exact = lepi_general_exact(&view, &delta);
            let float = lepi_coefficients_general(&inst, &delta).values;
            for (e, f) in exact.iter().zip(&float) {
                assert_eq!(e.to_f64(), *f);
            }
        }
    }
}
