//! Shared fixtures for unit tests.

use crate::concave::ConcaveFunction;
use crate::instance::GubInstance;
use crate::rng::Lcg64;

/// n=3, N1={1,2}, N2={3}, a=(1,2,3), f=-z^2.
pub fn example1() -> GubInstance {
    GubInstance::canonical(
        vec![1.0, 2.0, 3.0],
        None,
        &[2, 1],
        ConcaveFunction::neg_square(),
    )
    .unwrap()
}

/// n=4, N1={1,2}, N2={3,4}, a=(1,2,3,4), f=min{2z, z+5}.
pub fn example5() -> GubInstance {
    GubInstance::canonical(
        vec![1.0, 2.0, 3.0, 4.0],
        None,
        &[2, 2],
        ConcaveFunction::piecewise_min(vec![(2.0, 0.0), (1.0, 5.0)]).unwrap(),
    )
    .unwrap()
}

/// Random block sizes covering exactly `n` items.
pub fn random_sizes(rng: &mut Lcg64, n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.int_in(1, left.min(4) as i64) as usize;
        sizes.push(s);
        left -= s;
    }
    sizes
}

/// Random canonical instance with integer-friendly data. `kind` cycles:
/// 0 = neg-square, 1 = neg-exp, 2 = scaled-sqrt, 3 = piecewise-linear-min.
pub fn random_instance(rng: &mut Lcg64, n: usize, kind: usize, with_b: bool) -> GubInstance {
    let sizes = random_sizes(rng, n);
    let f = match kind % 4 {
        0 => ConcaveFunction::neg_square(),
        1 => ConcaveFunction::neg_exp(),
        2 => ConcaveFunction::scaled_sqrt(rng.f64_in(0.5, 3.0)).unwrap(),
        _ => {
            // Small halves keep the exact path's rationals tiny.
            let mut pieces = Vec::new();
            let np = rng.int_in(1, 3);
            let mut alpha = rng.int_in(2, 12) as f64 / 2.0;
            let mut beta = 0.0f64;
            pieces.push((alpha, beta));
            for _ in 1..=np {
                let drop = rng.int_in(1, 4) as f64 / 2.0;
                let lift = rng.int_in(1, 10) as f64 / 2.0;
                alpha = (alpha - drop).max(-6.0);
                beta += lift;
                pieces.push((alpha, beta));
            }
            ConcaveFunction::piecewise_min(pieces).unwrap()
        }
    };
    let exactish = kind % 4 == 0 || kind % 4 == 3;
    let mut a = Vec::with_capacity(n);
    for range in
        crate::instance::Blocks::from_sizes(&sizes).unwrap().iter()
    {
        let mut block: Vec<f64> = range
            .map(|_| {
                if exactish {
                    rng.int_in(0, 12) as f64 / 2.0
                } else {
                    rng.f64_in(0.0, 6.0)
                }
            })
            .collect();
        block.sort_by(|x, y| x.partial_cmp(y).unwrap());
        a.extend(block);
    }
    let b = with_b.then(|| {
        (0..n)
            .map(|_| {
                if exactish {
                    rng.int_in(-10, 10) as f64 / 2.0
                } else {
                    rng.f64_in(-5.0, 5.0)
                }
            })
            .collect()
    });
    GubInstance::canonical(a, b, &sizes, f).unwrap()
}
