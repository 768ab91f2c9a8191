//! Dense two-phase primal simplex with general variable bounds.
//!
//! Built for desk-scale branch-and-cut relaxations: a full tableau, Dantzig
//! pricing with a Bland fallback once the objective stalls, and artificial
//! variables only on rows whose initial slack is out of bounds. Bounds may
//! be infinite; nonbasic variables sit at a finite bound (free ones at 0).

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-10;
const DUAL_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// `minimize objective . x  s.t.  rows, lower <= x <= upper`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    Free,
}

struct Tableau {
    m: usize,
    total: usize,
    tab: Vec<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    cost: Vec<f64>,
    red: Vec<f64>,
    bland: bool,
    stall: usize,
    iterations: usize,
    max_iterations: usize,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.num_vars;
    let m = lp.rows.len();
    debug_assert_eq!(lp.objective.len(), n);
    debug_assert_eq!(lp.lower.len(), n);
    debug_assert_eq!(lp.upper.len(), n);
    for i in 0..n {
        if lp.lower[i] > lp.upper[i] + 1e-12 {
            return Ok(LpOutcome::Infeasible);
        }
    }

    // Layout: structural | slack per row | artificials appended on demand.
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    let mut tab = vec![vec![0.0; n + m]; m];
    for (r, row) in lp.rows.iter().enumerate() {
        for &(j, v) in &row.coeffs {
            debug_assert!(j < n);
            tab[r][j] += v;
        }
        tab[r][n + r] = 1.0;
    }
    for row in &lp.rows {
        match row.sense {
            RowSense::Le => {
                lower.push(0.0);
                upper.push(f64::INFINITY);
            }
            RowSense::Ge => {
                lower.push(f64::NEG_INFINITY);
                upper.push(0.0);
            }
            RowSense::Eq => {
                lower.push(0.0);
                upper.push(0.0);
            }
        }
    }

    let mut state = Vec::with_capacity(n + m);
    for j in 0..n {
        state.push(if lower[j].is_finite() {
            VarState::AtLower
        } else if upper[j].is_finite() {
            VarState::AtUpper
        } else {
            VarState::Free
        });
    }
    let nb_value = |state: &VarState, j: usize, lower: &[f64], upper: &[f64]| match state {
        VarState::AtLower => lower[j],
        VarState::AtUpper => upper[j],
        VarState::Free => 0.0,
        VarState::Basic(_) => unreachable!(),
    };

    // Row activities at the initial nonbasic point decide which rows need an
    // artificial.
    let mut basis = vec![usize::MAX; m];
    let mut xb = vec![0.0; m];
    let mut artificials = Vec::new();
    for r in 0..m {
        let act: f64 = (0..n)
            .map(|j| tab[r][j] * nb_value(&state[j], j, &lower, &upper))
            .sum();
        let s = lp.rows[r].rhs - act;
        let (ls, us) = (lower[n + r], upper[n + r]);
        if s >= ls - FEAS_TOL && s <= us + FEAS_TOL {
            state.push(VarState::Basic(r));
            basis[r] = n + r;
            xb[r] = s.min(us).max(ls);
        } else {
            // Park the slack at the violated bound; the artificial absorbs
            // the residual with a positive value.
            let bound = if s > us { us } else { ls };
            state.push(if s > us {
                VarState::AtUpper
            } else {
                VarState::AtLower
            });
            let residual = s - bound;
            artificials.push((r, residual.signum()));
            basis[r] = usize::MAX; // filled below
            xb[r] = residual.abs();
        }
    }

    let mut total = n + m;
    for &(r, sigma) in &artificials {
        for row in tab.iter_mut() {
            row.push(0.0);
        }
        tab[r][total] = sigma;
        lower.push(0.0);
        upper.push(f64::INFINITY);
        state.push(VarState::Basic(r));
        basis[r] = total;
        total += 1;
    }
    // Normalize rows so basic artificial columns are +1.
    for &(r, sigma) in &artificials {
        if sigma < 0.0 {
            for v in tab[r].iter_mut() {
                *v = -*v;
            }
        }
    }

    let mut t = Tableau {
        m,
        total,
        tab,
        lower,
        upper,
        state,
        basis,
        xb,
        cost: vec![0.0; total],
        red: vec![0.0; total],
        bland: false,
        stall: 0,
        iterations: 0,
        max_iterations: 20_000 + 200 * (m + total),
    };

    if !artificials.is_empty() {
        for j in n + m..total {
            t.cost[j] = 1.0;
        }
        t.recompute_reduced_costs();
        match t.run()? {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => {
                return Err(Error::LpStalled("phase 1 reported unbounded".into()))
            }
        }
        let infeas: f64 = (n + m..total)
            .map(|j| t.value_of(j).max(0.0))
            .sum();
        let scale = 1.0 + lp.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Freeze artificials at zero for phase 2.
        for j in n + m..total {
            t.lower[j] = 0.0;
            t.upper[j] = 0.0;
            if !matches!(t.state[j], VarState::Basic(_)) {
                t.state[j] = VarState::AtLower;
            }
        }
    }

    for j in 0..total {
        t.cost[j] = if j < n { lp.objective[j] } else { 0.0 };
    }
    t.bland = false;
    t.stall = 0;
    t.recompute_reduced_costs();
    match t.run()? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => return Ok(LpOutcome::Unbounded),
    }

    let x: Vec<f64> = (0..n).map(|j| t.value_of(j)).collect();
    let value = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpOutcome::Optimal { value, x })
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn value_of(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Basic(r) => self.xb[r],
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::Free => 0.0,
        }
    }

    fn recompute_reduced_costs(&mut self) {
        for j in 0..self.total {
            self.red[j] = self.cost[j];
        }
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                for j in 0..self.total {
                    self.red[j] -= cb * self.tab[r][j];
                }
            }
        }
    }

    /// Entering variable and its direction of motion: +1 when increasing
    /// from a lower bound, -1 when decreasing from an upper bound.
    fn choose_entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.total {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            if self.upper[j] - self.lower[j] <= 0.0 {
                continue; // fixed
            }
            let d = self.red[j];
            let candidate = match self.state[j] {
                VarState::AtLower => (d < -DUAL_TOL).then_some((1.0, -d)),
                VarState::AtUpper => (d > DUAL_TOL).then_some((-1.0, d)),
                VarState::Free => {
                    if d < -DUAL_TOL {
                        Some((1.0, -d))
                    } else if d > DUAL_TOL {
                        Some((-1.0, d))
                    } else {
                        None
                    }
                }
                VarState::Basic(_) => None,
            };
            if let Some((dir, score)) = candidate {
                if self.bland {
                    return Some((j, dir));
                }
                match best {
                    Some((_, _, s)) if s >= score => {}
                    _ => best = Some((j, dir, score)),
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn run(&mut self) -> Result<PhaseEnd> {
        loop {
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::LpStalled(format!(
                    "no convergence after {} pivots",
                    self.iterations
                )));
            }
            let Some((enter, dir)) = self.choose_entering() else {
                return Ok(PhaseEnd::Optimal);
            };

            // Ratio test: the entering step is capped by its own opposite
            // bound and by each basic variable hitting a finite bound. Ties
            // prefer pivoting over a bound flip, then the larger pivot
            // magnitude (smallest basic index under Bland's rule).
            let span = self.upper[enter] - self.lower[enter];
            let mut best_step = span;
            let mut leaving: Option<(usize, bool, f64)> = None; // (row, hits_upper, |pivot|)
            for r in 0..self.m {
                let coef = self.tab[r][enter];
                if coef.abs() <= PIVOT_EPS {
                    continue;
                }
                let rate = -dir * coef;
                let bv = self.basis[r];
                let (step, hits_upper) = if rate < 0.0 {
                    if self.lower[bv].is_finite() {
                        ((self.xb[r] - self.lower[bv]) / -rate, false)
                    } else {
                        continue;
                    }
                } else if self.upper[bv].is_finite() {
                    ((self.upper[bv] - self.xb[r]) / rate, true)
                } else {
                    continue;
                };
                let step = step.max(0.0);
                if step > best_step + 1e-12 {
                    continue;
                }
                let take = if step < best_step - 1e-12 {
                    true
                } else {
                    match leaving {
                        None => true, // prefer a pivot over a bound flip
                        Some((lr, _, lt)) => {
                            if self.bland {
                                self.basis[r] < self.basis[lr]
                            } else {
                                coef.abs() > lt
                            }
                        }
                    }
                };
                if take {
                    best_step = step.min(best_step);
                    leaving = Some((r, hits_upper, coef.abs()));
                }
            }

            if best_step.is_infinite() {
                return Ok(PhaseEnd::Unbounded);
            }
            let step = best_step.max(0.0);
            self.stall = if step > 1e-11 { 0 } else { self.stall + 1 };
            if self.stall > 500 {
                self.bland = true;
            }

            match leaving {
                None => {
                    // Bound flip: walk across and land on the other bound.
                    for r in 0..self.m {
                        self.xb[r] -= self.tab[r][enter] * dir * step;
                    }
                    self.state[enter] = match self.state[enter] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        other => other,
                    };
                }
                Some((prow, hits_upper, _)) => {
                    let start = self.value_of(enter);
                    for r in 0..self.m {
                        self.xb[r] -= self.tab[r][enter] * dir * step;
                    }
                    let out = self.basis[prow];
                    self.state[out] = if hits_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.basis[prow] = enter;
                    self.state[enter] = VarState::Basic(prow);
                    self.xb[prow] = start + dir * step;
                    self.pivot(prow, enter);
                }
            }
        }
    }

    fn pivot(&mut self, prow: usize, enter: usize) {
        let piv = self.tab[prow][enter];
        debug_assert!(piv.abs() > PIVOT_EPS);
        let inv = 1.0 / piv;
        for v in self.tab[prow].iter_mut() {
            *v *= inv;
        }
        let pivot_row = std::mem::take(&mut self.tab[prow]);
        for (r, row) in self.tab.iter_mut().enumerate() {
            if r == prow {
                continue;
            }
            let factor = row[enter];
            if factor.abs() > 1e-13 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[enter] = 0.0;
            }
        }
        let factor = self.red[enter];
        if factor.abs() > 1e-13 {
            for (v, p) in self.red.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.red[enter] = 0.0;
        }
        self.tab[prow] = pivot_row;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(
        num_vars: usize,
        objective: Vec<f64>,
        bounds: Vec<(f64, f64)>,
        rows: Vec<LpRow>,
    ) -> LinearProgram {
        LinearProgram {
            num_vars,
            objective,
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
            rows,
        }
    }

    fn row(coeffs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) -> LpRow {
        LpRow { coeffs, sense, rhs }
    }

    #[test]
    fn textbook_maximum() {
        // max x + 2y <=> min -x - 2y; x + y <= 4, 2x + y >= 2, 0<=x, 0<=y<=3.
        let p = lp(
            2,
            vec![-1.0, -2.0],
            vec![(0.0, f64::INFINITY), (0.0, 3.0)],
            vec![
                row(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 4.0),
                row(vec![(0, 2.0), (1, 1.0)], RowSense::Ge, 2.0),
            ],
        );
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert!((value + 7.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9);
                assert!((x[1] - 3.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn box_and_gub_vertex() {
        // min -(x1 + x2 + x3), x1 + x2 <= 1, all in [0, 1].
        let p = lp(
            3,
            vec![-1.0, -1.0, -1.0],
            vec![(0.0, 1.0); 3],
            vec![row(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0)],
        );
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert!((value + 2.0).abs() < 1e-9);
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
                assert!((x[2] - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equality_rows_need_phase1() {
        // min x + y, x + y = 2, x - y = 0 -> x = y = 1.
        let p = lp(
            2,
            vec![1.0, 1.0],
            vec![(0.0, f64::INFINITY); 2],
            vec![
                row(vec![(0, 1.0), (1, 1.0)], RowSense::Eq, 2.0),
                row(vec![(0, 1.0), (1, -1.0)], RowSense::Eq, 0.0),
            ],
        );
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert!((value - 2.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9);
                assert!((x[1] - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        let p = lp(
            1,
            vec![1.0],
            vec![(0.0, 1.0)],
            vec![row(vec![(0, 1.0)], RowSense::Ge, 2.0)],
        );
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let p = lp(
            1,
            vec![-1.0],
            vec![(0.0, f64::INFINITY)],
            vec![],
        );
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variable_pinned_by_rows() {
        // min w subject to w >= -x - 1 and w >= x - 3, x in [0, 2], w free.
        // Optimum w = -2 at x = 1.
        let p = lp(
            2,
            vec![1.0, 0.0],
            vec![(f64::NEG_INFINITY, f64::INFINITY), (0.0, 2.0)],
            vec![
                row(vec![(0, 1.0), (1, 1.0)], RowSense::Ge, -1.0),
                row(vec![(0, 1.0), (1, -1.0)], RowSense::Ge, -3.0),
            ],
        );
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert!((value + 2.0).abs() < 1e-9, "value {value}");
                assert!((x[1] - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_equal_costs_terminate() {
        // Two identical columns; degenerate vertices must not cycle.
        let p = lp(
            2,
            vec![1.0, 1.0],
            vec![(0.0, 1.0); 2],
            vec![
                row(vec![(0, 1.0), (1, 1.0)], RowSense::Ge, 1.0),
                row(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0),
            ],
        );
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_lps_match_enumeration() {
        // Random small LPs over binaries' box with <= rows; compare against
        // brute-force vertex enumeration over the box corners when all rows
        // are satisfied (the LP optimum can be fractional, so only check
        // bound direction and feasibility of the LP point).
        use crate::rng::Lcg64;
        let mut rng = Lcg64::new(8);
        for _ in 0..200 {
            let n = rng.int_in(1, 6) as usize;
            let m = rng.int_in(0, 4) as usize;
            let obj: Vec<f64> = (0..n).map(|_| rng.f64_in(-3.0, 3.0)).collect();
            let rows: Vec<LpRow> = (0..m)
                .map(|_| {
                    let coeffs: Vec<(usize, f64)> =
                        (0..n).map(|j| (j, rng.f64_in(-2.0, 2.0))).collect();
                    row(coeffs, RowSense::Le, rng.f64_in(0.5, 3.0))
                })
                .collect();
            let p = lp(n, obj.clone(), vec![(0.0, 1.0); n], rows.clone());
            let outcome = solve_lp(&p).unwrap();
            let LpOutcome::Optimal { value, x } = outcome else {
                panic!("box LP with rhs > 0 is feasible and bounded");
            };
            // LP point feasible.
            for r in &rows {
                let act: f64 = r.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
                assert!(act <= r.rhs + 1e-7);
            }
            for &v in &x {
                assert!((-1e-9..=1.0 + 1e-9).contains(&v));
            }
            // LP value lower-bounds every feasible binary corner.
            for mask in 0..(1u32 << n) {
                let corner: Vec<f64> =
                    (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
                let ok = rows.iter().all(|r| {
                    r.coeffs.iter().map(|&(j, v)| v * corner[j]).sum::<f64>() <= r.rhs + 1e-9
                });
                if ok {
                    let cv: f64 = obj.iter().zip(&corner).map(|(c, x)| c * x).sum();
                    assert!(value <= cv + 1e-7);
                }
            }
        }
    }
}
