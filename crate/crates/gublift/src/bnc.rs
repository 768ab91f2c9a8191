//! Branch-and-cut over models with epigraph substructures.
//!
//! Nodes are explored depth-first with periodic best-bound restarts; every
//! node LP carries the full cut pool. Fractional points are separated with
//! the configured family; integral candidates are always checked against
//! the true nonlinear rows and rejected with lazy cuts, which is what makes
//! the `none` family a correct plain branch-and-bound.

use crate::error::{Error, Result};
use crate::inequality::{CutKind, CutMode, Inequality};
use crate::instance::Point;
use crate::lifting::{lepi_coefficients_fast, shift_for_x};
use crate::model::{
    CutCounts, Model, Sense, SolveReport, SolveStatus, SubMode, Substructure, VarKind,
};
use crate::perm::Permutation;
use crate::separation::{separate, separate_epi, SeparationResult};
use crate::simplex::{solve_lp, LinearProgram, LpOutcome, LpRow, RowSense};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutFamily {
    None,
    Epi,
    Lepi,
}

impl std::str::FromStr for CutFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(CutFamily::None),
            "epi" => Ok(CutFamily::Epi),
            "lepi" => Ok(CutFamily::Lepi),
            other => Err(format!("unknown cut family '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BncConfig {
    pub cut_family: CutFamily,
    /// Minimum violation for a fractional cut to enter the pool.
    pub violation_tol: f64,
    /// Integrality tolerance on binaries.
    pub int_tol: f64,
    /// Acceptance tolerance for integral candidates against the true
    /// nonlinear rows (scaled by magnitude). Matches the tolerance used by
    /// [`Model::evaluate_binary`].
    pub feas_tol: f64,
    pub node_limit: u64,
    pub time_limit_s: Option<f64>,
    /// Separation rounds at the root / at other nodes.
    pub root_cut_rounds: usize,
    pub node_cut_rounds: usize,
    /// Per-substructure cap on cuts added at a single node.
    pub max_cuts_per_sub_per_node: usize,
}

impl Default for BncConfig {
    fn default() -> Self {
        BncConfig {
            cut_family: CutFamily::Lepi,
            violation_tol: 1e-6,
            int_tol: 1e-6,
            feas_tol: crate::model::EVAL_FEAS_TOL,
            node_limit: 500_000,
            time_limit_s: None,
            root_cut_rounds: 200,
            node_cut_rounds: 10,
            max_cuts_per_sub_per_node: 10,
        }
    }
}

struct Node {
    /// (binary var, fixed value 0/1) along the path from the root.
    fixings: Vec<(usize, u8)>,
    /// LP bound inherited from the parent (internal min sense).
    bound: f64,
}

struct Worker<'a> {
    model: &'a Model,
    config: &'a BncConfig,
    /// +1 for minimization, -1 for maximization; the LP always minimizes.
    dir: f64,
    base_obj: Vec<f64>,
    pool: Vec<LpRow>,
    pool_keys: std::collections::HashSet<u64>,
    cuts: CutCounts,
    /// (internal objective, completed point).
    incumbent: Option<(f64, Vec<f64>)>,
    nodes: u64,
    root_value: Option<f64>,
    start: Instant,
}

/// Solve the model to proven optimality (within tolerances) or until a
/// limit is reached. Infeasibility and limits are reported in the
/// [`SolveReport`], not as errors.
pub fn solve(model: &Model, config: &BncConfig) -> Result<SolveReport> {
    model.validate()?;
    let dir = match model.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let base_obj: Vec<f64> = model.objective.iter().map(|c| c * dir).collect();
    let mut worker = Worker {
        model,
        config,
        dir,
        base_obj,
        pool: Vec::new(),
        pool_keys: std::collections::HashSet::new(),
        cuts: CutCounts::default(),
        incumbent: None,
        nodes: 0,
        root_value: None,
        start: Instant::now(),
    };
    worker.seed_initial_cuts();
    worker.run()
}

enum NodeOutcome {
    Pruned,
    Branched(usize, f64),
    InfeasibleRoot,
}

impl<'a> Worker<'a> {
    /// Internal value of a user-sense objective: the LP minimizes
    /// `dir * (obj_user - offset)`.
    fn to_internal(&self, obj_user: f64) -> f64 {
        self.dir * (obj_user - self.model.objective_offset)
    }

    fn to_user(&self, internal: f64) -> f64 {
        self.dir * internal + self.model.objective_offset
    }

    /// One lifted cut per epigraph substructure from the block-identity
    /// permutation keeps every node LP bounded below.
    fn seed_initial_cuts(&mut self) {
        for (s, sub) in self.model.substructures.iter().enumerate() {
            if let SubMode::Epigraph { .. } = sub.mode {
                let delta = Permutation::identity(sub.inst.n());
                let mut coeffs = lepi_coefficients_fast(&sub.inst.without_b(), &delta)
                    .expect("identity permutation is partial ascending");
                if sub.inst.has_b() {
                    coeffs = shift_for_x(&coeffs, &sub.inst);
                }
                let cut = coeffs.into_epigraph_cut();
                self.try_add_cut(s, &cut);
            }
        }
    }

    fn run(&mut self) -> Result<SolveReport> {
        let mut open = vec![Node {
            fixings: Vec::new(),
            bound: f64::NEG_INFINITY,
        }];
        let mut status = SolveStatus::Optimal;
        let mut lb_at_stop = f64::NEG_INFINITY;
        while let Some(node) = self.next_node(&mut open) {
            if self.nodes >= self.config.node_limit || self.out_of_time() {
                status = SolveStatus::LimitReached;
                lb_at_stop = open.iter().map(|n| n.bound).fold(node.bound, f64::min);
                break;
            }
            let is_root = self.nodes == 0;
            self.nodes += 1;
            match self.process(&node, is_root)? {
                NodeOutcome::Pruned => {}
                NodeOutcome::Branched(var, value) => {
                    let mut down = node.fixings.clone();
                    down.push((var, 0));
                    open.push(Node {
                        fixings: down,
                        bound: value,
                    });
                    let mut up = node.fixings.clone();
                    up.push((var, 1));
                    open.push(Node {
                        fixings: up,
                        bound: value,
                    });
                }
                NodeOutcome::InfeasibleRoot => {
                    return Ok(self.report(SolveStatus::Infeasible, f64::INFINITY));
                }
            }
        }
        if status == SolveStatus::Optimal {
            match &self.incumbent {
                Some((v, _)) => lb_at_stop = *v,
                None => return Ok(self.report(SolveStatus::Infeasible, f64::INFINITY)),
            }
        }
        Ok(self.report(status, lb_at_stop))
    }

    fn next_node(&self, open: &mut Vec<Node>) -> Option<Node> {
        if open.is_empty() {
            return None;
        }
        // Depth-first, jumping to the best-bound node every 1000 nodes.
        if self.nodes > 0 && self.nodes % 1000 == 0 {
            let best = open
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.bound.partial_cmp(&b.bound).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            return Some(open.swap_remove(best));
        }
        open.pop()
    }

    fn out_of_time(&self) -> bool {
        self.config
            .time_limit_s
            .is_some_and(|t| self.start.elapsed().as_secs_f64() > t)
    }

    fn build_lp(&self, node: &Node) -> LinearProgram {
        let n = self.model.num_vars();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 0..n {
            match self.model.kinds[j] {
                VarKind::Binary => {
                    lower[j] = 0.0;
                    upper[j] = 1.0;
                }
                VarKind::Continuous => {
                    lower[j] = f64::NEG_INFINITY;
                    upper[j] = f64::INFINITY;
                }
            }
        }
        for &(var, val) in &node.fixings {
            lower[var] = val as f64;
            upper[var] = val as f64;
        }
        let mut rows: Vec<LpRow> = self
            .model
            .rows
            .iter()
            .map(|r| LpRow {
                coeffs: r.coeffs.clone(),
                sense: r.sense,
                rhs: r.rhs,
            })
            .collect();
        rows.extend(self.pool.iter().cloned());
        LinearProgram {
            num_vars: n,
            objective: self.base_obj.clone(),
            lower,
            upper,
            rows,
        }
    }

    /// Quantized coefficient hash; permutation-independent so distinct
    /// orders producing the same cut collapse in the pool.
    fn cut_key(sub: usize, row: &LpRow) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        sub.hash(&mut h);
        for &(j, v) in &row.coeffs {
            j.hash(&mut h);
            ((v * 1e10).round() as i64).hash(&mut h);
        }
        ((row.rhs * 1e10).round() as i64).hash(&mut h);
        (row.sense as u8).hash(&mut h);
        h.finish()
    }

    /// Convert a substructure-space cut into a model row and pool it.
    /// Returns false when the cut is already present.
    fn try_add_cut(&mut self, s: usize, cut: &Inequality) -> bool {
        let sub = &self.model.substructures[s];
        let row = match (&sub.mode, cut.mode) {
            (SubMode::Epigraph { w_var }, CutMode::Epigraph) => {
                // w - pi'x >= pi0
                let mut coeffs = vec![(*w_var, 1.0)];
                for (i, &p) in cut.pi.iter().enumerate() {
                    if p != 0.0 {
                        coeffs.push((sub.vars[i], -p));
                    }
                }
                LpRow {
                    coeffs,
                    sense: RowSense::Ge,
                    rhs: cut.pi0,
                }
            }
            (SubMode::FixedRhs { bound }, CutMode::Epigraph) => {
                // pi0 + pi'x <= bound
                let coeffs = cut
                    .pi
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p != 0.0)
                    .map(|(i, &p)| (sub.vars[i], p))
                    .collect();
                LpRow {
                    coeffs,
                    sense: RowSense::Le,
                    rhs: bound - cut.pi0,
                }
            }
            // Trivial cuts never reach the pool: the node LP already
            // carries all bounds and GUB rows.
            _ => return false,
        };
        let key = Self::cut_key(s, &row);
        if !self.pool_keys.insert(key) {
            return false;
        }
        match cut.kind {
            CutKind::Epi => self.cuts.epi += 1,
            CutKind::Lepi => self.cuts.lepi += 1,
            CutKind::EpiPrime => self.cuts.epi_prime += 1,
            CutKind::LepiPrime => self.cuts.lepi_prime += 1,
            _ => {}
        }
        self.pool.push(row);
        true
    }

    /// Point a substructure sees: its items' LP values, with `w` taken from
    /// the epigraph variable or the pinned bound.
    fn sub_point(&self, sub: &Substructure, x: &[f64]) -> Point {
        let xs = self.model.restrict(sub, x);
        let w = match sub.mode {
            SubMode::Epigraph { w_var } => x[w_var],
            SubMode::FixedRhs { bound } => bound,
        };
        Point::new(w, xs)
    }

    /// Separate one substructure at a fractional point with the configured
    /// family. Returns a violated non-trivial cut, if any.
    fn separate_fractional(&self, sub: &Substructure, point: &Point) -> Option<Inequality> {
        match self.config.cut_family {
            CutFamily::None => None,
            CutFamily::Epi => separate_epi(&sub.inst, point, self.config.violation_tol),
            CutFamily::Lepi => match separate(&sub.inst, point, self.config.violation_tol) {
                SeparationResult::Violated { cut, .. }
                    if matches!(cut.kind, CutKind::Lepi | CutKind::LepiPrime) =>
                {
                    Some(cut)
                }
                _ => None,
            },
        }
    }

    /// Lazy enforcement at an integral candidate. Exact separation at a
    /// binary point recovers the full constraint value, so any true
    /// violation yields a cut; the `none` family uses lifted cuts here too.
    fn separate_lazy(&self, sub: &Substructure, point: &Point) -> Option<Inequality> {
        match self.config.cut_family {
            CutFamily::Epi => separate_epi(&sub.inst, point, 1e-12),
            _ => match separate(&sub.inst, point, 1e-12) {
                SeparationResult::Violated { cut, .. }
                    if matches!(cut.kind, CutKind::Lepi | CutKind::LepiPrime) =>
                {
                    Some(cut)
                }
                _ => None,
            },
        }
    }

    fn process(&mut self, node: &Node, is_root: bool) -> Result<NodeOutcome> {
        let round_cap = if is_root {
            self.config.root_cut_rounds
        } else {
            self.config.node_cut_rounds
        };
        let mut rounds = 0usize;
        let mut lazy_rounds = 0usize;
        let mut added_per_sub = vec![0usize; self.model.substructures.len()];
        loop {
            let lp = self.build_lp(node);
            let (value, x) = match solve_lp(&lp)? {
                LpOutcome::Infeasible => {
                    return Ok(if is_root {
                        NodeOutcome::InfeasibleRoot
                    } else {
                        NodeOutcome::Pruned
                    });
                }
                LpOutcome::Unbounded => {
                    return Err(Error::LpStalled(
                        "node relaxation unbounded; missing initial cut".into(),
                    ));
                }
                LpOutcome::Optimal { value, x } => (value, x),
            };
            if is_root {
                self.root_value = Some(value);
            }
            if let Some((inc, _)) = &self.incumbent {
                if value >= inc - 1e-9 * (1.0 + inc.abs()) {
                    return Ok(NodeOutcome::Pruned);
                }
            }

            match self.most_fractional(&x) {
                Some((var, _)) => {
                    if rounds < round_cap {
                        let mut added = false;
                        for (s, sub) in self.model.substructures.iter().enumerate() {
                            if added_per_sub[s] >= self.config.max_cuts_per_sub_per_node {
                                continue;
                            }
                            let point = self.sub_point(sub, &x);
                            if let Some(cut) = self.separate_fractional(sub, &point) {
                                if self.try_add_cut(s, &cut) {
                                    added_per_sub[s] += 1;
                                    added = true;
                                }
                            }
                        }
                        if added {
                            rounds += 1;
                            continue;
                        }
                    }
                    return Ok(NodeOutcome::Branched(var, value));
                }
                None => {
                    // Integral candidate: verify the true nonlinear rows at
                    // the rounded point and add lazy cuts on violation.
                    let mut added_lazy = false;
                    let mut violation_seen = false;
                    for (s, sub) in self.model.substructures.iter().enumerate() {
                        let point = self.sub_point(sub, &x);
                        let xr: Vec<f64> = point.x.iter().map(|v| v.round()).collect();
                        let side = sub.inst.membership_side(&xr);
                        let scale = 1.0 + side.abs().max(point.w.abs());
                        if side - point.w > self.config.feas_tol * scale {
                            violation_seen = true;
                            let rounded = Point::new(point.w, xr);
                            if let Some(cut) = self.separate_lazy(sub, &rounded) {
                                if self.try_add_cut(s, &cut) {
                                    added_lazy = true;
                                }
                            }
                        }
                    }
                    if added_lazy {
                        lazy_rounds += 1;
                        if lazy_rounds > 1000 {
                            return Err(Error::LpStalled(
                                "lazy cut loop failed to converge".into(),
                            ));
                        }
                        continue;
                    }
                    if violation_seen {
                        // A violated candidate whose cut is already pooled
                        // means the LP and the evaluator disagree beyond
                        // tolerances; fail loudly rather than mis-prune.
                        return Err(Error::LpStalled(
                            "integral candidate violates a pooled cut".into(),
                        ));
                    }
                    match self.model.evaluate_binary(&x) {
                        Some((obj_user, full)) => {
                            let internal = self.to_internal(obj_user);
                            let better = match &self.incumbent {
                                Some((cur, _)) => internal < *cur,
                                None => true,
                            };
                            if better {
                                self.incumbent = Some((internal, full));
                            }
                        }
                        None => {
                            return Err(Error::LpStalled(
                                "integral candidate failed exact evaluation".into(),
                            ));
                        }
                    }
                    return Ok(NodeOutcome::Pruned);
                }
            }
        }
    }

    /// Most fractional binary, ties broken by the smallest index.
    fn most_fractional(&self, x: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in self.model.binary_vars() {
            let frac = x[j].clamp(0.0, 1.0);
            let dist = frac.min(1.0 - frac);
            if dist <= self.config.int_tol {
                continue;
            }
            match best {
                Some((_, d)) if d >= dist => {}
                _ => best = Some((j, dist)),
            }
        }
        best
    }

    fn report(&self, status: SolveStatus, lb_internal: f64) -> SolveReport {
        let incumbent_internal = self.incumbent.as_ref().map(|(v, _)| *v);
        let objective = incumbent_internal.map(|v| self.to_user(v));
        let best_bound = match status {
            SolveStatus::Optimal => objective.unwrap_or(f64::NAN),
            SolveStatus::Infeasible => f64::NAN,
            SolveStatus::LimitReached => self.to_user(lb_internal),
        };
        let end_gap_pct = match (status, incumbent_internal) {
            (SolveStatus::Optimal, Some(_)) => Some(0.0),
            (SolveStatus::LimitReached, Some(inc)) => {
                let inc_user = self.to_user(inc);
                let bound_user = self.to_user(lb_internal);
                Some(100.0 * (inc_user - bound_user).abs() / inc_user.abs().max(1e-9))
            }
            _ => None,
        };
        let root_value = self.root_value.map(|v| self.to_user(v));
        // Internal values are ordered root <= opt, so the difference is the
        // user-sense gap magnitude.
        let root_gap_pct = match (incumbent_internal, self.root_value) {
            (Some(opt), Some(root)) => {
                let denom = self.to_user(opt).abs().max(1e-9);
                Some(100.0 * (opt - root) / denom)
            }
            _ => None,
        };
        SolveReport {
            status,
            objective,
            best_bound,
            incumbent: self.incumbent.as_ref().map(|(_, x)| x.clone()),
            nodes: self.nodes,
            cuts: self.cuts,
            root_value,
            root_gap_pct,
            end_gap_pct,
            wall_time_s: self.start.elapsed().as_secs_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave::ConcaveFunction;
    use crate::instance::GubInstance;
    use crate::model::ModelRow;

    fn example1_min_w_model() -> Model {
        let inst = GubInstance::canonical(
            vec![1.0, 2.0, 3.0],
            None,
            &[2, 1],
            ConcaveFunction::neg_square(),
        )
        .unwrap();
        Model {
            sense: Sense::Minimize,
            kinds: vec![
                VarKind::Binary,
                VarKind::Binary,
                VarKind::Binary,
                VarKind::Continuous,
            ],
            objective: vec![0.0, 0.0, 0.0, 1.0],
            objective_offset: 0.0,
            rows: vec![ModelRow {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: RowSense::Le,
                rhs: 1.0,
            }],
            gub_groups: vec![vec![0, 1]],
            substructures: vec![Substructure {
                inst,
                vars: vec![0, 1, 2],
                mode: SubMode::Epigraph { w_var: 3 },
            }],
        }
    }

    #[test]
    fn min_w_hits_hull_bound_at_root() {
        // min w over the example instance: the exact separation closes the
        // root to the hull value f(5) = -25 with root gap 0.
        let model = example1_min_w_model();
        let report = solve(&model, &BncConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert!((report.objective.unwrap() + 25.0).abs() < 1e-6);
        assert!(report.root_gap_pct.unwrap().abs() < 1e-6);
        assert_eq!(report.nodes, 1);
    }

    #[test]
    fn pure_gub_lp_is_integral() {
        // No substructures: the GUB polytope with a linear objective is
        // integral, so the root LP already solves the problem.
        let model = Model {
            sense: Sense::Maximize,
            kinds: vec![VarKind::Binary; 4],
            objective: vec![3.0, 1.0, 2.0, 5.0],
            objective_offset: 0.0,
            rows: vec![
                ModelRow {
                    coeffs: vec![(0, 1.0), (1, 1.0)],
                    sense: RowSense::Le,
                    rhs: 1.0,
                },
                ModelRow {
                    coeffs: vec![(2, 1.0), (3, 1.0)],
                    sense: RowSense::Le,
                    rhs: 1.0,
                },
            ],
            gub_groups: vec![vec![0, 1], vec![2, 3]],
            substructures: vec![],
        };
        let report = solve(&model, &BncConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert!((report.objective.unwrap() - 8.0).abs() < 1e-9);
        assert_eq!(report.nodes, 1);
    }

    #[test]
    fn infeasible_model_reported() {
        let model = Model {
            sense: Sense::Minimize,
            kinds: vec![VarKind::Binary],
            objective: vec![1.0],
            objective_offset: 0.0,
            rows: vec![ModelRow {
                coeffs: vec![(0, 1.0)],
                sense: RowSense::Ge,
                rhs: 2.0,
            }],
            gub_groups: vec![],
            substructures: vec![],
        };
        let report = solve(&model, &BncConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Infeasible);
        assert!(report.objective.is_none());
    }

    #[test]
    fn families_agree_on_min_w() {
        let model = example1_min_w_model();
        for family in [CutFamily::None, CutFamily::Epi, CutFamily::Lepi] {
            let config = BncConfig {
                cut_family: family,
                ..BncConfig::default()
            };
            let report = solve(&model, &config).unwrap();
            assert_eq!(report.status, SolveStatus::Optimal, "{family:?}");
            assert!(
                (report.objective.unwrap() + 25.0).abs() < 1e-6,
                "{family:?}: {:?}",
                report.objective
            );
        }
    }
}
