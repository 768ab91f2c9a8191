//! Mixed-binary models with epigraph substructures.
//!
//! A model holds binary variables, continuous epigraph variables, dense
//! linear rows, and a list of substructures tying a [`GubInstance`] to a
//! subset of the binaries, either bounding an epigraph variable from below
//! or pinned to a constant right-hand side (knapsack style).

use crate::error::{Error, Result};
use crate::instance::GubInstance;
use crate::simplex::RowSense;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Feasibility tolerance (scaled by magnitude) for exact evaluation of
/// binary assignments; shared with the branch-and-cut acceptance check so
/// the two never disagree about a candidate.
pub const EVAL_FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone)]
pub struct ModelRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub enum SubMode {
    /// `w_var >= f(a'x) (+ b'x)`.
    Epigraph { w_var: usize },
    /// `b'x + f(a'x) <= bound` with `w` pinned.
    FixedRhs { bound: f64 },
}

#[derive(Debug, Clone)]
pub struct Substructure {
    pub inst: GubInstance,
    /// Canonical item index -> model variable.
    pub vars: Vec<usize>,
    pub mode: SubMode,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub sense: Sense,
    pub kinds: Vec<VarKind>,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub rows: Vec<ModelRow>,
    /// Binary-variable groups carrying a `sum <= 1` row; used by the
    /// exhaustive oracle for support enumeration. Groups are disjoint.
    pub gub_groups: Vec<Vec<usize>>,
    pub substructures: Vec<Substructure>,
}

impl Model {
    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn binary_vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == VarKind::Binary)
            .map(|(i, _)| i)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.objective.len(),
            });
        }
        for row in &self.rows {
            if row.coeffs.iter().any(|&(j, _)| j >= n) {
                return Err(Error::BadPartition("row references unknown variable".into()));
            }
            let cont = row
                .coeffs
                .iter()
                .filter(|&&(j, _)| self.kinds[j] == VarKind::Continuous)
                .count();
            if cont > 1 {
                return Err(Error::BadPartition(
                    "rows may bound at most one continuous variable".into(),
                ));
            }
        }
        let mut in_group = vec![false; n];
        for g in &self.gub_groups {
            for &v in g {
                if v >= n || self.kinds[v] != VarKind::Binary {
                    return Err(Error::BadPartition("GUB group over non-binary".into()));
                }
                if in_group[v] {
                    return Err(Error::BadPartition("overlapping GUB groups".into()));
                }
                in_group[v] = true;
            }
        }
        for sub in &self.substructures {
            if sub.vars.len() != sub.inst.n() {
                return Err(Error::DimensionMismatch {
                    expected: sub.inst.n(),
                    got: sub.vars.len(),
                });
            }
            for &v in &sub.vars {
                if v >= n || self.kinds[v] != VarKind::Binary {
                    return Err(Error::BadPartition(
                        "substructure item mapped to non-binary variable".into(),
                    ));
                }
            }
            if let SubMode::Epigraph { w_var } = sub.mode {
                if w_var >= n || self.kinds[w_var] != VarKind::Continuous {
                    return Err(Error::BadPartition(
                        "epigraph variable must be continuous".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Restrict a full variable vector to a substructure's items
    /// (canonical order).
    pub fn restrict(&self, sub: &Substructure, x: &[f64]) -> Vec<f64> {
        sub.vars.iter().map(|&v| x[v]).collect()
    }

    /// Evaluate a binary assignment: rounds the binaries, derives each
    /// continuous variable from its binding constraints, and checks all
    /// rows and substructures. Returns the completed point and the
    /// user-sense objective, or `None` if infeasible.
    pub fn evaluate_binary(&self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let n = self.num_vars();
        let mut full = vec![0.0; n];
        for j in 0..n {
            if self.kinds[j] == VarKind::Binary {
                full[j] = if x[j] >= 0.5 { 1.0 } else { 0.0 };
            }
        }
        // Lower bounds on continuous variables from epigraph substructures.
        let mut lb = vec![f64::NEG_INFINITY; n];
        let mut ub = vec![f64::INFINITY; n];
        for sub in &self.substructures {
            if let SubMode::Epigraph { w_var } = sub.mode {
                let xs = self.restrict(sub, &full);
                let v = sub.inst.membership_side(&xs);
                lb[w_var] = lb[w_var].max(v);
            }
        }
        // Rows touching a continuous variable tighten its bounds.
        for row in &self.rows {
            let mut cont: Option<(usize, f64)> = None;
            let mut act = 0.0;
            for &(j, c) in &row.coeffs {
                if self.kinds[j] == VarKind::Continuous {
                    cont = Some((j, c));
                } else {
                    act += c * full[j];
                }
            }
            let Some((w, cw)) = cont else { continue };
            let bound = (row.rhs - act) / cw;
            match (row.sense, cw > 0.0) {
                (RowSense::Ge, true) | (RowSense::Le, false) => lb[w] = lb[w].max(bound),
                (RowSense::Le, true) | (RowSense::Ge, false) => ub[w] = ub[w].min(bound),
                (RowSense::Eq, _) => {
                    lb[w] = lb[w].max(bound);
                    ub[w] = ub[w].min(bound);
                }
            }
        }
        for j in 0..n {
            if self.kinds[j] == VarKind::Continuous {
                let v = if lb[j].is_finite() { lb[j] } else { 0.0 };
                if v > ub[j] + EVAL_FEAS_TOL * (1.0 + v.abs()) {
                    return None;
                }
                full[j] = v;
            }
        }
        // Remaining feasibility: pure-binary rows and pinned substructures.
        for row in &self.rows {
            let act: f64 = row.coeffs.iter().map(|&(j, c)| c * full[j]).sum();
            let tol = EVAL_FEAS_TOL * (1.0 + row.rhs.abs());
            let ok = match row.sense {
                RowSense::Le => act <= row.rhs + tol,
                RowSense::Ge => act >= row.rhs - tol,
                RowSense::Eq => (act - row.rhs).abs() <= tol,
            };
            if !ok {
                return None;
            }
        }
        for sub in &self.substructures {
            if let SubMode::FixedRhs { bound } = sub.mode {
                let xs = self.restrict(sub, &full);
                let v = sub.inst.membership_side(&xs);
                if v > bound + EVAL_FEAS_TOL * (1.0 + bound.abs()) {
                    return None;
                }
            }
        }
        let obj: f64 = self
            .objective
            .iter()
            .zip(&full)
            .map(|(c, x)| c * x)
            .sum::<f64>()
            + self.objective_offset;
        Some((obj, full))
    }
}

/// Counters for cuts added during a solve, keyed by provenance.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct CutCounts {
    pub epi: usize,
    pub lepi: usize,
    pub epi_prime: usize,
    pub lepi_prime: usize,
}

impl CutCounts {
    pub fn total(&self) -> usize {
        self.epi + self.lepi + self.epi_prime + self.lepi_prime
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    LimitReached,
    Infeasible,
}

/// Outcome and statistics of a branch-and-cut run. Objective-like values
/// are in the user's sense.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: f64,
    pub incumbent: Option<Vec<f64>>,
    pub nodes: u64,
    pub cuts: CutCounts,
    pub root_value: Option<f64>,
    /// `100 (z_opt - z_root) / |z_opt|`, oriented so tighter roots give
    /// smaller gaps.
    pub root_gap_pct: Option<f64>,
    pub end_gap_pct: Option<f64>,
    pub wall_time_s: f64,
}

impl SolveReport {
    /// Table-style CSV row: `Solved,Time,Nodes,EGap,RGap`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.2},{},{},{}",
            (self.status == SolveStatus::Optimal) as u8,
            self.wall_time_s,
            self.nodes,
            self.end_gap_pct
                .map_or("-".to_string(), |g| format!("{g:.2}")),
            self.root_gap_pct
                .map_or("-".to_string(), |g| format!("{g:.2}")),
        )
    }
}
