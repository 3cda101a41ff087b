//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every row `a·x {<=,>=,=} b` gets a slack `s` with `a·x + s = b`, the slack
//! bounds encoding the sense (`[0, inf)`, `(-inf, 0]`, `[0, 0]`). Structural
//! columns start non-basic at a finite bound (or at zero when free). Rows whose
//! starting slack value falls outside the slack bounds receive an artificial
//! column, and phase 1 minimizes the sum of artificials.
//!
//! Pricing is Dantzig's rule; after [`DEGENERATE_SWITCH`] degenerate pivots the
//! solver falls back to Bland's rule for the rest of the solve, which rules out
//! cycling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MipModel, Sense, VarId};

pub const DEFAULT_ITERATION_LIMIT: usize = 50_000;
/// Reduced-cost optimality tolerance.
pub const REDUCED_COST_TOL: f64 = 1e-9;
/// Primal feasibility tolerance.
pub const PRIMAL_TOL: f64 = 1e-7;
/// Degenerate pivots tolerated before switching to Bland's rule.
pub const DEGENERATE_SWITCH: usize = 1_000;

const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// One value per model column; meaningful only when `status` is optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("fixing of variable {var} to {value} lies outside its bounds [{lb}, {ub}]")]
    FixingOutOfBounds {
        var: usize,
        value: f64,
        lb: f64,
        ub: f64,
    },
    #[error("fixing references unknown variable {0}")]
    UnknownVariable(usize),
    #[error("bound vectors have length {got}, model has {expected} variables")]
    BoundLength { expected: usize, got: usize },
}

/// Solve the LP relaxation of `model` with `fixings` applied as `lb = ub`.
pub fn solve_lp(
    model: &MipModel,
    fixings: &BTreeMap<VarId, f64>,
    iteration_limit: usize,
) -> Result<LpResult, LpError> {
    let mut lb: Vec<f64> = model.variables().iter().map(|v| v.lb).collect();
    let mut ub: Vec<f64> = model.variables().iter().map(|v| v.ub).collect();
    for (&var, &value) in fixings {
        let v = model
            .variables()
            .get(var.0)
            .ok_or(LpError::UnknownVariable(var.0))?;
        if !value.is_finite() || value < v.lb - PRIMAL_TOL || value > v.ub + PRIMAL_TOL {
            return Err(LpError::FixingOutOfBounds {
                var: var.0,
                value,
                lb: v.lb,
                ub: v.ub,
            });
        }
        lb[var.0] = value;
        ub[var.0] = value;
    }
    solve_with_bounds(model, &lb, &ub, iteration_limit)
}

/// Solve the LP relaxation of `model` with column bounds replaced by `lb`/`ub`.
pub fn solve_with_bounds(
    model: &MipModel,
    lb: &[f64],
    ub: &[f64],
    iteration_limit: usize,
) -> Result<LpResult, LpError> {
    let n = model.num_vars();
    if lb.len() != n || ub.len() != n {
        return Err(LpError::BoundLength {
            expected: n,
            got: lb.len().min(ub.len()),
        });
    }
    if lb.iter().zip(ub).any(|(l, u)| l > u) {
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            values: vec![0.0; n],
            objective: f64::INFINITY,
            iterations: 0,
            diagnostic: Some("crossed column bounds".into()),
        });
    }
    let mut tab = Tableau::build(model, lb, ub);
    Ok(tab.run(model, iteration_limit))
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

struct Tableau {
    m: usize,
    n_struct: usize,
    ncols: usize,
    /// Row-major `m x ncols`, holds B^-1 A.
    t: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    art_start: usize,
    cost: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
    degenerate: usize,
    bland: bool,
}

impl Tableau {
    fn build(model: &MipModel, lb: &[f64], ub: &[f64]) -> Self {
        let m = model.num_rows();
        let n = model.num_vars();
        let mut x = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            x.push(start_value(lb[j], ub[j]));
        }
        let mut col_lb: Vec<f64> = lb.to_vec();
        let mut col_ub: Vec<f64> = ub.to_vec();
        for row in model.constraints() {
            let (l, u) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            col_lb.push(l);
            col_ub.push(u);
        }

        // Decide which rows need an artificial and where each slack starts.
        let mut slack_val = vec![0.0; m];
        let mut art_sign: Vec<Option<f64>> = vec![None; m];
        for (i, row) in model.constraints().iter().enumerate() {
            let r = row.rhs - row.terms.iter().map(|&(v, a)| a * x[v.0]).sum::<f64>();
            let (l, u) = (col_lb[n + i], col_ub[n + i]);
            if r >= l && r <= u {
                slack_val[i] = r;
            } else {
                let s0 = if r < l { l } else { u };
                slack_val[i] = s0;
                art_sign[i] = Some(if r - s0 >= 0.0 { 1.0 } else { -1.0 });
            }
        }
        x.extend_from_slice(&slack_val);
        let art_start = n + m;
        let n_art = art_sign.iter().filter(|s| s.is_some()).count();
        let ncols = art_start + n_art;

        let mut t = vec![0.0; m * ncols];
        let mut basis = vec![0; m];
        let mut is_basic = vec![false; ncols];
        let mut next_art = art_start;
        for (i, row) in model.constraints().iter().enumerate() {
            let base = i * ncols;
            for &(v, a) in &row.terms {
                t[base + v.0] = a;
            }
            t[base + n + i] = 1.0;
            match art_sign[i] {
                Some(sign) => {
                    let resid = row.rhs
                        - row.terms.iter().map(|&(v, a)| a * x[v.0]).sum::<f64>()
                        - slack_val[i];
                    t[base + next_art] = sign;
                    // Normalize so the artificial has coefficient 1 in its row.
                    if sign < 0.0 {
                        for c in &mut t[base..base + ncols] {
                            *c = -*c;
                        }
                    }
                    basis[i] = next_art;
                    is_basic[next_art] = true;
                    x.push(resid.abs());
                    col_lb.push(0.0);
                    col_ub.push(f64::INFINITY);
                    next_art += 1;
                }
                None => {
                    basis[i] = n + i;
                    is_basic[n + i] = true;
                }
            }
        }

        Self {
            m,
            n_struct: n,
            ncols,
            t,
            lb: col_lb,
            ub: col_ub,
            x,
            basis,
            is_basic,
            art_start,
            cost: vec![0.0; ncols],
            d: vec![0.0; ncols],
            iterations: 0,
            degenerate: 0,
            bland: false,
        }
    }

    fn run(&mut self, model: &MipModel, limit: usize) -> LpResult {
        let n = self.n_struct;
        if self.ncols > self.art_start {
            for j in self.art_start..self.ncols {
                self.cost[j] = 1.0;
            }
            self.price();
            match self.iterate(limit) {
                Some(Step::Optimal) | Some(Step::Unbounded) => {}
                _ => return self.finish(model, LpStatus::IterationLimit, "phase 1 iteration limit"),
            }
            let infeasible = (self.art_start..self.ncols).any(|j| self.x[j] > PRIMAL_TOL);
            if infeasible {
                return self.finish(model, LpStatus::Infeasible, "");
            }
            for j in self.art_start..self.ncols {
                self.ub[j] = 0.0;
                if !self.is_basic[j] {
                    self.x[j] = 0.0;
                }
            }
            self.drive_out_artificials();
            for j in self.art_start..self.ncols {
                self.cost[j] = 0.0;
            }
        }
        let costs = model.costs();
        self.cost[..n].copy_from_slice(&costs);
        self.price();
        match self.iterate(limit) {
            Some(Step::Optimal) => self.finish(model, LpStatus::Optimal, ""),
            Some(Step::Unbounded) => self.finish(model, LpStatus::Unbounded, ""),
            _ => self.finish(model, LpStatus::IterationLimit, "phase 2 iteration limit"),
        }
    }

    fn finish(&self, model: &MipModel, status: LpStatus, diag: &str) -> LpResult {
        let n = self.n_struct;
        let mut values = self.x[..n].to_vec();
        for j in 0..n {
            // Snap tiny bound violations left by round-off.
            if values[j] < self.lb[j] && values[j] > self.lb[j] - PRIMAL_TOL {
                values[j] = self.lb[j];
            } else if values[j] > self.ub[j] && values[j] < self.ub[j] + PRIMAL_TOL {
                values[j] = self.ub[j];
            }
        }
        let objective = match status {
            LpStatus::Optimal => model.objective_unchecked(&values),
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
            LpStatus::IterationLimit => f64::NAN,
        };
        LpResult {
            status,
            values,
            objective,
            iterations: self.iterations,
            diagnostic: (!diag.is_empty()).then(|| diag.to_string()),
        }
    }

    fn price(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                for (dj, tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
    }

    /// Returns `None` when the iteration limit is hit.
    fn iterate(&mut self, limit: usize) -> Option<Step> {
        loop {
            if self.iterations >= limit {
                return None;
            }
            match self.step() {
                Step::Continue => self.iterations += 1,
                other => return Some(other),
            }
        }
    }

    fn step(&mut self) -> Step {
        let Some((q, dir)) = self.choose_entering() else {
            return Step::Optimal;
        };
        let nc = self.ncols;

        // Ratio test: basic i moves at rate -dir * T[i][q] per unit step.
        let mut best_t = self.ub[q] - self.lb[q];
        let mut leave: Option<(usize, f64)> = None;
        let mut best_piv = 0.0;
        for i in 0..self.m {
            let tiq = self.t[i * nc + q];
            if tiq.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * tiq;
            let b = self.basis[i];
            let lim = if rate < 0.0 {
                if self.lb[b] == f64::NEG_INFINITY {
                    continue;
                }
                (self.x[b] - self.lb[b]) / -rate
            } else {
                if self.ub[b] == f64::INFINITY {
                    continue;
                }
                (self.ub[b] - self.x[b]) / rate
            }
            .max(0.0);
            // Ties with a pure bound flip keep the flip.
            let better = if lim < best_t - 1e-12 {
                true
            } else if lim <= best_t + 1e-12 {
                match leave {
                    None => false,
                    Some((r, _)) if self.bland => b < self.basis[r],
                    Some(_) => tiq.abs() > best_piv,
                }
            } else {
                false
            };
            if better {
                best_t = best_t.min(lim);
                leave = Some((i, rate));
                best_piv = tiq.abs();
            }
        }

        if best_t == f64::INFINITY {
            return Step::Unbounded;
        }
        let step = best_t;
        if step <= 1e-12 {
            self.degenerate += 1;
            if self.degenerate >= DEGENERATE_SWITCH {
                self.bland = true;
            }
        }

        if step != 0.0 {
            self.x[q] += dir * step;
            for i in 0..self.m {
                let tiq = self.t[i * nc + q];
                if tiq != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= dir * tiq * step;
                }
            }
        }

        match leave {
            None => {
                // Bound flip.
                self.x[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
            }
            Some((r, rate)) => {
                let l = self.basis[r];
                self.x[l] = if rate < 0.0 { self.lb[l] } else { self.ub[l] };
                self.pivot(r, q);
            }
        }
        Step::Continue
    }

    fn choose_entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols {
            if self.is_basic[j] || self.lb[j] == self.ub[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -REDUCED_COST_TOL && self.x[j] < self.ub[j] {
                1.0
            } else if dj > REDUCED_COST_TOL && self.x[j] > self.lb[j] {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((j, dir));
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + q];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for c in row.iter_mut() {
                *c /= piv;
            }
            row[q] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            for (c, p) in row.iter_mut().zip(&pivot_row) {
                *c -= f * p;
            }
            row[q] = 0.0;
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (dj, p) in self.d.iter_mut().zip(&pivot_row) {
                *dj -= dq * p;
            }
            self.d[q] = 0.0;
        }
        let l = self.basis[r];
        self.is_basic[l] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    /// Replace basic artificials (all at zero after phase 1) by structural or
    /// slack columns where the row allows it.
    fn drive_out_artificials(&mut self) {
        let nc = self.ncols;
        for r in 0..self.m {
            let b = self.basis[r];
            if b < self.art_start {
                continue;
            }
            let candidate = (0..self.art_start)
                .filter(|&j| !self.is_basic[j])
                .max_by(|&a, &c| {
                    self.t[r * nc + a]
                        .abs()
                        .partial_cmp(&self.t[r * nc + c].abs())
                        .unwrap()
                        .then(c.cmp(&a))
                });
            if let Some(j) = candidate {
                if self.t[r * nc + j].abs() > 1e-7 {
                    self.x[b] = 0.0;
                    self.pivot(r, j);
                }
            }
        }
    }
}

fn start_value(lb: f64, ub: f64) -> f64 {
    if lb.is_finite() {
        lb
    } else if ub.is_finite() {
        ub
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariableSpec;

    fn lp(n: usize) -> MipModel {
        let mut m = MipModel::new("lp");
        for j in 0..n {
            m.add_variable(VariableSpec::continuous(format!("x{j}"), 0.0, 1.0))
                .unwrap();
        }
        m
    }

    #[test]
    fn simple_box_lp() {
        let mut m = lp(2);
        m.set_cost(VarId(0), -1.0);
        m.set_cost(VarId(1), -1.0);
        m.add_constraint("c", vec![(VarId(0), 1.0), (VarId(1), 1.0)], Sense::Le, 1.0)
            .unwrap();
        let r = solve_lp(&m, &BTreeMap::new(), DEFAULT_ITERATION_LIMIT).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 1.0).abs() < 1e-9);
        assert!((r.values[0] + r.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fixing_forces_partner() {
        let mut m = lp(2);
        m.add_constraint("c", vec![(VarId(0), 1.0), (VarId(1), 1.0)], Sense::Eq, 1.0)
            .unwrap();
        let fix = BTreeMap::from([(VarId(0), 1.0)]);
        let r = solve_lp(&m, &fix, DEFAULT_ITERATION_LIMIT).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.values[1].abs() < 1e-9);
    }

    #[test]
    fn fixing_outside_bounds_errors() {
        let m = lp(1);
        let fix = BTreeMap::from([(VarId(0), 2.0)]);
        assert!(matches!(
            solve_lp(&m, &fix, 10),
            Err(LpError::FixingOutOfBounds { .. })
        ));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut m = lp(2);
        m.add_constraint("a", vec![(VarId(0), 1.0), (VarId(1), 1.0)], Sense::Ge, 3.0)
            .unwrap();
        let r = solve_lp(&m, &BTreeMap::new(), 100).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);

        let mut u = MipModel::new("u");
        let x = u
            .add_variable(VariableSpec::continuous("x", 0.0, f64::INFINITY).with_cost(-1.0))
            .unwrap();
        let y = u
            .add_variable(VariableSpec::continuous("y", f64::NEG_INFINITY, f64::INFINITY))
            .unwrap();
        u.add_constraint("c", vec![(x, 1.0), (y, -1.0)], Sense::Le, 2.0)
            .unwrap();
        let r = solve_lp(&u, &BTreeMap::new(), 100).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_and_ge_rows() {
        // min y  s.t. y >= x - 2, y >= -x, x free, y free  ->  x = 1, y = -1
        let mut m = MipModel::new("f");
        let x = m
            .add_variable(VariableSpec::continuous("x", f64::NEG_INFINITY, f64::INFINITY))
            .unwrap();
        let y = m
            .add_variable(
                VariableSpec::continuous("y", f64::NEG_INFINITY, f64::INFINITY).with_cost(1.0),
            )
            .unwrap();
        m.add_constraint("a", vec![(y, 1.0), (x, -1.0)], Sense::Ge, -2.0)
            .unwrap();
        m.add_constraint("b", vec![(y, 1.0), (x, 1.0)], Sense::Ge, 0.0)
            .unwrap();
        let r = solve_lp(&m, &BTreeMap::new(), 100).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 1.0).abs() < 1e-9);
        assert!((r.values[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_limit_reported() {
        let mut m = lp(3);
        for j in 0..3 {
            m.set_cost(VarId(j), -1.0);
        }
        m.add_constraint(
            "c",
            vec![(VarId(0), 1.0), (VarId(1), 2.0), (VarId(2), 3.0)],
            Sense::Eq,
            2.0,
        )
        .unwrap();
        let r = solve_lp(&m, &BTreeMap::new(), 0).unwrap();
        assert_eq!(r.status, LpStatus::IterationLimit);
        assert!(r.diagnostic.is_some());
    }
}
