//! LP-based branch-and-bound with a per-node observation callback.
//!
//! Node selection is best-bound with depth-first plunging: after a branching
//! the child on the rounding side of the LP value is processed next and its
//! sibling goes to the open-node queue. A plunge ends when a node is pruned,
//! infeasible or integral, and the queue's best-bound node is taken next
//! (ties by creation order). Branching picks the most fractional integral
//! column, ties by lowest id. Each node also tries a simple rounding of its LP
//! point.
//!
//! With a node budget the run is fully deterministic, and incumbent log
//! timestamps are node indices rather than seconds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, LpError, LpStatus};
use crate::model::{
    MipModel, ModelError, Sense, Solution, VarId, VarKind, FEASIBILITY_TOL, INTEGRALITY_TOL,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverLimits {
    pub time_seconds: Option<f64>,
    pub nodes: Option<u64>,
    /// Relative gap at which the search stops early.
    pub gap: Option<f64>,
}

impl SolverLimits {
    pub fn nodes(n: u64) -> Self {
        Self {
            nodes: Some(n),
            ..Self::default()
        }
    }

    pub fn seconds(s: f64) -> Self {
        Self {
            time_seconds: Some(s),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.time_seconds.is_none() && self.nodes.is_none() {
            return Err(SolveError::InvalidLimits(
                "set at least one of a time or node budget".into(),
            ));
        }
        let negative = |x: Option<f64>| x.map_or(false, |v| !(v >= 0.0));
        if negative(self.time_seconds) || negative(self.gap) {
            return Err(SolveError::InvalidLimits("limits must be nonnegative".into()));
        }
        Ok(())
    }
}

/// What the observer sees after each successfully solved node LP.
#[derive(Debug, Clone, Copy)]
pub struct NodeObservation<'a> {
    pub index: u64,
    pub values: &'a [f64],
    pub is_integer_feasible: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    LimitNoSolution,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// Seconds, or node index under a node budget.
    pub elapsed: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub incumbent: Option<Solution>,
    pub best_bound: f64,
    pub nodes: u64,
    pub wall_time: f64,
    pub incumbent_log: Vec<LogEntry>,
    /// Node index at which the final incumbent was found.
    pub incumbent_node: Option<u64>,
}

impl SolveResult {
    pub fn objective(&self) -> Option<f64> {
        self.incumbent.as_ref().map(|s| s.objective)
    }

    /// Relative optimality gap, `None` without an incumbent.
    pub fn gap(&self) -> Option<f64> {
        let inc = self.objective()?;
        Some(relative_gap(inc, self.best_bound))
    }
}

pub fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    if incumbent - bound <= 0.0 {
        0.0
    } else {
        (incumbent - bound) / incumbent.abs().max(1e-10)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid solver limits: {0}")]
    InvalidLimits(String),
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("restriction references variable {0}, which is not binary")]
    NonBinary(usize),
    #[error("restriction references unknown variable {0}")]
    UnknownVariable(usize),
}

struct Node {
    lb: Vec<f64>,
    ub: Vec<f64>,
    bound: f64,
    seq: u64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Reversed so that `BinaryHeap` pops the smallest bound, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Solve without observing nodes.
pub fn solve_quiet(
    model: &MipModel,
    limits: &SolverLimits,
    seed: u64,
) -> Result<SolveResult, SolveError> {
    solve(model, limits, &mut |_| {}, seed)
}

/// Branch-and-bound on `model`. `observer` is called once for every node whose
/// LP relaxation solved to optimality, fractional or not.
///
/// The search has no randomized component, so `seed` does not change the
/// result; it is accepted so every solver entry point has the same signature.
pub fn solve(
    model: &MipModel,
    limits: &SolverLimits,
    observer: &mut dyn FnMut(&NodeObservation<'_>),
    seed: u64,
) -> Result<SolveResult, SolveError> {
    let _ = seed;
    limits.validate()?;
    let start = Instant::now();
    let node_clock = limits.nodes.is_some();
    let integral: Vec<bool> = model.variables().iter().map(|v| v.kind.is_integral()).collect();

    let mut incumbent: Option<Solution> = None;
    let mut incumbent_node = None;
    let mut log = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut next = Some(Node {
        lb: model.variables().iter().map(|v| v.lb).collect(),
        ub: model.variables().iter().map(|v| v.ub).collect(),
        bound: f64::NEG_INFINITY,
        seq,
    });
    let mut processed = 0u64;
    // Smallest bound of any node dropped without a verdict.
    let mut lost_bound = f64::INFINITY;
    loop {
        if limits.nodes.map_or(false, |n| processed >= n)
            || limits
                .time_seconds
                .map_or(false, |s| start.elapsed().as_secs_f64() >= s)
        {
            break;
        }
        if let (Some(gap), Some(inc)) = (limits.gap, incumbent.as_ref()) {
            let bound = open_bound(&next, &heap).min(lost_bound).min(inc.objective);
            if relative_gap(inc.objective, bound) <= gap {
                break;
            }
        }
        let Some(node) = next.take().or_else(|| heap.pop()) else {
            break;
        };
        let cutoff = incumbent.as_ref().map_or(f64::INFINITY, |s| prune_level(s.objective));
        if node.bound >= cutoff {
            continue;
        }

        let relax = lp::solve_with_bounds(model, &node.lb, &node.ub, lp::DEFAULT_ITERATION_LIMIT)?;
        let t = processed;
        processed += 1;
        let elapsed = |t: u64| {
            if node_clock {
                t as f64
            } else {
                start.elapsed().as_secs_f64()
            }
        };

        match relax.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if t == 0 {
                    return Err(SolveError::Unbounded);
                }
                lost_bound = f64::NEG_INFINITY;
                continue;
            }
            LpStatus::IterationLimit => {
                log::warn!(
                    "node {t}: LP stopped at the iteration limit ({}), node dropped",
                    relax.diagnostic.as_deref().unwrap_or("no diagnostic")
                );
                lost_bound = lost_bound.min(node.bound);
                continue;
            }
        }

        let values = relax.values;
        let is_integer = values
            .iter()
            .zip(&integral)
            .all(|(x, &int)| !int || (x - x.round()).abs() <= INTEGRALITY_TOL);
        observer(&NodeObservation {
            index: t,
            values: &values,
            is_integer_feasible: is_integer,
            objective: relax.objective,
        });

        if relax.objective >= cutoff {
            continue;
        }

        // Integral LP points and the rounding heuristic share one acceptance path.
        let rounded: Vec<f64> = values
            .iter()
            .zip(&integral)
            .map(|(&x, &int)| if int { x.round() } else { x })
            .collect();
        if model.is_feasible(&rounded, FEASIBILITY_TOL) {
            let obj = model.objective_unchecked(&rounded);
            if incumbent.as_ref().map_or(true, |s| obj < s.objective - 1e-9) {
                log.push(LogEntry {
                    elapsed: elapsed(t),
                    objective: obj,
                });
                incumbent = Some(Solution {
                    values: rounded,
                    objective: obj,
                });
                incumbent_node = Some(t);
            }
        }
        if is_integer {
            continue;
        }
        let cutoff = incumbent.as_ref().map_or(f64::INFINITY, |s| prune_level(s.objective));
        if relax.objective >= cutoff {
            continue;
        }

        let Some(var) = most_fractional(&values, &integral) else {
            continue;
        };
        let x = values[var];
        let (down_ub, up_lb) = (x.floor(), x.ceil());
        let mut up = Node {
            lb: node.lb.clone(),
            ub: node.ub.clone(),
            bound: relax.objective,
            seq: 0,
        };
        up.lb[var] = up_lb;
        let mut down = Node {
            lb: node.lb,
            ub: node.ub,
            bound: relax.objective,
            seq: 0,
        };
        down.ub[var] = down_ub;
        seq += 1;
        down.seq = seq;
        seq += 1;
        up.seq = seq;
        let (dive, other) = if x - down_ub >= 0.5 { (up, down) } else { (down, up) };
        heap.push(other);
        next = Some(dive);
    }

    let open = open_bound(&next, &heap).min(lost_bound);
    let complete = next.is_none() && heap.is_empty() && lost_bound == f64::INFINITY;
    let status = match (&incumbent, complete) {
        (Some(_), true) => SolveStatus::Optimal,
        (Some(_), false) => SolveStatus::Feasible,
        (None, true) => SolveStatus::Infeasible,
        (None, false) => SolveStatus::LimitNoSolution,
    };
    let inc_obj = incumbent.as_ref().map_or(f64::INFINITY, |s| s.objective);
    let best_bound = if complete { inc_obj } else { open.min(inc_obj) };
    Ok(SolveResult {
        status,
        incumbent,
        best_bound,
        nodes: processed,
        wall_time: start.elapsed().as_secs_f64(),
        incumbent_log: log,
        incumbent_node,
    })
}

fn prune_level(incumbent: f64) -> f64 {
    incumbent - 1e-9 * (1.0 + incumbent.abs())
}

fn open_bound(next: &Option<Node>, heap: &BinaryHeap<Node>) -> f64 {
    let a = next.as_ref().map_or(f64::INFINITY, |n| n.bound);
    let b = heap.peek().map_or(f64::INFINITY, |n| n.bound);
    a.min(b)
}

fn most_fractional(values: &[f64], integral: &[bool]) -> Option<usize> {
    let mut best = None;
    let mut best_frac = INTEGRALITY_TOL;
    for (j, (&x, &int)) in values.iter().zip(integral).enumerate() {
        if !int {
            continue;
        }
        let f = x - x.floor();
        let dist = f.min(1.0 - f);
        if dist > best_frac {
            best_frac = dist;
            best = Some(j);
        }
    }
    best
}

/// A row added to a copy of a model to restrict its feasible set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Restriction {
    /// `sum(members) = 1`; repeated members collapse to one term.
    Freeze { name: String, members: Vec<VarId> },
    /// Hamming distance on the binaries of `reference` at most `max_distance`.
    LocalBranching {
        reference: Vec<(VarId, f64)>,
        max_distance: f64,
    },
    /// `var = value` for a binary column.
    Fix { var: VarId, value: f64 },
}

/// Copy `model` and append one row per restriction. The input is untouched.
pub fn add_fixing(model: &MipModel, cuts: &[Restriction]) -> Result<MipModel, SolveError> {
    let mut out = model.clone();
    let check = |v: VarId| -> Result<(), SolveError> {
        match model.variables().get(v.0) {
            None => Err(SolveError::UnknownVariable(v.0)),
            Some(var) if var.kind != VarKind::Binary => Err(SolveError::NonBinary(v.0)),
            Some(_) => Ok(()),
        }
    };
    for cut in cuts {
        match cut {
            Restriction::Freeze { name, members } => {
                let mut terms: Vec<(VarId, f64)> = Vec::with_capacity(members.len());
                for &v in members {
                    check(v)?;
                    if !terms.iter().any(|&(u, _)| u == v) {
                        terms.push((v, 1.0));
                    }
                }
                out.add_constraint(name.clone(), terms, Sense::Eq, 1.0)?;
            }
            Restriction::LocalBranching {
                reference,
                max_distance,
            } => {
                let mut terms = Vec::with_capacity(reference.len());
                let mut ones = 0.0;
                for &(v, val) in reference {
                    check(v)?;
                    if val > 0.5 {
                        terms.push((v, -1.0));
                        ones += 1.0;
                    } else {
                        terms.push((v, 1.0));
                    }
                }
                out.add_constraint("local_branching", terms, Sense::Le, max_distance - ones)?;
            }
            Restriction::Fix { var, value } => {
                check(*var)?;
                let name = format!("fix_{}", model.variable(*var).name);
                out.add_constraint(name, vec![(*var, 1.0)], Sense::Eq, *value)?;
            }
        }
    }
    Ok(out)
}

/// Left-hand side of the local-branching row: Hamming distance on binaries.
pub fn hamming_distance(reference: &[(VarId, f64)], values: &[f64]) -> f64 {
    reference
        .iter()
        .map(|&(v, r)| if r > 0.5 { 1.0 - values[v.0] } else { values[v.0] })
        .sum()
}
