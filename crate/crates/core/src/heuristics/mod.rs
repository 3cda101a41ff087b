//! Primal heuristics built on probing and variable fixing.
//!
//! * `PNF` freezes the lowest-entropy share of the set-partitioning rows to
//!   their most frequent probing class.
//! * `PNFT` freezes every row whose entropy is at most a threshold.
//! * `RINS` fixes binaries on which the root LP and the probing incumbent agree.
//! * `LB` bounds the Hamming distance to the probing incumbent.
//! * `GH` repeatedly solves the LP and freezes the least fractional row.
//! * `SOLVER` is plain branch-and-bound on the whole budget.
//!
//! Scenario names follow `KIND-param-probing`, e.g. `PNF-0.5-20`, `GH-0.1`,
//! `SOLVER`.

mod baselines;
mod pnf;
pub mod select;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use baselines::{greedy_fix, local_branching, rins};
pub use pnf::{pnf, pnf_from_probe};
pub use select::{
    class_distribution, entropy, freezing_cuts, score_all, select_by_ratio, select_by_threshold,
    ConstraintScore, FreezingCut,
};

use crate::bnb::{self, LogEntry, SolveError, SolveResult, SolverLimits};
use crate::model::{MipModel, VarId};
use crate::probe::ProbeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("probing vector is empty")]
    EmptyProbingVector,
    #[error("model has no set-partitioning rows")]
    NoSets,
    #[error("probing data does not match the model: {0}")]
    ProbingMismatch(String),
    #[error("invalid heuristic configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetUnit {
    Nodes,
    Seconds,
}

impl FromStr for BudgetUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nodes" => Ok(BudgetUnit::Nodes),
            "seconds" => Ok(BudgetUnit::Seconds),
            other => Err(format!("unknown budget unit `{other}`")),
        }
    }
}

impl fmt::Display for BudgetUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetUnit::Nodes => "nodes",
            BudgetUnit::Seconds => "seconds",
        })
    }
}

/// Probing and total budgets in one unit. The total includes the probing share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub unit: BudgetUnit,
    pub probing: f64,
    pub total: f64,
}

impl Budget {
    pub fn nodes(probing: u64, total: u64) -> Self {
        Self {
            unit: BudgetUnit::Nodes,
            probing: probing as f64,
            total: total as f64,
        }
    }

    pub fn limits(&self, amount: f64) -> SolverLimits {
        match self.unit {
            BudgetUnit::Nodes => SolverLimits::nodes(amount.max(0.0) as u64),
            BudgetUnit::Seconds => SolverLimits::seconds(amount.max(0.0)),
        }
    }

    pub fn probing_limits(&self) -> SolverLimits {
        self.limits(self.probing)
    }

    pub fn remaining(&self) -> f64 {
        self.total - self.probing
    }

    pub fn validate(&self, probes: bool) -> Result<(), HeuristicError> {
        if !(self.total > 0.0) {
            return Err(HeuristicError::Config("total budget must be positive".into()));
        }
        if probes {
            if !(self.probing > 0.0) {
                return Err(HeuristicError::Config("probing budget must be positive".into()));
            }
            if self.probing >= self.total {
                return Err(HeuristicError::Config(format!(
                    "probing budget {} must be below the total budget {}",
                    self.probing, self.total
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HeuristicKind {
    Solver,
    Pnf { ratio: f64 },
    Pnft { threshold: f64 },
    Rins { ratio: f64 },
    LocalBranching { distance: f64 },
    Greedy { ratio: f64 },
}

impl HeuristicKind {
    pub fn uses_probing(&self) -> bool {
        matches!(
            self,
            HeuristicKind::Pnf { .. }
                | HeuristicKind::Pnft { .. }
                | HeuristicKind::Rins { .. }
                | HeuristicKind::LocalBranching { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            HeuristicKind::Solver => "SOLVER",
            HeuristicKind::Pnf { .. } => "PNF",
            HeuristicKind::Pnft { .. } => "PNFT",
            HeuristicKind::Rins { .. } => "RINS",
            HeuristicKind::LocalBranching { .. } => "LB",
            HeuristicKind::Greedy { .. } => "GH",
        }
    }

    pub fn validate(&self) -> Result<(), HeuristicError> {
        let unit = |x: f64, what: &str| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(HeuristicError::Config(format!("{what} {x} outside [0, 1]")))
            }
        };
        match *self {
            HeuristicKind::Solver => Ok(()),
            HeuristicKind::Pnf { ratio }
            | HeuristicKind::Rins { ratio }
            | HeuristicKind::Greedy { ratio } => unit(ratio, "ratio"),
            HeuristicKind::LocalBranching { distance } => unit(distance, "distance"),
            HeuristicKind::Pnft { threshold } => {
                if threshold >= 0.0 {
                    Ok(())
                } else {
                    Err(HeuristicError::Config(format!("threshold {threshold} is negative")))
                }
            }
        }
    }
}

/// Parse `KIND-param[-probing]`. The probing component is returned separately
/// because its unit comes from the surrounding configuration.
pub fn parse_scenario_name(name: &str) -> Result<(HeuristicKind, Option<f64>), HeuristicError> {
    let parts: Vec<&str> = name.split('-').collect();
    let bad = || HeuristicError::Config(format!("cannot parse scenario name `{name}`"));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let kind_word = parts[0].to_ascii_uppercase();
    if kind_word == "SOLVER" {
        return if parts.len() == 1 {
            Ok((HeuristicKind::Solver, None))
        } else {
            Err(bad())
        };
    }
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let param = num(parts[1])?;
    let probing = parts.get(2).map(|p| num(p)).transpose()?;
    let kind = match kind_word.as_str() {
        "PNF" => HeuristicKind::Pnf { ratio: param },
        "PNFT" => HeuristicKind::Pnft { threshold: param },
        "RINS" => HeuristicKind::Rins { ratio: param },
        "LB" => HeuristicKind::LocalBranching { distance: param },
        "GH" => HeuristicKind::Greedy { ratio: param },
        _ => return Err(bad()),
    };
    if kind.uses_probing() != probing.is_some() {
        return Err(HeuristicError::Config(format!(
            "scenario `{name}`: {} {} a probing budget suffix",
            kind.label(),
            if kind.uses_probing() { "needs" } else { "takes no" }
        )));
    }
    kind.validate()?;
    Ok((kind, probing))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub kind: HeuristicKind,
    pub budget: Budget,
    pub use_incumbent_guard: bool,
}

impl HeuristicConfig {
    pub fn new(kind: HeuristicKind, budget: Budget) -> Self {
        Self {
            kind,
            budget,
            use_incumbent_guard: true,
        }
    }

    pub fn validate(&self) -> Result<(), HeuristicError> {
        self.kind.validate()?;
        self.budget.validate(self.kind.uses_probing())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProbingSummary {
    pub nodes: u64,
    pub observations: usize,
    pub incumbent_objective: Option<f64>,
}

/// What a heuristic did, beyond the final solve result.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub probing: Option<ProbingSummary>,
    pub num_sets: usize,
    pub selected: usize,
    /// Fraction of rows frozen (PNF, PNFT, GH).
    pub equivalent_ratio: Option<f64>,
    pub cuts: Vec<FreezingCut>,
    /// RINS fixings.
    pub fixed: Vec<(VarId, f64)>,
    /// Local-branching radius.
    pub max_distance: Option<f64>,
    pub lp_solves: usize,
    pub flags: Vec<String>,
    /// Budget consumed before the final solve started.
    pub time_offset: f64,
    /// Final-solve incumbent log shifted by `time_offset`.
    pub timeline: Vec<LogEntry>,
    pub runtime_to_best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub result: SolveResult,
    pub report: RunReport,
}

impl HeuristicOutcome {
    pub fn objective(&self) -> Option<f64> {
        self.result.objective()
    }
}

pub(crate) fn finish(result: SolveResult, mut report: RunReport, offset: f64) -> HeuristicOutcome {
    report.time_offset = offset;
    report.timeline = result
        .incumbent_log
        .iter()
        .map(|e| LogEntry {
            elapsed: e.elapsed + offset,
            objective: e.objective,
        })
        .collect();
    report.runtime_to_best = report.timeline.last().map(|e| e.elapsed);
    HeuristicOutcome { result, report }
}

/// A result for a heuristic that could not run (RINS/LB without incumbent).
pub(crate) fn not_run(mut report: RunReport, offset: f64, flag: &str) -> HeuristicOutcome {
    report.flags.push(flag.to_string());
    let result = SolveResult {
        status: bnb::SolveStatus::LimitNoSolution,
        incumbent: None,
        best_bound: f64::NEG_INFINITY,
        nodes: 0,
        wall_time: 0.0,
        incumbent_log: Vec::new(),
        incumbent_node: None,
    };
    finish(result, report, offset)
}

/// Run the heuristic selected by `config.kind`.
pub fn run(
    model: &MipModel,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<HeuristicOutcome, HeuristicError> {
    config.validate()?;
    match config.kind {
        HeuristicKind::Solver => {
            let result = bnb::solve_quiet(model, &config.budget.limits(config.budget.total), seed)?;
            let report = RunReport {
                kind: "SOLVER".into(),
                ..RunReport::default()
            };
            Ok(finish(result, report, 0.0))
        }
        HeuristicKind::Pnf { .. } | HeuristicKind::Pnft { .. } => pnf(model, config, seed),
        HeuristicKind::Rins { .. } => rins(model, config, seed),
        HeuristicKind::LocalBranching { .. } => local_branching(model, config, seed),
        HeuristicKind::Greedy { .. } => greedy_fix(model, config, seed),
    }
}
