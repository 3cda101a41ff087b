//! Structural detection of set-partitioning rows (`sum of binaries = 1`) and
//! the instance screening rule applied after a probing run.

use serde::{Deserialize, Serialize};

use crate::bnb::SolveResult;
use crate::model::{MipModel, RowId, Sense, VarId};

/// Coefficient tolerance when matching `1`.
pub const COEF_TOL: f64 = 1e-9;

/// One detected row. Class `k` is the `k`-th term of the source row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sos1Constraint {
    pub row: RowId,
    pub name: String,
    pub classes: Vec<VarId>,
}

impl Sos1Constraint {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_var(&self, k: usize) -> VarId {
        self.classes[k]
    }

    /// Class whose member is at 1 in an integral point, if exactly one is.
    pub fn active_class(&self, values: &[f64]) -> Option<usize> {
        let mut on = self
            .classes
            .iter()
            .enumerate()
            .filter(|(_, v)| values[v.0] > 0.5)
            .map(|(k, _)| k);
        let first = on.next()?;
        on.next().is_none().then_some(first)
    }
}

/// Every equality row with right-hand side 1, all coefficients 1, at least two
/// terms and only binary members, in row order.
pub fn detect_sos1(model: &MipModel) -> Vec<Sos1Constraint> {
    model
        .constraints()
        .iter()
        .filter(|row| {
            row.sense == Sense::Eq
                && (row.rhs - 1.0).abs() <= COEF_TOL
                && row.terms.len() >= 2
                && row.terms.iter().all(|&(v, a)| {
                    (a - 1.0).abs() <= COEF_TOL && model.variable(v).is_binary()
                })
        })
        .map(|row| Sos1Constraint {
            row: row.id,
            name: row.name.clone(),
            classes: row.terms.iter().map(|&(v, _)| v).collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    NoSos1,
    TooFewNodes,
    GapAboveMax,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::NoSos1 => "no-sos1",
            DropReason::TooFewNodes => "too-few-nodes",
            DropReason::GapAboveMax => "gap-above-max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreeningRule {
    pub min_nodes: u64,
    /// Largest acceptable probing gap, in percent.
    pub max_gap_percent: f64,
}

impl Default for ScreeningRule {
    fn default() -> Self {
        Self {
            min_nodes: 10,
            max_gap_percent: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningVerdict {
    pub keep: bool,
    pub reasons: Vec<DropReason>,
    pub num_sets: usize,
    pub nodes: u64,
    /// Probing gap in percent; infinite without an incumbent.
    pub gap_percent: f64,
}

/// Keep an instance only if it has set-partitioning rows, the probing run
/// visited at least `min_nodes` nodes and its gap is at most the maximum.
pub fn screen_instance(
    num_sets: usize,
    probing: &SolveResult,
    rule: &ScreeningRule,
) -> ScreeningVerdict {
    let gap_percent = probing.gap().map_or(f64::INFINITY, |g| 100.0 * g);
    let mut reasons = Vec::new();
    if num_sets == 0 {
        reasons.push(DropReason::NoSos1);
    }
    if probing.nodes < rule.min_nodes {
        reasons.push(DropReason::TooFewNodes);
    }
    if !(gap_percent <= rule.max_gap_percent) {
        reasons.push(DropReason::GapAboveMax);
    }
    ScreeningVerdict {
        keep: reasons.is_empty(),
        reasons,
        num_sets,
        nodes: probing.nodes,
        gap_percent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnb::SolveStatus;
    use crate::model::{Solution, VariableSpec};

    fn model_with(rows: &[(&[f64], Sense)]) -> MipModel {
        let mut m = MipModel::new("s");
        let n = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        for j in 0..n {
            m.add_variable(VariableSpec::binary(format!("b{j}"))).unwrap();
        }
        for (i, (coefs, sense)) in rows.iter().enumerate() {
            let terms = coefs.iter().enumerate().map(|(j, &a)| (VarId(j), a)).collect();
            m.add_constraint(format!("r{i}"), terms, *sense, 1.0).unwrap();
        }
        m
    }

    #[test]
    fn detects_partition_row() {
        let m = model_with(&[(&[1.0, 1.0, 1.0], Sense::Eq)]);
        let sets = detect_sos1(&m);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].classes, vec![VarId(0), VarId(1), VarId(2)]);
        assert_eq!(sets[0].num_classes(), 3);
    }

    #[test]
    fn rejects_inequality_and_weights() {
        assert!(detect_sos1(&model_with(&[(&[1.0, 1.0], Sense::Le)])).is_empty());
        assert!(detect_sos1(&model_with(&[(&[1.0, 2.0], Sense::Eq)])).is_empty());
        assert!(detect_sos1(&model_with(&[(&[1.0], Sense::Eq)])).is_empty());
    }

    #[test]
    fn near_one_coefficient_is_accepted() {
        let m = model_with(&[(&[0.9999999999, 1.0], Sense::Eq)]);
        assert_eq!(detect_sos1(&m).len(), 1);
    }

    #[test]
    fn continuous_member_is_rejected() {
        let mut m = MipModel::new("c");
        let a = m.add_variable(VariableSpec::binary("a")).unwrap();
        let c = m
            .add_variable(VariableSpec::continuous("c", 0.0, 1.0))
            .unwrap();
        m.add_constraint("r", vec![(a, 1.0), (c, 1.0)], Sense::Eq, 1.0)
            .unwrap();
        assert!(detect_sos1(&m).is_empty());
    }

    fn probing_result(nodes: u64, objective: Option<f64>, bound: f64) -> SolveResult {
        SolveResult {
            status: if objective.is_some() {
                SolveStatus::Feasible
            } else {
                SolveStatus::LimitNoSolution
            },
            incumbent: objective.map(|o| Solution {
                values: vec![],
                objective: o,
            }),
            best_bound: bound,
            nodes,
            wall_time: 0.0,
            incumbent_log: vec![],
            incumbent_node: None,
        }
    }

    #[test]
    fn screening_examples() {
        let rule = ScreeningRule::default();
        let v = screen_instance(0, &probing_result(500, Some(100.0), 90.0), &rule);
        assert_eq!(v.reasons, vec![DropReason::NoSos1]);

        let v = screen_instance(3, &probing_result(9, Some(100.0), 90.0), &rule);
        assert!(!v.keep);
        assert_eq!(v.reasons, vec![DropReason::TooFewNodes]);

        let v = screen_instance(3, &probing_result(10, Some(100.0), 90.0), &rule);
        assert!(v.keep);

        let v = screen_instance(3, &probing_result(500, Some(100.0), 88.0), &rule);
        assert!(v.keep);
        assert!((v.gap_percent - 12.0).abs() < 1e-9);

        let v = screen_instance(3, &probing_result(500, Some(100.0), -1000.0), &rule);
        assert_eq!(v.reasons, vec![DropReason::GapAboveMax]);
    }
}
