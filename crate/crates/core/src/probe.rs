//! Probing: a budgeted branch-and-bound run whose node LP points, fractional
//! or integral, are reduced to one class index per set-partitioning row.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::{self, SolveError, SolveResult, SolveStatus, SolverLimits};
use crate::model::{MipModel, Solution};
use crate::sos1::Sos1Constraint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("no set-partitioning rows to probe")]
    NoSets,
    #[error("probe-infeasible: root LP relaxation is infeasible")]
    Infeasible,
    #[error("no-probing-data: no node LP was solved within the probing budget")]
    NoData,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Class vector observed for one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVector {
    pub name: String,
    pub classes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbingData {
    /// One entry per probed row, in the order of the probed sets.
    pub constraints: Vec<ClassVector>,
    /// Node index of each observation; same length as every class vector.
    pub node_indices: Vec<u64>,
    pub incumbent: Option<Solution>,
    /// Incumbent class per row, when an incumbent exists.
    pub incumbent_classes: Option<Vec<u32>>,
    pub incumbent_node: Option<u64>,
    /// LP point of the root node; the relaxation that RINS compares against.
    pub root_lp: Option<Vec<f64>>,
    pub nodes: u64,
    /// Written as `null` when no bound is known.
    #[serde(with = "bound_serde")]
    pub best_bound: f64,
    pub status: SolveStatus,
    pub wall_time: f64,
}

mod bound_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

impl ProbingData {
    /// Sample size `n`.
    pub fn observations(&self) -> usize {
        self.node_indices.len()
    }

    /// Summary of the probing run in the form of a solve result, used by the
    /// screening rule.
    pub fn as_solve_result(&self) -> SolveResult {
        SolveResult {
            status: self.status,
            incumbent: self.incumbent.clone(),
            best_bound: self.best_bound,
            nodes: self.nodes,
            wall_time: self.wall_time,
            incumbent_log: Vec::new(),
            incumbent_node: self.incumbent_node,
        }
    }
}

/// Index of the largest member value, lowest index on ties.
pub fn argmax_class(values: &[f64], set: &Sos1Constraint) -> u32 {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (k, v) in set.classes.iter().enumerate() {
        let x = values[v.0];
        if x > best_val {
            best_val = x;
            best = k;
        }
    }
    best as u32
}

/// Run branch-and-bound under `limits` and record, for every observed node
/// and every set, the class with the largest LP value.
pub fn probe(
    model: &MipModel,
    sets: &[Sos1Constraint],
    limits: &SolverLimits,
    seed: u64,
) -> Result<ProbingData, ProbeError> {
    if sets.is_empty() {
        return Err(ProbeError::NoSets);
    }
    let mut classes: Vec<Vec<u32>> = vec![Vec::new(); sets.len()];
    let mut node_indices = Vec::new();
    let mut root_lp = None;
    let result = bnb::solve(
        model,
        limits,
        &mut |obs| {
            if obs.index == 0 {
                root_lp = Some(obs.values.to_vec());
            }
            node_indices.push(obs.index);
            for (vec, set) in classes.iter_mut().zip(sets) {
                vec.push(argmax_class(obs.values, set));
            }
        },
        seed,
    )?;
    if node_indices.is_empty() {
        return Err(if result.status == SolveStatus::Infeasible {
            ProbeError::Infeasible
        } else {
            ProbeError::NoData
        });
    }
    let incumbent_classes = result.incumbent.as_ref().map(|inc| {
        sets.iter()
            .map(|s| argmax_class(&inc.values, s))
            .collect::<Vec<u32>>()
    });
    Ok(ProbingData {
        constraints: sets
            .iter()
            .zip(classes)
            .map(|(s, classes)| ClassVector {
                name: s.name.clone(),
                classes,
            })
            .collect(),
        node_indices,
        incumbent: result.incumbent,
        incumbent_classes,
        incumbent_node: result.incumbent_node,
        root_lp,
        nodes: result.nodes,
        best_bound: result.best_bound,
        status: result.status,
        wall_time: result.wall_time,
    })
}
