//! Entropy scoring of probing class vectors, constraint selection and the
//! freezing cuts built from the selection.

use serde::{Deserialize, Serialize};

use super::HeuristicError;
use crate::bnb::Restriction;
use crate::probe::ProbingData;
use crate::sos1::Sos1Constraint;

/// Empirical class frequencies of `classes` over `num_classes` bins.
pub fn class_distribution(classes: &[u32], num_classes: usize) -> Vec<f64> {
    let mut counts = vec![0usize; num_classes];
    for &k in classes {
        counts[k as usize] += 1;
    }
    let n = classes.len() as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}

/// Shannon entropy (nats) of the empirical class distribution of `classes`.
pub fn entropy(classes: &[u32]) -> Result<f64, HeuristicError> {
    if classes.is_empty() {
        return Err(HeuristicError::EmptyProbingVector);
    }
    let bins = classes.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut counts = vec![0usize; bins];
    for &k in classes {
        counts[k as usize] += 1;
    }
    // Summing in a fixed count order makes equal histograms give equal bits.
    counts.retain(|&c| c > 0);
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let n = classes.len() as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok(if h > 0.0 { h } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintScore {
    /// Position of the row in the probed set list.
    pub v: usize,
    pub entropy: f64,
    pub score: f64,
    pub distribution: Vec<f64>,
    /// Most frequent class, lowest index on ties.
    pub predicted: usize,
}

pub fn score_constraint(v: usize, classes: &[u32], num_classes: usize) -> Result<ConstraintScore, HeuristicError> {
    let h = entropy(classes)?;
    let distribution = class_distribution(classes, num_classes);
    let mut predicted = 0;
    for (k, &p) in distribution.iter().enumerate() {
        if p > distribution[predicted] {
            predicted = k;
        }
    }
    Ok(ConstraintScore {
        v,
        entropy: h,
        score: -h,
        distribution,
        predicted,
    })
}

/// Score every probed row. `data.constraints` must line up with `sets`.
pub fn score_all(
    data: &ProbingData,
    sets: &[Sos1Constraint],
) -> Result<Vec<ConstraintScore>, HeuristicError> {
    if data.constraints.len() != sets.len() {
        return Err(HeuristicError::ProbingMismatch(format!(
            "probing data covers {} rows, model has {}",
            data.constraints.len(),
            sets.len()
        )));
    }
    data.constraints
        .iter()
        .zip(sets)
        .enumerate()
        .map(|(v, (cv, set))| {
            if cv.name != set.name {
                return Err(HeuristicError::ProbingMismatch(format!(
                    "row {v}: probing data names `{}`, model has `{}`",
                    cv.name, set.name
                )));
            }
            if cv.classes.iter().any(|&k| k as usize >= set.num_classes()) {
                return Err(HeuristicError::ProbingMismatch(format!(
                    "row `{}` has a class index outside its {} classes",
                    set.name,
                    set.num_classes()
                )));
            }
            score_constraint(v, &cv.classes, set.num_classes())
        })
        .collect()
}

/// Rows ordered by descending score, ties by row position.
fn sorted(scores: &[ConstraintScore]) -> Vec<&ConstraintScore> {
    let mut order: Vec<&ConstraintScore> = scores.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.v.cmp(&b.v)));
    order
}

/// The first `floor(r * |V|)` rows by descending score.
pub fn select_by_ratio(scores: &[ConstraintScore], ratio: f64) -> Vec<usize> {
    let count = ((ratio * scores.len() as f64).floor() as usize).min(scores.len());
    sorted(scores).into_iter().take(count).map(|s| s.v).collect()
}

/// Rows with entropy at most `threshold`, plus the fraction of rows selected.
pub fn select_by_threshold(scores: &[ConstraintScore], threshold: f64) -> (Vec<usize>, f64) {
    let chosen: Vec<usize> = sorted(scores)
        .into_iter()
        .filter(|s| s.entropy <= threshold)
        .map(|s| s.v)
        .collect();
    let ratio = if scores.is_empty() {
        0.0
    } else {
        chosen.len() as f64 / scores.len() as f64
    };
    (chosen, ratio)
}

/// Freeze row `v` to its predicted class, or to either the predicted or the
/// incumbent class when `incumbent_class` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreezingCut {
    pub v: usize,
    pub predicted: usize,
    pub incumbent_class: Option<usize>,
}

impl FreezingCut {
    pub fn to_restriction(&self, sets: &[Sos1Constraint]) -> Result<Restriction, HeuristicError> {
        let set = sets
            .get(self.v)
            .ok_or_else(|| HeuristicError::ProbingMismatch(format!("no row {}", self.v)))?;
        let mut members = Vec::with_capacity(2);
        for k in std::iter::once(self.predicted).chain(self.incumbent_class) {
            if k >= set.num_classes() {
                return Err(HeuristicError::ProbingMismatch(format!(
                    "class {k} outside row `{}`",
                    set.name
                )));
            }
            members.push(set.class_var(k));
        }
        Ok(Restriction::Freeze {
            name: format!("fc_{}", set.name),
            members,
        })
    }
}

/// Cuts for the selected rows. With `incumbent_classes`, each cut also admits
/// the incumbent's class, so the incumbent stays feasible.
pub fn freezing_cuts(
    selected: &[usize],
    scores: &[ConstraintScore],
    incumbent_classes: Option<&[u32]>,
) -> Vec<FreezingCut> {
    selected
        .iter()
        .map(|&v| FreezingCut {
            v,
            predicted: scores[v].predicted,
            incumbent_class: incumbent_classes.map(|c| c[v] as usize),
        })
        .collect()
}
