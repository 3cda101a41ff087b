//! Seeded generator of assignment-style instances: every "train" picks exactly
//! one "consist" (a set-partitioning row), consists draw on shared resource
//! pools (capacity rows), and some consecutive trains forbid one pair of
//! consists (linking rows).
//!
//! A feasible assignment is planted first and the capacities are sized around
//! it, so every instance is feasible. Heavier consists are cheaper, which makes
//! the capacity rows bind and the LP relaxation fractional.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MipModel, ModelError, Sense, VarId, VariableSpec};

/// Largest per-resource usage of a single consist.
const MAX_USAGE: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub n_sets: usize,
    pub classes_min: usize,
    pub classes_max: usize,
    pub n_resources: usize,
    /// 1 sizes capacities exactly at the planted usage; smaller values loosen them.
    pub tightness: f64,
    pub cost_noise: f64,
    /// Chance that two consecutive sets get a linking row.
    #[serde(default = "default_link_probability")]
    pub link_probability: f64,
}

fn default_link_probability() -> f64 {
    0.3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Small; at most 12 binaries so every instance is enumerable.
    A,
    /// Larger; for heuristic comparison only.
    B,
}

impl GenSpec {
    pub fn preset(preset: Preset, seed: u64) -> Self {
        match preset {
            Preset::A => Self {
                seed,
                n_sets: 4,
                classes_min: 2,
                classes_max: 3,
                n_resources: 2,
                tightness: 0.8,
                cost_noise: 5.0,
                link_probability: 0.3,
            },
            Preset::B => Self {
                seed,
                n_sets: 24,
                classes_min: 3,
                classes_max: 5,
                n_resources: 3,
                tightness: 0.85,
                cost_noise: 8.0,
                link_probability: 0.3,
            },
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_sets == 0 {
            return Err(GenError::Spec("n_sets must be at least 1".into()));
        }
        if self.classes_min < 2 {
            return Err(GenError::Spec("classes_min must be at least 2".into()));
        }
        if self.classes_min > self.classes_max {
            return Err(GenError::Spec(format!(
                "classes range inverted: {} > {}",
                self.classes_min, self.classes_max
            )));
        }
        if !(self.tightness > 0.0 && self.tightness <= 1.0) {
            return Err(GenError::Spec("tightness must lie in (0, 1]".into()));
        }
        if !(self.cost_noise >= 0.0) || !(0.0..=1.0).contains(&self.link_probability) {
            return Err(GenError::Spec("cost_noise and link_probability out of range".into()));
        }
        Ok(())
    }

    pub fn instance_name(&self) -> String {
        format!(
            "gen-s{}-k{}_{}-r{}-seed{}",
            self.n_sets, self.classes_min, self.classes_max, self.n_resources, self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: GenSpec,
    pub instance: String,
    /// Class chosen for each set by the planted solution.
    pub planted_classes: Vec<usize>,
    pub planted_values: Vec<f64>,
    pub planted_objective: f64,
    /// Column ids of every set, in class order.
    pub sets: Vec<Vec<VarId>>,
}

pub fn generate(spec: &GenSpec) -> Result<(MipModel, Manifest), GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let name = spec.instance_name();
    let mut model = MipModel::new(name.clone());

    let resource_price: Vec<f64> = (0..spec.n_resources)
        .map(|_| rng.gen_range(2.0..6.0))
        .collect();
    let mut sets: Vec<Vec<VarId>> = Vec::with_capacity(spec.n_sets);
    let mut usage: Vec<Vec<Vec<u32>>> = Vec::with_capacity(spec.n_sets);
    for s in 0..spec.n_sets {
        let k_count = rng.gen_range(spec.classes_min..=spec.classes_max);
        let base = rng.gen_range(20.0..60.0);
        let mut members = Vec::with_capacity(k_count);
        let mut set_usage = Vec::with_capacity(k_count);
        for k in 0..k_count {
            let use_k: Vec<u32> = (0..spec.n_resources)
                .map(|_| rng.gen_range(0..=MAX_USAGE))
                .collect();
            let heavy: f64 = use_k
                .iter()
                .zip(&resource_price)
                .map(|(&u, p)| p * f64::from(MAX_USAGE - u))
                .sum();
            let noise = if spec.cost_noise > 0.0 {
                rng.gen_range(0.0..spec.cost_noise)
            } else {
                0.0
            };
            let cost = ((base + heavy + noise) * 100.0).round() / 100.0;
            let id = model.add_variable(VariableSpec::binary(format!("x_s{s}_k{k}")).with_cost(cost))?;
            members.push(id);
            set_usage.push(use_k);
        }
        model.add_constraint(
            format!("assign_{s}"),
            members.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Eq,
            1.0,
        )?;
        sets.push(members);
        usage.push(set_usage);
    }

    let planted_classes: Vec<usize> = sets.iter().map(|m| rng.gen_range(0..m.len())).collect();

    for r in 0..spec.n_resources {
        let planted: u32 = (0..spec.n_sets).map(|s| usage[s][planted_classes[s]][r]).sum();
        let max: u32 = usage.iter().map(|su| su.iter().map(|u| u[r]).max().unwrap_or(0)).sum();
        let slack = (1.0 - spec.tightness) * f64::from(max - planted);
        let capacity = f64::from(planted) + slack.floor();
        let terms: Vec<(VarId, f64)> = sets
            .iter()
            .zip(&usage)
            .flat_map(|(members, su)| {
                members
                    .iter()
                    .zip(su)
                    .filter(|(_, u)| u[r] > 0)
                    .map(move |(&v, u)| (v, f64::from(u[r])))
            })
            .collect();
        if terms.is_empty() {
            continue;
        }
        model.add_constraint(format!("cap_{r}"), terms, Sense::Le, capacity)?;
    }

    for s in 0..spec.n_sets.saturating_sub(1) {
        if !rng.gen_bool(spec.link_probability) {
            continue;
        }
        let (a, b) = (&sets[s], &sets[s + 1]);
        let ka = rng.gen_range(0..a.len());
        let kb = rng.gen_range(0..b.len());
        if ka == planted_classes[s] && kb == planted_classes[s + 1] {
            continue;
        }
        model.add_constraint(
            format!("link_{s}"),
            vec![(a[ka], 1.0), (b[kb], 1.0)],
            Sense::Le,
            1.0,
        )?;
    }

    let mut planted_values = vec![0.0; model.num_vars()];
    for (members, &k) in sets.iter().zip(&planted_classes) {
        planted_values[members[k].0] = 1.0;
    }
    let planted_objective = model.objective_value(&planted_values)?;
    let manifest = Manifest {
        spec: spec.clone(),
        instance: name,
        planted_classes,
        planted_values,
        planted_objective,
        sets,
    };
    Ok((model, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FEASIBILITY_TOL;
    use crate::sos1::detect_sos1;

    #[test]
    fn small_spec_shape() {
        let spec = GenSpec {
            seed: 1,
            n_sets: 3,
            classes_min: 2,
            classes_max: 2,
            n_resources: 1,
            tightness: 1.0,
            cost_noise: 1.0,
            link_probability: 0.0,
        };
        let (m, man) = generate(&spec).unwrap();
        assert_eq!(m.num_vars(), 6);
        assert_eq!(m.num_binaries(), 6);
        assert_eq!(detect_sos1(&m).len(), 3);
        let caps = m
            .constraints()
            .iter()
            .filter(|r| r.name.starts_with("cap_"))
            .count();
        assert!(caps <= 1);
        assert!(m.is_feasible(&man.planted_values, FEASIBILITY_TOL));
    }

    #[test]
    fn inverted_ranges_are_rejected() {
        let mut spec = GenSpec::preset(Preset::A, 0);
        spec.classes_min = 4;
        spec.classes_max = 3;
        assert!(matches!(generate(&spec), Err(GenError::Spec(_))));
        let mut spec = GenSpec::preset(Preset::A, 0);
        spec.classes_min = 1;
        assert!(generate(&spec).is_err());
        let mut spec = GenSpec::preset(Preset::A, 0);
        spec.n_sets = 0;
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn preset_a_is_enumerable() {
        for seed in 0..50 {
            let (m, _) = generate(&GenSpec::preset(Preset::A, seed)).unwrap();
            assert!(m.num_binaries() <= 12);
        }
    }
}
