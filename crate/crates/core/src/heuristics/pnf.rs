use super::select::{freezing_cuts, score_all, select_by_ratio, select_by_threshold};
use super::{finish, HeuristicConfig, HeuristicError, HeuristicKind, HeuristicOutcome, ProbingSummary, RunReport};
use crate::bnb::{self, Restriction, SolveStatus};
use crate::model::MipModel;
use crate::probe::{probe, ProbingData};
use crate::sos1::{detect_sos1, Sos1Constraint};

/// Probe, select, freeze, then solve the reduced model on the remaining budget.
pub fn pnf(
    model: &MipModel,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<HeuristicOutcome, HeuristicError> {
    config.validate()?;
    let sets = detect_sos1(model);
    if sets.is_empty() {
        return Err(HeuristicError::NoSets);
    }
    let data = probe(model, &sets, &config.budget.probing_limits(), seed)?;
    pnf_from_probe(model, &sets, &data, config, seed)
}

/// The select-freeze-solve half of [`pnf`], for probing data produced
/// elsewhere (e.g. loaded from a file).
pub fn pnf_from_probe(
    model: &MipModel,
    sets: &[Sos1Constraint],
    data: &ProbingData,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<HeuristicOutcome, HeuristicError> {
    config.validate()?;
    let scores = score_all(data, sets)?;
    let (selected, ratio) = match config.kind {
        HeuristicKind::Pnf { ratio } => {
            let chosen = select_by_ratio(&scores, ratio);
            let eq = chosen.len() as f64 / sets.len() as f64;
            (chosen, eq)
        }
        HeuristicKind::Pnft { threshold } => select_by_threshold(&scores, threshold),
        other => {
            return Err(HeuristicError::Config(format!(
                "{} is not a probe-and-freeze heuristic",
                other.label()
            )))
        }
    };
    let guard = if config.use_incumbent_guard {
        data.incumbent_classes.as_deref()
    } else {
        None
    };
    let cuts = freezing_cuts(&selected, &scores, guard);
    let restrictions = cuts
        .iter()
        .map(|c| c.to_restriction(sets))
        .collect::<Result<Vec<Restriction>, _>>()?;
    let reduced = bnb::add_fixing(model, &restrictions)?;
    let result = bnb::solve_quiet(&reduced, &config.budget.limits(config.budget.remaining()), seed)?;

    let mut report = RunReport {
        kind: config.kind.label().into(),
        probing: Some(ProbingSummary {
            nodes: data.nodes,
            observations: data.observations(),
            incumbent_objective: data.incumbent.as_ref().map(|s| s.objective),
        }),
        num_sets: sets.len(),
        selected: selected.len(),
        equivalent_ratio: Some(ratio),
        cuts,
        ..RunReport::default()
    };
    if data.incumbent.is_none() {
        report.flags.push("no-probing-incumbent".into());
    }
    if result.status == SolveStatus::Infeasible {
        report.flags.push("reduced-infeasible".into());
    }
    Ok(finish(result, report, config.budget.probing))
}
