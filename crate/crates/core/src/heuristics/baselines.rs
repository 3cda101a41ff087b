//! Baseline fixing heuristics: RINS, local branching and the greedy LP fixer.

use std::collections::BTreeMap;

use super::select::FreezingCut;
use super::{finish, not_run, HeuristicConfig, HeuristicError, HeuristicKind, HeuristicOutcome, ProbingSummary, RunReport};
use crate::bnb::{self, Restriction, SolveError, SolveStatus};
use crate::lp::{self, LpStatus};
use crate::model::{MipModel, Solution, VarId};
use crate::probe::argmax_class;
use crate::sos1::detect_sos1;

/// Agreement tolerance between LP value and incumbent value for RINS.
pub const MATCH_TOL: f64 = 1e-6;

struct IncumbentProbe {
    root_lp: Option<Vec<f64>>,
    incumbent: Option<Solution>,
    summary: ProbingSummary,
}

// Same branch-and-bound run as `probe::probe`, keeping only what RINS and LB use.
fn probe_incumbent(
    model: &MipModel,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<IncumbentProbe, HeuristicError> {
    let mut root_lp = None;
    let mut observations = 0;
    let result = bnb::solve(
        model,
        &config.budget.probing_limits(),
        &mut |obs| {
            if obs.index == 0 {
                root_lp = Some(obs.values.to_vec());
            }
            observations += 1;
        },
        seed,
    )?;
    Ok(IncumbentProbe {
        root_lp,
        summary: ProbingSummary {
            nodes: result.nodes,
            observations,
            incumbent_objective: result.objective(),
        },
        incumbent: result.incumbent,
    })
}

fn binary_reference(model: &MipModel, values: &[f64]) -> Vec<(VarId, f64)> {
    model.binary_ids().map(|v| (v, values[v.0].round())).collect()
}

/// Fix up to `floor(ratio * #binaries)` binaries on which the root LP point and
/// the probing incumbent agree, to their incumbent values.
pub fn rins(
    model: &MipModel,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<HeuristicOutcome, HeuristicError> {
    config.validate()?;
    let HeuristicKind::Rins { ratio } = config.kind else {
        return Err(HeuristicError::Config("rins() needs a RINS configuration".into()));
    };
    let probed = probe_incumbent(model, config, seed)?;
    let offset = config.budget.probing;
    let mut report = RunReport {
        kind: "RINS".into(),
        probing: Some(probed.summary),
        ..RunReport::default()
    };
    let (Some(root), Some(inc)) = (probed.root_lp, probed.incumbent) else {
        return Ok(not_run(report, offset, "no-incumbent"));
    };

    let mut matching: Vec<VarId> = model
        .binary_ids()
        .filter(|v| (root[v.0] - inc.values[v.0]).abs() <= MATCH_TOL)
        .collect();
    matching.sort_by(|a, b| {
        let fa = (root[a.0] - root[a.0].round()).abs();
        let fb = (root[b.0] - root[b.0].round()).abs();
        fa.total_cmp(&fb).then(a.cmp(b))
    });
    let cap = (ratio * model.num_binaries() as f64).floor() as usize;
    matching.truncate(cap);
    report.fixed = matching
        .iter()
        .map(|&v| (v, inc.values[v.0].round()))
        .collect();
    report.selected = report.fixed.len();
    let restrictions: Vec<Restriction> = report
        .fixed
        .iter()
        .map(|&(var, value)| Restriction::Fix { var, value })
        .collect();
    let reduced = bnb::add_fixing(model, &restrictions)?;
    let result = bnb::solve_quiet(&reduced, &config.budget.limits(config.budget.remaining()), seed)?;
    Ok(finish(result, report, offset))
}

/// Restrict the search to binaries within Hamming distance
/// `floor(distance * #binaries)` of the probing incumbent.
pub fn local_branching(
    model: &MipModel,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<HeuristicOutcome, HeuristicError> {
    config.validate()?;
    let HeuristicKind::LocalBranching { distance } = config.kind else {
        return Err(HeuristicError::Config(
            "local_branching() needs an LB configuration".into(),
        ));
    };
    let probed = probe_incumbent(model, config, seed)?;
    let offset = config.budget.probing;
    let mut report = RunReport {
        kind: "LB".into(),
        probing: Some(probed.summary),
        ..RunReport::default()
    };
    let Some(inc) = probed.incumbent else {
        return Ok(not_run(report, offset, "no-incumbent"));
    };
    let max_distance = (distance * model.num_binaries() as f64).floor();
    report.max_distance = Some(max_distance);
    let reduced = bnb::add_fixing(
        model,
        &[Restriction::LocalBranching {
            reference: binary_reference(model, &inc.values),
            max_distance,
        }],
    )?;
    let result = bnb::solve_quiet(&reduced, &config.budget.limits(config.budget.remaining()), seed)?;
    Ok(finish(result, report, offset))
}

/// Repeatedly solve the LP relaxation and freeze the row whose largest member
/// value is highest, until `floor(ratio * |V|)` rows are frozen; then solve the
/// reduced model on the full budget.
pub fn greedy_fix(
    model: &MipModel,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<HeuristicOutcome, HeuristicError> {
    config.validate()?;
    let HeuristicKind::Greedy { ratio } = config.kind else {
        return Err(HeuristicError::Config("greedy_fix() needs a GH configuration".into()));
    };
    let sets = detect_sos1(model);
    if sets.is_empty() {
        return Err(HeuristicError::NoSets);
    }
    let target = (ratio * sets.len() as f64).floor() as usize;
    let mut report = RunReport {
        kind: "GH".into(),
        num_sets: sets.len(),
        ..RunReport::default()
    };
    let mut current = model.clone();
    let mut frozen = vec![false; sets.len()];
    let no_fixings = BTreeMap::new();
    while report.cuts.len() < target {
        let relax = lp::solve_lp(&current, &no_fixings, lp::DEFAULT_ITERATION_LIMIT)
            .map_err(SolveError::from)?;
        report.lp_solves += 1;
        if relax.status != LpStatus::Optimal {
            report.flags.push("gh-early-stop".into());
            break;
        }
        let mut pick: Option<(usize, f64)> = None;
        for (v, set) in sets.iter().enumerate() {
            if frozen[v] {
                continue;
            }
            let top = set
                .classes
                .iter()
                .map(|x| relax.values[x.0])
                .fold(f64::NEG_INFINITY, f64::max);
            if pick.map_or(true, |(_, best)| top > best) {
                pick = Some((v, top));
            }
        }
        let Some((v, _)) = pick else { break };
        let cut = FreezingCut {
            v,
            predicted: argmax_class(&relax.values, &sets[v]) as usize,
            incumbent_class: None,
        };
        current = bnb::add_fixing(&current, &[cut.to_restriction(&sets)?])?;
        frozen[v] = true;
        report.cuts.push(cut);
    }
    report.selected = report.cuts.len();
    report.equivalent_ratio = Some(report.cuts.len() as f64 / sets.len() as f64);
    let result = bnb::solve_quiet(&current, &config.budget.limits(config.budget.total), seed)?;
    if result.status == SolveStatus::Infeasible {
        report.flags.push("reduced-infeasible".into());
    }
    Ok(finish(result, report, 0.0))
}
