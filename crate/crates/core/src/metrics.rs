//! Evaluation arithmetic and the summary tables built from per-run outcomes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::LogEntry;

/// Below this magnitude a best-known objective counts as zero.
pub const ZERO_BEST_TOL: f64 = 1e-10;
/// How far an objective may undercut the best known before it is an error.
pub const NEW_BEST_TOL: f64 = 1e-6;
/// Gaps are capped here inside the primal integral.
pub const GAP_CAP: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty input")]
    Empty,
    /// An objective beats the recorded best; the best-known pass is stale.
    #[error("new-best-unrecorded: objective {objective} is below best known {best}")]
    NewBestUnrecorded { objective: f64, best: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Percent gap of `obj` to `best`, relative to `|best|`.
///
/// A best of (numerically) zero gives 0 on a match and `+inf` otherwise.
pub fn primal_gap(obj: f64, best: f64) -> Result<f64, MetricsError> {
    if !obj.is_finite() || !best.is_finite() {
        return Err(MetricsError::Invalid(format!("non-finite objective {obj} / {best}")));
    }
    if obj < best - NEW_BEST_TOL {
        return Err(MetricsError::NewBestUnrecorded { objective: obj, best });
    }
    if best.abs() < ZERO_BEST_TOL {
        return Ok(if (obj - best).abs() < ZERO_BEST_TOL { 0.0 } else { f64::INFINITY });
    }
    // Tiny improvements within the tolerance count as a match.
    Ok((100.0 * (obj - best) / best.abs()).max(0.0))
}

/// `(prod (v + shift))^(1/n)`, computed in the log domain. The shift is not
/// subtracted back.
pub fn shifted_geomean(values: &[f64], shift: f64) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    if let Some(v) = values.iter().find(|&&v| !(v + shift > 0.0)) {
        return Err(MetricsError::Invalid(format!("value {v} with shift {shift} is not positive")));
    }
    let mean_log = values.iter().map(|v| (v + shift).ln()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp())
}

/// Quantile by linear interpolation between order statistics (inclusive
/// method: position `q * (n - 1)`).
pub fn quantile(values: &[f64], q: f64) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(MetricsError::Invalid(format!("quantile {q} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, q))
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() || sorted[lo] == sorted[lo + 1] {
        return sorted[lo];
    }
    sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac
}

pub fn mean(values: &[f64]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Area under the gap-versus-time step function over `[0, horizon]`, divided
/// by `horizon`. The gap is 100 before the first incumbent and capped at 100.
pub fn primal_integral(log: &[LogEntry], best: f64, horizon: f64) -> Result<f64, MetricsError> {
    if !(horizon > 0.0) {
        return Err(MetricsError::Invalid(format!("horizon {horizon} must be positive")));
    }
    if log.windows(2).any(|w| w[1].elapsed < w[0].elapsed) {
        return Err(MetricsError::Invalid("incumbent log is not sorted by time".into()));
    }
    let mut area = 0.0;
    let mut t = 0.0;
    let mut gap = GAP_CAP;
    for entry in log {
        let at = entry.elapsed.clamp(0.0, horizon);
        area += gap * (at - t);
        t = at;
        gap = primal_gap(entry.objective, best)?.min(GAP_CAP);
    }
    area += gap * (horizon - t);
    Ok(area / horizon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeStatus {
    Optimal,
    Feasible,
    Infeasible,
    NoSolution,
    Error,
}

/// One (instance, scenario) run, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub instance: String,
    pub instance_index: usize,
    pub scenario: String,
    pub scenario_index: usize,
    pub status: OutcomeStatus,
    pub objective: Option<f64>,
    /// Time (or node count) at which the best solution appeared, probing included.
    pub runtime_to_best: Option<f64>,
    /// Budget spent before the final solve.
    pub time_offset: f64,
    /// Total budget of the run.
    pub horizon: f64,
    pub timeline: Vec<LogEntry>,
    pub cuts: usize,
    pub equivalent_ratio: Option<f64>,
    pub nodes: u64,
    pub flags: Vec<String>,
    pub error: Option<String>,
    /// Omitted under node budgets so outcome files are reproducible.
    pub wall_time: Option<f64>,
}

impl ScenarioOutcome {
    /// Best objective reached by absolute time `t`.
    pub fn objective_at(&self, t: f64) -> Option<f64> {
        self.timeline
            .iter()
            .take_while(|e| e.elapsed <= t)
            .last()
            .map(|e| e.objective)
    }
}

fn win_tol(value: f64) -> f64 {
    1e-9 * value.abs().max(1.0)
}

/// Best objective per instance over every scenario.
pub fn best_known(outcomes: &[ScenarioOutcome]) -> BTreeMap<String, f64> {
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for o in outcomes {
        if let Some(obj) = o.objective {
            best.entry(o.instance.clone())
                .and_modify(|b| *b = b.min(obj))
                .or_insert(obj);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRecord {
    pub instance: String,
    pub scenario: String,
    pub objective: Option<f64>,
    pub best: Option<f64>,
    pub gap: Option<f64>,
    /// The best known objective is negative, so the gap divides by its magnitude.
    pub negative_best: bool,
}

fn ordered(outcomes: &[ScenarioOutcome]) -> Vec<&ScenarioOutcome> {
    let mut v: Vec<&ScenarioOutcome> = outcomes.iter().collect();
    v.sort_by(|a, b| {
        (a.scenario_index, a.instance_index, &a.scenario, &a.instance)
            .cmp(&(b.scenario_index, b.instance_index, &b.scenario, &b.instance))
    });
    v
}

fn scenario_order(outcomes: &[ScenarioOutcome]) -> Vec<String> {
    let mut seen: Vec<(usize, String)> = outcomes
        .iter()
        .map(|o| (o.scenario_index, o.scenario.clone()))
        .collect();
    seen.sort();
    seen.dedup();
    seen.into_iter().map(|(_, s)| s).collect()
}

pub fn gap_records(
    outcomes: &[ScenarioOutcome],
    best: &BTreeMap<String, f64>,
) -> Result<Vec<GapRecord>, MetricsError> {
    ordered(outcomes)
        .into_iter()
        .map(|o| {
            let b = best.get(&o.instance).copied();
            let gap = match (o.objective, b) {
                (Some(obj), Some(b)) => Some(primal_gap(obj, b)?),
                _ => None,
            };
            Ok(GapRecord {
                instance: o.instance.clone(),
                scenario: o.scenario.clone(),
                objective: o.objective,
                best: b,
                gap,
                negative_best: b.is_some_and(|b| b < 0.0),
            })
        })
        .collect()
}

/// Quantiles, mean and shifted geometric mean of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
    pub mean: f64,
    pub geomean: f64,
}

impl Summary {
    /// `None` for an empty sample. Values are sorted first so the result does
    /// not depend on input order.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Summary {
            q10: quantile_sorted(&sorted, 0.1),
            q50: quantile_sorted(&sorted, 0.5),
            q90: quantile_sorted(&sorted, 0.9),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            geomean: shifted_geomean(&sorted, 1.0).unwrap_or(f64::NAN),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub stats: Option<Summary>,
    pub no_sol: usize,
    pub wins: usize,
    pub instances: usize,
}

/// Credit a win to every scenario whose value is within tolerance of the
/// per-instance minimum.
fn tally_wins<F>(outcomes: &[&ScenarioOutcome], value: F) -> BTreeMap<String, usize>
where
    F: Fn(&ScenarioOutcome) -> Option<f64>,
{
    let mut by_instance: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
    for o in outcomes {
        if let Some(v) = value(o) {
            by_instance.entry(&o.instance).or_default().push((&o.scenario, v));
        }
    }
    let mut wins = BTreeMap::new();
    for entries in by_instance.values() {
        let min = entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        for &(s, v) in entries {
            if v <= min + win_tol(min) {
                *wins.entry(s.to_string()).or_insert(0) += 1;
            }
        }
    }
    wins
}

/// The primal-gap table: one row per scenario, gap statistics over instances
/// with a solution, No Sol and Wins counts. Tied wins count for every tying
/// scenario.
pub fn aggregate(
    outcomes: &[ScenarioOutcome],
    best: &BTreeMap<String, f64>,
) -> Result<Vec<AggregateRow>, MetricsError> {
    let records = gap_records(outcomes, best)?;
    let sorted = ordered(outcomes);
    let wins = tally_wins(&sorted, |o| o.objective);
    Ok(scenario_order(outcomes)
        .into_iter()
        .map(|s| {
            let rows: Vec<&GapRecord> = records.iter().filter(|r| r.scenario == s).collect();
            let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap).collect();
            AggregateRow {
                stats: Summary::of(&gaps),
                no_sol: rows.iter().filter(|r| r.objective.is_none()).count(),
                wins: wins.get(&s).copied().unwrap_or(0),
                instances: rows.len(),
                scenario: s,
            }
        })
        .collect())
}

/// Runtime-to-best table; a win is the earliest best solution.
pub fn runtime_table(outcomes: &[ScenarioOutcome]) -> Vec<AggregateRow> {
    let sorted = ordered(outcomes);
    let wins = tally_wins(&sorted, |o| o.objective.and(o.runtime_to_best));
    scenario_order(outcomes)
        .into_iter()
        .map(|s| {
            let rows: Vec<&&ScenarioOutcome> = sorted.iter().filter(|o| o.scenario == s).collect();
            let times: Vec<f64> = rows
                .iter()
                .filter(|o| o.objective.is_some())
                .filter_map(|o| o.runtime_to_best)
                .collect();
            AggregateRow {
                stats: Summary::of(&times),
                no_sol: rows.iter().filter(|o| o.objective.is_none()).count(),
                wins: wins.get(&s).copied().unwrap_or(0),
                instances: rows.len(),
                scenario: s,
            }
        })
        .collect()
}

/// Equivalent fixing ratio per scenario, for scenarios that report one.
pub fn fixing_ratio_table(outcomes: &[ScenarioOutcome]) -> Vec<(String, Summary)> {
    let sorted = ordered(outcomes);
    scenario_order(outcomes)
        .into_iter()
        .filter_map(|s| {
            let ratios: Vec<f64> = sorted
                .iter()
                .filter(|o| o.scenario == s)
                .filter_map(|o| o.equivalent_ratio)
                .collect();
            Summary::of(&ratios).map(|sum| (s, sum))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeRow {
    pub scenario: String,
    /// Mean gap over instances with a solution at each checkpoint.
    pub mean_gap: Vec<Option<f64>>,
    /// Instances with a solution at each checkpoint.
    pub solved: Vec<usize>,
}

/// Gap and solved count at checkpoints measured from the end of each
/// scenario's probing phase.
pub fn gap_over_time(
    outcomes: &[ScenarioOutcome],
    best: &BTreeMap<String, f64>,
    checkpoints: &[f64],
) -> Result<Vec<TimeRow>, MetricsError> {
    let sorted = ordered(outcomes);
    scenario_order(outcomes)
        .into_iter()
        .map(|s| {
            let runs: Vec<&&ScenarioOutcome> = sorted.iter().filter(|o| o.scenario == s).collect();
            let mut mean_gap = Vec::with_capacity(checkpoints.len());
            let mut solved = Vec::with_capacity(checkpoints.len());
            for &c in checkpoints {
                let mut gaps = Vec::new();
                for o in &runs {
                    if let (Some(obj), Some(&b)) = (o.objective_at(o.time_offset + c), best.get(&o.instance)) {
                        gaps.push(primal_gap(obj, b)?);
                    }
                }
                solved.push(gaps.len());
                gaps.sort_by(f64::total_cmp);
                mean_gap.push(mean(&gaps).ok());
            }
            Ok(TimeRow { scenario: s, mean_gap, solved })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralRecord {
    pub instance: String,
    pub scenario: String,
    pub integral: Option<f64>,
    pub solutions: usize,
}

/// Primal integral and incumbent count per run; runs that errored have no integral.
pub fn integral_records(
    outcomes: &[ScenarioOutcome],
    best: &BTreeMap<String, f64>,
) -> Result<Vec<IntegralRecord>, MetricsError> {
    ordered(outcomes)
        .into_iter()
        .map(|o| {
            let integral = match (o.status, best.get(&o.instance)) {
                (OutcomeStatus::Error, _) => None,
                (_, Some(&b)) => Some(primal_integral(&o.timeline, b, o.horizon)?),
                (_, None) => Some(GAP_CAP),
            };
            Ok(IntegralRecord {
                instance: o.instance.clone(),
                scenario: o.scenario.clone(),
                integral,
                solutions: o.timeline.len(),
            })
        })
        .collect()
}

/// `nan` for missing cells; `inf` for unbounded gaps.
pub fn fmt_cell(value: Option<f64>, decimals: usize) -> String {
    match value {
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v.is_infinite() => if v > 0.0 { "inf" } else { "-inf" }.into(),
        Some(v) => format!("{v:.decimals$}"),
        None => "nan".into(),
    }
}

const STAT_HEADER: [&str; 5] = ["q0.1", "q0.5", "q0.9", "mean", "geomean"];

fn stat_cells(stats: Option<&Summary>, decimals: usize) -> Vec<String> {
    match stats {
        Some(s) => [s.q10, s.q50, s.q90, s.mean, s.geomean]
            .iter()
            .map(|&v| fmt_cell(Some(v), decimals))
            .collect(),
        None => vec!["nan".to_string(); 5],
    }
}

/// A header plus string rows, rendered as CSV or an aligned markdown table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_markdown(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len().max(3)).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::from("|");
            for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
                if i == 0 {
                    let _ = write!(s, " {c:<w$} |");
                } else {
                    let _ = write!(s, " {c:>w$} |");
                }
            }
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        out.push('|');
        for (i, w) in widths.iter().enumerate() {
            let dashes = "-".repeat(*w);
            if i == 0 {
                let _ = write!(out, " {dashes} |");
            } else {
                let _ = write!(out, " {}: |", &dashes[1..]);
            }
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn header(first: &str, rest: &[&str]) -> Vec<String> {
    std::iter::once(first).chain(rest.iter().copied()).map(String::from).collect()
}

/// Scenario | q0.1 q0.5 q0.9 | mean | geomean | No Sol | Wins
pub fn aggregate_table(rows: &[AggregateRow], decimals: usize) -> Table {
    let mut h = header("scenario", &STAT_HEADER);
    h.push("no_sol".into());
    h.push("wins".into());
    Table {
        header: h,
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.scenario.clone()];
                cells.extend(stat_cells(r.stats.as_ref(), decimals));
                cells.push(r.no_sol.to_string());
                cells.push(r.wins.to_string());
                cells
            })
            .collect(),
    }
}

pub fn fixing_ratio_report(rows: &[(String, Summary)], decimals: usize) -> Table {
    Table {
        header: header("scenario", &STAT_HEADER),
        rows: rows
            .iter()
            .map(|(s, sum)| {
                let mut cells = vec![s.clone()];
                cells.extend(stat_cells(Some(sum), decimals));
                cells
            })
            .collect(),
    }
}

/// Two tables with one column per checkpoint: mean gap, and solved count.
pub fn gap_over_time_tables(rows: &[TimeRow], checkpoints: &[f64], decimals: usize) -> (Table, Table) {
    let cols: Vec<String> = checkpoints.iter().map(|c| format!("{c}")).collect();
    let mut h = vec!["scenario".to_string()];
    h.extend(cols);
    let gaps = Table {
        header: h.clone(),
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.scenario.clone()];
                cells.extend(r.mean_gap.iter().map(|&g| fmt_cell(g, decimals)));
                cells
            })
            .collect(),
    };
    let solved = Table {
        header: h,
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.scenario.clone()];
                cells.extend(r.solved.iter().map(|n| n.to_string()));
                cells
            })
            .collect(),
    };
    (gaps, solved)
}

pub fn gap_records_table(records: &[GapRecord], decimals: usize) -> Table {
    Table {
        header: header("instance", &["scenario", "objective", "best", "gap", "negative_best"]),
        rows: records
            .iter()
            .map(|r| {
                vec![
                    r.instance.clone(),
                    r.scenario.clone(),
                    fmt_cell(r.objective, decimals),
                    fmt_cell(r.best, decimals),
                    fmt_cell(r.gap, decimals),
                    r.negative_best.to_string(),
                ]
            })
            .collect(),
    }
}

pub fn integral_table(records: &[IntegralRecord], decimals: usize) -> Table {
    Table {
        header: header("instance", &["scenario", "primal_integral", "solutions"]),
        rows: records
            .iter()
            .map(|r| {
                vec![
                    r.instance.clone(),
                    r.scenario.clone(),
                    fmt_cell(r.integral, decimals),
                    r.solutions.to_string(),
                ]
            })
            .collect(),
    }
}
