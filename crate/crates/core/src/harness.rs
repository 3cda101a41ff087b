//! Scenario runner: load instances, run every (instance, scenario) pair, store
//! one JSON outcome per run, then aggregate the stored outcomes into tables.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::SolveStatus;
use crate::generator::{generate, GenError, GenSpec, Preset};
use crate::heuristics::{self, parse_scenario_name, Budget, BudgetUnit, HeuristicConfig, HeuristicError, HeuristicKind};
use crate::metrics::{self, MetricsError, OutcomeStatus, ScenarioOutcome};
use crate::model::{MipModel, FEASIBILITY_TOL};
use crate::mps::{parse_mps, MpsError};

pub const SCHEMA_VERSION: u32 = 1;
const OUTCOME_DIR: &str = "outcomes";
const META_FILE: &str = "run.json";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario file: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Mps {
        path: PathBuf,
        #[source]
        source: MpsError,
    },
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    /// An MPS file, a directory of `.mps` files, or a glob pattern. Relative
    /// paths resolve against the scenario file's directory.
    Path(String),
    Generate(GenSpec),
    /// `count` instances of a preset, seeds `first_seed..first_seed + count`.
    Preset {
        preset: Preset,
        first_seed: u64,
        count: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// `KIND-param-probing`, e.g. `PNF-0.5-20`; also the table label.
    pub name: String,
    /// Overrides the heuristic parsed from `name`.
    #[serde(default)]
    pub heuristic: Option<HeuristicKind>,
    /// Overrides the probing budget parsed from `name`.
    #[serde(default)]
    pub probing_budget: Option<f64>,
    pub total_budget: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "yes")]
    pub incumbent_guard: bool,
}

fn yes() -> bool {
    true
}

fn default_unit() -> BudgetUnit {
    BudgetUnit::Nodes
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub instances: Vec<InstanceSource>,
    pub scenarios: Vec<ScenarioSpec>,
    #[serde(default = "default_unit")]
    pub budget_unit: BudgetUnit,
    #[serde(default)]
    pub seed: u64,
    /// Gap-over-time checkpoints, measured after probing.
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A scenario with its heuristic and budget resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub name: String,
    pub config: HeuristicConfig,
    pub seed: u64,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn resolve(&self) -> Result<Vec<ResolvedScenario>, HarnessError> {
        if self.scenarios.is_empty() {
            return Err(HarnessError::Config("no scenarios".into()));
        }
        let mut names = BTreeSet::new();
        self.scenarios
            .iter()
            .map(|s| {
                if !names.insert(s.name.as_str()) {
                    return Err(HarnessError::Config(format!("duplicate scenario name `{}`", s.name)));
                }
                let (kind, probing) = match (s.heuristic, parse_scenario_name(&s.name)) {
                    (Some(kind), parsed) => (kind, parsed.ok().and_then(|p| p.1)),
                    (None, Ok(parsed)) => parsed,
                    (None, Err(e)) => return Err(e.into()),
                };
                let probing = s.probing_budget.or(probing).unwrap_or(0.0);
                if !kind.uses_probing() && probing != 0.0 {
                    return Err(HarnessError::Config(format!(
                        "scenario `{}`: {} takes no probing budget",
                        s.name,
                        kind.label()
                    )));
                }
                let mut config = HeuristicConfig::new(
                    kind,
                    Budget {
                        unit: self.budget_unit,
                        probing,
                        total: s.total_budget,
                    },
                );
                config.use_incumbent_guard = s.incumbent_guard;
                config
                    .validate()
                    .map_err(|e| HarnessError::Config(format!("scenario `{}`: {e}", s.name)))?;
                Ok(ResolvedScenario {
                    name: s.name.clone(),
                    config,
                    seed: s.seed.unwrap_or(self.seed),
                })
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.resolve()?;
        if self.instances.is_empty() {
            return Err(HarnessError::Config("no instances".into()));
        }
        if self.checkpoints.iter().any(|c| !(*c >= 0.0)) {
            return Err(HarnessError::Config("checkpoints must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub model: MipModel,
}

fn mps_files(pattern: &str, base: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let path = base.join(pattern);
    if path.is_file() {
        return Ok(vec![path]);
    }
    let mut files: Vec<PathBuf> = if path.is_dir() {
        fs::read_dir(&path)
            .map_err(io_err(&path))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("mps")))
            .collect()
    } else {
        let pat = path.to_string_lossy();
        glob::glob(&pat)
            .map_err(|e| HarnessError::Config(format!("bad pattern `{pattern}`: {e}")))?
            .filter_map(Result::ok)
            .filter(|p| p.is_file())
            .collect()
    };
    if files.is_empty() {
        return Err(HarnessError::Config(format!("`{pattern}` matches no instance files")));
    }
    files.sort();
    Ok(files)
}

pub fn read_mps(path: &Path) -> Result<MipModel, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_mps(&text).map_err(|source| HarnessError::Mps {
        path: path.to_path_buf(),
        source,
    })
}

/// Load every instance in source order. Names must be unique.
pub fn load_instances(sources: &[InstanceSource], base: &Path) -> Result<Vec<Instance>, HarnessError> {
    let mut out = Vec::new();
    for source in sources {
        match source {
            InstanceSource::Path(p) => {
                for file in mps_files(p, base)? {
                    let name = file
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    out.push(Instance {
                        name,
                        model: read_mps(&file)?,
                    });
                }
            }
            InstanceSource::Generate(spec) => {
                let (model, manifest) = generate(spec)?;
                out.push(Instance {
                    name: manifest.instance,
                    model,
                });
            }
            InstanceSource::Preset {
                preset,
                first_seed,
                count,
            } => {
                for seed in *first_seed..first_seed + count {
                    let (model, manifest) = generate(&GenSpec::preset(*preset, seed))?;
                    out.push(Instance {
                        name: manifest.instance,
                        model,
                    });
                }
            }
        }
    }
    let mut names = BTreeSet::new();
    for inst in &out {
        if !names.insert(inst.name.as_str()) {
            return Err(HarnessError::Config(format!("duplicate instance name `{}`", inst.name)));
        }
    }
    Ok(out)
}

/// Run one scenario on one instance. Failures become an `error` outcome.
pub fn run_one(
    instance: &Instance,
    instance_index: usize,
    scenario: &ResolvedScenario,
    scenario_index: usize,
) -> ScenarioOutcome {
    let budget = scenario.config.budget;
    let mut outcome = ScenarioOutcome {
        instance: instance.name.clone(),
        instance_index,
        scenario: scenario.name.clone(),
        scenario_index,
        status: OutcomeStatus::Error,
        objective: None,
        runtime_to_best: None,
        time_offset: budget.probing,
        horizon: budget.total,
        timeline: Vec::new(),
        cuts: 0,
        equivalent_ratio: None,
        nodes: 0,
        flags: Vec::new(),
        error: None,
        wall_time: None,
    };
    match heuristics::run(&instance.model, &scenario.config, scenario.seed) {
        Ok(run) => {
            if let Some(sol) = &run.result.incumbent {
                if !instance.model.is_feasible(&sol.values, FEASIBILITY_TOL) {
                    outcome.error = Some("solution violates the original model".into());
                    return outcome;
                }
            }
            outcome.status = match run.result.status {
                SolveStatus::Optimal => OutcomeStatus::Optimal,
                SolveStatus::Feasible => OutcomeStatus::Feasible,
                SolveStatus::Infeasible => OutcomeStatus::Infeasible,
                SolveStatus::LimitNoSolution => OutcomeStatus::NoSolution,
            };
            outcome.objective = run.objective();
            outcome.runtime_to_best = run.report.runtime_to_best;
            outcome.time_offset = run.report.time_offset;
            outcome.timeline = run.report.timeline;
            outcome.cuts = run.report.cuts.len();
            outcome.equivalent_ratio = run.report.equivalent_ratio;
            outcome.nodes = run.result.nodes + run.report.probing.map_or(0, |p| p.nodes);
            outcome.flags = run.report.flags;
            if budget.unit == BudgetUnit::Seconds {
                outcome.wall_time = Some(run.result.wall_time);
            }
        }
        Err(e) => {
            warn!("{} / {}: {e}", instance.name, scenario.name);
            outcome.error = Some(e.to_string());
        }
    }
    outcome
}

/// Settings the report needs besides the outcomes themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub schema_version: u32,
    pub budget_unit: BudgetUnit,
    pub checkpoints: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OutcomeRecord {
    schema_version: u32,
    outcome: ScenarioOutcome,
}

fn file_stem(outcome: &ScenarioOutcome) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
            .collect()
    };
    format!(
        "{:04}-{}__{:03}-{}",
        outcome.instance_index,
        clean(&outcome.instance),
        outcome.scenario_index,
        clean(&outcome.scenario)
    )
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 picks the number of CPUs.
    pub jobs: usize,
    pub seed: Option<u64>,
    pub budget_unit: Option<BudgetUnit>,
}

/// Run the full matrix, write the outcomes and the report into `out`, and
/// return the outcomes in (instance, scenario) order.
pub fn run(
    file: &ScenarioFile,
    base: &Path,
    out: &Path,
    options: &RunOptions,
) -> Result<Vec<ScenarioOutcome>, HarnessError> {
    let mut file = file.clone();
    if let Some(seed) = options.seed {
        file.seed = seed;
    }
    if let Some(unit) = options.budget_unit {
        file.budget_unit = unit;
    }
    file.validate()?;
    let scenarios = file.resolve()?;
    let instances = load_instances(&file.instances, base)?;
    info!("{} instances x {} scenarios", instances.len(), scenarios.len());

    let outcome_dir = out.join(OUTCOME_DIR);
    fs::create_dir_all(&outcome_dir).map_err(io_err(&outcome_dir))?;
    let pairs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..scenarios.len()).map(move |s| (i, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<ScenarioOutcome> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, s)| run_one(&instances[i], i, &scenarios[s], s))
            .collect()
    });
    for o in &outcomes {
        let path = outcome_dir.join(format!("{}.json", file_stem(o)));
        write_json(
            &path,
            &OutcomeRecord {
                schema_version: SCHEMA_VERSION,
                outcome: o.clone(),
            },
        )?;
    }
    write_json(
        &out.join(META_FILE),
        &RunMeta {
            schema_version: SCHEMA_VERSION,
            budget_unit: file.budget_unit,
            checkpoints: file.checkpoints.clone(),
        },
    )?;
    report(out)?;
    Ok(outcomes)
}

/// Read every stored outcome under `out`.
pub fn load_outcomes(out: &Path) -> Result<Vec<ScenarioOutcome>, HarnessError> {
    let dir = out.join(OUTCOME_DIR);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(io_err(&dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            let rec: OutcomeRecord = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
                path: p.clone(),
                source,
            })?;
            if rec.schema_version != SCHEMA_VERSION {
                return Err(HarnessError::Config(format!(
                    "{}: schema version {} (expected {SCHEMA_VERSION})",
                    p.display(),
                    rec.schema_version
                )));
            }
            Ok(rec.outcome)
        })
        .collect()
}

/// File name and contents of every report file.
pub fn render_report(outcomes: &[ScenarioOutcome], meta: &RunMeta) -> Result<Vec<(String, String)>, HarnessError> {
    // Best-known values need every scenario's objective before any gap is taken.
    let best = metrics::best_known(outcomes);
    let gap_rows = metrics::aggregate(outcomes, &best)?;
    let gap = metrics::aggregate_table(&gap_rows, 2);
    let gap_csv = metrics::aggregate_table(&gap_rows, 6);
    let runtime_rows = metrics::runtime_table(outcomes);
    let runtime = metrics::aggregate_table(&runtime_rows, 2);
    let ratios = metrics::fixing_ratio_table(outcomes);
    let per_instance = metrics::gap_records_table(&metrics::gap_records(outcomes, &best)?, 6);
    let integral = metrics::integral_table(&metrics::integral_records(outcomes, &best)?, 6);
    let time_rows = metrics::gap_over_time(outcomes, &best, &meta.checkpoints)?;
    let (gap_time, solved_time) = metrics::gap_over_time_tables(&time_rows, &meta.checkpoints, 2);

    let unit = meta.budget_unit;
    let mut md = String::new();
    md.push_str(&format!("# Primal gap (%)\n\n{}\n", gap.to_markdown()));
    md.push_str(&format!("# Runtime to best ({unit})\n\n{}\n", runtime.to_markdown()));
    if !ratios.is_empty() {
        md.push_str(&format!(
            "# Equivalent fixing ratio\n\n{}\n",
            metrics::fixing_ratio_report(&ratios, 2).to_markdown()
        ));
    }
    if !meta.checkpoints.is_empty() {
        md.push_str(&format!(
            "# Primal gap over time after probing ({unit})\n\n{}\n",
            gap_time.to_markdown()
        ));
        md.push_str(&format!(
            "# Instances with a solution after probing ({unit})\n\n{}\n",
            solved_time.to_markdown()
        ));
    }
    let errors: Vec<&ScenarioOutcome> = outcomes.iter().filter(|o| o.status == OutcomeStatus::Error).collect();
    if !errors.is_empty() {
        md.push_str("# Failed runs\n\n");
        for o in errors {
            md.push_str(&format!(
                "- {} / {}: {}\n",
                o.instance,
                o.scenario,
                o.error.as_deref().unwrap_or("unknown error")
            ));
        }
        md.push('\n');
    }

    Ok(vec![
        ("aggregate.csv".into(), gap_csv.to_csv()),
        ("runtime.csv".into(), metrics::aggregate_table(&runtime_rows, 6).to_csv()),
        ("fixing_ratio.csv".into(), metrics::fixing_ratio_report(&ratios, 6).to_csv()),
        ("gaps.csv".into(), per_instance.to_csv()),
        ("primal_integral.csv".into(), integral.to_csv()),
        ("gap_over_time.csv".into(), metrics::gap_over_time_tables(&time_rows, &meta.checkpoints, 6).0.to_csv()),
        ("solved_over_time.csv".into(), solved_time.to_csv()),
        ("report.md".into(), md),
    ])
}

/// Regenerate the report files under `out` from its stored outcomes.
pub fn report(out: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let meta_path = out.join(META_FILE);
    let meta: RunMeta = match fs::read_to_string(&meta_path) {
        Ok(text) => serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: meta_path.clone(),
            source,
        })?,
        Err(_) => RunMeta {
            schema_version: SCHEMA_VERSION,
            budget_unit: BudgetUnit::Nodes,
            checkpoints: Vec::new(),
        },
    };
    let outcomes = load_outcomes(out)?;
    let mut written = Vec::new();
    for (name, text) in render_report(&outcomes, &meta)? {
        let path = out.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
