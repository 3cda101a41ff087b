use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pnf_core::bnb;
use pnf_core::generator::{generate, GenSpec, Preset};
use pnf_core::harness::{self, read_mps, RunOptions, ScenarioFile};
use pnf_core::heuristics::{self, pnf_from_probe, Budget, BudgetUnit, HeuristicConfig, HeuristicKind};
use pnf_core::model::{MipModel, FEASIBILITY_TOL};
use pnf_core::mps::{parse_document, write_mps};
use pnf_core::probe::{probe, ProbingData};
use pnf_core::sos1::{detect_sos1, screen_instance, ScreeningRule};

const PROBE_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "pnf", version, about = "Probe-and-freeze MIP heuristics and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic instances (MPS + manifest JSON).
    Gen(GenArgs),
    /// Read an MPS file and write it back in normalized form.
    Convert { input: PathBuf, output: PathBuf },
    /// Check an MPS file or a scenario file.
    Validate { path: PathBuf },
    /// Count set-partitioning rows and apply the screening rule.
    Detect {
        /// MPS files or directories.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the probing phase and save its data as JSON.
    Probe {
        instance: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Solve an instance, optionally freezing rows from a probing file.
    Solve(SolveArgs),
    /// Run a scenario matrix and write outcomes and tables.
    Run(RunArgs),
    /// Rebuild the tables of a finished run from its stored outcomes.
    Report { out: PathBuf },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 1000.0)]
    budget: f64,
    #[arg(long, default_value = "nodes")]
    budget_unit: BudgetUnit,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, conflicts_with = "spec")]
    preset: Option<PresetArg>,
    /// Generator spec as JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PresetArg {
    A,
    B,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Probing file from `pnf probe`; freezes rows selected by --ratio or --threshold.
    #[arg(long, requires = "selection")]
    cuts: Option<PathBuf>,
    #[arg(long, group = "selection")]
    ratio: Option<f64>,
    #[arg(long, group = "selection")]
    threshold: Option<f64>,
    /// Run a named heuristic scenario such as `RINS-0.5-20` instead.
    #[arg(long, conflicts_with = "cuts")]
    scenario: Option<String>,
    /// Total budget, probing included.
    #[arg(long, default_value_t = 1000.0)]
    budget: f64,
    #[arg(long, default_value = "nodes")]
    budget_unit: BudgetUnit,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Freeze to the predicted class only, without admitting the incumbent's.
    #[arg(long)]
    no_guard: bool,
    /// Write the solution values here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenarios: PathBuf,
    /// Parallel runs; 0 uses every CPU. Each run is single-threaded.
    #[arg(long, env = "PNF_JOBS", default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    budget_unit: Option<BudgetUnit>,
    #[arg(long, env = "PNF_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct ProbeFile {
    schema_version: u32,
    instance: String,
    budget_unit: BudgetUnit,
    probing_budget: f64,
    seed: u64,
    data: ProbingData,
}

#[derive(Serialize)]
struct SolveReport {
    instance: String,
    heuristic: String,
    status: bnb::SolveStatus,
    objective: Option<f64>,
    nodes: u64,
    selected: usize,
    equivalent_ratio: Option<f64>,
    runtime_to_best: Option<f64>,
    flags: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Convert { input, output } => {
            let model = read_mps(&input)?;
            write_text(&output, &write_mps(&model))
        }
        Command::Validate { path } => validate(&path),
        Command::Detect { paths, budget } => detect(&paths, &budget),
        Command::Probe { instance, budget, out } => probe_cmd(&instance, &budget, &out),
        Command::Solve(args) => solve(args),
        Command::Run(args) => run(args),
        Command::Report { out } => {
            for p in harness::report(&out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn gen(args: GenArgs) -> Result<()> {
    let base = match (&args.spec, args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<GenSpec>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(PresetArg::B)) => GenSpec::preset(Preset::B, args.seed),
        (None, _) => GenSpec::preset(Preset::A, args.seed),
    };
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for i in 0..args.count {
        let spec = GenSpec {
            seed: args.seed + i,
            ..base.clone()
        };
        let (model, manifest) = generate(&spec)?;
        let mps = args.out.join(format!("{}.mps", manifest.instance));
        write_text(&mps, &write_mps(&model))?;
        write_json(&args.out.join(format!("{}.manifest.json", manifest.instance)), &manifest)?;
        println!("{}", mps.display());
    }
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let file: ScenarioFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        file.validate()?;
        let base = path.parent().unwrap_or(Path::new("."));
        let instances = harness::load_instances(&file.instances, base)?;
        println!(
            "ok: {} scenarios, {} instances",
            file.scenarios.len(),
            instances.len()
        );
        return Ok(());
    }
    let doc = parse_document(&text).with_context(|| format!("parsing {}", path.display()))?;
    for w in &doc.warnings {
        println!("warning: {w}");
    }
    let m = &doc.model;
    println!(
        "ok: {} columns ({} binary), {} rows, {} set-partitioning rows, {} SOS records",
        m.num_vars(),
        m.num_binaries(),
        m.num_rows(),
        detect_sos1(m).len(),
        doc.sos.len()
    );
    Ok(())
}

fn mps_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x.eq_ignore_ascii_case("mps")))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn detect(paths: &[PathBuf], budget: &BudgetArgs) -> Result<()> {
    let limits = Budget {
        unit: budget.budget_unit,
        probing: budget.budget,
        total: budget.budget,
    }
    .probing_limits();
    let rule = ScreeningRule::default();
    for path in mps_paths(paths)? {
        let model = read_mps(&path)?;
        let sets = detect_sos1(&model).len();
        let result = bnb::solve_quiet(&model, &limits, budget.seed)?;
        let verdict = screen_instance(sets, &result, &rule);
        let reasons: Vec<&str> = verdict.reasons.iter().map(|r| r.as_str()).collect();
        println!(
            "{}\tsets={}\tnodes={}\tgap={:.2}\t{}{}",
            path.display(),
            sets,
            verdict.nodes,
            verdict.gap_percent,
            if verdict.keep { "keep" } else { "drop" },
            if reasons.is_empty() {
                String::new()
            } else {
                format!(" ({})", reasons.join(", "))
            }
        );
    }
    Ok(())
}

fn probe_cmd(instance: &Path, budget: &BudgetArgs, out: &Path) -> Result<()> {
    let model = read_mps(instance)?;
    let sets = detect_sos1(&model);
    let b = Budget {
        unit: budget.budget_unit,
        probing: budget.budget,
        total: budget.budget,
    };
    let data = probe(&model, &sets, &b.probing_limits(), budget.seed)?;
    println!(
        "{} rows, {} observations, {} nodes, incumbent {}",
        sets.len(),
        data.observations(),
        data.nodes,
        data.incumbent
            .as_ref()
            .map_or("none".to_string(), |s| s.objective.to_string())
    );
    write_json(
        out,
        &ProbeFile {
            schema_version: PROBE_SCHEMA_VERSION,
            instance: instance_name(instance),
            budget_unit: budget.budget_unit,
            probing_budget: budget.budget,
            seed: budget.seed,
            data,
        },
    )
}

fn solve(args: SolveArgs) -> Result<()> {
    let model = read_mps(&args.instance)?;
    let outcome = match &args.cuts {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: ProbeFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if file.schema_version != PROBE_SCHEMA_VERSION {
                bail!("{}: unsupported schema version {}", path.display(), file.schema_version);
            }
            if file.budget_unit != args.budget_unit {
                bail!(
                    "probing used {} but --budget-unit is {}",
                    file.budget_unit,
                    args.budget_unit
                );
            }
            let kind = match (args.ratio, args.threshold) {
                (Some(ratio), _) => HeuristicKind::Pnf { ratio },
                (None, Some(threshold)) => HeuristicKind::Pnft { threshold },
                (None, None) => bail!("--cuts needs --ratio or --threshold"),
            };
            let mut config = HeuristicConfig::new(
                kind,
                Budget {
                    unit: args.budget_unit,
                    probing: file.probing_budget,
                    total: args.budget,
                },
            );
            config.use_incumbent_guard = !args.no_guard;
            let sets = detect_sos1(&model);
            pnf_from_probe(&model, &sets, &file.data, &config, args.seed)?
        }
        None => {
            let (kind, probing) = match &args.scenario {
                Some(name) => heuristics::parse_scenario_name(name)?,
                None => (HeuristicKind::Solver, None),
            };
            let mut config = HeuristicConfig::new(
                kind,
                Budget {
                    unit: args.budget_unit,
                    probing: probing.unwrap_or(0.0),
                    total: args.budget,
                },
            );
            config.use_incumbent_guard = !args.no_guard;
            heuristics::run(&model, &config, args.seed)?
        }
    };
    if let Some(sol) = &outcome.result.incumbent {
        check_solution(&model, &sol.values)?;
        if let Some(out) = &args.out {
            write_json(out, sol)?;
        }
    }
    let report = SolveReport {
        instance: instance_name(&args.instance),
        heuristic: outcome.report.kind.clone(),
        status: outcome.result.status,
        objective: outcome.objective(),
        nodes: outcome.result.nodes,
        selected: outcome.report.selected,
        equivalent_ratio: outcome.report.equivalent_ratio,
        runtime_to_best: outcome.report.runtime_to_best,
        flags: outcome.report.flags.clone(),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn check_solution(model: &MipModel, values: &[f64]) -> Result<()> {
    let report = model.check_feasible(values, FEASIBILITY_TOL)?;
    if !report.is_feasible() {
        bail!("solution violates the original model: {:?}", report.violations);
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let file = ScenarioFile::load(&args.scenarios)?;
    let out = args
        .out
        .or_else(|| file.output.clone())
        .context("no output directory: pass --out, set PNF_OUT, or set `output` in the scenario file")?;
    let base = args.scenarios.parent().unwrap_or(Path::new("."));
    let options = RunOptions {
        jobs: args.jobs,
        seed: args.seed,
        budget_unit: args.budget_unit,
    };
    let outcomes = harness::run(&file, base, &out, &options)?;
    let failed = outcomes
        .iter()
        .filter(|o| o.status == pnf_core::metrics::OutcomeStatus::Error)
        .count();
    print!("{}", fs::read_to_string(out.join("report.md"))?);
    if failed > 0 {
        eprintln!("{failed} run(s) failed; see report.md");
    }
    Ok(())
}
