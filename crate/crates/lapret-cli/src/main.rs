//! `lapret` — estimate causal windows and effects when the treatment
//! time is unknown.
//!
//! Subcommands cover the whole workflow: `generate` builds a synthetic
//! tradezone panel from DMA inputs, `pilot` estimates the causal window
//! on a held-out pilot split, `analyze` estimates per-day effects on
//! the remaining units, `simulate`/`sweep` run the benchmark scenarios,
//! `heuristics` suggests (α, ε) ranges, `impute` resamples uncertain
//! treatment indicators and `sensitivity` repeats the full pipeline
//! across noise levels.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or input
//! validation, 3 design violation (pilot/analysis overlap).

mod manifest;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lapret_core::sim::{SweepGrid, SweepResult};
use lapret_core::{
    datagen, sim, study, Aggregation, Day, Error as CoreError, LapretParams, PairLapret,
    PilotResult, StudyConfig, StudyPlan, Transform, UnitSeries,
};
use manifest::{write_atomic, RunManifest};

#[derive(Debug)]
enum CliError {
    /// Bad flags or malformed inputs → exit 2.
    Validation(String),
    /// Pilot/analysis overlap → exit 3.
    Design(String),
    /// Everything else → exit 1.
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Design(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Design(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let msg = err.to_string();
        match err {
            CoreError::PilotOverlap(_) => CliError::Design(msg),
            CoreError::Schema { .. }
            | CoreError::DuplicateRow { .. }
            | CoreError::NonContiguousDays { .. }
            | CoreError::DanglingEvent { .. }
            | CoreError::EventOutOfRange { .. }
            | CoreError::EventInconsistent { .. }
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidEta(_)
            | CoreError::UnknownScenario(_)
            | CoreError::UnknownContamination(_)
            | CoreError::TotalTooSmall { .. } => CliError::Validation(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "lapret", version, about = "Causal windows and effects under unknown treatment time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggregationArg {
    Mean,
    Min,
    MeanZeroFill,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Mean => Aggregation::Mean,
            AggregationArg::Min => Aggregation::Min,
            AggregationArg::MeanZeroFill => Aggregation::MeanZeroFill,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    Levels,
    LaggedDiff,
}

impl From<TransformArg> for Transform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Levels => Transform::Levels,
            TransformArg::LaggedDiff => Transform::LaggedDiff,
        }
    }
}

/// Panel/covariates/events input triple shared by several subcommands.
#[derive(Debug, clap::Args)]
struct PanelInputs {
    /// Panel CSV (unit_id,day,outcome)
    #[arg(long)]
    panel: PathBuf,
    /// Covariates CSV (unit_id,c1,...,ck)
    #[arg(long)]
    covariates: PathBuf,
    /// Events CSV (unit_id,event_indicator,event_day)
    #[arg(long)]
    events: PathBuf,
}

impl PanelInputs {
    fn load(&self) -> Result<Vec<UnitSeries>, CliError> {
        Ok(datagen::ingest(&self.panel, &self.covariates, &self.events)?)
    }

    fn digest_into(&self, manifest: &mut RunManifest) -> Result<(), CliError> {
        manifest.digest_input(&self.panel)?;
        manifest.digest_input(&self.covariates)?;
        manifest.digest_input(&self.events)?;
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulated scenario cell and write a one-row sweep CSV
    Simulate {
        /// Scenario index (1, 2 or 3)
        #[arg(long)]
        scenario: u8,
        #[arg(long)]
        sigma: f64,
        /// Contamination model (f1, f2, f3 or f4)
        #[arg(long)]
        contamination: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: f64,
        /// Number of units (half treated, half control)
        #[arg(long, default_value_t = 600)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full benchmark grid for one scenario
    Sweep {
        #[arg(long)]
        scenario: u8,
        #[arg(long, default_value_t = 600)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic tradezone panel from DMA inputs
    Generate {
        /// DMA CSV (dma_id,population,c1..ck)
        #[arg(long)]
        dma: PathBuf,
        /// DMA panel CSV (dma_id,day,outcome,snowfall_kg_m2)
        #[arg(long)]
        dma_panel: PathBuf,
        #[arg(long)]
        sigma: f64,
        /// Snowfall above this makes a day event-eligible (kg/m²)
        #[arg(long, default_value_t = 1.0)]
        snow_threshold: f64,
        /// DMAs never exceeding this snowfall become controls (kg/m²)
        #[arg(long, default_value_t = 0.3)]
        control_threshold: f64,
        #[arg(long, default_value_t = 3676)]
        total: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_panel: PathBuf,
        #[arg(long)]
        out_covariates: PathBuf,
        #[arg(long)]
        out_events: PathBuf,
    },
    /// Estimate the causal window on a pilot split
    Pilot {
        #[command(flatten)]
        inputs: PanelInputs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = AggregationArg::MeanZeroFill)]
        aggregation: AggregationArg,
        #[arg(long, value_enum, default_value_t = TransformArg::Levels)]
        transform: TransformArg,
        /// Fraction of units assigned to the pilot
        #[arg(long, default_value_t = 0.25)]
        pilot_fraction: f64,
        /// Maximum logit distance for a match
        #[arg(long)]
        caliper: Option<f64>,
        #[arg(long)]
        seed: u64,
        /// Pilot result JSON
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate per-day effects on units the pilot never saw
    Analyze {
        #[command(flatten)]
        inputs: PanelInputs,
        /// Pilot result JSON from `lapret pilot`
        #[arg(long)]
        pilot: PathBuf,
        /// Optional unit-id list (one per line) overriding the pilot's
        /// main split; must not overlap the pilot units
        #[arg(long)]
        ids: Option<PathBuf>,
        #[arg(long)]
        caliper: Option<f64>,
        /// Study result JSON
        #[arg(long)]
        out: PathBuf,
        /// Effects CSV (default: <out>.effects.csv)
        #[arg(long)]
        effects: Option<PathBuf>,
    },
    /// Suggest (alpha, epsilon) ranges from matched-pair differences
    Heuristics {
        #[command(flatten)]
        inputs: PanelInputs,
        #[arg(long, value_enum, default_value_t = TransformArg::Levels)]
        transform: TransformArg,
        #[arg(long)]
        caliper: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ranges JSON
        #[arg(long)]
        out: PathBuf,
    },
    /// Resample uncertain treatment indicators
    Impute {
        #[command(flatten)]
        inputs: PanelInputs,
        /// Per-unit flip probability is eta/2
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        replicates: u32,
        #[arg(long)]
        seed: u64,
        /// Assignment CSV (replicate,unit_id,event_indicator)
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeat the full pilot+analysis pipeline across noise levels
    Sensitivity {
        #[arg(long)]
        dma: PathBuf,
        #[arg(long)]
        dma_panel: PathBuf,
        #[arg(long, default_value_t = 2.5)]
        alpha: f64,
        #[arg(long, default_value_t = 10.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = AggregationArg::MeanZeroFill)]
        aggregation: AggregationArg,
        #[arg(long, value_enum, default_value_t = TransformArg::LaggedDiff)]
        transform: TransformArg,
        #[arg(long, default_value_t = 0.25)]
        pilot_fraction: f64,
        #[arg(long, default_value_t = 3676)]
        total: usize,
        #[arg(long)]
        seed: u64,
        /// Directory receiving sigma_*.json and summary.csv
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Pilot result as written to disk: the estimator output plus the
/// split and configuration `analyze` needs. A missing window is
/// encoded as `d_hat: null` with `d_floor: 0` (event-day-only window).
#[derive(Debug, Serialize, Deserialize)]
struct PilotDocument {
    params: LapretParams,
    aggregation: Aggregation,
    transform: Transform,
    seed: u64,
    pilot_unit_ids: BTreeSet<String>,
    main_unit_ids: BTreeSet<String>,
    per_pair: Vec<PairLapret>,
    d_hat: Option<f64>,
    d_floor: Day,
    n_detected: usize,
}

impl PilotDocument {
    fn from_parts(plan: &StudyPlan, pilot: &PilotResult) -> Self {
        Self {
            params: plan.params,
            aggregation: plan.aggregation,
            transform: plan.transform,
            seed: plan.seed,
            pilot_unit_ids: plan.pilot_unit_ids.clone(),
            main_unit_ids: plan.main_unit_ids.clone(),
            per_pair: pilot.per_pair.clone(),
            d_hat: pilot.d_hat,
            d_floor: pilot.d_floor.unwrap_or(0),
            n_detected: pilot.n_detected,
        }
    }

    fn pilot_result(&self) -> PilotResult {
        PilotResult {
            per_pair: self.per_pair.clone(),
            d_hat: self.d_hat,
            d_floor: self.d_hat.map(|_| self.d_floor),
            aggregation: self.aggregation,
            n_detected: self.n_detected,
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialization failed: {e}")))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)?;
    Ok(())
}

fn write_sweep_csv(path: &Path, result: &SweepResult) -> CliResult {
    let mut buf = Vec::new();
    result.write_csv(&mut buf)?;
    write_atomic(path, &buf)?;
    Ok(())
}

fn cmd_simulate(
    scenario: u8,
    sigma: f64,
    contamination: &str,
    alpha: f64,
    epsilon: f64,
    n: usize,
    seed: u64,
    out: &Path,
) -> CliResult {
    let scenario = sim::Scenario::from_index(scenario)?;
    let contamination: sim::Contamination = contamination.parse()?;
    LapretParams::new(alpha, epsilon)?;
    let grid = SweepGrid {
        sigmas: vec![sigma],
        contaminations: vec![contamination],
        alphas: vec![alpha],
        epsilons: vec![epsilon],
    };
    let result = sim::sweep(scenario, &grid, n, seed)?;
    write_sweep_csv(out, &result)?;

    let mut manifest = RunManifest::new("simulate", seed);
    manifest
        .param("scenario", scenario.index())
        .param("sigma", sigma)
        .param("contamination", contamination)
        .param("alpha", alpha)
        .param("epsilon", epsilon)
        .param("n", n)
        .param("out", out.display());
    manifest.write_alongside(out)?;
    Ok(())
}

fn cmd_sweep(scenario: u8, n: usize, seed: u64, out: &Path) -> CliResult {
    let scenario = sim::Scenario::from_index(scenario)?;
    let result = sim::sweep(scenario, &SweepGrid::default(), n, seed)?;
    write_sweep_csv(out, &result)?;

    let mut manifest = RunManifest::new("sweep", seed);
    manifest
        .param("scenario", scenario.index())
        .param("n", n)
        .param("out", out.display());
    manifest.write_alongside(out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    dma: &Path,
    dma_panel: &Path,
    sigma: f64,
    snow_threshold: f64,
    control_threshold: f64,
    total: usize,
    seed: u64,
    out_panel: &Path,
    out_covariates: &Path,
    out_events: &Path,
) -> CliResult {
    let dmas = datagen::read_dmas(dma, dma_panel)?;
    let spec = datagen::GeneratorSpec::with_thresholds(
        sigma,
        snow_threshold,
        control_threshold,
        total,
        seed,
    )?;
    let units = datagen::generate_tradezones(&dmas, &spec)?;
    datagen::write_units(&units, out_panel, out_covariates, out_events)?;

    let mut manifest = RunManifest::new("generate", seed);
    manifest
        .param("sigma", sigma)
        .param("snow_threshold", snow_threshold)
        .param("control_threshold", control_threshold)
        .param("total", total)
        .param("out_panel", out_panel.display())
        .param("out_covariates", out_covariates.display())
        .param("out_events", out_events.display());
    manifest.digest_input(dma)?;
    manifest.digest_input(dma_panel)?;
    manifest.write_alongside(out_panel)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_pilot(
    inputs: &PanelInputs,
    alpha: f64,
    epsilon: f64,
    aggregation: Aggregation,
    transform: Transform,
    pilot_fraction: f64,
    caliper: Option<f64>,
    seed: u64,
    out: &Path,
) -> CliResult {
    let units = inputs.load()?;
    let config = StudyConfig {
        params: LapretParams::new(alpha, epsilon)?,
        aggregation,
        transform,
        caliper,
    };
    let plan = study::split(&units, pilot_fraction, seed, &config)?;
    let pilot = study::run_pilot(&units, &plan, caliper)?;
    write_json(out, &PilotDocument::from_parts(&plan, &pilot))?;

    let mut manifest = RunManifest::new("pilot", seed);
    manifest
        .param("alpha", alpha)
        .param("epsilon", epsilon)
        .param("aggregation", format!("{aggregation:?}"))
        .param("transform", format!("{transform:?}"))
        .param("pilot_fraction", pilot_fraction)
        .param("out", out.display());
    if let Some(c) = caliper {
        manifest.param("caliper", c);
    }
    inputs.digest_into(&mut manifest)?;
    manifest.write_alongside(out)?;
    Ok(())
}

fn read_id_file(path: &Path) -> Result<BTreeSet<String>, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn write_effects_csv(path: &Path, effects: &[study::EffectEstimate]) -> CliResult {
    let mut buf = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buf);
        writer
            .write_record(["relative_day", "estimate", "ci_low", "ci_high", "n_pairs"])
            .and_then(|()| {
                effects.iter().try_for_each(|e| {
                    writer.write_record([
                        e.relative_day.to_string(),
                        e.estimate.to_string(),
                        e.ci_low.to_string(),
                        e.ci_high.to_string(),
                        e.n_pairs.to_string(),
                    ])
                })
            })
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        writer.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    write_atomic(path, &buf)?;
    Ok(())
}

fn cmd_analyze(
    inputs: &PanelInputs,
    pilot_path: &Path,
    ids: Option<&Path>,
    caliper: Option<f64>,
    out: &Path,
    effects_path: Option<&Path>,
) -> CliResult {
    let text = std::fs::read_to_string(pilot_path)?;
    let doc: PilotDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("cannot parse pilot file: {e}")))?;
    let units = inputs.load()?;
    let main_ids = match ids {
        Some(path) => read_id_file(path)?,
        None => doc.main_unit_ids.clone(),
    };
    let plan = StudyPlan {
        pilot_unit_ids: doc.pilot_unit_ids.clone(),
        main_unit_ids: main_ids,
        params: doc.params,
        aggregation: doc.aggregation,
        transform: doc.transform,
        seed: doc.seed,
    };
    let pilot = doc.pilot_result();
    let result = study::run_main(&units, &plan, &pilot, caliper)?;
    write_json(out, &result)?;
    let default_effects = effects_csv_path(out);
    write_effects_csv(
        effects_path.unwrap_or(default_effects.as_path()),
        &result.effects,
    )?;

    let mut manifest = RunManifest::new("analyze", doc.seed);
    manifest
        .param("pilot", pilot_path.display())
        .param("out", out.display());
    if let Some(path) = ids {
        manifest.param("ids", path.display());
    }
    inputs.digest_into(&mut manifest)?;
    manifest.digest_input(pilot_path)?;
    manifest.write_alongside(out)?;
    Ok(())
}

fn effects_csv_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".effects.csv");
    out.with_file_name(name)
}

fn cmd_heuristics(
    inputs: &PanelInputs,
    transform: Transform,
    caliper: Option<f64>,
    seed: u64,
    out: &Path,
) -> CliResult {
    let units = inputs.load()?;
    let transformed: Result<Vec<UnitSeries>, CoreError> = match transform {
        Transform::Levels => Ok(units),
        Transform::LaggedDiff => units.into_iter().map(|u| u.lagged_diff()).collect(),
    };
    let transformed = transformed?;
    let model = lapret_core::fit_propensity(&transformed)?;
    let matches = lapret_core::match_units(&transformed, &model, caliper)?;
    let lookup = |id: &str| transformed.iter().find(|u| u.unit_id == id).unwrap();
    let pairs: Result<Vec<_>, CoreError> = matches
        .pairs
        .iter()
        .enumerate()
        .map(|(i, (t, c))| lapret_core::build_pair(lookup(t), lookup(c), i as u64))
        .collect();
    let ranges = lapret_core::heuristic_ranges(&pairs?)?;
    write_json(out, &ranges)?;

    let mut manifest = RunManifest::new("heuristics", seed);
    manifest
        .param("transform", format!("{transform:?}"))
        .param("out", out.display());
    inputs.digest_into(&mut manifest)?;
    manifest.write_alongside(out)?;
    Ok(())
}

fn cmd_impute(
    inputs: &PanelInputs,
    eta: f64,
    replicates: u32,
    seed: u64,
    out: &Path,
) -> CliResult {
    let units = inputs.load()?;
    let assignments = lapret_core::impute_treatment(&units, eta, replicates, seed)?;
    let mut buf = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buf);
        writer
            .write_record(["replicate", "unit_id", "event_indicator"])
            .and_then(|()| {
                assignments.iter().try_for_each(|a| {
                    writer.write_record([
                        a.replicate_index.to_string(),
                        a.unit_id.clone(),
                        if a.z { "1".to_string() } else { "0".to_string() },
                    ])
                })
            })
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        writer.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    write_atomic(out, &buf)?;

    let mut manifest = RunManifest::new("impute", seed);
    manifest
        .param("eta", eta)
        .param("replicates", replicates)
        .param("out", out.display());
    inputs.digest_into(&mut manifest)?;
    manifest.write_alongside(out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sensitivity(
    dma: &Path,
    dma_panel: &Path,
    alpha: f64,
    epsilon: f64,
    aggregation: Aggregation,
    transform: Transform,
    pilot_fraction: f64,
    total: usize,
    seed: u64,
    out_dir: &Path,
) -> CliResult {
    let dmas = datagen::read_dmas(dma, dma_panel)?;
    let config = StudyConfig {
        params: LapretParams::new(alpha, epsilon)?,
        aggregation,
        transform,
        caliper: None,
    };
    std::fs::create_dir_all(out_dir)?;

    let mut datasets = Vec::new();
    for k in 1..=7u32 {
        let sigma = 2.0f64.powi(k as i32);
        let gen_seed =
            lapret_core::rng::derive_seed(seed, &[lapret_core::rng::label("sensitivity-gen"), k.into()]);
        let spec = datagen::GeneratorSpec::with_thresholds(sigma, 1.0, 0.3, total, gen_seed)?;
        let units = datagen::generate_tradezones(&dmas, &spec)?;
        datasets.push((format!("sigma_{}", sigma as u64), units));
    }
    let results = study::sensitivity_sweep(&datasets, pilot_fraction, &config, seed)?;

    let mut summary = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut summary);
        writer
            .write_record(["sigma", "d_floor"])
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        for (k, (label, result)) in results.iter().enumerate() {
            let sigma = 2.0f64.powi(k as i32 + 1);
            write_json(&out_dir.join(format!("{label}.json")), result)?;
            writer
                .write_record([sigma.to_string(), result.causal_window_days.to_string()])
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        }
        writer.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let summary_path = out_dir.join("summary.csv");
    write_atomic(&summary_path, &summary)?;

    let mut manifest = RunManifest::new("sensitivity", seed);
    manifest
        .param("alpha", alpha)
        .param("epsilon", epsilon)
        .param("aggregation", format!("{aggregation:?}"))
        .param("transform", format!("{transform:?}"))
        .param("pilot_fraction", pilot_fraction)
        .param("total", total)
        .param("out_dir", out_dir.display());
    manifest.digest_input(dma)?;
    manifest.digest_input(dma_panel)?;
    manifest.write_alongside(&summary_path)?;
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate {
            scenario,
            sigma,
            contamination,
            alpha,
            epsilon,
            n,
            seed,
            out,
        } => cmd_simulate(scenario, sigma, &contamination, alpha, epsilon, n, seed, &out),
        Command::Sweep {
            scenario,
            n,
            seed,
            out,
        } => cmd_sweep(scenario, n, seed, &out),
        Command::Generate {
            dma,
            dma_panel,
            sigma,
            snow_threshold,
            control_threshold,
            total,
            seed,
            out_panel,
            out_covariates,
            out_events,
        } => cmd_generate(
            &dma,
            &dma_panel,
            sigma,
            snow_threshold,
            control_threshold,
            total,
            seed,
            &out_panel,
            &out_covariates,
            &out_events,
        ),
        Command::Pilot {
            inputs,
            alpha,
            epsilon,
            aggregation,
            transform,
            pilot_fraction,
            caliper,
            seed,
            out,
        } => cmd_pilot(
            &inputs,
            alpha,
            epsilon,
            aggregation.into(),
            transform.into(),
            pilot_fraction,
            caliper,
            seed,
            &out,
        ),
        Command::Analyze {
            inputs,
            pilot,
            ids,
            caliper,
            out,
            effects,
        } => cmd_analyze(&inputs, &pilot, ids.as_deref(), caliper, &out, effects.as_deref()),
        Command::Heuristics {
            inputs,
            transform,
            caliper,
            seed,
            out,
        } => cmd_heuristics(&inputs, transform.into(), caliper, seed, &out),
        Command::Impute {
            inputs,
            eta,
            replicates,
            seed,
            out,
        } => cmd_impute(&inputs, eta, replicates, seed, &out),
        Command::Sensitivity {
            dma,
            dma_panel,
            alpha,
            epsilon,
            aggregation,
            transform,
            pilot_fraction,
            total,
            seed,
            out_dir,
        } => cmd_sensitivity(
            &dma,
            &dma_panel,
            alpha,
            epsilon,
            aggregation.into(),
            transform.into(),
            pilot_fraction,
            total,
            seed,
            &out_dir,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}
