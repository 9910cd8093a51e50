use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;

use super::spec::{Configuration, Controller, ExperimentSpec};
use super::stats::StatsSummary;
use super::trace::{csv_error, format_float, trace_rows, write_trace};
use crate::baseline::run_gradient_episode;
use crate::episode::{EpisodeLog, Outcome};
use crate::error::{Error, Result};
use crate::gridfn::ValueGrid;
use crate::llr::LlrConfig;
use crate::pn::{run_pn_episode, PlannerSettings, PnController, PnSettings};
use crate::pt::{model_based_values, run_pt_episode, DpConfig, PtMode};
use crate::rng::derive_seed;
use crate::world::Scenario;

/// Episodes and statistics of one experiment, in configuration order.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub configurations: Vec<Configuration>,
    /// `episodes[c][r]` is run `r` of configuration `c`.
    pub episodes: Vec<Vec<EpisodeLog>>,
    pub summaries: Vec<StatsSummary>,
}

fn scenario_for(base: &Scenario, config: &Configuration) -> Result<Scenario> {
    let sc = base.clone().with_initial(config.start.position, config.start.buffer);
    match config.rice_v {
        None => Ok(sc),
        Some(v) => sc.with_fading(v),
    }
}

fn dp_config(spec: &ExperimentSpec, config: &Configuration) -> DpConfig {
    DpConfig {
        grid_points: spec.pt.grid_points.to_vec(),
        radius: config.radius,
        sweeps: config.sweeps,
        tolerance: spec.pt.tolerance,
        rate_max: spec.pt.rate_max,
        optimism: spec.pt.optimism,
        obstacles: spec.pt.obstacles,
        ..DpConfig::default()
    }
}

fn pn_settings(spec: &ExperimentSpec) -> PnSettings {
    let mut s = match spec.controller {
        Controller::ModelBasedPn => PnSettings::model_based(),
        _ => PnSettings::learning(),
    };
    if let PnController::Learning { known, exploit_only } = &mut s.controller {
        *known = spec.pn.known;
        *exploit_only = spec.pn.exploit_only;
    }
    if let Some(m) = spec.pn.waypoints {
        s.planner = PlannerSettings { waypoints: m, ..PlannerSettings::default() };
    }
    s
}

fn run_one(
    spec: &ExperimentSpec,
    base: &Scenario,
    config: &Configuration,
    values: Option<&ValueGrid>,
    seed: u64,
) -> Result<EpisodeLog> {
    let sc = scenario_for(base, config)?;
    match spec.controller {
        Controller::ModelBasedPt => {
            let grid = values.expect("model-based values computed up front");
            run_pt_episode(&sc, &dp_config(spec, config), PtMode::ModelBased(grid), seed)
        }
        Controller::LearningPt => {
            run_pt_episode(&sc, &dp_config(spec, config), PtMode::Learning(LlrConfig::new(config.neighbors)), seed)
        }
        Controller::ModelBasedPn | Controller::LearningPn => run_pn_episode(&sc, &pn_settings(spec), seed),
        Controller::Gradient => run_gradient_episode(&sc, &LlrConfig::new(config.neighbors), seed),
    }
}

/// Runs every (configuration, run) episode of `spec`.
///
/// Run `r` of configuration `c` uses the seed `derive_seed(spec.seed, c, r)`,
/// so results do not depend on `jobs` or on scheduling. `jobs` bounds the
/// worker threads (all cores when `None`).
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ExperimentResult> {
    let base = spec.load_scenario()?;
    spec.validate(&base)?;
    let configurations = spec.configurations(&base);
    let values = match spec.controller {
        Controller::ModelBasedPt => {
            let first = configurations.first().expect("at least one configuration");
            Some(model_based_values(&base, &dp_config(spec, first))?.0)
        }
        _ => None,
    };

    let pairs: Vec<(usize, usize)> =
        (0..configurations.len()).flat_map(|c| (0..spec.runs).map(move |r| (c, r))).collect();
    let work = || -> Result<Vec<EpisodeLog>> {
        pairs
            .par_iter()
            .map(|&(c, r)| {
                let seed = derive_seed(spec.seed, c as u64, r as u64);
                run_one(spec, &base, &configurations[c], values.as_ref(), seed)
            })
            .collect()
    };
    let logs = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut episodes: Vec<Vec<EpisodeLog>> = vec![Vec::with_capacity(spec.runs); configurations.len()];
    for ((c, _), log) in pairs.iter().zip(logs) {
        episodes[*c].push(log);
    }
    let summaries = episodes
        .iter()
        .map(|runs| {
            let facts: Vec<_> = runs.iter().map(|l| (l.steps(), l.terminated(), l.collided())).collect();
            StatsSummary::from_runs(&facts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult { configurations, episodes, summaries })
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Emptied => "emptied",
        Outcome::ReachedGoal => "reached-goal",
        Outcome::Capped => "capped",
    }
}

fn fading_name(config: &Configuration, base: &Scenario) -> String {
    let v = match config.rice_v {
        Some(v) => v,
        None => base.fading.map(|f| f.rice_v),
    };
    v.map_or_else(|| "off".to_string(), format_float)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<fs::File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(fs::File::create(path)?)))
}

pub const SUMMARY_HEADER: [&str; 16] = [
    "config",
    "scenario",
    "controller",
    "radius",
    "neighbors",
    "sweeps",
    "rice_v",
    "p1",
    "p2",
    "b0",
    "runs",
    "completed",
    "capped",
    "collided",
    "mean_steps",
    "ci95_half_width_student_t",
];

pub const RUNS_HEADER: [&str; 8] = ["config", "run", "seed", "steps", "outcome", "collisions", "emptied_at", "final_b"];

/// Writes `spec.toml`, `summary.csv` (one row per configuration), `runs.csv`
/// (one row per episode) and `episodes/c<config>_r<run>.csv` under `dir`.
pub fn write_outputs(spec: &ExperimentSpec, result: &ExperimentResult, dir: &Path) -> Result<()> {
    let base = spec.load_scenario()?;
    fs::create_dir_all(dir.join("episodes"))?;
    let mut stored = spec.clone();
    stored.out = None;
    fs::write(dir.join("spec.toml"), stored.to_toml_string())?;

    let mut summary = csv_writer(&dir.join("summary.csv"))?;
    summary.write_record(SUMMARY_HEADER).map_err(csv_error)?;
    for (config, stats) in result.configurations.iter().zip(&result.summaries) {
        let opt = |x: Option<f64>| x.map_or_else(String::new, format_float);
        summary
            .write_record([
                config.index.to_string(),
                spec.scenario.clone(),
                spec.controller.name().to_string(),
                config.radius.to_string(),
                config.neighbors.to_string(),
                config.sweeps.to_string(),
                fading_name(config, &base),
                format_float(config.start.position.x),
                format_float(config.start.position.y),
                format_float(config.start.buffer),
                stats.runs.to_string(),
                stats.completed.to_string(),
                stats.capped.to_string(),
                stats.collided.to_string(),
                opt(stats.mean_steps),
                opt(stats.ci_half_width),
            ])
            .map_err(csv_error)?;
    }
    summary.flush()?;

    let mut runs = csv_writer(&dir.join("runs.csv"))?;
    runs.write_record(RUNS_HEADER).map_err(csv_error)?;
    for (c, logs) in result.episodes.iter().enumerate() {
        for (r, log) in logs.iter().enumerate() {
            runs.write_record([
                c.to_string(),
                r.to_string(),
                log.seed.to_string(),
                log.steps().to_string(),
                outcome_name(log.outcome).to_string(),
                log.collisions.to_string(),
                log.emptied_at.map_or_else(String::new, |k| k.to_string()),
                format_float(log.final_buffer),
            ])
            .map_err(csv_error)?;
            let file = BufWriter::new(fs::File::create(dir.join("episodes").join(format!("c{c:03}_r{r:03}.csv")))?);
            write_trace(&trace_rows(log), file)?;
        }
    }
    runs.flush()?;
    Ok(())
}

/// [`run_experiment`] followed by [`write_outputs`].
pub fn run_and_write(spec: &ExperimentSpec, dir: &Path, jobs: Option<usize>) -> Result<ExperimentResult> {
    let result = run_experiment(spec, jobs)?;
    write_outputs(spec, &result, dir)?;
    Ok(result)
}
