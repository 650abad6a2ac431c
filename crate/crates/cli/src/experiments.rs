use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use v2vbench::analysis::{d09, prp_bin_average, prp_curve, Benchmark, MdMode};
use v2vbench::resources::{grid_from_cam, CamConfig, ResourceGrid};
use v2vbench::scenario::{empirical_density, Scenario, ScenarioConfig};
use v2vbench::simulator::{run_experiment, Algorithm, BinSummary, ScenarioSource, SimConfig};
use v2vbench::validation::{self, CheckOutcome, Effort};

use crate::config::Config;
use crate::error::CliError;
use crate::output::{Row, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PrpVsDistance,
    PrpVsDensity,
    D09VsDensity,
    #[value(name = "prp-vs-R", alias = "prp-vs-r")]
    #[serde(rename = "prp-vs-R")]
    PrpVsR,
    Validate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::PrpVsDistance => "prp-vs-distance",
            Experiment::PrpVsDensity => "prp-vs-density",
            Experiment::D09VsDensity => "d09-vs-density",
            Experiment::PrpVsR => "prp-vs-R",
            Experiment::Validate => "validate",
        }
    }

    pub fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            Experiment::PrpVsDistance => ("distance [m]", "PRP"),
            Experiment::PrpVsDensity => ("density [veh/m]", "PRP"),
            Experiment::D09VsDensity => ("density [veh/m]", "d0.9 [m]"),
            Experiment::PrpVsR => ("R", "PRP"),
            Experiment::Validate => ("", ""),
        }
    }
}

/// Everything an experiment needs, after flags have been applied.
pub struct RunSpec {
    pub experiment: Experiment,
    pub config: Config,
    pub algorithms: Vec<Algorithm>,
    pub md_mode: MdMode,
    /// `false`: analysis only.
    pub simulate: bool,
    pub trace: Option<Vec<Scenario>>,
    pub sweep: Vec<f64>,
}

pub struct Outcome {
    pub rows: Vec<Row>,
    /// Resolved per-point settings for the manifest.
    pub details: Value,
}

/// The experiment's sweep list from the config.
pub fn default_sweep(experiment: Experiment, cfg: &Config) -> Vec<f64> {
    match experiment {
        Experiment::PrpVsDistance => cfg.sweep.distances_m.clone(),
        Experiment::PrpVsDensity | Experiment::D09VsDensity => cfg.sweep.densities.clone(),
        Experiment::PrpVsR => cfg.sweep.cam_frequencies_hz.clone(),
        Experiment::Validate => Vec::new(),
    }
}

pub fn check_sweep(experiment: Experiment, sweep: &[f64]) -> Result<(), CliError> {
    if experiment == Experiment::Validate {
        return Ok(());
    }
    if sweep.is_empty() {
        return Err(CliError::Usage(format!("{} needs a non-empty sweep list", experiment.name())));
    }
    if sweep.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(CliError::Usage("sweep values must be positive and finite".into()));
    }
    if sweep.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("sweep values must be strictly increasing".into()));
    }
    Ok(())
}

/// Lengthens the road so a drop holds at least `4R` vehicles on average and
/// leaves a measurement window inside the guard.
fn road_for(sc: &ScenarioConfig, density: f64, grid: &ResourceGrid, sim: &SimConfig) -> ScenarioConfig {
    let population = 4.0 * f64::from(grid.total()) / density;
    let guard = 2.0 * sim.measurement_guard_m + 2.0 * sim.max_eval_distance_m;
    ScenarioConfig {
        density,
        road_length: sc.road_length.max(population.ceil()).max(guard),
        ..sc.clone()
    }
}

fn analysis_benchmarks(mode: MdMode) -> [Benchmark; 2] {
    [Benchmark::Rr, Benchmark::Md(mode)]
}

fn sim_rows(x: f64, algo: Algorithm, bin: &BinSummary) -> Option<Row> {
    (bin.drops_used > 0).then(|| Row {
        x,
        algorithm: algo.to_string(),
        source: Source::Simulation,
        value: bin.mean,
        ci: bin
            .ci_half_width
            .map(|h| ((bin.mean - h).max(0.0), (bin.mean + h).min(1.0))),
    })
}

pub fn run(spec: &RunSpec) -> Result<Outcome, CliError> {
    match spec.experiment {
        Experiment::PrpVsDistance => prp_vs_distance(spec),
        Experiment::PrpVsDensity => single_distance_sweep(spec, false),
        Experiment::PrpVsR => single_distance_sweep(spec, true),
        Experiment::D09VsDensity => d09_vs_density(spec),
        Experiment::Validate => Err(CliError::Usage("validate is run through run_validate".into())),
    }
}

fn trace_density(trace: &[Scenario]) -> Result<f64, CliError> {
    if trace.is_empty() {
        return Err(CliError::Usage("trace has no snapshots".into()));
    }
    Ok(trace.iter().map(empirical_density).sum::<f64>() / trace.len() as f64)
}

fn prp_vs_distance(spec: &RunSpec) -> Result<Outcome, CliError> {
    let cfg = &spec.config;
    let grid = grid_from_cam(&cfg.cam)?;
    let rho = match &spec.trace {
        Some(t) => trace_density(t)?,
        None => cfg.scenario.density,
    };
    let mut rows = Vec::new();
    for bench in analysis_benchmarks(spec.md_mode) {
        let curve = prp_curve(bench, &cfg.radio, rho, &grid, &spec.sweep)?;
        rows.extend(curve.points().iter().map(|p| Row {
            x: p.d_sd,
            algorithm: bench.name().into(),
            source: Source::Analysis,
            value: p.prp,
            ci: None,
        }));
    }
    let mut details = json!({ "analysis_density": rho, "resources": grid.total() });
    if spec.simulate {
        let sim = cfg.sim_config(spec.algorithms.clone());
        let period = cfg.cam.beacon_period_s();
        let stats = match &spec.trace {
            Some(t) => run_experiment(&sim, ScenarioSource::Trace(t), &grid, &cfg.radio, period)?,
            None => {
                let sc = road_for(&cfg.scenario, rho, &grid, &sim);
                details["road_length_m"] = json!(sc.road_length);
                run_experiment(&sim, ScenarioSource::Ppp(&sc), &grid, &cfg.radio, period)?
            }
        };
        for &algo in &spec.algorithms {
            for b in stats.summary(algo)? {
                rows.extend(sim_rows(b.centre(), algo, &b));
            }
        }
    }
    Ok(Outcome { rows, details })
}

/// PRP at one distance while sweeping density or the CAM rate. The
/// simulation measures a bin one bin-width wide centred on the distance,
/// and the analysis is averaged over the same bin.
fn single_distance_sweep(spec: &RunSpec, sweep_rate: bool) -> Result<Outcome, CliError> {
    let cfg = &spec.config;
    if spec.trace.is_some() && !sweep_rate {
        return Err(CliError::Usage("a trace has a fixed density; use prp-vs-distance or prp-vs-R".into()));
    }
    let d = if sweep_rate { cfg.sweep.resource_distance_m } else { cfg.sweep.density_distance_m };
    let half = 0.5 * cfg.sim.bin_width_m;
    let (lo, hi) = ((d - half).max(0.0), d + half);
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &v in &spec.sweep {
        let cam = if sweep_rate {
            CamConfig { beacon_frequency_hz: v, ..cfg.cam.clone() }
        } else {
            cfg.cam.clone()
        };
        let grid = grid_from_cam(&cam)?;
        let rho = match (&spec.trace, sweep_rate) {
            (Some(t), _) => trace_density(t)?,
            (None, true) => cfg.scenario.density,
            (None, false) => v,
        };
        let x = if sweep_rate { f64::from(grid.total()) } else { v };
        for bench in analysis_benchmarks(spec.md_mode) {
            rows.push(Row {
                x,
                algorithm: bench.name().into(),
                source: Source::Analysis,
                value: prp_bin_average(bench, &cfg.radio, rho, &grid, lo, hi)?,
                ci: None,
            });
        }
        let mut point = json!({ "x": x, "density": rho, "resources": grid.total(), "beacon_frequency_hz": cam.beacon_frequency_hz });
        if spec.simulate {
            let sim = SimConfig {
                bin_edges: vec![lo, hi],
                max_eval_distance_m: hi,
                ..cfg.sim_config(spec.algorithms.clone())
            };
            let period = cam.beacon_period_s();
            let stats = match &spec.trace {
                Some(t) => run_experiment(&sim, ScenarioSource::Trace(t), &grid, &cfg.radio, period)?,
                None => {
                    let sc = road_for(&cfg.scenario, rho, &grid, &sim);
                    point["road_length_m"] = json!(sc.road_length);
                    run_experiment(&sim, ScenarioSource::Ppp(&sc), &grid, &cfg.radio, period)?
                }
            };
            for &algo in &spec.algorithms {
                rows.extend(sim_rows(x, algo, &stats.summary(algo)?[0]));
            }
        }
        points.push(point);
    }
    Ok(Outcome {
        rows,
        details: json!({ "distance_m": d, "bin_m": [lo, hi], "points": points }),
    })
}

fn d09_vs_density(spec: &RunSpec) -> Result<Outcome, CliError> {
    let cfg = &spec.config;
    if spec.trace.is_some() {
        return Err(CliError::Usage("a trace has a fixed density; use prp-vs-distance or prp-vs-R".into()));
    }
    let grid = grid_from_cam(&cfg.cam)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &rho in &spec.sweep {
        for bench in analysis_benchmarks(spec.md_mode) {
            rows.push(Row {
                x: rho,
                algorithm: bench.name().into(),
                source: Source::Analysis,
                value: d09(bench, &cfg.radio, rho, &grid)?,
                ci: None,
            });
        }
        let mut point = json!({ "density": rho });
        if spec.simulate {
            let sim = cfg.sim_config(spec.algorithms.clone());
            let sc = road_for(&cfg.scenario, rho, &grid, &sim);
            point["road_length_m"] = json!(sc.road_length);
            let stats = run_experiment(&sim, ScenarioSource::Ppp(&sc), &grid, &cfg.radio, cfg.cam.beacon_period_s())?;
            for &algo in &spec.algorithms {
                rows.push(Row {
                    x: rho,
                    algorithm: algo.to_string(),
                    source: Source::Simulation,
                    value: validation::simulated_d09(&stats.summary(algo)?),
                    ci: None,
                });
            }
        }
        points.push(point);
    }
    Ok(Outcome {
        rows,
        details: json!({ "simulated_d09": "upper edge of the leading run of bins with PRP > 0.9", "points": points }),
    })
}

/// Runs the acceptance suite at the built-in defaults, printing each check.
pub fn run_validate(drops: Option<usize>, seed: u64) -> Result<(Effort, Vec<CheckOutcome>), CliError> {
    let effort = Effort { seed, ..Effort::default() };
    let effort = match drops {
        Some(d) => effort.with_drops(d),
        None => effort,
    };
    let outcomes = validation::run_all(&effort, |c| println!("{c}"))?;
    Ok((effort, outcomes))
}
