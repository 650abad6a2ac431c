use std::path::Path;

use serde::{Deserialize, Serialize};
use v2vbench::allocators::{CrrConfig, Mode4Config};
use v2vbench::analysis::MdMode;
use v2vbench::radio::RadioConfig;
use v2vbench::resources::CamConfig;
use v2vbench::scenario::ScenarioConfig;
use v2vbench::simulator::{Algorithm, SimConfig};

use crate::error::CliError;

/// The shipped default configuration file.
pub const DEFAULT_CONFIG: &str = include_str!("../default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub radio: RadioConfig,
    pub scenario: ScenarioConfig,
    pub cam: CamConfig,
    pub sim: SimSection,
    pub mode4: Mode4Config,
    pub crr: CrrConfig,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub drops: usize,
    pub beacon_periods_per_drop: usize,
    pub bin_width_m: f64,
    pub max_distance_m: f64,
    pub algorithms: Vec<String>,
    pub seed: u64,
    pub dual_slope: bool,
    pub measurement_guard_m: f64,
    pub mode4_warmup_s: f64,
    pub md_mode: MdMode,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            drops: d.drops,
            beacon_periods_per_drop: d.beacon_periods_per_drop,
            bin_width_m: 25.0,
            max_distance_m: d.max_eval_distance_m,
            algorithms: d.algorithms.iter().map(ToString::to_string).collect(),
            seed: d.seed,
            dual_slope: d.dual_slope,
            measurement_guard_m: d.measurement_guard_m,
            mode4_warmup_s: d.mode4_warmup_s,
            md_mode: MdMode::Approximate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub distances_m: Vec<f64>,
    pub densities: Vec<f64>,
    pub cam_frequencies_hz: Vec<f64>,
    pub density_distance_m: f64,
    pub resource_distance_m: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            distances_m: (1..=24).map(|k| 25.0 * f64::from(k)).collect(),
            densities: (1..=12).map(|k| f64::from(k) / 40.0).collect(),
            cam_frequencies_hz: (1..=10).map(f64::from).collect(),
            density_distance_m: 100.0,
            resource_distance_m: 300.0,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        fn ctx(section: &'static str) -> impl Fn(v2vbench::Error) -> CliError {
            move |e| CliError::Config(format!("[{section}] {e}"))
        }
        self.radio.validate().map_err(ctx("radio"))?;
        self.scenario.validate().map_err(ctx("scenario"))?;
        v2vbench::resources::grid_from_cam(&self.cam).map_err(ctx("cam"))?;
        self.mode4.validate().map_err(ctx("mode4"))?;
        self.crr.validate().map_err(ctx("crr"))?;
        self.sim_config(self.algorithms()?).validate().map_err(ctx("sim"))?;
        if !(self.sim.bin_width_m > 0.0) || !(self.sim.max_distance_m >= self.sim.bin_width_m) {
            return Err(CliError::Config(
                "[sim] bin_width_m must be > 0 and max_distance_m >= bin_width_m".into(),
            ));
        }
        Ok(())
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>, CliError> {
        parse_algorithms(self.sim.algorithms.iter().map(String::as_str))
    }

    pub fn sim_config(&self, algorithms: Vec<Algorithm>) -> SimConfig {
        let s = &self.sim;
        let bins = (s.max_distance_m / s.bin_width_m + 1e-9).floor() as usize;
        SimConfig {
            drops: s.drops,
            beacon_periods_per_drop: s.beacon_periods_per_drop,
            bin_edges: (0..=bins).map(|k| s.bin_width_m * k as f64).collect(),
            algorithms,
            max_eval_distance_m: s.max_distance_m,
            seed: s.seed,
            dual_slope: s.dual_slope,
            measurement_guard_m: s.measurement_guard_m,
            mode4_warmup_s: s.mode4_warmup_s,
            crr: self.crr,
            mode4: self.mode4,
        }
    }
}

pub fn parse_algorithms<'a, I: IntoIterator<Item = &'a str>>(names: I) -> Result<Vec<Algorithm>, CliError> {
    let algos = names
        .into_iter()
        .map(|n| n.parse::<Algorithm>().map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if algos.is_empty() {
        return Err(CliError::Usage("algorithm list is empty".into()));
    }
    Ok(algos)
}
