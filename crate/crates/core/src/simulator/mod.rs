//! Monte Carlo highway simulator: per-period allocation, SINR with every
//! co-resource interferer under correlated shadowing, half-duplex losses,
//! and distance-binned reception statistics.

pub mod oracle;
pub mod stats;

pub use oracle::{interference_oracle, OracleKind};

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocators::{
    allocate_crr, allocate_lgc, allocate_md, allocate_rr, Allocation, CrrConfig, Mode4Config, Mode4State,
    Sensing, Slot,
};
use crate::error::{Error, Result};
use crate::radio::{RadioConfig, ShadowField};
use crate::resources::ResourceGrid;
use crate::scenario::{generate_ppp, Scenario, ScenarioConfig};
use stats::mean_ci95;

/// Allocation algorithm driven by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Algorithm {
    Rr,
    Md,
    Crr,
    Lgc,
    Mode4 { p_keep: f64 },
}

impl Algorithm {
    /// The six series of the distance experiment.
    pub fn all() -> Vec<Algorithm> {
        vec![
            Algorithm::Rr,
            Algorithm::Md,
            Algorithm::Crr,
            Algorithm::Lgc,
            Algorithm::Mode4 { p_keep: 0.0 },
            Algorithm::Mode4 { p_keep: 0.8 },
        ]
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Rr => write!(f, "RR"),
            Algorithm::Md => write!(f, "MD"),
            Algorithm::Crr => write!(f, "CRR"),
            Algorithm::Lgc => write!(f, "LGC"),
            Algorithm::Mode4 { p_keep } => write!(f, "M4-{p_keep}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Accepts `rr`, `md`, `crr`, `lgc` and `m4-<p_keep>` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "rr" => Ok(Algorithm::Rr),
            "md" => Ok(Algorithm::Md),
            "crr" => Ok(Algorithm::Crr),
            "lgc" => Ok(Algorithm::Lgc),
            other => other
                .strip_prefix("m4-")
                .and_then(|p| p.parse::<f64>().ok())
                .filter(|p| (0.0..=1.0).contains(p))
                .map(|p_keep| Algorithm::Mode4 { p_keep })
                .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Independent replications.
    pub drops: usize,
    /// Measured beacon periods per replication.
    pub beacon_periods_per_drop: usize,
    /// Distance bin edges in meters, strictly increasing.
    pub bin_edges: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub max_eval_distance_m: f64,
    pub seed: u64,
    /// Use the radio config's dual-slope law for every link.
    pub dual_slope: bool,
    /// Only sources at least this far from the road origin (and, on open
    /// roads, from its end) are measured; the cyclic allocation wraps at
    /// the origin.
    pub measurement_guard_m: f64,
    /// Mode-4 periods excluded from statistics at the start of each
    /// replication.
    pub mode4_warmup_s: f64,
    pub crr: CrrConfig,
    pub mode4: Mode4Config,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            drops: 200,
            beacon_periods_per_drop: 10,
            bin_edges: (0..=24).map(|k| 25.0 * k as f64).collect(),
            algorithms: Algorithm::all(),
            max_eval_distance_m: 600.0,
            seed: 1,
            dual_slope: false,
            measurement_guard_m: 2000.0,
            mode4_warmup_s: 2.0,
            crr: CrrConfig::default(),
            mode4: Mode4Config::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.drops < 2 {
            return bad(format!("need at least 2 drops for a confidence interval, got {}", self.drops));
        }
        if self.beacon_periods_per_drop == 0 {
            return bad("beacon_periods_per_drop must be >= 1".into());
        }
        if self.bin_edges.len() < 2 || self.bin_edges.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("bin edges must be strictly increasing with at least one bin".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        if !(self.max_eval_distance_m > 0.0) || !(self.measurement_guard_m >= 0.0) || !(self.mode4_warmup_s >= 0.0) {
            return bad("distances and warm-up must be non-negative".into());
        }
        self.crr.validate()?;
        self.mode4.validate()
    }

    fn warmup_periods(&self, period_s: f64) -> usize {
        if self.algorithms.iter().any(|a| matches!(a, Algorithm::Mode4 { .. })) {
            ((self.mode4_warmup_s / period_s) - 1e-9).ceil().max(0.0) as usize
        } else {
            0
        }
    }

    /// Snapshots consumed by one replication.
    pub fn periods_per_replication(&self, period_s: f64) -> usize {
        self.warmup_periods(period_s) + self.beacon_periods_per_drop
    }
}

/// Link counts of one replication for one algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DropCounts {
    pub received: Vec<u64>,
    pub eligible: Vec<u64>,
    /// Links lost because the receiver transmitted in the same subframe.
    pub half_duplex: u64,
    /// Vehicle-periods that were blocked by the allocator.
    pub blocked: u64,
    pub vehicle_periods: u64,
}

impl DropCounts {
    fn new(bins: usize) -> Self {
        Self {
            received: vec![0; bins],
            eligible: vec![0; bins],
            ..Self::default()
        }
    }

    pub fn total_eligible(&self) -> u64 {
        self.eligible.iter().sum()
    }
}

/// Per-bin summary across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub lo: f64,
    pub hi: f64,
    /// Mean over replications of the per-replication reception ratio.
    pub mean: f64,
    /// 95% Student-t half-width across replications.
    pub ci_half_width: Option<f64>,
    pub received: u64,
    pub eligible: u64,
    pub drops_used: usize,
}

impl BinSummary {
    pub fn centre(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Counts for every (algorithm, replication), in replication order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrpStats {
    pub bin_edges: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// `per_drop[a][k]`: algorithm `a`, replication `k`.
    pub per_drop: Vec<Vec<DropCounts>>,
}

impl PrpStats {
    fn index(&self, algo: Algorithm) -> Result<usize> {
        self.algorithms
            .iter()
            .position(|a| *a == algo)
            .ok_or_else(|| Error::InvalidConfig(format!("algorithm {algo} was not simulated")))
    }

    pub fn summary(&self, algo: Algorithm) -> Result<Vec<BinSummary>> {
        let drops = &self.per_drop[self.index(algo)?];
        Ok((0..self.bin_edges.len() - 1)
            .map(|b| {
                let ratios: Vec<f64> = drops
                    .iter()
                    .filter(|d| d.eligible[b] > 0)
                    .map(|d| d.received[b] as f64 / d.eligible[b] as f64)
                    .collect();
                let (mean, ci) = mean_ci95(&ratios);
                BinSummary {
                    lo: self.bin_edges[b],
                    hi: self.bin_edges[b + 1],
                    mean,
                    ci_half_width: ci,
                    received: drops.iter().map(|d| d.received[b]).sum(),
                    eligible: drops.iter().map(|d| d.eligible[b]).sum(),
                    drops_used: ratios.len(),
                }
            })
            .collect())
    }

    pub fn blocked_fraction(&self, algo: Algorithm) -> Result<f64> {
        let drops = &self.per_drop[self.index(algo)?];
        let blocked: u64 = drops.iter().map(|d| d.blocked).sum();
        let total: u64 = drops.iter().map(|d| d.vehicle_periods).sum();
        Ok(if total == 0 { 0.0 } else { blocked as f64 / total as f64 })
    }

    /// Half-duplex losses over all eligible links.
    pub fn half_duplex_fraction(&self, algo: Algorithm) -> Result<(u64, u64)> {
        let drops = &self.per_drop[self.index(algo)?];
        Ok((
            drops.iter().map(|d| d.half_duplex).sum(),
            drops.iter().map(DropCounts::total_eligible).sum(),
        ))
    }
}

/// Where replications get their vehicles from.
#[derive(Debug, Clone, Copy)]
pub enum ScenarioSource<'a> {
    /// A fresh static PPP drop per replication (the config's seed is
    /// replaced by a per-replication seed).
    Ppp(&'a ScenarioConfig),
    /// Consecutive windows of snapshots, one snapshot per beacon period.
    Trace(&'a [Scenario]),
}

/// Received power of every directed link in one snapshot.
struct Channel {
    n: usize,
    // power[tx * n + rx], mW; zero on the diagonal.
    power: Vec<f64>,
}

impl Channel {
    fn build(s: &Scenario, radio: &RadioConfig, dual: bool, shadow: &mut ShadowField) -> Self {
        let n = s.len();
        shadow.advance(s.ids(), |a, b| s.distance(a, b));
        let mut power = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                // Coincident vehicles are treated as 1 m apart.
                let d = s.distance(a, b).max(1.0);
                let p = radio.mean_rx_power(d, dual) * shadow.linear(a, b);
                power[a * n + b] = p;
                power[b * n + a] = p;
            }
        }
        Self { n, power }
    }

    #[inline]
    fn p(&self, tx: usize, rx: usize) -> f64 {
        self.power[tx * self.n + rx]
    }
}

/// Per-replication seeds: the master seed selects the generator and the
/// replication index selects its stream.
struct ReplicationSeeds {
    scenario: u64,
    shadow: u64,
    allocators: u64,
}

impl ReplicationSeeds {
    fn new(master: u64, replication: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(replication as u64);
        Self {
            scenario: rng.next_u64(),
            shadow: rng.next_u64(),
            allocators: rng.next_u64(),
        }
    }

    fn allocator_rng(&self, algo_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.allocators);
        rng.set_stream(algo_index as u64);
        rng
    }
}

enum AlgoState {
    Stateless,
    Mode4(Box<Mode4State>),
}

struct AlgoRun {
    algo: Algorithm,
    rng: ChaCha8Rng,
    state: AlgoState,
    counts: DropCounts,
    // Scratch: summed and strongest co-resource power per (rx, resource).
    sum: Vec<f64>,
    max: Vec<f64>,
}

/// Runs one replication over `snapshots` (one per beacon period; the first
/// `warmup` periods only drive Mode-4 sensing) for every algorithm.
#[allow(clippy::too_many_arguments)]
fn run_replication(
    snapshots: &[&Scenario],
    warmup: usize,
    grid: &ResourceGrid,
    radio: &RadioConfig,
    period_s: f64,
    cfg: &SimConfig,
    seeds: &ReplicationSeeds,
) -> Result<Vec<DropCounts>> {
    let bins = cfg.bin_edges.len() - 1;
    let r = grid.total() as usize;
    let dual = cfg.dual_slope && radio.dual_slope.is_some();
    let mut shadow = ShadowField::new(radio.shadow_sigma_db, radio.decorr_distance_m, seeds.shadow);
    let mut runs: Vec<AlgoRun> = cfg
        .algorithms
        .iter()
        .enumerate()
        .map(|(k, &algo)| AlgoRun {
            algo,
            rng: seeds.allocator_rng(k),
            state: AlgoState::Stateless,
            counts: DropCounts::new(bins),
            sum: Vec::new(),
            max: Vec::new(),
        })
        .collect();
    let mut channel: Option<(*const Scenario, Channel)> = None;

    for (t, &snap) in snapshots.iter().enumerate() {
        let measured = t >= warmup;
        let stale = channel.as_ref().is_none_or(|(ptr, _)| !std::ptr::eq(*ptr, snap));
        if stale {
            channel = Some((snap, Channel::build(snap, radio, dual, &mut shadow)));
        }
        let ch = &channel.as_ref().expect("channel built").1;
        for run in runs.iter_mut() {
            let is_mode4 = matches!(run.algo, Algorithm::Mode4 { .. });
            if !measured && !is_mode4 {
                continue;
            }
            let alloc = allocate(run, snap, grid, cfg, period_s)?;
            accumulate_power(ch, &alloc, r, is_mode4, &mut run.sum, &mut run.max);
            if measured {
                evaluate_links(snap, ch, &alloc, grid, radio, cfg, &run.sum, &mut run.counts);
            }
            if let AlgoState::Mode4(state) = &mut run.state {
                let sensing = sensing_report(ch.n, r, radio, &run.sum, &run.max);
                state.observe(&sensing)?;
                state.step(&mut run.rng);
            }
        }
    }
    Ok(runs.into_iter().map(|r| r.counts).collect())
}

fn allocate(run: &mut AlgoRun, snap: &Scenario, grid: &ResourceGrid, cfg: &SimConfig, period_s: f64) -> Result<Allocation> {
    Ok(match run.algo {
        Algorithm::Rr => allocate_rr(snap.len(), grid, &mut run.rng),
        Algorithm::Md => allocate_md(snap, grid),
        Algorithm::Crr => allocate_crr(snap, grid, &cfg.crr, &mut run.rng),
        Algorithm::Lgc => allocate_lgc(snap, grid, &mut run.rng),
        Algorithm::Mode4 { p_keep } => {
            if let AlgoState::Mode4(state) = &mut run.state {
                state.resync(snap.ids(), &mut run.rng);
            } else {
                let m4 = Mode4Config { p_keep, ..cfg.mode4 };
                let state = Mode4State::new(snap.ids(), grid, m4, period_s, &mut run.rng)?;
                run.state = AlgoState::Mode4(Box::new(state));
            }
            match &run.state {
                AlgoState::Mode4(state) => state.allocation(),
                AlgoState::Stateless => unreachable!("mode-4 state initialized above"),
            }
        }
    })
}

/// `sum[rx*R + r]`: total power at `rx` from the users of resource `r`
/// other than `rx` itself; `max` likewise holds the strongest one.
fn accumulate_power(ch: &Channel, alloc: &Allocation, r: usize, with_max: bool, sum: &mut Vec<f64>, max: &mut Vec<f64>) {
    let n = ch.n;
    sum.clear();
    sum.resize(n * r, 0.0);
    if with_max {
        max.clear();
        max.resize(n * r, 0.0);
    }
    for (tx, slot) in alloc.slots().iter().enumerate() {
        let Slot::Resource(res) = *slot else { continue };
        let k = (res - 1) as usize;
        let row = &ch.power[tx * n..(tx + 1) * n];
        for (rx, &p) in row.iter().enumerate() {
            sum[rx * r + k] += p;
        }
        if with_max {
            for (rx, &p) in row.iter().enumerate() {
                let m = &mut max[rx * r + k];
                if p > *m {
                    *m = p;
                }
            }
        }
    }
}

/// A resource is busy for a vehicle when the control message of its
/// strongest user would be decodable there.
fn sensing_report(n: usize, r: usize, radio: &RadioConfig, sum: &[f64], max: &[f64]) -> Sensing {
    let noise = radio.noise_mw();
    let gm = radio.gamma_min();
    let busy = sum
        .iter()
        .zip(max)
        .map(|(&s, &m)| m > 0.0 && m / (noise + (s - m).max(0.0)) > gm)
        .collect();
    Sensing {
        n_vehicles: n,
        n_resources: r,
        interference_mw: sum.to_vec(),
        busy,
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate_links(
    snap: &Scenario,
    ch: &Channel,
    alloc: &Allocation,
    grid: &ResourceGrid,
    radio: &RadioConfig,
    cfg: &SimConfig,
    sum: &[f64],
    counts: &mut DropCounts,
) {
    let n = snap.len();
    let r = grid.total() as usize;
    let l = snap.road_length();
    let xs = snap.positions();
    let noise = radio.noise_mw();
    let edges = &cfg.bin_edges;
    let max_d = cfg.max_eval_distance_m.min(edges[edges.len() - 1]);
    let guard = cfg.measurement_guard_m;
    counts.vehicle_periods += n as u64;
    counts.blocked += alloc.blocked_count() as u64;

    for tx in 0..n {
        if xs[tx] < guard || xs[tx] > l - guard {
            continue;
        }
        let tx_res = alloc.get(tx).resource();
        let mut visit = |rx: usize| {
            let d = snap.distance(tx, rx);
            if d > max_d || d < edges[0] {
                return;
            }
            let b = edges.partition_point(|&e| e <= d);
            if b == 0 || b >= edges.len() {
                return;
            }
            let bin = b - 1;
            counts.eligible[bin] += 1;
            let Some(rt) = tx_res else { return };
            if let Slot::Resource(rr) = alloc.get(rx) {
                if grid.same_subframe_unchecked(rt, rr) {
                    counts.half_duplex += 1;
                    return;
                }
            }
            let p = ch.p(tx, rx);
            let interference = (sum[rx * r + (rt - 1) as usize] - p).max(0.0);
            if p / (noise + interference) > radio.gamma_min() {
                counts.received[bin] += 1;
            }
        };
        // Walk outward in both directions until beyond range.
        let mut steps = 0;
        for dir in [1isize, -1] {
            let mut k = 1usize;
            while k < n {
                let rx = if dir > 0 {
                    if snap.wrap() {
                        (tx + k) % n
                    } else if tx + k < n {
                        tx + k
                    } else {
                        break;
                    }
                } else if snap.wrap() {
                    (tx + n - k % n) % n
                } else if k <= tx {
                    tx - k
                } else {
                    break;
                };
                if snap.distance(tx, rx) > max_d {
                    break;
                }
                // On a short ring the two walks could meet.
                if dir < 0 && snap.wrap() && steps + k > n - 1 {
                    break;
                }
                visit(rx);
                k += 1;
            }
            steps = k - 1;
        }
    }
}

/// Runs one algorithm on one replication's snapshots, seeded by `seed`.
pub fn run_drop(
    snapshots: &[&Scenario],
    grid: &ResourceGrid,
    radio: &RadioConfig,
    period_s: f64,
    algorithm: Algorithm,
    cfg: &SimConfig,
    seed: u64,
) -> Result<DropCounts> {
    let single = SimConfig {
        algorithms: vec![algorithm],
        ..cfg.clone()
    };
    single.validate()?;
    let warmup = single.warmup_periods(period_s).min(snapshots.len());
    let seeds = ReplicationSeeds::new(seed, 0);
    run_replication(snapshots, warmup, grid, radio, period_s, &single, &seeds).map(|mut v| v.remove(0))
}

/// Runs all replications (in parallel) and merges them in replication
/// order, so results do not depend on the thread count.
pub fn run_experiment(
    cfg: &SimConfig,
    source: ScenarioSource<'_>,
    grid: &ResourceGrid,
    radio: &RadioConfig,
    period_s: f64,
) -> Result<PrpStats> {
    cfg.validate()?;
    radio.validate()?;
    let warmup = cfg.warmup_periods(period_s);
    let per_rep = cfg.periods_per_replication(period_s);
    match source {
        ScenarioSource::Ppp(sc) => {
            sc.validate()?;
            sc.check_population(grid)?;
            check_guard(cfg, sc.road_length)?;
        }
        ScenarioSource::Trace(snaps) => {
            let needed = cfg.drops * per_rep;
            if snaps.len() < needed {
                return Err(Error::TraceExhausted {
                    needed,
                    available: snaps.len(),
                });
            }
            if let Some(first) = snaps.first() {
                check_guard(cfg, first.road_length())?;
            }
        }
    }
    let results: Vec<Vec<DropCounts>> = (0..cfg.drops)
        .into_par_iter()
        .map(|k| {
            let seeds = ReplicationSeeds::new(cfg.seed, k);
            match source {
                ScenarioSource::Ppp(sc) => {
                    let drop = generate_ppp(&ScenarioConfig {
                        seed: seeds.scenario,
                        ..sc.clone()
                    })?;
                    let snaps = vec![&drop; per_rep];
                    run_replication(&snaps, warmup, grid, radio, period_s, cfg, &seeds)
                }
                ScenarioSource::Trace(all) => {
                    let snaps: Vec<&Scenario> = all[k * per_rep..(k + 1) * per_rep].iter().collect();
                    run_replication(&snaps, warmup, grid, radio, period_s, cfg, &seeds)
                }
            }
        })
        .collect::<Result<_>>()?;
    let mut per_drop = vec![Vec::with_capacity(cfg.drops); cfg.algorithms.len()];
    for rep in results {
        for (a, counts) in rep.into_iter().enumerate() {
            per_drop[a].push(counts);
        }
    }
    Ok(PrpStats {
        bin_edges: cfg.bin_edges.clone(),
        algorithms: cfg.algorithms.clone(),
        per_drop,
    })
}

fn check_guard(cfg: &SimConfig, road_length: f64) -> Result<()> {
    if 2.0 * cfg.measurement_guard_m >= road_length {
        return Err(Error::InvalidConfig(format!(
            "measurement guard {} m leaves no window on a {road_length} m road",
            cfg.measurement_guard_m
        )));
    }
    Ok(())
}
