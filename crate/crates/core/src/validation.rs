//! The acceptance suite: analysis against simulation, oracles and closed
//! forms at the default configuration. Shared by the `acceptance` test
//! target and the CLI `validate` experiment.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::allocators::{
    allocate_md, brute_force_best_mean_distance, mean_same_resource_distance, Slot,
};
use crate::analysis::{
    levy_cdf_rr, md_interference_cdf, nth_neighbor_cdf, p_hd_md, p_hd_rr, prp, prp_bin_average,
    rr_stable_params, stable_cdf, Benchmark, MdMode, MdParams,
};
use crate::error::Result;
use crate::radio::{pr0, RadioConfig};
use crate::resources::{grid_from_cam, CamConfig, ResourceGrid};
use crate::scenario::{
    empirical_density, generate_ppp, moving_ppp_trace, Scenario, ScenarioConfig,
};
use crate::simulator::oracle::{interference_oracle, OracleKind};
use crate::simulator::stats::{ks_pvalue, ks_statistic};
use crate::simulator::{run_experiment, Algorithm, BinSummary, PrpStats, ScenarioSource, SimConfig};

/// Sample sizes for the suite.
#[derive(Debug, Clone, Serialize)]
pub struct Effort {
    /// Replications of the default PPP experiment (criteria 1, 2, 7).
    pub drops: usize,
    /// Replications of the dense CRR run.
    pub crr_drops: usize,
    /// Replications of the trace run.
    pub trace_drops: usize,
    pub oracle_samples: usize,
    pub hd_links: usize,
    pub neighbor_samples: usize,
    pub optimality_instances: usize,
    pub seed: u64,
}

impl Default for Effort {
    fn default() -> Self {
        Self {
            drops: 200,
            crr_drops: 20,
            trace_drops: 60,
            oracle_samples: 100_000,
            hd_links: 100_000,
            neighbor_samples: 5_000,
            optimality_instances: 100,
            seed: 1,
        }
    }
}

impl Effort {
    /// Scales the simulation replications down to `drops` (at least 2),
    /// keeping the others in proportion.
    pub fn with_drops(mut self, drops: usize) -> Self {
        let drops = drops.max(2);
        let scale = |n: usize| (n * drops).div_ceil(200).max(2);
        self.crr_drops = scale(self.crr_drops);
        self.trace_drops = scale(self.trace_drops);
        self.drops = drops;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

struct Defaults {
    radio: RadioConfig,
    cam: CamConfig,
    grid: ResourceGrid,
    scenario: ScenarioConfig,
}

impl Defaults {
    fn new() -> Result<Self> {
        let cam = CamConfig::default();
        Ok(Self {
            radio: RadioConfig::default(),
            grid: grid_from_cam(&cam)?,
            cam,
            scenario: ScenarioConfig::default(),
        })
    }

    fn period(&self) -> f64 {
        self.cam.beacon_period_s()
    }
}

/// Runs all twelve criteria, reporting each as it completes.
pub fn run_all<F: FnMut(&CheckOutcome)>(effort: &Effort, mut report: F) -> Result<Vec<CheckOutcome>> {
    let env = Defaults::new()?;
    let mut out = Vec::with_capacity(12);
    let mut push = |c: CheckOutcome| {
        report(&c);
        out.push(c);
    };

    let sim_cfg = SimConfig {
        drops: effort.drops,
        seed: effort.seed,
        ..SimConfig::default()
    };
    let main = run_experiment(
        &sim_cfg,
        ScenarioSource::Ppp(&env.scenario),
        &env.grid,
        &env.radio,
        env.period(),
    )?;
    push(agreement(&env, &main, Algorithm::Rr, Benchmark::Rr, 1, "RR analysis vs simulation")?);
    let mut md = agreement(&env, &main, Algorithm::Md, Benchmark::Md(MdMode::Approximate), 2, "MD analysis vs simulation")?;
    let modes = md_mode_gap(&env)?;
    md.passed &= modes <= 1e-3;
    md.detail.push_str(&format!("; approx/full PRP gap {modes:.2e} (<= 1e-3)"));
    push(md);
    push(levy(&env)?);
    push(md_optimality(effort));
    push(half_duplex(&env, &main, effort)?);
    push(nth_neighbor(effort)?);
    push(sandwich(&main)?);
    push(md_shape(&env)?);
    push(crr_collapse(&env, effort)?);
    push(scarcity(&env)?);
    push(oracles(&env, effort)?);
    push(trace(&env, effort)?);
    Ok(out)
}

fn max_eval_bins(s: &[BinSummary], limit: f64) -> impl Iterator<Item = &BinSummary> {
    s.iter().filter(move |b| b.hi <= limit && b.drops_used > 0)
}

/// Worst bin of |analysis - simulation| relative to max(floor, CI).
fn compare_bins(
    sim: &[BinSummary],
    limit: f64,
    floor: f64,
    analysis: impl Fn(&BinSummary) -> Result<f64>,
) -> Result<(bool, String)> {
    let mut worst: Option<(f64, f64, f64, f64, f64)> = None;
    let mut ok = true;
    for b in max_eval_bins(sim, limit) {
        let a = analysis(b)?;
        let tol = floor.max(b.ci_half_width.unwrap_or(0.0));
        let gap = (a - b.mean).abs();
        ok &= gap <= tol;
        if worst.is_none_or(|w| gap / tol > w.0) {
            worst = Some((gap / tol, b.centre(), a, b.mean, tol));
        }
    }
    let detail = match worst {
        Some((_, c, a, s, tol)) => format!(
            "worst bin {c} m: analysis {a:.4}, simulation {s:.4}, |gap| {:.4} vs tol {tol:.4}",
            (a - s).abs()
        ),
        None => {
            ok = false;
            "no populated bins".into()
        }
    };
    Ok((ok, detail))
}

fn agreement(
    env: &Defaults,
    stats: &PrpStats,
    algo: Algorithm,
    bench: Benchmark,
    id: u8,
    name: &'static str,
) -> Result<CheckOutcome> {
    let sim = stats.summary(algo)?;
    let rho = env.scenario.density;
    let (passed, detail) = compare_bins(&sim, 500.0, 0.02, |b| {
        prp_bin_average(bench, &env.radio, rho, &env.grid, b.lo, b.hi)
    })?;
    Ok(CheckOutcome { id, name, passed, detail })
}

fn md_mode_gap(env: &Defaults) -> Result<f64> {
    let rho = env.scenario.density;
    (1..=20).try_fold(0.0f64, |worst, k| {
        let d = 25.0 * f64::from(k);
        let a = prp(Benchmark::Md(MdMode::Approximate), &env.radio, rho, &env.grid, d)?;
        let f = prp(Benchmark::Md(MdMode::Full), &env.radio, rho, &env.grid, d)?;
        Ok(worst.max((a - f).abs()))
    })
}

fn levy(env: &Defaults) -> Result<CheckOutcome> {
    let radio = RadioConfig { beta: 2.0, ..env.radio.clone() };
    let rho = env.scenario.density;
    let p = rr_stable_params(rho, &env.grid, &radio)?;
    let rho_rr = rho / f64::from(env.grid.total());
    let mut worst = 0.0f64;
    for k in 0..100 {
        let y = p.c * 10f64.powf(-4.0 + 8.0 * f64::from(k) / 99.0);
        worst = worst.max((stable_cdf(&p, y)? - levy_cdf_rr(rho_rr, pr0(&radio), y)).abs());
    }
    Ok(CheckOutcome {
        id: 3,
        name: "stable CDF vs Levy closed form",
        passed: worst <= 1e-6,
        detail: format!("sup error {worst:.2e} on 100 log-spaced points (<= 1e-6)"),
    })
}

/// Literal statement: no assignment in R^N has a larger mean same-resource
/// distance than the cyclic one.
fn md_optimality(effort: &Effort) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(effort.seed ^ 0x04);
    let mut beaten = 0usize;
    let mut example = None;
    for _ in 0..effort.optimality_instances {
        let r: u32 = rng.random_range(2..=3);
        let n = rng.random_range(r as usize + 1..=8);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 1000.0).collect();
        xs.sort_by(f64::total_cmp);
        let grid = ResourceGrid::new(r, 1).expect("r >= 1");
        let scenario = Scenario::from_positions(xs.clone(), 1e6, false).expect("valid positions");
        let md: Vec<u32> = allocate_md(&scenario, &grid)
            .slots()
            .iter()
            .filter_map(|s| s.resource())
            .collect();
        let md_value = mean_same_resource_distance(&xs, &md).unwrap_or(0.0);
        let best = brute_force_best_mean_distance(&xs, r, None);
        if best > md_value * (1.0 + 1e-12) {
            beaten += 1;
            example.get_or_insert((n, r, md_value, best));
        }
    }
    let detail = match example {
        None => format!("{} instances, none beaten", effort.optimality_instances),
        Some((n, r, m, b)) => format!(
            "{beaten}/{} instances beaten by exhaustive search (e.g. N={n}, R={r}: MD {m:.1} m vs best {b:.1} m)",
            effort.optimality_instances
        ),
    };
    CheckOutcome {
        id: 4,
        name: "MD optimality over all R^N assignments",
        passed: beaten == 0,
        detail,
    }
}

fn within_3_sigma(hits: u64, n: u64, p: f64) -> (bool, f64) {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let z = (hits as f64 / n as f64 - p) / sigma;
    (z.abs() <= 3.0, z)
}

fn half_duplex(env: &Defaults, main: &PrpStats, effort: &Effort) -> Result<CheckOutcome> {
    let (hd, links) = main.half_duplex_fraction(Algorithm::Rr)?;
    let (rr_ok, rr_z) = within_3_sigma(hd, links, p_hd_rr(&env.grid));

    // MD: source and destination with a PPP around them, R_t = 4.
    let grid = ResourceGrid::new(4, 1)?;
    let rho = env.scenario.density;
    let distances = [10.0, 25.0, 40.0];
    let per = (effort.hd_links / distances.len()).max(1) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(effort.seed ^ 0x05);
    let margin = 100.0;
    let mut md_ok = true;
    let mut md_detail = Vec::new();
    for d in distances {
        let mut hits = 0u64;
        for _ in 0..per {
            let sc = ScenarioConfig {
                density: rho,
                road_length: d + 2.0 * margin,
                wrap: false,
                seed: rng.random(),
            };
            let mut xs = generate_ppp(&sc)?.positions().to_vec();
            xs.push(margin);
            xs.push(margin + d);
            let s = Scenario::from_positions(xs, sc.road_length, false)?;
            let alloc = allocate_md(&s, &grid);
            let find = |id: u64| s.ids().iter().position(|&v| v == id).expect("inserted vehicle");
            let n = s.len() as u64;
            let (a, b) = (alloc.get(find(n - 2)), alloc.get(find(n - 1)));
            if let (Slot::Resource(a), Slot::Resource(b)) = (a, b) {
                hits += u64::from(grid.same_subframe(a, b)?);
            }
        }
        let (ok, z) = within_3_sigma(hits, per, p_hd_md(rho, d, &grid)?);
        md_ok &= ok;
        md_detail.push(format!("{d} m z={z:+.2}"));
    }
    Ok(CheckOutcome {
        id: 5,
        name: "half-duplex loss frequencies",
        passed: rr_ok && md_ok,
        detail: format!(
            "RR {hd}/{links} z={rr_z:+.2}; MD (R_t=4, {per} links each) {}",
            md_detail.join(", ")
        ),
    })
}

fn nth_neighbor(effort: &Effort) -> Result<CheckOutcome> {
    let rho = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(effort.seed ^ 0x06);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1u32, 5, 100] {
        let nf = f64::from(n);
        let length = (nf + 10.0 * nf.sqrt() + 50.0) / rho;
        let samples: Vec<f64> = (0..effort.neighbor_samples)
            .map(|_| {
                let sc = ScenarioConfig { density: rho, road_length: length, wrap: false, seed: rng.random() };
                generate_ppp(&sc).map(|s| s.positions().get(n as usize - 1).copied().unwrap_or(length))
            })
            .collect::<Result<_>>()?;
        let d = ks_statistic(&samples, |x| nth_neighbor_cdf(n, rho, x).unwrap_or(f64::NAN));
        let p = ks_pvalue(samples.len(), d);
        ok &= p >= 0.01;
        parts.push(format!("n={n} D={d:.4} p={p:.3}"));
    }
    Ok(CheckOutcome {
        id: 6,
        name: "n-th neighbor law (KS, 1%)",
        passed: ok,
        detail: parts.join(", "),
    })
}

fn sandwich(main: &PrpStats) -> Result<CheckOutcome> {
    let rr = main.summary(Algorithm::Rr)?;
    let md = main.summary(Algorithm::Md)?;
    let mut worst = (f64::NEG_INFINITY, String::new());
    let mut checked = 0;
    for algo in Algorithm::all().into_iter().filter(|a| !matches!(a, Algorithm::Rr | Algorithm::Md)) {
        for (k, b) in main.summary(algo)?.iter().enumerate() {
            if md[k].drops_used == 0 || md[k].mean < 0.5 || b.drops_used == 0 {
                continue;
            }
            checked += 1;
            let below = rr[k].mean - 0.02 - b.mean;
            let above = b.mean - md[k].mean - 0.02;
            let excess = below.max(above);
            if excess > worst.0 {
                worst = (
                    excess,
                    format!(
                        "{algo} at {} m: RR {:.4} <= {:.4} <= MD {:.4} (+-0.02)",
                        b.centre(),
                        rr[k].mean,
                        b.mean,
                        md[k].mean
                    ),
                );
            }
        }
    }
    Ok(CheckOutcome {
        id: 7,
        name: "benchmark sandwich",
        passed: checked > 0 && worst.0 <= 0.0,
        detail: format!("{checked} bins; tightest {}", worst.1),
    })
}

/// Frozen analytical values at 250 m and 450 m.
pub const MD_PRP_250_M: f64 = 0.98787;
pub const MD_PRP_450_M: f64 = 0.06680;

fn md_shape(env: &Defaults) -> Result<CheckOutcome> {
    let at = |d| prp(Benchmark::Md(MdMode::Approximate), &env.radio, env.scenario.density, &env.grid, d);
    let (p250, p450) = (at(250.0)?, at(450.0)?);
    let regression = (p250 - MD_PRP_250_M).abs() <= 1e-4 && (p450 - MD_PRP_450_M).abs() <= 1e-4;
    Ok(CheckOutcome {
        id: 8,
        name: "MD threshold shape",
        passed: p250 >= 0.95 && p450 <= 0.5 && regression,
        detail: format!(
            "PRP_MD(250 m) = {p250:.5} (>= 0.95, frozen {MD_PRP_250_M}), PRP_MD(450 m) = {p450:.5} (<= 0.5, frozen {MD_PRP_450_M})"
        ),
    })
}

/// Upper edge of the leading run of bins with PRP above 0.9.
pub fn simulated_d09(bins: &[BinSummary]) -> f64 {
    bins.iter()
        .take_while(|b| b.drops_used > 0 && b.mean > 0.9)
        .last()
        .map_or(0.0, |b| b.hi)
}

fn crr_collapse(env: &Defaults, effort: &Effort) -> Result<CheckOutcome> {
    let sc = ScenarioConfig { density: 0.2, ..env.scenario.clone() };
    let cfg = SimConfig {
        drops: effort.crr_drops,
        algorithms: vec![Algorithm::Crr],
        seed: effort.seed,
        ..SimConfig::default()
    };
    let stats = run_experiment(&cfg, ScenarioSource::Ppp(&sc), &env.grid, &env.radio, env.period())?;
    let blocked = stats.blocked_fraction(Algorithm::Crr)?;
    let d09 = simulated_d09(&stats.summary(Algorithm::Crr)?);
    Ok(CheckOutcome {
        id: 9,
        name: "CRR collapse at rho = 0.2",
        passed: blocked > 0.10 && d09 == 0.0,
        detail: format!("blocked fraction {blocked:.4} (> 0.10), simulated d0.9 {d09} m (= 0)"),
    })
}

fn scarcity(env: &Defaults) -> Result<CheckOutcome> {
    let gap = |hz: f64| -> Result<(u32, f64)> {
        let grid = grid_from_cam(&CamConfig { beacon_frequency_hz: hz, ..env.cam.clone() })?;
        let rho = env.scenario.density;
        let md = prp(Benchmark::Md(MdMode::Approximate), &env.radio, rho, &grid, 300.0)?;
        let rr = prp(Benchmark::Rr, &env.radio, rho, &grid, 300.0)?;
        Ok((grid.total(), md - rr))
    };
    let (r_small, g_small) = gap(10.0)?;
    let (r_large, g_large) = gap(2.0)?;
    Ok(CheckOutcome {
        id: 10,
        name: "resource-scarcity trend at 300 m",
        passed: g_small > g_large,
        detail: format!("PRP_MD - PRP_RR = {g_small:.4} at R={r_small} vs {g_large:.4} at R={r_large}"),
    })
}

fn oracles(env: &Defaults, effort: &Effort) -> Result<CheckOutcome> {
    let rho = env.scenario.density;
    let mut rng = ChaCha8Rng::seed_from_u64(effort.seed ^ 0x0b);
    let p = rr_stable_params(rho, &env.grid, &env.radio)?;
    let kind = OracleKind::Rr {
        rho_rr: rho / f64::from(env.grid.total()),
        pr0: pr0(&env.radio),
        beta: env.radio.beta,
    };
    let emp = interference_oracle(kind, effort.oracle_samples, &mut rng)?;
    let pts = emp.quantile_grid(400);
    let rr = emp.sup_distance(&pts, |y| stable_cdf(&p, y))?;

    let mut parts = vec![format!("RR {rr:.4}")];
    let mut ok = rr <= 0.01;
    for d in [100.0, 300.0] {
        let mp = MdParams::new(rho, &env.grid, &env.radio, d)?;
        let emp = interference_oracle(OracleKind::MdTwoNearest(mp), effort.oracle_samples, &mut rng)?;
        let pts = emp.quantile_grid(400);
        for mode in [MdMode::Approximate, MdMode::Full] {
            let s = emp.sup_distance(&pts, |y| md_interference_cdf(&mp, y, mode))?;
            ok &= s <= 0.01;
            parts.push(format!("MD {mode:?} d={d} m {s:.4}"));
        }
    }
    Ok(CheckOutcome {
        id: 11,
        name: "interference CDFs vs Monte Carlo oracles",
        passed: ok,
        detail: format!("sup distances ({} samples): {}", effort.oracle_samples, parts.join(", ")),
    })
}

/// Free-flow traffic at 0.125 veh/m on an 8 km ring, one snapshot per
/// beacon period.
pub fn synthetic_highway_trace(snapshots: usize, period_s: f64, seed: u64) -> Result<Vec<Scenario>> {
    let cfg = ScenarioConfig { density: 0.125, road_length: 8000.0, wrap: true, seed };
    moving_ppp_trace(&cfg, snapshots, period_s, 30.0, 4.0)
}

fn trace(env: &Defaults, effort: &Effort) -> Result<CheckOutcome> {
    let cfg = SimConfig {
        drops: effort.trace_drops,
        algorithms: vec![Algorithm::Rr, Algorithm::Md],
        seed: effort.seed,
        ..SimConfig::default()
    };
    let snaps = synthetic_highway_trace(
        cfg.drops * cfg.periods_per_replication(env.period()),
        env.period(),
        effort.seed ^ 0x0c,
    )?;
    let rho = snaps.iter().map(empirical_density).sum::<f64>() / snaps.len() as f64;
    let stats = run_experiment(&cfg, ScenarioSource::Trace(&snaps), &env.grid, &env.radio, env.period())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (algo, bench) in [(Algorithm::Rr, Benchmark::Rr), (Algorithm::Md, Benchmark::Md(MdMode::Approximate))] {
        let (pass, detail) = compare_bins(&stats.summary(algo)?, f64::INFINITY, 0.03, |b| {
            prp_bin_average(bench, &env.radio, rho, &env.grid, b.lo, b.hi)
        })?;
        ok &= pass;
        parts.push(format!("{algo}: {detail}"));
    }
    Ok(CheckOutcome {
        id: 12,
        name: "trace-driven simulation vs analysis",
        passed: ok,
        detail: format!("empirical density {rho:.4}/m; {}", parts.join("; ")),
    })
}
