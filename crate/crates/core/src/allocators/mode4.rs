//! Autonomous sensing-based semi-persistent scheduling.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Allocation;
use crate::error::{Error, Result};
use crate::radio::db_to_linear;
use crate::resources::ResourceGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mode4Config {
    /// Probability of keeping the resource when the countdown expires.
    pub p_keep: f64,
    /// Sensed-interference threshold below which a busy resource is still
    /// a candidate, in dBm.
    pub i_th_dbm: f64,
    /// Share of resources kept as the least-interfered candidate set.
    pub candidate_fraction: f64,
    pub sensing_window_s: f64,
    pub reselection_min_s: f64,
    pub reselection_max_s: f64,
}

impl Default for Mode4Config {
    fn default() -> Self {
        Self {
            p_keep: 0.0,
            i_th_dbm: -110.0,
            candidate_fraction: 0.2,
            sensing_window_s: 1.0,
            reselection_min_s: 0.5,
            reselection_max_s: 1.5,
        }
    }
}

impl Mode4Config {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.p_keep)
            && self.i_th_dbm.is_finite()
            && self.candidate_fraction > 0.0
            && self.candidate_fraction <= 1.0
            && self.sensing_window_s > 0.0
            && self.reselection_min_s > 0.0
            && self.reselection_max_s >= self.reselection_min_s;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid mode-4 parameters: {self:?}")))
        }
    }

    /// Countdown bounds in beacon periods.
    fn countdown_range(&self, period_s: f64) -> (u32, u32) {
        let lo = ((self.reselection_min_s / period_s) - 1e-9).ceil().max(1.0) as u32;
        let hi = ((self.reselection_max_s / period_s) + 1e-9).floor().max(f64::from(lo)) as u32;
        (lo, hi)
    }
}

/// What every vehicle measured during one beacon period: for each vehicle
/// and resource, the summed power received from the other users of that
/// resource, and whether a control message on it was decodable.
#[derive(Debug, Clone, PartialEq)]
pub struct Sensing {
    pub n_vehicles: usize,
    pub n_resources: usize,
    /// Row-major `n_vehicles × n_resources`, mW.
    pub interference_mw: Vec<f64>,
    pub busy: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Mode4State {
    cfg: Mode4Config,
    r: usize,
    period_s: f64,
    window: usize,
    head: usize,
    ids: Vec<u64>,
    resource: Vec<u32>,
    countdown: Vec<u32>,
    seen: Vec<usize>,
    // n × window × r ring of sensed powers, and the running n × r sums.
    history: Vec<f64>,
    sums: Vec<f64>,
    busy: Vec<bool>,
}

impl Mode4State {
    /// Initial state: uniform resources and countdowns, empty history.
    pub fn new<G: Rng + ?Sized>(
        ids: &[u64],
        grid: &ResourceGrid,
        cfg: Mode4Config,
        period_s: f64,
        rng: &mut G,
    ) -> Result<Self> {
        cfg.validate()?;
        if !(period_s > 0.0) {
            return Err(Error::InvalidConfig(format!("beacon period must be > 0, got {period_s}")));
        }
        let window = ((cfg.sensing_window_s / period_s) + 1e-9).floor().max(1.0) as usize;
        let mut s = Self {
            cfg,
            r: grid.total() as usize,
            period_s,
            window,
            head: 0,
            ids: Vec::new(),
            resource: Vec::new(),
            countdown: Vec::new(),
            seen: Vec::new(),
            history: Vec::new(),
            sums: Vec::new(),
            busy: Vec::new(),
        };
        s.resync(ids, rng);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn config(&self) -> &Mode4Config {
        &self.cfg
    }

    pub fn allocation(&self) -> Allocation {
        Allocation::from_resources(self.resource.iter().copied())
    }

    pub fn countdown(&self, v: usize) -> u32 {
        self.countdown[v]
    }

    /// Window-averaged sensed interference of vehicle `v`, per resource.
    pub fn averages(&self, v: usize) -> Vec<f64> {
        let row = &self.sums[v * self.r..(v + 1) * self.r];
        match self.seen[v] {
            0 => vec![0.0; self.r],
            k => row.iter().map(|s| (s / k as f64).max(0.0)).collect(),
        }
    }

    pub fn busy(&self, v: usize) -> &[bool] {
        &self.busy[v * self.r..(v + 1) * self.r]
    }

    fn draw_countdown<G: Rng + ?Sized>(&self, rng: &mut G) -> u32 {
        let (lo, hi) = self.cfg.countdown_range(self.period_s);
        rng.random_range(lo..=hi)
    }

    /// Re-keys the state to a new vehicle set; vehicles seen before keep
    /// their resource, countdown and history, newcomers start fresh.
    pub fn resync<G: Rng + ?Sized>(&mut self, ids: &[u64], rng: &mut G) {
        if ids == self.ids.as_slice() {
            return;
        }
        let old: HashMap<u64, usize> = self.ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        let (r, w) = (self.r, self.window);
        let n = ids.len();
        let mut resource = Vec::with_capacity(n);
        let mut countdown = Vec::with_capacity(n);
        let mut seen = Vec::with_capacity(n);
        let mut history = vec![0.0; n * w * r];
        let mut sums = vec![0.0; n * r];
        let mut busy = vec![false; n * r];
        for (v, id) in ids.iter().enumerate() {
            match old.get(id) {
                Some(&o) => {
                    resource.push(self.resource[o]);
                    countdown.push(self.countdown[o]);
                    seen.push(self.seen[o]);
                    history[v * w * r..(v + 1) * w * r]
                        .copy_from_slice(&self.history[o * w * r..(o + 1) * w * r]);
                    sums[v * r..(v + 1) * r].copy_from_slice(&self.sums[o * r..(o + 1) * r]);
                    busy[v * r..(v + 1) * r].copy_from_slice(&self.busy[o * r..(o + 1) * r]);
                }
                None => {
                    resource.push(rng.random_range(1..=r as u32));
                    countdown.push(self.draw_countdown(rng));
                    seen.push(0);
                }
            }
        }
        self.ids = ids.to_vec();
        self.resource = resource;
        self.countdown = countdown;
        self.seen = seen;
        self.history = history;
        self.sums = sums;
        self.busy = busy;
    }

    /// Records one period of sensing into the sliding window.
    pub fn observe(&mut self, sensing: &Sensing) -> Result<()> {
        let (n, r, w) = (self.ids.len(), self.r, self.window);
        if sensing.n_vehicles != n
            || sensing.n_resources != r
            || sensing.interference_mw.len() != n * r
            || sensing.busy.len() != n * r
        {
            return Err(Error::State(format!(
                "sensing is {}x{} but state holds {n} vehicles and {r} resources",
                sensing.n_vehicles, sensing.n_resources
            )));
        }
        for v in 0..n {
            let base = (v * w + self.head) * r;
            for k in 0..r {
                let new = sensing.interference_mw[v * r + k].max(0.0);
                let slot = &mut self.history[base + k];
                self.sums[v * r + k] += new - *slot;
                *slot = new;
            }
            self.seen[v] = (self.seen[v] + 1).min(w);
        }
        self.busy.copy_from_slice(&sensing.busy);
        self.head = (self.head + 1) % w;
        Ok(())
    }

    /// Advances countdowns and performs reselections for the next period.
    pub fn step<G: Rng + ?Sized>(&mut self, rng: &mut G) -> Allocation {
        let i_th = db_to_linear(self.cfg.i_th_dbm);
        for v in 0..self.ids.len() {
            self.countdown[v] = self.countdown[v].saturating_sub(1);
            if self.countdown[v] > 0 {
                continue;
            }
            self.countdown[v] = self.draw_countdown(rng);
            if rng.random::<f64>() < self.cfg.p_keep {
                continue;
            }
            let cands = candidate_set(&self.averages(v), self.busy(v), i_th, self.cfg.candidate_fraction);
            if let Some(&pick) = cands.choose(rng) {
                self.resource[v] = pick;
            }
        }
        self.allocation()
    }
}

/// Records `sensing` and returns the allocation for the next period.
pub fn mode4_step<G: Rng + ?Sized>(state: &mut Mode4State, sensing: &Sensing, rng: &mut G) -> Result<Allocation> {
    state.observe(sensing)?;
    Ok(state.step(rng))
}

/// Resources a reselecting vehicle may pick (1-based): those not flagged
/// busy or sensed below `i_th_mw`, cut to the `⌈fraction·R⌉` least
/// interfered (ties at the cut included). If too few qualify, the least
/// interfered of the rest fill the set.
pub fn candidate_set(avg_mw: &[f64], busy: &[bool], i_th_mw: f64, fraction: f64) -> Vec<u32> {
    let r = avg_mw.len();
    let k = ((fraction * r as f64) - 1e-9).ceil().max(1.0) as usize;
    let by_power = |a: &usize, b: &usize| avg_mw[*a].total_cmp(&avg_mw[*b]).then(a.cmp(b));
    let (mut pool, mut rest): (Vec<usize>, Vec<usize>) =
        (0..r).partition(|&i| !busy[i] || avg_mw[i] < i_th_mw);
    pool.sort_by(by_power);
    if pool.len() < k {
        rest.sort_by(by_power);
        pool.extend(rest);
    }
    let k = k.min(pool.len());
    if k == 0 {
        return Vec::new();
    }
    let cut = avg_mw[pool[k - 1]];
    let end = k + pool[k..].iter().take_while(|&&i| avg_mw[i] <= cut).count();
    pool[..end].iter().map(|&i| i as u32 + 1).collect()
}
