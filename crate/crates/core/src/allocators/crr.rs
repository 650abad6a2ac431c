use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Allocation, Slot};
use crate::error::{Error, Result};
use crate::resources::ResourceGrid;
use crate::scenario::{separation, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrrConfig {
    pub reuse_distance_m: f64,
    /// Standard deviation of the reported-position error; 100 m at the 95%
    /// level gives 100 / 1.96.
    pub position_error_sigma_m: f64,
}

impl Default for CrrConfig {
    fn default() -> Self {
        Self {
            reuse_distance_m: 200.0,
            position_error_sigma_m: 100.0 / 1.96,
        }
    }
}

impl CrrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reuse_distance_m >= 0.0) || !(self.position_error_sigma_m >= 0.0) {
            return Err(Error::InvalidConfig(format!("CRR parameters must be >= 0: {self:?}")));
        }
        Ok(())
    }
}

/// Reported (noisy) positions used by the central scheduler.
pub(crate) fn noisy_positions<G: Rng + ?Sized>(scenario: &Scenario, sigma: f64, rng: &mut G) -> Vec<f64> {
    let l = scenario.road_length();
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("finite sigma");
    scenario
        .positions()
        .iter()
        .map(|&x| {
            let y = x + if sigma > 0.0 { normal.sample(rng) } else { 0.0 };
            if scenario.wrap() {
                y.rem_euclid(l)
            } else {
                y
            }
        })
        .collect()
}

/// Centralized allocation with a minimum reuse distance. Vehicles are
/// served in order of reported position; each gets a uniformly chosen
/// resource whose nearest already-served user is at least the reuse
/// distance away, or is blocked if no such resource exists.
pub fn allocate_crr<G: Rng + ?Sized>(
    scenario: &Scenario,
    grid: &ResourceGrid,
    cfg: &CrrConfig,
    rng: &mut G,
) -> Allocation {
    let reported = noisy_positions(scenario, cfg.position_error_sigma_m, rng);
    let mut order: Vec<usize> = (0..reported.len()).collect();
    order.sort_by(|&a, &b| reported[a].total_cmp(&reported[b]));
    let (l, wrap) = (scenario.road_length(), scenario.wrap());
    let r = grid.total() as usize;
    // Served users per resource in service order (reported positions ascending).
    let mut users: Vec<Vec<f64>> = vec![Vec::new(); r];
    let mut slots = vec![Slot::Blocked; reported.len()];
    let mut feasible = Vec::with_capacity(r);
    for &v in &order {
        let x = reported[v];
        feasible.clear();
        for (k, list) in users.iter().enumerate() {
            // Nearest served user is the latest one, or the first one
            // across the seam of a ring.
            let ok = match (list.first(), list.last()) {
                (Some(&first), Some(&last)) => {
                    separation(x, last, l, wrap) >= cfg.reuse_distance_m
                        && separation(x, first, l, wrap) >= cfg.reuse_distance_m
                }
                _ => true,
            };
            if ok {
                feasible.push(k);
            }
        }
        if let Some(&k) = feasible.choose(rng) {
            users[k].push(x);
            slots[v] = Slot::Resource(k as u32 + 1);
        }
    }
    Allocation::new(slots)
}
