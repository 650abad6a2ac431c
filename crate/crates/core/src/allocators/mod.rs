//! Beacon-resource allocation algorithms.

mod crr;
mod lgc;
mod md;
mod mode4;
mod rr;

pub use crr::{allocate_crr, CrrConfig};
pub use lgc::allocate_lgc;
pub use md::allocate_md;
pub use mode4::{candidate_set, mode4_step, Mode4Config, Mode4State, Sensing};
pub use rr::allocate_rr;

use serde::{Deserialize, Serialize};

/// What a vehicle transmits on during one beacon period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    /// 1-based CAM-R index.
    Resource(u32),
    Blocked,
}

impl Slot {
    pub fn resource(self) -> Option<u32> {
        match self {
            Slot::Resource(r) => Some(r),
            Slot::Blocked => None,
        }
    }
}

/// Per-vehicle slots, indexed like the scenario's sorted positions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Allocation(Vec<Slot>);

impl Allocation {
    pub fn new(slots: Vec<Slot>) -> Self {
        Self(slots)
    }

    pub fn from_resources<I: IntoIterator<Item = u32>>(resources: I) -> Self {
        Self(resources.into_iter().map(Slot::Resource).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Slot {
        self.0[i]
    }

    pub fn blocked_count(&self) -> usize {
        self.0.iter().filter(|s| **s == Slot::Blocked).count()
    }

    pub fn blocked_fraction(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.blocked_count() as f64 / self.0.len() as f64
        }
    }
}

/// Average distance over all unordered pairs of vehicles sharing a
/// resource; `None` when no resource is shared.
pub fn mean_same_resource_distance(positions: &[f64], resources: &[u32]) -> Option<f64> {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            if resources[i] == resources[j] {
                sum += (positions[i] - positions[j]).abs();
                pairs += 1;
            }
        }
    }
    (pairs > 0).then(|| sum / pairs as f64)
}

/// Exhaustive maximum of [`mean_same_resource_distance`] over all `R^N`
/// assignments, optionally restricted to assignments whose class sizes
/// match `class_sizes` (sorted descending).
pub fn brute_force_best_mean_distance(positions: &[f64], r: u32, class_sizes: Option<&[usize]>) -> f64 {
    let n = positions.len();
    let mut assignment = vec![1u32; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let admissible = class_sizes.is_none_or(|want| {
            let mut sizes = vec![0usize; r as usize];
            for &a in &assignment {
                sizes[(a - 1) as usize] += 1;
            }
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            sizes == want
        });
        if admissible {
            if let Some(v) = mean_same_resource_distance(positions, &assignment) {
                best = best.max(v);
            }
        }
        // Odometer increment over {1..R}^N.
        let mut k = 0;
        while k < n && assignment[k] == r {
            assignment[k] = 1;
            k += 1;
        }
        if k == n {
            return best;
        }
        assignment[k] += 1;
    }
}

/// Class sizes (descending) of an assignment over `r` resources.
pub fn class_sizes(resources: &[u32], r: u32) -> Vec<usize> {
    let mut sizes = vec![0usize; r as usize];
    for &a in resources {
        sizes[(a - 1) as usize] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
