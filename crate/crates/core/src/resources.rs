//! The CAM-R grid and its time/frequency indexing.
//!
//! Resources are numbered `1..=R` with `r = (r_f - 1) * R_t + r_t`, so the
//! time slot is `((r - 1) mod R_t) + 1` and the frequency portion is
//! `ceil(r / R_t)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Resource blocks per LTE RB pair (one per 0.5 ms slot).
pub const RBS_PER_RB_PAIR: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceGrid {
    r_time: u32,
    r_freq: u32,
}

impl ResourceGrid {
    pub fn new(r_time: u32, r_freq: u32) -> Result<Self> {
        if r_time == 0 || r_freq == 0 {
            return Err(Error::InvalidConfig(format!(
                "resource grid needs R_t >= 1 and R_f >= 1 (got {r_time} x {r_freq})"
            )));
        }
        Ok(Self { r_time, r_freq })
    }

    pub fn total(&self) -> u32 {
        self.r_time * self.r_freq
    }

    pub fn r_time(&self) -> u32 {
        self.r_time
    }

    pub fn r_freq(&self) -> u32 {
        self.r_freq
    }

    fn check(&self, r: u32) -> Result<()> {
        if r == 0 || r > self.total() {
            return Err(domain(
                "resource index",
                format!("{r} outside 1..={}", self.total()),
            ));
        }
        Ok(())
    }

    pub fn time_slot(&self, r: u32) -> Result<u32> {
        self.check(r)?;
        Ok((r - 1) % self.r_time + 1)
    }

    pub fn freq_slot(&self, r: u32) -> Result<u32> {
        self.check(r)?;
        Ok((r - 1) / self.r_time + 1)
    }

    /// Both resources occupy the same subframe.
    pub fn same_subframe(&self, a: u32, b: u32) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.abs_diff(b).is_multiple_of(self.r_time))
    }

    /// Unchecked variant for hot loops; indices must be in range.
    #[inline]
    pub(crate) fn same_subframe_unchecked(&self, a: u32, b: u32) -> bool {
        a.abs_diff(b).is_multiple_of(self.r_time)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CamConfig {
    pub beacon_frequency_hz: f64,
    /// Informational; the RB count per CAM is configured directly.
    pub beacon_size_bytes: u32,
    pub rbs_per_cam: u32,
    pub rb_pairs_per_subframe: u32,
}

impl Default for CamConfig {
    fn default() -> Self {
        Self {
            beacon_frequency_hz: 10.0,
            beacon_size_bytes: 300,
            rbs_per_cam: 68,
            rb_pairs_per_subframe: 40,
        }
    }
}

impl CamConfig {
    pub fn beacon_period_s(&self) -> f64 {
        1.0 / self.beacon_frequency_hz
    }
}

/// Builds the grid for a CAM configuration with 1 ms subframes.
pub fn grid_from_cam(cfg: &CamConfig) -> Result<ResourceGrid> {
    if !(cfg.beacon_frequency_hz > 0.0) || !cfg.beacon_frequency_hz.is_finite() {
        return Err(Error::InvalidConfig("beacon frequency must be positive".into()));
    }
    if cfg.rbs_per_cam == 0 || cfg.rb_pairs_per_subframe == 0 || cfg.beacon_size_bytes == 0 {
        return Err(Error::InvalidConfig("CAM sizes must be positive".into()));
    }
    let r_time = (1000.0 / cfg.beacon_frequency_hz + 1e-9).floor() as u32;
    let r_freq = cfg.rb_pairs_per_subframe * RBS_PER_RB_PAIR / cfg.rbs_per_cam;
    if r_time == 0 {
        return Err(Error::InvalidConfig(format!(
            "beacon frequency {} Hz leaves no subframe per period",
            cfg.beacon_frequency_hz
        )));
    }
    if r_freq == 0 {
        return Err(Error::InvalidConfig(format!(
            "a CAM of {} RBs does not fit in {} RB pairs",
            cfg.rbs_per_cam, cfg.rb_pairs_per_subframe
        )));
    }
    ResourceGrid::new(r_time, r_freq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cam(f: f64) -> CamConfig {
        CamConfig {
            beacon_frequency_hz: f,
            ..CamConfig::default()
        }
    }

    #[test]
    fn table_defaults_give_hundred_resources() {
        let g = grid_from_cam(&CamConfig::default()).unwrap();
        assert_eq!((g.total(), g.r_time(), g.r_freq()), (100, 100, 1));
        assert_eq!(grid_from_cam(&cam(1.0)).unwrap().total(), 1000);
        assert_eq!(grid_from_cam(&cam(1000.0)).unwrap().r_time(), 1);
        assert!(grid_from_cam(&cam(2000.0)).is_err());
        let too_big = CamConfig { rbs_per_cam: 81, ..CamConfig::default() };
        assert!(grid_from_cam(&too_big).is_err());
    }

    #[test]
    fn slot_indexing_examples() {
        let g = ResourceGrid::new(100, 1).unwrap();
        assert_eq!((g.time_slot(1).unwrap(), g.freq_slot(1).unwrap()), (1, 1));
        assert_eq!((g.time_slot(100).unwrap(), g.freq_slot(100).unwrap()), (100, 1));
        let g = ResourceGrid::new(4, 3).unwrap();
        assert_eq!((g.time_slot(12).unwrap(), g.freq_slot(12).unwrap()), (4, 3));
        assert_eq!((g.time_slot(5).unwrap(), g.freq_slot(5).unwrap()), (1, 2));
        assert!(g.time_slot(0).is_err());
        assert!(g.freq_slot(13).is_err());
    }

    #[test]
    fn same_subframe_examples() {
        let g = ResourceGrid::new(4, 3).unwrap();
        assert!(g.same_subframe(5, 5).unwrap());
        assert!(g.same_subframe(5, 9).unwrap());
        assert!(!g.same_subframe(5, 8).unwrap());
        assert!(g.same_subframe(5, 13).is_err());
    }

    proptest! {
        #[test]
        fn slot_round_trip(rt in 1u32..60, rf in 1u32..8, seed in 0u32..10_000) {
            let g = ResourceGrid::new(rt, rf).unwrap();
            let r = seed % g.total() + 1;
            let t = g.time_slot(r).unwrap();
            let f = g.freq_slot(r).unwrap();
            prop_assert_eq!((f - 1) * rt + t, r);
        }

        #[test]
        fn same_subframe_partitions_grid(rt in 1u32..20, rf in 1u32..6) {
            let g = ResourceGrid::new(rt, rf).unwrap();
            let mut class_sizes = vec![0u32; rt as usize];
            for r in 1..=g.total() {
                class_sizes[(g.time_slot(r).unwrap() - 1) as usize] += 1;
                for s in 1..=g.total() {
                    let same = g.same_subframe(r, s).unwrap();
                    prop_assert_eq!(same, g.time_slot(r).unwrap() == g.time_slot(s).unwrap());
                }
            }
            prop_assert!(class_sizes.iter().all(|&c| c == rf));
        }
    }
}
