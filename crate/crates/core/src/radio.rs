//! Propagation, shadowing, noise and SINR.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Thermal noise `-174 dBm/Hz + 10 log10(B) + NF`.
pub fn thermal_noise_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    -174.0 + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// Bandwidth of one LTE resource-block pair.
pub const RB_PAIR_BANDWIDTH_HZ: f64 = 180e3;

/// Which bandwidth the receiver noise is integrated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseBandwidth {
    /// The whole channel (10 MHz with the default settings).
    Channel,
    /// Only the resource blocks a CAM occupies. An RB spans one slot, so a
    /// CAM of `rbs` RBs inside one subframe covers `rbs / 2` RB pairs in
    /// frequency.
    Occupied,
}

/// Noise power for the chosen bandwidth interpretation.
pub fn noise_power_dbm(
    which: NoiseBandwidth,
    channel_bandwidth_hz: f64,
    rbs_per_cam: u32,
    noise_figure_db: f64,
) -> f64 {
    let bw = match which {
        NoiseBandwidth::Channel => channel_bandwidth_hz,
        NoiseBandwidth::Occupied => rbs_per_cam as f64 / 2.0 * RB_PAIR_BANDWIDTH_HZ,
    };
    thermal_noise_dbm(bw, noise_figure_db)
}

/// Near-range slope used by the simulator below the break distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualSlope {
    pub break_distance_m: f64,
    pub near_exponent: f64,
}

impl Default for DualSlope {
    fn default() -> Self {
        Self {
            break_distance_m: 20.0,
            near_exponent: 2.27,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub pt_dbm: f64,
    pub gt_db: f64,
    pub gr_db: f64,
    /// Path loss at 1 m.
    pub l0_db: f64,
    /// Path-loss exponent.
    pub beta: f64,
    pub noise_power_dbm: f64,
    pub gamma_min_db: f64,
    pub shadow_sigma_db: f64,
    pub decorr_distance_m: f64,
    #[serde(default)]
    pub dual_slope: Option<DualSlope>,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            pt_dbm: 23.0,
            gt_db: 3.0,
            gr_db: 3.0,
            l0_db: 20.06,
            beta: 4.0,
            noise_power_dbm: noise_power_dbm(NoiseBandwidth::Occupied, 10e6, 68, 9.0),
            gamma_min_db: 2.8,
            shadow_sigma_db: 3.0,
            decorr_distance_m: 25.0,
            dual_slope: None,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.pt_dbm,
            self.gt_db,
            self.gr_db,
            self.l0_db,
            self.beta,
            self.noise_power_dbm,
            self.gamma_min_db,
            self.shadow_sigma_db,
            self.decorr_distance_m,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("radio parameters must be finite".into()));
        }
        if self.beta <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "path-loss exponent must exceed 1 for the interference sum to converge, got {}",
                self.beta
            )));
        }
        if self.shadow_sigma_db < 0.0 {
            return Err(Error::InvalidConfig("shadow_sigma_db must be >= 0".into()));
        }
        if self.decorr_distance_m <= 0.0 {
            return Err(Error::InvalidConfig("decorr_distance_m must be > 0".into()));
        }
        if let Some(ds) = &self.dual_slope {
            if !(ds.break_distance_m > 0.0) || !(ds.near_exponent > 0.0) {
                return Err(Error::InvalidConfig("dual-slope parameters must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn noise_mw(&self) -> f64 {
        db_to_linear(self.noise_power_dbm)
    }

    pub fn gamma_min(&self) -> f64 {
        db_to_linear(self.gamma_min_db)
    }

    /// Distance-dependent gain excluding shadowing, in mW received for the
    /// configured transmit power. `dual` enables the near-range slope.
    pub fn mean_rx_power(&self, distance_m: f64, dual: bool) -> f64 {
        let p0 = pr0(self);
        match (dual, self.dual_slope) {
            (true, Some(ds)) if distance_m < ds.break_distance_m => {
                // Continuous at the break distance.
                let at_break = p0 * ds.break_distance_m.powf(-self.beta);
                at_break * (distance_m / ds.break_distance_m).powf(-ds.near_exponent)
            }
            _ => p0 * distance_m.powf(-self.beta),
        }
    }
}

/// Received power at 1 m, `P_t G_t G_r / L_0`, in mW.
pub fn pr0(cfg: &RadioConfig) -> f64 {
    db_to_linear(cfg.pt_dbm + cfg.gt_db + cfg.gr_db - cfg.l0_db)
}

/// Single-slope received power `P_r0 υ / d^β` in mW.
pub fn rx_power(cfg: &RadioConfig, distance_m: f64, shadow_linear: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(domain("rx_power", format!("distance must be > 0, got {distance_m}")));
    }
    Ok(pr0(cfg) * shadow_linear * distance_m.powf(-cfg.beta))
}

pub fn sinr(cfg: &RadioConfig, rx_power_mw: f64, interference_mw: f64) -> f64 {
    rx_power_mw / (cfg.noise_mw() + interference_mw)
}

/// Strict threshold test `γ > γ_m`.
pub fn decode_ok(cfg: &RadioConfig, gamma: f64) -> bool {
    gamma > cfg.gamma_min()
}

/// Log-normal shadowing on every link, reciprocal between the two ends and
/// correlated over time by a first-order autoregression on the change of
/// link length: `ρ = exp(-Δd / d_corr)`.
#[derive(Debug, Clone)]
pub struct ShadowField {
    sigma_db: f64,
    decorr_m: f64,
    rng: ChaCha8Rng,
    ids: Vec<u64>,
    // Row-major n×n, symmetric, dB values and the link length they were drawn at.
    db: Vec<f64>,
    length: Vec<f64>,
}

impl ShadowField {
    pub fn new(sigma_db: f64, decorr_m: f64, seed: u64) -> Self {
        Self {
            sigma_db,
            decorr_m,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ids: Vec::new(),
            db: Vec::new(),
            length: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn draw(&mut self) -> f64 {
        if self.sigma_db == 0.0 {
            return 0.0;
        }
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.sigma_db * z
    }

    /// Moves the field to a new snapshot. `ids[k]` identifies the vehicle at
    /// snapshot index `k`; `link_length(a, b)` is the current distance
    /// between snapshot indices `a` and `b`.
    pub fn advance<D: Fn(usize, usize) -> f64>(&mut self, ids: &[u64], link_length: D) {
        let n = ids.len();
        let old_index: Option<HashMap<u64, usize>> = if ids == self.ids.as_slice() {
            None
        } else {
            Some(self.ids.iter().enumerate().map(|(k, &id)| (id, k)).collect())
        };
        let old_n = self.ids.len();
        let old_db = std::mem::take(&mut self.db);
        let old_len = std::mem::take(&mut self.length);
        let mut db = vec![0.0; n * n];
        let mut length = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let d = link_length(a, b);
                let prev = match &old_index {
                    None => Some((a, b)),
                    Some(map) => match (map.get(&ids[a]), map.get(&ids[b])) {
                        (Some(&oa), Some(&ob)) => Some((oa, ob)),
                        _ => None,
                    },
                };
                let value = match prev {
                    Some((oa, ob)) => {
                        let k = oa * old_n + ob;
                        let moved = (d - old_len[k]).abs();
                        let corr = (-moved / self.decorr_m).exp();
                        if corr >= 1.0 {
                            old_db[k]
                        } else {
                            corr * old_db[k] + (1.0 - corr * corr).sqrt() * self.draw()
                        }
                    }
                    None => self.draw(),
                };
                db[a * n + b] = value;
                db[b * n + a] = value;
                length[a * n + b] = d;
                length[b * n + a] = d;
            }
        }
        self.ids = ids.to_vec();
        self.db = db;
        self.length = length;
    }

    /// Shadowing in dB between snapshot indices `a` and `b`.
    pub fn db(&self, a: usize, b: usize) -> f64 {
        self.db[a * self.ids.len() + b]
    }

    pub fn linear(&self, a: usize, b: usize) -> f64 {
        db_to_linear(self.db(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pr0_table_values() {
        let cfg = RadioConfig::default();
        assert!((linear_to_db(pr0(&cfg)) - 8.94).abs() < 1e-12);
        let zero = RadioConfig {
            pt_dbm: 0.0,
            gt_db: 0.0,
            gr_db: 0.0,
            l0_db: 0.0,
            ..RadioConfig::default()
        };
        assert!((pr0(&zero) - 1.0).abs() < 1e-15);
        let doubled = RadioConfig {
            pt_dbm: cfg.pt_dbm + 10.0 * 2f64.log10(),
            ..cfg.clone()
        };
        assert!((pr0(&doubled) / pr0(&cfg) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rx_power_power_law() {
        let cfg = RadioConfig::default();
        let p0 = pr0(&cfg);
        assert!((rx_power(&cfg, 1.0, 1.0).unwrap() - p0).abs() < 1e-15);
        assert!((rx_power(&cfg, 10.0, 1.0).unwrap() - p0 * 1e-4).abs() < 1e-15 * p0);
        let one = rx_power(&cfg, 37.0, 1.0).unwrap();
        assert!((rx_power(&cfg, 37.0, 2.0).unwrap() - 2.0 * one).abs() < 1e-18);
        assert!(rx_power(&cfg, 0.0, 1.0).is_err());
        assert!(rx_power(&cfg, -3.0, 1.0).is_err());
    }

    #[test]
    fn sinr_and_threshold() {
        let cfg = RadioConfig::default();
        let pn = cfg.noise_mw();
        assert!((sinr(&cfg, 3.0 * pn, 0.0) - 3.0).abs() < 1e-12);
        assert!(sinr(&cfg, 1.0, 1e300) < 1e-299);
        assert!(!decode_ok(&cfg, cfg.gamma_min()));
        assert!(decode_ok(&cfg, db_to_linear(3.0)));
        assert!(!decode_ok(&cfg, db_to_linear(2.0)));
    }

    #[test]
    fn default_noise_uses_occupied_bandwidth() {
        let cfg = RadioConfig::default();
        // 34 RB pairs x 180 kHz = 6.12 MHz, NF 9 dB.
        assert!((cfg.noise_power_dbm - (-174.0 + 10.0 * 6.12e6f64.log10() + 9.0)).abs() < 1e-12);
        let full = noise_power_dbm(NoiseBandwidth::Channel, 10e6, 68, 9.0);
        assert!((full + 95.0).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_beta_at_most_one() {
        let cfg = RadioConfig { beta: 1.0, ..RadioConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(RadioConfig::default().validate().is_ok());
    }

    #[test]
    fn dual_slope_is_continuous_at_break() {
        let cfg = RadioConfig {
            dual_slope: Some(DualSlope::default()),
            ..RadioConfig::default()
        };
        let b = 20.0;
        let below = cfg.mean_rx_power(b * (1.0 - 1e-12), true);
        let above = cfg.mean_rx_power(b, true);
        assert!((below / above - 1.0).abs() < 1e-9);
        assert!(cfg.mean_rx_power(10.0, true) < cfg.mean_rx_power(10.0, false));
        assert_eq!(cfg.mean_rx_power(100.0, true), cfg.mean_rx_power(100.0, false));
    }

    #[test]
    fn shadow_field_static_snapshot_is_frozen() {
        let mut f = ShadowField::new(3.0, 25.0, 7);
        let ids = [0u64, 1, 2, 3];
        let pos: [f64; 4] = [0.0, 10.0, 50.0, 80.0];
        f.advance(&ids, |a, b| (pos[a] - pos[b]).abs());
        let before: Vec<f64> = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| f.db(a, b)).collect();
        f.advance(&ids, |a, b| (pos[a] - pos[b]).abs());
        let after: Vec<f64> = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| f.db(a, b)).collect();
        assert_eq!(before, after);
        assert_eq!(f.db(1, 2), f.db(2, 1));
    }

    #[test]
    fn shadow_field_keeps_identity_across_reordering() {
        let mut f = ShadowField::new(3.0, 25.0, 11);
        f.advance(&[10, 20, 30], |a, b| [0.0, 5.0, 9.0][b] - [0.0, 5.0, 9.0][a]);
        let v = f.db(0, 2);
        // Same geometry, different snapshot order and one newcomer.
        let pos: [f64; 3] = [9.0, 100.0, 0.0];
        f.advance(&[30, 40, 10], |a, b| (pos[a] - pos[b]).abs());
        assert_eq!(f.db(2, 0), v);
    }
}
