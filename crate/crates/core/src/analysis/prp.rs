//! Packet reception probability of the two benchmarks and derived metrics.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::halfduplex::{p_hd_md, p_hd_rr};
use super::md::{md_interference_cdf, MdMode, MdParams};
use super::quadrature::{gauss_legendre, gauss_hermite, try_normal_expectation};
use super::stable::{rr_stable_params, stable_cdf};
use crate::error::{domain, Result};
use crate::radio::{pr0, RadioConfig};
use crate::resources::ResourceGrid;

/// Analytical benchmark allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Benchmark {
    Rr,
    Md(MdMode),
}

impl Benchmark {
    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Rr => "RR",
            Benchmark::Md(_) => "MD",
        }
    }
}

const HERMITE_NODES: usize = 64;

fn hermite_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(HERMITE_NODES))
}

/// `(1 - P_HD) E_υ[F_I(P̃_r υ / γ_m - P_n)]` with log-normal `υ`.
pub fn prp(algo: Benchmark, radio: &RadioConfig, rho: f64, grid: &ResourceGrid, d_sd: f64) -> Result<f64> {
    radio.validate()?;
    if !(d_sd > 0.0) || !d_sd.is_finite() {
        return Err(domain("prp", format!("distance must be > 0, got {d_sd}")));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(domain("prp", format!("density must be > 0, got {rho}")));
    }
    let mean_rx = pr0(radio) * d_sd.powf(-radio.beta);
    let gamma_m = radio.gamma_min();
    let noise = radio.noise_mw();
    let i_max = |x_db: f64| mean_rx * 10f64.powf(x_db / 10.0) / gamma_m - noise;
    let rule = hermite_rule();
    let (p_hd, decoded) = match algo {
        Benchmark::Rr => {
            let params = rr_stable_params(rho, grid, radio)?;
            let e = try_normal_expectation(
                |x| {
                    let y = i_max(x);
                    if y <= 0.0 {
                        Ok(0.0)
                    } else {
                        stable_cdf(&params, y)
                    }
                },
                radio.shadow_sigma_db,
                rule,
            )?;
            (p_hd_rr(grid), e)
        }
        Benchmark::Md(mode) => {
            let params = MdParams::new(rho, grid, radio, d_sd)?;
            let e = try_normal_expectation(
                |x| {
                    let y = i_max(x);
                    if y <= 0.0 {
                        Ok(0.0)
                    } else {
                        md_interference_cdf(&params, y, mode)
                    }
                },
                radio.shadow_sigma_db,
                rule,
            )?;
            (p_hd_md(rho, d_sd, grid)?, e)
        }
    };
    Ok(((1.0 - p_hd) * decoded).clamp(0.0, 1.0))
}

/// Mean of [`prp`] over `[lo, hi]` by 3-point Gauss–Legendre, matching a
/// distance bin of the simulator.
pub fn prp_bin_average(
    algo: Benchmark,
    radio: &RadioConfig,
    rho: f64,
    grid: &ResourceGrid,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !(hi > lo) || !(lo >= 0.0) {
        return Err(domain("prp_bin_average", format!("empty bin [{lo}, {hi}]")));
    }
    let (x, w) = gauss_legendre(3);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut sum = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        sum += wi * prp(algo, radio, rho, grid, mid + half * xi)?;
    }
    Ok(0.5 * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrpPoint {
    pub d_sd: f64,
    pub prp: f64,
    pub ci_half_width: Option<f64>,
}

/// PRP sampled at strictly increasing distances.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PrpCurve {
    points: Vec<PrpPoint>,
}

impl PrpCurve {
    pub fn new(points: Vec<PrpPoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].d_sd > w[0].d_sd)) {
            return Err(domain("PrpCurve", "distances must be strictly increasing"));
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.prp)) {
            return Err(domain("PrpCurve", format!("prp {} outside [0, 1]", p.prp)));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PrpPoint] {
        &self.points
    }
}

/// Analytical curve over `distances`, evaluated in parallel.
pub fn prp_curve(
    algo: Benchmark,
    radio: &RadioConfig,
    rho: f64,
    grid: &ResourceGrid,
    distances: &[f64],
) -> Result<PrpCurve> {
    let points = distances
        .par_iter()
        .map(|&d| {
            prp(algo, radio, rho, grid, d).map(|p| PrpPoint {
                d_sd: d,
                prp: p,
                ci_half_width: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PrpCurve::new(points)
}

const D09_STEP_M: f64 = 25.0;
const D09_MAX_M: f64 = 5000.0;

/// Largest distance with PRP above 0.9, to 1 m resolution; 0 if none.
pub fn d09(algo: Benchmark, radio: &RadioConfig, rho: f64, grid: &ResourceGrid) -> Result<f64> {
    d09_by(|d| prp(algo, radio, rho, grid, d))
}

/// Scan on a 25 m grid, then bisect the last upward crossing of 0.9.
pub fn d09_by<F: Fn(f64) -> Result<f64>>(prp_at: F) -> Result<f64> {
    let mut last_above = None;
    let mut d = D09_STEP_M;
    while d <= D09_MAX_M {
        let p = prp_at(d)?;
        if p > 0.9 {
            last_above = Some(d);
        } else if last_above.is_some() && p < 0.05 {
            break;
        }
        d += D09_STEP_M;
    }
    let Some(mut lo) = last_above else {
        return Ok(0.0);
    };
    let mut hi = lo + D09_STEP_M;
    while hi - lo > 1.0 {
        let mid = 0.5 * (lo + hi);
        if prp_at(mid)? > 0.9 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.floor())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> ResourceGrid {
        ResourceGrid::new(100, 1).unwrap()
    }

    #[test]
    fn tiny_threshold_gives_one_minus_p_hd() {
        let radio = RadioConfig {
            gamma_min_db: -400.0,
            ..RadioConfig::default()
        };
        let p = prp(Benchmark::Rr, &radio, 0.1, &grid(), 200.0).unwrap();
        assert!((p - 0.99).abs() < 1e-6, "{p}");
    }

    #[test]
    fn md_beats_rr_at_120() {
        let radio = RadioConfig::default();
        let rr = prp(Benchmark::Rr, &radio, 0.1, &grid(), 120.0).unwrap();
        let md = prp(Benchmark::Md(MdMode::Approximate), &radio, 0.1, &grid(), 120.0).unwrap();
        assert!(md > rr, "md {md} rr {rr}");
    }

    #[test]
    fn curves_nonincreasing() {
        let radio = RadioConfig::default();
        let ds: Vec<f64> = (1..=24).map(|k| 25.0 * k as f64).collect();
        for algo in [Benchmark::Rr, Benchmark::Md(MdMode::Approximate)] {
            let c = prp_curve(algo, &radio, 0.1, &grid(), &ds).unwrap();
            for w in c.points().windows(2) {
                assert!(w[1].prp <= w[0].prp + 1e-9, "{algo:?} at {}", w[1].d_sd);
            }
        }
    }

    #[test]
    fn d09_flat_curve_is_zero() {
        assert_eq!(d09_by(|_| Ok(0.85)).unwrap(), 0.0);
    }

    #[test]
    fn d09_bisection_matches_scan() {
        // Linear decay crossing 0.9 at 317.4 m.
        let f = |d: f64| Ok((1.0 - (d - 300.0).max(0.0) * 0.1 / 17.4).clamp(0.0, 1.0));
        assert_eq!(d09_by(f).unwrap(), 317.0);
    }

    #[test]
    fn curve_rejects_unsorted() {
        let pt = |d| PrpPoint { d_sd: d, prp: 0.5, ci_half_width: None };
        assert!(PrpCurve::new(vec![pt(10.0), pt(10.0)]).is_err());
        assert!(PrpCurve::new(vec![pt(10.0), pt(20.0)]).is_ok());
    }
}
