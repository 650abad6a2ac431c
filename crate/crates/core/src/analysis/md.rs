//! Interference under maximum-reuse-distance allocation, keeping only the
//! nearest co-resource interferer on each side of the receiver.
//!
//! The source sits at 0 and the receiver at `d`. Co-resource nodes are the
//! `kR`-th neighbours of the source, so their distances are gamma
//! distributed. Two configurations matter:
//!
//! * case 1 (`Δ_R > d`): left interferer is node `i-R`, right is `i+R`;
//! * case 2 (`Δ_R ≤ d < Δ_2R`): left interferer is `i+R` (between source
//!   and receiver), right is `i+2R`.
//!
//! All convolutions are carried out over interferer distance, with gamma
//! densities evaluated in log space.

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_with_breaks, Tolerance};
use super::special::{gammainc_pair, gammainc_upper_reg, ln_gamma_density};
use crate::error::{domain, numeric, Result};
use crate::radio::{pr0, RadioConfig};
use crate::resources::ResourceGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MdMode {
    #[default]
    #[serde(alias = "approx")]
    Approximate,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdParams {
    pub rho: f64,
    pub r_total: u32,
    pub beta: f64,
    pub pr0: f64,
    pub d_sd: f64,
}

impl MdParams {
    pub fn new(rho: f64, grid: &ResourceGrid, radio: &RadioConfig, d_sd: f64) -> Result<Self> {
        let p = Self {
            rho,
            r_total: grid.total(),
            beta: radio.beta,
            pr0: pr0(radio),
            d_sd,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.rho > 0.0
            && self.rho.is_finite()
            && self.r_total >= 1
            && self.beta > 1.0
            && self.pr0 > 0.0
            && self.d_sd > 0.0
            && self.d_sd.is_finite();
        if ok {
            Ok(())
        } else {
            Err(domain("md_interference_cdf", format!("invalid parameters {self:?}")))
        }
    }

    /// Distance at which a single interferer delivers power `a`:
    /// `(a / P_r0)^(-1/β)`.
    #[inline]
    pub fn reach(&self, a: f64) -> f64 {
        (a / self.pr0).powf(-1.0 / self.beta)
    }

    /// `h(a, b) = (a / P_r0)^(-1/β) + b`.
    #[inline]
    pub fn h(&self, a: f64, b: f64) -> f64 {
        self.reach(a) + b
    }

    /// `dh/da`.
    #[inline]
    pub fn h_prime(&self, a: f64) -> f64 {
        -self.pr0.powf(1.0 / self.beta) / self.beta * a.powf(-(1.0 + self.beta) / self.beta)
    }

    /// Interference from a node at distance `δ` from the source:
    /// `P_r0 (α1 δ + α2 d)^(-β)`.
    #[inline]
    pub fn g_shifted(&self, alpha1: i8, alpha2: i8, delta: f64) -> f64 {
        let dist = f64::from(alpha1) * delta + f64::from(alpha2) * self.d_sd;
        self.pr0 * dist.powf(-self.beta)
    }

    /// Inverse of [`Self::g_shifted`]: `α1 ((y/P_r0)^(-1/β) - α2 d)`.
    #[inline]
    pub fn g_shifted_inv(&self, alpha1: i8, alpha2: i8, y: f64) -> f64 {
        f64::from(alpha1) * (self.reach(y) - f64::from(alpha2) * self.d_sd)
    }

    /// Derivative of [`Self::g_shifted_inv`] with respect to `y`.
    #[inline]
    pub fn g_shifted_inv_prime(&self, alpha1: i8, y: f64) -> f64 {
        f64::from(alpha1) * self.h_prime(y)
    }

    /// Power received from an interferer located exactly at the source.
    pub fn g_at_source(&self) -> f64 {
        self.pr0 * self.d_sd.powf(-self.beta)
    }

    /// `F_ΔR(d)`: probability that a co-resource node lies between source
    /// and receiver.
    pub fn interferer_inside_prob(&self) -> Result<f64> {
        Ok(1.0 - gammainc_upper_reg(f64::from(self.r_total), self.rho * self.d_sd)?)
    }

    /// Whether the single-term approximation is trusted at `y`.
    pub fn approximation_valid(&self, y: f64) -> Result<bool> {
        Ok(self.interferer_inside_prob()? <= 0.01 && y < self.g_at_source())
    }
}

const TOL: Tolerance = Tolerance {
    abs: 1e-12,
    rel: 1e-9,
    max_panels: 4000,
};

/// CDF of the two-nearest-interferer sum at `y` (mW). In approximate mode
/// the case-2 terms are dropped; this falls back to the full expression
/// whenever an interferer inside the link is not negligible or `y` exceeds
/// the power of a node co-located with the source.
pub fn md_interference_cdf(p: &MdParams, y: f64, mode: MdMode) -> Result<f64> {
    p.validate()?;
    if y.is_nan() {
        return Err(domain("md_interference_cdf", "y is NaN"));
    }
    if y <= 0.0 {
        return Ok(0.0);
    }
    if y == f64::INFINITY {
        return Ok(1.0);
    }
    let value = match mode {
        MdMode::Approximate if p.approximation_valid(y)? => approximate(p, y)?,
        _ => full(p, y)?,
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Single-term form, integrated over the right interferer's distance `δ`
/// from the source (`t = ρδ`):
/// `∫ Q(R, ρ(r(y - P_r0 (δ-d)^-β) - d)) f_Γ(R,ρ)(δ) dδ` over `δ > d + r(y)`.
fn approximate(p: &MdParams, y: f64) -> Result<f64> {
    let r = f64::from(p.r_total);
    let left = |u: f64| -> f64 {
        let reach = p.reach(u);
        if reach <= p.d_sd {
            1.0
        } else {
            gammainc_upper_reg(r, p.rho * (reach - p.d_sd)).unwrap_or(0.0)
        }
    };
    let t_lo = p.rho * (p.d_sd + p.reach(y));
    let integrand = |t: f64| -> f64 {
        let delta = t / p.rho;
        let u = y - p.g_shifted(1, -1, delta);
        if u <= 0.0 {
            return 0.0;
        }
        left(u) * ln_gamma_density(r, t).exp()
    };
    let breaks = breakpoints(t_lo, r, None);
    integrate_with_breaks(integrand, &breaks, TOL)
        .map_err(|e| numeric("md_interference_cdf", format!("approximate, y={y:e}: {e}")))
}

/// Four-term form with normalized conditional laws per case.
///
/// Left interferer (CDF): case 1 `Q(R, ρ(r(u) - d))` for `u < g(d)`,
/// else 1; case 2 `P(R, ρ(d - r(u))) / P(R, ρd)` for `u > g(d)`, else 0.
/// Right interferer (density over `δ > d`): gamma(R) in case 1 and
/// gamma(2R) in case 2, each renormalized to the event `δ > d`.
fn full(p: &MdParams, y: f64) -> Result<f64> {
    let r = f64::from(p.r_total);
    let rd = p.rho * p.d_sd;
    let (p_in, w1) = gammainc_pair(r, rd)?;
    let w2 = p_in;
    let g_d = p.g_at_source();

    let left_mix = |u: f64| -> f64 {
        let reach = p.reach(u);
        let case1 = if u < g_d {
            gammainc_upper_reg(r, p.rho * (reach - p.d_sd)).unwrap_or(0.0)
        } else {
            1.0
        };
        let case2 = if w2 > 0.0 && u > g_d {
            let (lower, _) = gammainc_pair(r, p.rho * (p.d_sd - reach)).unwrap_or((0.0, 1.0));
            lower / w2
        } else {
            0.0
        };
        w1 * case1 + w2 * case2
    };

    let t_lo = p.rho * (p.d_sd + p.reach(y));
    let kink = (y > g_d).then(|| p.rho * (p.d_sd + p.reach(y - g_d)));
    let mut total = 0.0;
    for (shape, weight) in [(r, w1), (2.0 * r, w2)] {
        if weight <= 0.0 {
            continue;
        }
        let norm = gammainc_upper_reg(shape, rd)?;
        if !(norm > 0.0) {
            return Err(numeric(
                "md_interference_cdf",
                format!("right-interferer law degenerate: Q({shape}, {rd}) underflows"),
            ));
        }
        let integrand = |t: f64| -> f64 {
            let delta = t / p.rho;
            let u = y - p.g_shifted(1, -1, delta);
            if u <= 0.0 {
                return 0.0;
            }
            left_mix(u) * ln_gamma_density(shape, t).exp()
        };
        let breaks = breakpoints(t_lo, shape, kink);
        let part = integrate_with_breaks(integrand, &breaks, TOL)
            .map_err(|e| numeric("md_interference_cdf", format!("full, y={y:e}: {e}")))?;
        total += weight / norm * part;
    }
    Ok(total)
}

/// Panel edges in `t = ρδ` from `t_lo` out to where a gamma(`shape`) tail
/// is negligible, refined near the lower limit and the gamma mode.
fn breakpoints(t_lo: f64, shape: f64, extra: Option<f64>) -> Vec<f64> {
    let sd = shape.sqrt();
    let t_hi = t_lo.max(shape) + 15.0 * sd + 40.0;
    let mut b = vec![t_lo, t_hi];
    for k in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
        b.push(shape - 1.0 + k * sd);
    }
    for f in [1e-3, 1e-2, 1e-1] {
        b.push(t_lo * (1.0 + f));
    }
    b.extend(extra);
    b.retain(|&x| x >= t_lo && x <= t_hi && x.is_finite());
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}
