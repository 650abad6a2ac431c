//! Interference under random allocation: a totally skewed stable law.
//!
//! The CDF is obtained by inverting the Laplace transform
//! `E[exp(-sX)] = exp(-γ s^a)`, `γ = c^a / cos(πa/2)`, along the two rays
//! `s = r e^{±iψ}` with `π/2 < ψ ≤ π/(2a)`. On those rays the integrand
//! decays like `exp(r y cos ψ)`, so the oscillatory Fourier tail of the
//! real-axis formula never appears.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::quadrature::{integrate_with_breaks, Tolerance};
use super::special::{erfc, ln_gamma};
use crate::error::{domain, numeric, Result};
use crate::radio::{pr0, RadioConfig};
use crate::resources::ResourceGrid;

/// Parameters of a stable law in the S1 parameterization
/// `φ(t) = exp(-c^a |t|^a (1 - i b sgn(t) tan(πa/2)) + iμt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mu: f64,
}

impl StableParams {
    /// Coefficient `γ` of the Laplace exponent, valid for `b = 1, a < 1`.
    pub fn laplace_scale(&self) -> f64 {
        self.c.powf(self.a) / (PI * self.a / 2.0).cos()
    }
}

/// Stable parameters of the aggregate interference when co-resource users
/// form a PPP of density `rho / R`.
pub fn rr_stable_params(rho: f64, grid: &ResourceGrid, radio: &RadioConfig) -> Result<StableParams> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(domain("rr_stable_params", format!("density must be > 0, got {rho}")));
    }
    let beta = radio.beta;
    if !(beta > 1.0) {
        return Err(domain(
            "rr_stable_params",
            format!("path-loss exponent must exceed 1, got {beta}"),
        ));
    }
    let rho_rr = rho / f64::from(grid.total());
    let k = 2.0 * rho_rr * ln_gamma((beta - 1.0) / beta).exp();
    let c = pr0(radio) * (k * (PI / (2.0 * beta)).cos()).powf(beta);
    Ok(StableParams {
        a: 1.0 / beta,
        b: 1.0,
        c,
        mu: 0.0,
    })
}

/// `exp(z) - 1` without cancellation for small `|z|`.
fn cexpm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (z.im / 2.0).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// CDF of a totally skewed (`b = 1`, `μ = 0`) stable law with `0 < a < 1`.
pub fn stable_cdf(p: &StableParams, y: f64) -> Result<f64> {
    if !(p.a > 0.0 && p.a < 1.0) || p.b != 1.0 || p.mu != 0.0 || !(p.c >= 0.0) {
        return Err(domain(
            "stable_cdf",
            format!("requires 0<a<1, b=1, mu=0, c>=0; got {p:?}"),
        ));
    }
    if y.is_nan() {
        return Err(domain("stable_cdf", "y is NaN"));
    }
    if y <= 0.0 {
        return Ok(0.0);
    }
    if p.c == 0.0 || y == f64::INFINITY {
        return Ok(1.0);
    }
    let a = p.a;
    let kappa = p.laplace_scale() * y.powf(-a);
    if kappa == 0.0 {
        return Ok(1.0);
    }
    let psi = 0.5 * (PI / 2.0 + (PI / (2.0 * a)).min(PI));
    let ray = Complex64::from_polar(1.0, psi);
    let ray_a = Complex64::from_polar(1.0, a * psi);
    // Beyond v_max the factor exp(w cos ψ) is below e^-42.
    let v_max = (42.0 / psi.cos().abs()).powf(a);

    // Variable v = (r y)^a; dr/r = dv/(a v).
    let integrand = |v: f64| -> f64 {
        if v <= 0.0 {
            return (kappa * ray_a).im;
        }
        let tail = -cexpm1(-kappa * v * ray_a);
        let osc = (v.powf(1.0 / a) * ray).exp();
        (tail * osc).im / v
    };

    let mut breaks = vec![0.0];
    let knee = 1.0 / kappa;
    for scale in [1e-3, 1e-2, 1e-1, 1.0, 1e1] {
        let b = knee * scale;
        if b > 0.0 && b < v_max {
            breaks.push(b);
        }
    }
    for frac in [0.25, 0.5, 0.75] {
        breaks.push(v_max * frac);
    }
    breaks.push(v_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-10,
        max_panels: 4000,
    };
    let ccdf = integrate_with_breaks(integrand, &breaks, tol)
        .map_err(|e| numeric("stable_cdf", format!("y={y:e}, kappa={kappa:e}: {e}")))?
        / (PI * a);
    Ok((1.0 - ccdf).clamp(0.0, 1.0))
}

/// Closed-form interference CDF for `β = 2`: `erfc(ρ_RR Γ(1/2) √(P_r0/y))`.
pub fn levy_cdf_rr(rho_rr: f64, pr0_mw: f64, y: f64) -> f64 {
    if !(y > 0.0) {
        return 0.0;
    }
    erfc(rho_rr * PI.sqrt() * (pr0_mw / y).sqrt())
}
