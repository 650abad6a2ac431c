//! Distance from a node to its n-th neighbor in one direction on a 1-D PPP.

use super::special::{gammainc_upper_reg, ln_gamma_density};
use crate::error::{domain, Result};

fn check(n: u32, rho: f64, delta: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("nth_neighbor", "n must be >= 1"));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(domain("nth_neighbor", format!("density must be positive, got {rho}")));
    }
    if !(delta >= 0.0) {
        return Err(domain("nth_neighbor", format!("distance must be >= 0, got {delta}")));
    }
    Ok(())
}

/// `P{Δ_n > δ} = Q(n, ρδ)`: fewer than `n` nodes fall in `[0, δ]`.
pub fn nth_neighbor_ccdf(n: u32, rho: f64, delta: f64) -> Result<f64> {
    check(n, rho, delta)?;
    gammainc_upper_reg(n as f64, rho * delta)
}

/// `P{Δ_n <= δ}`.
pub fn nth_neighbor_cdf(n: u32, rho: f64, delta: f64) -> Result<f64> {
    nth_neighbor_ccdf(n, rho, delta).map(|q| 1.0 - q)
}

/// Gamma(n, ρ) density of the n-th neighbor distance, per meter.
pub fn nth_neighbor_pdf(n: u32, rho: f64, delta: f64) -> Result<f64> {
    check(n, rho, delta)?;
    Ok(rho * ln_gamma_density(n as f64, rho * delta).exp())
}
