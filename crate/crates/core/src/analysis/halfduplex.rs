//! Probability that source and destination transmit in the same subframe.

use super::special::ln_poisson_pmf;
use crate::error::{domain, Result};
use crate::resources::ResourceGrid;

/// Random allocation: the destination picks the source's subframe with
/// probability `1/R_t`.
pub fn p_hd_rr(grid: &ResourceGrid) -> f64 {
    1.0 / f64::from(grid.r_time())
}

/// Cyclic allocation: same subframe iff the number of nodes strictly between
/// source and destination is `(R_t - 1) + k R_t` for some `k ≥ 0`.
pub fn p_hd_md(rho: f64, d_sd: f64, grid: &ResourceGrid) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() || !(d_sd >= 0.0) || !d_sd.is_finite() {
        return Err(domain("p_hd_md", format!("need rho > 0 and d >= 0, got {rho}, {d_sd}")));
    }
    let rt = u64::from(grid.r_time());
    let lambda = rho * d_sd;
    let mut sum = 0.0;
    let mut n = rt - 1;
    loop {
        let term = ln_poisson_pmf(lambda, n).exp();
        sum += term;
        if n as f64 > lambda && (term == 0.0 || term < 1e-18 * sum) {
            break;
        }
        n += rt;
    }
    Ok(sum.min(1.0))
}
