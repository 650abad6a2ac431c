//! Direct Monte Carlo samplers of the aggregate interference, used to
//! check the analytical interference laws.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use super::stats::EmpiricalCdf;
use crate::analysis::MdParams;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    /// Co-resource users form a PPP of density `rho_rr` around the
    /// receiver, with single-slope path loss.
    Rr { rho_rr: f64, pr0: f64, beta: f64 },
    /// Source at 0, receiver at `d`, cyclic allocation: only the nearest
    /// co-resource node on each side of the receiver contributes.
    MdTwoNearest(MdParams),
}

/// Expected number of PPP points simulated per sample under the RR oracle;
/// interferers beyond the window contribute their mean.
const RR_WINDOW_POINTS: f64 = 400.0;

pub fn interference_oracle<G: Rng + ?Sized>(kind: OracleKind, samples: usize, rng: &mut G) -> Result<EmpiricalCdf> {
    let draws = match kind {
        OracleKind::Rr { rho_rr, pr0, beta } => {
            if !(rho_rr >= 0.0) || !(beta > 1.0) || !(pr0 > 0.0) {
                return Err(domain("interference_oracle", format!("bad RR parameters {kind:?}")));
            }
            if rho_rr == 0.0 {
                vec![0.0; samples]
            } else {
                let w = RR_WINDOW_POINTS / (2.0 * rho_rr);
                let tail = 2.0 * rho_rr * pr0 * w.powf(1.0 - beta) / (beta - 1.0);
                let count = Poisson::new(2.0 * w * rho_rr).expect("positive mean");
                (0..samples)
                    .map(|_| {
                        let k = count.sample(rng) as usize;
                        let near: f64 = (0..k)
                            .map(|_| pr0 * (rng.random::<f64>() * w).powf(-beta))
                            .sum();
                        near + tail
                    })
                    .collect()
            }
        }
        OracleKind::MdTwoNearest(p) => {
            let step = Gamma::new(f64::from(p.r_total), 1.0 / p.rho)
                .map_err(|e| domain("interference_oracle", e.to_string()))?;
            let power = |dist: f64| p.pr0 * dist.max(f64::MIN_POSITIVE).powf(-p.beta);
            (0..samples)
                .map(|_| {
                    // Co-resource positions: -L, then A1 < A2 < ... on the right.
                    let mut left = -step.sample(rng);
                    let mut right = step.sample(rng);
                    while right <= p.d_sd {
                        left = right;
                        right += step.sample(rng);
                    }
                    power(p.d_sd - left) + power(right - p.d_sd)
                })
                .collect()
        }
    };
    Ok(EmpiricalCdf::new(draws))
}
