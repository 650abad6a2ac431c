//! Closed-form and semi-analytical PRP benchmarks.

pub mod halfduplex;
pub mod md;
pub mod neighbor;
pub mod prp;
pub mod quadrature;
pub mod special;
pub mod stable;

pub use halfduplex::{p_hd_md, p_hd_rr};
pub use md::{md_interference_cdf, MdMode, MdParams};
pub use neighbor::{nth_neighbor_ccdf, nth_neighbor_cdf, nth_neighbor_pdf};
pub use prp::{d09, prp, prp_bin_average, prp_curve, Benchmark, PrpCurve, PrpPoint};
pub use special::gammainc_upper_reg;
pub use stable::{levy_cdf_rr, rr_stable_params, stable_cdf, StableParams};
