//! Analytical packet-reception benchmarks for LTE-V2V beacon resource
//! allocation, and a Monte Carlo highway simulator to check them against.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocators;
pub mod analysis;
pub mod error;
pub mod radio;
pub mod resources;
pub mod scenario;
pub mod simulator;
pub mod validation;

pub use error::{Error, Result};
