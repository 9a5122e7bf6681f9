//! Exact Stokes spectra on disks and balls, independent discretized
//! eigensolvers to validate them, certified heat traces, and recovery of the
//! volume and boundary terms of the small-time heat expansion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
mod dd;
pub mod discrete_oracle;
pub mod error;
pub mod heat_trace;
pub mod par;
pub mod pipeline;
pub mod special_fn;
pub mod spectra;
pub mod sum;
pub mod textfmt;

pub use error::{Error, Result};
