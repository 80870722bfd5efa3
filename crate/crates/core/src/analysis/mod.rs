//! Certified interval arithmetic and the numeric bounds built on it.

pub mod bounds;
pub mod constants;
pub mod consts;
pub mod interval;

pub use interval::{escalate, CertifiedScalar, DEFAULT_PRECISION, MAX_PRECISION};
