//! Library half of the `mono` binary: error mapping and the experiment runner.

pub mod error;
pub mod experiment;
