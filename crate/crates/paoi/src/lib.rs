//! File formats, parallel execution and the sweep driver behind the `paoi`
//! command line tool. The numerical work lives in `paoi_core`.

pub mod config;
pub mod dataset;
mod error;
pub mod number;
pub mod parallel;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
