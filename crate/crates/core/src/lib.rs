//! Worst-case peak age-of-information (PAoI) analysis for FCFS
//! information-update queues.
//!
//! The crate is split along the pipeline it supports:
//!
//! * [`stochastic`] describes interarrival/service laws with closed-form
//!   moments and produces seeded sample streams.
//! * [`simulator`] runs single- and two-source FCFS sample paths and turns
//!   them into PAoI traces and replication summaries.
//! * [`bounds`] evaluates the uncertainty-set worst case, the closed-form
//!   robust bounds and Kingman's bound.
//! * [`calibration`] maps distribution moments to variability parameters
//!   and fits the mapping coefficients by least squares.
//!
//! Everything here is `no_std` + `alloc`; file formats, parallel
//! replication and the command line live in the `paoi` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod calibration;
mod error;
mod math;
pub mod simulator;
pub mod stochastic;

pub use error::{Error, Result};
