//! Analytic and Monte Carlo engine for the uplink of a drone base station
//! above a Poisson field of ground interferers.
//!
//! The crate has four layers:
//!
//! - [`channel`]: air-to-ground propagation (free-space loss, LoS
//!   probability, height-dependent log-normal shadowing) and environment
//!   table ingestion,
//! - [`interference`]: closed-form mean/variance/CV of the aggregate
//!   interference, backed by the adaptive quadrature in [`quad`],
//! - [`montecarlo`]: a seeded, parallel Poisson-field simulator that serves
//!   as the oracle for every closed form,
//! - [`performance`]: coverage probability, normalized transmission rate,
//!   and 1-D optimizers over altitude and SIR threshold.

pub mod channel;
mod error;
pub mod interference;
pub mod montecarlo;
pub mod performance;
pub mod quad;
pub mod units;

pub use error::{Error, Result};
