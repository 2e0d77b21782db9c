//! Library half of the experiment runner: configuration loading, figure
//! sweeps, and oracle validation. The binary in `main.rs` is a thin shell
//! over these modules, which keeps every behavior testable in-process.

pub mod config;
pub mod experiments;
pub mod validate;
