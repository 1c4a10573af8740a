//! Batch driver library: named verification suites, parameter sweeps, and
//! plain-text run configuration. The binary in `main.rs` is a thin wrapper;
//! the acceptance tests call straight into [`suites`].

pub mod config;
pub mod suites;
