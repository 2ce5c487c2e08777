//! Deterministic simulation engine for capacity-based electricity grid tariffs.
//!
//! The engine models a distribution grid area as a set of household categories,
//! each with an hourly consumption profile and a household count, plus an hourly
//! system load series. A tariff design splits every household's annual
//! consumption into a peak part and a base part; the solver then prices the two
//! parts so that the grid operator collects exactly the same revenue as under a
//! flat volumetric tariff, and reports how the cost burden shifts between
//! categories.
//!
//! The crate is split along the pipeline:
//!
//! * [`dataset`]: category/profile/system-load data model and CSV I/O
//! * [`synthgen`]: deterministic synthetic dataset generator
//! * [`classification`]: peak/base consumption split per tariff design
//! * [`solver`]: revenue-neutral tariff rate solver and per-category bills
//! * [`scenario`]: single scenario runs, sweeps and recovery-share sensitivity
//! * [`reporting`]: group averages and report file emission
//! * [`oracle`]: slow reference implementation used for cross-checks
//!
//! All entry points are deterministic: the same inputs produce byte-identical
//! outputs regardless of the `parallel` feature or thread count.

pub mod calendar;
pub mod classification;
pub mod dataset;
mod error;
pub mod exec;
pub mod oracle;
pub mod reporting;
pub mod scenario;
pub mod solver;
pub mod synthgen;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Engine version string embedded in manifests and provenance files.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
