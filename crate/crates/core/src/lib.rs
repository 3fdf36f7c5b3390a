//! Deployment simulator and joint optimizer for multi-tenant DNN workloads
//! on ReRAM crossbar processing-in-memory accelerators.
//!
//! The pipeline models an ISAAC-style chip (tiles of IMAs of 128x128
//! crossbar arrays), maps conv/fc operators onto arrays, and compares
//! classic sequential deployment against a jointly optimized one:
//!
//! * [`profiler`] prices each operator via the classic latency equation and
//!   inter-layer duplication counts, and charges energy for active tiles.
//! * [`reconstruct`] rebuilds operators with a global duplicate parameter
//!   alpha and a split threshold beta, grid-searching both.
//! * [`allocator`] iteratively partitions the chip's tiles across tenants,
//!   moving area from the fastest tenant to the slowest.
//! * [`report`] assembles baseline-vs-optimized comparisons with ablations
//!   and emits deterministic JSON/CSV.
//!
//! Everything is a pure function of immutable inputs; with the `parallel`
//! feature (default) grid points and tenants evaluate on a rayon pool,
//! yielding results identical to sequential evaluation.

pub mod allocator;
pub mod error;
mod exec;
pub mod hardware;
pub mod mapping;
pub mod presets;
pub mod profiler;
pub mod reconstruct;
pub mod report;
pub mod workload;

pub use error::{Error, Result};
pub use hardware::{chip_preset, ChipTopology, PowerModel};
pub use presets::{load_bundle, load_preset, BUNDLE_PRESETS, NETWORK_PRESETS};
pub use reconstruct::{Beta, GridSpec};
pub use workload::{parse_workload, MultiTenantWorkload, TenantSpec};
