//! Command-line tools and file formats for packing experiments.
//!
//! The numerics live in `packlab-core`; this crate reads and writes packings,
//! covers, reports and run manifests, and exposes the `packlab` binary.

pub mod cli;
pub mod json;
pub mod manifest;
pub mod svg;
