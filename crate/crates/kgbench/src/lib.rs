//! Std companion to `kgbench-core`: snapshots, file formats, multi-threaded
//! walks, the HTTP tool service and the `kgbench` command line.

pub mod cli;
pub mod corpus;
pub mod formats;
pub mod parallel;
pub mod server;
pub mod snapshot;

pub use kgbench_core as core;
