//! Core algorithms for building multi-document benchmarks from a corpus of
//! papers.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`graph`]: every paper becomes a title node linked to its key-information
//!    nodes (background, tags, datasets, figures, ...).
//! 2. [`merge`]: same-kind key-information nodes whose embeddings are close are
//!    collapsed into canonical nodes, so papers that share a dataset or a tag
//!    become connected.
//! 3. [`orwas`]: stratified, biased random walks over the merged graph surface
//!    sets of papers that share key-information nodes; the sets are enumerated
//!    under hard caps and ranked.
//! 4. [`taskgen`]: ranked paper sets are routed to task families and emitted as
//!    bundles for an external question generator.
//!
//! [`retrieval`] and [`metrics`] hold the agent-facing search index and the
//! objective scorers used when evaluating against the resulting benchmark.
//!
//! The crate is `no_std` and only needs `alloc`. IO, threads, clocks and the
//! network live in the `kgbench` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod graph;
pub mod hnsw;
pub mod kind;
pub mod merge;
pub mod metrics;
pub mod orwas;
pub mod record;
pub mod retrieval;
pub mod stats;
pub mod synth;
pub mod taskgen;
pub mod vector;

pub use graph::{FrozenGraph, GraphError, KnowledgeGraph, Node, NodeId, NodeOrigin, PaperId};
pub use kind::{Modality, NodeKind};
pub use record::{Attachment, NodeRecord};
