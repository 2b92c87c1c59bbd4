//! Reconstruction of the AS-level Internet graph from BGP routing tables,
//! with per-country connectivity metrics and routing event statistics.

pub mod events;
pub mod graph;
pub mod ingest;
pub mod metrics;
