//! Self-avoiding walks on infinite cubic graphs, checked at finite scale.
//!
//! Graph balls carry per-vertex completeness flags so that every count and
//! every injection check refuses to silently run off the truncation.

pub mod error;
pub mod fisher;
pub mod graph;
pub mod grigorchuk;
pub mod height;
pub mod lattices;
pub mod saw;
pub mod tlf;

pub use error::{Error, Result};
pub use graph::{GraphBall, VertexId};

/// Golden mean.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Vertex cap read from `SAW_LAB_MAX_VERTICES`, default 20 million.
pub fn max_vertices() -> usize {
    std::env::var("SAW_LAB_MAX_VERTICES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(20_000_000)
}
