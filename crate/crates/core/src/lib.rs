//! Additive spanners, emulators and lower-bound instances for unweighted
//! graphs, with exact auditing tools.

pub mod baseline;
pub mod cluster;
pub mod distortion;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod paths;
pub mod preserver;

pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, Vertex, Weight};
pub mod emulator;
pub mod schedule;
pub mod spanner;
pub mod sparsify;
pub mod convex;
pub mod lower_bound;
pub mod audit;
