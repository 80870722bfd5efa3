//! Product-extremal (s,q)-multigraphs: exact search, symmetrization,
//! vertex-weighted quotients, certified numeric bounds and container
//! hypergraph statistics.
//!
//! Vertices are 0-based throughout.

pub mod analysis;
pub mod containers;
pub mod error;
pub mod multigraph;
pub mod product;
pub mod quotient;
pub mod search;
pub mod subsets;
pub mod symmetry;

pub use analysis::CertifiedScalar;
pub use error::{Error, Result};
pub use multigraph::Multigraph;
pub use product::{PrimePower, ProductValue};

/// Library version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
