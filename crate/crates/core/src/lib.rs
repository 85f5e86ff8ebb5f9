//! Signal processing on hypergraphs represented by super-symmetric tensors.

pub mod apps;
pub mod error;
pub mod filters;
pub mod hypergraph;
pub mod io;
pub mod sampling;
pub mod spectrum;
pub mod symtensor;

#[cfg(test)]
mod testutil;

pub use error::{HgspError, Result};
pub use filters::PolySpec;
pub use hypergraph::{adjacency_tensor, laplacian_tensor, Hypergraph};
pub use sampling::SamplingPlan;
pub use spectrum::{decompose, DecomposeOptions, Spectrum};
pub use symtensor::{DenseTensor, Signal, SymTensor};
