//! Numerical toolkit for bipartite separability: density matrices, the
//! Fano/Bloch expansion and Hilbert–Schmidt correlation measures, vertex
//! polytopes of states with the `Λ∘τ` map, and separability tests built on
//! invariant polytopes, segments and entropies.

pub mod cli;
pub mod error;
pub mod families;
pub mod fano;
pub mod geometry;
pub mod json;
pub mod report;
pub mod separability;
pub mod state;
pub mod tolerance;

pub use error::{Error, Result};
pub use fano::{fano_decompose, fano_reconstruct, sm_measure, FanoDecomposition};
pub use geometry::{FactorPolytope, HullCertificate, ProductPolytope, VertexSet};
pub use num_complex::Complex64;
pub use separability::{ScanVerdict, SegmentScanReport, SeparableDecomposition};
pub use state::{ComplexMatrix, ComplexVector, DensityMatrix, Subsystem};
pub use tolerance::Tolerances;
