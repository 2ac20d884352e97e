//! Exact oriented-matroid engine: chirotopes, cocircuits, cocircuit graphs,
//! single-element extensions and diameter bounds.

pub mod bounds;
pub mod chirotope;
pub mod combi;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod extension;
pub mod graph;
pub mod matroid;
pub mod properties;
pub mod sign;

pub use chirotope::{Chirotope, VectorConfiguration};
pub use error::{Error, Result};
pub use graph::{CocircuitGraph, DiameterReport};
pub use matroid::{AxiomReport, OrientedMatroid};
pub use sign::{ElementSet, Sign, SignVector};
