//! Positional games on hypergraphs built from combinatorial designs.

pub mod designs;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod scoring;
pub mod solver;
pub mod strategies;

pub use error::{Error, Result};
