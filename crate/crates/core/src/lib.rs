//! Exact computations with K-weighted fans and polyhedral complexes.

pub mod lattice;
pub mod polyhedral;
pub mod kweight;
pub mod torick;
pub mod project;
pub mod hyperdual;
pub mod cli;
