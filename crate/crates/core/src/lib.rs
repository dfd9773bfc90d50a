//! Spectral-gap lower bounds for strongly convex subgraphs of invariant
//! homogeneous graphs and for stoquastic Hamiltonians `H = L + W`.

pub mod bounds;
pub mod certify;
pub mod config;
pub mod graphs;
pub mod groups;
pub mod heat;
mod jacobi;
pub mod moduli;
pub mod operators;

pub use config::Tolerances;
