//! Variational ground-state search for Heisenberg antiferromagnets on small lattices.

pub mod analysis;
pub mod ansatz;
pub mod circuit;
pub mod cli;
pub mod engine;
pub mod exact;
pub mod format;
pub mod lattice;
pub mod pauli;
pub mod plot;
pub mod vqe;
