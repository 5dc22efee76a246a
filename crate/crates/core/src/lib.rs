//! Core library for the `clusterpeierls` tool: a dense statevector engine
//! for measurement-based computation on cluster states, a Metropolis sampler
//! for classical Ising lattices, and the bookkeeping that maps one onto the
//! other (entanglement as energy, measurement choices as entropy, inverse
//! time as temperature).

pub mod analogy;
pub mod entanglement;
pub mod graphgen;
pub mod ising;
pub mod mbqc;
pub mod qsim;
