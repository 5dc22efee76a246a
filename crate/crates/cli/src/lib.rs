//! Experiment driver for the cluster-state / Ising workspace: JSON-configured
//! runs, deterministic CSV artifacts with manifests, and a small SVG renderer
//! for the paired order-parameter plots.

pub mod config;
pub mod csvfmt;
pub mod manifest;
pub mod runner;
pub mod svg;
