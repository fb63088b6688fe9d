//! Desk-scale workbench for CO₂ storage in a faulted three-aquifer system:
//! hierarchical geomodel generation, immiscible two-phase flow simulation,
//! variance-based global sensitivity analysis, and pCN-within-Gibbs MCMC
//! data assimilation.

pub mod assimilate;
pub mod geomodel;
pub mod grid;
pub mod metrics;
pub mod rng;
pub mod sensitivity;
pub mod sim;
pub mod stats;
