//! Hierarchical MCMC data assimilation.
