//! Hierarchical geomodel generation.
//!
//! A realization of the faulted three-aquifer system is assembled in two
//! stages: scenario-level metaparameters (means, spreads, fault and aquifer
//! permeabilities) are drawn from their prior intervals, then the detailed
//! target-aquifer heterogeneity is produced from a PCA basis of spatially
//! correlated Gaussian fields and shifted/rescaled by the metaparameters.

mod assemble;
mod field;
mod geomech;
mod prior;

pub use assemble::{assemble_realization, Realization};
pub use field::{build_covariance, build_pca_basis, CovarianceMatrix, GaussField, ModeSelection, PcaBasis};
pub use geomech::{effective_compressibility, GeomechConstants, PA_PER_PSI};
pub use prior::{sample_metaparameters, Metaparameters, ParamPrior, PriorScale, PriorSpec, META_NAMES, N_META};

#[derive(Debug, thiserror::Error)]
pub enum GeomodelError {
    #[error("prior has lower bound {lo} above upper bound {hi} for `{name}`")]
    InvalidPrior { name: &'static str, lo: f64, hi: f64 },
    #[error("correlation length must be positive, got {0}")]
    NonPositiveCorrelationLength(f64),
    #[error("covariance factorization failed: matrix not positive semi-definite within tolerance")]
    CovarianceNotPsd,
    #[error("latent vector has length {got}, basis has {expected} modes")]
    LatentLengthMismatch { got: usize, expected: usize },
    #[error("field has length {got}, expected {expected} target cells")]
    FieldLengthMismatch { got: usize, expected: usize },
    #[error("porosity {value} outside (0, 1) at cell {cell}; check prior configuration")]
    PorosityOutOfRange { cell: usize, value: f64 },
    #[error("mode count {requested} must be below construction count {n_construct}")]
    TooManyModes { requested: usize, n_construct: usize },
}
