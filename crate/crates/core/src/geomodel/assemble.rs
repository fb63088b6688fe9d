//! Assembly of per-cell properties for the full domain from metaparameters
//! and the target-aquifer Gaussian field.

use super::prior::Metaparameters;
use super::{GaussField, GeomodelError};
use crate::grid::{GridLayout, Region};
use std::sync::Arc;

/// Fixed properties of the non-target regions: (permeability md, porosity,
/// anisotropy ratio).
const CAPROCK: (f64, f64, f64) = (1e-4, 0.01, 0.1);
const SURROUND: (f64, f64, f64) = (5.0, 0.05, 0.1);
const AQUIFER_POROSITY: f64 = 0.3;
const AQUIFER_ANISOTROPY: f64 = 0.1;
const FAULT_POROSITY: f64 = 0.2;

/// Per-cell rock properties for the full grid plus the generating
/// parameters.
#[derive(Debug, Clone)]
pub struct Realization {
    pub layout: Arc<GridLayout>,
    /// Horizontal permeability (md).
    pub kx: Vec<f64>,
    /// Vertical permeability (md).
    pub kz: Vec<f64>,
    /// Porosity (fraction).
    pub phi: Vec<f64>,
    pub meta: Metaparameters,
    pub xi: Vec<f64>,
}

impl Realization {
    /// Mirrors the realization (and its layout) about the x mid-plane.
    pub fn mirrored_x(&self) -> Realization {
        let layout = Arc::new(self.layout.mirrored_x());
        Realization {
            kx: crate::grid::mirror_field_x(&self.layout, &self.kx),
            kz: crate::grid::mirror_field_x(&self.layout, &self.kz),
            phi: crate::grid::mirror_field_x(&self.layout, &self.phi),
            layout,
            meta: self.meta,
            xi: self.xi.clone(),
        }
    }
}

/// Populates the full grid: target cells from the Gaussian field shifted and
/// rescaled by the metaparameters, fault columns from the four fault
/// permeabilities, and constants elsewhere.
///
/// `field` must be given over the target cells in ascending grid order (the
/// order produced by `GridLayout::target_cells` and used by the PCA basis).
pub fn assemble_realization(
    meta: &Metaparameters,
    field: &GaussField,
    layout: &Arc<GridLayout>,
) -> Result<Realization, GeomodelError> {
    let target = layout.target_cells();
    if field.len() != target.len() {
        return Err(GeomodelError::FieldLengthMismatch { got: field.len(), expected: target.len() });
    }
    let n = layout.n_cells();
    let mut kx = vec![0.0; n];
    let mut kz = vec![0.0; n];
    let mut phi = vec![0.0; n];

    let ar = meta.anisotropy_ratio();
    let kf = |log10_k: f64| 10f64.powf(log10_k);

    for idx in 0..n {
        let (k, p, a) = match layout.region(idx) {
            Region::Target => (0.0, 0.0, 0.0), // filled below from the field
            Region::Surround => SURROUND,
            Region::Caprock | Region::Overburden | Region::Underburden => CAPROCK,
            Region::Middle => (meta.k_m, AQUIFER_POROSITY, AQUIFER_ANISOTROPY),
            Region::Upper => (meta.k_u, AQUIFER_POROSITY, AQUIFER_ANISOTROPY),
            Region::Fault1Tm => (kf(meta.log10_kf1_tm), FAULT_POROSITY, 1.0),
            Region::Fault1Mu => (kf(meta.log10_kf1_mu), FAULT_POROSITY, 1.0),
            Region::Fault2Tm => (kf(meta.log10_kf2_tm), FAULT_POROSITY, 1.0),
            Region::Fault2Mu => (kf(meta.log10_kf2_mu), FAULT_POROSITY, 1.0),
        };
        kx[idx] = k;
        kz[idx] = a * k;
        phi[idx] = p;
    }

    for (&cell, &y) in target.iter().zip(field.iter()) {
        let logk = meta.sigma_logk * y + meta.mu_logk;
        let k = logk.exp();
        kx[cell] = k;
        kz[cell] = ar * k;
        phi[cell] = meta.d * logk + meta.e;
    }

    for (cell, &p) in phi.iter().enumerate() {
        if !(p > 0.0 && p < 1.0) {
            return Err(GeomodelError::PorosityOutOfRange { cell, value: p });
        }
    }

    Ok(Realization { layout: Arc::clone(layout), kx, kz, phi, meta: *meta, xi: Vec::new() })
}
