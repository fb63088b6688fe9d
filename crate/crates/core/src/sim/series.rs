//! Field snapshots over time, domain-of-interest restriction and the CO₂
//! mass-balance audit.

use super::{SimConfig, SECONDS_PER_YEAR};
use crate::geomodel::Realization;
use crate::grid::{GridBox, GridLayout};
use serde::{Deserialize, Serialize};

/// Pressure and saturation snapshots at a fixed list of report times. The
/// box records which part of the full grid the snapshots cover; cell values
/// are stored x-fastest within the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSeries {
    pub grid_box: GridBox,
    /// Report times (years).
    pub times: Vec<f64>,
    /// One pressure snapshot (Pa) per report time.
    pub pressure: Vec<Vec<f64>>,
    /// One CO₂-saturation snapshot per report time.
    pub saturation: Vec<Vec<f64>>,
}

impl FieldSeries {
    pub fn dims(&self) -> (usize, usize, usize) {
        self.grid_box.dims()
    }

    pub fn n_cells(&self) -> usize {
        self.grid_box.n_cells()
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    /// Index of a cell inside this series' box, given full-grid coordinates.
    pub fn box_index(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(self.grid_box.contains(x, y, z));
        let (bnx, bny, _) = self.dims();
        (x - self.grid_box.x0) + bnx * ((y - self.grid_box.y0) + bny * (z - self.grid_box.z0))
    }
}

/// Restricts snapshots to the domain of interest of `layout`, preserving
/// times. If the domain equals the series box this is the identity.
pub fn extract_domain(series: &FieldSeries, layout: &GridLayout) -> FieldSeries {
    let doi = layout.domain_of_interest();
    if doi == series.grid_box {
        return series.clone();
    }
    let restrict = |snap: &Vec<f64>| -> Vec<f64> {
        let mut out = Vec::with_capacity(doi.n_cells());
        for z in doi.z0..doi.z1 {
            for y in doi.y0..doi.y1 {
                for x in doi.x0..doi.x1 {
                    out.push(snap[series.box_index(x, y, z)]);
                }
            }
        }
        out
    };
    FieldSeries {
        grid_box: doi,
        times: series.times.clone(),
        pressure: series.pressure.iter().map(restrict).collect(),
        saturation: series.saturation.iter().map(restrict).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct MassBalanceReport {
    pub times: Vec<f64>,
    /// |stored − injected| / injected per report time (0/0 defined as 0).
    pub relative_errors: Vec<f64>,
    pub stored_mass: Vec<f64>,
    pub injected_mass: Vec<f64>,
}

impl MassBalanceReport {
    pub fn max_error(&self) -> f64 {
        self.relative_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Audits global CO₂ mass conservation: stored mass recomputed from the
/// snapshots against the analytic injected schedule.
pub fn mass_balance(series: &FieldSeries, real: &Realization, cfg: &SimConfig) -> MassBalanceReport {
    let layout = &real.layout;
    assert_eq!(
        series.grid_box.dims(),
        (layout.nx, layout.ny, layout.nz),
        "mass balance needs full-grid snapshots"
    );
    let rho_g = cfg.co2_density_per_cell(layout);
    let cell_vol = layout.bulk_volume();
    let n_wells = layout.injectors.len() as f64;
    let p0: Vec<f64> = (0..layout.n_cells())
        .map(|i| cfg.p_datum + cfg.brine_density * super::GRAVITY * (layout.depth[i] - cfg.datum_depth))
        .collect();

    let mut report = MassBalanceReport {
        times: series.times.clone(),
        relative_errors: Vec::new(),
        stored_mass: Vec::new(),
        injected_mass: Vec::new(),
    };
    for (k, &t_years) in series.times.iter().enumerate() {
        let t = t_years.min(cfg.injection_years) * SECONDS_PER_YEAR;
        let injected = n_wells * cfg.well_rate_kg_per_s() * t;
        let terms: Vec<f64> = (0..layout.n_cells())
            .map(|i| {
                let pv = cell_vol
                    * real.phi[i]
                    * (1.0 + cfg.rock_compressibility * (series.pressure[k][i] - p0[i]));
                series.saturation[k][i] * pv * rho_g[i]
            })
            .collect();
        let stored = crate::stats::pairwise_sum(&terms);
        let err = if injected == 0.0 {
            if stored == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (stored - injected).abs() / injected
        };
        report.stored_mass.push(stored);
        report.injected_mass.push(injected);
        report.relative_errors.push(err);
    }
    report
}
