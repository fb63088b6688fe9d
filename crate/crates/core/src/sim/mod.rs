//! Desk-scale immiscible two-phase (CO₂/brine) finite-volume simulator.
//!
//! Implicit-pressure, explicit-saturation marching on the structured grid:
//! two-point flux approximation with harmonic inter-cell permeability, rock
//! compressibility in the accumulation term, gravity through phase-density
//! differences, and upwinded Corey mobilities. CO₂ mass is the transported
//! primary variable, so the discrete update conserves injected mass to
//! roundoff by construction.

mod impes;
mod relperm;
mod series;
mod solver;

pub use impes::{init_state, simulate, SimState};
pub use relperm::CoreyParams;
pub use series::{extract_domain, mass_balance, FieldSeries, MassBalanceReport};
pub use solver::{FaceSystem, SolveFailure};

use crate::grid::{GridLayout, Region};
use serde::{Deserialize, Serialize};

pub const MD_TO_M2: f64 = 9.869233e-16;
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86400.0;
pub const KG_PER_MT: f64 = 1e9;
pub const GRAVITY: f64 = 9.81;

/// Constant CO₂ density per vertical zone (kg/m³). The injected phase is
/// supercritical in the target and middle aquifers and gas-like above the
/// upper-aquifer base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Co2Density {
    pub target_zone: f64,
    pub middle_zone: f64,
    pub upper_zone: f64,
}

impl Default for Co2Density {
    fn default() -> Self {
        Self { target_zone: 624.0, middle_zone: 612.0, upper_zone: 128.0 }
    }
}

/// Fixed-volumetric-rate production well (reservoir m³/s), used by the
/// verification columns to hold the total flux constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Producer {
    pub cell: usize,
    pub volume_rate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// Snapshot times (years), strictly increasing, last one equal to the
    /// injection duration.
    pub report_times_years: Vec<f64>,
    pub injection_years: f64,
    /// CO₂ mass rate per injection well (Mt/yr).
    pub well_rate_mt_per_year: f64,
    pub co2_density: Co2Density,
    pub brine_density: f64,
    /// Brine viscosity (Pa·s).
    pub mu_brine: f64,
    /// CO₂ viscosity (Pa·s).
    pub mu_co2: f64,
    pub corey: CoreyParams,
    /// Effective rock compressibility (Pa⁻¹).
    pub rock_compressibility: f64,
    pub gravity: bool,
    /// CFL number for the explicit saturation sub-steps, in (0, 1].
    pub max_cfl: f64,
    /// Initial pressure (Pa) at `datum_depth` (m); the rest of the column is
    /// brine-hydrostatic.
    pub p_datum: f64,
    pub datum_depth: f64,
    pub producers: Vec<Producer>,
    pub dt_init_years: f64,
    pub dt_max_years: f64,
    pub dt_growth: f64,
    /// Cap on saturation sub-steps within one pressure step.
    pub max_substeps_per_step: usize,
    pub solver_rel_tol: f64,
    pub solver_max_iter_factor: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            report_times_years: vec![2.0, 6.0, 10.0, 14.0, 20.0],
            injection_years: 20.0,
            well_rate_mt_per_year: 0.05,
            co2_density: Co2Density::default(),
            brine_density: 1000.0,
            mu_brine: 5e-4,
            mu_co2: 6e-5,
            corey: CoreyParams::default(),
            rock_compressibility: crate::geomodel::effective_compressibility(
                &crate::geomodel::GeomechConstants::standard(),
            ),
            gravity: true,
            max_cfl: 0.5,
            p_datum: 18e6,
            datum_depth: 1880.0,
            producers: Vec::new(),
            dt_init_years: 0.01,
            dt_max_years: 0.25,
            dt_growth: 1.4,
            max_substeps_per_step: 20_000,
            solver_rel_tol: 1e-12,
            solver_max_iter_factor: 60,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulator configuration: {0}")]
    InvalidConfig(String),
    #[error("injector `{name}` completion {cell} is not a target-aquifer cell")]
    WellOutsideTarget { name: String, cell: usize },
    #[error(transparent)]
    PressureSolve(#[from] SolveFailure),
    #[error("saturation sub-step count {count} exceeded the cap {cap}")]
    SubStepCap { count: usize, cap: usize },
    #[error("saturation {value} outside [0, 1] at cell {cell}")]
    SaturationOutOfBounds { cell: usize, value: f64 },
}

impl SimConfig {
    pub fn validate(&self, layout: &GridLayout) -> Result<(), SimError> {
        if self.report_times_years.is_empty() {
            return Err(SimError::InvalidConfig("no report times".into()));
        }
        if !self.report_times_years.windows(2).all(|w| w[0] < w[1]) {
            return Err(SimError::InvalidConfig("report times not strictly increasing".into()));
        }
        let last = *self.report_times_years.last().unwrap();
        if (last - self.injection_years).abs() > 1e-9 {
            return Err(SimError::InvalidConfig(format!(
                "last report time {last} must equal injection duration {}",
                self.injection_years
            )));
        }
        if self.report_times_years[0] <= 0.0 {
            return Err(SimError::InvalidConfig("report times must be positive".into()));
        }
        if !(self.max_cfl > 0.0 && self.max_cfl <= 1.0) {
            return Err(SimError::InvalidConfig(format!("CFL {} outside (0, 1]", self.max_cfl)));
        }
        if !self.corey.validate() {
            return Err(SimError::InvalidConfig("invalid Corey parameters".into()));
        }
        if !(self.rock_compressibility > 0.0) {
            return Err(SimError::InvalidConfig("rock compressibility must be positive".into()));
        }
        for w in &layout.injectors {
            for &c in &w.completions {
                if layout.region(c) != Region::Target {
                    return Err(SimError::WellOutsideTarget { name: w.name.clone(), cell: c });
                }
            }
        }
        Ok(())
    }

    /// CO₂ density per cell: the zone boundaries are the base layers of the
    /// middle and upper aquifers; below them the denser supercritical
    /// values apply.
    pub fn co2_density_per_cell(&self, layout: &GridLayout) -> Vec<f64> {
        let min_z = |region: Region| -> Option<usize> {
            (0..layout.n_cells())
                .filter(|&i| layout.region(i) == region)
                .map(|i| layout.coords(i).2)
                .min()
        };
        let middle_base = min_z(Region::Middle);
        let upper_base = min_z(Region::Upper);
        (0..layout.n_cells())
            .map(|i| {
                let z = layout.coords(i).2;
                match (middle_base, upper_base) {
                    (Some(mb), Some(ub)) => {
                        if z < mb {
                            self.co2_density.target_zone
                        } else if z < ub {
                            self.co2_density.middle_zone
                        } else {
                            self.co2_density.upper_zone
                        }
                    }
                    _ => self.co2_density.target_zone,
                }
            })
            .collect()
    }

    pub fn well_rate_kg_per_s(&self) -> f64 {
        self.well_rate_mt_per_year * KG_PER_MT / SECONDS_PER_YEAR
    }
}
