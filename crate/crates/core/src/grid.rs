//! Structured-grid layout of the faulted three-aquifer system.
//!
//! The domain is a logically rectangular nx × ny × nz box with uniform cell
//! sizes. Cells are indexed x-fastest: `idx = x + nx·(y + ny·z)`, with z = 0
//! the deepest layer. Each cell carries exactly one region label; two
//! vertical one-cell-wide fault columns cut through every layer and are
//! split into a lower (target–middle) and an upper (middle–upper) segment,
//! each with its own permeability metaparameter.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Region label per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Target,
    Surround,
    Caprock,
    Middle,
    Upper,
    Fault1Tm,
    Fault1Mu,
    Fault2Tm,
    Fault2Mu,
    Overburden,
    Underburden,
}

impl Region {
    pub fn is_fault(self) -> bool {
        matches!(self, Region::Fault1Tm | Region::Fault1Mu | Region::Fault2Tm | Region::Fault2Mu)
    }

    pub fn is_aquifer(self) -> bool {
        matches!(self, Region::Target | Region::Middle | Region::Upper)
    }

    /// Cells that enter error metrics and the domain of interest proper:
    /// the three aquifers and the faults, but not inter-aquifer caprock.
    pub fn in_error_mask(self) -> bool {
        self.is_aquifer() || self.is_fault()
    }
}

/// A vertical well: areal position plus the list of completed cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Well {
    pub name: String,
    pub i: usize,
    pub j: usize,
    pub completions: Vec<usize>,
}

/// Axis-aligned cell-index box, half-open on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBox {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
    pub z0: usize,
    pub z1: usize,
}

impl GridBox {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.x1 - self.x0, self.y1 - self.y0, self.z1 - self.z0)
    }

    pub fn n_cells(&self) -> usize {
        let (nx, ny, nz) = self.dims();
        nx * ny * nz
    }

    pub fn contains(&self, x: usize, y: usize, z: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1 && z >= self.z0 && z < self.z1
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LayoutError {
    #[error("grid has no cells")]
    Empty,
    #[error("fault column at x={x} does not span all aquifer and caprock layers")]
    FaultSpan { x: usize },
    #[error("target-aquifer cells do not form a contiguous box")]
    TargetNotBox,
    #[error("well `{name}` completion {cell} outside grid")]
    WellOutsideGrid { name: String, cell: usize },
}

/// Grid geometry, region labels, depths and well placement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridLayout {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    /// Region label per cell, x-fastest ordering.
    pub regions: Vec<Region>,
    /// Cell-center depth (m, positive downward), per cell.
    pub depth: Vec<f64>,
    pub injectors: Vec<Well>,
    pub observers: Vec<Well>,
}

impl GridLayout {
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn cell(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny && z < self.nz);
        x + self.nx * (y + self.ny * z)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let x = idx % self.nx;
        let y = (idx / self.nx) % self.ny;
        let z = idx / (self.nx * self.ny);
        (x, y, z)
    }

    pub fn bulk_volume(&self) -> f64 {
        self.dx * self.dy * self.dz
    }

    pub fn region(&self, idx: usize) -> Region {
        self.regions[idx]
    }

    pub fn cells_in_region(&self, region: Region) -> Vec<usize> {
        (0..self.n_cells()).filter(|&i| self.regions[i] == region).collect()
    }

    pub fn target_cells(&self) -> Vec<usize> {
        self.cells_in_region(Region::Target)
    }

    /// Bounding box of the target-aquifer cells.
    pub fn target_box(&self) -> GridBox {
        self.region_bounding_box(|r| r == Region::Target)
    }

    fn region_bounding_box(&self, pred: impl Fn(Region) -> bool) -> GridBox {
        let (mut x0, mut y0, mut z0) = (usize::MAX, usize::MAX, usize::MAX);
        let (mut x1, mut y1, mut z1) = (0usize, 0usize, 0usize);
        for idx in 0..self.n_cells() {
            if pred(self.regions[idx]) {
                let (x, y, z) = self.coords(idx);
                x0 = x0.min(x);
                y0 = y0.min(y);
                z0 = z0.min(z);
                x1 = x1.max(x + 1);
                y1 = y1.max(y + 1);
                z1 = z1.max(z + 1);
            }
        }
        assert!(x0 < x1, "empty region box");
        GridBox { x0, x1, y0, y1, z0, z1 }
    }

    /// Domain of interest: the box covering the three aquifers, which also
    /// contains the fault segments between them and the inter-aquifer
    /// caprock. Overburden, underburden and the surrounding region fall
    /// outside, as do fault cells above the upper aquifer.
    pub fn domain_of_interest(&self) -> GridBox {
        self.region_bounding_box(|r| r.is_aquifer())
    }

    /// Validates construction invariants.
    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.n_cells() == 0 {
            return Err(LayoutError::Empty);
        }
        // Fault columns must span every aquifer and caprock layer.
        let aquifer_layers: Vec<usize> = (0..self.nz)
            .filter(|&z| {
                (0..self.nx * self.ny).any(|a| {
                    let r = self.regions[a + z * self.nx * self.ny];
                    r.is_aquifer() || r == Region::Caprock
                })
            })
            .collect();
        let fault_columns: Vec<(usize, usize)> = (0..self.nx)
            .flat_map(|x| (0..self.ny).map(move |y| (x, y)))
            .filter(|&(x, y)| (0..self.nz).any(|z| self.regions[self.cell(x, y, z)].is_fault()))
            .collect();
        for &(x, y) in &fault_columns {
            for &z in &aquifer_layers {
                if !self.regions[self.cell(x, y, z)].is_fault() {
                    return Err(LayoutError::FaultSpan { x });
                }
            }
        }
        // Target cells form a contiguous box (minus fault columns that cut it).
        let tbox = self.target_box();
        for idx in 0..self.n_cells() {
            let (x, y, z) = self.coords(idx);
            let inside = tbox.contains(x, y, z);
            let r = self.regions[idx];
            if inside && !(r == Region::Target || r.is_fault()) {
                return Err(LayoutError::TargetNotBox);
            }
            if !inside && r == Region::Target {
                return Err(LayoutError::TargetNotBox);
            }
        }
        for w in self.injectors.iter().chain(self.observers.iter()) {
            for &c in &w.completions {
                if c >= self.n_cells() {
                    return Err(LayoutError::WellOutsideGrid { name: w.name.clone(), cell: c });
                }
            }
        }
        Ok(())
    }

    /// Mirror image about the x mid-plane: regions, depths and wells all map
    /// x → nx−1−x. Used by the flow-symmetry checks.
    pub fn mirrored_x(&self) -> GridLayout {
        let mut out = self.clone();
        for z in 0..self.nz {
            for y in 0..self.ny {
                for x in 0..self.nx {
                    let src = self.cell(x, y, z);
                    let dst = self.cell(self.nx - 1 - x, y, z);
                    out.regions[dst] = self.regions[src];
                    out.depth[dst] = self.depth[src];
                }
            }
        }
        let mirror_well = |w: &Well| Well {
            name: w.name.clone(),
            i: self.nx - 1 - w.i,
            j: w.j,
            completions: w
                .completions
                .iter()
                .map(|&c| {
                    let (x, y, z) = self.coords(c);
                    self.cell(self.nx - 1 - x, y, z)
                })
                .collect(),
        };
        out.injectors = self.injectors.iter().map(mirror_well).collect();
        out.observers = self.observers.iter().map(mirror_well).collect();
        out
    }
}

/// Mirrors a per-cell field about the x mid-plane of `layout`.
pub fn mirror_field_x(layout: &GridLayout, field: &[f64]) -> Vec<f64> {
    assert_eq!(field.len(), layout.n_cells());
    let mut out = vec![0.0; field.len()];
    for z in 0..layout.nz {
        for y in 0..layout.ny {
            for x in 0..layout.nx {
                out[layout.cell(layout.nx - 1 - x, y, z)] = field[layout.cell(x, y, z)];
            }
        }
    }
    out
}

/// Parameters of the desk-scale layout builder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeskLayoutConfig {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    /// Layer counts from the bottom up.
    pub target_layers: usize,
    pub middle_layers: usize,
    pub upper_layers: usize,
    /// x indices of the two fault columns.
    pub fault1_x: usize,
    pub fault2_x: usize,
    /// Depth (m) of the deepest layer's cell center.
    pub bottom_depth: f64,
    /// Injector areal positions (i, j).
    pub injectors: Vec<(usize, usize)>,
    /// Observation-well areal positions (i, j).
    pub observers: Vec<(usize, usize)>,
}

impl Default for DeskLayoutConfig {
    fn default() -> Self {
        Self {
            nx: 16,
            ny: 16,
            dx: 200.0,
            dy: 200.0,
            dz: 20.0,
            target_layers: 5,
            middle_layers: 2,
            upper_layers: 2,
            fault1_x: 5,
            fault2_x: 10,
            bottom_depth: 1940.0,
            injectors: vec![(2, 8), (13, 8)],
            observers: vec![(4, 8), (11, 8), (7, 6)],
        }
    }
}

/// Builds the desk-scale three-aquifer layout: target aquifer at the bottom,
/// a caprock layer, the middle aquifer, a second caprock layer, the upper
/// aquifer and one overburden (buffer) layer on top. Two vertical fault
/// columns cut all layers; their lower segment (through the middle aquifer)
/// carries the target–middle permeability, the rest the middle–upper one.
pub fn desk_layout(cfg: &DeskLayoutConfig) -> Arc<GridLayout> {
    let nz = cfg.target_layers + 1 + cfg.middle_layers + 1 + cfg.upper_layers + 1;
    let n = cfg.nx * cfg.ny * nz;

    let target_top = cfg.target_layers; // first caprock layer index
    let middle_base = target_top + 1;
    let middle_top = middle_base + cfg.middle_layers; // second caprock layer index
    let upper_base = middle_top + 1;
    let upper_top = upper_base + cfg.upper_layers; // overburden layer index

    let mut regions = vec![Region::Overburden; n];
    let mut depth = vec![0.0; n];
    let cell = |x: usize, y: usize, z: usize| x + cfg.nx * (y + cfg.ny * z);

    for z in 0..nz {
        let layer_region = if z < target_top {
            Region::Target
        } else if z == target_top || z == middle_top {
            Region::Caprock
        } else if z < middle_top {
            Region::Middle
        } else if z < upper_top {
            Region::Upper
        } else {
            Region::Overburden
        };
        let layer_depth = cfg.bottom_depth - z as f64 * cfg.dz;
        // Faults span the aquifer and caprock layers and stop just below the
        // overburden.
        let in_fault_span = z < upper_top;
        for y in 0..cfg.ny {
            for x in 0..cfg.nx {
                let idx = cell(x, y, z);
                depth[idx] = layer_depth;
                regions[idx] = if in_fault_span && x == cfg.fault1_x {
                    if z < middle_top {
                        Region::Fault1Tm
                    } else {
                        Region::Fault1Mu
                    }
                } else if in_fault_span && x == cfg.fault2_x {
                    if z < middle_top {
                        Region::Fault2Tm
                    } else {
                        Region::Fault2Mu
                    }
                } else {
                    layer_region
                };
            }
        }
    }

    let target_completions = |i: usize, j: usize| -> Vec<usize> {
        (0..cfg.target_layers).map(|z| cell(i, j, z)).collect()
    };
    let injectors = cfg
        .injectors
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| Well {
            name: format!("I{}", k + 1),
            i,
            j,
            completions: target_completions(i, j),
        })
        .collect();
    // Observation wells are completed over every aquifer layer; monitoring
    // strategies later select which layers are actually read.
    let aquifer_completions = |i: usize, j: usize| -> Vec<usize> {
        (0..nz)
            .filter(|&z| {
                z < target_top || (z >= middle_base && z < middle_top) || (z >= upper_base && z < upper_top)
            })
            .map(|z| cell(i, j, z))
            .collect()
    };
    let observers = cfg
        .observers
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| Well {
            name: format!("O{}", k + 1),
            i,
            j,
            completions: aquifer_completions(i, j),
        })
        .collect();

    let layout = GridLayout {
        nx: cfg.nx,
        ny: cfg.ny,
        nz,
        dx: cfg.dx,
        dy: cfg.dy,
        dz: cfg.dz,
        regions,
        depth,
        injectors,
        observers,
    };
    layout.validate().expect("desk layout violates its own invariants");
    Arc::new(layout)
}

/// A 1D horizontal column of target-aquifer cells, used by the
/// fractional-flow verification problems.
pub fn column_layout(nx: usize, dx: f64, dy: f64, dz: f64, depth: f64) -> Arc<GridLayout> {
    let layout = GridLayout {
        nx,
        ny: 1,
        nz: 1,
        dx,
        dy,
        dz,
        regions: vec![Region::Target; nx],
        depth: vec![depth; nx],
        injectors: vec![Well { name: "I1".into(), i: 0, j: 0, completions: vec![0] }],
        observers: vec![],
    };
    Arc::new(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_layout_regions_and_counts() {
        let layout = desk_layout(&DeskLayoutConfig::default());
        assert_eq!((layout.nx, layout.ny, layout.nz), (16, 16, 12));
        // Every non-fault column is Target over the bottom five layers.
        assert_eq!(layout.region(layout.cell(0, 0, 0)), Region::Target);
        assert_eq!(layout.region(layout.cell(0, 0, 4)), Region::Target);
        assert_eq!(layout.region(layout.cell(0, 0, 5)), Region::Caprock);
        assert_eq!(layout.region(layout.cell(0, 0, 6)), Region::Middle);
        assert_eq!(layout.region(layout.cell(0, 0, 8)), Region::Caprock);
        assert_eq!(layout.region(layout.cell(0, 0, 9)), Region::Upper);
        assert_eq!(layout.region(layout.cell(0, 0, 11)), Region::Overburden);
        // Fault columns carry the segment labels through all layers.
        assert_eq!(layout.region(layout.cell(5, 3, 0)), Region::Fault1Tm);
        assert_eq!(layout.region(layout.cell(5, 3, 7)), Region::Fault1Tm);
        assert_eq!(layout.region(layout.cell(5, 3, 8)), Region::Fault1Mu);
        assert_eq!(layout.region(layout.cell(5, 3, 10)), Region::Fault1Mu);
        // Faults stop below the overburden buffer layer.
        assert_eq!(layout.region(layout.cell(10, 3, 11)), Region::Overburden);
        // Target cell count: 16 × 16 × 5 minus the two fault columns.
        let n_target = layout.target_cells().len();
        assert_eq!(n_target, (16 * 16 - 2 * 16) * 5);
        layout.validate().unwrap();
    }

    #[test]
    fn domain_of_interest_covers_aquifers_and_interaquifer_caprock() {
        let layout = desk_layout(&DeskLayoutConfig::default());
        let doi = layout.domain_of_interest();
        assert_eq!(doi.dims(), (16, 16, 11));
        assert_eq!(doi.n_cells(), 16 * 16 * 11);
    }

    #[test]
    fn mirror_is_involutive_and_maps_faults() {
        let layout = desk_layout(&DeskLayoutConfig::default());
        let mirrored = layout.mirrored_x();
        assert_eq!(mirrored.region(mirrored.cell(10, 3, 0)), Region::Fault1Tm);
        assert_eq!(mirrored.region(mirrored.cell(5, 3, 0)), Region::Fault2Tm);
        let twice = mirrored.mirrored_x();
        assert_eq!(twice.regions, layout.regions);
        assert_eq!(twice.injectors[0].completions, layout.injectors[0].completions);
    }

    #[test]
    fn depth_decreases_upward() {
        let layout = desk_layout(&DeskLayoutConfig::default());
        let deep = layout.depth[layout.cell(3, 3, 0)];
        let shallow = layout.depth[layout.cell(3, 3, 11)];
        assert!(deep > shallow);
        assert_eq!(deep - shallow, 11.0 * 20.0);
    }
}
