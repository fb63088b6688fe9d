//! The IMPES march: implicit pressure, explicit CO₂-mass transport.

use super::solver::FaceSystem;
use super::{series::FieldSeries, SimConfig, SimError, GRAVITY, MD_TO_M2, SECONDS_PER_YEAR};
use crate::geomodel::Realization;
use crate::grid::GridBox;

#[derive(Debug, Clone)]
pub struct SimState {
    /// Pressure (Pa) per cell.
    pub p: Vec<f64>,
    /// CO₂ saturation per cell.
    pub s: Vec<f64>,
    /// Elapsed time (s).
    pub time: f64,
    /// Cumulative injected CO₂ mass per injection well (kg).
    pub injected_mass: Vec<f64>,
}

/// Hydrostatic initial state: zero CO₂ everywhere, brine-hydrostatic
/// pressure anchored at the config datum.
pub fn init_state(real: &Realization, cfg: &SimConfig) -> Result<SimState, SimError> {
    cfg.validate(&real.layout)?;
    let layout = &real.layout;
    let p = (0..layout.n_cells())
        .map(|i| cfg.p_datum + cfg.brine_density * GRAVITY * (layout.depth[i] - cfg.datum_depth))
        .collect();
    Ok(SimState {
        p,
        s: vec![0.0; layout.n_cells()],
        time: 0.0,
        injected_mass: vec![0.0; layout.injectors.len()],
    })
}

/// Geometric transmissibilities (m³): harmonic permeability times face area
/// over distance, per interior face. Only interior faces exist, so no-flow
/// outer boundaries hold by construction.
struct Faces {
    tx: Vec<f64>,
    ty: Vec<f64>,
    tz: Vec<f64>,
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

fn build_faces(real: &Realization) -> Faces {
    let l = &real.layout;
    let (nx, ny, nz) = (l.nx, l.ny, l.nz);
    let mut tx = vec![0.0; (nx - 1).max(0) * ny * nz];
    let mut ty = vec![0.0; nx * ny.saturating_sub(1) * nz];
    let mut tz = vec![0.0; nx * ny * nz.saturating_sub(1)];
    let ax = l.dy * l.dz / l.dx;
    let ay = l.dx * l.dz / l.dy;
    let az = l.dx * l.dy / l.dz;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = l.cell(x, y, z);
                if x + 1 < nx {
                    let j = l.cell(x + 1, y, z);
                    tx[x + (nx - 1) * (y + ny * z)] = ax * harmonic(real.kx[i], real.kx[j]) * MD_TO_M2;
                }
                if y + 1 < ny {
                    let j = l.cell(x, y + 1, z);
                    ty[x + nx * (y + (ny - 1) * z)] = ay * harmonic(real.kx[i], real.kx[j]) * MD_TO_M2;
                }
                if z + 1 < nz {
                    let j = l.cell(x, y, z + 1);
                    tz[i] = az * harmonic(real.kz[i], real.kz[j]) * MD_TO_M2;
                }
            }
        }
    }
    Faces { tx, ty, tz }
}

/// Mass-rate allocation over injector completions, weighted by kx·dz.
fn well_allocations(real: &Realization, cfg: &SimConfig) -> Vec<(usize, f64)> {
    let rate = cfg.well_rate_kg_per_s();
    let mut alloc = Vec::new();
    for well in &real.layout.injectors {
        let weights: Vec<f64> = well.completions.iter().map(|&c| real.kx[c] * real.layout.dz).collect();
        let total: f64 = weights.iter().sum();
        for (&c, &w) in well.completions.iter().zip(&weights) {
            alloc.push((c, rate * w / total));
        }
    }
    alloc
}

/// One direction's face data prepared for transport: the fixed product
/// T·Δφ_g per face (left minus right), whose sign encodes the upwind side.
struct DirFluxes {
    drive: Vec<f64>,
}

pub fn simulate(real: &Realization, cfg: &SimConfig) -> Result<FieldSeries, SimError> {
    let mut state = init_state(real, cfg)?;
    let layout = &real.layout;
    let n = layout.n_cells();
    let (nx, ny, nz) = (layout.nx, layout.ny, layout.nz);
    let faces = build_faces(real);
    let rho_g = cfg.co2_density_per_cell(layout);
    let rho_w = cfg.brine_density;
    let alloc = well_allocations(real, cfg);
    let cell_vol = layout.bulk_volume();
    let p0 = state.p.clone();

    // Pore volume at pressure p: V·φ0·(1 + c·(p − p0)).
    let pv = |phi0: f64, p: f64, p_ref: f64| cell_vol * phi0 * (1.0 + cfg.rock_compressibility * (p - p_ref));

    let mut mass = vec![0.0; n]; // CO₂ mass per cell (kg)
    let mut p_new = state.p.clone();
    let mut series = FieldSeries {
        grid_box: GridBox { x0: 0, x1: nx, y0: 0, y1: ny, z0: 0, z1: nz },
        times: Vec::new(),
        pressure: Vec::new(),
        saturation: Vec::new(),
    };

    let t_end = cfg.injection_years * SECONDS_PER_YEAR;
    let report_times: Vec<f64> = cfg.report_times_years.iter().map(|t| t * SECONDS_PER_YEAR).collect();
    let mut next_report = 0usize;
    let mut dt = cfg.dt_init_years * SECONDS_PER_YEAR;
    let dt_max = cfg.dt_max_years * SECONDS_PER_YEAR;
    let g = if cfg.gravity { GRAVITY } else { 0.0 };

    let mut b = vec![0.0; n];
    let mut sys = FaceSystem {
        nx,
        ny,
        nz,
        cx: vec![0.0; faces.tx.len()],
        cy: vec![0.0; faces.ty.len()],
        cz: vec![0.0; faces.tz.len()],
        diag_extra: vec![0.0; n],
    };

    while state.time < t_end {
        // Clip the step so report times are hit exactly.
        let mut step_dt = dt.min(dt_max);
        let target = report_times[next_report];
        let mut hit_report = false;
        if state.time + step_dt >= target - 1e-9 {
            step_dt = target - state.time;
            hit_report = true;
        }

        // --- implicit pressure ---------------------------------------
        let lam = |kr: f64, mu: f64| kr / mu;
        let fill_dir = |len: usize,
                            t_of: &dyn Fn(usize) -> f64,
                            lr_of: &dyn Fn(usize) -> (usize, usize),
                            c_out: &mut [f64],
                            grav_out: &mut Vec<(usize, usize, f64)>| {
            for f in 0..len {
                let t = t_of(f);
                if t == 0.0 {
                    c_out[f] = 0.0;
                    continue;
                }
                let (i, j) = lr_of(f);
                let dd = layout.depth[i] - layout.depth[j];
                let rho_gf = 0.5 * (rho_g[i] + rho_g[j]);
                // Per-phase upwinding by the old-time potential drop.
                let dphi_w = (state.p[i] - state.p[j]) - rho_w * g * dd;
                let dphi_g = (state.p[i] - state.p[j]) - rho_gf * g * dd;
                let up_w = if dphi_w >= 0.0 { i } else { j };
                let up_g = if dphi_g >= 0.0 { i } else { j };
                let lw = lam(cfg.corey.kr_brine(state.s[up_w]), cfg.mu_brine);
                let lg = lam(cfg.corey.kr_co2(state.s[up_g]), cfg.mu_co2);
                c_out[f] = t * (lw + lg);
                if g != 0.0 && dd != 0.0 {
                    let grav = t * (lw * rho_w + lg * rho_gf) * g * dd;
                    grav_out.push((i, j, grav));
                }
            }
        };

        let mut grav_terms: Vec<(usize, usize, f64)> = Vec::new();
        {
            let l = layout;
            let tx = &faces.tx;
            fill_dir(
                tx.len(),
                &|f| tx[f],
                &|f| {
                    let x = f % (nx - 1);
                    let rest = f / (nx - 1);
                    let (y, z) = (rest % ny, rest / ny);
                    (l.cell(x, y, z), l.cell(x + 1, y, z))
                },
                &mut sys.cx,
                &mut grav_terms,
            );
            let ty = &faces.ty;
            fill_dir(
                ty.len(),
                &|f| ty[f],
                &|f| {
                    let x = f % nx;
                    let rest = f / nx;
                    let (y, z) = (rest % (ny - 1), rest / (ny - 1));
                    (l.cell(x, y, z), l.cell(x, y + 1, z))
                },
                &mut sys.cy,
                &mut grav_terms,
            );
            let tz = &faces.tz;
            fill_dir(
                tz.len(),
                &|f| tz[f],
                &|f| {
                    let x = f % nx;
                    let rest = f / nx;
                    let (y, z) = (rest % ny, rest / ny);
                    (l.cell(x, y, z), l.cell(x, y, z + 1))
                },
                &mut sys.cz,
                &mut grav_terms,
            );
        }

        for i in 0..n {
            let acc = cell_vol * real.phi[i] * cfg.rock_compressibility / step_dt;
            sys.diag_extra[i] = acc;
            b[i] = acc * state.p[i];
        }
        // Gravity contributions enter the right-hand side antisymmetrically:
        // for each face, the left/lower cell gains T·λ·ρ·g·(Dᵢ − Dⱼ).
        for &(i, j, grav) in &grav_terms {
            b[i] += grav;
            b[j] -= grav;
        }
        for &(c, q_mass) in &alloc {
            b[c] += q_mass / rho_g[c];
        }
        for prod in &cfg.producers {
            b[prod.cell] -= prod.volume_rate;
        }

        p_new.copy_from_slice(&state.p);
        sys.solve(&b, &mut p_new, cfg.solver_rel_tol, cfg.solver_max_iter_factor * n)?;

        // --- explicit CO₂-mass transport ------------------------------
        let pv_new: Vec<f64> = (0..n).map(|i| pv(real.phi[i], p_new[i], p0[i])).collect();
        let mass_cap: Vec<f64> = (0..n).map(|i| pv_new[i] * rho_g[i]).collect();

        let make_drive = |len: usize,
                          t_of: &dyn Fn(usize) -> f64,
                          lr_of: &dyn Fn(usize) -> (usize, usize)|
         -> DirFluxes {
            let mut drive = vec![0.0; len];
            for f in 0..len {
                let t = t_of(f);
                if t == 0.0 {
                    continue;
                }
                let (i, j) = lr_of(f);
                let dd = layout.depth[i] - layout.depth[j];
                let rho_gf = 0.5 * (rho_g[i] + rho_g[j]);
                drive[f] = t * ((p_new[i] - p_new[j]) - rho_gf * g * dd);
            }
            DirFluxes { drive }
        };
        let l = layout;
        let dx_fluxes = make_drive(faces.tx.len(), &|f| faces.tx[f], &|f| {
            let x = f % (nx - 1);
            let rest = f / (nx - 1);
            let (y, z) = (rest % ny, rest / ny);
            (l.cell(x, y, z), l.cell(x + 1, y, z))
        });
        let dy_fluxes = make_drive(faces.ty.len(), &|f| faces.ty[f], &|f| {
            let x = f % nx;
            let rest = f / nx;
            let (y, z) = (rest % (ny - 1), rest / (ny - 1));
            (l.cell(x, y, z), l.cell(x, y + 1, z))
        });
        let dz_fluxes = make_drive(faces.tz.len(), &|f| faces.tz[f], &|f| {
            let x = f % nx;
            let rest = f / nx;
            let (y, z) = (rest % ny, rest / ny);
            (l.cell(x, y, z), l.cell(x, y, z + 1))
        });

        let mut s_work: Vec<f64> = (0..n).map(|i| mass[i] / mass_cap[i]).collect();
        let mut remaining = step_dt;
        let mut substeps = 0usize;
        let mut flux_x = vec![0.0; faces.tx.len()];
        let mut flux_y = vec![0.0; faces.ty.len()];
        let mut flux_z = vec![0.0; faces.tz.len()];

        while remaining > 0.0 {
            substeps += 1;
            if substeps > cfg.max_substeps_per_step {
                return Err(SimError::SubStepCap { count: substeps, cap: cfg.max_substeps_per_step });
            }
            // Gas mass flux per face, upwind mobility and density.
            let fill_flux = |d: &DirFluxes, out: &mut [f64], lr_of: &dyn Fn(usize) -> (usize, usize)| {
                for f in 0..out.len() {
                    let drv = d.drive[f];
                    if drv == 0.0 {
                        out[f] = 0.0;
                        continue;
                    }
                    let (i, j) = lr_of(f);
                    let up = if drv >= 0.0 { i } else { j };
                    out[f] = rho_g[up] * cfg.corey.kr_co2(s_work[up]) / cfg.mu_co2 * drv;
                }
            };
            fill_flux(&dx_fluxes, &mut flux_x, &|f| {
                let x = f % (nx - 1);
                let rest = f / (nx - 1);
                let (y, z) = (rest % ny, rest / ny);
                (l.cell(x, y, z), l.cell(x + 1, y, z))
            });
            fill_flux(&dy_fluxes, &mut flux_y, &|f| {
                let x = f % nx;
                let rest = f / nx;
                let (y, z) = (rest % (ny - 1), rest / (ny - 1));
                (l.cell(x, y, z), l.cell(x, y + 1, z))
            });
            fill_flux(&dz_fluxes, &mut flux_z, &|f| {
                let x = f % nx;
                let rest = f / nx;
                let (y, z) = (rest % ny, rest / ny);
                (l.cell(x, y, z), l.cell(x, y, z + 1))
            });

            // Per-cell gather, x pairs first for mirror stability.
            let mut dt_limit = remaining;
            let mut net = vec![0.0; n];
            for z in 0..nz {
                for y in 0..ny {
                    for x in 0..nx {
                        let i = l.cell(x, y, z);
                        let xm = if x > 0 { flux_x[(x - 1) + (nx - 1) * (y + ny * z)] } else { 0.0 };
                        let xp = if x + 1 < nx { -flux_x[x + (nx - 1) * (y + ny * z)] } else { 0.0 };
                        let ym = if y > 0 { flux_y[x + nx * ((y - 1) + (ny - 1) * z)] } else { 0.0 };
                        let yp = if y + 1 < ny { -flux_y[x + nx * (y + (ny - 1) * z)] } else { 0.0 };
                        let zm = if z > 0 { flux_z[x + nx * (y + ny * (z - 1))] } else { 0.0 };
                        let zp = if z + 1 < nz { -flux_z[x + nx * (y + ny * z)] } else { 0.0 };
                        let inflow = (xm.max(0.0) + xp.max(0.0))
                            + ((ym.max(0.0) + yp.max(0.0)) + (zm.max(0.0) + zp.max(0.0)));
                        let outflow = ((-xm).max(0.0) + (-xp).max(0.0))
                            + (((-ym).max(0.0) + (-yp).max(0.0)) + ((-zm).max(0.0) + (-zp).max(0.0)));
                        net[i] = (xm + xp) + ((ym + yp) + (zm + zp));
                        let denom = inflow.max(outflow);
                        if denom > 0.0 {
                            dt_limit = dt_limit.min(cfg.max_cfl * mass_cap[i] / denom);
                        }
                    }
                }
            }
            for &(c, q_mass) in &alloc {
                net[c] += q_mass;
                dt_limit = dt_limit.min(cfg.max_cfl * mass_cap[c] / q_mass);
            }
            for prod in &cfg.producers {
                let c = prod.cell;
                let fg = cfg.corey.fractional_flow(s_work[c], cfg.mu_brine, cfg.mu_co2);
                let draw = prod.volume_rate * fg * rho_g[c];
                if draw > 0.0 {
                    net[c] -= draw;
                    dt_limit = dt_limit.min(cfg.max_cfl * mass[c].max(0.0) / draw.max(f64::MIN_POSITIVE));
                }
            }

            let dt_s = dt_limit.min(remaining);
            for i in 0..n {
                if net[i] != 0.0 {
                    mass[i] += dt_s * net[i];
                }
                let s = mass[i] / mass_cap[i];
                if !(-1e-12..=1.0 + 1e-12).contains(&s) {
                    return Err(SimError::SaturationOutOfBounds { cell: i, value: s });
                }
                if s < 0.0 {
                    mass[i] = 0.0;
                }
                s_work[i] = (mass[i] / mass_cap[i]).clamp(0.0, 1.0);
            }
            remaining -= dt_s;
            if remaining < 1e-9 * step_dt {
                remaining = 0.0;
            }
        }

        // Commit the step.
        state.p.copy_from_slice(&p_new);
        state.s.copy_from_slice(&s_work);
        for w in 0..layout.injectors.len() {
            state.injected_mass[w] += cfg.well_rate_kg_per_s() * step_dt;
        }
        if hit_report {
            state.time = target;
        } else {
            state.time += step_dt;
        }

        if hit_report {
            series.times.push(state.time / SECONDS_PER_YEAR);
            series.pressure.push(state.p.clone());
            series.saturation.push(state.s.clone());
            next_report += 1;
            if next_report >= report_times.len() {
                break;
            }
        }

        // Step-size control keyed to the sub-step count.
        if substeps > 64 {
            dt = (step_dt * 0.6).max(1e-3 * SECONDS_PER_YEAR * cfg.dt_init_years.min(1.0));
        } else if substeps < 12 {
            dt = step_dt * cfg.dt_growth;
        } else {
            dt = step_dt;
        }
    }

    Ok(series)
}
