//! Pressure linear solver: preconditioned conjugate gradients on the
//! matrix-free seven-point system, with a vertical-line (tridiagonal
//! z-column) Jacobi preconditioner.
//!
//! Every reduction and gather is arranged so that mirroring the problem
//! about the x mid-plane produces bit-identical mirrored iterates: per-cell
//! face contributions are accumulated as (x−, x+) + (y−, y+) + (z−, z+)
//! pairs, and inner products sum x-mirror cell pairs before anything else.
//! IEEE addition is commutative, so swapping the members of each pair —
//! which is exactly what the mirror does — cannot change a single bit.

/// Seven-point SPD system in face-coefficient form. `cx[f]` couples cell
/// (x,y,z) to (x+1,y,z) with f = x + (nx−1)·(y + ny·z); `cy` and `cz`
/// likewise. `diag_extra` is the accumulation (and well) contribution added
/// to the row diagonal.
pub struct FaceSystem {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub cx: Vec<f64>,
    pub cy: Vec<f64>,
    pub cz: Vec<f64>,
    pub diag_extra: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
#[error("pressure solve did not converge: residual {residual:.3e} (target {target:.3e}) after {iterations} iterations")]
pub struct SolveFailure {
    pub residual: f64,
    pub target: f64,
    pub iterations: usize,
}

impl FaceSystem {
    pub fn n(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    fn fx(&self, x: usize, y: usize, z: usize) -> usize {
        x + (self.nx - 1) * (y + self.ny * z)
    }

    #[inline]
    fn fy(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.nx * (y + (self.ny - 1) * z)
    }

    #[inline]
    fn fz(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.nx * (y + self.ny * z)
    }

    /// out = A·v with mirror-stable per-cell gathering.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let i = x + nx * (y + ny * z);
                    let vi = v[i];
                    let xm = if x > 0 { self.cx[self.fx(x - 1, y, z)] * (vi - v[i - 1]) } else { 0.0 };
                    let xp = if x + 1 < nx { self.cx[self.fx(x, y, z)] * (vi - v[i + 1]) } else { 0.0 };
                    let ym = if y > 0 { self.cy[self.fy(x, y - 1, z)] * (vi - v[i - nx]) } else { 0.0 };
                    let yp = if y + 1 < ny { self.cy[self.fy(x, y, z)] * (vi - v[i + nx]) } else { 0.0 };
                    let zm =
                        if z > 0 { self.cz[self.fz(x, y, z - 1)] * (vi - v[i - nx * ny]) } else { 0.0 };
                    let zp =
                        if z + 1 < nz { self.cz[self.fz(x, y, z)] * (vi - v[i + nx * ny]) } else { 0.0 };
                    out[i] = self.diag_extra[i] * vi + ((xm + xp) + ((ym + yp) + (zm + zp)));
                }
            }
        }
    }

    /// Row diagonal of A.
    fn diagonal(&self) -> Vec<f64> {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let mut d = self.diag_extra.clone();
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let i = x + nx * (y + ny * z);
                    let xm = if x > 0 { self.cx[self.fx(x - 1, y, z)] } else { 0.0 };
                    let xp = if x + 1 < nx { self.cx[self.fx(x, y, z)] } else { 0.0 };
                    let ym = if y > 0 { self.cy[self.fy(x, y - 1, z)] } else { 0.0 };
                    let yp = if y + 1 < ny { self.cy[self.fy(x, y, z)] } else { 0.0 };
                    let zm = if z > 0 { self.cz[self.fz(x, y, z - 1)] } else { 0.0 };
                    let zp = if z + 1 < nz { self.cz[self.fz(x, y, z)] } else { 0.0 };
                    d[i] += (xm + xp) + ((ym + yp) + (zm + zp));
                }
            }
        }
        d
    }

    /// Applies the z-line preconditioner: solves the tridiagonal system made
    /// of the full diagonal and the z-face couplings, one (x,y) column at a
    /// time (Thomas algorithm).
    fn precondition(&self, diag: &[f64], r: &[f64], out: &mut [f64], work: &mut [f64]) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let stride = nx * ny;
        for y in 0..ny {
            for x in 0..nx {
                let base = x + nx * y;
                // Forward sweep.
                let mut prev_c = 0.0;
                let mut prev_d = 0.0;
                for z in 0..nz {
                    let i = base + z * stride;
                    let a = if z > 0 { -self.cz[self.fz(x, y, z - 1)] } else { 0.0 };
                    let c = if z + 1 < nz { -self.cz[self.fz(x, y, z)] } else { 0.0 };
                    let denom = diag[i] - a * prev_c;
                    prev_c = c / denom;
                    prev_d = (r[i] - a * prev_d) / denom;
                    work[z] = prev_c;
                    out[i] = prev_d;
                }
                // Back substitution.
                for z in (0..nz.saturating_sub(1)).rev() {
                    let i = base + z * stride;
                    out[i] -= work[z] * out[i + stride];
                }
            }
        }
    }

    /// Mirror-stable inner product: x-mirror cell pairs are combined first.
    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let mut total = 0.0;
        for z in 0..nz {
            for y in 0..ny {
                let row = nx * (y + ny * z);
                let half = nx / 2;
                for x in 0..half {
                    let i = row + x;
                    let j = row + (nx - 1 - x);
                    total += a[i] * b[i] + a[j] * b[j];
                }
                if nx % 2 == 1 {
                    let m = row + half;
                    total += a[m] * b[m];
                }
            }
        }
        total
    }

    /// Solves A·x = b by preconditioned CG, starting from `x` in place.
    pub fn solve(&self, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<usize, SolveFailure> {
        let n = self.n();
        let diag = self.diagonal();
        let mut work = vec![0.0; self.nz];
        let mut r = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut ap = vec![0.0; n];

        self.apply(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let b_norm = self.dot(b, b).sqrt();
        let target = rel_tol * b_norm.max(f64::MIN_POSITIVE);
        let mut r_norm = self.dot(&r, &r).sqrt();
        if r_norm <= target {
            return Ok(0);
        }
        self.precondition(&diag, &r, &mut z, &mut work);
        p.copy_from_slice(&z);
        let mut rz = self.dot(&r, &z);
        for iter in 1..=max_iter {
            self.apply(&p, &mut ap);
            let pap = self.dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(SolveFailure { residual: r_norm, target, iterations: iter });
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            for i in 0..n {
                r[i] -= alpha * ap[i];
            }
            r_norm = self.dot(&r, &r).sqrt();
            if r_norm <= target {
                return Ok(iter);
            }
            self.precondition(&diag, &r, &mut z, &mut work);
            let rz_new = self.dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(SolveFailure { residual: r_norm, target, iterations: max_iter })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn laplacian(nx: usize, ny: usize, nz: usize, contrast: impl Fn(usize) -> f64) -> FaceSystem {
        let mut sys = FaceSystem {
            nx,
            ny,
            nz,
            cx: vec![0.0; (nx - 1) * ny * nz],
            cy: vec![0.0; nx * (ny.max(1) - 1).max(0) * nz],
            cz: vec![0.0; nx * ny * (nz.max(1) - 1).max(0)],
            diag_extra: vec![1e-3; nx * ny * nz],
        };
        for (f, c) in sys.cx.iter_mut().enumerate() {
            *c = contrast(f);
        }
        for (f, c) in sys.cy.iter_mut().enumerate() {
            *c = contrast(f + 1);
        }
        for (f, c) in sys.cz.iter_mut().enumerate() {
            *c = contrast(f + 2);
        }
        sys
    }

    #[test]
    fn solves_heterogeneous_system_to_tolerance() {
        let sys = laplacian(8, 7, 5, |f| 10f64.powf(((f * 37) % 7) as f64 - 3.0));
        let n = sys.n();
        let mut rng = crate::rng::stream(3, "solver", 0);
        let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut b = vec![0.0; n];
        sys.apply(&x_true, &mut b);
        let mut x = vec![0.0; n];
        let iters = sys.solve(&b, &mut x, 1e-12, 10 * n).unwrap();
        assert!(iters > 0);
        for i in 0..n {
            assert_abs_diff_eq!(x[i], x_true[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn mirrored_system_solves_to_mirrored_bits() {
        let (nx, ny, nz) = (10, 4, 3);
        let mut rng = crate::rng::stream(3, "solver/mirror", 0);
        let mut sys = laplacian(nx, ny, nz, |_| 0.0);
        for c in sys.cx.iter_mut().chain(sys.cy.iter_mut()).chain(sys.cz.iter_mut()) {
            *c = 10f64.powf(rng.gen_range(-3.0..3.0));
        }
        for d in sys.diag_extra.iter_mut() {
            *d = rng.gen_range(1e-4..1e-2);
        }
        let n = sys.n();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

        // Build the x-mirrored system and right-hand side.
        let cell = |x: usize, y: usize, z: usize| x + nx * (y + ny * z);
        let mut m = laplacian(nx, ny, nz, |_| 0.0);
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx - 1 {
                    // Face (x → x+1) mirrors to face (nx−2−x → nx−1−x).
                    m.cx[(nx - 2 - x) + (nx - 1) * (y + ny * z)] = sys.cx[x + (nx - 1) * (y + ny * z)];
                }
                for x in 0..nx {
                    if y + 1 < ny {
                        m.cy[(nx - 1 - x) + nx * (y + (ny - 1) * z)] = sys.cy[x + nx * (y + (ny - 1) * z)];
                    }
                    if z + 1 < nz {
                        m.cz[cell(nx - 1 - x, y, z)] = sys.cz[cell(x, y, z)];
                    }
                    m.diag_extra[cell(nx - 1 - x, y, z)] = sys.diag_extra[cell(x, y, z)];
                }
            }
        }
        let mut bm = vec![0.0; n];
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    bm[cell(nx - 1 - x, y, z)] = b[cell(x, y, z)];
                }
            }
        }

        let mut x1 = vec![0.0; n];
        let mut x2 = vec![0.0; n];
        sys.solve(&b, &mut x1, 1e-12, 10 * n).unwrap();
        m.solve(&bm, &mut x2, 1e-12, 10 * n).unwrap();
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let a = x1[cell(x, y, z)];
                    let bb = x2[cell(nx - 1 - x, y, z)];
                    assert_eq!(a.to_bits(), bb.to_bits(), "mirror mismatch at ({x},{y},{z})");
                }
            }
        }
    }
}
