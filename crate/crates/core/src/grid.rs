//! Cylindrical grid and scalar fields with the `r^3` weight.
//!
//! Nodes are cell-centered: `r_i = (i + 1/2) hr` (never touching the
//! coordinate singularity at `r = 0`) and `z_j = -z_half + (j + 1/2) hz`.
//! The quadrature weight of a node is `r_i^3 hr hz`, matching the measure
//! `r^3 dr dx_3` of the scalar reduction; all inner products below are taken
//! in that weight.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    /// Degenerate resolution or nonpositive extents.
    #[error("degenerate grid: r_max {r_max}, z_half {z_half}, nr {nr}, nz {nz}")]
    Degenerate {
        r_max: f64,
        z_half: f64,
        nr: usize,
        nz: usize,
    },
    /// Two fields live on different grids.
    #[error("grid mismatch")]
    Mismatch,
    /// A sample point lies outside the open cylinder.
    #[error("point (r = {r}, x3 = {z}) outside the domain")]
    OutOfDomain { r: f64, z: f64 },
}

/// Truncated-cylinder grid: `r in (0, r_max)`, `x3 in (-z_half, z_half)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylGrid {
    r_max: f64,
    z_half: f64,
    nr: usize,
    nz: usize,
}

impl CylGrid {
    pub fn new(r_max: f64, z_half: f64, nr: usize, nz: usize) -> Result<Self, GridError> {
        if !(r_max > 0.0) || !(z_half > 0.0) || nr < 2 || nz < 2 {
            return Err(GridError::Degenerate {
                r_max,
                z_half,
                nr,
                nz,
            });
        }
        Ok(Self {
            r_max,
            z_half,
            nr,
            nz,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn z_half(&self) -> f64 {
        self.z_half
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn hr(&self) -> f64 {
        self.r_max / self.nr as f64
    }

    pub fn hz(&self) -> f64 {
        2.0 * self.z_half / self.nz as f64
    }

    /// Node count.
    pub fn len(&self) -> usize {
        self.nr * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radial coordinate of column `i`.
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hr()
    }

    /// Axial coordinate of row `j`.
    pub fn z(&self, j: usize) -> f64 {
        -self.z_half + (j as f64 + 0.5) * self.hz()
    }

    /// Flat index, row-major over `r` then `x3`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nz + j
    }

    /// Quadrature weight `r_i^3 hr hz` of every node in column `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let r = self.r(i);
        r * r * r * self.hr() * self.hz()
    }
}

/// Scalar field sampled on a [`CylGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: CylGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: CylGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    /// Sample `f(r, x3)` at every node.
    pub fn from_fn(grid: CylGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = grid.r(i);
            for j in 0..grid.nz() {
                values.push(f(r, grid.z(j)));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: CylGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::Mismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &CylGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Bilinear interpolation at `(r, z)` inside the domain.
    ///
    /// The node lattice extends by one ghost layer: evenly across the axis
    /// (the scalar reduction is even in `r`) and oddly across the Dirichlet
    /// walls, so interpolated values vanish exactly at `r = r_max` and
    /// `z = +-z_half`.
    pub fn interpolate(&self, r: f64, z: f64) -> Result<f64, GridError> {
        let g = &self.grid;
        if !(r >= 0.0) || r >= g.r_max() || z.abs() >= g.z_half() {
            return Err(GridError::OutOfDomain { r, z });
        }
        let nr = g.nr();
        let nz = g.nz();
        let ext = |i: isize, j: isize| -> f64 {
            let (ci, sr) = if i < 0 {
                (0, 1.0)
            } else if i as usize >= nr {
                (nr - 1, -1.0)
            } else {
                (i as usize, 1.0)
            };
            let (cj, sz) = if j < 0 {
                (0, -1.0)
            } else if j as usize >= nz {
                (nz - 1, -1.0)
            } else {
                (j as usize, 1.0)
            };
            sr * sz * self.at(ci, cj)
        };

        let s = r / g.hr() - 0.5;
        let t = (z + g.z_half()) / g.hz() - 0.5;
        let i0 = s.floor() as isize;
        let j0 = t.floor() as isize;
        let tr = s - i0 as f64;
        let tz = t - j0 as f64;
        let a = ext(i0, j0) * (1.0 - tr) + ext(i0 + 1, j0) * tr;
        let b = ext(i0, j0 + 1) * (1.0 - tr) + ext(i0 + 1, j0 + 1) * tr;
        Ok(a * (1.0 - tz) + b * tz)
    }
}

/// Weighted inner product `sum w_ij u_ij v_ij`.
pub fn weighted_inner(u: &Field, v: &Field) -> Result<f64, GridError> {
    if u.grid != v.grid {
        return Err(GridError::Mismatch);
    }
    let g = &u.grid;
    let mut acc = 0.0;
    for i in 0..g.nr() {
        let w = g.weight(i);
        let base = i * g.nz();
        let mut row = 0.0;
        for j in 0..g.nz() {
            row += u.values[base + j] * v.values[base + j];
        }
        acc += w * row;
    }
    Ok(acc)
}

/// Weighted norm `sqrt(<u, u>_w)`.
pub fn weighted_norm(u: &Field) -> f64 {
    weighted_inner(u, u).expect("same grid").sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn small_grid() -> CylGrid {
        CylGrid::new(2.0, 1.5, 16, 12).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = small_grid();
        assert_abs_diff_eq!(g.hr(), 0.125);
        assert_abs_diff_eq!(g.hz(), 0.25);
        assert_abs_diff_eq!(g.r(0), 0.0625);
        assert!(g.r(0) > 0.0, "no node at the axis");
        assert_abs_diff_eq!(g.z(0), -1.375);
        assert_abs_diff_eq!(g.z(11), 1.375);
        for i in 0..g.nr() {
            assert!(g.weight(i) > 0.0);
        }
        assert!(CylGrid::new(-1.0, 1.0, 8, 8).is_err());
        assert!(CylGrid::new(1.0, 1.0, 1, 8).is_err());
    }

    #[test]
    fn constant_field_integrates_volume() {
        // sum w = int r^3 dr dz over the cell centers; exact for the r^3
        // monomial? Midpoint quadrature of r^3 is not exact, but the exact
        // integral (r_max^4/4)(2 z_half) is matched to the midpoint-rule
        // error for r^3, which vanishes: sum of (i+1/2)^3 h^4 over cells
        // equals r_max^4/4 - r_max^2 hr^2/8. Check the closed form.
        let g = small_grid();
        let one = Field::from_fn(g, |_, _| 1.0);
        let total = weighted_inner(&one, &one).unwrap();
        let exact = g.r_max().powi(4) / 4.0 * (2.0 * g.z_half());
        let midpoint_corr = g.r_max() * g.r_max() * g.hr() * g.hr() / 8.0 * (2.0 * g.z_half());
        assert_abs_diff_eq!(total, exact - midpoint_corr, epsilon = 1e-12 * exact);
    }

    #[test]
    fn inner_product_bilinear_symmetric() {
        let g = small_grid();
        let mut rng = StdRng::seed_from_u64(5);
        let u = Field::from_fn(g, |_, _| rng.gen_range(-1.0..1.0));
        let v = Field::from_fn(g, |_, _| rng.gen_range(-1.0..1.0));
        let w = Field::from_fn(g, |_, _| rng.gen_range(-1.0..1.0));
        let uv = weighted_inner(&u, &v).unwrap();
        let vu = weighted_inner(&v, &u).unwrap();
        assert_abs_diff_eq!(uv, vu, epsilon = 1e-14 * uv.abs().max(1.0));
        // bilinearity: <u + 2w, v> = <u,v> + 2 <w,v>
        let mut u2 = u.clone();
        for (a, b) in u2.values_mut().iter_mut().zip(w.values()) {
            *a += 2.0 * b;
        }
        let lhs = weighted_inner(&u2, &v).unwrap();
        let rhs = uv + 2.0 * weighted_inner(&w, &v).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = Field::zeros(small_grid());
        let b = Field::zeros(CylGrid::new(2.0, 1.5, 16, 13).unwrap());
        assert!(matches!(weighted_inner(&a, &b), Err(GridError::Mismatch)));
    }

    #[test]
    fn interpolation_reproduces_bilinear_functions() {
        let g = small_grid();
        // A function linear in r and z is reproduced exactly inside the
        // node hull.
        let f = Field::from_fn(g, |r, z| 2.0 * r - 0.7 * z + 0.3);
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..200 {
            let r = rng.gen_range(g.r(0)..g.r(g.nr() - 1));
            let z = rng.gen_range(g.z(0)..g.z(g.nz() - 1));
            let got = f.interpolate(r, z).unwrap();
            assert_abs_diff_eq!(got, 2.0 * r - 0.7 * z + 0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolation_boundary_behavior() {
        let g = small_grid();
        let f = Field::from_fn(g, |_, _| 1.0);
        // At the walls the Dirichlet ramp takes over: near r_max the value
        // decays toward 0.
        let near_wall = f.interpolate(g.r_max() - 1e-9, 0.0).unwrap();
        assert!(near_wall.abs() < 1e-6);
        let near_zwall = f.interpolate(0.5, g.z_half() - 1e-9).unwrap();
        assert!(near_zwall.abs() < 1e-6);
        // Across the axis the even extension keeps the first-node value.
        let on_axis = f.interpolate(1e-12, 0.01).unwrap();
        assert!(on_axis > 0.9);
        // Outside: rejected.
        assert!(f.interpolate(g.r_max() + 0.1, 0.0).is_err());
        assert!(f.interpolate(0.5, g.z_half() + 0.1).is_err());
    }
}
