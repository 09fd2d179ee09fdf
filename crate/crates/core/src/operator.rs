//! Weighted finite-difference discretization of
//! `L = -(1/r^3) d_r (r^3 d_r) - d_{x3}^2 + V(r, x3)` on the truncated
//! cylinder.
//!
//! The radial term is discretized in conservative (flux) form with the face
//! factor `r^3` evaluated at cell faces; the face at `r = 0` carries weight
//! `0^3`, which realizes the natural zero-flux condition at the axis without
//! ghost values. Dirichlet walls at `r = r_max` and `z = +-z_half` enter by
//! odd reflection, so the boundary value vanishes at the wall itself.
//!
//! Internally the operator is stored in its weighted-symmetric form
//! `M = diag(w) A`: one shared coefficient per face. Weighted symmetry
//! `w_k A[k,l] = w_l A[l,k]` therefore holds by representation, and the
//! symmetrized matrix `D^{1/2} A D^{-1/2}` handed to the eigensolvers is
//! symmetric to the last bit.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::eigen::{self, EigenError, LanczosOptions};
use crate::grid::{CylGrid, Field, GridError};
use alloc::vec;
use alloc::vec::Vec;

/// Sparse weighted-symmetric discretization of the scalar operator.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: CylGrid,
    /// Diagonal of `M = diag(w) A`, one entry per node.
    m_diag: Vec<f64>,
    /// Face coupling between radial columns `i` and `i+1` (entry of `-M`).
    s_r: Vec<f64>,
    /// Axial coupling inside column `i` between rows `j` and `j+1`.
    s_z: Vec<f64>,
    /// Node weight per radial column (`r_i^3 hr hz`).
    w_r: Vec<f64>,
}

/// Assemble the operator for a bounded potential sampler `V(r, x3)`.
pub fn assemble_l(grid: CylGrid, potential: impl Fn(f64, f64) -> f64) -> DiscreteOperator {
    let nr = grid.nr();
    let nz = grid.nz();
    let hr = grid.hr();
    let hz = grid.hz();

    // Face factor (f hr)^3 hz / hr at radial face index f = 0..nr.
    let face = |f: usize| -> f64 {
        let r = f as f64 * hr;
        r * r * r * hz / hr
    };
    let w_r: Vec<f64> = (0..nr).map(|i| grid.weight(i)).collect();
    let s_r: Vec<f64> = (1..nr).map(face).collect();
    let s_z: Vec<f64> = (0..nr)
        .map(|i| {
            let r = grid.r(i);
            r * r * r * hr / hz
        })
        .collect();

    let mut m_diag = vec![0.0; grid.len()];
    for i in 0..nr {
        let lower = face(i); // zero at the axis face
        let upper = if i + 1 < nr { face(i + 1) } else { 2.0 * face(nr) };
        let r = grid.r(i);
        for j in 0..nz {
            let mut d = lower + upper + 2.0 * s_z[i];
            if j == 0 {
                d += s_z[i]; // odd reflection across z = -z_half
            }
            if j + 1 == nz {
                d += s_z[i];
            }
            d += w_r[i] * potential(r, grid.z(j));
            m_diag[grid.idx(i, j)] = d;
        }
    }
    DiscreteOperator {
        grid,
        m_diag,
        s_r,
        s_z,
        w_r,
    }
}

impl DiscreteOperator {
    pub fn grid(&self) -> &CylGrid {
        &self.grid
    }

    /// Dimension of the discrete problem.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `A + c I` (shift of the potential by a constant, exactly).
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        let nz = self.grid.nz();
        for i in 0..self.grid.nr() {
            for j in 0..nz {
                out.m_diag[self.grid.idx(i, j)] += c * self.w_r[i];
            }
        }
        out
    }

    /// Raw action of `M = diag(w) A` on a flat vector.
    fn apply_m(&self, x: &[f64], y: &mut [f64]) {
        let nr = self.grid.nr();
        let nz = self.grid.nz();
        for i in 0..nr {
            let base = i * nz;
            let sz = self.s_z[i];
            for j in 0..nz {
                let k = base + j;
                let mut acc = self.m_diag[k] * x[k];
                if j > 0 {
                    acc -= sz * x[k - 1];
                }
                if j + 1 < nz {
                    acc -= sz * x[k + 1];
                }
                if i > 0 {
                    acc -= self.s_r[i - 1] * x[k - nz];
                }
                if i + 1 < nr {
                    acc -= self.s_r[i] * x[k + nz];
                }
                y[k] = acc;
            }
        }
    }

    /// `A u` as a field.
    pub fn apply(&self, u: &Field) -> Result<Field, GridError> {
        if *u.grid() != self.grid {
            return Err(GridError::Mismatch);
        }
        let mut y = vec![0.0; self.len()];
        self.apply_m(u.values(), &mut y);
        let nz = self.grid.nz();
        for i in 0..self.grid.nr() {
            let wi = self.w_r[i];
            for j in 0..nz {
                y[i * nz + j] /= wi;
            }
        }
        Field::from_values(self.grid, y)
    }

    /// Quadratic form `<A u, v>_w = u^T M v`, evaluated through the
    /// symmetric representation.
    pub fn quadratic_form(&self, u: &Field, v: &Field) -> Result<f64, GridError> {
        if *u.grid() != self.grid || *v.grid() != self.grid {
            return Err(GridError::Mismatch);
        }
        let mut y = vec![0.0; self.len()];
        self.apply_m(u.values(), &mut y);
        Ok(eigen::dot(&y, v.values()))
    }

    /// Largest violation of `w_k A[k,l] = w_l A[l,k]` over stored couplings,
    /// with the `A` entries reconstructed from the symmetric representation
    /// the way a caller would read them. Zero up to two rounding operations
    /// per entry; the representation itself shares one coefficient per face.
    /// Axial couplings connect nodes of equal weight and are symmetric as
    /// written, so only the radial faces are checked.
    pub fn weighted_symmetry_residual(&self) -> f64 {
        let nr = self.grid.nr();
        let mut worst = 0.0f64;
        for i in 0..nr.saturating_sub(1) {
            let a_up = -self.s_r[i] / self.w_r[i];
            let a_dn = -self.s_r[i] / self.w_r[i + 1];
            let resid = (self.w_r[i] * a_up - self.w_r[i + 1] * a_dn).abs();
            worst = worst.max(resid / self.s_r[i].max(1e-300));
        }
        worst
    }

    /// The `k` lowest eigenpairs of the weighted pencil.
    ///
    /// Eigenvalues ascending; eigenvectors `w`-orthonormal with residual
    /// `|A u - lambda u|_w <= 1e-8` (absolute, unit `w`-norm vectors), via
    /// Lanczos on the symmetrized matrix `D^{1/2} A D^{-1/2}`.
    pub fn eigs_lowest(
        &self,
        k: usize,
        initial: Option<&Field>,
    ) -> Result<Vec<(f64, Field)>, EigenError> {
        let opts = LanczosOptions {
            tol: 0.0,
            tol_abs: 1e-8,
            initial: initial.map(|f| self.to_sym_coords(f.values())),
            max_basis: (2 * k + 16).max(48),
            ..Default::default()
        };
        self.eigs_lowest_with(k, &opts)
    }

    /// As [`Self::eigs_lowest`] with explicit solver options; `initial` in
    /// the options is interpreted in symmetrized coordinates.
    pub fn eigs_lowest_with(
        &self,
        k: usize,
        opts: &LanczosOptions,
    ) -> Result<Vec<(f64, Field)>, EigenError> {
        let n = self.len();
        let nz = self.grid.nz();
        let nr = self.grid.nr();
        let d_sqrt: Vec<f64> = (0..nr).map(|i| self.w_r[i].sqrt()).collect();
        let mut scratch = vec![0.0; n];
        let apply = |x: &[f64], y: &mut [f64]| {
            // B y = D^{-1/2} M D^{-1/2} x, column-scaled in place.
            for i in 0..nr {
                let d = d_sqrt[i];
                for j in 0..nz {
                    scratch[i * nz + j] = x[i * nz + j] / d;
                }
            }
            // Reuse y as the M-product buffer.
            let mut prod = vec![0.0; n];
            self.apply_m(&scratch, &mut prod);
            for i in 0..nr {
                let d = d_sqrt[i];
                for j in 0..nz {
                    y[i * nz + j] = prod[i * nz + j] / d;
                }
            }
        };
        let pairs = eigen::lowest_eigenpairs(n, apply, k, opts)?;
        let mut out = Vec::with_capacity(pairs.values.len());
        for (val, vec_sym) in pairs.values.into_iter().zip(pairs.vectors) {
            let mut u = vec_sym;
            for i in 0..nr {
                let d = d_sqrt[i];
                for j in 0..nz {
                    u[i * nz + j] /= d;
                }
            }
            out.push((val, Field::from_values(self.grid, u).expect("sized")));
        }
        Ok(out)
    }

    /// Map nodal values to symmetrized coordinates `y = D^{1/2} u`.
    pub fn to_sym_coords(&self, u: &[f64]) -> Vec<f64> {
        let nz = self.grid.nz();
        let mut y = u.to_vec();
        for i in 0..self.grid.nr() {
            let d = self.w_r[i].sqrt();
            for j in 0..nz {
                y[i * nz + j] *= d;
            }
        }
        y
    }
}

/// Both sides of the weighted Hardy inequality
/// `int u^2 / r^2 <= int (du/dr)^2 + (du/dx3)^2` (measure `r^3 dr dx3`).
///
/// The right side is the discrete Dirichlet energy of the flux-form
/// Laplacian (quadratic form at `V = 0`), the left a midpoint quadrature.
pub fn hardy_check(u: &Field) -> (f64, f64) {
    let g = *u.grid();
    let zero_v = assemble_l(g, |_, _| 0.0);
    let rhs = zero_v.quadratic_form(u, u).expect("same grid");
    let mut lhs = 0.0;
    for i in 0..g.nr() {
        let r = g.r(i);
        let w = g.weight(i) / (r * r);
        for j in 0..g.nz() {
            let v = u.at(i, j);
            lhs += w * v * v;
        }
    }
    (lhs, rhs)
}

/// Symmetrized tridiagonal of the 1D radial operator
/// `-(1/r^3)(r^3 u')' + W(r)` on `(0, r_max)` with `nr` cells, Dirichlet at
/// `r_max`. Returns `(diag, off)` whose eigenvalues are those of the
/// weighted operator.
pub fn radial_operator_1d(
    r_max: f64,
    nr: usize,
    potential: impl Fn(f64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let hr = r_max / nr as f64;
    let face = |f: usize| -> f64 {
        let r = f as f64 * hr;
        r * r * r / hr
    };
    let weight = |i: usize| -> f64 {
        let r = (i as f64 + 0.5) * hr;
        r * r * r * hr
    };
    let mut diag = Vec::with_capacity(nr);
    for i in 0..nr {
        let lower = face(i);
        let upper = if i + 1 < nr { face(i + 1) } else { 2.0 * face(nr) };
        let r = (i as f64 + 0.5) * hr;
        diag.push((lower + upper + weight(i) * potential(r)) / weight(i));
    }
    let off: Vec<f64> = (0..nr - 1)
        .map(|i| -face(i + 1) / (weight(i) * weight(i + 1)).sqrt())
        .collect();
    (diag, off)
}

/// Symmetric tridiagonal of the 1D operator `-u'' + P(x3)` on
/// `(-z_half, z_half)` with `nz` cells, Dirichlet walls by odd reflection.
pub fn axial_operator_1d(
    z_half: f64,
    nz: usize,
    potential: impl Fn(f64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let hz = 2.0 * z_half / nz as f64;
    let inv = 1.0 / (hz * hz);
    let mut diag = Vec::with_capacity(nz);
    for j in 0..nz {
        let z = -z_half + (j as f64 + 0.5) * hz;
        let mut d = 2.0 * inv + potential(z);
        if j == 0 || j + 1 == nz {
            d += inv;
        }
        diag.push(d);
    }
    (diag, vec![-inv; nz - 1])
}
