//! Ground states of the discrete energy on the scalar reduction.
//!
//! The energy of the vector field `U = u (-x2, x1, 0)` reduces to
//!
//! ```text
//! J[u] = 2 pi [ 1/2 <A u, u>_w - 1/(p+1) sum w Gamma |u|^{p+1} r^{p-1} ]
//! ```
//!
//! where `A` is the discrete scalar operator and the `r^{p-1}` factor comes
//! from `|U| = r |u|` against the `r^3` measure (the full 3D integrand
//! evaluated through the reduction; the bookkeeping is frozen by a
//! Monte-Carlo-validated test).
//!
//! Two regimes are solved:
//!
//! - strongly defocusing (`Gamma < 0`, `sup V < 0`): direct minimization by
//!   gradient descent from a scaled-bump seed ([`solve_defocusing`]);
//! - focusing (`Gamma > 0`, zero outside the spectrum): constrained
//!   minimization over the Nehari-Pankov set, via an inner concave
//!   maximization over `span{w} + H^-` and an outer sphere descent on the
//!   positive spectral subspace ([`solve_focusing`]).
//!
//! The fully radially symmetric case has a closed-form solution family that
//! serves as an end-to-end oracle ([`exact_radial_solution`]).

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::eigen::EigenError;
use crate::grid::{weighted_norm, CylGrid, Field, GridError};
use crate::operator::{assemble_l, DiscreteOperator};
use crate::spectrum::GapCertificate;
use alloc::vec::Vec;
use thiserror::Error;

mod defocusing;
mod exact;
mod focusing;

pub use defocusing::solve_defocusing;
pub use exact::{exact_radial_solution, ExactRadialReport};
pub use focusing::{
    nehari_project, restricted_hessian, solve_focusing, spectral_split, NehariPoint,
    SpectralSplit,
};

/// Threshold below which a converged state counts as trivial.
pub const NONTRIVIAL_NORM: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    /// The nonlinear coefficient has the wrong sign for the mode.
    #[error("Gamma = {value} at (r = {r}, x3 = {z}) violates the {mode:?}-mode sign")]
    GammaSign { mode: Mode, value: f64, r: f64, z: f64 },
    /// Defocusing mode needs `sup V < 0` on the grid.
    #[error("defocusing mode needs sup V < 0, found {0}")]
    PotentialNotNegative(f64),
    /// Exponent outside the allowed range for the mode.
    #[error("exponent p = {p} outside ({lo}, {hi})")]
    BadExponent { p: f64, lo: f64, hi: f64 },
    /// Focusing mode requires a certificate with positive margin at zero.
    #[error("focusing mode requires a gap certificate with margin > 0 (got {margin:?})")]
    GapNotCertified { margin: Option<f64> },
    /// Solver invoked on a problem in the other regime.
    #[error("solver requires a problem in {expected:?} mode")]
    ModeMismatch { expected: Mode },
    /// No scaled seed with negative energy exists on the truncated domain.
    #[error("seed construction failed: no scaled bump gives negative energy")]
    SeedConstruction,
    /// Iteration cap reached before the tolerance.
    #[error("solver did not converge within {iterations} iterations (grad norm {grad_norm})")]
    NonConvergence { iterations: usize, grad_norm: f64 },
    /// More negative eigenvalues than the caller allowed.
    #[error("negative subspace larger than the cap {cap}")]
    KNegMaxExceeded { cap: usize },
    /// A discrete eigenvalue sits numerically at zero.
    #[error("eigenvalue {0} within 1e-8 of zero violates the gap hypothesis")]
    NearZeroEigenvalue(f64),
    /// The projected direction is not a usable positive-subspace vector.
    #[error("vector not in the positive subspace (overlap {overlap})")]
    NotInPositiveSubspace { overlap: f64 },
    /// No Nehari point on the ray (`b(w, w) <= 0` with trivial `H^-`).
    #[error("no Nehari point on this ray: quadratic form {0} <= 0")]
    NoNehariPoint(f64),
    /// Newton iteration of the inner maximization failed.
    #[error("inner Nehari maximization did not converge")]
    InnerNoConvergence,
    /// All multi-starts failed.
    #[error("all {0} starts failed")]
    AllStartsFailed(usize),
    /// `V / Gamma` negative at a sampled radius (exact solution family).
    #[error("V/Gamma = {ratio} < 0 at rho = {rho}")]
    NegativeRatio { rho: f64, ratio: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Sign regime of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    Defocusing,
    Focusing,
}

/// Solver tolerances and iteration budgets.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverOptions {
    /// Gradient tolerance for descent loops, scaled by `max(1, |J|)`.
    pub tol_gradient: f64,
    /// Inner Nehari maximization gradient tolerance (scaled).
    pub tol_inner: f64,
    /// Outer sphere-descent tangential-gradient tolerance (scaled).
    pub tol_outer: f64,
    /// Iteration cap per descent run.
    pub max_iterations: usize,
    /// Random multi-starts in the focusing solver (plus one spectral start).
    pub starts: usize,
    /// Cap on the negative-subspace dimension.
    pub k_neg_max: usize,
    /// Seed for start generation.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_gradient: 1e-8,
            tol_inner: 1e-10,
            tol_outer: 1e-8,
            max_iterations: 200_000,
            starts: 8,
            k_neg_max: 64,
            seed: 0x6a09e667,
        }
    }
}

/// A discrete ground-state problem: operator, nonlinearity, exponent, mode.
pub struct Problem {
    grid: CylGrid,
    op: DiscreteOperator,
    gamma: Field,
    /// `r_i^{p-1}` per radial column.
    r_pow: Vec<f64>,
    p: f64,
    mode: Mode,
    certificate: Option<GapCertificate>,
}

impl Problem {
    /// Defocusing problem: requires `Gamma < 0` at every node, `sup V < 0`
    /// on the grid, and `p > 1`.
    pub fn defocusing(
        grid: CylGrid,
        potential: impl Fn(f64, f64) -> f64,
        gamma: impl Fn(f64, f64) -> f64,
        p: f64,
    ) -> Result<Self, SolveError> {
        if !(p > 1.0) {
            return Err(SolveError::BadExponent {
                p,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        let gamma_field = Field::from_fn(grid, &gamma);
        check_gamma_sign(&gamma_field, Mode::Defocusing)?;
        let mut v_max = f64::NEG_INFINITY;
        for i in 0..grid.nr() {
            for j in 0..grid.nz() {
                v_max = v_max.max(potential(grid.r(i), grid.z(j)));
            }
        }
        if !(v_max < 0.0) {
            return Err(SolveError::PotentialNotNegative(v_max));
        }
        Ok(Self {
            grid,
            op: assemble_l(grid, potential),
            gamma: gamma_field,
            r_pow: r_powers(grid, p),
            p,
            mode: Mode::Defocusing,
            certificate: None,
        })
    }

    /// Focusing problem: requires `1 < p < 5`, `Gamma > 0` at every node,
    /// and a gap certificate with positive margin at zero (from the design
    /// pipeline, or user-supplied when `inf V > 0` makes the spectrum
    /// trivially positive).
    pub fn focusing(
        grid: CylGrid,
        potential: impl Fn(f64, f64) -> f64,
        gamma: impl Fn(f64, f64) -> f64,
        p: f64,
        certificate: GapCertificate,
    ) -> Result<Self, SolveError> {
        if !(p > 1.0 && p < 5.0) {
            return Err(SolveError::BadExponent { p, lo: 1.0, hi: 5.0 });
        }
        let gamma_field = Field::from_fn(grid, &gamma);
        check_gamma_sign(&gamma_field, Mode::Focusing)?;
        if !(certificate.margin > 0.0) {
            return Err(SolveError::GapNotCertified {
                margin: Some(certificate.margin),
            });
        }
        Ok(Self {
            grid,
            op: assemble_l(grid, potential),
            gamma: gamma_field,
            r_pow: r_powers(grid, p),
            p,
            mode: Mode::Focusing,
            certificate: Some(certificate),
        })
    }

    pub fn grid(&self) -> &CylGrid {
        &self.grid
    }

    pub fn operator(&self) -> &DiscreteOperator {
        &self.op
    }

    pub fn gamma(&self) -> &Field {
        &self.gamma
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn certificate(&self) -> Option<&GapCertificate> {
        self.certificate.as_ref()
    }

    /// `|x|^{p-1} x` with fast paths for the common exponents.
    #[inline]
    fn odd_power(&self, x: f64) -> f64 {
        if self.p == 3.0 {
            x * x * x
        } else if self.p == 2.0 {
            x.abs() * x
        } else {
            x.abs().powf(self.p - 1.0) * x
        }
    }

    #[inline]
    fn abs_power_p1(&self, x: f64) -> f64 {
        // |x|^{p+1}
        if self.p == 3.0 {
            let s = x * x;
            s * s
        } else if self.p == 2.0 {
            let a = x.abs();
            a * a * a
        } else {
            x.abs().powf(self.p + 1.0)
        }
    }

    /// `sum w Gamma |u|^{p+1} r^{p-1}` — the 3D nonlinear integral divided
    /// by `2 pi`.
    pub fn nonlinear_integral(&self, u: &Field) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for i in 0..g.nr() {
            let w = g.weight(i) * self.r_pow[i];
            let base = i * g.nz();
            let mut row = 0.0;
            for j in 0..g.nz() {
                row += self.gamma.values()[base + j] * self.abs_power_p1(u.values()[base + j]);
            }
            acc += w * row;
        }
        acc
    }

    /// The nonlinear term of the Euler-Lagrange operator:
    /// `Gamma r^{p-1} |u|^{p-1} u` nodewise.
    pub fn nonlinear_force(&self, u: &Field) -> Field {
        let g = &self.grid;
        let mut out = Field::zeros(self.grid);
        for i in 0..g.nr() {
            let rp = self.r_pow[i];
            let base = i * g.nz();
            for j in 0..g.nz() {
                out.values_mut()[base + j] = self.gamma.values()[base + j]
                    * rp
                    * self.odd_power(u.values()[base + j]);
            }
        }
        out
    }

    /// Hessian form of the nonlinear term:
    /// `sum w Gamma r^{p-1} p |u|^{p-1} a b`.
    pub fn nonlinear_hessian_form(&self, u: &Field, a: &Field, b: &Field) -> f64 {
        let g = &self.grid;
        let pm1 = self.p - 1.0;
        let mut acc = 0.0;
        for i in 0..g.nr() {
            let w = g.weight(i) * self.r_pow[i];
            let base = i * g.nz();
            let mut row = 0.0;
            for j in 0..g.nz() {
                let uu = u.values()[base + j].abs();
                let upow = if self.p == 3.0 { uu * uu } else { uu.powf(pm1) };
                row += self.gamma.values()[base + j]
                    * upow
                    * a.values()[base + j]
                    * b.values()[base + j];
            }
            acc += self.p * w * row;
        }
        acc
    }
}

fn r_powers(grid: CylGrid, p: f64) -> Vec<f64> {
    (0..grid.nr()).map(|i| grid.r(i).powf(p - 1.0)).collect()
}

fn check_gamma_sign(gamma: &Field, mode: Mode) -> Result<(), SolveError> {
    let g = gamma.grid();
    for i in 0..g.nr() {
        for j in 0..g.nz() {
            let v = gamma.at(i, j);
            let bad = match mode {
                Mode::Defocusing => v >= 0.0,
                Mode::Focusing => v <= 0.0,
            };
            if bad {
                return Err(SolveError::GammaSign {
                    mode,
                    value: v,
                    r: g.r(i),
                    z: g.z(j),
                });
            }
        }
    }
    Ok(())
}

/// Discrete energy `J[u]` (the full 3D value, including the `2 pi` factor).
pub fn energy(prob: &Problem, u: &Field) -> Result<f64, SolveError> {
    let quad = prob.op.quadratic_form(u, u)?;
    let nonlin = prob.nonlinear_integral(u);
    Ok(2.0 * core::f64::consts::PI * (0.5 * quad - nonlin / (prob.p + 1.0)))
}

/// Weighted gradient of `J` at `u`: `2 pi (A u - Gamma r^{p-1} |u|^{p-1} u)`.
///
/// Its `w`-inner product with a direction equals the directional derivative
/// of [`energy`].
pub fn el_gradient(prob: &Problem, u: &Field) -> Result<Field, SolveError> {
    let mut out = prob.op.apply(u)?;
    let force = prob.nonlinear_force(u);
    for (o, f) in out.values_mut().iter_mut().zip(force.values()) {
        *o = 2.0 * core::f64::consts::PI * (*o - f);
    }
    Ok(out)
}

/// Euler-Lagrange residual `|A u - Gamma r^{p-1}|u|^{p-1} u|_w` together
/// with its natural scale (the sum of the two term norms).
pub fn el_residual(prob: &Problem, u: &Field) -> Result<(f64, f64), SolveError> {
    let au = prob.op.apply(u)?;
    let force = prob.nonlinear_force(u);
    let mut diff = au.clone();
    for (d, f) in diff.values_mut().iter_mut().zip(force.values()) {
        *d -= f;
    }
    let scale = weighted_norm(&au) + weighted_norm(&force);
    Ok((weighted_norm(&diff), scale))
}

/// Converged ground-state data.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// The scalar field of the state.
    pub u: Field,
    /// Energy `J[u]`.
    pub energy: f64,
    /// Euler-Lagrange residual (weighted norm, absolute).
    pub el_residual: f64,
    /// Scale for the residual: `|A u|_w + |nonlinearity|_w`.
    pub el_scale: f64,
    /// `(J'[u] u, max_i J'[u] e_i)` over the negative basis, normalized by
    /// the gradient scale; both vanish on the Nehari-Pankov set.
    pub nehari_residuals: (f64, f64),
    /// Whether the state is nontrivial (`|u|_w >= 1e-6`).
    pub nontrivial: bool,
    /// Iterations spent in the winning descent run.
    pub iterations: usize,
    /// Number of starts attempted (1 for the defocusing direct method).
    pub starts: usize,
    /// Energies of all distinct converged starts (focusing diagnostics).
    pub start_energies: Vec<f64>,
}
