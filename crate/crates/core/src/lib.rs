//! Spectral-gap design and ground states for the cylindrically symmetric
//! nonlinear curl-curl problem.
//!
//! The library works with separable potentials `V(r, x3) = W(r) + P(x3)` on
//! the cylinder, where `W` is a piecewise-constant radial step and `P` is a
//! bounded 1-periodic profile. It provides:
//!
//! - order-one Bessel functions, their zeros, and the matching ratios used to
//!   place a single radial bound state ([`special`]),
//! - eigenvalue design and analysis for the radial step potential
//!   ([`radial`]),
//! - Floquet band structure of the 1-periodic operator ([`periodic`]),
//! - interval-set algebra for spectra, the separable sum
//!   `sigma(L) = sigma(L_r) + sigma(L_p)`, and certified gap checks around
//!   zero ([`spectrum`]),
//! - a weighted finite-difference discretization of the scalar reduction on a
//!   truncated cylinder with eigensolver access ([`grid`], [`operator`],
//!   [`eigen`], [`field3d`]),
//! - ground-state solvers for the defocusing and focusing regimes, plus the
//!   exact fully-radial solution family ([`ground_state`]).
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default `std`
//! feature for embedded or wasm use. All solvers are deterministic given
//! their inputs and seeds.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` rejects NaN along with the out-of-range values; the
// suggested `x <= 0.0` would silently accept it. Index loops over parallel
// stencil arrays stay as written.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod eigen;
pub mod field3d;
pub mod grid;
pub mod ground_state;
pub mod operator;
pub mod periodic;
pub mod radial;
pub mod special;
pub mod spectrum;

mod rng;

pub use grid::{CylGrid, Field};
pub use ground_state::{GroundStateResult, Mode, Problem};
pub use operator::DiscreteOperator;
pub use periodic::{BandStructure, PiecewisePotential1D};
pub use radial::{RadialDesign, StepRadialPotential};
pub use spectrum::{GapCertificate, SpectrumSet};
