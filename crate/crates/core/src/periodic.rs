//! Band structure of the 1-periodic operator `L_p = -d^2/dx^2 + P(x)`.
//!
//! `P` is piecewise constant on a partition of `[0, 1)`, so the fundamental
//! system of `-u'' + (P - nu) u = 0` propagates across each piece in closed
//! form (trigonometric above the piece value, hyperbolic below, linear at
//! equality). The spectrum is `{nu : |tr M(nu)| <= 2}` where `M` is the
//! period map; its trace is the discriminant.
//!
//! Band edges are located from the structure of the discriminant rather than
//! by blind sign scanning: inside band `k` the discriminant crosses zero
//! exactly once, and between consecutive zero crossings it has exactly one
//! extremum, which either overshoots `|Delta| = 2` (open gap) or touches it
//! (closed gap, `nu_{2k} = nu_{2k+1}`). This keeps closed gaps — where
//! `|Delta| - 2` has a double root that defeats bisection — exact.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::spectrum::SpectrumSet;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

/// Gap widths below this are reported as closed by `first_gap`.
const GAP_CLOSED_TOL: f64 = 1e-9;
/// Discriminant-value slack for classifying a gap extremum as touching
/// `|Delta| = 2` (machine-level: the extremum location is polished first).
const TOUCH_TOL: f64 = 1e-12;

/// Errors from band-structure computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BandError {
    /// Breakpoints must start at 0 and increase strictly inside `[0, 1)`.
    #[error("breakpoints must be strictly increasing in [0,1) starting at 0")]
    BadPartition,
    /// Mismatched or empty piece data, or non-finite values.
    #[error("potential pieces malformed")]
    BadPieces,
    /// `K >= 1` bands must be requested.
    #[error("at least one band must be requested")]
    EmptyBandRequest,
    /// An edge could not be located inside the (already expanded) window.
    #[error("band edge {index} not found below nu = {window_top}")]
    EdgeNotFound { index: usize, window_top: f64 },
    /// The first spectral gap is closed: `nu_2 = nu_3`.
    #[error("first spectral gap is closed at nu = {nu2}")]
    GapClosed { nu2: f64 },
}

/// Bounded 1-periodic potential, piecewise constant on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePotential1D {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewisePotential1D {
    /// `breakpoints[i]` is the left end of piece `i`; the first must be 0 and
    /// the list strictly increasing inside `[0, 1)`. `values[i]` is the
    /// potential on `[breakpoints[i], breakpoints[i+1])`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, BandError> {
        if breakpoints.is_empty()
            || breakpoints.len() != values.len()
            || values.iter().any(|v| !v.is_finite())
        {
            return Err(BandError::BadPieces);
        }
        if breakpoints[0] != 0.0 {
            return Err(BandError::BadPartition);
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) || w[1] >= 1.0 {
                return Err(BandError::BadPartition);
            }
        }
        if *breakpoints.last().unwrap() >= 1.0 {
            return Err(BandError::BadPartition);
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// Constant potential (a single piece).
    pub fn constant(c: f64) -> Self {
        Self {
            breakpoints: vec![0.0],
            values: vec![c],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `x` (any real; evaluated 1-periodically).
    pub fn value(&self, x: f64) -> f64 {
        let frac = x - x.floor();
        // Last piece whose left end is <= frac.
        let mut v = *self.values.last().unwrap();
        for (i, &b) in self.breakpoints.iter().enumerate() {
            if frac >= b {
                v = self.values[i];
            } else {
                break;
            }
        }
        v
    }

    /// `int_0^x P(s) ds` for any real `x` (1-periodic extension).
    fn cumulative(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        let lengths = self.lengths();
        let per_period: f64 = self
            .values
            .iter()
            .zip(&lengths)
            .map(|(v, l)| v * l)
            .sum();
        let whole = x.floor();
        let frac = x - whole;
        let mut partial = 0.0;
        for i in 0..n {
            let left = self.breakpoints[i];
            let right = left + lengths[i];
            if frac > left {
                partial += self.values[i] * (frac.min(right) - left);
            }
        }
        whole * per_period + partial
    }

    /// Exact average of `P` over `[lo, hi]`; second-order grid sampling for
    /// piecewise-constant potentials (see the radial analogue).
    pub fn average_on(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo < hi);
        (self.cumulative(hi) - self.cumulative(lo)) / (hi - lo)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Piece lengths, summing to the period 1.
    fn lengths(&self) -> Vec<f64> {
        let n = self.breakpoints.len();
        (0..n)
            .map(|i| {
                let hi = if i + 1 < n { self.breakpoints[i + 1] } else { 1.0 };
                hi - self.breakpoints[i]
            })
            .collect()
    }
}

/// Period map of `-u'' + (P - nu) u = 0` acting on `(u, u')`.
///
/// Product of per-piece closed-form propagators; `det = 1` to rounding by
/// Wronskian constancy.
pub fn monodromy(p: &PiecewisePotential1D, nu: f64) -> [[f64; 2]; 2] {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for (&c, len) in p.values.iter().zip(p.lengths()) {
        let piece = piece_propagator(nu - c, len);
        m = mat_mul(piece, m);
    }
    m
}

/// Propagator over a piece of length `len` where `u'' = -(k2) u`.
fn piece_propagator(k2: f64, len: f64) -> [[f64; 2]; 2] {
    // Near k2 = 0 the trigonometric/hyperbolic forms lose digits to 0/0;
    // the quadratic Taylor forms are exact to O(k2^2 len^4) there.
    if k2.abs() < 1e-12 {
        let s = len * (1.0 - k2 * len * len / 6.0);
        return [[1.0 - 0.5 * k2 * len * len, s], [-k2 * s, 1.0 - 0.5 * k2 * len * len]];
    }
    if k2 > 0.0 {
        let k = k2.sqrt();
        let (s, c) = (k * len).sin_cos();
        [[c, s / k], [-k * s, c]]
    } else {
        let k = (-k2).sqrt();
        let (s, c) = ((k * len).sinh(), (k * len).cosh());
        [[c, s / k], [k * s, c]]
    }
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Floquet discriminant `Delta(nu) = tr M(nu)`.
pub fn discriminant(p: &PiecewisePotential1D, nu: f64) -> f64 {
    let m = monodromy(p, nu);
    m[0][0] + m[1][1]
}

/// Band edges `nu_1 < nu_2 <= nu_3 < nu_4 <= ...` of the periodic operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    edges: Vec<f64>,
}

impl BandStructure {
    /// Flat edge list, length `2K`.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Number of bands.
    pub fn count(&self) -> usize {
        self.edges.len() / 2
    }

    /// Band `k` (0-based) as `[lower, upper]`.
    pub fn band(&self, k: usize) -> [f64; 2] {
        [self.edges[2 * k], self.edges[2 * k + 1]]
    }

    /// All bands in order.
    pub fn bands(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.count()).map(|k| self.band(k))
    }

    /// The spectrum as an interval set (no half-line: only the computed
    /// bands are represented).
    pub fn to_spectrum(&self) -> SpectrumSet {
        let intervals: Vec<[f64; 2]> = self.bands().collect();
        SpectrumSet::from_parts(&[], &intervals, None)
    }
}

/// Compute the first `k_bands` spectral bands.
///
/// Scan structure per band: locate the single zero crossing of the
/// discriminant inside the band, then the single extremum between
/// consecutive zero crossings; compare the extremal value against `-2`/`+2`
/// to classify the gap as open or closed and bisect for the edges of open
/// gaps.
pub fn band_edges(
    p: &PiecewisePotential1D,
    k_bands: usize,
) -> Result<BandStructure, BandError> {
    if k_bands == 0 {
        return Err(BandError::EmptyBandRequest);
    }
    let f = |nu: f64| discriminant(p, nu);

    // Window: free-spectrum asymptotics bound band K below
    // max P + (2 K pi)^2 + 10.
    let two_k_pi = 2.0 * k_bands as f64 * core::f64::consts::PI;
    let window_top = p.max_value() + two_k_pi * two_k_pi + 10.0;

    let mut edges = Vec::with_capacity(2 * k_bands);

    // nu_1: first crossing of Delta = 2 scanning up from below the
    // spectrum. Below the lowest band Delta > 2 and decreases.
    let mut lo = p.min_value() - 1.0;
    while f(lo) <= 2.0 {
        lo -= (p.max_value() - p.min_value()).abs() + 1.0;
    }
    let nu1 = scan_and_bisect(&f, lo, window_top, 2.0, Direction::Down)
        .ok_or(BandError::EdgeNotFound {
            index: 1,
            window_top,
        })?;
    edges.push(nu1);

    // Zeros of Delta, one per band, delimit the search for extrema.
    let mut zeros = Vec::with_capacity(k_bands + 1);
    let mut from = nu1;
    for _ in 0..=k_bands {
        let level = 0.0;
        // Band k's zero: Delta crosses 0 downward for odd bands, upward for
        // even (alternating); scan_and_bisect handles either direction.
        let z = scan_and_bisect(&f, from, window_top, level, Direction::Any).ok_or(
            BandError::EdgeNotFound {
                index: edges.len() + 1,
                window_top,
            },
        )?;
        zeros.push(z);
        from = z + scan_step(p);
    }

    // Between zeros z_k and z_{k+1}: one extremum m; the gap edges bracket
    // it (or coincide with it when closed).
    for k in 0..k_bands {
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 }; // extremum of sign*Delta is a max
        let g = |nu: f64| sign * f(nu);
        let rough = maximize_unimodal(&g, zeros[k], zeros[k + 1]);
        let m = polish_extremum(&g, zeros[k], zeros[k + 1], rough);
        let gm = g(m);
        // In a gap region sign*Delta peaks at >= 2, equality iff closed.
        if gm <= 2.0 + TOUCH_TOL {
            edges.push(m);
            edges.push(m);
        } else {
            let left = bisect_level(&g, zeros[k], m, 2.0);
            let right = bisect_level(&g, zeros[k + 1], m, 2.0);
            edges.push(left);
            edges.push(right);
        }
    }
    // edges currently: nu_1, then pairs (nu_{2k}, nu_{2k+1}) for k = 1..K;
    // the last entry begins band K+1, so drop it.
    edges.truncate(2 * k_bands);

    // Structural sanity: strictly increasing bands, each containing its zero
    // crossing. A violation means the scan resolution missed a feature.
    for k in 0..k_bands {
        let lo = edges[2 * k];
        let hi = edges[2 * k + 1];
        if !(lo <= zeros[k] && zeros[k] <= hi) || (k > 0 && lo < edges[2 * k - 1]) {
            return Err(BandError::EdgeNotFound {
                index: 2 * k + 1,
                window_top,
            });
        }
    }
    Ok(BandStructure { edges })
}

/// Refine an extremum of `g` by bisecting its central-difference derivative.
/// Golden section alone resolves a flat extremum only to ~sqrt(eps); the
/// derivative crossing is transversal and pins it to ~1e-10.
fn polish_extremum(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, rough: f64) -> f64 {
    let h = 1e-6 * (1.0 + rough.abs());
    let dg = |x: f64| (g(x + h) - g(x - h)) / (2.0 * h);
    // Expand a bracket around the rough location until the derivative
    // changes sign (positive left of a maximum, negative right of it).
    let mut w = 4.0 * h;
    let (mut a, mut b) = (rough, rough);
    let mut found = false;
    for _ in 0..40 {
        a = (rough - w).max(lo + h);
        b = (rough + w).min(hi - h);
        if dg(a) > 0.0 && dg(b) < 0.0 {
            found = true;
            break;
        }
        if a <= lo + h && b >= hi - h {
            break;
        }
        w *= 4.0;
    }
    if !found {
        return rough; // flat to FD noise: golden-section answer stands
    }
    let mut fa = dg(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = dg(mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

enum Direction {
    /// Crossing from above the level to below.
    Down,
    /// Either direction.
    Any,
}

fn scan_step(p: &PiecewisePotential1D) -> f64 {
    // Coarse scan resolution; bands of the unit-period operator are never
    // narrower than this in the windows we probe.
    let spread = p.max_value() - p.min_value();
    (0.05_f64).min(0.5 / (1.0 + spread)).max(1e-4)
}

/// March from `from` in steps until `f` crosses `level`, then bisect.
fn scan_and_bisect(
    f: &impl Fn(f64) -> f64,
    from: f64,
    window_top: f64,
    level: f64,
    dir: Direction,
) -> Option<f64> {
    let step = 0.05;
    let mut x0 = from;
    let mut f0 = f(x0) - level;
    let mut x1 = x0;
    loop {
        x1 += step;
        if x1 > window_top {
            return None;
        }
        let f1 = f(x1) - level;
        let crossed = match dir {
            Direction::Down => f0 > 0.0 && f1 <= 0.0,
            Direction::Any => f0 * f1 <= 0.0 && (f0 != 0.0 || f1 != 0.0),
        };
        if crossed {
            // Bisect within [x0, x1].
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = f(mid) - level;
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            return Some(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
}

/// Golden-section maximum of a unimodal function on `[a, b]`.
fn maximize_unimodal(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..200 {
        if hi - lo < 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Bisect `g = 2` between `inside` (where `g < 2`) and `outside`
/// (where `g > 2`).
fn bisect_level(g: &impl Fn(f64) -> f64, inside: f64, outside: f64, level: f64) -> f64 {
    let (mut a, mut b) = (inside, outside);
    let mut fa = g(a) - level;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (mid - a).abs() < f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
        let fm = g(mid) - level;
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Spectrum of `L_p` truncated to the first `k_bands` bands.
pub fn spectrum_1d(
    p: &PiecewisePotential1D,
    k_bands: usize,
) -> Result<SpectrumSet, BandError> {
    Ok(band_edges(p, k_bands)?.to_spectrum())
}

/// The first spectral gap `(nu_2, nu_3)`; errors if it is closed.
pub fn first_gap(p: &PiecewisePotential1D) -> Result<(f64, f64), BandError> {
    let b = band_edges(p, 2)?;
    let nu2 = b.edges()[1];
    let nu3 = b.edges()[2];
    if nu3 - nu2 <= GAP_CLOSED_TOL {
        return Err(BandError::GapClosed { nu2 });
    }
    Ok((nu2, nu3))
}

/// Lowest band edge `nu_1 = min sigma(L_p)`.
pub fn ground_edge(p: &PiecewisePotential1D) -> Result<f64, BandError> {
    Ok(band_edges(p, 1)?.edges()[0])
}
