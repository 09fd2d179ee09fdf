//! Order-one Bessel functions, their zeros, and the matching ratios.
//!
//! Everything here is double precision and real-argument only. `J1` and `K1`
//! (and the `J0`, `K0` needed for their derivatives) are evaluated by power
//! series for small arguments and Hankel-type asymptotic expansions for large
//! ones; the crossover points are chosen so the absolute error stays below
//! 1e-10 on `[1e-8, 50]`.
//!
//! The ratio functions
//!
//! ```text
//! alpha(x) = J1(x) / (x J1'(x)),   beta(x) = K1(x) / (x K1'(x))
//! ```
//!
//! drive the C1-matching machinery of the radial eigenvalue design: `alpha`
//! is strictly increasing between consecutive zeros of `J1'` with poles at
//! those zeros, and `beta` is negative and strictly increasing on `(0, inf)`
//! with `beta -> -1` as `x -> 0+`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec::Vec;
use thiserror::Error;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this, `J0`/`J1` use the ascending power series (no cancellation).
const J_SERIES_CUTOFF: f64 = 2.0;
/// Between the series cutoff and this, `J0`/`J1` use Miller's backward
/// recurrence; above it the Hankel expansion is fully converged.
const J_MILLER_CUTOFF: f64 = 30.0;
/// Below this, `K0`/`K1` use the ascending series; above it the
/// Thompson-Barnett continued fraction.
const K_SERIES_CUTOFF: f64 = 2.0;
/// Arguments beyond this are rejected for the oscillatory functions: the
/// phase `x mod 2*pi` has lost too many digits.
const J_RANGE_MAX: f64 = 1.0e6;
/// `exp(-x)` underflows shortly after this, which would turn `beta` into 0/0.
const K_RANGE_MAX: f64 = 700.0;

/// Errors from special-function evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BesselError {
    /// Argument outside the function's domain (e.g. `x <= 0` for `K1`).
    #[error("argument {0} outside domain")]
    Domain(f64),
    /// Argument beyond the implemented evaluation range.
    #[error("argument {0} beyond implemented range {1}")]
    Range(f64, f64),
    /// `alpha` evaluated within 1e-12 of a zero of `J1'`.
    #[error("pole of alpha: {x} is within 1e-12 of the J1' zero {zero}")]
    Pole { x: f64, zero: f64 },
    /// A requested zero count of 0.
    #[error("at least one zero must be requested")]
    EmptyZeroRequest,
}

// ---------------------------------------------------------------------------
// Power series
// ---------------------------------------------------------------------------

fn j0_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut sum = 1.0;
    let mut term = 1.0;
    for m in 1..200 {
        let m = m as f64;
        term *= -t / (m * m);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for m in 1..200 {
        let m = m as f64;
        term *= -t / (m * (m + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

fn i0_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut sum = 1.0;
    let mut term = 1.0;
    for m in 1..300 {
        let m = m as f64;
        term *= t / (m * m);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn i1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for m in 1..300 {
        let m = m as f64;
        term *= t / (m * (m + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `K0` by the ascending series `-(ln(x/2)+gamma) I0 + sum H_k t^k / (k!)^2`.
fn k0_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut sum = 0.0;
    let mut term = 1.0; // t^k / (k!)^2
    let mut harmonic = 0.0;
    for k in 1..300 {
        let k = k as f64;
        term *= t / (k * k);
        harmonic += 1.0 / k;
        let add = harmonic * term;
        sum += add;
        if add < 1e-17 * (sum.abs() + 1.0) {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0_series(x) + sum
}

/// `K1` by the ascending series
/// `1/x + ln(x/2) I1 - (x/4) sum (H_k + H_{k+1} - 2 gamma) t^k / (k!(k+1)!)`.
fn k1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let mut term = 1.0; // t^k / (k!(k+1)!)
    let mut h_k = 0.0;
    let mut h_k1 = 1.0;
    let mut sum = (h_k + h_k1 - 2.0 * EULER_GAMMA) * term;
    for k in 1..300 {
        let k = k as f64;
        term *= t / (k * (k + 1.0));
        h_k += 1.0 / k;
        h_k1 += 1.0 / (k + 1.0);
        let add = (h_k + h_k1 - 2.0 * EULER_GAMMA) * term;
        sum += add;
        if add.abs() < 1e-17 * (sum.abs() + 1.0) {
            break;
        }
    }
    1.0 / x + (0.5 * x).ln() * i1_series(x) - 0.25 * x * sum
}

// ---------------------------------------------------------------------------
// Asymptotic expansions
// ---------------------------------------------------------------------------

/// Hankel-expansion moduli `P`, `Q` for order `nu` (`mu = 4 nu^2`):
/// `P = sum (-1)^m a_{2m} / x^{2m}`, `Q = sum (-1)^m a_{2m+1} / x^{2m+1}`
/// with `a_k = prod_{j<=k} (mu - (2j-1)^2) / (k! 8^k)`. The series is
/// truncated at its smallest term.
fn hankel_pq(mu: f64, x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0; // a_k / x^k
    let mut prev = f64::INFINITY;
    for k in 1..40u32 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        if term.abs() >= prev {
            break; // divergence onset; stop at the smallest term
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

fn j_asymptotic(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(4.0 * nu * nu, x);
    let chi = x - (0.5 * nu + 0.25) * core::f64::consts::PI;
    (2.0 / (core::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

// ---------------------------------------------------------------------------
// Miller's backward recurrence and the K continued fraction
// ---------------------------------------------------------------------------

/// `(J0(x), J1(x))` by Miller's backward recurrence, normalized through
/// `J0 + 2 (J2 + J4 + ...) = 1`. Cancellation-free at any argument; used in
/// the mid range where both the power series and the Hankel expansion lose
/// digits.
fn j0_j1_miller(x: f64) -> (f64, f64) {
    let start = (x + 12.0 * x.cbrt() + 18.0) as usize;
    let start = start + (start & 1); // even start index
    let xi = 1.0 / x;
    let mut above = 0.0_f64; // J_{k+1}, unnormalized
    let mut here = 1e-30_f64; // J_k
    let mut even_sum = here; // start index is even
    let mut j1_u = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * (k as f64) * xi * here - above;
        above = here;
        here = below;
        if k - 1 == 1 {
            j1_u = here;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            even_sum += here;
        }
        if here.abs() > 1e290 {
            // rescale to dodge overflow on very large start indices
            above /= 1e290;
            here /= 1e290;
            even_sum /= 1e290;
            j1_u /= 1e290;
        }
    }
    let norm = here + 2.0 * even_sum; // J0 once, positive even orders twice
    (here / norm, j1_u / norm)
}

/// `(K0(x), K1(x))` by the Thompson-Barnett continued fraction (the CF2 of
/// the usual `besik` scheme with order 0), valid for `x > 2`.
fn k0_k1_cf(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut a = -a1;
    let mut c = a1;
    let mut q = c;
    let mut s = 1.0 + q * delh;
    for i in 2..1000u32 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    h *= a1;
    let k0 = (core::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

// ---------------------------------------------------------------------------
// Public evaluators
// ---------------------------------------------------------------------------

/// Order-zero Bessel function `J0(x)` for `x >= 0`.
pub fn j0(x: f64) -> Result<f64, BesselError> {
    if !(x >= 0.0) {
        return Err(BesselError::Domain(x));
    }
    if x > J_RANGE_MAX {
        return Err(BesselError::Range(x, J_RANGE_MAX));
    }
    Ok(if x <= J_SERIES_CUTOFF {
        j0_series(x)
    } else if x <= J_MILLER_CUTOFF {
        j0_j1_miller(x).0
    } else {
        j_asymptotic(0.0, x)
    })
}

/// Order-one Bessel function `J1(x)` for `x >= 0`.
pub fn j1(x: f64) -> Result<f64, BesselError> {
    if !(x >= 0.0) {
        return Err(BesselError::Domain(x));
    }
    if x > J_RANGE_MAX {
        return Err(BesselError::Range(x, J_RANGE_MAX));
    }
    Ok(if x <= J_SERIES_CUTOFF {
        j1_series(x)
    } else if x <= J_MILLER_CUTOFF {
        j0_j1_miller(x).1
    } else {
        j_asymptotic(1.0, x)
    })
}

/// `J1'(x) = J0(x) - J1(x)/x`, with the limit value `1/2` at `x = 0`.
pub fn j1_prime(x: f64) -> Result<f64, BesselError> {
    if !(x >= 0.0) {
        return Err(BesselError::Domain(x));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    Ok(j0(x)? - j1(x)? / x)
}

/// Order-zero modified Bessel function `K0(x)` for `x > 0`.
pub fn k0(x: f64) -> Result<f64, BesselError> {
    if !(x > 0.0) {
        return Err(BesselError::Domain(x));
    }
    if x > K_RANGE_MAX {
        return Err(BesselError::Range(x, K_RANGE_MAX));
    }
    Ok(if x <= K_SERIES_CUTOFF {
        k0_series(x)
    } else {
        k0_k1_cf(x).0
    })
}

/// Order-one modified Bessel function `K1(x)` for `x > 0`.
/// Strictly positive, decreasing, `K1(x) ~ 1/x` as `x -> 0+`.
pub fn k1(x: f64) -> Result<f64, BesselError> {
    if !(x > 0.0) {
        return Err(BesselError::Domain(x));
    }
    if x > K_RANGE_MAX {
        return Err(BesselError::Range(x, K_RANGE_MAX));
    }
    Ok(if x <= K_SERIES_CUTOFF {
        k1_series(x)
    } else {
        k0_k1_cf(x).1
    })
}

/// `K1'(x) = -K0(x) - K1(x)/x`; strictly negative for `x > 0`.
pub fn k1_prime(x: f64) -> Result<f64, BesselError> {
    if !(x > 0.0) {
        return Err(BesselError::Domain(x));
    }
    Ok(-k0(x)? - k1(x)? / x)
}

// ---------------------------------------------------------------------------
// Zeros
// ---------------------------------------------------------------------------

/// Bisect `f` for a root inside `[lo, hi]`, assuming a sign change.
/// The bracket is shrunk to relative width ~2^-80, far below 1e-12.
fn bisect_zero(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket has collapsed to adjacent floats
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// First `n` positive zeros of `J1`, strictly increasing.
///
/// McMahon's approximation `(k + 1/4) pi` brackets each zero; bisection
/// refines to full precision.
pub fn j1_zeros(n: usize) -> Result<Vec<f64>, BesselError> {
    if n == 0 {
        return Err(BesselError::EmptyZeroRequest);
    }
    let f = |x: f64| j1_series_or_asym(x);
    let mut zeros = Vec::with_capacity(n);
    for k in 1..=n {
        let guess = (k as f64 + 0.25) * core::f64::consts::PI;
        let (mut lo, mut hi) = (guess - 0.6, guess + 0.6);
        // J1 zeros are within 0.6 of the McMahon guess already for k = 1;
        // widen defensively anyway.
        let mut width = 0.6;
        while f(lo) * f(hi) > 0.0 {
            width *= 1.5;
            lo = guess - width;
            hi = guess + width;
        }
        zeros.push(bisect_zero(lo, hi, f));
    }
    Ok(zeros)
}

/// First `n` positive zeros of `J1'`, strictly increasing.
///
/// Uses the interlacing `j'_k in (j_{k-1}, j_k)` (with `j_0 := 0`): each
/// bracket contains exactly one sign change of `J1'`.
pub fn j1_prime_zeros(n: usize) -> Result<Vec<f64>, BesselError> {
    if n == 0 {
        return Err(BesselError::EmptyZeroRequest);
    }
    let j = j1_zeros(n)?;
    let fp = |x: f64| j0(x).unwrap_or(f64::NAN) - j1_series_or_asym(x) / x;
    let mut zeros = Vec::with_capacity(n);
    let mut left = 1e-3; // J1'(0+) = 1/2 > 0
    for jk in &j {
        zeros.push(bisect_zero(left, jk - 1e-9, fp));
        left = jk + 1e-9;
    }
    Ok(zeros)
}

/// Infallible `J1` for internal zero-finding (arguments are controlled).
fn j1_series_or_asym(x: f64) -> f64 {
    if x <= J_SERIES_CUTOFF {
        j1_series(x)
    } else if x <= J_MILLER_CUTOFF {
        j0_j1_miller(x).1
    } else {
        j_asymptotic(1.0, x)
    }
}

/// Table of the first positive zeros of `J1` and `J1'`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroTable {
    /// Positive zeros of `J1`.
    pub j: Vec<f64>,
    /// Positive zeros of `J1'`.
    pub jp: Vec<f64>,
}

impl BesselZeroTable {
    /// Compute the first `count` zeros of each function.
    pub fn new(count: usize) -> Result<Self, BesselError> {
        Ok(Self {
            j: j1_zeros(count)?,
            jp: j1_prime_zeros(count)?,
        })
    }

    /// Number of zeros stored per list.
    pub fn count(&self) -> usize {
        self.j.len()
    }

    /// Interlacing `jp[k] < j[k] < jp[k+1]` for all stored `k`.
    pub fn interlaces(&self) -> bool {
        let n = self.count();
        (0..n).all(|k| {
            self.jp[k] < self.j[k] && (k + 1 >= n || self.j[k] < self.jp[k + 1])
        })
    }

    /// The admissibility inequality `2 j_1^2 < j_1'^2 + j_2'^2`.
    pub fn admissible(&self) -> bool {
        self.count() >= 2
            && 2.0 * self.j[0] * self.j[0]
                < self.jp[0] * self.jp[0] + self.jp[1] * self.jp[1]
    }
}

// ---------------------------------------------------------------------------
// Matching ratios
// ---------------------------------------------------------------------------

/// `alpha(x) = J1(x) / (x J1'(x))`.
///
/// Strictly increasing on `(0, j_1')` and between consecutive zeros of
/// `J1'`; `alpha -> 1` as `x -> 0+`. Errors with [`BesselError::Pole`] when
/// `x` is within 1e-12 of a zero of `J1'`.
pub fn alpha(x: f64) -> Result<f64, BesselError> {
    if !(x > 0.0) {
        return Err(BesselError::Domain(x));
    }
    let jp = j1_prime(x)?;
    // Two-stage pole test: only hunt for the nearest J1' zero when the
    // denominator is already suspiciously small.
    if jp.abs() < 1e-6 {
        let count = (x / core::f64::consts::PI) as usize + 2;
        if let Ok(zeros) = j1_prime_zeros(count) {
            for z in zeros {
                if (x - z).abs() <= 1e-12 {
                    return Err(BesselError::Pole { x, zero: z });
                }
            }
        }
    }
    Ok(j1(x)? / (x * jp))
}

/// `beta(x) = K1(x) / (x K1'(x))`.
///
/// Negative and strictly increasing on `(0, inf)`; `beta -> -1` as
/// `x -> 0+` and `beta -> 0-` as `x -> inf`.
pub fn beta(x: f64) -> Result<f64, BesselError> {
    if !(x > 0.0) {
        return Err(BesselError::Domain(x));
    }
    Ok(k1(x)? / (x * k1_prime(x)?))
}
