//! Symmetric eigensolvers: Sturm bisection for tridiagonal matrices, Jacobi
//! for small dense projections, and a restarted Rayleigh-Ritz (Lanczos-type)
//! iteration for large sparse operators given by their matrix action.
//!
//! Everything here works on plain Euclidean inner products; the weighted
//! operators of the discretization are symmetrized with `D^{1/2} A D^{-1/2}`
//! before they reach these routines.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::rng::SplitMix64;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    /// Requested more eigenpairs than the dimension holds.
    #[error("requested {requested} eigenpairs of a dimension-{dim} operator")]
    TooMany { requested: usize, dim: usize },
    /// The iteration did not reach the residual tolerance.
    #[error("eigensolver stalled: {converged}/{requested} pairs converged after {restarts} restarts")]
    NoConvergence {
        converged: usize,
        requested: usize,
        restarts: usize,
    },
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal: Sturm sequences
// ---------------------------------------------------------------------------

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)` strictly
/// below `x`, by the Sturm sequence of leading-minor pivots.
pub fn tridiag_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..n {
        let offsq = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - offsq / d;
        if d == 0.0 {
            d = 1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues of a symmetric tridiagonal matrix, each
/// located by bisection on the Sturm count inside Gershgorin bounds.
pub fn tridiag_lowest(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    assert!(k <= n, "k = {k} exceeds dimension {n}");
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    let (mut glo, mut ghi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let radius = if i == 0 { 0.0 } else { off[i - 1].abs() }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        glo = glo.min(diag[i] - radius);
        ghi = ghi.max(diag[i] + radius);
    }
    (0..k)
        .map(|idx| {
            // Smallest x with count_below(x) >= idx+1.
            let (mut lo, mut hi) = (glo, ghi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if tridiag_count_below(diag, off, mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Eigenvector of a symmetric tridiagonal matrix for an approximate
/// eigenvalue, by a few steps of shifted inverse iteration (Thomas solves).
pub fn tridiag_eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let mut rng = SplitMix64::new(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    normalize(&mut v);
    // A tiny shift regularizes the nearly singular solve.
    let shift = lambda + 1e-11 * (1.0 + lambda.abs());
    for _ in 0..8 {
        v = solve_tridiag_shifted(diag, off, shift, &v);
        normalize(&mut v);
    }
    v
}

/// Solve `(T - shift) x = b` by the Thomas algorithm with partial damping of
/// zero pivots.
fn solve_tridiag_shifted(diag: &[f64], off: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n]; // modified upper coefficients
    let mut d = vec![0.0; n]; // modified rhs
    let mut denom = diag[0] - shift;
    if denom.abs() < 1e-300 {
        denom = 1e-300;
    }
    if n > 1 {
        c[0] = off[0] / denom;
    }
    d[0] = b[0] / denom;
    for i in 1..n {
        let mut m = diag[i] - shift - off[i - 1] * c[i - 1];
        if m.abs() < 1e-300 {
            m = 1e-300;
        }
        if i + 1 < n {
            c[i] = off[i] / m;
        }
        d[i] = (b[i] - off[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

// ---------------------------------------------------------------------------
// Small dense symmetric: cyclic Jacobi
// ---------------------------------------------------------------------------

/// Eigen-decomposition of a small dense symmetric matrix (row-major, n*n)
/// by cyclic Jacobi rotations. Returns eigenvalues ascending with the
/// corresponding orthonormal eigenvectors as rows of the second result.
pub fn jacobi_eigen(mat: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = mat.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut offdiag = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                offdiag += a[p * n + q] * a[p * n + q];
            }
        }
        if offdiag.sqrt() < 1e-14 * (1.0 + frobenius(&a, n)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p * n + i];
                    let aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    // Sort ascending by eigenvalue; eigenvector j is column j of v.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).expect("finite"));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (row, &col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[row * n + i] = v[i * n + col];
        }
    }
    (values, vectors)
}

fn frobenius(a: &[f64], n: usize) -> f64 {
    a.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Large sparse symmetric: restarted Rayleigh-Ritz
// ---------------------------------------------------------------------------

/// Options for [`lowest_eigenpairs`].
#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Basis size before a restart (thick restart keeps the best Ritz
    /// vectors). Memory usage is `max_basis` vectors of the problem size.
    pub max_basis: usize,
    /// Restart cycles before giving up.
    pub max_restarts: usize,
    /// Residual tolerance relative to the operator-norm estimate.
    pub tol: f64,
    /// Absolute residual tolerance, added to the relative one.
    pub tol_abs: f64,
    /// Optional starting vector (e.g. an analytic approximation).
    pub initial: Option<Vec<f64>>,
    /// Seed for the random start and breakdown recovery.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_basis: 48,
            max_restarts: 600,
            tol: 1e-9,
            tol_abs: 0.0,
            initial: None,
            seed: 0x1a2b3c4d,
        }
    }
}

/// Result of the iterative eigensolver.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Euclidean-orthonormal eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// Final residual norms `|A x - theta x|`.
    pub residuals: Vec<f64>,
    /// Total operator applications used.
    pub matvecs: usize,
}

/// The `k` algebraically smallest eigenpairs of a symmetric operator given
/// through its action `apply(input, output)`.
///
/// Lanczos-type expansion with full reorthogonalization and dense
/// Rayleigh-Ritz extraction every few steps; restarts keep the lowest Ritz
/// vectors plus the residual direction of the first unconverged pair.
/// Convergence: `|A x - theta x| <= tol * max(1, |theta_max|)` with
/// `theta_max` the largest Ritz magnitude seen (operator-norm scale).
pub fn lowest_eigenpairs(
    n: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    k: usize,
    opts: &LanczosOptions,
) -> Result<EigenPairs, EigenError> {
    if k == 0 || n == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
            matvecs: 0,
        });
    }
    if k > n {
        return Err(EigenError::TooMany {
            requested: k,
            dim: n,
        });
    }
    let max_basis = opts.max_basis.clamp(k + 2, n.max(3));
    let mut rng = SplitMix64::new(opts.seed);
    let mut matvecs = 0usize;
    let mut norm_scale = 1.0f64;

    // Invariant: the projected matrix H holds exact entries for columns
    // 0..len-2; the newest basis vector's column is pending and gets filled
    // by the next expansion step.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis + 1);
    let mut h: Vec<f64> = vec![0.0; (max_basis + 1) * (max_basis + 1)];
    let hdim = max_basis + 1;

    let mut first = match &opts.initial {
        Some(v) if v.len() == n => v.clone(),
        _ => (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect(),
    };
    if normalize(&mut first) < 1e-300 {
        first = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        normalize(&mut first);
    }
    basis.push(first);

    let mut work = vec![0.0; n];
    let mut last_best = f64::INFINITY;
    let mut stall_cycles = 0usize;
    for _cycle in 0..opts.max_restarts {
        // Expand by a burst (filling pending columns), then extract.
        let target = (basis.len() + 8).min(max_basis + 1).min(n);
        let mut exhausted = basis.len() >= n;
        while basis.len() < target {
            let m = basis.len();
            apply(&basis[m - 1], &mut work);
            matvecs += 1;
            let mut w = work.clone();
            let mut coeffs = vec![0.0; m];
            for (j, b) in basis.iter().enumerate() {
                let c = dot(&w, b);
                coeffs[j] = c;
                axpy(&mut w, -c, b);
            }
            for (j, b) in basis.iter().enumerate() {
                let c = dot(&w, b);
                coeffs[j] += c;
                axpy(&mut w, -c, b);
            }
            for (j, c) in coeffs.iter().enumerate() {
                h[j * hdim + (m - 1)] = *c;
                h[(m - 1) * hdim + j] = *c;
            }
            let beta = normalize(&mut w);
            if beta < 1e-13 * norm_scale {
                // Invariant subspace hit: continue along a fresh random
                // direction orthogonal to everything so far.
                w = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
                for b in basis.iter() {
                    let c = dot(&w, b);
                    axpy(&mut w, -c, b);
                }
                for b in basis.iter() {
                    let c = dot(&w, b);
                    axpy(&mut w, -c, b);
                }
                if normalize(&mut w) < 1e-13 {
                    exhausted = true;
                    break;
                }
                basis.push(w);
                continue;
            }
            h[(m - 1) * hdim + m] = beta;
            h[m * hdim + (m - 1)] = beta;
            basis.push(w);
        }

        // Columns 0..len-2 are exact; extract on that block.
        let m_eff = if exhausted {
            basis.len()
        } else {
            basis.len() - 1
        };
        if exhausted && m_eff > 0 {
            // Fill the pending last column so the full block is usable.
            let m = basis.len();
            apply(&basis[m - 1], &mut work);
            matvecs += 1;
            for (j, b) in basis.iter().enumerate() {
                let c = dot(&work, b);
                h[j * hdim + (m - 1)] = c;
                h[(m - 1) * hdim + j] = c;
            }
        }
        if m_eff == 0 {
            continue;
        }
        let mut hm = vec![0.0; m_eff * m_eff];
        for i in 0..m_eff {
            for j in 0..m_eff {
                hm[i * m_eff + j] = h[i * hdim + j];
            }
        }
        let (theta, y) = jacobi_eigen(&hm, m_eff);
        norm_scale = norm_scale
            .max(theta.first().map_or(0.0, |t| t.abs()))
            .max(theta.last().map_or(0.0, |t| t.abs()));

        let want = k.min(m_eff);
        let mut ritz: Vec<Vec<f64>> = Vec::with_capacity(want);
        let mut residuals = Vec::with_capacity(want);
        for idx in 0..want {
            let mut x = vec![0.0; n];
            for (j, b) in basis.iter().take(m_eff).enumerate() {
                axpy(&mut x, y[idx * m_eff + j], b);
            }
            normalize(&mut x);
            apply(&x, &mut work);
            matvecs += 1;
            let mut r = work.clone();
            axpy(&mut r, -theta[idx], &x);
            residuals.push(norm(&r));
            ritz.push(x);
        }
        let threshold = opts.tol * norm_scale.max(1.0) + opts.tol_abs;
        let converged = residuals.iter().take_while(|r| **r <= threshold).count();
        if (converged >= k && want == k) || m_eff >= n || exhausted {
            return Ok(EigenPairs {
                values: theta[..want].to_vec(),
                vectors: ritz,
                residuals,
                matvecs,
            });
        }
        if basis.len() < max_basis {
            continue; // room to keep expanding before a restart
        }

        // Stall detection across restart cycles.
        let best = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
        if best > 0.9 * last_best {
            stall_cycles += 1;
        } else {
            stall_cycles = 0;
        }
        last_best = best;
        if stall_cycles > 25 {
            return Err(EigenError::NoConvergence {
                converged,
                requested: k,
                restarts: opts.max_restarts,
            });
        }

        // Thick restart: keep the lowest Ritz vectors; the expansion then
        // continues from the residual direction of the first unconverged
        // pair, whose projected column is pending by the invariant.
        let keep = (k + 8).min(m_eff.saturating_sub(2)).max(1);
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis + 1);
        for idx in 0..keep {
            let mut x = vec![0.0; n];
            for (j, b) in basis.iter().take(m_eff).enumerate() {
                axpy(&mut x, y[idx * m_eff + j], b);
            }
            for b in new_basis.iter() {
                let c = dot(&x, b);
                axpy(&mut x, -c, b);
            }
            if normalize(&mut x) > 1e-13 {
                new_basis.push(x);
            }
        }
        h.iter_mut().for_each(|v| *v = 0.0);
        for (i, t) in theta.iter().take(new_basis.len()).enumerate() {
            h[i * hdim + i] = *t;
        }
        let probe = converged.min(want - 1);
        apply(&ritz[probe], &mut work);
        matvecs += 1;
        let mut r = work.clone();
        axpy(&mut r, -theta[probe], &ritz[probe]);
        for b in new_basis.iter() {
            let c = dot(&r, b);
            axpy(&mut r, -c, b);
        }
        if normalize(&mut r) < 1e-13 {
            r = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            for b in new_basis.iter() {
                let c = dot(&r, b);
                axpy(&mut r, -c, b);
            }
            normalize(&mut r);
        }
        new_basis.push(r);
        basis = new_basis;
    }

    Err(EigenError::NoConvergence {
        converged: 0,
        requested: k,
        restarts: opts.max_restarts,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
    n
}
