//! Constrained minimization on the Nehari-Pankov set (focusing regime).
//!
//! The discrete Hilbert space splits along the spectrum of the operator into
//! `H^- = span{negative eigenvectors}` and its `w`-orthogonal complement
//! `H^+`. For a direction `w` in `H^+`, the inner problem maximizes `J` over
//! the cone `{t w + v : t > 0, v in H^-}`; its critical point lies on the
//! constraint set where `J'[U]` annihilates `span{U} + H^-`. The outer
//! problem minimizes the resulting energy over the unit `w`-sphere of `H^+`
//! by projected gradient descent with Barzilai-Borwein steps and restarts
//! from several seeds.
//!
//! In the eigenbasis the quadratic form is diagonal, which makes the inner
//! problem a small concave maximization in `1 + dim H^-` variables: closed
//! form on the ray when `H^-` is trivial, damped Newton otherwise.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::{
    el_gradient, el_residual, energy, GroundStateResult, Mode, Problem, SolveError,
    SolverOptions, NONTRIVIAL_NORM,
};
use crate::grid::{weighted_inner, weighted_norm, Field};
use crate::rng::SplitMix64;
use alloc::vec;
use alloc::vec::Vec;

/// Eigenvalues within this of zero violate the gap hypothesis numerically.
const ZERO_EIGEN_TOL: f64 = 1e-8;

/// Spectral decomposition data at the split point zero.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    /// `w`-orthonormal eigenfields with negative eigenvalues.
    pub basis: Vec<Field>,
    /// Their eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Distance from zero to the computed discrete spectrum.
    pub gap_at_zero: f64,
    /// Eigenfield of the smallest nonnegative eigenvalue (outer seed).
    pub lowest_positive: Field,
}

/// All discrete eigenpairs below zero (up to `k_neg_max`), plus the first
/// nonnegative one.
///
/// The count is certified by computing one pair beyond the negatives: if
/// every computed eigenvalue is negative at the cap, the split is refused.
/// Any eigenvalue within 1e-8 of zero is a numerical violation of the gap
/// hypothesis and is also refused.
pub fn spectral_split(prob: &Problem, k_neg_max: usize) -> Result<SpectralSplit, SolveError> {
    if prob.mode() != Mode::Focusing {
        return Err(SolveError::ModeMismatch {
            expected: Mode::Focusing,
        });
    }
    let n = prob.operator().len();
    let cap = (k_neg_max + 1).min(n);
    let mut k = 1usize;
    let pairs = loop {
        let pairs = prob.operator().eigs_lowest(k, None)?;
        let all_negative = pairs.iter().all(|(v, _)| *v < 0.0);
        if !all_negative {
            break pairs;
        }
        if k >= cap {
            return Err(SolveError::KNegMaxExceeded { cap: k_neg_max });
        }
        k = (4 * k).min(cap);
    };
    for (v, _) in &pairs {
        if v.abs() < ZERO_EIGEN_TOL {
            return Err(SolveError::NearZeroEigenvalue(*v));
        }
    }
    let mut basis = Vec::new();
    let mut values = Vec::new();
    let mut lowest_positive = None;
    let mut gap = f64::INFINITY;
    for (v, f) in pairs {
        gap = gap.min(v.abs());
        if v < 0.0 {
            values.push(v);
            basis.push(f);
        } else if lowest_positive.is_none() {
            lowest_positive = Some(f);
        }
    }
    Ok(SpectralSplit {
        basis,
        values,
        gap_at_zero: gap,
        lowest_positive: lowest_positive.expect("loop exits with a nonnegative pair"),
    })
}

/// The critical point of `J` on the cone `{t w + v}` over a positive
/// direction.
#[derive(Debug, Clone)]
pub struct NehariPoint {
    /// `U = t w + sum c_i e_i`.
    pub field: Field,
    pub t: f64,
    pub v_coeffs: Vec<f64>,
    /// `|J'[U]U|` relative to the energy-term scale.
    pub ray_residual: f64,
    /// `max_i |J'[U]e_i|`, same normalization.
    pub basis_residual: f64,
}

/// Maximize `J` over `{t w_plus + v : t > 0, v in H^-}`.
///
/// `w_plus` must be nonzero and `w`-orthogonal to the negative basis. With a
/// trivial `H^-` and homogeneous nonlinearity the maximizer on the ray has
/// the closed form `t = (b(w,w) / int Gamma |w|^{p+1})^{1/(p-1)}`; otherwise
/// a damped Newton iteration exploits the strict concavity of the inner
/// problem. `warm` seeds the iteration with a previous `(t, coeffs)` pair.
pub fn nehari_project(
    prob: &Problem,
    split: &SpectralSplit,
    w_plus: &Field,
    warm: Option<(f64, &[f64])>,
    tol_inner: f64,
) -> Result<NehariPoint, SolveError> {
    let wnorm = weighted_norm(w_plus);
    if !(wnorm > 0.0) {
        return Err(SolveError::NotInPositiveSubspace { overlap: f64::NAN });
    }
    for e in &split.basis {
        let overlap = weighted_inner(w_plus, e)?.abs() / wnorm;
        if overlap > 1e-8 {
            return Err(SolveError::NotInPositiveSubspace { overlap });
        }
    }
    let b_w = prob.operator().quadratic_form(w_plus, w_plus)?;
    if !(b_w > 0.0) {
        return Err(SolveError::NoNehariPoint(b_w));
    }
    let p = prob.exponent();
    let m = split.basis.len();

    // Ray-only closed form.
    let gamma_w = prob.nonlinear_integral(w_plus);
    let t0 = if gamma_w > 0.0 {
        (b_w / gamma_w).powf(1.0 / (p - 1.0))
    } else {
        return Err(SolveError::NoNehariPoint(gamma_w));
    };
    if m == 0 {
        let mut field = w_plus.clone();
        for v in field.values_mut() {
            *v *= t0;
        }
        let (ray, _) = nehari_residuals(prob, split, &field)?;
        return Ok(NehariPoint {
            field,
            t: t0,
            v_coeffs: Vec::new(),
            ray_residual: ray,
            basis_residual: 0.0,
        });
    }

    // Damped Newton on (t, c_1..c_m); quadratic part is diagonal in the
    // eigenbasis (b(w, e_i) = 0, b(e_i, e_j) = lambda_i delta_ij).
    let mut t = warm.map_or(t0, |(wt, _)| wt.max(1e-8));
    let mut coeffs: Vec<f64> = match warm {
        Some((_, c)) if c.len() == m => c.to_vec(),
        _ => vec![0.0; m],
    };
    let assemble = |t: f64, c: &[f64]| -> Field {
        let mut u = w_plus.clone();
        for v in u.values_mut() {
            *v *= t;
        }
        for (ci, e) in c.iter().zip(&split.basis) {
            for (uv, ev) in u.values_mut().iter_mut().zip(e.values()) {
                *uv += ci * ev;
            }
        }
        u
    };
    let phi = |prob: &Problem, t: f64, c: &[f64], u: &Field| -> f64 {
        let mut quad = 0.5 * t * t * b_w;
        for (ci, li) in c.iter().zip(&split.values) {
            quad += 0.5 * ci * ci * li;
        }
        quad - prob.nonlinear_integral(u) / (p + 1.0)
    };

    let mut u = assemble(t, &coeffs);
    let mut value = phi(prob, t, &coeffs, &u);
    let dim = m + 1;
    let mut converged = false;
    for _ in 0..200 {
        let force = prob.nonlinear_force(&u);
        let mut grad = vec![0.0; dim];
        grad[0] = t * b_w - weighted_inner(&force, w_plus)?;
        for i in 0..m {
            grad[i + 1] = coeffs[i] * split.values[i] - weighted_inner(&force, &split.basis[i])?;
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let scale = value.abs().max(t * t * b_w).max(1.0);
        if gnorm <= tol_inner * scale {
            converged = true;
            break;
        }
        // Hessian in the (t, c) coordinates.
        let mut hess = vec![0.0; dim * dim];
        hess[0] = b_w - prob.nonlinear_hessian_form(&u, w_plus, w_plus);
        for i in 0..m {
            let hti = -prob.nonlinear_hessian_form(&u, w_plus, &split.basis[i]);
            hess[i + 1] = hti;
            hess[(i + 1) * dim] = hti;
            for j in i..m {
                let mut hij = -prob.nonlinear_hessian_form(&u, &split.basis[i], &split.basis[j]);
                if i == j {
                    hij += split.values[i];
                }
                hess[(i + 1) * dim + (j + 1)] = hij;
                hess[(j + 1) * dim + (i + 1)] = hij;
            }
        }
        // Ascent direction: Newton if the (negated) solve is an ascent,
        // otherwise plain gradient.
        let mut dir = solve_dense(&hess, &grad, dim).map(|d| {
            let mut d = d;
            for x in d.iter_mut() {
                *x = -*x;
            }
            d
        });
        if let Some(d) = &dir {
            let dg: f64 = d.iter().zip(&grad).map(|(a, b)| a * b).sum();
            if !(dg > 0.0) || d.iter().any(|x| !x.is_finite()) {
                dir = None;
            }
        }
        let dir = dir.unwrap_or_else(|| grad.clone());
        let dg: f64 = dir.iter().zip(&grad).map(|(a, b)| a * b).sum();

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let t_new = t + step * dir[0];
            if t_new > 0.0 {
                let c_new: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c + step * dir[i + 1])
                    .collect();
                let u_new = assemble(t_new, &c_new);
                let v_new = phi(prob, t_new, &c_new, &u_new);
                if v_new >= value + 1e-4 * step * dg {
                    t = t_new;
                    coeffs = c_new;
                    u = u_new;
                    value = v_new;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        // Re-check at the rounding floor before giving up.
        let force = prob.nonlinear_force(&u);
        let mut g0 = t * b_w - weighted_inner(&force, w_plus)?;
        let mut worst: f64 = g0.abs();
        for i in 0..m {
            g0 = coeffs[i] * split.values[i] - weighted_inner(&force, &split.basis[i])?;
            worst = worst.max(g0.abs());
        }
        if worst > 1e-6 * value.abs().max(1.0) {
            return Err(SolveError::InnerNoConvergence);
        }
    }
    let (ray, basis_res) = nehari_residuals(prob, split, &u)?;
    Ok(NehariPoint {
        field: u,
        t,
        v_coeffs: coeffs,
        ray_residual: ray,
        basis_residual: basis_res,
    })
}

/// `(|J'[U]U|, max_i |J'[U]e_i|)` normalized by the energy-term scale.
pub fn nehari_residuals(
    prob: &Problem,
    split: &SpectralSplit,
    u: &Field,
) -> Result<(f64, f64), SolveError> {
    let quad = prob.operator().quadratic_form(u, u)?;
    let nonlin = prob.nonlinear_integral(u);
    let denom = quad.abs() + nonlin.abs() + 1e-300;
    let ray = (quad - nonlin).abs() / denom;
    let grad = el_gradient(prob, u)?;
    let gscale = 2.0 * core::f64::consts::PI * denom / weighted_norm(u).max(1e-300);
    let mut worst = 0.0f64;
    for e in &split.basis {
        worst = worst.max(weighted_inner(&grad, e)?.abs());
    }
    Ok((ray, worst / gscale.max(1e-300)))
}

/// Gaussian elimination with partial pivoting for the small dense Newton
/// systems. Returns `None` on a vanishing pivot.
fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for row in (col + 1)..n {
            if m[row * n + col].abs() > m[piv * n + col].abs() {
                piv = row;
            }
        }
        if m[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for row in (col + 1)..n {
            let f = m[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= m[col * n + k] * x[k];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

/// Hessian of `J` restricted to `span{U} + H^-` at `u`, in the
/// `(u-direction, e_1..e_m)` coordinates; used to verify the strict
/// concavity of the inner problem at a solution.
pub fn restricted_hessian(
    prob: &Problem,
    split: &SpectralSplit,
    u: &Field,
) -> Result<Vec<f64>, SolveError> {
    let m = split.basis.len();
    let dim = m + 1;
    let mut dirs: Vec<Field> = Vec::with_capacity(dim);
    let mut un = u.clone();
    let nrm = weighted_norm(&un);
    for v in un.values_mut() {
        *v /= nrm;
    }
    dirs.push(un);
    for e in &split.basis {
        dirs.push(e.clone());
    }
    let mut hess = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let quad = prob.operator().quadratic_form(&dirs[i], &dirs[j])?;
            let h = quad - prob.nonlinear_hessian_form(u, &dirs[i], &dirs[j]);
            hess[i * dim + j] = h;
            hess[j * dim + i] = h;
        }
    }
    Ok(hess)
}

/// Minimize `J` over the Nehari-Pankov set by multi-start projected
/// gradient descent on the unit `w`-sphere of `H^+`.
pub fn solve_focusing(
    prob: &Problem,
    opts: &SolverOptions,
) -> Result<GroundStateResult, SolveError> {
    if prob.mode() != Mode::Focusing {
        return Err(SolveError::ModeMismatch {
            expected: Mode::Focusing,
        });
    }
    let split = spectral_split(prob, opts.k_neg_max)?;
    let project_positive = |f: &mut Field| {
        for e in &split.basis {
            let c = weighted_inner(f, e).expect("same grid");
            for (fv, ev) in f.values_mut().iter_mut().zip(e.values()) {
                *fv -= c * ev;
            }
        }
    };

    // Starting directions: the lowest positive eigenvector plus random
    // fields projected onto H^+.
    let mut starts: Vec<Field> = Vec::with_capacity(opts.starts + 1);
    starts.push(split.lowest_positive.clone());
    let mut rng = SplitMix64::new(opts.seed);
    for _ in 0..opts.starts {
        let mut f = Field::from_fn(*prob.grid(), |_, _| rng.uniform(-1.0, 1.0));
        project_positive(&mut f);
        starts.push(f);
    }

    let mut best: Option<(f64, NehariPoint, usize)> = None;
    let mut start_energies = Vec::new();
    let mut failures = 0usize;

    for start in starts {
        match run_one_start(prob, &split, start, opts) {
            Ok((j, point, iters)) => {
                start_energies.push(j);
                let better = best.as_ref().is_none_or(|(bj, _, _)| j < *bj);
                if better {
                    best = Some((j, point, iters));
                }
            }
            Err(_) => failures += 1,
        }
    }
    let (j, point, iterations) = best.ok_or(SolveError::AllStartsFailed(failures))?;
    start_energies.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));

    let u = point.field;
    let (res, scale) = el_residual(prob, &u)?;
    let (ray, basis_res) = nehari_residuals(prob, &split, &u)?;
    Ok(GroundStateResult {
        energy: j,
        el_residual: res,
        el_scale: scale,
        nehari_residuals: (ray, basis_res),
        nontrivial: weighted_norm(&u) >= NONTRIVIAL_NORM,
        iterations,
        starts: start_energies.len() + failures,
        start_energies,
        u,
    })
}

fn run_one_start(
    prob: &Problem,
    split: &SpectralSplit,
    start: Field,
    opts: &SolverOptions,
) -> Result<(f64, NehariPoint, usize), SolveError> {
    let mut w = start;
    let nrm = weighted_norm(&w);
    if !(nrm > 1e-12) {
        return Err(SolveError::NotInPositiveSubspace { overlap: f64::NAN });
    }
    for v in w.values_mut() {
        *v /= nrm;
    }
    let mut point = nehari_project(prob, split, &w, None, opts.tol_inner)?;
    let mut j = energy(prob, &point.field)?;

    let tangential = |w: &Field, point: &NehariPoint| -> Result<Field, SolveError> {
        let mut g = el_gradient(prob, &point.field)?;
        for e in &split.basis {
            let c = weighted_inner(&g, e)?;
            for (gv, ev) in g.values_mut().iter_mut().zip(e.values()) {
                *gv -= c * ev;
            }
        }
        let c = weighted_inner(&g, w)?;
        for (gv, wv) in g.values_mut().iter_mut().zip(w.values()) {
            *gv -= c * wv;
        }
        for gv in g.values_mut() {
            *gv *= point.t;
        }
        Ok(g)
    };

    let mut grad = tangential(&w, &point)?;
    let mut step = 1.0 / (1.0 + weighted_norm(&grad));
    let mut prev: Option<(Field, Field)> = None;
    let mut iterations = 0;
    // Non-monotone descent reference (see the defocusing solver: a strictly
    // monotone line search stalls at the energy rounding floor).
    let mut recent = [j; 10];
    let mut recent_at = 0usize;
    for it in 0..opts.max_iterations {
        iterations = it;
        let gnorm = weighted_norm(&grad);
        if gnorm <= opts.tol_outer * j.abs().max(1.0) {
            return Ok((j, point, iterations));
        }
        if let Some((pw, pg)) = &prev {
            let mut dw = w.clone();
            for (d, p) in dw.values_mut().iter_mut().zip(pw.values()) {
                *d -= p;
            }
            let mut dg = grad.clone();
            for (d, p) in dg.values_mut().iter_mut().zip(pg.values()) {
                *d -= p;
            }
            let dwdg = weighted_inner(&dw, &dg)?;
            let dgdg = weighted_inner(&dg, &dg)?;
            if dwdg > 0.0 && dgdg > 0.0 {
                step = (dwdg / dgdg).clamp(1e-14, 1e8);
            }
        }
        let j_ref = recent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = 8.0 * f64::EPSILON * j_ref.abs().max(1.0);
        let gg = gnorm * gnorm;
        let mut s = step;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = w.clone();
            for (t, g) in trial.values_mut().iter_mut().zip(grad.values()) {
                *t -= s * g;
            }
            // Retract onto the sphere (the basis projection is preserved up
            // to rounding; refresh it as well).
            for e in &split.basis {
                let c = weighted_inner(&trial, e)?;
                for (tv, ev) in trial.values_mut().iter_mut().zip(e.values()) {
                    *tv -= c * ev;
                }
            }
            let nrm = weighted_norm(&trial);
            if nrm > 1e-14 {
                for v in trial.values_mut() {
                    *v /= nrm;
                }
                let warm = Some((point.t, point.v_coeffs.as_slice()));
                if let Ok(candidate) = nehari_project(prob, split, &trial, warm, opts.tol_inner)
                {
                    let jt = energy(prob, &candidate.field)?;
                    if jt <= j_ref - 1e-4 * s * gg + slack {
                        let new_grad = tangential(&trial, &candidate)?;
                        prev = Some((
                            core::mem::replace(&mut w, trial),
                            core::mem::replace(&mut grad, new_grad),
                        ));
                        point = candidate;
                        j = jt;
                        recent[recent_at % recent.len()] = jt;
                        recent_at += 1;
                        accepted = true;
                        break;
                    }
                }
            }
            s *= 0.5;
        }
        if !accepted {
            let gnorm = weighted_norm(&grad);
            if gnorm <= 10.0 * opts.tol_outer * j.abs().max(1.0) {
                return Ok((j, point, iterations));
            }
            return Err(SolveError::NonConvergence {
                iterations,
                grad_norm: gnorm,
            });
        }
    }
    let gnorm = weighted_norm(&grad);
    Err(SolveError::NonConvergence {
        iterations,
        grad_norm: gnorm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::jacobi_eigen;
    use crate::grid::CylGrid;
    use crate::spectrum::{gap_margin, SpectrumSet};
    use approx::assert_abs_diff_eq;

    fn positive_certificate(vmin: f64) -> crate::spectrum::GapCertificate {
        gap_margin(&SpectrumSet::from_parts(&[], &[], Some(vmin)), 0.0)
    }

    fn positive_problem() -> Problem {
        let grid = CylGrid::new(8.0, 8.0, 40, 40).unwrap();
        Problem::focusing(grid, |_, _| 1.0, |_, _| 1.0, 3.0, positive_certificate(1.0))
            .unwrap()
    }

    /// A potential with genuinely negative spectrum but a certified gap at
    /// zero (deep separable well, spectrum checked spectrally).
    fn gapped_problem() -> Problem {
        let grid = CylGrid::new(8.0, 6.0, 36, 30).unwrap();
        let w = |r: f64| if r < 1.2 { -9.0 } else { 2.5 };
        // The certificate here is produced from the discrete operator itself
        // in `spectral_split`; for construction we only need a positive
        // margin placeholder from the designed route, which the dedicated
        // integration tests exercise. Use a plain margin statement.
        let cert = crate::spectrum::GapCertificate {
            query_point: 0.0,
            margin: 0.5,
            chain: None,
        };
        Problem::focusing(grid, move |r, _| w(r), |_, _| 1.0, 3.0, cert).unwrap()
    }

    #[test]
    fn positive_potential_has_empty_negative_subspace() {
        let prob = positive_problem();
        let split = spectral_split(&prob, 16).unwrap();
        assert!(split.basis.is_empty());
        assert!(split.gap_at_zero >= 1.0);
    }

    #[test]
    fn gapped_potential_split_matches_counting_oracle() {
        let prob = gapped_problem();
        let split = spectral_split(&prob, 32).unwrap();
        assert!(!split.basis.is_empty(), "expected bound states below zero");
        // Counting oracle: Sturm count on the symmetrized operator via
        // separability (W(r) + 0 in z): negatives of the 2D operator are
        // pairs (mu_i + nu_j < 0).
        let g = prob.grid();
        let (dr, or) = crate::operator::radial_operator_1d(g.r_max(), g.nr(), |r| {
            if r < 1.2 {
                -9.0
            } else {
                2.5
            }
        });
        let (dz, oz) = crate::operator::axial_operator_1d(g.z_half(), g.nz(), |_| 0.0);
        let mur = crate::eigen::tridiag_lowest(&dr, &or, g.nr().min(12));
        let nuz = crate::eigen::tridiag_lowest(&dz, &oz, g.nz().min(40));
        let count = mur
            .iter()
            .map(|m| nuz.iter().filter(|n| m + **n < 0.0).count())
            .sum::<usize>();
        assert_eq!(split.basis.len(), count);
        // w-orthonormality of the basis.
        for i in 0..split.basis.len() {
            for j in 0..split.basis.len() {
                let d = weighted_inner(&split.basis[i], &split.basis[j]).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(d, expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_ray_projection() {
        let prob = positive_problem();
        let split = spectral_split(&prob, 4).unwrap();
        let w = Field::from_fn(*prob.grid(), |r, z| (-(r * r) - z * z).exp());
        let point = nehari_project(&prob, &split, &w, None, 1e-12).unwrap();
        assert!(point.t > 0.0);
        assert!(point.ray_residual <= 1e-10, "residual {}", point.ray_residual);
    }

    #[test]
    fn newton_projection_annihilates_constraint_directions() {
        let prob = gapped_problem();
        let split = spectral_split(&prob, 32).unwrap();
        assert!(!split.basis.is_empty());
        let mut w = split.lowest_positive.clone();
        // make sure w is clean of the negative basis
        for e in &split.basis {
            let c = weighted_inner(&w, e).unwrap();
            for (wv, ev) in w.values_mut().iter_mut().zip(e.values()) {
                *wv -= c * ev;
            }
        }
        let point = nehari_project(&prob, &split, &w, None, 1e-10).unwrap();
        assert!(point.ray_residual <= 1e-9, "ray {}", point.ray_residual);
        assert!(
            point.basis_residual <= 1e-9,
            "basis {}",
            point.basis_residual
        );
        // Concavity witness: restricted Hessian negative definite.
        let hess = restricted_hessian(&prob, &split, &point.field).unwrap();
        let dim = split.basis.len() + 1;
        let (evals, _) = jacobi_eigen(&hess, dim);
        assert!(
            evals.iter().all(|e| *e < 0.0),
            "restricted Hessian eigenvalues {evals:?}"
        );
    }

    #[test]
    fn rejects_directions_in_negative_subspace() {
        let prob = gapped_problem();
        let split = spectral_split(&prob, 32).unwrap();
        assert!(matches!(
            nehari_project(&prob, &split, &split.basis[0], None, 1e-10),
            Err(SolveError::NotInPositiveSubspace { .. })
        ));
    }

    #[test]
    fn focusing_solve_on_positive_potential() {
        let prob = positive_problem();
        let opts = SolverOptions {
            starts: 2,
            ..Default::default()
        };
        let res = solve_focusing(&prob, &opts).unwrap();
        assert!(res.nontrivial);
        assert!(res.energy > 0.0);
        assert!(
            res.el_residual <= 1e-6 * res.el_scale,
            "residual {} scale {}",
            res.el_residual,
            res.el_scale
        );
        // Constraint-set energy identity:
        // J = (p-1)/(2(p+1)) * int Gamma |U|^{p+1}.
        let nonlin = 2.0 * core::f64::consts::PI * prob.nonlinear_integral(&res.u);
        let expect = (3.0 - 1.0) / (2.0 * 4.0) * nonlin;
        assert_abs_diff_eq!(res.energy, expect, epsilon = 1e-6 * res.energy.abs());
        // Energy positivity bound from the identity.
        assert!(res.energy >= 0.25 * nonlin * 0.999);
    }

    #[test]
    fn converged_solution_is_projection_fixed_point() {
        let prob = positive_problem();
        let opts = SolverOptions {
            starts: 1,
            ..Default::default()
        };
        let res = solve_focusing(&prob, &opts).unwrap();
        let split = spectral_split(&prob, 4).unwrap();
        let mut w = res.u.clone();
        let nrm = weighted_norm(&w);
        for v in w.values_mut() {
            *v /= nrm;
        }
        let point = nehari_project(&prob, &split, &w, None, 1e-12).unwrap();
        let mut diff = point.field.clone();
        for (d, u) in diff.values_mut().iter_mut().zip(res.u.values()) {
            *d -= u;
        }
        assert!(
            weighted_norm(&diff) <= 1e-6 * weighted_norm(&res.u),
            "fixed-point drift {}",
            weighted_norm(&diff)
        );
    }
}
