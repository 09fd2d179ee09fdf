//! Interval-set algebra on spectra and certified gap checks around zero.
//!
//! A [`SpectrumSet`] is a finite union of isolated points, closed intervals,
//! and at most one half-line `[t, inf)`. All spectra arising from the
//! separable construction have this form, and the class is closed under the
//! Minkowski sum `sigma(L) = sigma(L_r) + sigma(L_p)`.
//!
//! [`design_potential`] runs the full pipeline: band structure of the
//! periodic part, placement of the radial eigenvalue `mu_0` inside
//! `(-nu_3, -nu_2)`, the radial design, and a [`GapCertificate`] recording
//! the inequality chain
//!
//! ```text
//! -nu_3 < mu_0 < -nu_2 < -nu_1 < W_inf
//! ```
//!
//! together with the resulting distance from zero to the assembled spectrum.

use crate::periodic::{self, BandError, BandStructure, PiecewisePotential1D};
use crate::radial::{self, RadialDesign, RadialError};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Errors from spectrum assembly and potential design.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    /// `mu0_fraction` must lie strictly inside `(0, 1)`.
    #[error("mu0_fraction = {0} outside (0, 1)")]
    BadFraction(f64),
    /// One inequality of the design chain fails.
    #[error("chain inequality \"{name}\" violated: {lhs} !< {rhs}")]
    ChainViolation { name: String, lhs: f64, rhs: f64 },
    /// The radial factor passed to `assemble` must be one isolated point
    /// plus a half-line.
    #[error("radial spectrum must consist of one point and a half-line")]
    BadRadialComponent,
    /// Band truncation unsound: the image of the last computed band ends
    /// below the half-line, so higher bands cannot be ruled out of the
    /// reported gap.
    #[error(
        "band truncation unsound: band {bands} image tops out at {band_top} \
         below the half-line start {tail_start}; request more bands"
    )]
    Truncation {
        bands: usize,
        band_top: f64,
        tail_start: f64,
    },
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Band(#[from] BandError),
}

/// Finite union of isolated points, disjoint closed intervals, and an
/// optional half-line `[tail, inf)`, kept normalized (sorted, merged,
/// pairwise disjoint).
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumSet {
    points: Vec<f64>,
    intervals: Vec<[f64; 2]>,
    tail: Option<f64>,
}

impl SpectrumSet {
    /// Build and normalize. Intervals may be passed in any order; degenerate
    /// intervals become points; anything swallowed by an interval or the
    /// half-line is dropped.
    pub fn from_parts(points: &[f64], intervals: &[[f64; 2]], tail: Option<f64>) -> Self {
        let mut s = Self {
            points: points.to_vec(),
            intervals: intervals.to_vec(),
            tail,
        };
        s.normalize();
        s
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty() && self.tail.is_none()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    pub fn tail(&self) -> Option<f64> {
        self.tail
    }

    /// Infimum of the set.
    pub fn min(&self) -> Option<f64> {
        let mut m = f64::INFINITY;
        if let Some(&p) = self.points.first() {
            m = m.min(p);
        }
        if let Some(iv) = self.intervals.first() {
            m = m.min(iv[0]);
        }
        if let Some(t) = self.tail {
            m = m.min(t);
        }
        m.is_finite().then_some(m)
    }

    /// Canonical form: sorted components, overlaps merged, points absorbed
    /// into intervals/tail, degenerate intervals demoted to points.
    /// Idempotent.
    pub fn normalize(&mut self) {
        // Degenerate intervals become points.
        let mut extra_points: Vec<f64> = Vec::new();
        self.intervals.retain(|iv| {
            debug_assert!(iv[0] <= iv[1], "interval endpoints out of order");
            if iv[0] == iv[1] {
                extra_points.push(iv[0]);
                false
            } else {
                true
            }
        });
        self.points.extend(extra_points);

        // Merge intervals (closed sets: touching intervals merge).
        self.intervals
            .sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("finite interval ends"));
        let mut merged: Vec<[f64; 2]> = Vec::with_capacity(self.intervals.len());
        for iv in self.intervals.drain(..) {
            match merged.last_mut() {
                Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
                _ => merged.push(iv),
            }
        }
        self.intervals = merged;

        // Intervals reaching the half-line extend it.
        if let Some(mut t) = self.tail {
            while let Some(last) = self.intervals.last() {
                if last[1] >= t {
                    t = t.min(last[0]);
                    self.intervals.pop();
                } else {
                    break;
                }
            }
            self.tail = Some(t);
        }

        // Points: sorted, deduplicated, not inside intervals or tail.
        self.points
            .sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        self.points.dedup();
        let intervals = &self.intervals;
        let tail = self.tail;
        self.points.retain(|&p| {
            let in_interval = intervals.iter().any(|iv| iv[0] <= p && p <= iv[1]);
            let in_tail = tail.is_some_and(|t| p >= t);
            !in_interval && !in_tail
        });
    }

    /// Set membership (exact arithmetic on the representation).
    pub fn contains(&self, x: f64) -> bool {
        self.distance_to(x) == 0.0
    }

    /// Distance from `x` to the set; infinite for the empty set.
    pub fn distance_to(&self, x: f64) -> f64 {
        let mut d = f64::INFINITY;
        for &p in &self.points {
            d = d.min((x - p).abs());
        }
        for iv in &self.intervals {
            d = d.min(if x < iv[0] {
                iv[0] - x
            } else if x > iv[1] {
                x - iv[1]
            } else {
                0.0
            });
        }
        if let Some(t) = self.tail {
            d = d.min(if x >= t { 0.0 } else { t - x });
        }
        d
    }

    /// Translate the whole set by `c`.
    pub fn shift(&self, c: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| p + c).collect(),
            intervals: self.intervals.iter().map(|iv| [iv[0] + c, iv[1] + c]).collect(),
            tail: self.tail.map(|t| t + c),
        }
    }
}

/// Minkowski sum of two normalized spectra.
///
/// Exact on the finite representation: points add to points, a point shifts
/// an interval, intervals add endpoint-wise, and any component added to a
/// half-line produces the half-line starting at the sum of the infima.
pub fn minkowski_sum(a: &SpectrumSet, b: &SpectrumSet) -> SpectrumSet {
    if a.is_empty() || b.is_empty() {
        return SpectrumSet::empty();
    }
    let mut points = Vec::new();
    let mut intervals = Vec::new();
    let mut tail: Option<f64> = None;

    let mut push_tail = |t: f64| {
        tail = Some(match tail {
            Some(existing) => existing.min(t),
            None => t,
        });
    };
    if let Some(ta) = a.tail() {
        push_tail(ta + b.min().expect("nonempty"));
    }
    if let Some(tb) = b.tail() {
        push_tail(tb + a.min().expect("nonempty"));
    }

    for &p in a.points() {
        for &q in b.points() {
            points.push(p + q);
        }
        for iv in b.intervals() {
            intervals.push([p + iv[0], p + iv[1]]);
        }
    }
    for iv in a.intervals() {
        for &q in b.points() {
            intervals.push([iv[0] + q, iv[1] + q]);
        }
        for jv in b.intervals() {
            intervals.push([iv[0] + jv[0], iv[1] + jv[1]]);
        }
    }
    SpectrumSet::from_parts(&points, &intervals, tail)
}

/// One inequality of the design chain with its operands and outcome.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Values entering the chain `-nu_3 < mu_0 < -nu_2 < -nu_1 < W_inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainValues {
    pub neg_nu3: f64,
    pub mu0: f64,
    pub neg_nu2: f64,
    pub neg_nu1: f64,
    pub winf: f64,
}

/// The placement-inequality chain of the separable design.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainReport {
    pub values: ChainValues,
    pub checks: Vec<ChainCheck>,
}

/// Certificate that a query point lies outside a spectrum.
///
/// `margin > 0` iff the point is not in the set. When produced by the
/// separable design, `chain` carries the five values of the placement
/// inequalities with a pass/fail verdict for each.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapCertificate {
    pub query_point: f64,
    pub margin: f64,
    pub chain: Option<ChainReport>,
}

/// Distance certificate for `x` against a normalized spectrum. The chain is
/// left empty; `design_potential` fills it when the construction metadata is
/// available.
pub fn gap_margin(s: &SpectrumSet, x: f64) -> GapCertificate {
    GapCertificate {
        query_point: x,
        margin: s.distance_to(x),
        chain: None,
    }
}

/// Sum the radial spectrum (one point plus half-line) with computed bands.
///
/// `winf` must be the start of the radial half-line. With only finitely many
/// bands known, the truncation is certified sound by requiring the image of
/// the last band to reach the half-line `[nu_1 + winf, inf)`; otherwise the
/// result would silently under-report spectrum and an error is raised.
pub fn assemble(
    rad: &SpectrumSet,
    per: &BandStructure,
    winf: f64,
) -> Result<SpectrumSet, SpectrumError> {
    if rad.points().len() != 1 || rad.tail() != Some(winf) || !rad.intervals().is_empty() {
        return Err(SpectrumError::BadRadialComponent);
    }
    let mu0 = rad.points()[0];
    let k = per.count();
    if k == 0 {
        return Err(SpectrumError::Band(BandError::EmptyBandRequest));
    }
    let nu1 = per.edges()[0];
    let band_top = per.edges()[2 * k - 1];
    let tail_start = nu1 + winf;
    if mu0 + band_top < tail_start {
        return Err(SpectrumError::Truncation {
            bands: k,
            band_top: mu0 + band_top,
            tail_start,
        });
    }
    Ok(minkowski_sum(rad, &per.to_spectrum()))
}

/// Positivity report of the designed full potential `V = W + P`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositivityReport {
    /// `esssup V = winf + max P`; positive for every successful design.
    pub esssup_v: f64,
    /// Lowest band edge of the periodic part.
    pub nu1: f64,
    /// `max P`, which strictly dominates `nu1` for gap-opening potentials.
    pub esssup_p: f64,
}

/// Everything produced by the design pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignedPotential {
    /// Radial design data (potential, eigenvalue, matching values).
    pub design: RadialDesign,
    /// Band structure of the periodic factor used in the assembly.
    pub bands: BandStructure,
    /// Assembled spectrum of the full separable operator.
    pub spectrum: SpectrumSet,
    /// Gap certificate at zero, chain populated.
    pub certificate: GapCertificate,
    /// Sign structure of the designed potential.
    pub positivity: PositivityReport,
}

/// Design a separable potential with zero in a spectral gap.
///
/// The radial eigenvalue is placed at
/// `mu_0 = -nu_3 + mu0_fraction (nu_3 - nu_2)`, strictly inside
/// `(-nu_3, -nu_2)`. Requires the first gap of `p` open and
/// `winf > -nu_1`; every chain inequality is evaluated and the first
/// failing one is reported by name.
pub fn design_potential(
    p: &PiecewisePotential1D,
    winf: f64,
    eta: f64,
    mu0_fraction: f64,
    k_bands: usize,
) -> Result<DesignedPotential, SpectrumError> {
    if !(mu0_fraction > 0.0 && mu0_fraction < 1.0) {
        return Err(SpectrumError::BadFraction(mu0_fraction));
    }
    periodic::first_gap(p)?; // gap-closed error surfaces here
    let bands = periodic::band_edges(p, k_bands)?;
    let e = bands.edges();
    let (nu1, nu2, nu3) = (e[0], e[1], e[2]);
    let mu0 = -nu3 + mu0_fraction * (nu3 - nu2);

    let values = ChainValues {
        neg_nu3: -nu3,
        mu0,
        neg_nu2: -nu2,
        neg_nu1: -nu1,
        winf,
    };
    let checks = alloc::vec![
        chain_check("-nu_3 < mu_0", -nu3, mu0),
        chain_check("mu_0 < -nu_2", mu0, -nu2),
        chain_check("-nu_2 < -nu_1", -nu2, -nu1),
        chain_check("-nu_1 < W_inf", -nu1, winf),
    ];
    if let Some(bad) = checks.iter().find(|c| !c.ok) {
        return Err(SpectrumError::ChainViolation {
            name: bad.name.clone(),
            lhs: bad.lhs,
            rhs: bad.rhs,
        });
    }

    let design = radial::design_radial(mu0, winf, eta)?;
    let rad = SpectrumSet::from_parts(&[mu0], &[], Some(winf));
    let spectrum = assemble(&rad, &bands, winf)?;
    let mut certificate = gap_margin(&spectrum, 0.0);
    certificate.chain = Some(ChainReport { values, checks });

    let positivity = PositivityReport {
        esssup_v: winf + p.max_value(),
        nu1,
        esssup_p: p.max_value(),
    };
    Ok(DesignedPotential {
        design,
        bands,
        spectrum,
        certificate,
        positivity,
    })
}

fn chain_check(name: &str, lhs: f64, rhs: f64) -> ChainCheck {
    ChainCheck {
        name: String::from(name),
        lhs,
        rhs,
        ok: lhs < rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn kronig_penney() -> PiecewisePotential1D {
        PiecewisePotential1D::new(alloc::vec![0.0, 0.5], alloc::vec![0.0, 10.0]).unwrap()
    }

    fn sets_close(a: &SpectrumSet, b: &SpectrumSet, tol: f64) -> bool {
        if a.points().len() != b.points().len()
            || a.intervals().len() != b.intervals().len()
            || a.tail().is_some() != b.tail().is_some()
        {
            return false;
        }
        let pts = a
            .points()
            .iter()
            .zip(b.points())
            .all(|(x, y)| (x - y).abs() <= tol);
        let ivs = a.intervals().iter().zip(b.intervals()).all(|(x, y)| {
            (x[0] - y[0]).abs() <= tol && (x[1] - y[1]).abs() <= tol
        });
        let tails = match (a.tail(), b.tail()) {
            (Some(x), Some(y)) => (x - y).abs() <= tol,
            (None, None) => true,
            _ => false,
        };
        pts && ivs && tails
    }

    fn random_set(rng: &mut StdRng) -> SpectrumSet {
        let mut points = alloc::vec::Vec::new();
        let mut intervals = alloc::vec::Vec::new();
        for _ in 0..rng.gen_range(0..3) {
            points.push(rng.gen_range(-10.0..10.0));
        }
        for _ in 0..rng.gen_range(0..3) {
            let lo = rng.gen_range(-10.0..10.0);
            intervals.push([lo, lo + rng.gen_range(0.0..4.0)]);
        }
        let tail = rng.gen_bool(0.5).then(|| rng.gen_range(-5.0..15.0));
        SpectrumSet::from_parts(&points, &intervals, tail)
    }

    #[test]
    fn worked_minkowski_example() {
        // ({-5} u [2, inf)) + ([1,3] u [6,8] u [10, inf))
        //   = [-4,-2] u [1, inf) after normalization.
        let a = SpectrumSet::from_parts(&[-5.0], &[], Some(2.0));
        let b = SpectrumSet::from_parts(&[], &[[1.0, 3.0], [6.0, 8.0]], Some(10.0));
        let s = minkowski_sum(&a, &b);
        assert!(s.points().is_empty());
        assert_eq!(s.intervals(), &[[-4.0, -2.0]]);
        assert_eq!(s.tail(), Some(1.0));
    }

    #[test]
    fn zero_point_is_identity() {
        let zero = SpectrumSet::from_parts(&[0.0], &[], None);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let s = random_set(&mut rng);
            assert!(sets_close(&minkowski_sum(&zero, &s), &s, 0.0));
        }
    }

    #[test]
    fn sum_against_membership_sampling() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let s = minkowski_sum(&a, &b);
            // Forward: sampled members sum into the result.
            for _ in 0..1000 {
                let x = sample_member(&a, &mut rng);
                let y = sample_member(&b, &mut rng);
                assert!(
                    s.distance_to(x + y) <= 1e-9,
                    "{x} + {y} escaped the Minkowski sum"
                );
            }
            // Reverse: for points away from the result, no grid pair sums
            // there.
            for _ in 0..200 {
                let z = rng.gen_range(-25.0..25.0);
                if s.distance_to(z) < 1e-3 {
                    continue;
                }
                for i in 0..400 {
                    let x = -15.0 + 30.0 * (i as f64) / 399.0;
                    if a.distance_to(x) <= 1e-9 {
                        assert!(
                            b.distance_to(z - x) > 1e-9,
                            "unrepresentable z = {z} reachable via {x}"
                        );
                    }
                }
            }
        }
    }

    fn sample_member(s: &SpectrumSet, rng: &mut StdRng) -> f64 {
        loop {
            let kind = rng.gen_range(0..3);
            match kind {
                0 if !s.points().is_empty() => {
                    return s.points()[rng.gen_range(0..s.points().len())];
                }
                1 if !s.intervals().is_empty() => {
                    let iv = s.intervals()[rng.gen_range(0..s.intervals().len())];
                    return rng.gen_range(iv[0]..=iv[1]);
                }
                2 => {
                    if let Some(t) = s.tail() {
                        return t + rng.gen_range(0.0..10.0);
                    }
                }
                _ => {}
            }
        }
    }

    #[test]
    fn sum_commutative_and_associative() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..25 {
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            let c = random_set(&mut rng);
            let ab = minkowski_sum(&a, &b);
            let ba = minkowski_sum(&b, &a);
            assert!(sets_close(&ab, &ba, 1e-12));
            if a.is_empty() || b.is_empty() || c.is_empty() {
                continue;
            }
            let ab_c = minkowski_sum(&ab, &c);
            let a_bc = minkowski_sum(&a, &minkowski_sum(&b, &c));
            assert!(sets_close(&ab_c, &a_bc, 1e-9), "{ab_c:?} vs {a_bc:?}");
        }
    }

    #[test]
    fn normalization_idempotent() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let s = random_set(&mut rng);
            let mut t = s.clone();
            t.normalize();
            assert_eq!(s, t);
        }
    }

    #[test]
    fn normalization_absorbs_and_merges() {
        let s = SpectrumSet::from_parts(
            &[2.0, 5.0, 99.0],
            &[[1.0, 3.0], [3.0, 4.0], [8.0, 12.0]],
            Some(11.0),
        );
        // [1,3] and [3,4] merge; [8,12] touches the tail and extends it;
        // the points 2 (inside) and 99 (in tail) are absorbed.
        assert_eq!(s.points(), &[5.0]);
        assert_eq!(s.intervals(), &[[1.0, 4.0]]);
        assert_eq!(s.tail(), Some(8.0));
        // degenerate interval becomes a point
        let d = SpectrumSet::from_parts(&[], &[[7.0, 7.0]], None);
        assert_eq!(d.points(), &[7.0]);
        assert!(d.intervals().is_empty());
    }

    #[test]
    fn margin_basics() {
        let s = SpectrumSet::from_parts(&[], &[[-4.0, -2.0]], Some(1.0));
        assert_abs_diff_eq!(gap_margin(&s, 0.0).margin, 1.0);
        assert_abs_diff_eq!(gap_margin(&s, -3.0).margin, 0.0);
        assert!(s.contains(-2.0));
        assert!(!s.contains(0.5));
        assert_abs_diff_eq!(s.distance_to(-1.0), 1.0);
    }

    #[test]
    fn assemble_matches_minkowski_and_formula() {
        let p = kronig_penney();
        let bands = periodic::band_edges(&p, 8).unwrap();
        let winf = -bands.edges()[0] + 1.0;
        let (nu2, nu3) = periodic::first_gap(&p).unwrap();
        let mu0 = -nu3 + 0.5 * (nu3 - nu2);
        let rad = SpectrumSet::from_parts(&[mu0], &[], Some(winf));

        let s = assemble(&rad, &bands, winf).unwrap();
        let direct = minkowski_sum(&rad, &bands.to_spectrum());
        assert!(sets_close(&s, &direct, 0.0));

        // Symbolic shape: shifted bands plus the half-line at nu_1 + winf,
        // with overlaps merged. The first band image must be present and the
        // minimum must equal mu_0 + nu_1.
        let nu1 = bands.edges()[0];
        assert_abs_diff_eq!(s.min().unwrap(), mu0 + nu1, epsilon = 1e-12);
        assert_eq!(s.intervals()[0], [mu0 + nu1, mu0 + bands.edges()[1]]);
        assert!(s.tail().is_some());
        assert!(s.tail().unwrap() <= nu1 + winf + 1e-12);
    }

    #[test]
    fn assemble_rejects_malformed_radial_factor() {
        let p = kronig_penney();
        let bands = periodic::band_edges(&p, 4).unwrap();
        let two_points = SpectrumSet::from_parts(&[0.0, 1.0], &[], Some(5.0));
        assert!(matches!(
            assemble(&two_points, &bands, 5.0),
            Err(SpectrumError::BadRadialComponent)
        ));
    }

    #[test]
    fn assemble_truncation_error() {
        let p = kronig_penney();
        let bands = periodic::band_edges(&p, 1).unwrap();
        // Huge winf: one band cannot reach the half-line.
        let winf = 1000.0;
        let rad = SpectrumSet::from_parts(&[-10.0], &[], Some(winf));
        assert!(matches!(
            assemble(&rad, &bands, winf),
            Err(SpectrumError::Truncation { .. })
        ));
    }

    #[test]
    fn designed_potential_has_positive_margin() {
        let p = kronig_penney();
        let (nu2, nu3) = periodic::first_gap(&p).unwrap();
        let bands = periodic::band_edges(&p, 1).unwrap();
        let winf = -bands.edges()[0] + 1.0;
        let d = design_potential(&p, winf, 3.5, 0.5, 8).unwrap();

        assert!(d.certificate.margin > 0.0);
        assert_abs_diff_eq!(d.certificate.query_point, 0.0);
        let chain = d.certificate.chain.as_ref().unwrap();
        assert!(chain.checks.iter().all(|c| c.ok));
        assert!(chain.values.neg_nu3 < chain.values.mu0 && chain.values.mu0 < chain.values.neg_nu2);

        // Margin agrees with the direct distance computation through the
        // first-gap geometry: distance to the two adjacent band images.
        let mu0 = d.design.mu0;
        let expected = (-(mu0 + nu2)).min(mu0 + nu3).min(d.spectrum.tail().unwrap());
        assert_abs_diff_eq!(d.certificate.margin, expected, epsilon = 1e-12);

        // Positivity of the designed potential.
        assert!(d.positivity.esssup_v > 0.0);
        assert!(d.positivity.nu1 < d.positivity.esssup_p);

        // Spectrum minimum sits at mu_0 + nu_1.
        let nu1 = d.bands.edges()[0];
        assert_abs_diff_eq!(d.spectrum.min().unwrap(), mu0 + nu1, epsilon = 1e-12);
    }

    #[test]
    fn design_rejects_small_winf() {
        let p = kronig_penney();
        let bands = periodic::band_edges(&p, 1).unwrap();
        let nu1 = bands.edges()[0];
        let err = design_potential(&p, -nu1 - 0.5, 3.5, 0.5, 8).unwrap_err();
        match err {
            SpectrumError::ChainViolation { name, .. } => {
                assert_eq!(name, "-nu_1 < W_inf");
            }
            other => panic!("expected chain violation, got {other:?}"),
        }
    }

    #[test]
    fn design_rejects_bad_fraction_and_closed_gap() {
        let p = kronig_penney();
        assert!(matches!(
            design_potential(&p, 10.0, 3.5, 0.0, 8),
            Err(SpectrumError::BadFraction(_))
        ));
        let free = PiecewisePotential1D::constant(0.0);
        assert!(matches!(
            design_potential(&free, 10.0, 3.5, 0.5, 8),
            Err(SpectrumError::Band(BandError::GapClosed { .. }))
        ));
    }

    #[cfg(feature = "serde")]
    #[test]
    fn spectrum_json_schema() {
        let s = SpectrumSet::from_parts(&[-5.0], &[[1.0, 2.0]], Some(4.0));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"points":[-5.0],"intervals":[[1.0,2.0]],"tail":4.0}"#);
        let back: SpectrumSet = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
        let no_tail = SpectrumSet::from_parts(&[], &[], None);
        assert_eq!(
            serde_json::to_string(&no_tail).unwrap(),
            r#"{"points":[],"intervals":[],"tail":null}"#
        );
    }
}
