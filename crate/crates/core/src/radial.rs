//! The radial step potential: eigenvalue design and analysis.
//!
//! `W(r)` equals `w0` on `[0, delta)` and `winf` on `[delta, inf)`. Under the
//! single-mode condition
//!
//! ```text
//! (j_1 / delta)^2 < winf - w0 < (j_2' / delta)^2
//! ```
//!
//! the weighted radial operator `L_r = -(1/r^3)(r^3 u')' + W(r)` has exactly
//! one eigenvalue `mu_0` below its essential spectrum `[winf, inf)`, located
//! by the C1-matching equation `g(mu) = h(mu)` with
//!
//! ```text
//! g(mu) = alpha(sqrt(mu - w0) delta),   h(mu) = beta(sqrt(winf - mu) delta).
//! ```
//!
//! The design direction runs the other way: pick the eigenvalue `mu_0`, the
//! essential-spectrum edge `winf`, and a coupling `eta` in the admissible
//! window, then solve `alpha(xi) = beta(eta)` for `xi` and read off `delta`
//! and `w0`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::special::{self, BesselError};
use crate::spectrum::SpectrumSet;
use thiserror::Error;

/// Guard distance from the pole of `g` when bracketing the matching root,
/// as a fraction of `winf - w0`.
const POLE_GUARD_FRACTION: f64 = 1e-9;

/// Errors from radial design and eigenvalue computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadialError {
    /// `eta` outside the admissible window `[eta_*, eta^*]`.
    #[error("eta = {eta} outside the admissible window [{lo}, {hi}]")]
    EtaOutOfRange { eta: f64, lo: f64, hi: f64 },
    /// The potential is not a well (`w0 >= winf`) or the target eigenvalue
    /// does not sit below the essential spectrum.
    #[error("need a well below the essential spectrum: lower {lower} !< upper {upper}")]
    NotAWell { lower: f64, upper: f64 },
    /// Nonpositive step radius (or a negative sample radius).
    #[error("radius must be positive, got {0}")]
    BadDelta(f64),
    /// The single-eigenvalue condition fails: `(winf - w0) delta^2` must lie
    /// strictly between `j_1^2` and `j_2'^2`.
    #[error("single-mode condition violated: need {lo} < {mid} < {hi}")]
    SingleModeCondition { lo: f64, mid: f64, hi: f64 },
    /// Matching functions evaluated outside `(w0, winf)`.
    #[error("mu = {mu} outside the open well interval ({lo}, {hi})")]
    OutsideWell { mu: f64, lo: f64, hi: f64 },
    /// Underlying special-function failure (pole of `alpha`, domain, range).
    #[error(transparent)]
    Bessel(#[from] BesselError),
}

/// Piecewise-constant radial step potential.
///
/// Construction enforces both invariants: `w0 < winf` and the single-mode
/// condition, so every value of this type carries exactly one bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRadialPotential {
    w0: f64,
    winf: f64,
    delta: f64,
}

impl StepRadialPotential {
    pub fn new(w0: f64, winf: f64, delta: f64) -> Result<Self, RadialError> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(RadialError::BadDelta(delta));
        }
        if !(w0 < winf) {
            return Err(RadialError::NotAWell {
                lower: w0,
                upper: winf,
            });
        }
        let (j1_sq, j2p_sq) = j_squares();
        let mid = (winf - w0) * delta * delta;
        if !(j1_sq < mid && mid < j2p_sq) {
            return Err(RadialError::SingleModeCondition {
                lo: j1_sq,
                mid,
                hi: j2p_sq,
            });
        }
        Ok(Self { w0, winf, delta })
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn winf(&self) -> f64 {
        self.winf
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Potential value at radius `r >= 0`.
    pub fn value(&self, r: f64) -> f64 {
        if r < self.delta {
            self.w0
        } else {
            self.winf
        }
    }

    /// Exact average of `W` over `[lo, hi]`.
    ///
    /// Grid assembly converges at second order for step potentials only
    /// when cells straddling the step carry the averaged value; midpoint
    /// sampling misassigns up to half a cell of the jump.
    pub fn average_on(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo < hi);
        if hi <= self.delta {
            self.w0
        } else if lo >= self.delta {
            self.winf
        } else {
            (self.w0 * (self.delta - lo) + self.winf * (hi - self.delta)) / (hi - lo)
        }
    }
}

/// Output of the eigenvalue design recipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDesign {
    /// Designed eigenvalue of `L_r`.
    pub mu0: f64,
    /// Essential-spectrum edge.
    pub winf: f64,
    /// Chosen decay coupling, in `[eta_*, eta^*]`.
    pub eta: f64,
    /// Matching value with `alpha(xi) = beta(eta)`, in `(j_1', j_1)`.
    pub xi: f64,
    /// Step radius `eta / sqrt(winf - mu0)`.
    pub delta: f64,
    /// Well depth `mu0 - (xi / delta)^2`.
    pub w0: f64,
}

impl RadialDesign {
    /// The designed step potential.
    pub fn potential(&self) -> StepRadialPotential {
        // Invariants hold by construction in `design_radial`.
        StepRadialPotential {
            w0: self.w0,
            winf: self.winf,
            delta: self.delta,
        }
    }
}

fn j_squares() -> (f64, f64) {
    // First zero of J1 and second zero of J1'; zero-finding is cheap and
    // deterministic, no caching needed.
    let j = special::j1_zeros(1).expect("first J1 zero");
    let jp = special::j1_prime_zeros(2).expect("first two J1' zeros");
    (j[0] * j[0], jp[1] * jp[1])
}

/// Admissible window `(eta_*, eta^*)` for the coupling:
/// `eta_* = sqrt(j_1^2 - j_1'^2)`, `eta^* = sqrt(j_2'^2 - j_1^2)`.
pub fn eta_bounds() -> (f64, f64) {
    let j = special::j1_zeros(1).expect("first J1 zero");
    let jp = special::j1_prime_zeros(2).expect("first two J1' zeros");
    let lo = (j[0] * j[0] - jp[0] * jp[0]).sqrt();
    let hi = (jp[1] * jp[1] - j[0] * j[0]).sqrt();
    (lo, hi)
}

/// Solve `alpha(xi) = beta(eta)` for the unique `xi` in `(j_1', j_1)`.
///
/// `alpha` increases strictly from `-inf` to `0` on that interval while
/// `beta(eta)` is a constant in `(-1, 0)`, so bisection cannot fail. The
/// bracket is narrowed to width 1e-13.
pub fn xi_of_eta(eta: f64) -> Result<f64, RadialError> {
    let (eta_lo, eta_hi) = eta_bounds();
    if !(eta >= eta_lo && eta <= eta_hi) {
        return Err(RadialError::EtaOutOfRange {
            eta,
            lo: eta_lo,
            hi: eta_hi,
        });
    }
    let target = special::beta(eta)?;
    let j1_first = special::j1_zeros(1)?[0];
    let jp_first = special::j1_prime_zeros(1)?[0];

    let mut lo = jp_first + 1e-9;
    let mut hi = j1_first;
    // f(lo) = alpha(lo) - target < 0 (alpha -> -inf), f(hi) = -target > 0.
    let mut f_lo = special::alpha(lo)? - target;
    for _ in 0..120 {
        if hi - lo < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = special::alpha(mid)? - target;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Run the design recipe: given the target eigenvalue `mu0`, the
/// essential-spectrum edge `winf > mu0`, and an admissible `eta`, produce the
/// step potential for which `mu0` is the unique eigenvalue of `L_r`.
pub fn design_radial(mu0: f64, winf: f64, eta: f64) -> Result<RadialDesign, RadialError> {
    if !(winf > mu0) {
        return Err(RadialError::NotAWell {
            lower: mu0,
            upper: winf,
        });
    }
    let xi = xi_of_eta(eta)?;
    let delta = eta / (winf - mu0).sqrt();
    let w0 = mu0 - (xi / delta) * (xi / delta);
    // (winf - w0) delta^2 = xi^2 + eta^2 lies in (j_1^2, j_2'^2) by the
    // choice of eta; the constructor re-checks.
    StepRadialPotential::new(w0, winf, delta)?;
    Ok(RadialDesign {
        mu0,
        winf,
        eta,
        xi,
        delta,
        w0,
    })
}

/// Left matching function `g(mu) = alpha(sqrt(mu - w0) delta)`.
///
/// Strictly increasing between its poles; errors at a pole of `alpha`.
pub fn matching_g(pot: &StepRadialPotential, mu: f64) -> Result<f64, RadialError> {
    check_in_well(pot, mu)?;
    let arg = (mu - pot.w0).sqrt() * pot.delta;
    Ok(special::alpha(arg)?)
}

/// Right matching function `h(mu) = beta(sqrt(winf - mu) delta)`.
///
/// Strictly decreasing in `mu` with values in `(-1, 0)`.
pub fn matching_h(pot: &StepRadialPotential, mu: f64) -> Result<f64, RadialError> {
    check_in_well(pot, mu)?;
    let arg = (pot.winf - mu).sqrt() * pot.delta;
    Ok(special::beta(arg)?)
}

fn check_in_well(pot: &StepRadialPotential, mu: f64) -> Result<(), RadialError> {
    if !(mu > pot.w0 && mu < pot.winf) {
        return Err(RadialError::OutsideWell {
            mu,
            lo: pot.w0,
            hi: pot.winf,
        });
    }
    Ok(())
}

/// The unique eigenvalue of `L_r` below the essential spectrum.
///
/// The root of `g - h` is bracketed in
/// `(w0 + (j_1'/delta)^2, w0 + (j_1/delta)^2]`, where `g` runs from `-inf`
/// to `0` while `h` stays in `(-1, 0)`; bisection then converges
/// unconditionally and the returned `mu_0` satisfies
/// `|g(mu_0) - h(mu_0)| <= 1e-10`.
pub fn radial_eigenvalue(pot: &StepRadialPotential) -> Result<f64, RadialError> {
    let j1_first = special::j1_zeros(1)?[0];
    let jp_first = special::j1_prime_zeros(1)?[0];
    let d2 = pot.delta * pot.delta;

    let guard = POLE_GUARD_FRACTION * (pot.winf - pot.w0);
    let mut lo = pot.w0 + jp_first * jp_first / d2 + guard;
    let mut hi = pot.w0 + j1_first * j1_first / d2;

    let eval = |mu: f64| -> Result<f64, RadialError> {
        Ok(matching_g(pot, mu)? - matching_h(pot, mu)?)
    };
    let mut f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if !(f_lo < 0.0 && f_hi > 0.0) {
        // With the type invariants enforced this cannot trigger; kept as a
        // hard failure rather than a silent wrong answer.
        return Err(RadialError::SingleModeCondition {
            lo: j1_first * j1_first,
            mid: (pot.winf - pot.w0) * d2,
            hi: jp_first * jp_first,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenfunction of the designed bound state, normalized to `u(delta) = 1`.
///
/// Piecewise Bessel profile: `J_1(sqrt(mu0 - w0) r)/r` inside the step and
/// `K_1(sqrt(winf - mu0) r)/r` outside. When `mu0` is the eigenvalue of
/// `pot` the two branches match in value and derivative at `r = delta`.
pub fn radial_eigenfunction(
    pot: &StepRadialPotential,
    mu0: f64,
    r: f64,
) -> Result<f64, RadialError> {
    check_in_well(pot, mu0)?;
    if r < 0.0 {
        return Err(RadialError::BadDelta(r));
    }
    let k_in = (mu0 - pot.w0).sqrt();
    let k_out = (pot.winf - mu0).sqrt();
    if r < pot.delta {
        // u(r) = [J1(k r)/(k r)] * (k delta) / J1(k delta); the bracketed
        // factor has the finite limit 1/2 at r = 0.
        let j_at_delta = special::j1(k_in * pot.delta)?;
        let ratio = if r == 0.0 {
            0.5
        } else {
            special::j1(k_in * r)? / (k_in * r)
        };
        Ok(ratio * k_in * pot.delta / j_at_delta)
    } else {
        let k_at_delta = special::k1(k_out * pot.delta)?;
        Ok(pot.delta / r * special::k1(k_out * r)? / k_at_delta)
    }
}

/// Full spectrum of `L_r`: the single eigenvalue plus `[winf, inf)`.
pub fn radial_spectrum(pot: &StepRadialPotential) -> Result<SpectrumSet, RadialError> {
    let mu0 = radial_eigenvalue(pot)?;
    Ok(SpectrumSet::from_parts(&[mu0], &[], Some(pot.winf)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn figure_potential() -> StepRadialPotential {
        StepRadialPotential::new(0.0, 20.0, 1.0).unwrap()
    }

    #[test]
    fn eta_window_values() {
        // sqrt(3.83171^2 - 1.84118^2) and sqrt(5.33144^2 - 3.83171^2).
        let (lo, hi) = eta_bounds();
        assert_abs_diff_eq!(lo, 3.3604, epsilon = 1e-3);
        assert_abs_diff_eq!(hi, 3.7070, epsilon = 1e-3);
        assert!(lo < hi);
    }

    #[test]
    fn xi_solves_matching_equation() {
        let (eta_lo, eta_hi) = eta_bounds();
        for eta in [eta_lo, 0.5 * (eta_lo + eta_hi), eta_hi] {
            let xi = xi_of_eta(eta).unwrap();
            let res = special::alpha(xi).unwrap() - special::beta(eta).unwrap();
            assert!(res.abs() <= 1e-10, "residual {res} at eta = {eta}");
            assert!(xi > 1.84118 && xi < 3.83171);
            // The admissibility constraint of the design window.
            let s = xi * xi + eta * eta;
            assert!(s > 3.83171f64.powi(2) && s < 5.33144f64.powi(2));
        }
    }

    #[test]
    fn xi_monotone_in_eta() {
        let (eta_lo, eta_hi) = eta_bounds();
        let mut prev = xi_of_eta(eta_lo).unwrap();
        for i in 1..50 {
            let eta = eta_lo + (eta_hi - eta_lo) * (i as f64) / 49.0;
            let xi = xi_of_eta(eta).unwrap();
            assert!(xi > prev, "xi not increasing at eta = {eta}");
            prev = xi;
        }
    }

    #[test]
    fn xi_rejects_out_of_window() {
        let (eta_lo, eta_hi) = eta_bounds();
        assert!(matches!(
            xi_of_eta(eta_lo - 0.01),
            Err(RadialError::EtaOutOfRange { .. })
        ));
        assert!(matches!(
            xi_of_eta(eta_hi + 0.01),
            Err(RadialError::EtaOutOfRange { .. })
        ));
    }

    #[test]
    fn design_example() {
        let d = design_radial(-5.0, 2.0, 3.5).unwrap();
        assert_abs_diff_eq!(d.delta, 3.5 / 7.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            d.w0,
            -5.0 - (d.xi / d.delta) * (d.xi / d.delta),
            epsilon = 1e-10
        );
        // Constructor validated the single-mode condition already; sanity
        // check it explicitly here.
        let mid = (d.winf - d.w0) * d.delta * d.delta;
        assert!(3.83171f64.powi(2) < mid && mid < 5.33144f64.powi(2));
    }

    #[test]
    fn design_closure() {
        let d = design_radial(-5.0, 2.0, 3.5).unwrap();
        let mu = radial_eigenvalue(&d.potential()).unwrap();
        assert_abs_diff_eq!(mu, -5.0, epsilon = 1e-8);
    }

    #[test]
    fn design_rejects_bad_inputs() {
        assert!(matches!(
            design_radial(2.0, 2.0, 3.5),
            Err(RadialError::NotAWell { .. })
        ));
        assert!(matches!(
            design_radial(-5.0, 2.0, 10.0),
            Err(RadialError::EtaOutOfRange { .. })
        ));
    }

    #[test]
    fn design_closure_random_triples() {
        let mut rng = StdRng::seed_from_u64(0xC0FFEE);
        let (eta_lo, eta_hi) = eta_bounds();
        for _ in 0..20 {
            let mu0 = rng.gen_range(-10.0..5.0);
            let winf = mu0 + rng.gen_range(0.5..20.0);
            let eta = rng.gen_range(eta_lo..eta_hi);
            let d = design_radial(mu0, winf, eta).unwrap();
            let mu = radial_eigenvalue(&d.potential()).unwrap();
            assert_abs_diff_eq!(mu, mu0, epsilon = 1e-8);
        }
    }

    #[test]
    fn matching_pole_and_zero_of_g() {
        let pot = figure_potential();
        // Pole at mu = j_1'^2 ~ 3.39: g flips from large positive to large
        // negative across it.
        let pole = 1.8411837813406593f64.powi(2);
        assert!(matching_g(&pot, pole - 1e-4).unwrap() > 1e2);
        assert!(matching_g(&pot, pole + 1e-4).unwrap() < -1e2);
        // Zero at mu = j_1^2 ~ 14.682.
        let zero = 3.8317059702075123f64.powi(2);
        assert_abs_diff_eq!(matching_g(&pot, zero).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn matching_h_range_and_g_limit() {
        let pot = figure_potential();
        for i in 1..200 {
            let mu = 20.0 * (i as f64) / 200.0;
            let h = matching_h(&pot, mu).unwrap();
            assert!(h > -1.0 && h < 0.0);
        }
        // g starts from 1 at the bottom of the well.
        assert_abs_diff_eq!(matching_g(&pot, 1e-8).unwrap(), 1.0, epsilon = 1e-4);
        // outside the well both matching functions refuse
        assert!(matches!(
            matching_g(&pot, -1.0),
            Err(RadialError::OutsideWell { .. })
        ));
        assert!(matches!(
            matching_h(&pot, 25.0),
            Err(RadialError::OutsideWell { .. })
        ));
    }

    #[test]
    fn g_increasing_between_poles_h_decreasing() {
        let pot = figure_potential();
        let pole = 1.8411837813406593f64.powi(2);
        // Sample the two sub-intervals of (0, 20) cut by the pole.
        for (lo, hi) in [(0.01, pole - 0.01), (pole + 0.01, 19.99)] {
            let mut prev = matching_g(&pot, lo).unwrap();
            for i in 1..500 {
                let mu = lo + (hi - lo) * (i as f64) / 499.0;
                let g = matching_g(&pot, mu).unwrap();
                assert!(g > prev, "g not increasing at mu = {mu}");
                prev = g;
            }
        }
        let mut prev = matching_h(&pot, 0.01).unwrap();
        for i in 1..500 {
            let mu = 0.01 + 19.98 * (i as f64) / 499.0;
            let h = matching_h(&pot, mu).unwrap();
            assert!(h < prev, "h not decreasing at mu = {mu}");
            prev = h;
        }
    }

    #[test]
    fn figure_eigenvalue_bracket_and_uniqueness() {
        let pot = figure_potential();
        let mu0 = radial_eigenvalue(&pot).unwrap();
        assert!(mu0 > 3.39 && mu0 < 14.682, "mu0 = {mu0}");
        let res = matching_g(&pot, mu0).unwrap() - matching_h(&pot, mu0).unwrap();
        assert!(res.abs() <= 1e-10);

        // Exactly one sign change of g - h over the well (the scan treats the
        // pole of g, where the difference jumps without a root, separately).
        let mut signs = 0;
        let mut prev: Option<f64> = None;
        for i in 1..10_000 {
            let mu = 20.0 * (i as f64) / 10_000.0;
            let g = match matching_g(&pot, mu) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let d = g - matching_h(&pot, mu).unwrap();
            if let Some(p) = prev {
                // Jump across the pole: g goes +inf -> -inf, ignore.
                if p > 0.0 && d < 0.0 && d - p < -1e3 {
                    prev = Some(d);
                    continue;
                }
                if p * d < 0.0 {
                    signs += 1;
                }
            }
            prev = Some(d);
        }
        assert_eq!(signs, 1);
    }

    #[test]
    fn eigenfunction_matches_at_step() {
        let pot = figure_potential();
        let mu0 = radial_eigenvalue(&pot).unwrap();
        let d = pot.delta();
        let left = radial_eigenfunction(&pot, mu0, d - 1e-12).unwrap();
        let right = radial_eigenfunction(&pot, mu0, d).unwrap();
        assert_abs_diff_eq!(left, right, epsilon = 1e-8 * right.abs());
        assert_abs_diff_eq!(right, 1.0, epsilon = 1e-12);

        // C1 matching: one-sided difference quotients agree to 1e-6 rel.
        let h = 1e-7;
        let dl = (radial_eigenfunction(&pot, mu0, d - 1e-12).unwrap()
            - radial_eigenfunction(&pot, mu0, d - h).unwrap())
            / (h - 1e-12);
        let dr = (radial_eigenfunction(&pot, mu0, d + h).unwrap()
            - radial_eigenfunction(&pot, mu0, d).unwrap())
            / h;
        assert_abs_diff_eq!(dl, dr, epsilon = 1e-5 * dl.abs().max(dr.abs()));
    }

    #[test]
    fn eigenfunction_decays_and_is_normalizable() {
        let pot = figure_potential();
        let mu0 = radial_eigenvalue(&pot).unwrap();
        let u10 = radial_eigenfunction(&pot, mu0, 10.0).unwrap();
        let u20 = radial_eigenfunction(&pot, mu0, 20.0).unwrap();
        assert!(u10.abs() < 1e-6 && u20.abs() < u10.abs());

        // int u^2 r^3 dr converges: extending the quadrature domain changes
        // nothing at the scale of the integral.
        let quad = |r_max: f64| {
            let n = 20_000;
            let h = r_max / n as f64;
            (0..n)
                .map(|i| {
                    let r = (i as f64 + 0.5) * h;
                    let u = radial_eigenfunction(&pot, mu0, r).unwrap();
                    u * u * r * r * r * h
                })
                .sum::<f64>()
        };
        let q20 = quad(20.0);
        let q40 = quad(40.0);
        assert!(q20.is_finite());
        assert_abs_diff_eq!(q20, q40, epsilon = 1e-6 * q20);
    }

    #[test]
    fn spectrum_shape() {
        let pot = figure_potential();
        let s = radial_spectrum(&pot).unwrap();
        let mu0 = radial_eigenvalue(&pot).unwrap();
        assert_eq!(s.points(), &[mu0]);
        assert!(s.intervals().is_empty());
        assert_eq!(s.tail(), Some(20.0));
        assert!(mu0 > pot.w0() && mu0 < pot.winf());
    }

    #[test]
    fn constructor_rejects_multi_mode_wells() {
        // Too deep: (winf - w0) delta^2 above j_2'^2.
        assert!(matches!(
            StepRadialPotential::new(0.0, 30.0, 1.0),
            Err(RadialError::SingleModeCondition { .. })
        ));
        // Too shallow: below j_1^2, no bound state.
        assert!(matches!(
            StepRadialPotential::new(0.0, 10.0, 1.0),
            Err(RadialError::SingleModeCondition { .. })
        ));
        assert!(matches!(
            StepRadialPotential::new(3.0, 1.0, 1.0),
            Err(RadialError::NotAWell { .. })
        ));
        assert!(matches!(
            StepRadialPotential::new(0.0, 20.0, -1.0),
            Err(RadialError::BadDelta(_))
        ));
    }
}
