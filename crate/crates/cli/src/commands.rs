//! The five subcommands: band structure, potential design, matching curves,
//! assembled spectrum, and ground-state solves.

use curlgap_core::ground_state::{
    energy, solve_defocusing, solve_focusing, Mode, Problem, SolveError,
};
use curlgap_core::periodic::{self, BandError};
use curlgap_core::radial::{self, RadialError};
use curlgap_core::spectrum::{self, GapCertificate, SpectrumSet, SpectrumError};
use curlgap_core::{CylGrid, Field};
use serde::Serialize;
use std::path::Path;

use crate::config::{PotentialSpec, RunConfig};
use crate::io;
use crate::CliError;

/// Cap on worker threads for the sampling loops, from `CURLGAP_THREADS`.
fn thread_count() -> usize {
    std::env::var("CURLGAP_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Deterministic chunked parallel map over `0..n`.
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = thread_count().min(n.max(1));
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (tid, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, cell) in slot.iter_mut().enumerate() {
                    *cell = Some(f(tid * chunk + off));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("filled")).collect()
}

fn band_err(e: BandError) -> CliError {
    match e {
        BandError::GapClosed { .. } => CliError::Hypothesis(e.to_string()),
        BandError::EdgeNotFound { .. } => CliError::NonConvergence(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn radial_err(e: RadialError) -> CliError {
    CliError::Hypothesis(e.to_string())
}

fn spectrum_err(e: SpectrumError) -> CliError {
    match e {
        SpectrumError::ChainViolation { .. }
        | SpectrumError::BadFraction(_)
        | SpectrumError::Truncation { .. } => CliError::Hypothesis(e.to_string()),
        SpectrumError::Band(b) => band_err(b),
        SpectrumError::Radial(r) => radial_err(r),
        other => CliError::Config(other.to_string()),
    }
}

fn solve_err(e: SolveError) -> CliError {
    match e {
        SolveError::NonConvergence { .. }
        | SolveError::InnerNoConvergence
        | SolveError::AllStartsFailed(_)
        | SolveError::Eigen(_) => CliError::NonConvergence(e.to_string()),
        SolveError::Grid(g) => CliError::Config(g.to_string()),
        other => CliError::Hypothesis(other.to_string()),
    }
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<std::path::PathBuf, CliError> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Serialize)]
struct GapReport {
    gap_open: bool,
    first_gap: Option<[f64; 2]>,
    width: f64,
}

/// `bands`: band-edge table and first-gap report for the periodic factor.
pub fn cmd_bands(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.periodic()?;
    let dir = ensure_output_dir(cfg)?;
    let bands = periodic::band_edges(&p, cfg.bands.count).map_err(band_err)?;
    io::write_band_csv(&dir.join("bands.csv"), bands.edges())?;

    let gap = periodic::first_gap(&p);
    let report = match &gap {
        Ok((nu2, nu3)) => GapReport {
            gap_open: true,
            first_gap: Some([*nu2, *nu3]),
            width: nu3 - nu2,
        },
        Err(_) => GapReport {
            gap_open: false,
            first_gap: None,
            width: 0.0,
        },
    };
    io::write_json(&dir.join("gap_report.json"), &report)?;
    println!(
        "bands: {} bands written to {}; first gap {}",
        bands.count(),
        dir.join("bands.csv").display(),
        if report.gap_open { "open" } else { "closed" }
    );
    if cfg.bands.require_gap {
        gap.map_err(band_err)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PotentialDocument {
    w0: f64,
    winf: f64,
    delta: f64,
    mu0: f64,
    eta: f64,
    xi: f64,
}

/// `design`: run the gap-design pipeline; emit the potential parameters and
/// the gap certificate.
pub fn cmd_design(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.periodic()?;
    let d = cfg.design()?;
    let dir = ensure_output_dir(cfg)?;
    let designed =
        spectrum::design_potential(&p, d.winf, d.eta, d.mu0_fraction, cfg.bands.count)
            .map_err(spectrum_err)?;
    let doc = PotentialDocument {
        w0: designed.design.w0,
        winf: designed.design.winf,
        delta: designed.design.delta,
        mu0: designed.design.mu0,
        eta: designed.design.eta,
        xi: designed.design.xi,
    };
    io::write_json(&dir.join("potential.json"), &doc)?;
    io::write_json(&dir.join("certificate.json"), &designed.certificate)?;
    println!(
        "design: mu0 = {}, delta = {}, w0 = {}; margin at 0 = {}",
        doc.mu0, doc.delta, doc.w0, designed.certificate.margin
    );
    Ok(())
}

/// `curves`: sample the matching functions over the well interval.
pub fn cmd_curves(cfg: &RunConfig) -> Result<(), CliError> {
    let pot = cfg.radial()?;
    let dir = ensure_output_dir(cfg)?;
    let n = cfg.curves.samples.max(2);
    let (w0, winf) = (pot.w0(), pot.winf());
    let rows = parallel_map(n + 1, |i| {
        let mu = w0 + (winf - w0) * i as f64 / n as f64;
        let g = if i == 0 {
            Some(1.0) // limit of g at the bottom of the well
        } else {
            radial::matching_g(&pot, mu).ok()
        };
        let h = if i == n {
            Some(-1.0) // limit of h at the essential-spectrum edge
        } else {
            radial::matching_h(&pot, mu).ok()
        };
        (mu, g, h)
    });
    io::write_curves_csv(&dir.join("curves.csv"), &rows)?;
    let mu0 = radial::radial_eigenvalue(&pot).map_err(radial_err)?;
    println!(
        "curves: {} samples written to {}; matching root at mu = {mu0}",
        rows.len(),
        dir.join("curves.csv").display()
    );
    Ok(())
}

/// `spectrum`: assemble the separable spectrum and certify the origin.
///
/// With a `radial_design` section the pipeline designs the radial factor;
/// with a direct `radial` section the eigenvalue is computed from the given
/// step potential.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.periodic()?;
    let dir = ensure_output_dir(cfg)?;
    let (set, certificate) = if cfg.radial_design.is_some() {
        let d = cfg.design()?;
        let designed =
            spectrum::design_potential(&p, d.winf, d.eta, d.mu0_fraction, cfg.bands.count)
                .map_err(spectrum_err)?;
        (designed.spectrum, designed.certificate)
    } else {
        let pot = cfg.radial()?;
        let rad = radial::radial_spectrum(&pot).map_err(radial_err)?;
        let bands = periodic::band_edges(&p, cfg.bands.count).map_err(band_err)?;
        let set = spectrum::assemble(&rad, &bands, pot.winf()).map_err(spectrum_err)?;
        let cert = spectrum::gap_margin(&set, 0.0);
        (set, cert)
    };
    io::write_json(&dir.join("spectrum.json"), &set)?;
    io::write_json(&dir.join("certificate.json"), &certificate)?;
    println!(
        "spectrum: {} intervals, min = {:?}; margin at 0 = {}",
        set.intervals().len(),
        set.min(),
        certificate.margin
    );
    Ok(())
}

#[derive(Serialize)]
struct ResultDocument {
    energy: f64,
    el_residual: f64,
    el_scale: f64,
    nehari_residuals: [f64; 2],
    nontrivial: bool,
    iterations: usize,
    starts: usize,
    start_energies: Vec<f64>,
}

/// `groundstate`: solve the nonlinear problem on the configured grid.
pub fn cmd_groundstate(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    let section = cfg.problem_section()?.clone();
    let dir = ensure_output_dir(cfg)?;
    let opts = cfg.solver.to_options();
    let gamma = section.gamma.clone();
    let gamma_fn = gamma.sampler();

    let result = match (&section.potential, section.mode) {
        (PotentialSpec::Constant(c), Mode::Defocusing) => {
            let c = *c;
            let prob = Problem::defocusing(grid, move |_, _| c, &gamma_fn, section.p)
                .map_err(solve_err)?;
            solve_defocusing(&prob, &opts).map_err(solve_err)?
        }
        (PotentialSpec::Constant(c), Mode::Focusing) => {
            let c = *c;
            if !(c > 0.0) {
                return Err(CliError::Hypothesis(format!(
                    "constant potential {c} gives no spectral gap at 0; use a designed potential"
                )));
            }
            // V >= c > 0 puts the whole spectrum in [c, inf).
            let cert = spectrum::gap_margin(
                &SpectrumSet::from_parts(&[], &[], Some(c)),
                0.0,
            );
            let prob = Problem::focusing(grid, move |_, _| c, &gamma_fn, section.p, cert)
                .map_err(solve_err)?;
            solve_focusing(&prob, &opts).map_err(solve_err)?
        }
        (PotentialSpec::Designed, mode) => {
            let p = cfg.periodic()?;
            let d = cfg.design()?;
            let designed =
                spectrum::design_potential(&p, d.winf, d.eta, d.mu0_fraction, cfg.bands.count)
                    .map_err(spectrum_err)?;
            let step = designed.design.potential();
            let hr = grid.hr();
            let hz = grid.hz();
            let sampler = move |r: f64, z: f64| {
                step.average_on(r - 0.5 * hr, r + 0.5 * hr)
                    + p.average_on(z - 0.5 * hz, z + 0.5 * hz)
            };
            match mode {
                Mode::Focusing => {
                    let prob = Problem::focusing(
                        grid,
                        sampler,
                        &gamma_fn,
                        section.p,
                        designed.certificate.clone(),
                    )
                    .map_err(solve_err)?;
                    solve_focusing(&prob, &opts).map_err(solve_err)?
                }
                Mode::Defocusing => {
                    let prob = Problem::defocusing(grid, sampler, &gamma_fn, section.p)
                        .map_err(solve_err)?;
                    solve_defocusing(&prob, &opts).map_err(solve_err)?
                }
            }
        }
    };

    io::write_field_csv(&dir.join("field.csv"), &result.u)?;
    io::write_json(&dir.join("field_grid.json"), &io::GridSidecar::from(&grid))?;
    let doc = ResultDocument {
        energy: result.energy,
        el_residual: result.el_residual,
        el_scale: result.el_scale,
        nehari_residuals: [result.nehari_residuals.0, result.nehari_residuals.1],
        nontrivial: result.nontrivial,
        iterations: result.iterations,
        starts: result.starts,
        start_energies: result.start_energies.clone(),
    };
    io::write_json(&dir.join("result.json"), &doc)?;
    println!(
        "groundstate: J = {}, residual = {} (scale {}), nontrivial = {}, iterations = {}",
        doc.energy, doc.el_residual, doc.el_scale, doc.nontrivial, doc.iterations
    );
    Ok(())
}

/// Internal helper shared with the tests: evaluate the discrete energy of a
/// field CSV re-read against a problem (round-trip checks).
pub fn energy_of_field(
    prob: &Problem,
    grid: CylGrid,
    csv_path: &Path,
) -> Result<f64, CliError> {
    let text = std::fs::read_to_string(csv_path)?;
    let mut values = vec![0.0; grid.len()];
    for (row, line) in text.lines().skip(1).enumerate() {
        let mut cols = line.split(',');
        let _r = cols.next();
        let _z = cols.next();
        let u: f64 = cols
            .next()
            .ok_or_else(|| CliError::Config("field CSV row too short".into()))?
            .parse()
            .map_err(|e| CliError::Config(format!("bad field value: {e}")))?;
        values[row] = u;
    }
    let field = Field::from_values(grid, values)
        .map_err(|e| CliError::Config(e.to_string()))?;
    energy(prob, &field).map_err(solve_err)
}

/// Build a gap certificate for a spectrum contained in `[vmin, inf)`.
pub fn positive_spectrum_certificate(vmin: f64) -> GapCertificate {
    spectrum::gap_margin(&SpectrumSet::from_parts(&[], &[], Some(vmin)), 0.0)
}
