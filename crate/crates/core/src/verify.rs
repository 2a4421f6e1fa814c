//! Cross-oracle verification suites. Each check pits one route against an
//! independent one and records the observed discrepancy next to its tolerance.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use libm::{exp, fabs, log2, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernels::{
    half_line_kernel, half_oscillator_kernel, isw_kernel, oscillator_kernel, System, SystemSpec, TimeArgument,
    UnitSystem,
};
use crate::oracle::{grid_eigensolve, grid_propagator, sliced_kernel, GridHamiltonian, SliceConfig, SliceKernel};
use crate::specfun::{ferrers_legendre, legendre_half_closed, SeriesPolicy};
use crate::spectral::{
    image_parity_terms, isw_eigenstate, isw_greens, poschl_teller_greens, scan_poles, spectral_kernel, Grid,
    GreensQuery,
};
use crate::susy::{annihilation_residual, isw_limit_check, Superpotential};
use crate::trace::{default_quadrature, extract_excited_energies, kernel_trace, trace_curve, uniform_ladder};
use crate::Result;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED_1DEA;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kernels,
    Spectra,
    Greens,
    Susy,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "kernels" => Suite::Kernels,
            "spectra" => Suite::Spectra,
            "greens" => Suite::Greens,
            "susy" => Suite::Susy,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `observed <= tolerance`.
    AtMost,
    /// Passes when `observed >= tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        let passed = observed <= tolerance;
        Check { name: name.into(), observed, tolerance, bound: Bound::AtMost, passed }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        let passed = observed >= tolerance;
        Check { name: name.into(), observed, tolerance, bound: Bound::AtLeast, passed }
    }

    /// A check whose computation itself failed.
    fn failed(name: impl Into<String>) -> Self {
        Check { name: name.into(), observed: f64::NAN, tolerance: 0.0, bound: Bound::AtMost, passed: false }
    }
}

fn record(out: &mut Vec<Check>, name: &str, result: Result<Check>) {
    out.push(result.unwrap_or_else(|_| Check::failed(name)));
}

/// Runs a suite; sample points derive from `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Kernels | Suite::All) {
        kernel_checks(&mut out, seed);
    }
    if matches!(suite, Suite::Spectra | Suite::All) {
        spectra_checks(&mut out);
    }
    if matches!(suite, Suite::Greens | Suite::All) {
        greens_checks(&mut out, seed);
    }
    if matches!(suite, Suite::Susy | Suite::All) {
        susy_checks(&mut out);
    }
    out
}

/// `max |K(1e-6, x_i; beta)| / sqrt(m / 2 pi hbar beta)` over `x_i in {0.2, 0.4, ..., 5}`
/// and `beta in {0.1, 1, 5}`.
pub fn half_line_boundary_law(u: UnitSystem) -> Result<f64> {
    let mut worst = 0.0f64;
    for beta in [0.1, 1.0, 5.0] {
        let t = TimeArgument::euclidean(beta)?;
        let scale = sqrt(u.mass() / (2.0 * PI * u.hbar() * beta));
        for k in 1..=25 {
            let x_i = 0.2 * k as f64;
            worst = worst.max(fabs(half_line_kernel(1e-6, x_i, t, u)?.re) / scale);
        }
    }
    Ok(worst)
}

/// Largest `|K(x_f, x_i; b1 + b2) - int K(x_f, y; b2) K(y, x_i; b1) dy|` for the
/// half-line, half-oscillator and square well at a few fixed points.
pub fn chapman_kolmogorov() -> Result<f64> {
    let u = UnitSystem::atomic();
    let nat = UnitSystem::natural_susy();
    let policy = SeriesPolicy::default();
    let cases = [
        (SystemSpec::new(System::HalfLine, u)?, SliceKernel::FreeImage, 1.4),
        (SystemSpec::new(System::HalfOscillator { omega: 1.0 }, u)?, SliceKernel::MehlerImage, 1.0),
        (SystemSpec::new(System::InfiniteWell { width: PI }, nat)?, SliceKernel::WellImageSum, 0.6),
    ];
    let mut worst = 0.0f64;
    for (sys, kernel, beta) in cases {
        for (a, b) in [(0.7, 1.9), (1.3, 1.3), (2.5, 0.4)] {
            let direct = sys.kernel(a, b, TimeArgument::euclidean(beta)?, policy)?.re;
            let composed = sliced_kernel(sys, SliceConfig::new(2, kernel)?, a, b, beta)?.re;
            worst = worst.max(fabs(direct - composed));
        }
    }
    Ok(worst)
}

/// Observed Trotter orders `log2(err_n / err_2n)` of the half-oscillator composition
/// at `n = 4, 8, 16, 32` (three ratios).
pub fn trotter_orders() -> Result<Vec<f64>> {
    let u = UnitSystem::atomic();
    let sys = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, u)?;
    let exact = half_oscillator_kernel(1.0, 0.5, TimeArgument::euclidean(1.0)?, 1.0, u)?.re;
    let errs = [4usize, 8, 16, 32]
        .iter()
        .map(|&n| Ok(fabs(sliced_kernel(sys, SliceConfig::new(n, SliceKernel::FreeImage)?, 1.0, 0.5, 1.0)?.re - exact)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.windows(2).map(|w| log2(w[0] / w[1])).collect())
}

/// Spread of the half-line composition over `n in {1, 4, 16}` slices.
pub fn half_line_slice_spread() -> Result<f64> {
    let u = UnitSystem::atomic();
    let sys = SystemSpec::new(System::HalfLine, u)?;
    let exact = half_line_kernel(1.0, 0.7, TimeArgument::euclidean(1.0)?, u)?.re;
    let mut worst = 0.0f64;
    for n in [1, 4, 16] {
        let k = sliced_kernel(sys, SliceConfig::new(n, SliceKernel::FreeImage)?, 1.0, 0.7, 1.0)?.re;
        worst = worst.max(fabs(k - exact));
    }
    Ok(worst)
}

/// Largest `|image-subtracted term - 2 * odd-only term|` over 60 Hermite levels
/// at a few points.
pub fn parity_mismatch() -> Result<f64> {
    let mut worst = 0.0f64;
    for (a, b) in [(0.8, 1.3), (0.1, 2.7), (3.0, 0.5)] {
        for (image, odd) in image_parity_terms(a, b, 1.0, 1.0, UnitSystem::atomic(), 60)? {
            worst = worst.max(fabs(image - 2.0 * odd));
        }
    }
    Ok(worst)
}

/// Hypergeometric Ferrers route vs the trigonometric closed form for `n <= 10`.
pub fn legendre_route_gap(policy: SeriesPolicy) -> Result<f64> {
    let mut worst = 0.0f64;
    for theta in [0.3, 1.0, 2.0, 2.8] {
        for n in 0..=10 {
            let hyp = ferrers_legendre(-0.5, n as f64 + 0.5, theta, policy)?;
            worst = worst.max(fabs(hyp - legendre_half_closed(n, theta)));
        }
    }
    Ok(worst)
}

fn kernel_checks(out: &mut Vec<Check>, seed: u64) {
    let u = UnitSystem::atomic();
    let nat = UnitSystem::natural_susy();
    let policy = SeriesPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    record(out, "half-line boundary law", half_line_boundary_law(u).map(|v| Check::at_most("half-line boundary law", v, 1e-5)));

    let pairs: Vec<(f64, f64)> = (0..25).map(|_| (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
    let mehler = (|| -> Result<f64> {
        let osc = SystemSpec::new(System::Oscillator { omega: 1.0 }, u)?;
        let t = TimeArgument::euclidean(1.0)?;
        let mut worst = 0.0f64;
        for &(a, b) in &pairs {
            let s = spectral_kernel(osc, a, b, t, 60)?.value.re;
            worst = worst.max(fabs(s - oscillator_kernel(a, b, t, 1.0, u)?.re));
        }
        Ok(worst)
    })();
    record(out, "mehler vs hermite sum", mehler.map(|v| Check::at_most("mehler vs hermite sum", v, 1e-9)));

    let well = (|| -> Result<f64> {
        let sys = SystemSpec::new(System::InfiniteWell { width: PI }, nat)?;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let (a, b) = (rng.random_range(0.05..PI - 0.05), rng.random_range(0.05..PI - 0.05));
            let beta = rng.random_range(0.2..2.0);
            let t = TimeArgument::euclidean(beta)?;
            let image = isw_kernel(a, b, PI, t, nat, policy)?.re;
            worst = worst.max(fabs(image - spectral_kernel(sys, a, b, t, 60)?.value.re));
        }
        Ok(worst)
    })();
    record(out, "well images vs sine sum", well.map(|v| Check::at_most("well images vs sine sum", v, 1e-10)));

    let half = (|| -> Result<f64> {
        let sys = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, u)?;
        let t = TimeArgument::euclidean(1.0)?;
        let mut worst = 0.0f64;
        for &(a, b) in pairs.iter().take(10) {
            let (a, b) = (fabs(a) + 0.01, fabs(b) + 0.01);
            let closed = half_oscillator_kernel(a, b, t, 1.0, u)?.re;
            worst = worst.max(fabs(closed - spectral_kernel(sys, a, b, t, 60)?.value.re));
        }
        Ok(worst)
    })();
    record(out, "half-oscillator images vs odd sum", half.map(|v| Check::at_most("half-oscillator images vs odd sum", v, 1e-9)));

    record(out, "chapman-kolmogorov", chapman_kolmogorov().map(|v| Check::at_most("chapman-kolmogorov", v, 1e-6)));
    record(out, "parity cancellation", parity_mismatch().map(|v| Check::at_most("parity cancellation", v, 0.0)));
    record(out, "legendre routes", legendre_route_gap(policy).map(|v| Check::at_most("legendre routes", v, 1e-8)));
}

fn spectra_checks(out: &mut Vec<Check>) {
    let u = UnitSystem::atomic();
    let nat = UnitSystem::natural_susy();

    let isw = (|| -> Result<f64> {
        let sys = SystemSpec::new(System::InfiniteWell { width: PI }, nat)?;
        let s = grid_eigensolve(&GridHamiltonian::for_system(sys, 0.0, 2000)?, 3)?;
        Ok(s.energies().iter().zip([1.0, 4.0, 9.0]).map(|(e, w)| fabs(e - w)).fold(0.0, f64::max))
    })();
    record(out, "grid well levels", isw.map(|v| Check::at_most("grid well levels", v, 1e-4)));

    let half = half_oscillator_grid_levels().map(|e| {
        e.iter().zip([1.5, 3.5, 5.5]).map(|(e, w)| fabs(e - w)).fold(0.0, f64::max)
    });
    record(out, "grid half-oscillator levels", half.map(|v| Check::at_most("grid half-oscillator levels", v, 1e-4)));

    let trace = (|| -> Result<f64> {
        let sys = SystemSpec::new(System::InfiniteWell { width: PI }, nat)?;
        let t = kernel_trace(sys, 0.5, &default_quadrature(sys, 0.5)?)?.value;
        let z: f64 = (1..200).map(|n| exp(-((n * n) as f64) * 0.5)).sum();
        Ok(fabs(t - z))
    })();
    record(out, "well trace", trace.map(|v| Check::at_most("well trace", v, 1e-4)));

    let ladder = half_oscillator_ladder_levels().map(|e| fabs(e[0] - 1.5).max(fabs(e[1] - 3.5)));
    record(out, "half-oscillator ladder extraction", ladder.map(|v| Check::at_most("half-oscillator ladder extraction", v, 5e-2)));

    let grid_half_line = (|| -> Result<f64> {
        let sys = SystemSpec::new(System::HalfLine, u)?;
        let p = grid_propagator(&GridHamiltonian::for_system(sys, 14.0, 3000)?, 1.0, 150)?;
        let t = TimeArgument::euclidean(1.0)?;
        let mut worst = 0.0f64;
        for j in 1..=5 {
            for k in 1..=5 {
                let (a, b) = (0.6 * j as f64, 0.6 * k as f64);
                worst = worst.max(fabs(p.at(a, b) - half_line_kernel(a, b, t, u)?.re));
            }
        }
        Ok(worst)
    })();
    record(out, "grid propagator vs half-line", grid_half_line.map(|v| Check::at_most("grid propagator vs half-line", v, 2e-4)));

    record(
        out,
        "trotter order",
        trotter_orders().map(|o| Check::at_least("trotter order", o.iter().fold(f64::INFINITY, |m, x| m.min(*x)), 1.8)),
    );
    record(out, "half-line slice independence", half_line_slice_spread().map(|v| Check::at_most("half-line slice independence", v, 1e-8)));
}

/// Lowest three grid levels of the half-oscillator (`omega = hbar = m = 1`) on `[0, 12]`.
pub fn half_oscillator_grid_levels() -> Result<Vec<f64>> {
    let sys = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, UnitSystem::atomic())?;
    let s = grid_eigensolve(&GridHamiltonian::for_system(sys, 12.0, 6000)?, 3)?;
    Ok(s.energies().to_vec())
}

/// Two lowest half-oscillator levels from traces on `beta in {0.5, 1.0, ..., 4.0}`.
pub fn half_oscillator_ladder_levels() -> Result<Vec<f64>> {
    let sys = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, UnitSystem::atomic())?;
    let curve = trace_curve(sys, &uniform_ladder(0.5, 0.5, 8)?)?;
    Ok(extract_excited_energies(&curve, 2)?.spectrum.energies().to_vec())
}

/// Poles of the square-well Green's function in `[0.5, 10]` at `x_f = x_i = 1`.
pub fn well_poles(policy: SeriesPolicy) -> Result<Vec<f64>> {
    scan_poles(|e| isw_greens(1.0, 1.0, e, policy), 0.5, 10.0, 0.05, 1e-9)
}

/// Seeded sample triples `(x_f, x_i, E)` away from the square-well poles.
pub fn greens_samples(seed: u64, count: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = rng.random_range(0.05..PI - 0.05);
        let y = rng.random_range(0.05..PI - 0.05);
        let e: f64 = rng.random_range(-5.0..20.0);
        let nearest = libm::round(sqrt(e.max(0.0))).max(1.0);
        if fabs(e - nearest * nearest) > 1e-3 {
            out.push((x, y, e));
        }
    }
    out
}

/// Largest `|G_PT(s = 1/2) - G_well|` over the samples.
pub fn greens_route_gap(samples: &[(f64, f64, f64)], policy: SeriesPolicy) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(x, y, e) in samples {
        let pt = poschl_teller_greens(GreensQuery::new(0.5, e, x, y, policy)?)?;
        worst = worst.max(fabs(pt - isw_greens(x, y, e, policy)?));
    }
    Ok(worst)
}

fn greens_checks(out: &mut Vec<Check>, seed: u64) {
    let policy = SeriesPolicy::default();
    let samples = greens_samples(seed, 20);
    record(out, "greens routes at s = 1/2", greens_route_gap(&samples, policy).map(|v| Check::at_most("greens routes at s = 1/2", v, 1e-9)));

    let poles = well_poles(policy).map(|p| {
        if p.len() != 3 {
            return f64::INFINITY;
        }
        p.iter().zip([1.0, 4.0, 9.0]).map(|(p, w)| fabs(p - w)).fold(0.0, f64::max)
    });
    record(out, "well green poles", poles.map(|v| Check::at_most("well green poles", v, 1e-6)));

    let residue = (|| -> Result<f64> {
        let mut worst = 0.0f64;
        for n in 0..3usize {
            let pole = ((n + 1) * (n + 1)) as f64;
            let (x, y) = (1.0, 2.2);
            let f = |d: f64| -> Result<f64> { Ok(d * isw_greens(x, y, pole + d, policy)?) };
            let r = 2.0 * f(5e-4)? - f(1e-3)?;
            worst = worst.max(fabs(r - isw_eigenstate(n, x, PI) * isw_eigenstate(n, y, PI)));
        }
        let f = |d: f64| -> Result<f64> { Ok(d * isw_greens(FRAC_PI_2, FRAC_PI_2, 1.0 + d, policy)?) };
        worst = worst.max(fabs(2.0 * f(5e-4)? - f(1e-3)? - 2.0 / PI));
        Ok(worst)
    })();
    record(out, "pole residues", residue.map(|v| Check::at_most("pole residues", v, 1e-6)));

    let symmetry = (|| -> Result<f64> {
        let mut worst = 0.0f64;
        for &(x, y, e) in samples.iter().take(5) {
            for s in [0.0, 1.3] {
                if GreensQuery::new(s, e, x, y, policy).is_err() {
                    continue;
                }
                let a = poschl_teller_greens(GreensQuery::new(s, e, x, y, policy)?)?;
                let b = poschl_teller_greens(GreensQuery::new(s, e, y, x, policy)?)?;
                worst = worst.max(fabs(a - b) / fabs(a).max(1.0));
            }
        }
        Ok(worst)
    })();
    record(out, "greens symmetry", symmetry.map(|v| Check::at_most("greens symmetry", v, 1e-12)));

    let midpoint = poschl_teller_greens(GreensQuery::new(0.5, 0.0, FRAC_PI_2, FRAC_PI_2, policy).unwrap_or_else(|_| unreachable!()))
        .map(|g| fabs(g + PI / 4.0));
    record(out, "zero-energy midpoint", midpoint.map(|v| Check::at_most("zero-energy midpoint", v, 1e-12)));
}

/// Largest `|E_n(grid) - ((b+n)² - b²)|` for `n <= 3` on 2000 nodes.
pub fn rosen_morse_grid_gap(b: f64) -> Result<f64> {
    let s = grid_eigensolve(&GridHamiltonian::rosen_morse(b, 2000)?, 4)?;
    Ok(s.energies()
        .iter()
        .enumerate()
        .map(|(n, e)| fabs(e - ((b + n as f64) * (b + n as f64) - b * b)))
        .fold(0.0, f64::max))
}

/// `A⁻ psi_0` residuals of the `b = 2` ground state at `h` and `h/2` (2001 and 4001 nodes).
pub fn annihilation_residuals() -> Result<(f64, f64)> {
    let w = Superpotential::rosen_morse(2.0)?;
    Ok((annihilation_residual(w, &Grid::new(0.0, PI, 2001)?)?, annihilation_residual(w, &Grid::new(0.0, PI, 4001)?)?))
}

fn susy_checks(out: &mut Vec<Check>) {
    let limit = (|| -> Result<Vec<Check>> {
        let report = isw_limit_check(1.0, &Grid::new(0.0, PI, 2001)?, 8, 1e-9)?;
        Ok(report
            .checks
            .iter()
            .map(|c| Check::at_most(format!("limit b = 1: {}", c.name), c.margin, c.tolerance))
            .collect())
    })();
    match limit {
        Ok(c) => out.extend(c),
        Err(_) => out.push(Check::failed("limit b = 1")),
    }
    let residuals = annihilation_residuals();
    record(out, "ground-state annihilation", residuals.clone().map(|(a, _)| Check::at_most("ground-state annihilation", a, 1e-4)));
    record(
        out,
        "annihilation second order",
        residuals.map(|(a, b)| Check::at_least("annihilation second order", a / b, 3.5)),
    );
    for b in [1.0, 1.5, 2.0] {
        let name = format!("rosen-morse grid ladder b = {b}");
        record(out, &name, rosen_morse_grid_gap(b).map(|v| Check::at_most(name.clone(), v, 1e-3)));
    }
    let v = (|| -> Result<f64> {
        let w = Superpotential::rosen_morse(1.0)?;
        let mut worst = 0.0f64;
        for j in 1..10_000 {
            let x = PI * j as f64 / 10_000.0;
            worst = worst.max(fabs(crate::susy::partner_potentials(w, x)?.v_minus + 1.0));
        }
        Ok(worst)
    })();
    record(out, "v_minus constant at b = 1", v.map(|v| Check::at_most("v_minus constant at b = 1", v, 1e-12)));
}
