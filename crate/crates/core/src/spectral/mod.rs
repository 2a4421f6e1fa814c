//! Eigenbases and spectral sums: sine states of the square well, normalized
//! Hermite functions for the full and half oscillator, truncated kernel sums,
//! and (in [`greens`]) the energy-domain Green's function series.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, exp, fabs, sin, sqrt};

use crate::kernels::{KernelValue, System, SystemSpec, TimeArgument, UnitSystem};
use crate::{Error, Result};

pub mod greens;

pub use greens::{isw_greens, poschl_teller_greens, scan_poles, GreensQuery};

/// Uniform grid on `[x_min, x_max]` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidParameter { name: "x_max", value: x_max });
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter { name: "n_points", value: n_points as f64 });
        }
        Ok(Grid { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        if j + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + j as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    /// Trapezoidal weight of node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j + 1 == self.n_points {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoidal integral of samples taken on this grid.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.n_points);
        samples.iter().enumerate().map(|(j, v)| self.weight(j) * v).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points().enumerate().map(|(j, x)| self.weight(j) * f(x)).sum()
    }
}

/// Eigenfunctions sampled on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledStates {
    pub grid: Grid,
    pub states: Vec<Vec<f64>>,
}

/// Ordered energy levels, optionally with sampled eigenfunctions.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    energies: Vec<f64>,
    eigenfunctions: Option<SampledStates>,
    units: UnitSystem,
}

impl Spectrum {
    /// Energies must be finite and strictly increasing.
    pub fn new(energies: Vec<f64>, units: UnitSystem) -> Result<Self> {
        for (k, e) in energies.iter().enumerate() {
            if !e.is_finite() {
                return Err(Error::InvalidParameter { name: "energy", value: *e });
            }
            if k > 0 && !(energies[k - 1] < *e) {
                return Err(Error::InvalidParameter { name: "energy ordering", value: *e });
            }
        }
        Ok(Spectrum { energies, eigenfunctions: None, units })
    }

    /// Attaches sampled eigenfunctions, one per level, each of unit trapezoidal norm
    /// within 1e-6.
    pub fn with_eigenfunctions(mut self, grid: Grid, states: Vec<Vec<f64>>) -> Result<Self> {
        if states.len() != self.energies.len() {
            return Err(Error::InvalidParameter { name: "eigenfunction count", value: states.len() as f64 });
        }
        for psi in &states {
            if psi.len() != grid.len() {
                return Err(Error::InvalidParameter { name: "eigenfunction length", value: psi.len() as f64 });
            }
            let norm: f64 = grid.integrate(&psi.iter().map(|v| v * v).collect::<Vec<_>>());
            if fabs(norm - 1.0) > 1e-6 {
                return Err(Error::InvalidParameter { name: "eigenfunction norm", value: norm });
            }
        }
        self.eigenfunctions = Some(SampledStates { grid, states });
        Ok(self)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenfunctions(&self) -> Option<&SampledStates> {
        self.eigenfunctions.as_ref()
    }

    pub fn units(&self) -> UnitSystem {
        self.units
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Largest Hermite index handled by [`oscillator_eigenstate`].
pub const MAX_HERMITE_INDEX: usize = 200;

/// Normalized square-well state `sqrt(2/L) sin((n+1) pi x / L)`; zero outside `[0, L]`.
pub fn isw_eigenstate(n: usize, x: f64, width: f64) -> f64 {
    if !(x > 0.0 && x < width) {
        return 0.0;
    }
    sqrt(2.0 / width) * sin((n + 1) as f64 * PI * x / width)
}

/// `hbar^2 pi^2 (n+1)^2 / (2 m L^2)`; `(n+1)^2 (pi/L)^2` in natural units.
pub fn isw_energy(n: usize, width: f64, u: UnitSystem) -> f64 {
    let k = (n + 1) as f64 * PI / width;
    u.kinetic_scale() * k * k
}

/// Normalized Hermite functions `psi_0..=psi_n` at one point, by the
/// normalized three-term recurrence (no factorials, no overflow up to n = 200).
fn hermite_functions(n: usize, x: f64, omega: f64, u: UnitSystem) -> Result<Vec<f64>> {
    if n > MAX_HERMITE_INDEX {
        return Err(Error::IndexOverflow { index: n, max: MAX_HERMITE_INDEX });
    }
    let alpha = u.mass() * omega / u.hbar();
    let xi = sqrt(alpha) * x;
    let mut out = Vec::with_capacity(n + 1);
    out.push(sqrt(sqrt(alpha / PI)) * exp(-0.5 * xi * xi));
    if n >= 1 {
        out.push(core::f64::consts::SQRT_2 * xi * out[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = sqrt(2.0 / (kf + 1.0)) * xi * out[k] - sqrt(kf / (kf + 1.0)) * out[k - 1];
        out.push(next);
    }
    Ok(out)
}

/// Normalized oscillator eigenfunction
/// `(m w / pi hbar)^(1/4) (2^n n!)^(-1/2) H_n(sqrt(m w / hbar) x) exp(-m w x^2 / 2 hbar)`.
pub fn oscillator_eigenstate(n: usize, x: f64, omega: f64, u: UnitSystem) -> Result<f64> {
    Ok(hermite_functions(n, x, omega, u)?[n])
}

pub fn oscillator_energy(n: usize, omega: f64, u: UnitSystem) -> f64 {
    (n as f64 + 0.5) * u.hbar() * omega
}

/// Half-oscillator state `sqrt(2) psi_(2n+1)(x)` on `x > 0`; zero for `x <= 0`.
pub fn half_oscillator_eigenstate(n: usize, x: f64, omega: f64, u: UnitSystem) -> Result<f64> {
    let parent = oscillator_eigenstate(2 * n + 1, x, omega, u)?;
    Ok(if x > 0.0 { core::f64::consts::SQRT_2 * parent } else { 0.0 })
}

/// `(2n + 3/2) hbar omega`.
pub fn half_oscillator_energy(n: usize, omega: f64, u: UnitSystem) -> f64 {
    (2.0 * n as f64 + 1.5) * u.hbar() * omega
}

/// Truncated eigenfunction expansion of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSum {
    pub value: KernelValue,
    pub terms: usize,
    /// Size of the first omitted Boltzmann factor, `exp(-E_N beta / hbar)`
    /// (`1` for real time, where the sum does not converge absolutely).
    pub tail_bound: f64,
}

/// `sum_n exp(-E_n beta / hbar) psi_n(x_f) psi_n(x_i)` (or `exp(-i E_n tau / hbar)`)
/// over the first `n_terms` levels of a system with a discrete spectrum.
///
/// For the half-oscillator only the odd parent states enter, each doubled.
pub fn spectral_kernel(
    sys: SystemSpec,
    x_f: f64,
    x_i: f64,
    t: TimeArgument,
    n_terms: usize,
) -> Result<SpectralSum> {
    let u = sys.units();
    let (energies, products): (Vec<f64>, Vec<f64>) = match sys.system() {
        System::InfiniteWell { width } => (0..n_terms)
            .map(|n| (isw_energy(n, width, u), isw_eigenstate(n, x_f, width) * isw_eigenstate(n, x_i, width)))
            .unzip(),
        System::Oscillator { omega } => {
            if n_terms == 0 {
                (Vec::new(), Vec::new())
            } else {
                let pf = hermite_functions(n_terms - 1, x_f, omega, u)?;
                let pi = hermite_functions(n_terms - 1, x_i, omega, u)?;
                (0..n_terms).map(|n| (oscillator_energy(n, omega, u), pf[n] * pi[n])).unzip()
            }
        }
        System::HalfOscillator { omega } => {
            if !(x_f > 0.0 && x_i > 0.0) {
                return Err(Error::Domain { what: "half-oscillator position", value: x_f.min(x_i) });
            }
            if n_terms == 0 {
                (Vec::new(), Vec::new())
            } else {
                let top = 2 * n_terms - 1;
                let pf = hermite_functions(top, x_f, omega, u)?;
                let pi = hermite_functions(top, x_i, omega, u)?;
                (0..n_terms)
                    .map(|n| (half_oscillator_energy(n, omega, u), 2.0 * pf[2 * n + 1] * pi[2 * n + 1]))
                    .unzip()
            }
        }
        System::FreeLine | System::HalfLine => {
            return Err(Error::Unsupported("spectral sum over a continuous spectrum"))
        }
    };
    let next_energy = match sys.system() {
        System::InfiniteWell { width } => isw_energy(n_terms, width, u),
        System::Oscillator { omega } => oscillator_energy(n_terms, omega, u),
        System::HalfOscillator { omega } => half_oscillator_energy(n_terms, omega, u),
        _ => unreachable!(),
    };
    let mut value = KernelValue::default();
    let tail_bound = match t {
        TimeArgument::Euclidean(beta) => {
            let beta = TimeArgument::euclidean(beta)?.value();
            for (e, p) in energies.iter().zip(&products) {
                value.re += exp(-e * beta / u.hbar()) * p;
            }
            exp(-next_energy * beta / u.hbar())
        }
        TimeArgument::Real(tau) => {
            let tau = TimeArgument::real(tau)?.value();
            for (e, p) in energies.iter().zip(&products) {
                let phase = -e * tau / u.hbar();
                value = value + KernelValue::new(cos(phase), sin(phase)) * *p;
            }
            1.0
        }
    };
    Ok(SpectralSum { value, terms: n_terms, tail_bound })
}

/// Per-level terms of the half-oscillator kernel built from all parent states with
/// the image subtraction, `exp(-E_n beta) psi_n(x_f) [psi_n(x_i) - psi_n(-x_i)]`,
/// paired with the odd-only terms `exp(-E_n beta) psi_n(x_f) psi_n(x_i)` (zero for even n).
///
/// Odd parity of the Hermite recurrence makes the first exactly twice the second.
pub fn image_parity_terms(
    x_f: f64,
    x_i: f64,
    beta: f64,
    omega: f64,
    u: UnitSystem,
    n_terms: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_terms == 0 {
        return Ok(Vec::new());
    }
    let beta = TimeArgument::euclidean(beta)?.value();
    let top = n_terms - 1;
    let pf = hermite_functions(top, x_f, omega, u)?;
    let pi = hermite_functions(top, x_i, omega, u)?;
    let pm = hermite_functions(top, -x_i, omega, u)?;
    Ok((0..n_terms)
        .map(|n| {
            let lead = exp(-oscillator_energy(n, omega, u) * beta / u.hbar()) * pf[n];
            let image = lead * (pi[n] - pm[n]);
            let odd = if n % 2 == 1 { lead * pi[n] } else { 0.0 };
            (image, odd)
        })
        .collect())
}

/// Largest deviation from `2 sin(kx) sin(ky) = Re[e^{ik(x-y)} - e^{ik(x+y)}]`
/// over the supplied wavenumbers.
pub fn sine_identity_check(ks: &[f64], x: f64, y: f64) -> f64 {
    ks.iter()
        .map(|&k| {
            let lhs = 2.0 * sin(k * x) * sin(k * y);
            let rhs = cos(k * (x - y)) - cos(k * (x + y));
            fabs(lhs - rhs)
        })
        .fold(0.0, f64::max)
}
