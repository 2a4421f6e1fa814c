//! Independent numerical routes for cross-checking the closed forms: a
//! finite-difference Hamiltonian with Dirichlet walls and a time-sliced
//! transfer-matrix composition of short-time image kernels.

use alloc::vec::Vec;

use libm::{exp, fabs, sqrt};

use crate::kernels::{System, SystemSpec, UnitSystem};
use crate::spectral::{Grid, Spectrum};
use crate::{Error, Result};

mod slicing;
mod tridiag;

pub use slicing::{sliced_kernel, SliceConfig, SliceKernel};

use tridiag::SymTridiag;

/// Second-order finite-difference Hamiltonian on the interior nodes of a grid.
/// The end nodes are walls and carry no unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct GridHamiltonian {
    grid: Grid,
    potential: Vec<f64>,
    units: UnitSystem,
}

impl GridHamiltonian {
    /// Samples `potential` at the interior nodes.
    pub fn new(grid: Grid, potential: impl Fn(f64) -> f64, units: UnitSystem) -> Result<Self> {
        let samples = (1..grid.len() - 1).map(|j| potential(grid.point(j))).collect();
        Self::from_samples(grid, samples, units)
    }

    pub fn from_samples(grid: Grid, potential: Vec<f64>, units: UnitSystem) -> Result<Self> {
        if grid.len() < 3 {
            return Err(Error::InvalidParameter { name: "n_points", value: grid.len() as f64 });
        }
        if potential.len() != grid.len() - 2 {
            return Err(Error::InvalidParameter { name: "potential samples", value: potential.len() as f64 });
        }
        if let Some(v) = potential.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter { name: "potential", value: *v });
        }
        Ok(GridHamiltonian { grid, potential, units })
    }

    /// Hamiltonian of a closed-form system. The square well uses its own walls;
    /// the half-line systems use `[0, x_max]` and the full oscillator `[-x_max, x_max]`.
    pub fn for_system(sys: SystemSpec, x_max: f64, n_points: usize) -> Result<Self> {
        let grid = match sys.system() {
            System::InfiniteWell { width } => Grid::new(0.0, width, n_points)?,
            System::HalfLine | System::HalfOscillator { .. } => Grid::new(0.0, x_max, n_points)?,
            System::Oscillator { .. } => Grid::new(-x_max, x_max, n_points)?,
            System::FreeLine => return Err(Error::Unsupported("free line has no bound states")),
        };
        Self::new(grid, |x| sys.potential(x), sys.units())
    }

    /// Rosen-Morse `v_minus(b)` on `(0, pi)` in natural units.
    pub fn rosen_morse(b: f64, n_points: usize) -> Result<Self> {
        let w = crate::susy::Superpotential::rosen_morse(b)?;
        let grid = Grid::new(0.0, core::f64::consts::PI, n_points)?;
        let samples = (1..n_points - 1)
            .map(|j| crate::susy::partner_potentials(w, grid.point(j)).map(|p| p.v_minus))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(grid, samples, crate::kernels::UnitSystem::natural_susy())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn units(&self) -> UnitSystem {
        self.units
    }

    pub fn interior_len(&self) -> usize {
        self.potential.len()
    }

    /// `hbar²/(m h²) + V(x_j)`.
    pub fn diagonal(&self) -> Vec<f64> {
        let k = self.kinetic();
        self.potential.iter().map(|v| 2.0 * k + v).collect()
    }

    /// `-hbar²/(2 m h²)`.
    pub fn off_diagonal(&self) -> f64 {
        -self.kinetic()
    }

    fn kinetic(&self) -> f64 {
        let h = self.grid.spacing();
        self.units.kinetic_scale() / (h * h)
    }

    fn matrix(&self) -> SymTridiag {
        SymTridiag { d: self.diagonal(), e: alloc::vec![self.off_diagonal(); self.interior_len() - 1] }
    }
}

/// Lowest `n_levels` eigenpairs. Eigenfunctions are returned on the full grid
/// (zero at the walls), normalized to `h * sum psi² = 1`, with the first
/// appreciable sample positive.
pub fn grid_eigensolve(h: &GridHamiltonian, n_levels: usize) -> Result<Spectrum> {
    if n_levels > h.interior_len() {
        return Err(Error::InvalidParameter { name: "n_levels", value: n_levels as f64 });
    }
    let t = h.matrix();
    let step = h.grid.spacing();
    let mut energies = Vec::with_capacity(n_levels);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_levels);
    for k in 0..n_levels {
        let lambda = t.eigenvalue(k);
        let v = t.eigenvector(lambda, &vectors)?;
        energies.push(lambda);
        vectors.push(v);
    }
    let states = vectors
        .iter()
        .map(|v| {
            let peak = v.iter().fold(0.0f64, |m, x| m.max(fabs(*x)));
            let first = v.iter().find(|x| fabs(**x) > 1e-3 * peak).copied().unwrap_or(1.0);
            let sign = if first < 0.0 { -1.0 } else { 1.0 };
            let scale = sign / sqrt(step);
            let mut full = Vec::with_capacity(v.len() + 2);
            full.push(0.0);
            full.extend(v.iter().map(|x| x * scale));
            full.push(0.0);
            full
        })
        .collect();
    Spectrum::new(energies, h.units)?.with_eigenfunctions(h.grid, states)
}

/// Euclidean propagator `sum_n exp(-E_n beta / hbar) psi_n(x_f) psi_n(x_i)` assembled
/// from grid eigenpairs. Entries are formed on demand.
#[derive(Debug, Clone)]
pub struct GridPropagator {
    grid: Grid,
    weights: Vec<f64>,
    states: Vec<Vec<f64>>,
}

pub fn grid_propagator(h: &GridHamiltonian, beta: f64, n_levels: usize) -> Result<GridPropagator> {
    let beta = crate::kernels::TimeArgument::euclidean(beta)?.value();
    let spectrum = grid_eigensolve(h, n_levels)?;
    let hbar = h.units.hbar();
    let weights = spectrum.energies().iter().map(|e| exp(-e * beta / hbar)).collect();
    let states = spectrum.eigenfunctions().map(|s| s.states.clone()).unwrap_or_default();
    Ok(GridPropagator { grid: h.grid, weights, states })
}

impl GridPropagator {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Value at grid nodes `(j, k)`.
    pub fn node(&self, j: usize, k: usize) -> f64 {
        self.weights.iter().zip(&self.states).map(|(w, s)| w * s[j] * s[k]).sum()
    }

    /// Bilinear interpolation between nodes; zero outside the grid.
    pub fn at(&self, x_f: f64, x_i: f64) -> f64 {
        let locate = |x: f64| -> Option<(usize, f64)> {
            if x < self.grid.x_min() || x > self.grid.x_max() {
                return None;
            }
            let t = (x - self.grid.x_min()) / self.grid.spacing();
            let j = (libm::floor(t) as usize).min(self.grid.len() - 2);
            Some((j, t - j as f64))
        };
        let (Some((j, a)), Some((k, b))) = (locate(x_f), locate(x_i)) else {
            return 0.0;
        };
        (1.0 - a) * (1.0 - b) * self.node(j, k)
            + a * (1.0 - b) * self.node(j + 1, k)
            + (1.0 - a) * b * self.node(j, k + 1)
            + a * b * self.node(j + 1, k + 1)
    }

    /// Full matrix over grid nodes.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.grid.len();
        (0..n).map(|j| (0..n).map(|k| self.node(j, k)).collect()).collect()
    }

    /// Trapezoidal integral of the diagonal.
    pub fn trace(&self) -> f64 {
        self.grid.integrate(&(0..self.grid.len()).map(|j| self.node(j, j)).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{half_line_kernel, half_oscillator_kernel, TimeArgument};
    use core::f64::consts::PI;

    fn natural() -> UnitSystem {
        UnitSystem::natural_susy()
    }

    #[test]
    fn stencil_layout() {
        let h = GridHamiltonian::new(Grid::new(0.0, 1.0, 11).unwrap(), |_| 0.5, natural()).unwrap();
        assert_eq!(h.interior_len(), 9);
        assert!((h.diagonal()[0] - (200.0 + 0.5)).abs() < 1e-9);
        assert!((h.off_diagonal() + 100.0).abs() < 1e-9);
        assert!(GridHamiltonian::new(Grid::new(0.0, 1.0, 2).unwrap(), |_| 0.0, natural()).is_err());
        assert!(GridHamiltonian::new(Grid::new(0.0, 1.0, 5).unwrap(), |_| f64::NAN, natural()).is_err());
    }

    #[test]
    fn isw_ground_state() {
        let sys = SystemSpec::new(System::InfiniteWell { width: PI }, natural()).unwrap();
        let h = GridHamiltonian::for_system(sys, 0.0, 2000).unwrap();
        let s = grid_eigensolve(&h, 3).unwrap();
        assert!((s.energies()[0] - 1.0).abs() < 1e-5);
        assert!((s.energies()[2] - 9.0).abs() < 1e-4);
        assert!(grid_eigensolve(&h, 1999).is_err());
    }

    #[test]
    fn isw_second_order_convergence() {
        let sys = SystemSpec::new(System::InfiniteWell { width: PI }, natural()).unwrap();
        let err = |n: usize| {
            let h = GridHamiltonian::for_system(sys, 0.0, n).unwrap();
            (grid_eigensolve(&h, 1).unwrap().energies()[0] - 1.0).abs()
        };
        let (coarse, fine) = (err(201), err(401));
        assert!(coarse / fine >= 3.5, "{}", coarse / fine);
    }

    #[test]
    fn half_oscillator_levels() {
        let sys = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, UnitSystem::atomic()).unwrap();
        let h = GridHamiltonian::for_system(sys, 12.0, 3000).unwrap();
        let s = grid_eigensolve(&h, 3).unwrap();
        assert!((s.energies()[0] - 1.5).abs() < 1e-4);
        let g = s.eigenfunctions().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let prod: Vec<f64> = g.states[i].iter().zip(&g.states[j]).map(|(a, b)| a * b).collect();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.grid.integrate(&prod) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rosen_morse_levels() {
        let h = GridHamiltonian::rosen_morse(2.0, 2000).unwrap();
        let s = grid_eigensolve(&h, 3).unwrap();
        for (e, want) in s.energies().iter().zip([0.0, 5.0, 12.0]) {
            assert!((e - want).abs() < 1e-3, "{e} vs {want}");
        }
    }

    #[test]
    fn propagators_match_closed_forms() {
        let u = UnitSystem::atomic();
        let beta = TimeArgument::euclidean(1.0).unwrap();
        let line = SystemSpec::new(System::HalfLine, u).unwrap();
        let p = grid_propagator(&GridHamiltonian::for_system(line, 14.0, 3000).unwrap(), 1.0, 150).unwrap();
        for &(a, b) in &[(0.5, 0.5), (1.0, 2.0), (3.3, 2.7), (0.1, 4.0)] {
            let want = half_line_kernel(a, b, beta, u).unwrap().re;
            assert!((p.at(a, b) - want).abs() < 2e-4, "({a},{b}) {} vs {want}", p.at(a, b));
        }
        let half = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, u).unwrap();
        let p = grid_propagator(&GridHamiltonian::for_system(half, 12.0, 3000).unwrap(), 1.0, 40).unwrap();
        for &(a, b) in &[(0.5, 0.5), (1.0, 2.0), (3.3, 2.7)] {
            let want = half_oscillator_kernel(a, b, beta, 1.0, u).unwrap().re;
            assert!((p.at(a, b) - want).abs() < 2e-4);
        }
    }

    #[test]
    fn isw_grid_trace() {
        let sys = SystemSpec::new(System::InfiniteWell { width: PI }, natural()).unwrap();
        let p = grid_propagator(&GridHamiltonian::for_system(sys, 0.0, 2000).unwrap(), 0.5, 30).unwrap();
        assert!((p.trace() - 0.753_314_144).abs() < 1e-4);
        assert_eq!(p.matrix().len(), 2000);
    }
}
