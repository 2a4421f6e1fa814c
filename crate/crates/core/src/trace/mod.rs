//! Euclidean traces `Z(beta) = int K(x, x; beta) dx` and the spectrum read off
//! from them.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{fabs, log, sqrt};

use crate::kernels::{System, SystemSpec, TimeArgument};
use crate::oracle::{grid_eigensolve, GridHamiltonian};
use crate::specfun::SeriesPolicy;
use crate::spectral::Grid;
use crate::{Error, Result};

mod extract;

pub use extract::{extract_excited_energies, extract_ground_energy, EnergyEstimate, ExcitedEnergies, LevelEstimate};

/// Slack allowed in the log-convexity check.
pub const CONVEXITY_SLACK: f64 = 1e-7;

/// Sampled partition function.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceCurve {
    betas: Vec<f64>,
    values: Vec<f64>,
    provenance: String,
}

impl TraceCurve {
    /// `betas` positive and strictly increasing; `values` positive, strictly
    /// decreasing and log-convex within [`CONVEXITY_SLACK`].
    pub fn new(betas: Vec<f64>, values: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if betas.len() != values.len() {
            return Err(Error::InvalidParameter { name: "values length", value: values.len() as f64 });
        }
        for k in 0..betas.len() {
            if !(betas[k] > 0.0) || !betas[k].is_finite() {
                return Err(Error::InvalidParameter { name: "beta", value: betas[k] });
            }
            if !(values[k] > 0.0) || !values[k].is_finite() {
                return Err(Error::InvalidParameter { name: "trace value", value: values[k] });
            }
            if k > 0 && !(betas[k] > betas[k - 1]) {
                return Err(Error::InvalidParameter { name: "beta ordering", value: betas[k] });
            }
            if k > 0 && !(values[k] < values[k - 1]) {
                return Err(Error::InvalidParameter { name: "trace monotonicity", value: values[k] });
            }
        }
        let slopes: Vec<f64> =
            (1..betas.len()).map(|k| (log(values[k]) - log(values[k - 1])) / (betas[k] - betas[k - 1])).collect();
        for w in slopes.windows(2) {
            if w[1] - w[0] < -CONVEXITY_SLACK {
                return Err(Error::InvalidParameter { name: "trace log-convexity", value: w[1] - w[0] });
            }
        }
        Ok(TraceCurve { betas, values, provenance: provenance.into() })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }
}

/// A trace with its tail diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    /// Largest integrand at a truncated (non-wall) edge relative to the peak.
    pub edge_ratio: f64,
    /// Set when `edge_ratio > 1e-9`.
    pub tail_warning: bool,
}

/// Edge-to-peak ratio above which the quadrature range is flagged.
pub const TAIL_THRESHOLD: f64 = 1e-9;

/// Trapezoidal integral of the diagonal kernel over the quadrature nodes that lie
/// in the allowed region; wall nodes contribute zero.
pub fn kernel_trace(sys: SystemSpec, beta: f64, quadrature: &Grid) -> Result<TraceValue> {
    let t = TimeArgument::euclidean(beta)?;
    if matches!(sys.system(), System::FreeLine | System::HalfLine) {
        return Err(Error::Unsupported("trace over a continuous spectrum diverges"));
    }
    let policy = SeriesPolicy::default();
    let samples = quadrature
        .points()
        .map(|x| if sys.allows(x) { sys.kernel(x, x, t, policy).map(|k| k.re) } else { Ok(0.0) })
        .collect::<Result<Vec<f64>>>()?;
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(fabs(*v)));
    let wall = |x: f64| match sys.system() {
        System::InfiniteWell { width } => x <= 0.0 || x >= width,
        System::HalfOscillator { .. } => x <= 0.0,
        _ => false,
    };
    let mut edge = 0.0f64;
    for j in [0, quadrature.len() - 1] {
        if !wall(quadrature.point(j)) {
            edge = edge.max(fabs(samples[j]));
        }
    }
    let edge_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
    Ok(TraceValue { value: quadrature.integrate(&samples), edge_ratio, tail_warning: edge_ratio > TAIL_THRESHOLD })
}

/// Quadrature used when none is given: the whole well, or `[0, x_max]`
/// (`[-x_max, x_max]` for the full oscillator) with
/// `x_max = 12 max(sqrt(hbar beta / m), sqrt(hbar / m omega))`, 4001 nodes.
pub fn default_quadrature(sys: SystemSpec, beta: f64) -> Result<Grid> {
    let u = sys.units();
    let thermal = sqrt(u.hbar() * beta / u.mass());
    match sys.system() {
        System::InfiniteWell { width } => Grid::new(0.0, width, 4001),
        System::HalfOscillator { omega } => {
            Grid::new(0.0, 12.0 * thermal.max(sqrt(u.hbar() / (u.mass() * omega))), 4001)
        }
        System::Oscillator { omega } => {
            let x = 12.0 * thermal.max(sqrt(u.hbar() / (u.mass() * omega)));
            Grid::new(-x, x, 4001)
        }
        System::FreeLine | System::HalfLine => Err(Error::Unsupported("trace over a continuous spectrum diverges")),
    }
}

/// Traces at each `beta` on the default quadrature.
pub fn trace_curve(sys: SystemSpec, betas: &[f64]) -> Result<TraceCurve> {
    let values = betas
        .iter()
        .map(|&b| kernel_trace(sys, b, &default_quadrature(sys, b)?).map(|t| t.value))
        .collect::<Result<Vec<_>>>()?;
    TraceCurve::new(betas.to_vec(), values, alloc::format!("{:?}", sys.system()))
}

/// Uniform ladder `beta_min, beta_min + step, ...` with `count` points.
pub fn uniform_ladder(beta_min: f64, step: f64, count: usize) -> Result<Vec<f64>> {
    if !(beta_min > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParameter { name: "beta ladder", value: beta_min.min(step) });
    }
    Ok((0..count).map(|k| beta_min + k as f64 * step).collect())
}

/// Uniform ladder for extracting `n_levels` levels: `beta_min = ln 5 / E0` so the
/// ground Boltzmann factor starts at 0.2, step `beta_min / 2`, and
/// `max(8, 2 n_levels + 2)` points. `E0` comes from a coarse grid eigensolve.
pub fn default_ladder(sys: SystemSpec, n_levels: usize) -> Result<Vec<f64>> {
    let u = sys.units();
    let x_max = match sys.system() {
        System::HalfOscillator { omega } | System::Oscillator { omega } => 10.0 * sqrt(u.hbar() / (u.mass() * omega)),
        _ => 0.0,
    };
    let h = GridHamiltonian::for_system(sys, x_max, 400)?;
    let e0 = grid_eigensolve(&h, 1)?.energies()[0];
    if !(e0 > 0.0) {
        return Err(Error::InvalidParameter { name: "ground energy", value: e0 });
    }
    let beta_min = log(5.0) / e0;
    uniform_ladder(beta_min, 0.5 * beta_min, (2 * n_levels + 2).max(8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::UnitSystem;
    use core::f64::consts::PI;
    use libm::exp;

    fn boltzmann(beta: f64, level: impl Fn(usize) -> f64) -> f64 {
        (0..400).map(|n| exp(-level(n) * beta)).sum()
    }

    #[test]
    fn trace_examples() {
        let u = UnitSystem::atomic();
        let half = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, u).unwrap();
        let t = kernel_trace(half, 1.0, &default_quadrature(half, 1.0).unwrap()).unwrap();
        assert!((t.value - 0.258_053_966_8).abs() < 1e-9, "{}", t.value);
        assert!(!t.tail_warning);

        let well = SystemSpec::new(System::InfiniteWell { width: PI }, UnitSystem::natural_susy()).unwrap();
        let t = kernel_trace(well, 0.5, &default_quadrature(well, 0.5).unwrap()).unwrap();
        assert!((t.value - 0.753_314_144_0).abs() < 1e-9);

        let osc = SystemSpec::new(System::Oscillator { omega: 1.0 }, u).unwrap();
        let t = kernel_trace(osc, 1.0, &default_quadrature(osc, 1.0).unwrap()).unwrap();
        assert!((t.value - 0.5 / libm::sinh(0.5)).abs() < 1e-9);

        let short = Grid::new(0.0, 2.0, 401).unwrap();
        assert!(kernel_trace(half, 1.0, &short).unwrap().tail_warning);
        let line = SystemSpec::new(System::HalfLine, u).unwrap();
        assert!(kernel_trace(line, 1.0, &short).is_err());
    }

    #[test]
    fn traces_match_boltzmann_sums() {
        let u = UnitSystem::atomic();
        let nat = UnitSystem::natural_susy();
        let cases: [(SystemSpec, &dyn Fn(usize) -> f64); 3] = [
            (SystemSpec::new(System::HalfOscillator { omega: 1.3 }, u).unwrap(), &|n| (2.0 * n as f64 + 1.5) * 1.3),
            (SystemSpec::new(System::Oscillator { omega: 0.7 }, u).unwrap(), &|n| (n as f64 + 0.5) * 0.7),
            (SystemSpec::new(System::InfiniteWell { width: 2.0 }, nat).unwrap(), &|n| {
                let k = (n + 1) as f64 * PI / 2.0;
                k * k
            }),
        ];
        for (sys, level) in cases {
            for beta in [0.3, 0.8, 2.0, 5.0] {
                let t = kernel_trace(sys, beta, &default_quadrature(sys, beta).unwrap()).unwrap().value;
                let z = boltzmann(beta, level);
                assert!((t - z).abs() <= 1e-6 * z, "{:?} beta={beta}: {t} vs {z}", sys.system());
            }
        }
    }

    #[test]
    fn curve_invariants() {
        assert!(TraceCurve::new(alloc::vec![1.0, 2.0], alloc::vec![1.0, 1.0], "x").is_err());
        assert!(TraceCurve::new(alloc::vec![2.0, 1.0], alloc::vec![2.0, 1.0], "x").is_err());
        assert!(TraceCurve::new(alloc::vec![1.0, 2.0], alloc::vec![1.0, -1.0], "x").is_err());
        // log-concave: exp(-b^2)
        let b = [1.0, 2.0, 3.0];
        assert!(TraceCurve::new(b.to_vec(), b.iter().map(|x| exp(-x * x)).collect(), "x").is_err());
        let well = SystemSpec::new(System::InfiniteWell { width: PI }, UnitSystem::natural_susy()).unwrap();
        let c = trace_curve(well, &[0.3, 0.5, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.provenance().contains("InfiniteWell"));
    }

    #[test]
    fn ladders() {
        let half = SystemSpec::new(System::HalfOscillator { omega: 1.0 }, UnitSystem::atomic()).unwrap();
        let l = default_ladder(half, 2).unwrap();
        assert_eq!(l.len(), 8);
        assert!((exp(-1.5 * l[0]) - 0.2).abs() < 1e-3);
        assert!(uniform_ladder(0.0, 1.0, 3).is_err());
    }
}
