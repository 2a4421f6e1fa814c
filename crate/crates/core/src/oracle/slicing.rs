use alloc::vec::Vec;

use libm::{ceil, exp, sqrt};

use crate::kernels::{
    half_line_kernel, half_oscillator_kernel, isw_kernel, KernelValue, System, SystemSpec, TimeArgument,
};
use crate::specfun::SeriesPolicy;
use crate::{Error, Result};

/// Short-time kernel used for one slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKernel {
    /// Free kernel minus its image through `x = 0`; any potential enters by
    /// symmetric splitting `exp(-V eps/2hbar) K exp(-V eps/2hbar)`.
    FreeImage,
    /// Square-well image lattice.
    WellImageSum,
    /// Mehler kernel minus its image (exact per slice, no splitting).
    MehlerImage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    n_slices: usize,
    kernel: SliceKernel,
    quadrature_points: Option<usize>,
    x_max: Option<f64>,
}

/// Upper bound on quadrature nodes per intermediate integral.
pub const MAX_QUADRATURE_POINTS: usize = 20_000;

impl SliceConfig {
    pub fn new(n_slices: usize, kernel: SliceKernel) -> Result<Self> {
        if n_slices == 0 {
            return Err(Error::InvalidParameter { name: "n_slices", value: 0.0 });
        }
        Ok(SliceConfig { n_slices, kernel, quadrature_points: None, x_max: None })
    }

    /// Fixes the number of trapezoid nodes (walls included).
    pub fn with_quadrature_points(mut self, n: usize) -> Result<Self> {
        if !(3..=MAX_QUADRATURE_POINTS).contains(&n) {
            return Err(Error::InvalidParameter { name: "quadrature_points", value: n as f64 });
        }
        self.quadrature_points = Some(n);
        Ok(self)
    }

    /// Truncation point of a half-line region.
    pub fn with_x_max(mut self, x_max: f64) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::InvalidParameter { name: "x_max", value: x_max });
        }
        self.x_max = Some(x_max);
        Ok(self)
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    pub fn kernel(&self) -> SliceKernel {
        self.kernel
    }
}

/// `n`-slice Euclidean composition
/// `int k(x_f, y_(n-1)) ... k(y_1, x_i) dy_1 ... dy_(n-1)` over the allowed region,
/// with `eps = beta / n` and trapezoidal quadrature for every intermediate point.
///
/// Half-line regions are cut at `x_max`, by default
/// `max(x_f, x_i) + 12 max(sqrt(hbar beta/m), sqrt(hbar/(m omega)))`.
/// The default node spacing is `0.4 sqrt(hbar eps / m)`, which leaves the
/// trapezoid error of the Gaussian integrands far below 1e-12.
pub fn sliced_kernel(sys: SystemSpec, cfg: SliceConfig, x_f: f64, x_i: f64, beta: f64) -> Result<KernelValue> {
    let beta = TimeArgument::euclidean(beta)?.value();
    let u = sys.units();
    for (x, what) in [(x_f, "x_f"), (x_i, "x_i")] {
        if !sys.allows(x) {
            return Err(Error::Domain { what, value: x });
        }
    }
    let eps = beta / cfg.n_slices as f64;
    let step = TimeArgument::euclidean(eps)?;
    let policy = SeriesPolicy::default();
    let split = matches!(cfg.kernel, SliceKernel::FreeImage);
    let slice = |a: f64, b: f64| -> Result<f64> {
        let base = match (sys.system(), cfg.kernel) {
            (System::HalfLine | System::HalfOscillator { .. }, SliceKernel::FreeImage) => {
                half_line_kernel(a, b, step, u)?.re
            }
            (System::HalfOscillator { omega }, SliceKernel::MehlerImage) => {
                half_oscillator_kernel(a, b, step, omega, u)?.re
            }
            (System::InfiniteWell { width }, SliceKernel::WellImageSum) => {
                isw_kernel(a, b, width, step, u, policy)?.re
            }
            _ => return Err(Error::Unsupported("slice kernel does not match the system")),
        };
        Ok(if split {
            base * exp(-0.5 * eps * (sys.potential(a) + sys.potential(b)) / u.hbar())
        } else {
            base
        })
    };
    if cfg.n_slices == 1 {
        return Ok(KernelValue::real(slice(x_f, x_i)?));
    }

    let thermal = sqrt(u.hbar() * beta / u.mass());
    let (lo, hi) = match sys.system() {
        System::InfiniteWell { width } => (0.0, width),
        System::HalfOscillator { omega } => {
            let osc = sqrt(u.hbar() / (u.mass() * omega));
            (0.0, cfg.x_max.unwrap_or(x_f.max(x_i) + 12.0 * thermal.max(osc)))
        }
        _ => (0.0, cfg.x_max.unwrap_or(x_f.max(x_i) + 12.0 * thermal)),
    };
    if x_f >= hi || x_i >= hi {
        return Err(Error::Domain { what: "position beyond x_max", value: x_f.max(x_i) });
    }
    let points = match cfg.quadrature_points {
        Some(n) => n,
        None => {
            let h = 0.4 * sqrt(u.hbar() * eps / u.mass());
            (ceil((hi - lo) / h) as usize + 1).clamp(64, MAX_QUADRATURE_POINTS)
        }
    };
    let h = (hi - lo) / (points - 1) as f64;
    // Wall nodes carry zero kernel and are skipped.
    let nodes: Vec<f64> = (1..points - 1).map(|j| lo + j as f64 * h).collect();

    let mut v = nodes.iter().map(|&y| slice(y, x_i)).collect::<Result<Vec<_>>>()?;
    let mut row = alloc::vec![0.0; nodes.len()];
    for _ in 0..cfg.n_slices - 2 {
        let mut next = alloc::vec![0.0; nodes.len()];
        for (a, &ya) in nodes.iter().enumerate() {
            for (b, &yb) in nodes.iter().enumerate() {
                row[b] = slice(ya, yb)?;
            }
            next[a] = h * row.iter().zip(&v).map(|(k, w)| k * w).sum::<f64>();
        }
        v = next;
    }
    let mut total = 0.0;
    for (b, &yb) in nodes.iter().enumerate() {
        total += h * slice(x_f, yb)? * v[b];
    }
    Ok(KernelValue::real(total))
}
