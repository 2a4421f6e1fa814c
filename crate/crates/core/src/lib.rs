//! Propagators, Green's functions and spectra for quantum systems with hard walls.
//!
//! Kernels for the half-line, the infinite square well and the half-harmonic
//! oscillator are built by the method of images and checked against independent
//! routes: eigenfunction sums, a finite-difference Dirichlet Hamiltonian, and a
//! time-sliced transfer-matrix composition. The Rosen-Morse (Pöschl-Teller)
//! Green's function is evaluated for general parameter and reduces to the
//! square-well resolvent at `b = 1`. Euclidean traces of the diagonal kernels
//! give the partition function, from which the discrete spectrum is extracted.
//!
//! The crate is `no_std` and needs only `alloc`. Everything is a pure function of
//! its arguments.
//!
//! ```
//! use mirrorpath::kernels::{half_line_kernel, TimeArgument, UnitSystem};
//!
//! let units = UnitSystem::new(1.0, 1.0).unwrap();
//! let beta = TimeArgument::euclidean(1.0).unwrap();
//! let k = half_line_kernel(1.0, 1.0, beta, units).unwrap();
//! assert!((k.re - 0.344_951_313_888).abs() < 1e-9);
//! ```
#![no_std]
// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod kernels;
pub mod oracle;
pub mod specfun;
pub mod spectral;
pub mod susy;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};

pub use kernels::{KernelValue, System, SystemSpec, TimeArgument, UnitSystem};
pub use spectral::{Grid, Spectrum};
pub use specfun::SeriesPolicy;

