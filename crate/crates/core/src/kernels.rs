//! Closed-form propagators: free line, half-line (one image), infinite square
//! well (image lattice), harmonic oscillator (Mehler) and half-oscillator.
//!
//! Euclidean kernels are `<x_f| exp(-H beta / hbar) |x_i>`; real-time kernels are
//! `<x_f| exp(-i H tau / hbar) |x_i>` and are meant for pointwise evaluation only.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use libm::{cos, exp, expm1, fabs, hypot, sin, sqrt};

use crate::{Error, Result, SeriesPolicy};

/// Values of hbar and the particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    hbar: f64,
    mass: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter { name: "hbar", value: hbar });
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter { name: "mass", value: mass });
        }
        Ok(UnitSystem { hbar, mass })
    }

    /// hbar = 2m = 1, the convention of the SUSY and Green's function modules.
    pub const fn natural_susy() -> Self {
        UnitSystem { hbar: 1.0, mass: 0.5 }
    }

    /// hbar = m = 1.
    pub const fn atomic() -> Self {
        UnitSystem { hbar: 1.0, mass: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// hbar^2 / 2m: the energy unit in which `-d^2/dx^2` spectra are quoted.
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// Converts an energy of a purely kinetic-scaled spectrum (square well,
    /// Rosen-Morse) from `natural_susy` units into these units.
    pub fn from_natural_energy(&self, energy: f64) -> f64 {
        energy * self.kinetic_scale()
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem::atomic()
    }
}

/// Elapsed time: real `tau = t_f - t_i`, or Euclidean `beta` with `tau = -i beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeArgument {
    Real(f64),
    Euclidean(f64),
}

impl TimeArgument {
    pub fn real(tau: f64) -> Result<Self> {
        if tau == 0.0 {
            return Err(Error::ZeroTime);
        }
        if !tau.is_finite() {
            return Err(Error::InvalidParameter { name: "tau", value: tau });
        }
        Ok(TimeArgument::Real(tau))
    }

    pub fn euclidean(beta: f64) -> Result<Self> {
        if beta == 0.0 {
            return Err(Error::ZeroTime);
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter { name: "beta", value: beta });
        }
        Ok(TimeArgument::Euclidean(beta))
    }

    pub fn value(&self) -> f64 {
        match *self {
            TimeArgument::Real(t) | TimeArgument::Euclidean(t) => t,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, TimeArgument::Euclidean(_))
    }

    fn validated(self) -> Result<Self> {
        match self {
            TimeArgument::Real(t) => TimeArgument::real(t),
            TimeArgument::Euclidean(b) => TimeArgument::euclidean(b),
        }
    }
}

/// Physical system selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    FreeLine,
    HalfLine,
    InfiniteWell { width: f64 },
    Oscillator { omega: f64 },
    HalfOscillator { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    system: System,
    units: UnitSystem,
}

impl SystemSpec {
    pub fn new(system: System, units: UnitSystem) -> Result<Self> {
        match system {
            System::InfiniteWell { width } if !(width > 0.0) || !width.is_finite() => {
                return Err(Error::InvalidParameter { name: "width", value: width })
            }
            System::Oscillator { omega } | System::HalfOscillator { omega }
                if !(omega > 0.0) || !omega.is_finite() =>
            {
                return Err(Error::InvalidParameter { name: "omega", value: omega })
            }
            _ => {}
        }
        Ok(SystemSpec { system, units })
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn units(&self) -> UnitSystem {
        self.units
    }

    /// Whether `x` lies in the open allowed region.
    pub fn allows(&self, x: f64) -> bool {
        match self.system {
            System::FreeLine | System::Oscillator { .. } => x.is_finite(),
            System::HalfLine | System::HalfOscillator { .. } => x > 0.0 && x.is_finite(),
            System::InfiniteWell { width } => x > 0.0 && x < width,
        }
    }

    /// Potential inside the allowed region (the walls are implicit).
    pub fn potential(&self, x: f64) -> f64 {
        match self.system {
            System::Oscillator { omega } | System::HalfOscillator { omega } => {
                0.5 * self.units.mass * omega * omega * x * x
            }
            _ => 0.0,
        }
    }

    /// Closed-form kernel of the selected system.
    pub fn kernel(&self, x_f: f64, x_i: f64, t: TimeArgument, policy: SeriesPolicy) -> Result<KernelValue> {
        let u = self.units;
        match self.system {
            System::FreeLine => free_kernel(x_f, x_i, t, u),
            System::HalfLine => half_line_kernel(x_f, x_i, t, u),
            System::InfiniteWell { width } => isw_kernel(x_f, x_i, width, t, u, policy),
            System::Oscillator { omega } => oscillator_kernel(x_f, x_i, t, omega, u),
            System::HalfOscillator { omega } => half_oscillator_kernel(x_f, x_i, t, omega, u),
        }
    }
}

/// Complex propagator amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelValue {
    pub re: f64,
    pub im: f64,
}

impl KernelValue {
    pub const fn new(re: f64, im: f64) -> Self {
        KernelValue { re, im }
    }

    pub const fn real(re: f64) -> Self {
        KernelValue { re, im: 0.0 }
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Self {
        KernelValue { re: modulus * cos(phase), im: modulus * sin(phase) }
    }

    pub fn abs(&self) -> f64 {
        hypot(self.re, self.im)
    }
}

impl Add for KernelValue {
    type Output = KernelValue;
    fn add(self, rhs: KernelValue) -> KernelValue {
        KernelValue::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for KernelValue {
    type Output = KernelValue;
    fn sub(self, rhs: KernelValue) -> KernelValue {
        KernelValue::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for KernelValue {
    type Output = KernelValue;
    fn neg(self) -> KernelValue {
        KernelValue::new(-self.re, -self.im)
    }
}

impl Mul<f64> for KernelValue {
    type Output = KernelValue;
    fn mul(self, rhs: f64) -> KernelValue {
        KernelValue::new(self.re * rhs, self.im * rhs)
    }
}

/// Free-particle kernel on the whole line.
pub fn free_kernel(x_f: f64, x_i: f64, t: TimeArgument, u: UnitSystem) -> Result<KernelValue> {
    let d = x_f - x_i;
    match t.validated()? {
        TimeArgument::Euclidean(beta) => {
            let hb = u.hbar * beta;
            Ok(KernelValue::real(sqrt(u.mass / (2.0 * PI * hb)) * exp(-u.mass * d * d / (2.0 * hb))))
        }
        TimeArgument::Real(tau) => {
            let amp = sqrt(u.mass / (2.0 * PI * u.hbar * fabs(tau)));
            let phase = -0.25 * PI * tau.signum() + u.mass * d * d / (2.0 * u.hbar * tau);
            Ok(KernelValue::from_polar(amp, phase))
        }
    }
}

fn require_positive(x: f64, what: &'static str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// Half-line kernel: the free kernel minus its mirror image through the wall at 0.
pub fn half_line_kernel(x_f: f64, x_i: f64, t: TimeArgument, u: UnitSystem) -> Result<KernelValue> {
    require_positive(x_f, "x_f")?;
    require_positive(x_i, "x_i")?;
    match t.validated()? {
        TimeArgument::Euclidean(beta) => {
            // K(x_f - x_i) - K(x_f + x_i) with the difference taken inside expm1.
            let hb = u.hbar * beta;
            let d = x_f - x_i;
            let direct = sqrt(u.mass / (2.0 * PI * hb)) * exp(-u.mass * d * d / (2.0 * hb));
            Ok(KernelValue::real(-direct * expm1(-2.0 * u.mass * x_f * x_i / hb)))
        }
        real => Ok(free_kernel(x_f, x_i, real, u)? - free_kernel(x_f, -x_i, real, u)?),
    }
}

/// Image lattice of the square well, with the number of shells that were summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSum {
    pub value: KernelValue,
    /// Highest |n| included in the sum over images at `x_i + 2nL` and `-x_i + 2nL`.
    pub shells: usize,
}

/// Infinite-square-well kernel on (0, `width`) as an infinite sum of image pairs,
/// together with truncation diagnostics. Euclidean time only.
pub fn isw_image_sum(
    x_f: f64,
    x_i: f64,
    width: f64,
    t: TimeArgument,
    u: UnitSystem,
    policy: SeriesPolicy,
) -> Result<ImageSum> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidParameter { name: "width", value: width });
    }
    for (x, what) in [(x_f, "x_f"), (x_i, "x_i")] {
        if !(x > 0.0 && x < width) {
            return Err(Error::Domain { what, value: x });
        }
    }
    let beta = match t.validated()? {
        TimeArgument::Euclidean(beta) => beta,
        TimeArgument::Real(_) => return Err(Error::Unsupported("real-time image sum for the square well")),
    };
    let hb = u.hbar * beta;
    let pref = sqrt(u.mass / (2.0 * PI * hb));
    let gauss = |d: f64| exp(-u.mass * d * d / (2.0 * hb));
    let pair = |shift: f64| gauss(x_f - x_i - shift) - gauss(x_f + x_i - shift);

    let mut sum = pair(0.0);
    let floor = f64::EPSILON * 1e-3;
    for n in 1..=policy.max_terms() {
        let shift = 2.0 * n as f64 * width;
        sum += pair(shift) + pair(-shift);
        // Every term of shell n + 1 sits at least 2nL away from x_f.
        let next_bound = 4.0 * gauss(shift);
        if next_bound <= policy.rel_tol() * fabs(sum).max(floor) {
            return Ok(ImageSum { value: KernelValue::real(pref * sum), shells: n });
        }
    }
    Err(Error::Truncation { terms: policy.max_terms() })
}

/// Infinite-square-well kernel on (0, `width`). Euclidean time only.
pub fn isw_kernel(
    x_f: f64,
    x_i: f64,
    width: f64,
    t: TimeArgument,
    u: UnitSystem,
    policy: SeriesPolicy,
) -> Result<KernelValue> {
    isw_image_sum(x_f, x_i, width, t, u, policy).map(|s| s.value)
}

/// Pieces of the Mehler kernel `pref * exp(-c [(x_f^2 + x_i^2) coth_a - 2 x_f x_i csch_a])`
/// with `a = omega beta` and `c = m omega / 2 hbar`, written without overflow.
struct Mehler {
    pref: f64,
    c: f64,
    coth: f64,
    csch: f64,
}

impl Mehler {
    fn euclidean(beta: f64, omega: f64, u: UnitSystem) -> Self {
        let a = omega * beta;
        let em2 = exp(-2.0 * a);
        let denom = -expm1(-2.0 * a);
        let csch = 2.0 * exp(-a) / denom;
        let coth = (1.0 + em2) / denom;
        Mehler {
            pref: sqrt(u.mass * omega / (2.0 * PI * u.hbar) * csch),
            c: u.mass * omega / (2.0 * u.hbar),
            coth,
            csch,
        }
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "omega", value: omega })
    }
}

fn real_phase_window(omega: f64, tau: f64) -> Result<f64> {
    let phase = omega * tau;
    let s = sin(phase);
    if !(phase > 0.0 && phase < PI) || s == 0.0 {
        return Err(Error::Caustic { phase });
    }
    Ok(phase)
}

/// Harmonic-oscillator kernel (Mehler form) on the whole line.
///
/// Real time is restricted to `0 < omega tau < pi`, before the first caustic.
pub fn oscillator_kernel(x_f: f64, x_i: f64, t: TimeArgument, omega: f64, u: UnitSystem) -> Result<KernelValue> {
    check_omega(omega)?;
    match t.validated()? {
        TimeArgument::Euclidean(beta) => {
            let m = Mehler::euclidean(beta, omega, u);
            let q = (x_f * x_f + x_i * x_i) * m.coth - 2.0 * x_f * x_i * m.csch;
            Ok(KernelValue::real(m.pref * exp(-m.c * q)))
        }
        TimeArgument::Real(tau) => {
            let phase = real_phase_window(omega, tau)?;
            let (s, c) = (sin(phase), cos(phase));
            let amp = sqrt(u.mass * omega / (2.0 * PI * u.hbar * s));
            let action = u.mass * omega / (2.0 * u.hbar * s) * ((x_f * x_f + x_i * x_i) * c - 2.0 * x_i * x_f);
            Ok(KernelValue::from_polar(amp, action - 0.25 * PI))
        }
    }
}

/// Half-oscillator kernel: Mehler kernel minus its image through the wall at 0.
pub fn half_oscillator_kernel(
    x_f: f64,
    x_i: f64,
    t: TimeArgument,
    omega: f64,
    u: UnitSystem,
) -> Result<KernelValue> {
    check_omega(omega)?;
    require_positive(x_f, "x_f")?;
    require_positive(x_i, "x_i")?;
    match t.validated()? {
        TimeArgument::Euclidean(beta) => {
            let m = Mehler::euclidean(beta, omega, u);
            let cross = 2.0 * m.c * x_f * x_i * m.csch;
            let q = (x_f * x_f + x_i * x_i) * m.coth;
            Ok(KernelValue::real(-m.pref * exp(-m.c * q + cross) * expm1(-2.0 * cross)))
        }
        real => Ok(oscillator_kernel(x_f, x_i, real, omega, u)? - oscillator_kernel(x_f, -x_i, real, omega, u)?),
    }
}
