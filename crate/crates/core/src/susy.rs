//! Superpotentials, partner potentials `V∓ = W² ∓ W'`, zero-energy ground
//! states and the Rosen-Morse ladder, in natural units (`hbar = 2m = 1`).

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, exp, fabs, log, sin, sqrt};

use crate::kernels::UnitSystem;
use crate::specfun::{ln_gamma, SeriesPolicy};
use crate::spectral::{isw_greens, poschl_teller_greens, Grid, GreensQuery, Spectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Superpotential {
    /// `W = -b cot x` on `(0, pi)`.
    RosenMorse { b: f64 },
    /// `W = omega x / 2` on the real line.
    OscillatorHalfOmega { omega: f64 },
}

impl Superpotential {
    /// Any finite `b` is accepted; spectral statements need `b > 0`.
    pub fn rosen_morse(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidParameter { name: "b", value: b });
        }
        Ok(Superpotential::RosenMorse { b })
    }

    pub fn oscillator(omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter { name: "omega", value: omega });
        }
        Ok(Superpotential::OscillatorHalfOmega { omega })
    }

    /// Open domain `(lo, hi)`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Superpotential::RosenMorse { .. } => (0.0, PI),
            Superpotential::OscillatorHalfOmega { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if x > lo && x < hi {
            Ok(())
        } else {
            Err(Error::Domain { what: "superpotential argument", value: x })
        }
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match *self {
            Superpotential::RosenMorse { b } => -b * cos(x) / sin(x),
            Superpotential::OscillatorHalfOmega { omega } => 0.5 * omega * x,
        })
    }

    /// Analytic derivative.
    pub fn w_prime(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match *self {
            Superpotential::RosenMorse { b } => b / (sin(x) * sin(x)),
            Superpotential::OscillatorHalfOmega { omega } => 0.5 * omega,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerPotentials {
    pub v_minus: f64,
    pub v_plus: f64,
}

/// `(W² - W', W² + W')` at `x`.
///
/// For Rosen-Morse the terms are grouped as `b(b∓1) cot²x ∓ b` so that the
/// `cosec²` parts cancel before rounding; `v_minus` is exactly `-1` at `b = 1`.
pub fn partner_potentials(w: Superpotential, x: f64) -> Result<PartnerPotentials> {
    w.check(x)?;
    Ok(match w {
        Superpotential::RosenMorse { b } => {
            let cot = cos(x) / sin(x);
            let c2 = cot * cot;
            PartnerPotentials { v_minus: b * (b - 1.0) * c2 - b, v_plus: b * (b + 1.0) * c2 + b }
        }
        Superpotential::OscillatorHalfOmega { .. } => {
            let (wv, dw) = (w.w(x)?, w.w_prime(x)?);
            PartnerPotentials { v_minus: wv * wv - dw, v_plus: wv * wv + dw }
        }
    })
}

/// Closed form `b(b∓1) cosec²x - b²` of the Rosen-Morse partners.
pub fn rosen_morse_closed(b: f64, x: f64) -> Result<PartnerPotentials> {
    if !(x > 0.0 && x < PI) {
        return Err(Error::Domain { what: "Rosen-Morse position", value: x });
    }
    let csc2 = 1.0 / (sin(x) * sin(x));
    Ok(PartnerPotentials { v_minus: b * (b - 1.0) * csc2 - b * b, v_plus: b * (b + 1.0) * csc2 - b * b })
}

/// `(s² - 1/4) / sin²x`; equals `v_minus + b²` at `s = b - 1/2`.
pub fn poschl_teller_potential(s: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < PI) {
        return Err(Error::Domain { what: "Poschl-Teller position", value: x });
    }
    Ok((s * s - 0.25) / (sin(x) * sin(x)))
}

/// Normalized zero-energy state `exp(-int W)` sampled on `grid`, with the
/// analytic norm: `sqrt(pi) Gamma(b+1/2)/Gamma(b+1)` for `sin^(2b)` and
/// `sqrt(2 pi / omega)` for the Gaussian. Wall samples are zero.
pub fn ground_state(w: Superpotential, grid: &Grid) -> Result<Vec<f64>> {
    let (lo, hi) = w.domain();
    if grid.x_min() < lo || grid.x_max() > hi {
        return Err(Error::Domain { what: "grid outside superpotential domain", value: grid.x_min() });
    }
    match w {
        Superpotential::RosenMorse { b } => {
            if !(b > 0.0) {
                return Err(Error::NonNormalizable);
            }
            let ln_norm = 0.5 * log(PI) + ln_gamma(b + 0.5)? - ln_gamma(b + 1.0)?;
            Ok(grid
                .points()
                .map(|x| {
                    let s = sin(x);
                    if s <= 0.0 || x <= 0.0 || x >= PI {
                        0.0
                    } else {
                        exp(b * log(s) - 0.5 * ln_norm)
                    }
                })
                .collect())
        }
        Superpotential::OscillatorHalfOmega { omega } => {
            let amp = sqrt(sqrt(omega / (2.0 * PI)));
            Ok(grid.points().map(|x| amp * exp(-0.25 * omega * x * x)).collect())
        }
    }
}

/// `(b+n)² - b²` for `n < n_levels`.
pub fn rosen_morse_spectrum(b: f64, n_levels: usize) -> Result<Spectrum> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter { name: "b", value: b });
    }
    let energies = (0..n_levels).map(|n| (b + n as f64) * (b + n as f64) - b * b).collect();
    Spectrum::new(energies, UnitSystem::natural_susy())
}

/// Largest `|(-d²/dx² + v_minus) psi_0|` over nodes at least two steps from
/// either end, with the fourth-order five-point second difference.
pub fn ground_state_residual(w: Superpotential, grid: &Grid) -> Result<f64> {
    let psi = ground_state(w, grid)?;
    let h = grid.spacing();
    let mut worst = 0.0f64;
    for j in 2..grid.len().saturating_sub(2) {
        let d2 = (-psi[j - 2] + 16.0 * psi[j - 1] - 30.0 * psi[j] + 16.0 * psi[j + 1] - psi[j + 2]) / (12.0 * h * h);
        let v = partner_potentials(w, grid.point(j))?.v_minus;
        worst = worst.max(fabs(-d2 + v * psi[j]));
    }
    Ok(worst)
}

/// Largest `|(d/dx + W) psi_0|` on interior nodes with the central difference.
pub fn annihilation_residual(w: Superpotential, grid: &Grid) -> Result<f64> {
    let psi = ground_state(w, grid)?;
    let h = grid.spacing();
    let mut worst = 0.0f64;
    for j in 1..grid.len().saturating_sub(1) {
        let d1 = (psi[j + 1] - psi[j - 1]) / (2.0 * h);
        worst = worst.max(fabs(d1 + w.w(grid.point(j))? * psi[j]));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    pub name: &'static str,
    /// Largest observed deviation.
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub b: f64,
    pub checks: Vec<LimitCheck>,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Sample triples `(x_f, x_i, E)` for the Green's function comparison.
pub const LIMIT_SAMPLES: [(f64, f64, f64); 6] =
    [(0.4, 2.1, 2.5), (1.0, 1.0, -3.0), (2.9, 0.2, 0.5), (1.5, 1.7, 6.2), (0.8, 2.6, 12.0), (2.2, 2.2, 0.0)];

/// Checks the Rosen-Morse system at parameter `b` against the square well of width pi:
/// `v_minus = -1` on the grid interior (tolerance 1e-12), shifted ladder
/// `E_n + 1 = (n+1)²` for `n < n_levels`, and the Pöschl-Teller Green's
/// function at `s = b - 1/2` against the square-well one (tolerance `tol`).
pub fn isw_limit_check(b: f64, grid: &Grid, n_levels: usize, tol: f64) -> Result<LimitReport> {
    let w = Superpotential::rosen_morse(b)?;
    let mut v_margin = 0.0f64;
    for x in grid.points().filter(|x| *x > 0.0 && *x < PI) {
        v_margin = v_margin.max(fabs(partner_potentials(w, x)?.v_minus + 1.0));
    }
    let spectrum = rosen_morse_spectrum(b, n_levels)?;
    let ladder_margin = spectrum
        .energies()
        .iter()
        .enumerate()
        .map(|(n, e)| fabs(e + 1.0 - ((n + 1) * (n + 1)) as f64))
        .fold(0.0, f64::max);
    let policy = SeriesPolicy::default();
    let mut g_margin = 0.0f64;
    for &(x, y, e) in &LIMIT_SAMPLES {
        let shifted = e + b * b - 1.0;
        let pt = match GreensQuery::new(b - 0.5, shifted, x, y, policy) {
            Ok(q) => poschl_teller_greens(q)?,
            Err(Error::NearPole { .. }) => f64::INFINITY,
            Err(err) => return Err(err),
        };
        let well = isw_greens(x, y, e, policy)?;
        g_margin = g_margin.max(fabs(pt - well));
    }
    let checks = alloc::vec![
        LimitCheck { name: "v_minus constant", margin: v_margin, tolerance: 1e-12, passed: v_margin <= 1e-12 },
        LimitCheck { name: "shifted ladder", margin: ladder_margin, tolerance: 1e-12, passed: ladder_margin <= 1e-12 },
        LimitCheck { name: "greens coincide", margin: g_margin, tolerance: tol, passed: g_margin <= tol },
    ];
    Ok(LimitReport { b, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::isw_eigenstate;
    use proptest::prelude::*;

    #[test]
    fn partner_examples() {
        let rm = Superpotential::rosen_morse(1.0).unwrap();
        for x in [0.1, 1.0, 2.5] {
            assert!((partner_potentials(rm, x).unwrap().v_minus + 1.0).abs() < 1e-12);
        }
        assert!((partner_potentials(rm, PI / 2.0).unwrap().v_plus - 1.0).abs() < 1e-15);
        let ho = Superpotential::oscillator(2.0).unwrap();
        assert_eq!(partner_potentials(ho, 1.0).unwrap(), PartnerPotentials { v_minus: 0.0, v_plus: 2.0 });
        assert!(partner_potentials(rm, 0.0).is_err());
        assert!(partner_potentials(rm, PI).is_err());
    }

    #[test]
    fn ground_state_examples() {
        let g = Grid::new(0.0, PI, 2001).unwrap();
        let psi = ground_state(Superpotential::rosen_morse(1.0).unwrap(), &g).unwrap();
        for (j, x) in g.points().enumerate() {
            assert!((psi[j] - isw_eigenstate(0, x, PI)).abs() < 1e-10);
        }
        let psi = ground_state(Superpotential::rosen_morse(2.0).unwrap(), &g).unwrap();
        assert!((psi[1000] - sqrt(8.0 / (3.0 * PI))).abs() < 1e-12);
        let norm: f64 = g.integrate(&psi.iter().map(|v| v * v).collect::<Vec<_>>());
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(ground_state(Superpotential::rosen_morse(0.0).unwrap(), &g), Err(Error::NonNormalizable));
        let wide = Grid::new(-1.0, 2.0, 10).unwrap();
        assert!(ground_state(Superpotential::rosen_morse(1.0).unwrap(), &wide).is_err());
        let line = Grid::new(-12.0, 12.0, 4001).unwrap();
        let psi = ground_state(Superpotential::oscillator(1.0).unwrap(), &line).unwrap();
        let norm: f64 = line.integrate(&psi.iter().map(|v| v * v).collect::<Vec<_>>());
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn residuals_small() {
        let g = Grid::new(0.0, PI, 2001).unwrap();
        // sin^b is smooth at the walls only for integer b
        for b in [1.0, 2.0, 3.0] {
            let w = Superpotential::rosen_morse(b).unwrap();
            assert!(ground_state_residual(w, &g).unwrap() <= 1e-4, "b={b}");
            assert!(annihilation_residual(w, &g).unwrap() <= 1e-4, "b={b}");
        }
        let line = Grid::new(-8.0, 8.0, 3201).unwrap();
        let ho = Superpotential::oscillator(1.0).unwrap();
        assert!(ground_state_residual(ho, &line).unwrap() <= 1e-8);
    }

    #[test]
    fn spectrum_examples() {
        let s = rosen_morse_spectrum(1.0, 4).unwrap();
        assert_eq!(s.energies(), &[0.0, 3.0, 8.0, 15.0]);
        assert_eq!(rosen_morse_spectrum(2.0, 2).unwrap().energies()[1], 5.0);
        assert_eq!(rosen_morse_spectrum(0.3, 1).unwrap().energies()[0], 0.0);
        assert!(rosen_morse_spectrum(0.0, 3).is_err());
    }

    #[test]
    fn limit_check_passes_at_one() {
        let g = Grid::new(0.0, PI, 1001).unwrap();
        let r = isw_limit_check(1.0, &g, 6, 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn limit_check_fails_away() {
        let g = Grid::new(0.0, PI, 1001).unwrap();
        let r = isw_limit_check(1.1, &g, 6, 1e-9).unwrap();
        assert!(!r.checks[0].passed && r.checks[0].margin > 0.1);
        assert!(!r.checks[1].passed && (r.checks[1].margin - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn factorization_matches_closed_form(b in 0.2f64..5.0, x in 0.01f64..3.13) {
            let w = Superpotential::rosen_morse(b).unwrap();
            let (wv, dw) = (w.w(x).unwrap(), w.w_prime(x).unwrap());
            let c = rosen_morse_closed(b, x).unwrap();
            let p = partner_potentials(w, x).unwrap();
            let scale = 1.0 + b * b / (sin(x) * sin(x));
            prop_assert!((wv * wv - dw - c.v_minus).abs() <= 1e-10 * scale);
            prop_assert!((wv * wv + dw - c.v_plus).abs() <= 1e-10 * scale);
            prop_assert!((p.v_minus - c.v_minus).abs() <= 1e-10 * scale);
            prop_assert!((p.v_plus - c.v_plus).abs() <= 1e-10 * scale);
        }

        #[test]
        fn poschl_teller_shift(b in 0.2f64..5.0, x in 0.05f64..3.09) {
            let vm = rosen_morse_closed(b, x).unwrap().v_minus;
            let vps = poschl_teller_potential(b - 0.5, x).unwrap();
            prop_assert!((vm - (vps - b * b)).abs() <= 1e-12 * (1.0 + vps.abs()));
        }
    }
}
