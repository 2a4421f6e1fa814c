//! Energy-domain Green's functions `G(x_f, x_i; E) = sum_n psi_n(x_f) psi_n(x_i) / (E - lambda_n)`
//! on `(0, pi)` in natural units (`hbar = 1`, `m = 1/2`).
//!
//! The raw series decays like `1/n`. Both evaluators subtract the exactly known
//! zero-energy function `G(E=0) = -sum psi_n psi_n / lambda_n`, which leaves
//!
//! ```text
//! G(E) = G(0) + sum_n psi_n(x_f) psi_n(x_i) E / (lambda_n (E - lambda_n))
//! ```
//!
//! with terms falling like `n^-4`.

use core::f64::consts::{FRAC_PI_2, PI};

use libm::{cos, exp, fabs, log, sin, sqrt, tan};

use crate::specfun::{hyp2f1, HypergeometricArgs, NormalizedFerrers, SeriesPolicy};
use crate::{Error, Result};

/// Band around each pole inside which evaluation is refused.
pub const POLE_EXCLUSION: f64 = 1e-9;

/// Pöschl-Teller Green's function request; `s = b - 1/2`, poles at `(n + s + 1/2)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensQuery {
    s: f64,
    energy: f64,
    x_f: f64,
    x_i: f64,
    policy: SeriesPolicy,
}

impl GreensQuery {
    pub fn new(s: f64, energy: f64, x_f: f64, x_i: f64, policy: SeriesPolicy) -> Result<Self> {
        if !(s > -0.5) || !s.is_finite() {
            return Err(Error::InvalidParameter { name: "s", value: s });
        }
        if !energy.is_finite() {
            return Err(Error::InvalidParameter { name: "energy", value: energy });
        }
        check_position(x_f)?;
        check_position(x_i)?;
        check_poles(energy, s + 0.5)?;
        Ok(GreensQuery { s, energy, x_f, x_i, policy })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn positions(&self) -> (f64, f64) {
        (self.x_f, self.x_i)
    }

    pub fn policy(&self) -> SeriesPolicy {
        self.policy
    }
}

fn check_position(x: f64) -> Result<()> {
    if (0.0..=PI).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { what: "position in (0, pi)", value: x })
    }
}

/// Poles at `(n + shift)^2`, n = 0, 1, ...
fn check_poles(energy: f64, shift: f64) -> Result<()> {
    if energy <= 0.0 && shift * shift - energy > POLE_EXCLUSION {
        return Ok(());
    }
    let centre = sqrt(energy.max(0.0)) - shift;
    let lo = libm::floor(centre).max(0.0) as usize;
    for n in lo.saturating_sub(1)..=lo + 1 {
        let pole = (n as f64 + shift) * (n as f64 + shift);
        if fabs(energy - pole) < POLE_EXCLUSION {
            return Err(Error::NearPole { energy, pole });
        }
    }
    Ok(())
}

fn on_wall(x: f64) -> bool {
    x <= 0.0 || x >= PI
}

/// Sums the accelerated remainder. `next` yields `psi_n(x_f) psi_n(x_i)` for
/// successive n; levels are `(n + shift)^2` and `envelope` bounds `psi_n^2`
/// for the tail estimate.
fn accelerated(
    energy: f64,
    g0: f64,
    shift: f64,
    envelope: f64,
    min_terms: usize,
    policy: SeriesPolicy,
    mut next: impl FnMut() -> f64,
) -> Result<f64> {
    if energy == 0.0 {
        return Ok(g0);
    }
    let e = fabs(energy);
    let mut acc = 0.0;
    let mut n = 0usize;
    loop {
        if n >= policy.max_terms() {
            return Err(Error::Truncation { terms: n });
        }
        let lambda = (n as f64 + shift) * (n as f64 + shift);
        acc += next() * energy / (lambda * (energy - lambda));
        n += 1;
        // sum_{k >= n} 2 C |E| / lambda_k^2 once lambda_n > 2|E|
        let lead = n as f64 + shift;
        if n >= min_terms && lead * lead > 2.0 * e && lead > 1.0 {
            let tail = 2.0 * envelope * e / (3.0 * (lead - 1.0) * (lead - 1.0) * (lead - 1.0));
            let scale = fabs(g0 + acc).max(fabs(g0)).max(1e-3);
            if tail <= policy.rel_tol() * scale {
                return Ok(g0 + acc);
            }
        }
    }
}

/// Square-well Green's function on `(0, pi)`, poles at `(n+1)^2`.
pub fn isw_greens(x_f: f64, x_i: f64, energy: f64, policy: SeriesPolicy) -> Result<f64> {
    if !energy.is_finite() {
        return Err(Error::InvalidParameter { name: "energy", value: energy });
    }
    check_position(x_f)?;
    check_position(x_i)?;
    check_poles(energy, 1.0)?;
    if on_wall(x_f) || on_wall(x_i) {
        return Ok(0.0);
    }
    let (lo, hi) = if x_f < x_i { (x_f, x_i) } else { (x_i, x_f) };
    let g0 = -lo * (PI - hi) / PI;
    let mut n = 0usize;
    accelerated(energy, g0, 1.0, 2.0 / PI, 1, policy, || {
        n += 1;
        let k = n as f64;
        2.0 / PI * sin(k * x_f) * sin(k * x_i)
    })
}

/// Pöschl-Teller (Rosen-Morse) Green's function with eigenfunctions
/// `sqrt(n+s+1/2) sqrt(Gamma(n+2s+1)/Gamma(n+1)) (sin x)^(1/2) P^(-s)_(n+s)(cos x)`.
pub fn poschl_teller_greens(q: GreensQuery) -> Result<f64> {
    let GreensQuery { s, energy, x_f, x_i, policy } = q;
    if on_wall(x_f) || on_wall(x_i) {
        return Ok(0.0);
    }
    let g0 = -zero_energy_sum(s, x_f, x_i, policy)?;
    let mut pf = NormalizedFerrers::new(s, x_f)?;
    let mut pi = NormalizedFerrers::new(s, x_i)?;
    let (sf, si) = (sqrt(sin(x_f)), sqrt(sin(x_i)));
    let min_terms = 8 + libm::ceil(2.0 * s * s) as usize;
    accelerated(energy, g0, s + 0.5, 1.0, min_terms, policy, || {
        let weight = pf.degree() as f64 + s + 0.5;
        let term = weight * sf * pf.value() * si * pi.value();
        pf.advance();
        pi.advance();
        term
    })
}

/// Poles of an energy-domain function inside `[lo, hi]`, located as upward zero
/// crossings of `1/G` (a diagonal Green's function decreases between poles, so
/// its reciprocal rises through zero at each pole and jumps down at each zero).
/// Each bracket of width `step` is refined by bisection to `tol`.
pub fn scan_poles(g: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, step: f64, tol: f64) -> Result<alloc::vec::Vec<f64>> {
    if !(hi > lo) || !(step > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "scan range", value: step });
    }
    let inv = |e: f64| -> Result<f64> {
        match g(e) {
            Ok(v) => Ok(1.0 / v),
            Err(Error::NearPole { .. }) => Ok(0.0),
            Err(err) => Err(err),
        }
    };
    let mut poles = alloc::vec::Vec::new();
    let mut a = lo;
    let mut fa = inv(a)?;
    while a < hi {
        let b = (a + step).min(hi);
        let fb = inv(b)?;
        if fa < 0.0 && fb >= 0.0 {
            let (mut l, mut r) = (a, b);
            while r - l > tol {
                let m = 0.5 * (l + r);
                if inv(m)? < 0.0 {
                    l = m;
                } else {
                    r = m;
                }
            }
            poles.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    Ok(poles)
}

/// Zero-energy solution regular at the left wall,
/// `u(x) = sqrt(sin x) tan(x/2)^s F(1/2, 1/2; 1+s; sin^2(x/2))`, for `x <= pi/2`.
fn regular_solution(s: f64, x: f64, policy: SeriesPolicy) -> Result<f64> {
    let z = sin(0.5 * x) * sin(0.5 * x);
    let f = hyp2f1(HypergeometricArgs::new(0.5, 0.5, 1.0 + s, z)?, policy)?;
    Ok(sqrt(sin(x)) * exp(s * log(tan(0.5 * x))) * f)
}

/// `sum_n psi_n(x) psi_n(y) / lambda_n`, the kernel of `H^-1` with Dirichlet walls.
///
/// Equals `u(x<) u(pi - x>) / W` with `W` the Wronskian. When `x< > pi/2` the
/// regular solution is continued by reduction of order on `v(x) = u(pi - x)`:
/// `u(x) = v(x) (1 + W int_{pi/2}^x dt / v(t)^2)`, which keeps every
/// hypergeometric argument at or below 1/2.
pub(crate) fn zero_energy_sum(s: f64, x: f64, y: f64, policy: SeriesPolicy) -> Result<f64> {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let mid = regular_solution(s, FRAC_PI_2, policy)?;
    let f = hyp2f1(HypergeometricArgs::new(0.5, 0.5, 1.0 + s, 0.5)?, policy)?;
    let df = 0.25 / (1.0 + s) * hyp2f1(HypergeometricArgs::new(1.5, 1.5, 2.0 + s, 0.5)?, policy)?;
    let wronskian = 2.0 * mid * mid * (s + df / (2.0 * f));
    let v_hi = regular_solution(s, PI - hi, policy)?;
    if lo <= FRAC_PI_2 {
        return Ok(regular_solution(s, lo, policy)? * v_hi / wronskian);
    }
    let v_lo = regular_solution(s, PI - lo, policy)?;
    let integral = inverse_square_integral(s, PI - lo, policy)?;
    Ok(v_lo * v_hi * (1.0 / wronskian + integral))
}

/// `int_a^{pi/2} dr / u(r)^2` by composite Gauss-Legendre in `t = ln r`.
fn inverse_square_integral(s: f64, a: f64, policy: SeriesPolicy) -> Result<f64> {
    let (t0, t1) = (log(a), log(FRAC_PI_2));
    let width = (t1 - t0).max(0.0);
    if width == 0.0 {
        return Ok(0.0);
    }
    let panel = (4.0 / (2.0 * fabs(s) + 1.0)).min(0.5);
    let panels = libm::ceil(width / panel).max(1.0) as usize;
    let h = width / panels as f64;
    let (nodes, weights) = gauss_legendre_16();
    let mut sum = 0.0;
    for p in 0..panels {
        let c = t0 + (p as f64 + 0.5) * h;
        for (xk, wk) in nodes.iter().zip(&weights) {
            let t = c + 0.5 * h * xk;
            let r = exp(t);
            let u = regular_solution(s, r, policy)?;
            sum += 0.5 * h * wk * r / (u * u);
        }
    }
    Ok(sum)
}

fn gauss_legendre_16() -> ([f64; 16], [f64; 16]) {
    let n = 16usize;
    let mut nodes = [0.0; 16];
    let mut weights = [0.0; 16];
    for i in 0..n {
        let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if fabs(dx) < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::sinh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pol() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    /// Closed-form square-well resolvent from matched zero-energy-shifted solutions.
    fn isw_closed(x: f64, y: f64, e: f64) -> f64 {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        if e > 0.0 {
            let k = sqrt(e);
            -sin(k * lo) * sin(k * (PI - hi)) / (k * sin(k * PI))
        } else if e < 0.0 {
            let k = sqrt(-e);
            -sinh(k * lo) * sinh(k * (PI - hi)) / (k * sinh(k * PI))
        } else {
            -lo * (PI - hi) / PI
        }
    }

    fn pt_state(s: f64, n: usize, x: f64) -> f64 {
        let mut p = NormalizedFerrers::new(s, x).unwrap();
        while p.degree() < n {
            p.advance();
        }
        sqrt(n as f64 + s + 0.5) * sqrt(sin(x)) * p.value()
    }

    #[test]
    fn gauss_nodes_integrate_polynomials() {
        let (x, w) = gauss_legendre_16();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn isw_examples() {
        let g = isw_greens(FRAC_PI_2, FRAC_PI_2, 0.0, pol()).unwrap();
        assert!((g + PI / 4.0).abs() < 1e-15);
        assert_eq!(isw_greens(0.0, 1.0, 2.5, pol()).unwrap(), 0.0);
        assert!(matches!(isw_greens(1.0, 1.0, 4.0 + 1e-10, pol()), Err(Error::NearPole { .. })));
        assert!(isw_greens(1.0, 1.0, 4.0 + 1e-8, pol()).is_ok());
        assert!(isw_greens(-0.1, 1.0, 2.0, pol()).is_err());
    }

    #[test]
    fn isw_matches_closed_resolvent() {
        for &e in &[-7.3, -0.4, 0.3, 2.5, 5.9, 30.2] {
            for &(x, y) in &[(0.3, 2.9), (1.2, 1.2), (2.0, 0.7), (3.1, 3.05)] {
                let g = isw_greens(x, y, e, pol()).unwrap();
                let c = isw_closed(x, y, e);
                assert!((g - c).abs() < 1e-11 * c.abs().max(1.0), "E={e} ({x},{y}) {g} vs {c}");
            }
        }
    }

    #[test]
    fn pt_half_equals_isw() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = rng.random_range(0.05..PI - 0.05);
            let y = rng.random_range(0.05..PI - 0.05);
            let e = rng.random_range(-5.0..20.0);
            if check_poles(e, 1.0).is_err() {
                continue;
            }
            let q = GreensQuery::new(0.5, e, x, y, pol()).unwrap();
            let a = poschl_teller_greens(q).unwrap();
            let b = isw_greens(x, y, e, pol()).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let q = GreensQuery::new(0.5, 0.0, FRAC_PI_2, FRAC_PI_2, pol()).unwrap();
        assert!((poschl_teller_greens(q).unwrap() + PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn zero_energy_closed_form_at_half() {
        for &(x, y) in &[(0.4, 2.0), (2.2, 2.9), (1.9, 1.7), (3.1, 3.13)] {
            let s1 = zero_energy_sum(0.5, x, y, pol()).unwrap();
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            assert!((s1 - lo * (PI - hi) / PI).abs() < 1e-13, "({x},{y})");
        }
    }

    /// The zero-energy kernel inverts H: int S1(x,y) psi_n(y) dy = psi_n(x) / lambda_n.
    #[test]
    fn zero_energy_inverts_hamiltonian() {
        fn simpson(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> f64 {
            let h = (b - a) / m as f64;
            let mut acc = f(a) + f(b);
            for j in 1..m {
                acc += if j % 2 == 1 { 4.0 } else { 2.0 } * f(a + j as f64 * h);
            }
            acc * h / 3.0
        }
        for &s in &[1.3, 2.0, -0.2] {
            for &(n, x) in &[(0usize, 1.1), (2, 2.4)] {
                let integrand = |y: f64| {
                    if on_wall(y) {
                        0.0
                    } else {
                        zero_energy_sum(s, x, y, pol()).unwrap() * pt_state(s, n, y)
                    }
                };
                let lhs = simpson(0.0, x, 1200, integrand) + simpson(x, PI, 1200, integrand);
                let lambda = (n as f64 + s + 0.5).powi(2);
                let rhs = pt_state(s, n, x) / lambda;
                let tol = if s < 0.0 { 1e-4 } else { 1e-8 };
                assert!((lhs - rhs).abs() < tol, "s={s} n={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn pt_residue_by_richardson() {
        for &s in &[0.5, 1.3] {
            for n in 0..3usize {
                let pole = (n as f64 + s + 0.5).powi(2);
                let (x, y) = (1.0, 1.9);
                let f = |d: f64| d * poschl_teller_greens(GreensQuery::new(s, pole + d, x, y, pol()).unwrap()).unwrap();
                let d = 1e-3;
                let r = 2.0 * f(d / 2.0) - f(d);
                let exact = pt_state(s, n, x) * pt_state(s, n, y);
                assert!((r - exact).abs() < 1e-6, "s={s} n={n}: {r} vs {exact}");
            }
        }
        let f = |d: f64| d * isw_greens(FRAC_PI_2, FRAC_PI_2, 1.0 + d, pol()).unwrap();
        let r = 2.0 * f(5e-4) - f(1e-3);
        assert!((r - 2.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn pt_symmetric() {
        for &s in &[0.0, 0.8, 3.5] {
            let a = poschl_teller_greens(GreensQuery::new(s, 3.3, 0.6, 2.7, pol()).unwrap()).unwrap();
            let b = poschl_teller_greens(GreensQuery::new(s, 3.3, 2.7, 0.6, pol()).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn pole_scan_finds_ladder() {
        let poles = scan_poles(|e| isw_greens(1.0, 1.0, e, pol()), 0.5, 10.0, 0.05, 1e-9).unwrap();
        assert_eq!(poles.len(), 3);
        for (p, want) in poles.iter().zip([1.0, 4.0, 9.0]) {
            assert!((p - want).abs() < 1e-6, "{p}");
        }
        let poles = scan_poles(
            |e| poschl_teller_greens(GreensQuery::new(1.5, e, 1.2, 1.2, pol())?),
            0.0,
            20.0,
            0.1,
            1e-9,
        )
        .unwrap();
        for (p, want) in poles.iter().zip([4.0, 9.0, 16.0]) {
            assert!((p - want).abs() < 1e-6, "{p}");
        }
    }

    #[test]
    fn query_validation() {
        assert!(GreensQuery::new(-0.5, 1.0, 1.0, 1.0, pol()).is_err());
        assert!(matches!(GreensQuery::new(1.0, 2.25, 1.0, 1.0, pol()), Err(Error::NearPole { .. })));
        assert!(GreensQuery::new(1.0, 1.0, 4.0, 1.0, pol()).is_err());
        let q = GreensQuery::new(1.0, 1.0, 0.0, 1.0, pol()).unwrap();
        assert_eq!(poschl_teller_greens(q).unwrap(), 0.0);
    }
}
