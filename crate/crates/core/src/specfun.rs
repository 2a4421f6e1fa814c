//! Special functions: Gamma, the Gauss hypergeometric series, Hermite
//! polynomials and Ferrers (on-the-cut associated Legendre) functions.

use core::f64::consts::PI;

use libm::{cos, exp, fabs, floor, log, pow, sin, sqrt, tan};

use crate::{Error, Result};

/// Truncation contract for every infinite sum in the crate.
///
/// A series is accepted once two consecutive increments fall below
/// `rel_tol * |partial sum|`; otherwise it fails after `max_terms` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    rel_tol: f64,
    max_terms: usize,
}

impl SeriesPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::InvalidParameter { name: "rel_tol", value: rel_tol });
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter { name: "max_terms", value: 0.0 });
        }
        Ok(SeriesPolicy { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy { rel_tol: 1e-14, max_terms: 1_000_000 }
    }
}

/// Lanczos parameters (g = 607/128, 15 terms), good to ~1e-15 on the right half-plane.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn lanczos_sum(x: f64) -> f64 {
    // x here is the shifted argument (Gamma(x + 1))
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && floor(x) == x
}

/// Gamma function.
///
/// Uses the Lanczos approximation for `x >= 0.5` and the reflection formula below.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain { what: "gamma argument", value: x });
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { at: x });
    }
    if x < 0.5 {
        let g = gamma(1.0 - x)?;
        return Ok(PI / (sin(PI * x) * g));
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    // Split the power so that t^(x-1/2) does not overflow before exp(-t) scales it.
    let half_pow = pow(t, 0.5 * (xm + 0.5));
    Ok(sqrt(2.0 * PI) * half_pow * exp(-t) * half_pow * lanczos_sum(xm))
}

/// Natural log of |Gamma(x)| for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "ln_gamma argument", value: x });
    }
    if x < 0.5 {
        // Gamma(x) = Gamma(x + 1) / x keeps us on the Lanczos side.
        return Ok(ln_gamma(x + 1.0)? - log(x));
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    Ok(0.5 * log(2.0 * PI) + (xm + 0.5) * log(t) - t + log(lanczos_sum(xm)))
}

/// Parameters of the Gauss series F(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeometricArgs {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Result<Self> {
        if is_nonpositive_integer(c) {
            return Err(Error::Pole { at: c });
        }
        if !(fabs(z) < 1.0) {
            return Err(Error::Domain { what: "hypergeometric z", value: z });
        }
        Ok(HypergeometricArgs { a, b, c, z })
    }
}

/// Power-series value of F(a, b; c; z) for |z| < 1.
///
/// Terminating series (a or b a non-positive integer) stop at the exact zero term.
/// For the infinite case the acceptance threshold is tightened by `1 - |z|` so the
/// geometric tail left behind stays below `rel_tol`.
pub fn hyp2f1(args: HypergeometricArgs, policy: SeriesPolicy) -> Result<f64> {
    let HypergeometricArgs { a, b, c, z } = HypergeometricArgs::new(args.a, args.b, args.c, args.z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    // Past this index the coefficient ratio no longer changes sign.
    let hump = (-a).max(-b).max(-c).max(0.0);
    let tol = policy.rel_tol() * (1.0 - fabs(z));
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for k in 0..policy.max_terms() {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if kf > hump && fabs(term) <= tol * fabs(sum) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Truncation { terms: policy.max_terms() })
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Ferrers function P^mu_nu(cos theta) through the hypergeometric representation
///
/// P^mu_nu(cos t) = tan(t/2)^(-mu) / Gamma(1 - mu) * F(-nu, nu + 1; 1 - mu; sin^2(t/2)).
///
/// Converges for every `theta` in (0, pi) but slows down as `theta -> pi`.
pub fn ferrers_legendre(mu: f64, nu: f64, theta: f64, policy: SeriesPolicy) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain { what: "theta", value: theta });
    }
    let half = 0.5 * theta;
    let s = sin(half);
    let args = HypergeometricArgs::new(-nu, nu + 1.0, 1.0 - mu, s * s)?;
    let f = hyp2f1(args, policy)?;
    Ok(pow(tan(half), -mu) / gamma(1.0 - mu)? * f)
}

/// Closed form of P^(-1/2)_(n+1/2)(cos theta) = sqrt(2 / (pi sin theta)) sin((n+1) theta) / (n+1).
pub fn legendre_half_closed(n: usize, theta: f64) -> f64 {
    let k = (n + 1) as f64;
    sqrt(2.0 / (PI * sin(theta))) * sin(k * theta) / k
}

/// Half-odd-degree Ferrers function P^(-1/2)_(n+1/2)(cos theta), real convention.
///
/// Evaluates both the trigonometric closed form and the hypergeometric series and
/// returns the closed form once they agree to `1e-8 * max(1, |value|)`.
pub fn ferrers_legendre_half(n: usize, theta: f64, policy: SeriesPolicy) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain { what: "theta", value: theta });
    }
    let closed = legendre_half_closed(n, theta);
    let series = ferrers_legendre(-0.5, n as f64 + 0.5, theta, policy)?;
    if fabs(closed - series) > 1e-8 * closed.abs().max(1.0) {
        return Err(Error::RouteDisagreement { first: closed, second: series });
    }
    Ok(closed)
}

/// Normalized Pöschl-Teller angular factor
/// `sqrt(Gamma(n+2s+1)/Gamma(n+1)) * P^(-s)_(n+s)(cos theta)` for n = 0, 1, ...
///
/// Upward degree recurrence seeded by the closed form of the n = 0 function
/// `(sin(theta)/2)^s / Gamma(1+s)`; the Gamma ratio is carried in log form.
#[derive(Debug, Clone)]
pub(crate) struct NormalizedFerrers {
    s: f64,
    x: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl NormalizedFerrers {
    pub(crate) fn new(s: f64, theta: f64) -> Result<Self> {
        if !(s > -0.5) {
            return Err(Error::InvalidParameter { name: "s", value: s });
        }
        let lead = 0.5 * ln_gamma(2.0 * s + 1.0)? - ln_gamma(1.0 + s)? + s * log(0.5 * sin(theta));
        Ok(NormalizedFerrers { s, x: cos(theta), n: 0, prev: 0.0, cur: exp(lead) })
    }

    pub(crate) fn degree(&self) -> usize {
        self.n
    }

    pub(crate) fn value(&self) -> f64 {
        self.cur
    }

    pub(crate) fn advance(&mut self) {
        let n = self.n as f64;
        let s = self.s;
        let up = (2.0 * n + 2.0 * s + 1.0) / sqrt((n + 1.0) * (n + 2.0 * s + 1.0));
        let down = if self.n == 0 {
            0.0
        } else {
            sqrt(n * (n + 2.0 * s) / ((n + 1.0) * (n + 2.0 * s + 1.0)))
        };
        let next = up * self.x * self.cur - down * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn policy() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    #[test]
    fn gamma_reference_values() {
        assert!((gamma(1.5).unwrap() - 0.886_226_925_452_758).abs() < 1e-14);
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(4.0).unwrap() - 6.0).abs() < 1e-13);
        // 49! relative check
        let mut fact = 1.0f64;
        for k in 1..50 {
            fact *= k as f64;
        }
        assert!((gamma(50.0).unwrap() / fact - 1.0).abs() < 1e-12);
        assert!((gamma(-0.5).unwrap() + 2.0 * sqrt(PI)).abs() < 1e-13);
    }

    #[test]
    fn gamma_poles() {
        assert_eq!(gamma(0.0), Err(Error::Pole { at: 0.0 }));
        assert_eq!(gamma(-3.0), Err(Error::Pole { at: -3.0 }));
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.2, 0.5, 1.7, 10.0, 42.5] {
            assert!((ln_gamma(x).unwrap() - log(gamma(x).unwrap())).abs() < 1e-12);
        }
        // far beyond f64 range of Gamma itself
        let lg = ln_gamma(300.0).unwrap();
        assert!((lg - 1_409.202_067_470_412).abs() < 1e-8 * lg);
    }

    #[test]
    fn hyp2f1_reductions() {
        let args = HypergeometricArgs::new(-0.5, 1.5, 1.5, 0.75).unwrap();
        assert!((hyp2f1(args, policy()).unwrap() - 0.5).abs() < 1e-13);
        let args = HypergeometricArgs::new(3.1, -2.2, 0.7, 0.0).unwrap();
        assert_eq!(hyp2f1(args, policy()).unwrap(), 1.0);
    }

    #[test]
    fn hyp2f1_trig_example() {
        // Brute-force partial sums of the series as the oracle.
        let z = sin(PI / 6.0) * sin(PI / 6.0);
        let (a, b, c) = (-1.5, 2.5, 1.5);
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 0..400 {
            let kf = k as f64;
            term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
            sum += term;
        }
        // Frozen oracle value, equal to sin(2 pi/3) / 2.
        let oracle = 0.433_012_701_892_219_3;
        assert!((sum - oracle).abs() < 1e-12);
        assert!((oracle - sin(2.0 * PI / 3.0) / 2.0).abs() < 1e-15);
        let args = HypergeometricArgs::new(a, b, c, z).unwrap();
        assert!((hyp2f1(args, policy()).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn hyp2f1_errors() {
        assert!(matches!(HypergeometricArgs::new(1.0, 1.0, -2.0, 0.1), Err(Error::Pole { .. })));
        assert!(matches!(HypergeometricArgs::new(1.0, 1.0, 2.0, 1.0), Err(Error::Domain { .. })));
        let tight = SeriesPolicy::new(1e-15, 5).unwrap();
        let args = HypergeometricArgs::new(0.5, 0.5, 1.5, 0.9).unwrap();
        assert_eq!(hyp2f1(args, tight), Err(Error::Truncation { terms: 5 }));
    }

    #[test]
    fn series_policy_validation() {
        assert!(SeriesPolicy::new(0.0, 10).is_err());
        assert!(SeriesPolicy::new(1e-8, 0).is_err());
        assert!(SeriesPolicy::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 1.7), 1.0);
        assert_eq!(hermite(3, 1.0), -4.0);
        assert_eq!(hermite(5, -0.4), -hermite(5, 0.4));
        assert_eq!(hermite(4, 0.5), 16.0 * 0.0625 - 48.0 * 0.25 + 12.0);
    }

    #[test]
    fn hermite_parity_exact() {
        for n in 0..=30 {
            for i in 0..40 {
                let x = -3.9 + 0.2 * i as f64;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(hermite(n, -x), sign * hermite(n, x));
            }
        }
    }

    #[test]
    fn legendre_half_examples() {
        let v = ferrers_legendre_half(0, PI / 2.0, policy()).unwrap();
        assert!((v - 0.797_884_560_802_865_4).abs() < 1e-12);
        assert!(ferrers_legendre_half(1, PI / 2.0, policy()).unwrap().abs() < 1e-15);
        assert!(ferrers_legendre_half(2, PI / 3.0, policy()).unwrap().abs() < 1e-15);
        assert!(ferrers_legendre_half(0, 0.0, policy()).is_err());
        assert!(ferrers_legendre_half(0, PI, policy()).is_err());
    }

    #[test]
    fn legendre_two_routes_agree() {
        for n in 0..=10 {
            for &theta in &[0.3, 1.0, 2.0, 2.8] {
                let closed = legendre_half_closed(n, theta);
                let series = ferrers_legendre(-0.5, n as f64 + 0.5, theta, policy()).unwrap();
                assert!((closed - series).abs() < 1e-8, "n={n} theta={theta}");
            }
        }
    }

    #[test]
    fn normalized_recurrence_matches_hypergeometric_route() {
        for &s in &[-0.3, 0.5, 1.7] {
            for &theta in &[0.4, 1.3, 1.9] {
                let mut rec = NormalizedFerrers::new(s, theta).unwrap();
                for n in 0..=10 {
                    assert_eq!(rec.degree(), n);
                    let p = ferrers_legendre(-s, n as f64 + s, theta, policy()).unwrap();
                    let ratio = exp(0.5 * (ln_gamma(n as f64 + 2.0 * s + 1.0).unwrap()
                        - ln_gamma(n as f64 + 1.0).unwrap()));
                    let expected = ratio * p;
                    assert!(
                        (rec.value() - expected).abs() < 1e-8 * expected.abs().max(1.0),
                        "s={s} theta={theta} n={n}: {} vs {expected}",
                        rec.value()
                    );
                    rec.advance();
                }
            }
        }
    }

    #[test]
    fn normalized_recurrence_high_precision_values() {
        // Frozen from 40-digit mpmath evaluations of sqrt(G(n+2s+1)/G(n+1)) P^-s_(n+s).
        let cases = [
            (1.7, 10, 2.6, -0.317_750_428_242_116_56),
            (0.3, 25, 3.0, 0.300_478_880_406_645_98),
            (4.0, 40, 0.2, -0.257_923_926_916_379_22),
            (-0.3, 7, 2.9, -0.111_198_654_488_555_05),
        ];
        for (s, n, theta, expected) in cases {
            let mut rec = NormalizedFerrers::new(s, theta).unwrap();
            while rec.degree() < n {
                rec.advance();
            }
            assert!((rec.value() - expected).abs() < 1e-13, "s={s} n={n}");
        }
    }

    proptest! {
        #[test]
        fn gamma_recurrence(x in 0.5f64..20.0) {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn hypergeometric_trig_identity(idx in 0usize..4, z in 0.01f64..(PI / 2.0 - 0.01)) {
            let a = [-0.5, -1.5, -2.5, 2.5][idx];
            let s = sin(z);
            let args = HypergeometricArgs::new(a, 1.0 - a, 1.5, s * s).unwrap();
            let f = hyp2f1(args, SeriesPolicy::default()).unwrap();
            let k = 2.0 * a - 1.0;
            prop_assert!((f * k * s - sin(k * z)).abs() < 1e-10);
        }
    }
}
