//! Symmetric tridiagonal eigenpairs: Sturm-sequence bisection for the
//! eigenvalues, inverse iteration with a row-pivoted LU solve for the vectors.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct SymTridiag {
    pub d: Vec<f64>,
    /// Off-diagonal, length `d.len() - 1`.
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { fabs(self.e[i - 1]) } else { 0.0 } + if i + 1 < n { fabs(self.e[i]) } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[0] - x;
        for i in 0.. {
            if fabs(q) < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
            if i + 1 == self.len() {
                break;
            }
            q = self.d[i + 1] - x - self.e[i] * self.e[i] / q;
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = fabs(lo).max(fabs(hi)).max(f64::MIN_POSITIVE);
        let pivmin = f64::MIN_POSITIVE * scale.max(1.0);
        lo -= 2.0 * f64::EPSILON * scale;
        hi += 2.0 * f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * fabs(mid).max(f64::EPSILON * scale) {
                break;
            }
            if self.count_below(mid, pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.d[i] * x[i];
                if i > 0 {
                    v += self.e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.e[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Unit-norm eigenvector for `lambda`, kept orthogonal to `previous`.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        let (glo, ghi) = self.gershgorin();
        let scale = fabs(glo).max(fabs(ghi)).max(1.0);
        let lu = ShiftedLu::factor(self, lambda, f64::EPSILON * scale);
        // deterministic, not orthogonal to any low mode
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * sqrt((i % 7) as f64)).collect();
        for _ in 0..8 {
            x = lu.solve(x);
            for p in previous {
                let dot: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, pi) in x.iter_mut().zip(p) {
                    *xi -= dot * pi;
                }
            }
            let norm = sqrt(x.iter().map(|v| v * v).sum::<f64>());
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Convergence("inverse iteration"));
            }
            x.iter_mut().for_each(|v| *v /= norm);
            let r = self.apply(&x);
            let resid = r.iter().zip(&x).map(|(a, b)| fabs(a - lambda * b)).fold(0.0, f64::max);
            if resid <= 1e3 * f64::EPSILON * scale {
                return Ok(x);
            }
        }
        Err(Error::Convergence("inverse iteration"))
    }
}

/// LU of `T - sigma I` with partial (row) pivoting; `U` has two superdiagonals.
struct ShiftedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiag, sigma: f64, tiny: f64) -> Self {
        let n = t.len();
        let mut d: Vec<f64> = t.d.iter().map(|v| v - sigma).collect();
        let mut du = t.e.clone();
        let mut dl = t.e.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if fabs(d[i]) >= fabs(dl[i]) {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for v in d.iter_mut() {
            if fabs(*v) < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        ShiftedLu { d, du, du2, dl, swapped }
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
        b
    }
}
