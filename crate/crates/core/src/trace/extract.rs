use alloc::vec::Vec;

use libm::{exp, fabs, log};
use nalgebra::{DMatrix, DVector};

use super::TraceCurve;
use crate::kernels::UnitSystem;
use crate::spectral::Spectrum;
use crate::{Error, Result};

/// Estimate with a self-consistency error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub error: f64,
    /// False when the error exceeds the requested tolerance.
    pub asymptotic: bool,
}

fn log_ratios(betas: &[f64], values: &[f64]) -> Vec<f64> {
    (0..values.len().saturating_sub(1))
        .map(|k| -log(values[k + 1] / values[k]) / (betas[k + 1] - betas[k]))
        .collect()
}

/// Aitken extrapolation of three successive estimates, used only when they
/// approach geometrically.
fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d = (c - b) - (b - a);
    if d != 0.0 && fabs(c - b) < fabs(b - a) && fabs(d) > 1e-14 * fabs(c) {
        c - (c - b) * (c - b) / d
    } else {
        c
    }
}

/// Ground energy from `-d ln Z / d beta` at the large-beta end of the curve.
///
/// Consecutive log-ratios converge to `E0` with corrections `~ exp(-(E1-E0) beta)`;
/// the last three are Aitken-extrapolated and the error is the change against
/// the previous window.
pub fn extract_ground_energy(curve: &TraceCurve, tol: f64) -> Result<EnergyEstimate> {
    if curve.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: curve.len() });
    }
    let e = log_ratios(curve.betas(), curve.values());
    let n = e.len();
    let (energy, error) = if n >= 4 {
        let x = aitken(e[n - 3], e[n - 2], e[n - 1]);
        let y = aitken(e[n - 4], e[n - 3], e[n - 2]);
        (x, fabs(x - y))
    } else if n == 3 {
        let x = aitken(e[0], e[1], e[2]);
        (x, fabs(x - e[2]).max(fabs(e[2] - e[1]) * 1e-3))
    } else {
        (e[1], fabs(e[1] - e[0]))
    };
    Ok(EnergyEstimate { energy, error, asymptotic: error <= tol })
}

/// One level from both extraction routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEstimate {
    pub energy: f64,
    pub error: f64,
    pub sequential: (f64, f64),
    pub prony: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitedEnergies {
    pub spectrum: Spectrum,
    pub levels: Vec<LevelEstimate>,
    /// Every level has `|sequential - prony| <= err_seq + err_prony`.
    pub routes_agree: bool,
}

/// Relative size below which a residual trace is treated as rounding noise.
const NOISE_FLOOR: f64 = 1e-9;

/// Plateau of the pairwise log-ratios over the leading points where the residual
/// stays above the noise floor: the estimate closest to both neighbours, with
/// that distance as its error.
fn plateau(betas: &[f64], residual: &[f64], totals: &[f64]) -> Option<(f64, f64)> {
    let m = residual
        .iter()
        .zip(totals)
        .position(|(r, z)| !(*r > NOISE_FLOOR * z))
        .unwrap_or(residual.len());
    let e = log_ratios(&betas[..m], &residual[..m]);
    match e.len() {
        0 => None,
        1 => Some((e[0], f64::INFINITY)),
        _ => {
            let mut best = (e[0], f64::INFINITY);
            for k in 0..e.len() {
                let spread = [k.wrapping_sub(1), k + 1]
                    .iter()
                    .filter(|&&j| j < e.len())
                    .map(|&j| fabs(e[k] - e[j]))
                    .fold(0.0, f64::max);
                if spread <= best.1 {
                    best = (e[k], spread);
                }
            }
            Some(best)
        }
    }
}

/// Peel levels one at a time assuming unit amplitudes, then refine each level
/// against the current estimates of all the others.
fn sequential(betas: &[f64], values: &[f64], n_levels: usize) -> Result<Vec<(f64, f64)>> {
    let residual = |levels: &[f64], skip: usize| -> Vec<f64> {
        betas
            .iter()
            .zip(values)
            .map(|(b, z)| {
                z - levels.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, e)| exp(-e * b)).sum::<f64>()
            })
            .collect()
    };
    let lacking = Error::InsufficientData { needed: 2, got: 1 };
    let mut levels: Vec<f64> = Vec::with_capacity(n_levels);
    for _ in 0..n_levels {
        let r = residual(&levels, usize::MAX);
        levels.push(plateau(betas, &r, values).ok_or(lacking.clone())?.0);
    }
    let mut out = alloc::vec![(0.0, 0.0); n_levels];
    for _ in 0..4 {
        for j in 0..n_levels {
            let r = residual(&levels, j);
            out[j] = plateau(betas, &r, values).ok_or(lacking.clone())?;
            levels[j] = out[j].0;
        }
    }
    Ok(out)
}

/// Linear-prediction (Prony) fit of order `p` on a uniform ladder; returns the
/// lowest `n_levels` energies, or `None` if too few decaying real roots appear.
fn prony_order(values: &[f64], step: f64, p: usize, n_levels: usize) -> Option<Vec<f64>> {
    let rows = values.len() - p;
    let a = DMatrix::from_fn(rows, p, |i, j| values[i + j]);
    let rhs = DVector::from_fn(rows, |i, _| -values[i + p]);
    let svd = a.svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let coeffs = svd.solve(&rhs, cutoff).ok()?;
    // r^p + c_(p-1) r^(p-1) + ... + c_0
    let companion = DMatrix::from_fn(p, p, |i, j| {
        if j == p - 1 {
            -coeffs[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut energies: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.re > 0.0 && z.re < 1.0 && fabs(z.im) <= 1e-8 * z.re.max(1e-300).max(fabs(z.re)))
        .map(|z| -log(z.re) / step)
        .collect();
    energies.sort_by(|x, y| x.total_cmp(y));
    if energies.len() < n_levels {
        return None;
    }
    energies.truncate(n_levels);
    Some(energies)
}

fn prony(betas: &[f64], values: &[f64], n_levels: usize) -> Option<Vec<(f64, f64)>> {
    let step = betas[1] - betas[0];
    let uniform = betas.windows(2).all(|w| fabs(w[1] - w[0] - step) <= 1e-9 * step);
    if !uniform {
        return None;
    }
    let top = (values.len() / 2).min(n_levels + 2);
    let fits: Vec<(usize, Vec<f64>)> =
        (n_levels..=top).filter_map(|p| prony_order(values, step, p, n_levels).map(|e| (p, e))).collect();
    let mut best: Option<Vec<(f64, f64)>> = None;
    let mut best_change = f64::INFINITY;
    for w in fits.windows(2) {
        if w[1].0 != w[0].0 + 1 {
            continue;
        }
        let per_level: Vec<(f64, f64)> = w[1].1.iter().zip(&w[0].1).map(|(a, b)| (*a, fabs(a - b))).collect();
        let change = per_level.iter().map(|x| x.1).fold(0.0, f64::max);
        if change < best_change {
            best_change = change;
            best = Some(per_level);
        }
    }
    best
}

/// Lowest `n_levels` energies of a non-degenerate spectrum from a trace curve.
///
/// Two routes are run: sequential peeling with plateau detection, and Prony
/// linear prediction across orders `n_levels ..= n_levels + 2` (uniform ladders
/// only, error from the change between consecutive orders). Each level reports
/// the estimate with the smaller error.
pub fn extract_excited_energies(curve: &TraceCurve, n_levels: usize) -> Result<ExcitedEnergies> {
    if n_levels == 0 {
        return Err(Error::InvalidParameter { name: "n_levels", value: 0.0 });
    }
    if curve.len() < 2 * n_levels {
        return Err(Error::InsufficientData { needed: 2 * n_levels, got: curve.len() });
    }
    let (betas, values) = (curve.betas(), curve.values());
    let seq = sequential(betas, values, n_levels)?;
    let pr = prony(betas, values, n_levels);
    let mut levels = Vec::with_capacity(n_levels);
    let mut routes_agree = pr.is_some();
    for j in 0..n_levels {
        let s = seq[j];
        let p = pr.as_ref().map(|v| v[j]);
        let (energy, error) = match p {
            Some(p) if p.1 < s.1 => p,
            _ => s,
        };
        if let Some(p) = p {
            routes_agree &= fabs(p.0 - s.0) <= p.1 + s.1;
        }
        levels.push(LevelEstimate { energy, error, sequential: s, prony: p });
    }
    let mut energies: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    energies.sort_by(|a, b| a.total_cmp(b));
    for w in energies.windows(2) {
        let gap_factor = exp(-(w[1] - w[0]) * betas[0]);
        if gap_factor > 0.99 {
            return Err(Error::IllConditioned { gap_factor });
        }
    }
    let spectrum = Spectrum::new(energies, UnitSystem::natural_susy())?;
    Ok(ExcitedEnergies { spectrum, levels, routes_agree })
}
