//! Zero-noise extrapolation over folded noise factors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_ci, BootstrapData, Resampled};
use crate::error::{arg, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    /// y = a + b·e^{−cλ}, c ≥ 0
    Exponential,
    /// y = a + bλ
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneEstimate {
    pub noise_factors: Vec<f64>,
    pub raw_values: Vec<f64>,
    pub raw_stderr: Vec<f64>,
    pub extrapolated: f64,
    /// The fit actually used, after any fallback.
    pub fit_kind: FitKind,
    pub ci_low: f64,
    pub ci_high: f64,
}

const C_INIT: f64 = 0.2;
const C_MAX: f64 = 20.0;
const C_MIN: f64 = 1e-6;

/// Least-squares (a, b) for fixed c and the residual sum of squares.
fn linear_in_c(lam: &[f64], y: &[f64], c: f64) -> Option<(f64, f64, f64)> {
    let a = DMatrix::from_fn(lam.len(), 2, |i, k| if k == 0 { 1.0 } else { (-c * lam[i]).exp() });
    let sol = a.clone().svd(true, true).solve(&DVector::from_column_slice(y), 1e-12).ok()?;
    let r = &a * &sol - DVector::from_column_slice(y);
    Some((sol[0], sol[1], r.norm_squared()))
}

fn line(lam: &[f64], y: &[f64]) -> Result<f64> {
    let n = lam.len() as f64;
    let (mx, my) = (lam.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = lam.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(Error::ExtrapolationFailed("linear fit is singular".into()));
    }
    let slope = lam.iter().zip(y).map(|(x, v)| (x - mx) * (v - my)).sum::<f64>() / sxx;
    let a = my - slope * mx;
    if !a.is_finite() {
        return Err(Error::ExtrapolationFailed("linear fit is not finite".into()));
    }
    Ok(a)
}

/// Minimizes the projected residual over c ≥ 0: coarse log grid seeded at
/// c₀, golden-section refinement, then Gauss–Newton polish on (a, b, c).
fn exponential(lam: &[f64], y: &[f64]) -> Option<f64> {
    let rss = |c: f64| linear_in_c(lam, y, c).map(|t| t.2).unwrap_or(f64::INFINITY);
    let mut grid: Vec<f64> = (0..=60).map(|k| C_MIN * (C_MAX / C_MIN).powf(k as f64 / 60.0)).collect();
    grid.push(C_INIT);
    grid.sort_by(f64::total_cmp);
    let vals: Vec<f64> = grid.iter().map(|&c| rss(c)).collect();
    let k = (0..grid.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b]))?;
    if k == 0 || k == grid.len() - 1 {
        return None;
    }
    let (mut lo, mut hi) = (grid[k - 1].ln(), grid[k + 1].ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (rss(x1.exp()), rss(x2.exp()));
    for _ in 0..200 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = rss(x1.exp());
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = rss(x2.exp());
        }
    }
    let mut c = (0.5 * (lo + hi)).exp();
    let (mut a, mut b, mut best) = linear_in_c(lam, y, c)?;
    for _ in 0..50 {
        let r = DVector::from_iterator(lam.len(), lam.iter().zip(y).map(|(&l, &v)| a + b * (-c * l).exp() - v));
        let jac = DMatrix::from_fn(lam.len(), 3, |i, k| {
            let e = (-c * lam[i]).exp();
            [1.0, e, -b * lam[i] * e][k]
        });
        let Ok(step) = jac.clone().svd(true, true).solve(&(-r), 1e-14) else { break };
        let (na, nb, nc) = (a + step[0], b + step[1], (c + step[2]).max(C_MIN));
        let nr: f64 = lam.iter().zip(y).map(|(&l, &v)| (na + nb * (-nc * l).exp() - v).powi(2)).sum();
        if !(nr < best) {
            break;
        }
        (a, b, c, best) = (na, nb, nc, nr);
    }
    let y0 = a + b;
    y0.is_finite().then_some(y0)
}

/// Fits the noise-factor series and returns y(0) and the fit used.
pub fn zne_fit(lambdas: &[f64], values: &[f64], fit: FitKind) -> Result<(f64, FitKind)> {
    if lambdas.len() != values.len() {
        return arg("noise factors and values differ in length");
    }
    if lambdas.len() < 2 {
        return arg("extrapolation needs at least two noise factors");
    }
    if lambdas.iter().any(|&l| !(l >= 1.0) || !l.is_finite()) {
        return arg(format!("noise factors must be ≥ 1: {lambdas:?}"));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return arg(format!("noise factors must be distinct: {lambdas:?}"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::ExtrapolationFailed("non-finite measured value".into()));
    }
    if fit == FitKind::Exponential && lambdas.len() >= 3 {
        let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread == 0.0 {
            return Ok((values[0], FitKind::Exponential));
        }
        if let Some(y0) = exponential(lambdas, values) {
            return Ok((y0, FitKind::Exponential));
        }
    }
    Ok((line(lambdas, values)?, FitKind::Linear))
}

/// Fits `(λ, value, stderr)` points and attaches a bootstrap CI obtained by
/// redrawing each value from N(value, stderr²) and refitting.
pub fn zne_extrapolate(points: &[(f64, f64, f64)], fit: FitKind, n_resamples: usize, seed: u64) -> Result<ZneEstimate> {
    let lam: Vec<f64> = points.iter().map(|p| p.0).collect();
    let raw: Vec<f64> = points.iter().map(|p| p.1).collect();
    let err: Vec<f64> = points.iter().map(|p| p.2).collect();
    let (extrapolated, fit_kind) = zne_fit(&lam, &raw, fit)?;
    let data = BootstrapData::Summaries(raw.iter().cloned().zip(err.iter().cloned()).collect());
    let ci = bootstrap_ci(|r: Resampled| Ok(zne_fit(&lam, r.values()?, fit)?.0), &data, n_resamples, seed)?;
    Ok(ZneEstimate {
        noise_factors: lam,
        raw_values: raw,
        raw_stderr: err,
        extrapolated,
        fit_kind,
        ci_low: ci.ci_low,
        ci_high: ci.ci_high,
    })
}
