//! Percentile bootstrap over Gaussian summaries or multinomial counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const MIN_RESAMPLES: usize = 100;

/// Input to a bootstrap run.
#[derive(Clone, Debug, PartialEq)]
pub enum BootstrapData {
    /// `(μ, σ)` per measured quantity; each resample draws from N(μ, σ²).
    Summaries(Vec<(f64, f64)>),
    /// One histogram per measured quantity; each resample redraws the same
    /// number of shots from the empirical frequencies.
    Counts(Vec<Vec<u64>>),
}

/// What the estimator sees for one resample.
#[derive(Clone, Copy, Debug)]
pub enum Resampled<'a> {
    Values(&'a [f64]),
    Counts(&'a [Vec<u64>]),
}

impl<'a> Resampled<'a> {
    pub fn values(self) -> Result<&'a [f64]> {
        match self {
            Resampled::Values(v) => Ok(v),
            Resampled::Counts(_) => arg("estimator expected summary values"),
        }
    }

    pub fn counts(self) -> Result<&'a [Vec<u64>]> {
        match self {
            Resampled::Counts(c) => Ok(c),
            Resampled::Values(_) => arg("estimator expected counts"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub ci_low: f64,
    pub ci_high: f64,
    /// Standard deviation of the replicate estimates.
    pub stderr: f64,
}

/// Draws a multinomial sample of the same size as `counts`.
pub fn resample_counts<R: Rng + ?Sized>(counts: &[u64], rng: &mut R) -> Vec<u64> {
    let mut left: u64 = counts.iter().sum();
    let mut mass = left as f64;
    let mut out = vec![0; counts.len()];
    for (o, &c) in out.iter_mut().zip(counts) {
        if left == 0 || c == 0 {
            mass -= c as f64;
            continue;
        }
        let p = (c as f64 / mass).min(1.0);
        let k = if p >= 1.0 { left } else { Binomial::new(left, p).map(|b| b.sample(rng)).unwrap_or(0) };
        *o = k;
        left -= k;
        mass -= c as f64;
    }
    out
}

/// Sample quantile with linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Re-runs `estimator` on `n_resamples` resampled data sets and returns the
/// 2.5/97.5 percentiles of the replicates. Resample `r` uses its own ChaCha
/// stream, so the result does not depend on the thread count.
pub fn bootstrap_ci<F>(estimator: F, data: &BootstrapData, n_resamples: usize, seed: u64) -> Result<BootstrapResult>
where
    F: Fn(Resampled) -> Result<f64> + Sync,
{
    if n_resamples < MIN_RESAMPLES {
        return arg(format!("bootstrap needs at least {MIN_RESAMPLES} resamples, got {n_resamples}"));
    }
    if let BootstrapData::Summaries(s) = data {
        if s.iter().any(|(m, sd)| !m.is_finite() || !sd.is_finite() || *sd < 0.0) {
            return Err(Error::NumericInput("bootstrap summaries must be finite with σ ≥ 0".into()));
        }
    }
    let mut reps = (0..n_resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            match data {
                BootstrapData::Summaries(s) => {
                    let v: Vec<f64> = s
                        .iter()
                        .map(|&(m, sd)| {
                            let z: f64 = rng.sample(StandardNormal);
                            m + sd * z
                        })
                        .collect();
                    estimator(Resampled::Values(&v))
                }
                BootstrapData::Counts(c) => {
                    let v: Vec<Vec<u64>> = c.iter().map(|h| resample_counts(h, &mut rng)).collect();
                    estimator(Resampled::Counts(&v))
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    if reps.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("bootstrap replicate is not finite".into()));
    }
    let mean = reps.iter().sum::<f64>() / reps.len() as f64;
    let var = reps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
    reps.sort_by(f64::total_cmp);
    Ok(BootstrapResult { ci_low: percentile(&reps, 0.025), ci_high: percentile(&reps, 0.975), stderr: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::Normal;

    fn mean_of(r: Resampled) -> Result<f64> {
        let v = r.values()?;
        Ok(v.iter().sum::<f64>() / v.len() as f64)
    }

    #[test]
    fn zero_variance_collapses() {
        let d = BootstrapData::Summaries(vec![(1.5, 0.0), (2.5, 0.0)]);
        let r = bootstrap_ci(mean_of, &d, 200, 3).unwrap();
        assert_eq!((r.ci_low, r.ci_high), (2.0, 2.0));
        let d = BootstrapData::Counts(vec![vec![0, 7, 0]]);
        let r = bootstrap_ci(|c| Ok(c.counts()?[0][1] as f64), &d, 100, 3).unwrap();
        assert_eq!((r.ci_low, r.ci_high), (7.0, 7.0));
    }

    #[test]
    fn deterministic_and_checked() {
        let d = BootstrapData::Summaries(vec![(0.0, 1.0)]);
        assert_eq!(bootstrap_ci(mean_of, &d, 500, 9).unwrap(), bootstrap_ci(mean_of, &d, 500, 9).unwrap());
        assert!(bootstrap_ci(mean_of, &d, 99, 9).is_err());
    }

    #[test]
    fn multinomial_preserves_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let r = resample_counts(&[5, 0, 17, 3, 1000], &mut rng);
            assert_eq!(r.iter().sum::<u64>(), 1025);
            assert_eq!(r[1], 0);
        }
    }

    // Gaussian data of size n, bootstrapped by resampling the raw values as
    // a histogram with unit counts.
    fn raw_width(n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
        let d = BootstrapData::Counts(vec![vec![1; n]]);
        let est = |r: Resampled| -> Result<f64> {
            let c = &r.counts()?[0];
            Ok(c.iter().zip(&xs).map(|(&k, x)| k as f64 * x).sum::<f64>() / n as f64)
        };
        let r = bootstrap_ci(est, &d, 1000, seed).unwrap();
        r.ci_high - r.ci_low
    }

    #[test]
    fn width_scales_as_inverse_sqrt_n() {
        let ratio = raw_width(400, 5) / raw_width(1600, 6);
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn coverage() {
        // mean of n Gaussian draws with known σ/√n summary
        let (n, trials) = (50, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let normal = Normal::new(1.0, 2.0).unwrap();
        let mut hits = 0;
        for t in 0..trials {
            let xs: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let s = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            let d = BootstrapData::Summaries(vec![(m, s / (n as f64).sqrt())]);
            let r = bootstrap_ci(mean_of, &d, 1000, t).unwrap();
            if r.ci_low <= 1.0 && 1.0 <= r.ci_high {
                hits += 1;
            }
        }
        let cov = hits as f64 / trials as f64;
        assert!((cov - 0.95).abs() <= 0.05, "coverage {cov}");
    }
}
