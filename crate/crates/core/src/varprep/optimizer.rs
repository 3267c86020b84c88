//! Derivative-free minimizers.
//!
//! `cobyla_minimize` follows Powell's COBYLA without constraints: a linear
//! model is interpolated on a simplex of n+1 points and steps go to the
//! boundary of a trust region. As in the modern reference implementation the
//! trust radius Δ is kept apart from the resolution ρ: Δ grows after good
//! steps and shrinks after bad ones, while ρ only halves once steps of length
//! ρ fail on a well-poised simplex. The best point is always the pivot.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimizerKind {
    Cobyla,
    NelderMead,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub kind: OptimizerKind,
    pub max_iter: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { kind: OptimizerKind::Cobyla, max_iter: 10_000, rho_begin: 0.5, rho_end: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    /// Objective evaluations used.
    pub iterations: usize,
    /// `(evaluation, best f so far)` each time the best value improved.
    pub trace: Vec<(usize, f64)>,
}

pub fn minimize<F>(settings: &OptimizerSettings, f: F, x0: &[f64]) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    match settings.kind {
        OptimizerKind::Cobyla => cobyla_minimize(f, x0, settings.max_iter, settings.rho_begin, settings.rho_end),
        OptimizerKind::NelderMead => {
            nelder_mead_minimize(f, x0, settings.max_iter, settings.rho_begin, settings.rho_end)
        }
    }
}

/// Counts evaluations, rejects non-finite values and keeps the trace.
struct Counted<F> {
    f: F,
    evals: usize,
    best: f64,
    trace: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Counted<F> {
    fn new(f: F) -> Self {
        Self { f, evals: 0, best: f64::INFINITY, trace: Vec::new() }
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::OptimizerAborted(format!(
                "objective returned {v} at evaluation {} (x = {x:?})",
                self.evals
            )));
        }
        if v < self.best {
            self.best = v;
            self.trace.push((self.evals, v));
        }
        Ok(v)
    }
}

fn check_inputs(x0: &[f64], max_iter: usize, rho_begin: f64, rho_end: f64) -> Result<()> {
    if x0.is_empty() {
        return arg("cannot optimize over zero parameters");
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericInput(format!("starting point {x0:?}")));
    }
    if max_iter < x0.len() + 2 {
        return arg(format!("max_iter {max_iter} must be at least dimension + 2 = {}", x0.len() + 2));
    }
    if !(rho_begin > rho_end && rho_end > 0.0) {
        return arg(format!("need rho_begin > rho_end > 0, got {rho_begin} and {rho_end}"));
    }
    Ok(())
}

const PARSIG_FACTOR: f64 = 0.25;
const PARETA_FACTOR: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

pub fn cobyla_minimize<F>(f: F, x0: &[f64], max_iter: usize, rho_begin: f64, rho_end: f64) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    check_inputs(x0, max_iter, rho_begin, rho_end)?;
    let n = x0.len();
    let mut obj = Counted::new(f);
    let mut rho = rho_begin;

    let mut base = DVector::from_column_slice(x0);
    let mut f0 = obj.eval(base.as_slice())?;
    // rows are vertex displacements from the pivot
    let mut sim = DMatrix::<f64>::identity(n, n) * rho;
    let mut fv = vec![0.0; n];
    for j in 0..n {
        let x = &base + sim.row(j).transpose();
        fv[j] = obj.eval(x.as_slice())?;
    }

    // Δ is the trust radius for steps; ρ is the resolution, reduced only
    // when steps of length ρ fail on a well-poised simplex
    let mut delta = rho;
    let mut geometry_next = false;
    loop {
        if obj.evals >= max_iter {
            break;
        }
        // keep the best vertex as pivot
        let best = (0..n).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).unwrap();
        if fv[best] < f0 {
            let dj = sim.row(best).clone_owned();
            base += dj.transpose();
            for i in 0..n {
                if i != best {
                    let row = sim.row(i) - &dj;
                    sim.set_row(i, &row);
                }
            }
            sim.set_row(best, &(-dj));
            std::mem::swap(&mut fv[best], &mut f0);
        }

        // columns of `simi` are the dual vectors w_j, with d_i · w_j = δ_ij
        let simi = sim
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::OptimizerAborted("interpolation simplex became singular".into()))?;
        let vsig: Vec<f64> = (0..n).map(|j| 1.0 / simi.column(j).norm()).collect();
        let veta: Vec<f64> = (0..n).map(|j| sim.row(j).norm()).collect();
        let parsig = PARSIG_FACTOR * delta;
        let pareta = PARETA_FACTOR * delta;
        let acceptable = vsig.iter().all(|&s| s >= parsig) && veta.iter().all(|&e| e <= pareta);

        let df = DVector::from_iterator(n, fv.iter().map(|v| v - f0));
        let g = &simi * df;

        if geometry_next && !acceptable {
            geometry_next = false;
            // drop the vertex that is farthest away, or else the one closest
            // to the opposite face
            let jdrop = match (0..n).filter(|&j| veta[j] > pareta).max_by(|&a, &b| veta[a].total_cmp(&veta[b])) {
                Some(j) => j,
                None => (0..n).filter(|&j| vsig[j] < parsig).min_by(|&a, &b| vsig[a].total_cmp(&vsig[b])).unwrap(),
            };
            let w = simi.column(jdrop);
            let mut d = w * (GAMMA * delta * vsig[jdrop]);
            if g.dot(&d) > 0.0 {
                d = -d;
            }
            let x = &base + &d;
            fv[jdrop] = obj.eval(x.as_slice())?;
            sim.set_row(jdrop, &d.transpose());
            continue;
        }
        geometry_next = false;

        let gnorm = g.norm();
        let step_radius = delta;
        let mut ratio = -1.0;
        if gnorm > 0.0 && gnorm.is_finite() {
            let d = &g * (-delta / gnorm);
            let prerem = delta * gnorm;
            let x = &base + &d;
            let fnew = obj.eval(x.as_slice())?;
            let trured = f0 - fnew;
            ratio = trured / prerem;

            // choose which vertex the trial point replaces
            let mut best_t = if trured <= 0.0 { 1.0 } else { 0.0 };
            let mut jdrop = None;
            let mut sigbar = vec![0.0; n];
            for j in 0..n {
                let t = d.dot(&simi.column(j)).abs();
                if t > best_t {
                    jdrop = Some(j);
                    best_t = t;
                }
                sigbar[j] = t * vsig[j];
            }
            let mut edgmax = DELTA * delta;
            let mut far = None;
            for j in 0..n {
                if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                    let t = if trured > 0.0 { (&d - sim.row(j).transpose()).norm() } else { veta[j] };
                    if t > edgmax {
                        far = Some(j);
                        edgmax = t;
                    }
                }
            }
            if let Some(j) = far.or(jdrop) {
                sim.set_row(j, &d.transpose());
                fv[j] = fnew;
            }
        }

        delta = if ratio <= 0.1 {
            0.5 * step_radius
        } else if ratio <= 0.7 {
            (0.5 * delta).max(step_radius)
        } else {
            (0.5 * delta).max(2.0 * step_radius)
        };
        if delta <= 1.5 * rho {
            delta = rho;
        }
        if ratio > 0.1 {
            continue;
        }
        if !acceptable {
            geometry_next = true;
            continue;
        }
        if step_radius <= rho {
            if rho <= rho_end {
                break;
            }
            let old = rho;
            rho *= 0.5;
            if rho <= 1.5 * rho_end {
                rho = rho_end;
            }
            delta = (0.5 * old).max(rho);
        }
    }

    let best = (0..n).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).unwrap();
    let (x, fmin) = if fv[best] < f0 { (&base + sim.row(best).transpose(), fv[best]) } else { (base, f0) };
    Ok(Minimum { x: x.as_slice().to_vec(), f: fmin, iterations: obj.evals, trace: obj.trace })
}

/// Nelder–Mead with the standard coefficients. The initial simplex has edge
/// `rho_begin`; it stops once the simplex diameter falls below `rho_end`.
pub fn nelder_mead_minimize<F>(f: F, x0: &[f64], max_iter: usize, rho_begin: f64, rho_end: f64) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    check_inputs(x0, max_iter, rho_begin, rho_end)?;
    let n = x0.len();
    let mut obj = Counted::new(f);
    let mut pts: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
    pts.push(DVector::from_column_slice(x0));
    for j in 0..n {
        let mut p = pts[0].clone();
        p[j] += rho_begin;
        pts.push(p);
    }
    let mut fv = Vec::with_capacity(n + 1);
    for p in &pts {
        fv.push(obj.eval(p.as_slice())?);
    }
    let mut order: Vec<usize> = (0..=n).collect();
    while obj.evals < max_iter {
        order.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        let (lo, hi, second) = (order[0], order[n], order[n - 1]);
        let diameter = pts.iter().map(|p| (p - &pts[lo]).amax()).fold(0.0, f64::max);
        if diameter <= rho_end {
            break;
        }
        let centroid = order[..n].iter().fold(DVector::zeros(n), |acc, &i| acc + &pts[i]) / n as f64;
        let xr = &centroid + (&centroid - &pts[hi]);
        let fr = obj.eval(xr.as_slice())?;
        if fr < fv[lo] {
            let xe = &centroid + (&xr - &centroid) * 2.0;
            let fe = obj.eval(xe.as_slice())?;
            (pts[hi], fv[hi]) = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < fv[second] {
            (pts[hi], fv[hi]) = (xr, fr);
        } else {
            let (xc, fc) = if fr < fv[hi] {
                let xc = &centroid + (&xr - &centroid) * 0.5;
                let fc = obj.eval(xc.as_slice())?;
                (xc, fc)
            } else {
                let xc = &centroid + (&pts[hi] - &centroid) * 0.5;
                let fc = obj.eval(xc.as_slice())?;
                (xc, fc)
            };
            if fc < fv[hi].min(fr) {
                (pts[hi], fv[hi]) = (xc, fc);
            } else {
                for &i in &order[1..] {
                    pts[i] = &pts[lo] + (&pts[i] - &pts[lo]) * 0.5;
                    fv[i] = obj.eval(pts[i].as_slice())?;
                }
            }
        }
    }
    let lo = (0..=n).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).unwrap();
    Ok(Minimum { x: pts[lo].as_slice().to_vec(), f: fv[lo], iterations: obj.evals, trace: obj.trace })
}
