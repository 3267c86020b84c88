//! Exact thermal averages from a full eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::dense::symmetric_eigen;
use crate::error::{Error, Result};
use crate::models::HamiltonianSpec;

pub const MAX_ED_SITES: usize = 12;

/// Spectrum and eigenvectors of a Hamiltonian, reused across β.
#[derive(Clone, Debug)]
pub struct ThermalEd {
    n: usize,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl ThermalEd {
    pub fn new(spec: &HamiltonianSpec) -> Result<Self> {
        let n = spec.n_sites();
        if n > MAX_ED_SITES {
            return Err(Error::Capacity { what: "dense exact diagonalization", max: MAX_ED_SITES, got: n });
        }
        let (energies, vectors) = symmetric_eigen(spec.dense_matrix()?);
        Ok(Self { n, energies, vectors })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Boltzmann weights, shifted by the ground energy so large β is safe.
    pub fn weights(&self, beta: f64) -> Vec<f64> {
        let e0 = self.energies[0];
        let w: Vec<f64> = self.energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    pub fn log_partition(&self, beta: f64) -> f64 {
        let e0 = self.energies[0];
        -beta * e0 + self.energies.iter().map(|e| (-beta * (e - e0)).exp()).sum::<f64>().ln()
    }

    /// −β⁻¹ ln Z.
    pub fn free_energy(&self, beta: f64) -> f64 {
        -self.log_partition(beta) / beta
    }

    pub fn energy(&self, beta: f64) -> f64 {
        self.weights(beta).iter().zip(&self.energies).map(|(p, e)| p * e).sum()
    }

    pub fn energy_density(&self, beta: f64) -> f64 {
        self.energy(beta) / self.n as f64
    }

    pub fn entropy(&self, beta: f64) -> f64 {
        self.weights(beta).iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum()
    }

    /// β²/N² (⟨H²⟩ − ⟨H⟩²).
    pub fn specific_heat(&self, beta: f64) -> f64 {
        let p = self.weights(beta);
        let mean: f64 = p.iter().zip(&self.energies).map(|(p, e)| p * e).sum();
        let var: f64 = p.iter().zip(&self.energies).map(|(p, e)| p * (e - mean).powi(2)).sum();
        beta * beta * var / (self.n * self.n) as f64
    }

    /// e^{−βH}/Z as a dense matrix (qubit 0 most significant).
    pub fn gibbs_matrix(&self, beta: f64) -> DMatrix<f64> {
        let p = DVector::from_vec(self.weights(beta));
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| self.vectors[(r, c)] * p[c]);
        scaled * self.vectors.transpose()
    }

    /// Diagonal of the Gibbs state in the computational basis, which is all
    /// that Z-basis observables need.
    pub fn z_populations(&self, beta: f64) -> Vec<f64> {
        let p = self.weights(beta);
        (0..self.vectors.nrows())
            .map(|x| (0..p.len()).map(|n| p[n] * self.vectors[(x, n)].powi(2)).sum())
            .collect()
    }

    pub fn z_averages(&self, beta: f64) -> ZAverages {
        ZAverages::from_populations(self.n, &self.z_populations(beta))
    }
}

/// Thermal Z-basis moments of a state given by its computational-basis
/// populations.
#[derive(Clone, Debug, PartialEq)]
pub struct ZAverages {
    pub n: usize,
    /// ⟨σᶻᵢ⟩
    pub z: Vec<f64>,
    /// ⟨σᶻᵢσᶻⱼ⟩, row-major N×N
    pub zz: Vec<f64>,
    pub m: f64,
    pub m2: f64,
}

fn spin(x: usize, n: usize, i: usize) -> f64 {
    if x >> (n - 1 - i) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

impl ZAverages {
    pub fn from_populations(n: usize, pop: &[f64]) -> Self {
        let mut z = vec![0.0; n];
        let mut zz = vec![0.0; n * n];
        let (mut m, mut m2) = (0.0, 0.0);
        for (x, &p) in pop.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let s: Vec<f64> = (0..n).map(|i| spin(x, n, i)).collect();
            let mx: f64 = s.iter().sum();
            m += p * mx;
            m2 += p * mx * mx;
            for i in 0..n {
                z[i] += p * s[i];
                for j in 0..n {
                    zz[i * n + j] += p * s[i] * s[j];
                }
            }
        }
        Self { n, z, zz, m, m2 }
    }

    /// C^z_ij = ⟨σᶻᵢσᶻⱼ⟩ − ⟨σᶻᵢ⟩⟨σᶻⱼ⟩.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.zz[i * self.n + j] - self.z[i] * self.z[j]
    }

    /// β/N² (⟨M²⟩ − ⟨M⟩²).
    pub fn susceptibility(&self, beta: f64) -> f64 {
        beta * (self.m2 - self.m * self.m) / (self.n * self.n) as f64
    }

    /// β/N² Σᵢⱼ C^z_ij.
    pub fn susceptibility_from_correlations(&self, beta: f64) -> f64 {
        let n = self.n;
        let sum: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.correlation(i, j)).sum();
        beta * sum / (n * n) as f64
    }
}

pub fn dense_gibbs(spec: &HamiltonianSpec, beta: f64) -> Result<DMatrix<f64>> {
    Ok(ThermalEd::new(spec)?.gibbs_matrix(beta))
}

pub fn exact_susceptibility(spec: &HamiltonianSpec, beta: f64) -> Result<f64> {
    Ok(ThermalEd::new(spec)?.z_averages(beta).susceptibility(beta))
}

pub fn exact_specific_heat(spec: &HamiltonianSpec, beta: f64) -> Result<f64> {
    Ok(ThermalEd::new(spec)?.specific_heat(beta))
}

/// Full C^z matrix, row-major.
pub fn exact_correlations(spec: &HamiltonianSpec, beta: f64) -> Result<Vec<f64>> {
    let z = ThermalEd::new(spec)?.z_averages(beta);
    let n = z.n;
    Ok((0..n * n).map(|k| z.correlation(k / n, k % n)).collect())
}
