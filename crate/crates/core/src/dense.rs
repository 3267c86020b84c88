//! Dense state-vector and density-matrix helpers.
//!
//! These back the small-system oracles and are deliberately independent of
//! the MPS code path: gates act directly on 2^n amplitude vectors, qubit 0
//! being the most significant bit of the basis index.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{arg, Error, Result};
use crate::tensornet::Tensor;

pub const MAX_DENSE_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<C64>,
}

impl DenseState {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity { what: "dense state vector", max: MAX_DENSE_QUBITS, got: n });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 {
            return arg("amplitude vector length must be a power of two");
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, m: &Tensor, q: usize) -> Result<()> {
        if q >= self.n || m.shape() != [2, 2] {
            return arg(format!("bad one-qubit application on {q}"));
        }
        let b = self.bit(q);
        let g = [m.get(&[0, 0]), m.get(&[0, 1]), m.get(&[1, 0]), m.get(&[1, 1])];
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = g[0] * a0 + g[1] * a1;
                self.amps[i | b] = g[2] * a0 + g[3] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 matrix in the basis |q0 q1⟩ (q0 most significant) to any
    /// pair of distinct qubits.
    pub fn apply_2q(&mut self, m: &Tensor, q0: usize, q1: usize) -> Result<()> {
        if q0 >= self.n || q1 >= self.n || q0 == q1 || m.shape() != [4, 4] {
            return arg(format!("bad two-qubit application on ({q0}, {q1})"));
        }
        let (b0, b1) = (self.bit(q0), self.bit(q1));
        for i in 0..self.amps.len() {
            if i & b0 == 0 && i & b1 == 0 {
                let idx = [i, i | b1, i | b0, i | b0 | b1];
                let a: Vec<C64> = idx.iter().map(|&k| self.amps[k]).collect();
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| m.get(&[r, c]) * a[c]).sum();
                }
            }
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |⟨self|other⟩|.
    pub fn overlap_abs(&self, other: &[C64]) -> f64 {
        self.amps.iter().zip(other).map(|(a, b)| a.conj() * b).sum::<C64>().norm()
    }

    /// Reduced density matrix of the first `n_keep` qubits.
    pub fn reduced_density_matrix(&self, n_keep: usize) -> Result<DMatrix<C64>> {
        reduced_density_matrix(&self.amps, self.n, n_keep)
    }
}

/// ρ = Tr_rest |ψ⟩⟨ψ| keeping the leading `n_keep` qubits.
pub fn reduced_density_matrix(psi: &[C64], n: usize, n_keep: usize) -> Result<DMatrix<C64>> {
    if n_keep == 0 || n_keep > n || psi.len() != 1 << n {
        return arg("invalid reduced density matrix request");
    }
    let rows = 1 << n_keep;
    let cols = 1 << (n - n_keep);
    let m = DMatrix::from_row_slice(rows, cols, psi);
    Ok(&m * m.adjoint())
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Real symmetric eigen-decomposition, eigenvalues ascending.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// −Tr ρ ln ρ with 0·ln 0 = 0.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> f64 {
    let (vals, _) = hermitian_eigen(rho);
    vals.iter().filter(|&&p| p > 1e-300).map(|&p| -p * p.ln()).sum::<f64>().max(0.0)
}

/// Tr(ρ O) for a real observable.
pub fn trace_product(rho: &DMatrix<C64>, op: &DMatrix<f64>) -> C64 {
    let n = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += rho[(i, k)] * op[(k, i)];
        }
    }
    acc
}

/// Dense unitary of a gate sequence, built column by column.
pub fn circuit_unitary(n: usize, gates: &[(Vec<usize>, Tensor)]) -> Result<DMatrix<C64>> {
    if n > 12 {
        return Err(Error::Capacity { what: "dense circuit unitary", max: 12, got: n });
    }
    let dim = 1 << n;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[col] = C64::new(1.0, 0.0);
        let mut s = DenseState::from_amplitudes(amps)?;
        for (sites, m) in gates {
            match sites.as_slice() {
                [q] => s.apply_1q(m, *q)?,
                [a, b] => s.apply_2q(m, *a, *b)?,
                _ => return arg("gate must act on one or two qubits"),
            }
        }
        for (row, a) in s.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}
