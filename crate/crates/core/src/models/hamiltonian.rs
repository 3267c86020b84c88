use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use super::mpo_compile;
use crate::error::{arg, Error, Result};
use crate::tensornet::Mpo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Real coefficient times a Pauli string on one or two distinct sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub ops: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    pub fn new(coeff: f64, mut ops: Vec<(usize, Pauli)>) -> Result<Self> {
        ops.sort();
        match ops.as_slice() {
            [_] => {}
            [(a, _), (b, _)] if a != b => {}
            _ => return arg(format!("Pauli term must touch 1 or 2 distinct sites: {ops:?}")),
        }
        if !coeff.is_finite() {
            return Err(Error::NumericInput(format!("term coefficient {coeff}")));
        }
        Ok(Self { coeff, ops })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// −J Σ ZZ − h Σ X
    Tfim { j: f64, h: f64 },
    /// −J Σ (XX + YY + Δ ZZ)
    Xxz { j: f64, delta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: ModelKind,
    pub lattice: Lattice,
    terms: Vec<PauliTerm>,
}

pub fn tfim(lattice: Lattice, j: f64, h: f64) -> HamiltonianSpec {
    let mut terms: Vec<PauliTerm> = lattice
        .bonds()
        .into_iter()
        .map(|(a, b)| PauliTerm { coeff: -j, ops: vec![(a, Pauli::Z), (b, Pauli::Z)] })
        .collect();
    terms.extend((0..lattice.n_sites()).map(|i| PauliTerm { coeff: -h, ops: vec![(i, Pauli::X)] }));
    HamiltonianSpec { kind: ModelKind::Tfim { j, h }, lattice, terms }
}

pub fn xxz(lattice: Lattice, j: f64, delta: f64) -> Result<HamiltonianSpec> {
    if !lattice.is_chain() {
        return arg("the XXZ model is defined on chains only");
    }
    let mut terms = Vec::new();
    for (a, b) in lattice.bonds() {
        for (p, c) in [(Pauli::X, -j), (Pauli::Y, -j), (Pauli::Z, -j * delta)] {
            terms.push(PauliTerm { coeff: c, ops: vec![(a, p), (b, p)] });
        }
    }
    Ok(HamiltonianSpec { kind: ModelKind::Xxz { j, delta }, lattice, terms })
}

impl HamiltonianSpec {
    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_tfim(&self) -> bool {
        matches!(self.kind, ModelKind::Tfim { .. })
    }

    /// Every term is a non-identity Pauli string, so the trace vanishes.
    pub fn is_traceless(&self) -> bool {
        self.terms.iter().all(|t| !t.ops.is_empty())
    }

    /// Σ|c| — an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// Σ c² = Tr(H²)/2^N for a sum of distinct Pauli strings.
    pub fn sum_sq_coeffs(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.coeff).sum()
    }

    /// MPO on `n_total` chain sites; site `i` sits at chain position
    /// `layout[i]` and unused positions carry the identity.
    pub fn to_mpo(&self, layout: &[usize], n_total: usize) -> Result<Mpo> {
        mpo_compile::compile(self, layout, n_total)
    }

    /// Dense real matrix with site `i` on qubit `layout[i]` (qubit 0 most
    /// significant). Terms with an odd number of Y factors are rejected since
    /// they would make the matrix complex.
    pub fn dense_matrix_with_layout(&self, layout: &[usize]) -> Result<DMatrix<f64>> {
        let n = self.n_sites();
        if n > 14 {
            return Err(Error::Capacity { what: "dense Hamiltonian", max: 14, got: n });
        }
        check_layout(layout, n, n)?;
        let dim = 1usize << n;
        let mut h = DMatrix::zeros(dim, dim);
        for term in &self.terms {
            let ny = term.ops.iter().filter(|(_, p)| *p == Pauli::Y).count();
            if ny % 2 == 1 {
                return arg("complex Pauli strings are not supported");
            }
            for col in 0..dim {
                let mut row = col;
                // phase as i^k times a sign
                let mut ipow = 0usize;
                let mut sign = 1.0;
                for &(site, p) in &term.ops {
                    let bit = 1usize << (n - 1 - layout[site]);
                    let set = col & bit != 0;
                    match p {
                        Pauli::X => row ^= bit,
                        Pauli::Y => {
                            row ^= bit;
                            ipow += 1;
                            if set {
                                sign = -sign;
                            }
                        }
                        Pauli::Z => {
                            if set {
                                sign = -sign;
                            }
                        }
                    }
                }
                // i^2 = -1 for the (even) number of Y factors
                if ipow % 4 == 2 {
                    sign = -sign;
                }
                h[(row, col)] += term.coeff * sign;
            }
        }
        Ok(h)
    }

    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        let id: Vec<usize> = (0..self.n_sites()).collect();
        self.dense_matrix_with_layout(&id)
    }
}

pub(crate) fn check_layout(layout: &[usize], n_sites: usize, n_total: usize) -> Result<()> {
    if layout.len() != n_sites {
        return arg(format!("layout has {} entries for {n_sites} sites", layout.len()));
    }
    let mut seen = vec![false; n_total];
    for &p in layout {
        if p >= n_total || std::mem::replace(&mut seen[p], true) {
            return arg(format!("layout {layout:?} is not injective into {n_total} positions"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::symmetric_eigen;

    #[test]
    fn tfim_term_counts() {
        let h = tfim(Lattice::chain(4).unwrap(), 1.0, 0.5);
        let zz: Vec<_> = h.terms().iter().filter(|t| t.ops.len() == 2).collect();
        let x: Vec<_> = h.terms().iter().filter(|t| t.ops.len() == 1).collect();
        assert_eq!((zz.len(), x.len()), (3, 4));
        assert!(zz.iter().all(|t| t.coeff == -1.0));
        assert!(x.iter().all(|t| t.coeff == -0.5));
        let g = tfim(Lattice::grid(2, 2).unwrap(), 1.0, 0.5);
        assert_eq!(g.terms().len(), 8);
    }

    #[test]
    fn xxz_terms_and_chain_only() {
        let h = xxz(Lattice::chain(4).unwrap(), 1.0, -1.5).unwrap();
        assert_eq!(h.terms().len(), 9);
        for t in h.terms() {
            let expected = if t.ops[0].1 == Pauli::Z { 1.5 } else { -1.0 };
            assert_eq!(t.coeff, expected);
        }
        assert!(xxz(Lattice::grid(2, 2).unwrap(), 1.0, 1.0).is_err());
    }

    #[test]
    fn two_site_tfim_ground_energy() {
        // Oracle: closed-form eigenvalues of -J ZZ - h(X1 + X2) are
        // ±sqrt(J² + 4h²) and ±J; the ground energy is -sqrt(J² + 4h²).
        let (j, h) = (1.0, 0.5);
        let m = tfim(Lattice::chain(2).unwrap(), j, h).dense_matrix().unwrap();
        let (vals, _) = symmetric_eigen(m);
        assert!((vals[0] + (j * j + 4.0 * h * h).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn xy_dimer_spectrum() {
        let m = xxz(Lattice::chain(2).unwrap(), 1.0, 0.0).unwrap().dense_matrix().unwrap();
        let (vals, _) = symmetric_eigen(m);
        let expected = [-2.0, 0.0, 0.0, 2.0];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn traceless_and_symmetric() {
        for h in [
            tfim(Lattice::chain(5).unwrap(), 1.0, 0.7),
            tfim(Lattice::grid(2, 3).unwrap(), 0.8, 0.3),
            xxz(Lattice::chain(5).unwrap(), 1.0, -1.5).unwrap(),
        ] {
            assert!(h.is_traceless());
            let m = h.dense_matrix().unwrap();
            assert!(m.trace().abs() < 1e-12);
            assert!((&m - m.transpose()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn tfim_commutes_with_global_spin_flip() {
        let h = tfim(Lattice::chain(6).unwrap(), 1.0, 0.5).dense_matrix().unwrap();
        // ∏X maps basis index k to its bitwise complement
        let dim = h.nrows();
        let p = DMatrix::from_fn(dim, dim, |r, c| if r == (dim - 1) ^ c { 1.0 } else { 0.0 });
        let comm = &h * &p - &p * &h;
        assert!(comm.abs().max() < 1e-12);
    }
}
