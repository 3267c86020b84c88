//! Open-boundary matrix product states.
//!
//! Site tensors have shape `[left_bond, 2, right_bond]`; site 0 is the most
//! significant qubit when the state is flattened to a dense vector. The state
//! is kept in mixed canonical form around `canonical_center` whenever one is
//! set: tensors to the left are left-isometric, tensors to the right are
//! right-isometric.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::mpo::Mpo;
use super::tensor::{svd_truncated, Tensor};
use crate::error::{arg, Error, Result};

pub const DEFAULT_CHI_MAX: usize = 128;
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-12;
/// Schmidt values below this are dropped before taking logarithms.
const SCHMIDT_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct MpsState {
    sites: Vec<Tensor>,
    chi_max: usize,
    svd_cutoff: f64,
    canonical_center: Option<usize>,
    discarded_weight: f64,
}

impl MpsState {
    /// Product state from a bit string, `'0'` = |0⟩ (σᶻ = +1).
    pub fn from_product_state(bits: &str) -> Result<Self> {
        if bits.is_empty() {
            return arg("product state needs at least one bit");
        }
        let sites = bits
            .chars()
            .map(|c| {
                let amp = match c {
                    '0' => [1.0, 0.0],
                    '1' => [0.0, 1.0],
                    other => return arg(format!("invalid bit {other:?}")),
                };
                Tensor::from_real(&[1, 2, 1], &amp)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sites,
            chi_max: DEFAULT_CHI_MAX,
            svd_cutoff: DEFAULT_SVD_CUTOFF,
            // product states are trivially canonical everywhere
            canonical_center: Some(0),
            discarded_weight: 0.0,
        })
    }

    /// |0…0⟩ on `n` sites.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_product_state(&"0".repeat(n))
    }

    pub fn with_truncation(mut self, chi_max: usize, svd_cutoff: f64) -> Result<Self> {
        if chi_max == 0 || !(svd_cutoff >= 0.0) {
            return arg(format!("invalid truncation chi_max={chi_max} cutoff={svd_cutoff}"));
        }
        self.chi_max = chi_max;
        self.svd_cutoff = svd_cutoff;
        Ok(self)
    }

    /// Builds an MPS from raw site tensors. The result has no canonical center.
    pub fn from_site_tensors(sites: Vec<Tensor>) -> Result<Self> {
        if sites.is_empty() {
            return arg("MPS needs at least one site");
        }
        for (i, t) in sites.iter().enumerate() {
            if t.rank() != 3 || t.shape()[1] != 2 {
                return arg(format!("site {i} has shape {:?}, expected [l, 2, r]", t.shape()));
            }
            if i > 0 && sites[i - 1].shape()[2] != t.shape()[0] {
                return arg(format!("bond mismatch between sites {} and {i}", i - 1));
            }
        }
        if sites[0].shape()[0] != 1 || sites[sites.len() - 1].shape()[2] != 1 {
            return arg("boundary bonds must have dimension 1");
        }
        Ok(Self {
            sites,
            chi_max: DEFAULT_CHI_MAX,
            svd_cutoff: DEFAULT_SVD_CUTOFF,
            canonical_center: None,
            discarded_weight: 0.0,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn site(&self, i: usize) -> &Tensor {
        &self.sites[i]
    }

    /// Bond dimensions for every cut including the two boundary bonds, so the
    /// result has `n_sites + 1` entries.
    pub fn bond_dims(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.sites.iter().map(|t| t.shape()[2])).collect()
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    pub fn svd_cutoff(&self) -> f64 {
        self.svd_cutoff
    }

    pub fn canonical_center(&self) -> Option<usize> {
        self.canonical_center
    }

    pub fn cumulative_discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    fn move_center_right(&mut self, i: usize) -> Result<()> {
        let [l, p, r] = dims3(&self.sites[i]);
        let m = self.sites[i].clone().reshape(&[l * p, r])?.to_matrix()?;
        let qr = m.qr();
        let (q, rm) = (qr.q(), qr.r());
        let k = q.ncols();
        self.sites[i] = Tensor::from_matrix(&q).reshape(&[l, p, k])?;
        let next = &self.sites[i + 1];
        let [_, p2, r2] = dims3(next);
        let merged = Tensor::from_matrix(&rm).matmul(&next.clone().reshape(&[r, p2 * r2])?)?;
        self.sites[i + 1] = merged.reshape(&[k, p2, r2])?;
        Ok(())
    }

    fn move_center_left(&mut self, i: usize) -> Result<()> {
        let [l, p, r] = dims3(&self.sites[i]);
        let m = self.sites[i].clone().reshape(&[l, p * r])?.to_matrix()?;
        let qr = m.adjoint().qr();
        let (q, rm) = (qr.q(), qr.r());
        let k = q.ncols();
        self.sites[i] = Tensor::from_matrix(&q.adjoint()).reshape(&[k, p, r])?;
        let prev = &self.sites[i - 1];
        let [l0, p0, _] = dims3(prev);
        let merged = prev.clone().reshape(&[l0 * p0, l])?.matmul(&Tensor::from_matrix(&rm.adjoint()))?;
        self.sites[i - 1] = merged.reshape(&[l0, p0, k])?;
        Ok(())
    }

    /// Brings the state into mixed canonical form centred on `center`.
    pub fn canonicalize(&mut self, center: usize) -> Result<()> {
        let n = self.n_sites();
        if center >= n {
            return arg(format!("center {center} out of range for {n} sites"));
        }
        match self.canonical_center {
            Some(c) if c == center => {}
            Some(c) if c < center => {
                for i in c..center {
                    self.move_center_right(i)?;
                }
            }
            Some(c) => {
                for i in (center + 1..=c).rev() {
                    self.move_center_left(i)?;
                }
            }
            None => {
                for i in 0..center {
                    self.move_center_right(i)?;
                }
                for i in (center + 1..n).rev() {
                    self.move_center_left(i)?;
                }
            }
        }
        self.canonical_center = Some(center);
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        if let Some(c) = self.canonical_center {
            return self.sites[c].norm_sqr().sqrt();
        }
        self.overlap(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
    }

    pub fn normalize(&mut self) -> Result<()> {
        if self.canonical_center.is_none() {
            self.canonicalize(0)?;
        }
        let c = self.canonical_center.unwrap_or(0);
        let nrm = self.sites[c].norm_sqr().sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::Numerical(format!("cannot normalize state with norm {nrm}")));
        }
        self.sites[c].scale(C64::new(1.0 / nrm, 0.0));
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &MpsState) -> Result<C64> {
        if self.n_sites() != other.n_sites() {
            return arg("overlap: site counts differ");
        }
        let mut env = Tensor::from_real(&[1, 1], &[1.0])?;
        for (a, b) in self.sites.iter().zip(&other.sites) {
            // env[l, l'] conj(a)[l, s, r] b[l', s, r']
            let t = env.contract(&[0], &a.conj(), &[0])?; // [l', s, r]
            env = t.contract(&[0, 1], b, &[0, 1])?; // [r, r']
        }
        Ok(env.data()[0])
    }

    pub fn apply_gate(&mut self, gate: &Tensor, sites: &[usize]) -> Result<()> {
        check_unitary(gate)?;
        match *sites {
            [i] => {
                if gate.shape() != [2, 2] {
                    return arg("one-site gate must be 2x2");
                }
                self.apply_one_site(gate, i)
            }
            [i, j] => {
                if gate.shape() != [4, 4] {
                    return arg("two-site gate must be 4x4");
                }
                self.apply_two_site(gate, i, j)
            }
            _ => arg(format!("gates act on 1 or 2 sites, got {sites:?}")),
        }
    }

    /// Applies a 2×2 matrix to a site without a unitarity check.
    pub(crate) fn apply_one_site(&mut self, gate: &Tensor, i: usize) -> Result<()> {
        if i >= self.n_sites() {
            return arg(format!("site {i} out of range"));
        }
        let t = gate.contract(&[1], &self.sites[i], &[1])?; // [s, l, r]
        self.sites[i] = t.permute(&[1, 0, 2])?;
        Ok(())
    }

    /// Applies a 4×4 matrix in the basis |s_i s_j⟩ (site `i` most significant).
    pub(crate) fn apply_two_site(&mut self, gate: &Tensor, i: usize, j: usize) -> Result<()> {
        let n = self.n_sites();
        if i >= n || j >= n || i == j {
            return arg(format!("invalid two-site pair ({i}, {j})"));
        }
        if i.abs_diff(j) != 1 {
            return Err(Error::RoutingRequired(i, j));
        }
        let (left, g) = if i < j {
            (i, gate.clone().reshape(&[2, 2, 2, 2])?)
        } else {
            (j, gate.clone().reshape(&[2, 2, 2, 2])?.permute(&[1, 0, 3, 2])?)
        };
        self.canonicalize(left)?;
        let [l, _, _] = dims3(&self.sites[left]);
        let [_, _, r] = dims3(&self.sites[left + 1]);
        let theta = self.sites[left].contract(&[2], &self.sites[left + 1], &[0])?; // [l, s1, s2, r]
        let theta = g.contract(&[2, 3], &theta, &[1, 2])?; // [o1, o2, l, r]
        let theta = theta.permute(&[2, 0, 1, 3])?.reshape(&[l * 2, 2 * r])?;
        let total = theta.norm_sqr();
        let svd = svd_truncated(&theta, self.chi_max, self.svd_cutoff)?;
        let k = svd.s.len();
        let kept: f64 = svd.s.iter().map(|s| s * s).sum();
        if total > 0.0 {
            self.discarded_weight += svd.discarded_weight / total;
        }
        let renorm = if kept > 0.0 { (total / kept).sqrt() } else { 1.0 };
        let mut right = svd.vh;
        for (row, &s) in right.data_mut().chunks_mut(2 * r).zip(&svd.s) {
            row.iter_mut().for_each(|z| *z *= s * renorm);
        }
        self.sites[left] = svd.u.reshape(&[l, 2, k])?;
        self.sites[left + 1] = right.reshape(&[k, 2, r])?;
        self.canonical_center = Some(left + 1);
        Ok(())
    }

    /// Schmidt coefficients across the bond between sites `cut - 1` and `cut`,
    /// descending and normalized so their squares sum to one.
    pub fn schmidt_values(&self, cut: usize) -> Result<Vec<f64>> {
        let n = self.n_sites();
        if cut < 1 || cut >= n {
            return arg(format!("cut {cut} out of range 1..={}", n.saturating_sub(1)));
        }
        let mut work = self.clone();
        work.canonicalize(cut - 1)?;
        let [l, p, r] = dims3(&work.sites[cut - 1]);
        let m = work.sites[cut - 1].clone().reshape(&[l * p, r])?;
        let svd = svd_truncated(&m, usize::MAX, 0.0)?;
        let total: f64 = svd.s.iter().map(|s| s * s).sum();
        if !(total > 0.0) {
            return Err(Error::Numerical("zero-norm state has no Schmidt spectrum".into()));
        }
        Ok(svd.s.iter().map(|s| s / total.sqrt()).collect())
    }

    /// Von Neumann entropy −Σ λ² ln λ² of the bipartition at `cut`.
    pub fn entanglement_entropy(&self, cut: usize) -> Result<f64> {
        Ok(entropy_from_schmidt(&self.schmidt_values(cut)?))
    }

    /// ⟨ψ|O|ψ⟩ for a Hermitian MPO on the same number of sites.
    pub fn expectation_mpo(&self, op: &Mpo) -> Result<f64> {
        let z = self.expectation_mpo_complex(op)?;
        let scale = z.re.abs().max(1.0);
        if z.im.abs() > 1e-8 * scale {
            return Err(Error::Numerical(format!(
                "expectation has imaginary residual {:e}",
                z.im
            )));
        }
        Ok(z.re)
    }

    pub fn expectation_mpo_complex(&self, op: &Mpo) -> Result<C64> {
        if op.n_sites() != self.n_sites() {
            return arg(format!(
                "MPO has {} sites but state has {}",
                op.n_sites(),
                self.n_sites()
            ));
        }
        let mut env = Tensor::from_real(&[1, 1, 1], &[1.0])?;
        for (a, w) in self.sites.iter().zip(op.site_tensors()) {
            let t = env.contract(&[0], &a.conj(), &[0])?; // [w, l', s, r]
            let t = t.contract(&[0, 2], w, &[0, 1])?; // [l', r, t, w']
            env = t.contract(&[0, 2], a, &[0, 1])?; // [r, w', r']
        }
        Ok(env.data()[0])
    }

    /// Expectation of a product of one-site operators, e.g. σᶻ_i σᶻ_j.
    pub fn expectation_product(&self, ops: &[(usize, &Tensor)]) -> Result<C64> {
        let mut env = Tensor::from_real(&[1, 1], &[1.0])?;
        for (k, a) in self.sites.iter().enumerate() {
            let mut b = a.clone();
            for &(site, op) in ops {
                if site >= self.n_sites() {
                    return arg(format!("operator site {site} out of range"));
                }
                if site == k {
                    b = op.contract(&[1], &b, &[1])?.permute(&[1, 0, 2])?;
                }
            }
            let t = env.contract(&[0], &a.conj(), &[0])?;
            env = t.contract(&[0, 1], &b, &[0, 1])?;
        }
        Ok(env.data()[0])
    }

    /// Dense state vector of length 2^n. Intended for small systems.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        if self.n_sites() > 26 {
            return Err(Error::Capacity { what: "dense MPS contraction", max: 26, got: self.n_sites() });
        }
        let mut acc = Tensor::from_real(&[1, 1], &[1.0])?;
        for a in &self.sites {
            let [l, p, r] = dims3(a);
            let rows = acc.shape()[0];
            acc = acc.matmul(&a.clone().reshape(&[l, p * r])?)?.reshape(&[rows * p, r])?;
        }
        Ok(acc.into_data())
    }

    /// Reduced density matrix of the first `n_keep` sites as a dense matrix,
    /// obtained by contracting out the remaining sites.
    pub fn reduced_density_matrix(&self, n_keep: usize) -> Result<DMatrix<C64>> {
        let n = self.n_sites();
        if n_keep == 0 || n_keep > n || n_keep > 12 {
            return arg(format!("cannot form reduced density matrix of {n_keep} of {n} sites"));
        }
        let mut work = self.clone();
        if n_keep < n {
            work.canonicalize(n_keep - 1)?;
        }
        // left block: contract the first n_keep tensors into [2^k, r]
        let mut acc = Tensor::from_real(&[1, 1], &[1.0])?;
        for a in &work.sites[..n_keep] {
            let [l, p, r] = dims3(a);
            let rows = acc.shape()[0];
            acc = acc.matmul(&a.clone().reshape(&[l, p * r])?)?.reshape(&[rows * p, r])?;
        }
        // right part is right-isometric when n_keep < n, so ρ = A A†
        let m = acc.to_matrix()?;
        Ok(&m * m.adjoint())
    }
}

fn dims3(t: &Tensor) -> [usize; 3] {
    let s = t.shape();
    [s[0], s[1], s[2]]
}

pub(crate) fn entropy_from_schmidt(values: &[f64]) -> f64 {
    let total: f64 = values.iter().map(|s| s * s).sum();
    values
        .iter()
        .filter(|&&s| s > SCHMIDT_FLOOR)
        .map(|&s| {
            let p = s * s / total;
            if p > 0.0 {
                -p * p.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        .max(0.0)
}

fn check_unitary(gate: &Tensor) -> Result<()> {
    let m = gate.to_matrix()?;
    if m.nrows() != m.ncols() {
        return arg("gate is not square");
    }
    let prod = &m * m.adjoint();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let e = if i == j { 1.0 } else { 0.0 };
            if (prod[(i, j)] - C64::new(e, 0.0)).norm() > 1e-10 {
                return arg("gate is not unitary within 1e-10");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensornet::gates;

    fn z() -> Tensor {
        Tensor::from_real(&[2, 2], &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }
    fn x() -> Tensor {
        Tensor::from_real(&[2, 2], &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn product_state_magnetization() {
        let s = MpsState::from_product_state("0000").unwrap();
        assert_eq!(s.bond_dims(), vec![1; 5]);
        for i in 0..4 {
            assert!((s.expectation_product(&[(i, &z())]).unwrap().re - 1.0).abs() < 1e-14);
        }
        let s = MpsState::from_product_state("01").unwrap();
        assert!((s.expectation_product(&[(0, &z())]).unwrap().re - 1.0).abs() < 1e-14);
        assert!((s.expectation_product(&[(1, &z())]).unwrap().re + 1.0).abs() < 1e-14);
        let dense = MpsState::from_product_state("010").unwrap().to_dense().unwrap();
        for (k, a) in dense.iter().enumerate() {
            assert_eq!(a.re, if k == 2 { 1.0 } else { 0.0 });
        }
        assert!(MpsState::from_product_state("").is_err());
    }

    #[test]
    fn hadamard_gives_plus_state() {
        let mut s = MpsState::from_product_state("0").unwrap();
        s.apply_gate(&gates::hadamard(), &[0]).unwrap();
        assert!((s.expectation_product(&[(0, &x())]).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_pair_entropy() {
        let mut s = MpsState::from_product_state("00").unwrap();
        s.apply_gate(&gates::hadamard(), &[0]).unwrap();
        s.apply_gate(&gates::cnot(), &[0, 1]).unwrap();
        let e = s.entanglement_entropy(1).unwrap();
        assert!((e - 2f64.ln()).abs() < 1e-12);
        assert_eq!(s.entanglement_entropy(2).is_err(), true);
        assert_eq!(s.entanglement_entropy(0).is_err(), true);
    }

    #[test]
    fn reversed_site_order_matches_swapped_gate() {
        // CNOT with control on site 1 applied to |01⟩ gives |11⟩.
        let mut s = MpsState::from_product_state("01").unwrap();
        s.apply_gate(&gates::cnot(), &[1, 0]).unwrap();
        let d = s.to_dense().unwrap();
        assert!((d[3].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_adjacent_and_non_unitary() {
        let mut s = MpsState::zeros(4).unwrap();
        assert!(matches!(s.apply_gate(&gates::cnot(), &[0, 2]), Err(Error::RoutingRequired(0, 2))));
        let bad = Tensor::from_real(&[2, 2], &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(s.apply_gate(&bad, &[0]), Err(Error::Argument(_))));
    }

    #[test]
    fn canonical_form_isometries() {
        let mut s = MpsState::zeros(6).unwrap();
        for layer in 0..3 {
            for i in 0..6 {
                s.apply_gate(&gates::ry(0.3 + 0.17 * (i + layer) as f64), &[i]).unwrap();
            }
            for i in 0..5 {
                s.apply_gate(&gates::cnot(), &[i, i + 1]).unwrap();
            }
        }
        s.canonicalize(3).unwrap();
        for i in 0..6 {
            let a = s.site(i);
            let id = if i < 3 {
                a.conj().contract(&[0, 1], a, &[0, 1]).unwrap()
            } else if i > 3 {
                a.contract(&[1, 2], &a.conj(), &[1, 2]).unwrap()
            } else {
                continue;
            };
            let d = id.shape()[0];
            for p in 0..d {
                for q in 0..d {
                    let e = if p == q { 1.0 } else { 0.0 };
                    assert!((id.get(&[p, q]) - C64::new(e, 0.0)).norm() < 1e-10);
                }
            }
        }
        assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn swap_ladders_over_bell_pairs() {
        // Degenerate Schmidt spectra with near-zero rows once tripped the SVD.
        let n = 4;
        let mut st = MpsState::zeros(2 * n).unwrap();
        let mut d = crate::dense::DenseState::zeros(2 * n).unwrap();
        let mut ops: Vec<(Tensor, Vec<usize>)> = (0..n).map(|p| (gates::hadamard(), vec![p])).collect();
        for p in (0..n).rev() {
            ops.extend((p + 1..n + p).rev().map(|k| (gates::swap(), vec![k, k + 1])));
            ops.push((gates::cnot(), vec![p, p + 1]));
            ops.extend((p + 1..n + p).map(|k| (gates::swap(), vec![k, k + 1])));
        }
        for (g, s) in &ops {
            st.apply_gate(g, s).unwrap();
            match s[..] {
                [a] => d.apply_1q(g, a).unwrap(),
                [a, b] => d.apply_2q(g, a, b).unwrap(),
                _ => unreachable!(),
            }
            assert!(d.overlap_abs(&st.to_dense().unwrap()) > 1.0 - 1e-12);
        }
        assert!((st.entanglement_entropy(n).unwrap() - n as f64 * 2f64.ln()).abs() < 1e-10);
    }
}
