//! Dense complex tensors and the truncated SVD used by every MPS update.
//!
//! Data is stored in row-major order: for shape `[d0, d1, ..., dk]` the
//! element at multi-index `(i0, ..., ik)` lives at linear offset
//! `((i0 * d1 + i1) * d2 + i2) ... * dk + ik`. Reshape never moves data, so a
//! rank-3 MPS tensor `[l, p, r]` reshaped to `[l * p, r]` groups `(l, p)` into
//! the row index with `p` varying fastest.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{arg, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<C64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self { shape: shape.to_vec(), data: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<C64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return arg(format!(
                "shape {shape:?} needs {n} elements, got {}",
                data.len()
            ));
        }
        Ok(Self { shape: shape.to_vec(), data })
    }

    pub fn from_real(shape: &[usize], data: &[f64]) -> Result<Self> {
        Self::from_vec(shape, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(&[n, n]);
        for i in 0..n {
            t.data[i * n + i] = C64::new(1.0, 0.0);
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &d)| {
            debug_assert!(i < d);
            acc * d + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: C64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: C64) {
        self.data.iter_mut().for_each(|z| *z *= factor);
    }

    pub fn conj(&self) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn reshape(mut self, shape: &[usize]) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != self.data.len() {
            return arg(format!("cannot reshape {:?} into {shape:?}", self.shape));
        }
        self.shape = shape.to_vec();
        Ok(self)
    }

    /// Reorders axes so that output axis `k` is input axis `axes[k]`.
    pub fn permute(&self, axes: &[usize]) -> Result<Self> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if axes.len() != r || axes.iter().any(|&a| a >= r || std::mem::replace(&mut seen[a], true)) {
            return arg(format!("invalid permutation {axes:?} for rank {r}"));
        }
        if axes.iter().enumerate().all(|(k, &a)| k == a) {
            return Ok(self.clone());
        }
        let new_shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let old_strides = strides(&self.shape);
        let src_strides: Vec<usize> = axes.iter().map(|&a| old_strides[a]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; r];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src]);
            for k in (0..r).rev() {
                idx[k] += 1;
                src += src_strides[k];
                if idx[k] < new_shape[k] {
                    break;
                }
                src -= src_strides[k] * new_shape[k];
                idx[k] = 0;
            }
        }
        Ok(Self { shape: new_shape, data })
    }

    /// Rank-2 tensor as an nalgebra matrix.
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        if self.rank() != 2 {
            return arg(format!("expected rank-2 tensor, got shape {:?}", self.shape));
        }
        Ok(DMatrix::from_row_slice(self.shape[0], self.shape[1], &self.data))
    }

    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        let (r, c) = m.shape();
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(m[(i, j)]);
            }
        }
        Self { shape: vec![r, c], data }
    }

    /// Matrix product of two rank-2 tensors.
    pub fn matmul(&self, other: &Tensor) -> Result<Tensor> {
        if self.rank() != 2 || other.rank() != 2 || self.shape[1] != other.shape[0] {
            return arg(format!(
                "matmul shape mismatch {:?} x {:?}",
                self.shape, other.shape
            ));
        }
        let (m, k, n) = (self.shape[0], self.shape[1], other.shape[1]);
        let mut out = vec![C64::new(0.0, 0.0); m * n];
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[p * n..(p + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Tensor { shape: vec![m, n], data: out })
    }

    /// Contracts `self` axes `ours` with `other` axes `theirs` (tensordot).
    /// Output axes are the free axes of `self` followed by those of `other`,
    /// each in original order.
    pub fn contract(&self, ours: &[usize], other: &Tensor, theirs: &[usize]) -> Result<Tensor> {
        if ours.len() != theirs.len() {
            return arg("contract: axis lists differ in length");
        }
        for (&a, &b) in ours.iter().zip(theirs) {
            if a >= self.rank() || b >= other.rank() || self.shape[a] != other.shape[b] {
                return arg(format!(
                    "contract: incompatible axes {ours:?} of {:?} and {theirs:?} of {:?}",
                    self.shape, other.shape
                ));
            }
        }
        let free_a: Vec<usize> = (0..self.rank()).filter(|a| !ours.contains(a)).collect();
        let free_b: Vec<usize> = (0..other.rank()).filter(|b| !theirs.contains(b)).collect();
        let k: usize = ours.iter().map(|&a| self.shape[a]).product();
        let ma: usize = free_a.iter().map(|&a| self.shape[a]).product();
        let nb: usize = free_b.iter().map(|&b| other.shape[b]).product();

        let perm_a: Vec<usize> = free_a.iter().chain(ours).copied().collect();
        let perm_b: Vec<usize> = theirs.iter().chain(&free_b).copied().collect();
        let a = self.permute(&perm_a)?.reshape(&[ma, k])?;
        let b = other.permute(&perm_b)?.reshape(&[k, nb])?;
        let out_shape: Vec<usize> = free_a
            .iter()
            .map(|&x| self.shape[x])
            .chain(free_b.iter().map(|&x| other.shape[x]))
            .collect();
        a.matmul(&b)?.reshape(&out_shape)
    }
}

/// Result of [`svd_truncated`]: `matrix ≈ u · diag(s) · vh`.
#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    /// `m × k` with orthonormal columns.
    pub u: Tensor,
    /// Kept singular values, descending.
    pub s: Vec<f64>,
    /// `k × n` with orthonormal rows (the conjugate-transposed right factor).
    pub vh: Tensor,
    /// Sum of squared singular values that were dropped.
    pub discarded_weight: f64,
}

/// Thin SVD keeping at most `chi_max` singular values whose relative weight
/// `σ² / Σσ²` exceeds `cutoff`. At least one value is always kept.
///
/// Ties between equal singular values keep the backend's column order, which
/// is deterministic for identical input.
pub fn svd_truncated(matrix: &Tensor, chi_max: usize, cutoff: f64) -> Result<TruncatedSvd> {
    if chi_max == 0 {
        return arg("chi_max must be >= 1");
    }
    if !(cutoff >= 0.0) {
        return arg(format!("cutoff must be >= 0, got {cutoff}"));
    }
    if !matrix.is_finite() {
        return Err(Error::NumericInput("svd input contains NaN or inf".into()));
    }
    if matrix.rank() != 2 {
        return arg(format!("svd expects a matrix, got shape {:?}", matrix.shape()));
    }
    let [rows, cols] = [matrix.shape()[0], matrix.shape()[1]];
    let data = matrix.data();
    let m = faer::Mat::<C64>::from_fn(rows, cols, |r, c| data[r * cols + c]);
    let svd = m.thin_svd().map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sv: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));

    let total: f64 = sv.iter().map(|s| s * s).sum();
    let mut keep = order
        .iter()
        .take_while(|&&i| total > 0.0 && sv[i] * sv[i] / total > cutoff)
        .count()
        .min(chi_max);
    keep = keep.max(1);

    let discarded_weight: f64 = order[keep..].iter().map(|&i| sv[i] * sv[i]).sum();
    let mut u_data = Vec::with_capacity(rows * keep);
    for r in 0..rows {
        for &i in &order[..keep] {
            u_data.push(u[(r, i)]);
        }
    }
    let mut vh_data = Vec::with_capacity(keep * cols);
    for &i in &order[..keep] {
        for c in 0..cols {
            vh_data.push(v[(c, i)].conj());
        }
    }
    Ok(TruncatedSvd {
        u: Tensor::from_vec(&[rows, keep], u_data)?,
        s: order[..keep].iter().map(|&i| sv[i]).collect(),
        vh: Tensor::from_vec(&[keep, cols], vh_data)?,
        discarded_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(shape: &[usize], rng: &mut impl Rng) -> Tensor {
        let n = shape.iter().product();
        let data = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Tensor::from_vec(shape, data).unwrap()
    }

    #[test]
    fn identity_keeps_both_values() {
        let out = svd_truncated(&Tensor::identity(2), 2, 0.0).unwrap();
        assert_eq!(out.s.len(), 2);
        assert!((out.s[0] - 1.0).abs() < 1e-14 && (out.s[1] - 1.0).abs() < 1e-14);
        assert_eq!(out.discarded_weight, 0.0);
    }

    #[test]
    fn rank_one_matrix() {
        let m = Tensor::from_real(&[2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let out = svd_truncated(&m, 1, 0.0).unwrap();
        assert_eq!(out.s.len(), 1);
        assert!((out.s[0] - 1.0).abs() < 1e-14);
        assert!(out.discarded_weight.abs() < 1e-28);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_tensor(&[8, 8], &mut rng);
        let out = svd_truncated(&a, 8, 0.0).unwrap();
        // Oracle: eigenvalues of A A† are the squared singular values.
        let am = a.to_matrix().unwrap();
        let gram = &am * am.adjoint();
        let eig = SymmetricEigen::new(gram);
        let mut expected: Vec<f64> = eig.eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (s, e) in out.s.iter().zip(&expected) {
            assert!((s - e).abs() < 1e-10, "{s} vs {e}");
        }
    }

    #[test]
    fn truncation_bounds_reconstruction_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_tensor(&[6, 9], &mut rng);
        let out = svd_truncated(&a, 3, 0.0).unwrap();
        assert_eq!(out.s.len(), 3);
        let mut us = out.u.clone();
        for r in 0..6 {
            for c in 0..3 {
                let v = us.get(&[r, c]) * out.s[c];
                us.set(&[r, c], v);
            }
        }
        let rec = us.matmul(&out.vh).unwrap();
        let err: f64 = rec.data().iter().zip(a.data()).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert!(err <= out.discarded_weight * (1.0 + 1e-10) + 1e-20);
        // isometries
        let uu = out.u.conj().contract(&[0], &out.u, &[0]).unwrap();
        let vv = out.vh.contract(&[1], &out.vh.conj(), &[1]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((uu.get(&[i, j]) - e).norm() < 1e-12);
                assert!((vv.get(&[i, j]) - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cutoff_drops_small_values() {
        let m = Tensor::from_real(&[3, 3], &[1.0, 0.0, 0.0, 0.0, 1e-4, 0.0, 0.0, 0.0, 1e-8]).unwrap();
        let out = svd_truncated(&m, 3, 1e-12).unwrap();
        assert_eq!(out.s.len(), 2);
        assert!((out.discarded_weight - 1e-16).abs() < 1e-20);
    }

    #[test]
    fn rejects_non_finite() {
        let m = Tensor::from_real(&[2, 2], &[1.0, f64::NAN, 0.0, 1.0]).unwrap();
        assert!(matches!(svd_truncated(&m, 2, 0.0), Err(Error::NumericInput(_))));
    }

    #[test]
    fn permute_matches_index_mapping() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_tensor(&[2, 3, 4], &mut rng);
        let p = t.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.shape(), &[4, 2, 3]);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..4 {
                    assert_eq!(t.get(&[a, b, c]), p.get(&[c, a, b]));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn permute_then_inverse_is_identity(seed in 0u64..1000, d0 in 1usize..4, d1 in 1usize..4, d2 in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&[d0, d1, d2], &mut rng);
            let back = t.permute(&[1, 2, 0]).unwrap().permute(&[2, 0, 1]).unwrap();
            proptest::prop_assert_eq!(back, t);
        }
    }
}
