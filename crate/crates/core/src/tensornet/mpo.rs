use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::tensor::Tensor;
use crate::error::{arg, Error, Result};

/// Matrix product operator with site tensors `[left, phys_out, phys_in, right]`.
#[derive(Clone, Debug)]
pub struct Mpo {
    sites: Vec<Tensor>,
}

impl Mpo {
    pub fn new(sites: Vec<Tensor>) -> Result<Self> {
        if sites.is_empty() {
            return arg("MPO needs at least one site");
        }
        for (i, w) in sites.iter().enumerate() {
            let s = w.shape();
            if w.rank() != 4 || s[1] != 2 || s[2] != 2 {
                return arg(format!("MPO site {i} has shape {s:?}"));
            }
            if i > 0 && sites[i - 1].shape()[3] != s[0] {
                return arg(format!("MPO bond mismatch at site {i}"));
            }
        }
        if sites[0].shape()[0] != 1 || sites[sites.len() - 1].shape()[3] != 1 {
            return arg("MPO boundary bonds must have dimension 1");
        }
        Ok(Self { sites })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let w = Tensor::identity(2).reshape(&[1, 2, 2, 1])?;
        Self::new(vec![w; n])
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn site_tensors(&self) -> &[Tensor] {
        &self.sites
    }

    /// Bond dimensions including both boundaries (`n_sites + 1` entries).
    pub fn bond_dims(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.sites.iter().map(|w| w.shape()[3])).collect()
    }

    /// Appends identity sites so the operator acts on `n_total` sites.
    pub fn extend_identity(mut self, n_total: usize) -> Result<Self> {
        if n_total < self.n_sites() {
            return arg("cannot shrink an MPO");
        }
        let w = Tensor::identity(2).reshape(&[1, 2, 2, 1])?;
        self.sites.resize(n_total, w);
        Ok(self)
    }

    /// Operator product `self · other` (apply `other` first).
    pub fn product(&self, other: &Mpo) -> Result<Mpo> {
        if self.n_sites() != other.n_sites() {
            return arg("MPO product: site counts differ");
        }
        let sites = self
            .sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| {
                let (la, ra) = (a.shape()[0], a.shape()[3]);
                let (lb, rb) = (b.shape()[0], b.shape()[3]);
                // a[la, s, u, ra] b[lb, u, t, rb] -> [la, s, ra, lb, t, rb]
                let t = a.contract(&[2], b, &[1])?;
                t.permute(&[0, 3, 1, 4, 2, 5])?.reshape(&[la * lb, 2, 2, ra * rb])
            })
            .collect::<Result<Vec<_>>>()?;
        Mpo::new(sites)
    }

    /// Dense 2^n × 2^n matrix (site 0 most significant). Limited to 12 sites.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.n_sites();
        if n > 12 {
            return Err(Error::Capacity { what: "dense MPO reconstruction", max: 12, got: n });
        }
        let mut acc = Tensor::from_real(&[1, 1, 1], &[1.0])?;
        for w in &self.sites {
            let (rows, cols) = (acc.shape()[0], acc.shape()[1]);
            let r = w.shape()[3];
            // acc[row, col, l] w[l, s, t, r] -> [row, col, s, t, r]
            let t = acc.contract(&[2], w, &[0])?;
            acc = t.permute(&[0, 2, 1, 3, 4])?.reshape(&[rows * 2, cols * 2, r])?;
        }
        let dim = acc.shape()[0];
        Ok(DMatrix::from_row_slice(dim, dim, acc.data()))
    }
}
