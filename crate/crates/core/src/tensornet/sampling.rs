//! Exact sequential sampling of MPS measurement outcomes.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gates;
use super::mps::MpsState;
use super::tensor::Tensor;
use crate::error::{arg, Result};
use crate::measure::shots::{Basis, ShotTable};

/// Draws bit strings from the leading `basis.len()` sites of a state. The
/// remaining sites are marginalized, which is exact because the sampler keeps
/// the state right-canonical.
#[derive(Clone, Debug)]
pub struct Sampler {
    tensors: Vec<Tensor>,
}

impl Sampler {
    pub fn new(state: &MpsState, basis: &[Basis]) -> Result<Self> {
        if basis.is_empty() || basis.len() > state.n_sites() {
            return arg(format!(
                "basis covers {} sites but state has {}",
                basis.len(),
                state.n_sites()
            ));
        }
        let mut work = state.clone();
        work.canonicalize(0)?;
        work.normalize()?;
        let h = gates::hadamard();
        let tensors = basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let a = work.site(i);
                match b {
                    Basis::Z => Ok(a.clone()),
                    Basis::X => h.contract(&[1], a, &[1])?.permute(&[1, 0, 2]),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tensors })
    }

    pub fn n_measured(&self) -> usize {
        self.tensors.len()
    }

    /// Writes one outcome into `bits` (0 or 1 per measured site).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, bits: &mut [u8]) {
        let mut v = vec![C64::new(1.0, 0.0)];
        for (k, a) in self.tensors.iter().enumerate() {
            let (l, r) = (a.shape()[0], a.shape()[2]);
            let data = a.data();
            let mut w = [vec![C64::new(0.0, 0.0); r], vec![C64::new(0.0, 0.0); r]];
            for (li, &vl) in v.iter().enumerate().take(l) {
                for (s, ws) in w.iter_mut().enumerate() {
                    let row = &data[(li * 2 + s) * r..(li * 2 + s + 1) * r];
                    for (o, x) in ws.iter_mut().zip(row) {
                        *o += vl * x;
                    }
                }
            }
            let p0: f64 = w[0].iter().map(|z| z.norm_sqr()).sum();
            let p1: f64 = w[1].iter().map(|z| z.norm_sqr()).sum();
            let u: f64 = rng.gen::<f64>() * (p0 + p1);
            let (s, p) = if u < p0 { (0, p0) } else { (1, p1) };
            bits[k] = s as u8;
            let inv = 1.0 / p.sqrt();
            v = std::mem::take(&mut w[s]).into_iter().map(|z| z * inv).collect();
        }
    }
}

/// Samples `n_shots` outcomes of the first `basis.len()` sites.
pub fn sample_shots(state: &MpsState, basis: &[Basis], n_shots: u64, seed: u64) -> Result<ShotTable> {
    if n_shots == 0 {
        return arg("n_shots must be positive");
    }
    let sampler = Sampler::new(state, basis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = ShotTable::new(basis.to_vec(), seed);
    let mut bits = vec![0u8; basis.len()];
    for _ in 0..n_shots {
        sampler.draw(&mut rng, &mut bits);
        table.record(&bits, 1);
    }
    Ok(table)
}
