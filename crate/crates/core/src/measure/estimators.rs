//! Thermal observables from shot tables and from prepared states.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_ci, BootstrapData, Resampled, DEFAULT_RESAMPLES};
use super::shots::{Basis, ShotTable};
use crate::error::{arg, Error, Result};
use crate::models::{HamiltonianSpec, Pauli};
use crate::oracles::ZAverages;
use crate::tensornet::{gates, sample_shots, Mpo, MpsState, Tensor};

/// Tolerated negative variance before a specific heat is reported as an error.
pub const CV_NEGATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

fn require_basis(t: &ShotTable, b: Basis, name: &str) -> Result<()> {
    if t.uniform_basis() != Some(b) {
        return arg(format!("{name} table must be measured entirely in the {} basis, got {}", b.letter(), t.basis_string()));
    }
    Ok(())
}

/// Mean of a product of ±1 spins over a table.
fn spin_product_mean(t: &ShotTable, sites: &[usize]) -> f64 {
    let mut acc = 0i64;
    for (key, &c) in t.counts() {
        let b = key.as_bytes();
        let odd = sites.iter().filter(|&&s| b[s] == b'1').count() % 2 == 1;
        acc += if odd { -(c as i64) } else { c as i64 };
    }
    acc as f64 / t.n_shots() as f64
}

/// Energy density ε = ⟨H⟩/N from a Z-basis and an X-basis table with bits in
/// lattice-site order. Each Pauli term is a ±1 variable whose mean has
/// binomial variance (1 − m²)/shots; the term variances are added with
/// their squared coefficients.
pub fn energy_from_shots(z: &ShotTable, x: &ShotTable, spec: &HamiltonianSpec) -> Result<Estimate> {
    require_basis(z, Basis::Z, "z")?;
    require_basis(x, Basis::X, "x")?;
    let n = spec.n_sites();
    if z.n_sites() != n || x.n_sites() != n {
        return arg(format!("tables cover {} and {} sites, model has {n}", z.n_sites(), x.n_sites()));
    }
    let (mut e, mut var) = (0.0, 0.0);
    for term in spec.terms() {
        let sites: Vec<usize> = term.ops.iter().map(|o| o.0).collect();
        let table = if term.ops.iter().all(|o| o.1 == Pauli::Z) {
            z
        } else if term.ops.iter().all(|o| o.1 == Pauli::X) {
            x
        } else {
            return arg(format!("term {:?} is not diagonal in the Z or X basis", term.ops));
        };
        let m = spin_product_mean(table, &sites);
        e += term.coeff * m;
        var += term.coeff * term.coeff * (1.0 - m * m).max(0.0) / table.n_shots() as f64;
    }
    Ok(Estimate { value: e / n as f64, stderr: var.sqrt() / n as f64 })
}

/// Groups a Z table by a per-outcome key, for bootstrapping over shots.
fn histogram<K: Ord, F: Fn(&[u8]) -> K>(t: &ShotTable, key: F) -> (Vec<K>, Vec<u64>) {
    let mut h: BTreeMap<K, u64> = BTreeMap::new();
    for (bits, &c) in t.counts() {
        *h.entry(key(bits.as_bytes())).or_default() += c;
    }
    h.into_iter().unzip()
}

fn magnetization(bits: &[u8]) -> i64 {
    bits.iter().map(|&b| if b == b'0' { 1 } else { -1 }).sum()
}

/// χ = β/N² (mean(M²) − mean(M)²) over shots, with bootstrap stderr.
pub fn susceptibility_from_shots(z: &ShotTable, beta: f64, n: usize) -> Result<Estimate> {
    require_basis(z, Basis::Z, "z")?;
    if z.n_sites() != n {
        return arg(format!("table covers {} sites, expected {n}", z.n_sites()));
    }
    let (ms, counts) = histogram(z, magnetization);
    let chi = |c: &[u64]| -> f64 {
        let total = c.iter().sum::<u64>() as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (&m, &k) in ms.iter().zip(c) {
            s1 += k as f64 * m as f64;
            s2 += k as f64 * (m * m) as f64;
        }
        let (m1, m2) = (s1 / total, s2 / total);
        beta * (m2 - m1 * m1) / (n * n) as f64
    };
    let value = chi(&counts);
    let data = BootstrapData::Counts(vec![counts]);
    let b = bootstrap_ci(|r: Resampled| Ok(chi(&r.counts()?[0])), &data, DEFAULT_RESAMPLES, z.seed())?;
    Ok(Estimate { value, stderr: b.stderr })
}

/// C^z_ij = ⟨σᶻᵢσᶻⱼ⟩ − ⟨σᶻᵢ⟩⟨σᶻⱼ⟩ over shots, with bootstrap stderr.
pub fn two_point_from_shots(z: &ShotTable, i: usize, j: usize) -> Result<Estimate> {
    require_basis(z, Basis::Z, "z")?;
    if i == j {
        return arg("two-point correlator needs distinct sites");
    }
    if i.max(j) >= z.n_sites() {
        return arg(format!("site {} out of range", i.max(j)));
    }
    let (keys, counts) = histogram(z, |b| (b[i], b[j]));
    let corr = |c: &[u64]| -> f64 {
        let total = c.iter().sum::<u64>() as f64;
        let (mut si, mut sj, mut sij) = (0.0, 0.0, 0.0);
        for (&(a, b), &k) in keys.iter().zip(c) {
            let (x, y) = (if a == b'0' { 1.0 } else { -1.0 }, if b == b'0' { 1.0 } else { -1.0 });
            si += k as f64 * x;
            sj += k as f64 * y;
            sij += k as f64 * x * y;
        }
        sij / total - (si / total) * (sj / total)
    };
    let value = corr(&counts);
    let data = BootstrapData::Counts(vec![counts]);
    let b = bootstrap_ci(|r: Resampled| Ok(corr(&r.counts()?[0])), &data, DEFAULT_RESAMPLES, z.seed())?;
    Ok(Estimate { value, stderr: b.stderr })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecificHeat {
    pub value: f64,
    /// Set when a slightly negative variance was clamped to zero.
    pub clamped: bool,
}

/// c_v = β²/N² (⟨H²⟩ − ⟨H⟩²) with H given as an MPO over the whole chain.
pub fn specific_heat_from_state(state: &MpsState, hamiltonian: &Mpo, beta: f64, n: usize) -> Result<SpecificHeat> {
    let e = state.expectation_mpo(hamiltonian)?;
    let e2 = state.expectation_mpo(&hamiltonian.product(hamiltonian)?)?;
    let norm = state.norm().powi(2);
    let var = e2 / norm - (e / norm).powi(2);
    let cv = beta * beta * var / (n * n) as f64;
    if cv < -CV_NEGATIVE_TOLERANCE {
        return Err(Error::Numerical(format!("negative specific heat {cv:e}")));
    }
    if cv < 0.0 {
        log::warn!("clamping specific heat {cv:e} to zero");
        return Ok(SpecificHeat { value: 0.0, clamped: true });
    }
    Ok(SpecificHeat { value: cv, clamped: false })
}

/// Σ_p σᶻ at the listed chain positions, as a bond-dimension-2 MPO.
pub fn magnetization_mpo(n_sites: usize, positions: &[usize]) -> Result<Mpo> {
    if positions.iter().any(|&p| p >= n_sites) {
        return arg("magnetization position out of range");
    }
    let (id, z) = (gates::identity2(), gates::pauli_z());
    let zero = Tensor::zeros(&[2, 2]);
    let sites = (0..n_sites)
        .map(|k| {
            let local = if positions.contains(&k) { &z } else { &zero };
            // W = [[I, local], [0, I]] with [left, out, in, right] layout
            let blocks: [[&Tensor; 2]; 2] = [[&id, local], [&zero, &id]];
            let rows: Vec<usize> = if k == 0 { vec![0] } else { vec![0, 1] };
            let cols: Vec<usize> = if k == n_sites - 1 { vec![1] } else { vec![0, 1] };
            let mut w = Tensor::zeros(&[rows.len(), 2, 2, cols.len()]);
            for (ri, &r) in rows.iter().enumerate() {
                for (ci, &c) in cols.iter().enumerate() {
                    for s in 0..2 {
                        for t in 0..2 {
                            w.set(&[ri, s, t, ci], blocks[r][c].get(&[s, t]));
                        }
                    }
                }
            }
            w
        })
        .collect();
    Mpo::new(sites)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// β/N² (⟨M²⟩ − ⟨M⟩²)
    pub lhs: f64,
    /// β/N² Σᵢⱼ C^z_ij with C^z_ii = 1 − ⟨σᶻᵢ⟩²
    pub rhs: f64,
    pub diff: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, diff: (lhs - rhs).abs() }
    }
}

/// Checks χ = β/N² Σᵢⱼ C^z_ij on a purified state whose physical spins sit
/// at `positions`. The left side uses an M and M² MPO, the right side one-
/// and two-point expectations.
pub fn chi_correlation_identity(state: &MpsState, positions: &[usize], beta: f64) -> Result<IdentityCheck> {
    let n = positions.len();
    let m = magnetization_mpo(state.n_sites(), positions)?;
    let norm = state.norm().powi(2);
    let m1 = state.expectation_mpo(&m)? / norm;
    let m2 = state.expectation_mpo(&m.product(&m)?)? / norm;
    let lhs = beta * (m2 - m1 * m1) / (n * n) as f64;
    let z = gates::pauli_z();
    let zi: Vec<f64> = positions.iter().map(|&p| Ok(state.expectation_product(&[(p, &z)])?.re / norm)).collect::<Result<_>>()?;
    let mut sum = 0.0;
    for a in 0..n {
        sum += 1.0 - zi[a] * zi[a];
        for b in a + 1..n {
            let zz = state.expectation_product(&[(positions[a], &z), (positions[b], &z)])?.re / norm;
            sum += 2.0 * (zz - zi[a] * zi[b]);
        }
    }
    Ok(IdentityCheck::new(lhs, beta * sum / (n * n) as f64))
}

/// Same check on a dense density matrix over `n` spins.
pub fn chi_correlation_identity_dense(rho: &DMatrix<f64>, n: usize, beta: f64) -> Result<IdentityCheck> {
    if rho.nrows() != 1 << n || !rho.is_square() {
        return arg(format!("density matrix is {:?}, expected 2^{n}", rho.shape()));
    }
    let z = ZAverages::from_populations(n, rho.diagonal().as_slice());
    Ok(IdentityCheck::new(z.susceptibility(beta), z.susceptibility_from_correlations(beta)))
}

/// Samples the physical block of a state and returns a table with bits in
/// logical order: bit `q` is the qubit at chain position `layout[q]`.
pub fn sample_physical(state: &MpsState, layout: &[usize], basis: Basis, n_shots: u64, seed: u64) -> Result<ShotTable> {
    let n = layout.len();
    let mut sorted = layout.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return arg("physical qubits must occupy the leading chain positions");
    }
    sample_shots(state, &vec![basis; n], n_shots, seed)?.reorder(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{tfim, Lattice};
    use crate::oracles::{dense_gibbs, exact_susceptibility};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(basis: Basis, rows: &[(&str, u64)]) -> ShotTable {
        let mut t = ShotTable::new(vec![basis; rows[0].0.len()], 5);
        for (s, c) in rows {
            let bits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
            t.record(&bits, *c);
        }
        t
    }

    fn uniform_x(n: usize, shots: u64, seed: u64) -> ShotTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = ShotTable::new(vec![Basis::X; n], seed);
        for _ in 0..shots {
            let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            t.record(&bits, 1);
        }
        t
    }

    #[test]
    fn deterministic_z_part() {
        let spec = tfim(Lattice::chain(4).unwrap(), 1.0, 0.5);
        let shots = 40_000;
        let e = energy_from_shots(&table(Basis::Z, &[("0000", shots)]), &uniform_x(4, shots, 1), &spec).unwrap();
        assert!((e.value + 0.75).abs() < 5.0 * e.stderr);
        // four X terms of weight h, each with unit variance
        let expect = (4.0 * 0.25 / shots as f64).sqrt() / 4.0;
        assert!((e.stderr - expect).abs() < 0.01 * expect);
    }

    #[test]
    fn plus_state_energy() {
        let spec = tfim(Lattice::chain(4).unwrap(), 1.0, 0.5);
        let mut st = MpsState::zeros(4).unwrap();
        for i in 0..4 {
            st.apply_gate(&gates::hadamard(), &[i]).unwrap();
        }
        let z = sample_shots(&st, &[Basis::Z; 4], 20_000, 2).unwrap();
        let x = sample_shots(&st, &[Basis::X; 4], 20_000, 3).unwrap();
        let e = energy_from_shots(&z, &x, &spec).unwrap();
        assert!((e.value + 0.5).abs() < 5.0 * e.stderr, "{e:?}");
        assert!(energy_from_shots(&x, &z, &spec).is_err());
    }

    #[test]
    fn susceptibility_examples() {
        let chi = susceptibility_from_shots(&table(Basis::Z, &[("000", 100)]), 2.0, 3).unwrap();
        assert_eq!(chi.value, 0.0);
        assert_eq!(chi.stderr, 0.0);
        let chi = susceptibility_from_shots(&table(Basis::Z, &[("000", 500), ("111", 500)]), 2.0, 3).unwrap();
        assert!((chi.value - 2.0).abs() < 1e-12);
        assert!(susceptibility_from_shots(&table(Basis::X, &[("000", 5)]), 2.0, 3).is_err());
    }

    /// Draws Z-basis shots from the diagonal of a dense state.
    fn shots_from_populations(pop: &[f64], n: usize, shots: u64, seed: u64) -> ShotTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = ShotTable::new(vec![Basis::Z; n], seed);
        let cdf: Vec<f64> = pop.iter().scan(0.0, |a, p| { *a += p; Some(*a) }).collect();
        for _ in 0..shots {
            let u = rng.gen::<f64>() * cdf[cdf.len() - 1];
            let x = cdf.partition_point(|&c| c < u).min(pop.len() - 1);
            let bits: Vec<u8> = (0..n).map(|i| (x >> (n - 1 - i) & 1) as u8).collect();
            t.record(&bits, 1);
        }
        t
    }

    #[test]
    fn susceptibility_matches_dense_gibbs() {
        let spec = tfim(Lattice::chain(4).unwrap(), 1.0, 0.5);
        let rho = dense_gibbs(&spec, 2.0).unwrap();
        let t = shots_from_populations(rho.diagonal().as_slice(), 4, 50_000, 8);
        let chi = susceptibility_from_shots(&t, 2.0, 4).unwrap();
        let exact = exact_susceptibility(&spec, 2.0).unwrap();
        assert!((chi.value - exact).abs() < 5.0 * chi.stderr, "{chi:?} vs {exact}");
    }

    #[test]
    fn two_point_examples() {
        let prod = table(Basis::Z, &[("0101", 1000)]);
        assert_eq!(two_point_from_shots(&prod, 0, 3).unwrap().value, 0.0);
        let ghz = shots_from_populations(&[0.5, 0.0, 0.0, 0.5], 2, 10_000, 4);
        let c = two_point_from_shots(&ghz, 0, 1).unwrap();
        assert!((c.value - 1.0).abs() < 5.0 * c.stderr.max(1e-4), "{c:?}");
        assert!(two_point_from_shots(&prod, 2, 2).is_err());
    }

    fn bell_pairs(n: usize) -> MpsState {
        // a zero-layer thermofield ansatz is one Bell pair per site
        use crate::circuit::{build_tfda, simulate_mps, AnsatzConfig, AnsatzFamily, Entangler};
        let spec = tfim(Lattice::chain(n).unwrap(), 1.0, 0.5);
        let cfg = AnsatzConfig { family: AnsatzFamily::Tfda, n_physical: n, n_ancilla: n, layers: 0, entangler: Entangler::Cnot };
        let c = build_tfda(&cfg, &spec, &(0..n).collect::<Vec<_>>()).unwrap();
        simulate_mps(&c, &[], 64, 1e-12).unwrap()
    }

    #[test]
    fn maximally_mixed_specific_heat_and_identity() {
        let spec = tfim(Lattice::chain(4).unwrap(), 1.0, 0.5);
        let st = bell_pairs(4);
        let h = spec.to_mpo(&[0, 1, 2, 3], 8).unwrap();
        for beta in [0.5, 2.0] {
            let cv = specific_heat_from_state(&st, &h, beta, 4).unwrap();
            assert!((cv.value - beta * beta / 4.0).abs() < 1e-10);
            let id = chi_correlation_identity(&st, &[0, 1, 2, 3], beta).unwrap();
            assert!((id.lhs - beta / 4.0).abs() < 1e-10 && id.diff < 1e-10);
        }
    }

    #[test]
    fn eigenstate_has_no_heat() {
        let spec = tfim(Lattice::chain(3).unwrap(), 1.0, 0.0);
        let st = MpsState::from_product_state("00011").unwrap();
        let cv = specific_heat_from_state(&st, &spec.to_mpo(&[0, 1, 2], 5).unwrap(), 3.0, 3).unwrap();
        assert!(cv.value.abs() < 1e-12);
    }

    #[test]
    fn product_state_identity() {
        let mut st = MpsState::zeros(3).unwrap();
        let angles = [0.3, 1.1, 2.0];
        for (i, a) in angles.iter().enumerate() {
            st.apply_gate(&gates::ry(*a), &[i]).unwrap();
        }
        let id = chi_correlation_identity(&st, &[0, 1, 2], 1.5).unwrap();
        let expect = 1.5 * angles.iter().map(|a: &f64| 1.0 - a.cos().powi(2)).sum::<f64>() / 9.0;
        assert!((id.lhs - expect).abs() < 1e-12 && (id.rhs - expect).abs() < 1e-12);
    }

    #[test]
    fn dense_identity() {
        for n in [2, 4, 6] {
            let spec = tfim(Lattice::chain(n).unwrap(), 1.0, 0.5);
            for beta in [0.5, 2.0, 5.0] {
                let id = chi_correlation_identity_dense(&dense_gibbs(&spec, beta).unwrap(), n, beta).unwrap();
                assert!(id.diff < 1e-10);
            }
        }
        let mixed = DMatrix::identity(16, 16) / 16.0;
        let id = chi_correlation_identity_dense(&mixed, 4, 2.0).unwrap();
        assert!((id.lhs - 0.5).abs() < 1e-14 && (id.rhs - 0.5).abs() < 1e-14);
    }

    #[test]
    fn magnetization_mpo_dense() {
        let m = magnetization_mpo(3, &[0, 2]).unwrap().to_dense().unwrap();
        let z = gates::pauli_z();
        let expect = |x: usize| z.get(&[x >> 2 & 1, x >> 2 & 1]) + z.get(&[x & 1, x & 1]);
        for x in 0..8 {
            assert!((m[(x, x)] - expect(x)).norm() < 1e-14);
        }
    }
}
