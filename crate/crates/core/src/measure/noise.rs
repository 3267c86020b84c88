//! Stochastic Pauli noise after two-qubit gates, simulated by trajectories.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shots::{Basis, ShotTable};
use crate::circuit::Circuit;
use crate::error::{arg, Error, Result};
use crate::tensornet::{gates, MpsState, Sampler, Tensor, DEFAULT_CHI_MAX, DEFAULT_SVD_CUTOFF};

pub const MAX_TWO_QUBIT_ERROR: f64 = 0.1;
pub const MAX_READOUT_FLIP: f64 = 0.05;

/// Two-qubit depolarizing noise as a random non-identity Pauli pair with
/// probability `p`, plus independent readout bit flips.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
    pub readout_flip: f64,
}

impl NoiseModel {
    pub fn new(p: f64, readout_flip: f64) -> Result<Self> {
        if !(0.0..=MAX_TWO_QUBIT_ERROR).contains(&p) {
            return Err(Error::NumericInput(format!("two-qubit error rate {p} outside [0, {MAX_TWO_QUBIT_ERROR}]")));
        }
        if !(0.0..=MAX_READOUT_FLIP).contains(&readout_flip) {
            return Err(Error::NumericInput(format!("readout flip rate {readout_flip} outside [0, {MAX_READOUT_FLIP}]")));
        }
        Ok(Self { p, readout_flip })
    }

    pub fn is_noiseless(&self) -> bool {
        self.p == 0.0 && self.readout_flip == 0.0
    }
}

enum Op {
    Gate(Tensor, Vec<usize>),
    /// Error location after a two-qubit gate, on two chain positions.
    Slot(usize, usize),
}

/// Flattens the circuit to chain-position operations. A long-range gate is
/// expanded into its SWAP ladder and the error slot follows the whole ladder.
fn compile(circuit: &Circuit, theta: &[f64]) -> Result<(Vec<Op>, Vec<usize>)> {
    if theta.len() != circuit.n_params() {
        return arg(format!("expected {} parameters, got {}", circuit.n_params(), theta.len()));
    }
    let lay = circuit.layout();
    let mut ops = Vec::new();
    let mut slots = Vec::new();
    for g in circuit.gates() {
        let m = g.matrix(theta);
        let (pa, pb) = match g.sites[..] {
            [a] => {
                ops.push(Op::Gate(m, vec![lay[a]]));
                continue;
            }
            [a, b] => (lay[a], lay[b]),
            _ => unreachable!("validated arity"),
        };
        // same ladder as chain routing: walk b next to a and back
        let ladder: Vec<usize> = if pb > pa { (pa + 1..pb).rev().collect() } else { (pb..pa.saturating_sub(1)).collect() };
        for &p in &ladder {
            ops.push(Op::Gate(gates::swap(), vec![p, p + 1]));
        }
        let landed = if pb > pa { pa + 1 } else { pa - 1 };
        ops.push(Op::Gate(m, vec![pa, landed]));
        for &p in ladder.iter().rev() {
            ops.push(Op::Gate(gates::swap(), vec![p, p + 1]));
        }
        slots.push(ops.len());
        ops.push(Op::Slot(pa, pb));
    }
    Ok((ops, slots))
}

/// Error pattern of one shot: `(slot, pauli)` with pauli in 1..16 encoding
/// the pair (pauli / 4, pauli % 4) over I, X, Y, Z.
type Pattern = Vec<(u32, u8)>;

fn pauli(k: u8) -> Option<Tensor> {
    match k {
        1 => Some(gates::pauli_x()),
        2 => Some(gates::pauli_y()),
        3 => Some(gates::pauli_z()),
        _ => None,
    }
}

fn apply_error(state: &mut MpsState, a: usize, b: usize, code: u8) -> Result<()> {
    if let Some(m) = pauli(code / 4) {
        state.apply_gate(&m, &[a])?;
    }
    if let Some(m) = pauli(code % 4) {
        state.apply_gate(&m, &[b])?;
    }
    Ok(())
}

/// Runs ops `from..` on `state`, inserting the errors of `pattern` (all at
/// or after `from`).
fn run(state: &mut MpsState, ops: &[Op], slots: &[usize], from: usize, pattern: &[(u32, u8)]) -> Result<()> {
    let mut next = pattern.iter().peekable();
    for (i, op) in ops.iter().enumerate().skip(from) {
        match op {
            Op::Gate(m, sites) => state.apply_gate(m, sites)?,
            Op::Slot(a, b) => {
                if let Some(&&(s, code)) = next.peek() {
                    if slots[s as usize] == i {
                        apply_error(state, *a, *b, code)?;
                        next.next();
                    }
                }
            }
        }
    }
    Ok(())
}

/// Noisy measurement of the physical block in a uniform basis. Bits come
/// back in logical qubit order, as from noiseless sampling.
pub fn noisy_sample(circuit: &Circuit, theta: &[f64], noise: &NoiseModel, basis: Basis, n_shots: u64, seed: u64) -> Result<ShotTable> {
    noisy_sample_with_truncation(circuit, theta, noise, basis, n_shots, seed, DEFAULT_CHI_MAX, DEFAULT_SVD_CUTOFF)
}

#[allow(clippy::too_many_arguments)]
pub fn noisy_sample_with_truncation(
    circuit: &Circuit,
    theta: &[f64],
    noise: &NoiseModel,
    basis: Basis,
    n_shots: u64,
    seed: u64,
    chi_max: usize,
    svd_cutoff: f64,
) -> Result<ShotTable> {
    NoiseModel::new(noise.p, noise.readout_flip)?;
    if n_shots == 0 {
        return arg("n_shots must be positive");
    }
    let n = circuit.n_physical();
    let lay = &circuit.layout()[..n];
    let mut sorted = lay.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return arg("physical qubits must occupy the leading chain positions");
    }
    let (ops, slots) = compile(circuit, theta)?;

    // error pattern of every shot, grouped; the empty pattern sorts first
    let mut groups: BTreeMap<Pattern, u64> = BTreeMap::new();
    let mut prng = ChaCha8Rng::seed_from_u64(seed);
    prng.set_stream(u64::MAX);
    for _ in 0..n_shots {
        let mut pat = Pattern::new();
        if noise.p > 0.0 {
            for s in 0..slots.len() {
                if prng.gen::<f64>() < noise.p {
                    pat.push((s as u32, prng.gen_range(1..16)));
                }
            }
        }
        *groups.entry(pat).or_default() += 1;
    }
    let groups: Vec<(Pattern, u64)> = groups.into_iter().collect();

    // noiseless snapshots before a spread of slots to start trajectories from
    let blank = MpsState::zeros(circuit.n_qubits())?.with_truncation(chi_max, svd_cutoff)?;
    let stride = slots.len().div_ceil(32).max(1);
    let mut snaps: Vec<(usize, MpsState)> = vec![(0, blank.clone())];
    {
        let mut st = blank;
        let mut done = 0;
        for (k, &slot_op) in slots.iter().enumerate().step_by(stride).skip(1) {
            run(&mut st, &ops[..slot_op], &slots, done, &[])?;
            done = slot_op;
            snaps.push((k, st.clone()));
        }
    }

    // Trajectories sharing their first error are simulated from one state.
    let mut by_first: Vec<(usize, usize)> = Vec::new(); // group index ranges
    for (i, (pat, _)) in groups.iter().enumerate() {
        match by_first.last_mut() {
            Some((start, end)) if groups[*start].0.first() == pat.first() => *end = i + 1,
            _ => by_first.push((i, i + 1)),
        }
    }
    let measured = vec![basis; n];
    let tables = by_first
        .par_iter()
        .map(|&(start, end)| -> Result<Vec<(usize, ShotTable)>> {
            let first = groups[start].0.first().copied();
            let (from, base) = match first {
                None => (0, snaps[0].1.clone()),
                Some((s, code)) => {
                    let (k, st) = snaps.iter().rev().find(|(k, _)| *k <= s as usize).unwrap();
                    let mut st = st.clone();
                    let from = if *k == 0 { 0 } else { slots[*k] };
                    run(&mut st, &ops[..slots[s as usize]], &slots, from, &[])?;
                    let Op::Slot(a, b) = ops[slots[s as usize]] else { unreachable!() };
                    apply_error(&mut st, a, b, code)?;
                    (slots[s as usize] + 1, st)
                }
            };
            let mut out = Vec::with_capacity(end - start);
            for (g, (pat, count)) in groups.iter().enumerate().take(end).skip(start) {
                let mut st = base.clone();
                let rest = if first.is_some() { &pat[1..] } else { &pat[..] };
                run(&mut st, &ops, &slots, from, rest)?;
                out.push((g, draw(&st, &measured, *count, seed, g as u64, noise.readout_flip)?));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = ShotTable::new(measured, seed);
    for (_, t) in tables.into_iter().flatten() {
        for (key, &c) in t.counts() {
            let bits: Vec<u8> = key.bytes().map(|b| b - b'0').collect();
            table.record(&bits, c);
        }
    }
    table.reorder(lay)
}

/// Samples `count` shots from one trajectory. Group 0 uses the plain seed
/// stream, which makes the noiseless case coincide with `sample_shots`.
fn draw(state: &MpsState, basis: &[Basis], count: u64, seed: u64, group: u64, flip: f64) -> Result<ShotTable> {
    let sampler = Sampler::new(state, basis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(group);
    let mut frng = ChaCha8Rng::seed_from_u64(seed);
    frng.set_stream((1 << 40) + group);
    let mut t = ShotTable::new(basis.to_vec(), seed);
    let mut bits = vec![0u8; basis.len()];
    for _ in 0..count {
        sampler.draw(&mut rng, &mut bits);
        if flip > 0.0 {
            for b in bits.iter_mut() {
                if frng.gen::<f64>() < flip {
                    *b ^= 1;
                }
            }
        }
        t.record(&bits, 1);
    }
    Ok(t)
}
