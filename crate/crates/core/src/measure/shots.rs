//! Measurement outcome tables and their text format.
//!
//! ```text
//! basis ZZZZ
//! n_shots 100000
//! seed 7
//! 0000 51234
//! 0001 311
//! ```
//!
//! Data lines are sorted by bit string; bit `k` is physical site `k`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn letter(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotTable {
    basis: Vec<Basis>,
    n_shots: u64,
    counts: BTreeMap<String, u64>,
    seed: u64,
}

impl ShotTable {
    pub fn new(basis: Vec<Basis>, seed: u64) -> Self {
        Self { basis, n_shots: 0, counts: BTreeMap::new(), seed }
    }

    pub fn record(&mut self, bits: &[u8], count: u64) {
        debug_assert_eq!(bits.len(), self.basis.len());
        if count == 0 {
            return;
        }
        let key: String = bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        *self.counts.entry(key).or_insert(0) += count;
        self.n_shots += count;
    }

    pub fn basis(&self) -> &[Basis] {
        &self.basis
    }

    pub fn basis_string(&self) -> String {
        self.basis.iter().map(|b| b.letter()).collect()
    }

    pub fn uniform_basis(&self) -> Option<Basis> {
        let first = *self.basis.first()?;
        self.basis.iter().all(|&b| b == first).then_some(first)
    }

    pub fn n_sites(&self) -> usize {
        self.basis.len()
    }

    pub fn n_shots(&self) -> u64 {
        self.n_shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Outcomes as ±1 spin values (`'0'` → +1) with their multiplicities.
    pub fn spins(&self) -> impl Iterator<Item = (Vec<f64>, u64)> + '_ {
        self.counts.iter().map(|(k, &c)| {
            (k.bytes().map(|b| if b == b'0' { 1.0 } else { -1.0 }).collect(), c)
        })
    }

    /// Re-indexes bits so that new bit `k` is old bit `order[k]`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_sites() {
            return arg("reorder: permutation length differs from bit count");
        }
        let mut out = ShotTable::new(order.iter().map(|&i| self.basis[i]).collect(), self.seed);
        for (key, &c) in &self.counts {
            let b = key.as_bytes();
            let bits: Vec<u8> = order.iter().map(|&i| b[i] - b'0').collect();
            out.record(&bits, c);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "basis {}", self.basis_string()).unwrap();
        writeln!(s, "n_shots {}", self.n_shots).unwrap();
        writeln!(s, "seed {}", self.seed).unwrap();
        for (k, c) in &self.counts {
            writeln!(s, "{k} {c}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate();
        let mut header = |name: &str| -> Result<String> {
            let (i, l) = lines.next().ok_or_else(|| perr(0, format!("missing {name} header")))?;
            l.strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| perr(i + 1, format!("expected `{name} ...`")))
        };
        let basis = header("basis")?
            .chars()
            .map(|c| match c {
                'Z' => Ok(Basis::Z),
                'X' => Ok(Basis::X),
                other => Err(perr(1, format!("unknown basis letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let n_shots: u64 = header("n_shots")?.parse().map_err(|e| perr(2, format!("{e}")))?;
        let seed: u64 = header("seed")?.parse().map_err(|e| perr(3, format!("{e}")))?;
        let mut table = ShotTable::new(basis, seed);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (bits, count) = line
                .split_once(' ')
                .ok_or_else(|| perr(i + 1, "expected `bitstring count`".into()))?;
            if bits.len() != table.n_sites() || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(perr(i + 1, format!("bad bit string {bits:?}")));
            }
            let count: u64 = count.parse().map_err(|e| perr(i + 1, format!("{e}")))?;
            let raw: Vec<u8> = bits.bytes().map(|b| b - b'0').collect();
            table.record(&raw, count);
        }
        if table.n_shots != n_shots {
            return Err(perr(2, format!("header says {n_shots} shots, counts sum to {}", table.n_shots)));
        }
        Ok(table)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for ShotTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn text_round_trip(entries in proptest::collection::vec((0u8..16, 1u64..1000), 1..20), seed in any::<u64>()) {
            let mut t = ShotTable::new(vec![Basis::Z, Basis::X, Basis::Z, Basis::Z], seed);
            for (v, c) in entries {
                let bits: Vec<u8> = (0..4).map(|k| (v >> (3 - k)) & 1).collect();
                t.record(&bits, c);
            }
            let text = t.to_text();
            let back = ShotTable::from_text(&text).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn rejects_inconsistent_totals() {
        let text = "basis ZZ\nn_shots 5\nseed 1\n00 3\n";
        assert!(ShotTable::from_text(text).is_err());
    }
}
