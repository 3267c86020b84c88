use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

/// Open-boundary lattice. Grid sites are indexed row-major: `r * cols + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lattice {
    Chain { n: usize },
    Grid { rows: usize, cols: usize },
}

impl Lattice {
    pub fn chain(n: usize) -> Result<Self> {
        if n < 2 {
            return arg(format!("chain needs at least 2 sites, got {n}"));
        }
        Ok(Lattice::Chain { n })
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return arg(format!("grid {rows}x{cols} needs at least 2 sites"));
        }
        Ok(Lattice::Grid { rows, cols })
    }

    pub fn n_sites(&self) -> usize {
        match *self {
            Lattice::Chain { n } => n,
            Lattice::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn is_chain(&self) -> bool {
        matches!(self, Lattice::Chain { .. })
    }

    /// Nearest-neighbour pairs `(i, j)` with `i < j`, each listed once.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        match *self {
            Lattice::Chain { n } => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Lattice::Grid { rows, cols } => {
                let mut out = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        let s = r * cols + c;
                        if c + 1 < cols {
                            out.push((s, s + 1));
                        }
                        if r + 1 < rows {
                            out.push((s, s + cols));
                        }
                    }
                }
                out
            }
        }
    }

    /// Site → chain position used to lay the lattice onto an MPS.
    pub fn default_layout(&self) -> Vec<usize> {
        match *self {
            Lattice::Chain { n } => (0..n).collect(),
            Lattice::Grid { rows, cols } => snake_map(rows, cols),
        }
    }
}

/// Boustrophedon ordering of a `rows × cols` grid: even rows run left to
/// right, odd rows right to left. Entry `r * cols + c` holds the chain index
/// of site `(r, c)`.
pub fn snake_map(rows: usize, cols: usize) -> Vec<usize> {
    let mut map = vec![0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let pos = if r % 2 == 0 { c } else { cols - 1 - c };
            map[r * cols + c] = r * cols + pos;
        }
    }
    map
}
