//! Circuits over a register of physical qubits followed by ancillas.
//!
//! Text format (one header field per line, then one gate per line):
//!
//! ```text
//! n_physical 4
//! n_ancilla 2
//! n_params 12
//! layout 0 1 2 3 4 5
//! gates 17
//! RY 0 0
//! CNOT 0,1
//! ```

use std::fmt::Write as _;

use crate::dense::DenseState;
use crate::error::{arg, Error, Result};
use crate::tensornet::{MpsState, Tensor};

use super::gate::Gate;
use super::routing::route_to_chain;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_physical: usize,
    n_ancilla: usize,
    layout: Vec<usize>,
    gates: Vec<Gate>,
    n_params: usize,
}

/// A gate with its parameter resolved to a concrete unitary.
#[derive(Clone, Debug)]
pub struct BoundGate {
    pub sites: Vec<usize>,
    pub matrix: Tensor,
}

impl Circuit {
    pub fn new(
        n_physical: usize,
        n_ancilla: usize,
        layout: Vec<usize>,
        gates: Vec<Gate>,
        n_params: usize,
    ) -> Result<Self> {
        let n = n_physical + n_ancilla;
        if n == 0 {
            return arg("circuit needs at least one qubit");
        }
        let mut seen = vec![false; n];
        if layout.len() != n || layout.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return arg(format!("layout {layout:?} is not a permutation of 0..{n}"));
        }
        let mut used = vec![false; n_params];
        for g in &gates {
            g.validate()?;
            if let Some(&s) = g.sites.iter().find(|&&s| s >= n) {
                return arg(format!("gate {g} touches qubit {s} outside register of {n}"));
            }
            if let Some(slot) = g.param_slot {
                if slot >= n_params {
                    return arg(format!("gate {g} uses slot {slot} >= n_params {n_params}"));
                }
                used[slot] = true;
            }
        }
        if let Some(slot) = used.iter().position(|u| !u) {
            return arg(format!("parameter slot {slot} is never used"));
        }
        Ok(Self { n_physical, n_ancilla, layout, gates, n_params })
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_qubits(&self) -> usize {
        self.n_physical + self.n_ancilla
    }

    pub fn layout(&self) -> &[usize] {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Same register and parameters with a different gate list.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Result<Self> {
        Self::new(self.n_physical, self.n_ancilla, self.layout.clone(), gates, self.n_params)
    }

    /// True when every two-qubit gate acts on neighbouring chain positions.
    pub fn is_chain_local(&self) -> bool {
        self.gates
            .iter()
            .filter(|g| g.is_two_qubit())
            .all(|g| self.layout[g.sites[0]].abs_diff(self.layout[g.sites[1]]) == 1)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n_physical {}", self.n_physical).unwrap();
        writeln!(s, "n_ancilla {}", self.n_ancilla).unwrap();
        writeln!(s, "n_params {}", self.n_params).unwrap();
        let layout: Vec<String> = self.layout.iter().map(|p| p.to_string()).collect();
        writeln!(s, "layout {}", layout.join(" ")).unwrap();
        writeln!(s, "gates {}", self.gates.len()).unwrap();
        for g in &self.gates {
            writeln!(s, "{g}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut field = |name: &str| -> Result<String> {
            let (i, l) = lines.next().ok_or_else(|| Error::Parse { line: 0, message: format!("missing {name}") })?;
            l.strip_prefix(name)
                .and_then(|r| r.strip_prefix(' ').or(if r.is_empty() { Some("") } else { None }))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse { line: i + 1, message: format!("expected `{name}`") })
        };
        let num = |s: String, line: usize| -> Result<usize> {
            s.parse().map_err(|e| Error::Parse { line, message: format!("{e}") })
        };
        let n_physical = num(field("n_physical")?, 1)?;
        let n_ancilla = num(field("n_ancilla")?, 2)?;
        let n_params = num(field("n_params")?, 3)?;
        let layout = field("layout")?
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| Error::Parse { line: 4, message: format!("{e}") }))
            .collect::<Result<Vec<usize>>>()?;
        let n_gates = num(field("gates")?, 5)?;
        let mut gates = Vec::with_capacity(n_gates);
        for (i, l) in lines {
            if l.is_empty() {
                continue;
            }
            gates.push(l.parse::<Gate>().map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?);
        }
        if gates.len() != n_gates {
            return Err(Error::Parse { line: 5, message: format!("expected {n_gates} gates, found {}", gates.len()) });
        }
        Self::new(n_physical, n_ancilla, layout, gates, n_params)
    }
}

/// Resolves every gate to a unitary, keeping logical site indices.
pub fn bind_parameters(circuit: &Circuit, theta: &[f64]) -> Result<Vec<BoundGate>> {
    if theta.len() != circuit.n_params() {
        return arg(format!("expected {} parameters, got {}", circuit.n_params(), theta.len()));
    }
    Ok(circuit
        .gates()
        .iter()
        .map(|g| BoundGate { sites: g.sites.clone(), matrix: g.matrix(theta) })
        .collect())
}

/// Runs the circuit on |0…0⟩ as an MPS whose site `p` is chain position `p`.
/// Non-adjacent gates are routed first.
pub fn simulate_mps(circuit: &Circuit, theta: &[f64], chi_max: usize, svd_cutoff: f64) -> Result<MpsState> {
    let exec = route_to_chain(circuit)?;
    let lay = exec.layout();
    let mut state = MpsState::zeros(exec.n_qubits())?.with_truncation(chi_max, svd_cutoff)?;
    for g in bind_parameters(&exec, theta)? {
        let sites: Vec<usize> = g.sites.iter().map(|&q| lay[q]).collect();
        state.apply_gate(&g.matrix, &sites)?;
    }
    Ok(state)
}

/// Dense state-vector simulation with qubits placed by the layout.
pub fn simulate_dense(circuit: &Circuit, theta: &[f64]) -> Result<DenseState> {
    let mut state = DenseState::zeros(circuit.n_qubits())?;
    let lay = circuit.layout();
    for g in bind_parameters(circuit, theta)? {
        match g.sites.as_slice() {
            [q] => state.apply_1q(&g.matrix, lay[*q])?,
            [a, b] => state.apply_2q(&g.matrix, lay[*a], lay[*b])?,
            _ => unreachable!("validated arity"),
        }
    }
    Ok(state)
}
