//! The two ansatz families. Physical qubits occupy chain positions
//! `0..n_physical` and the ancilla block follows them.

use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use crate::error::{arg, Result};
use crate::models::{HamiltonianSpec, ModelKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnsatzFamily {
    Hea,
    Tfda,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entangler {
    #[default]
    Cnot,
    Rzz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub family: AnsatzFamily,
    pub n_physical: usize,
    pub n_ancilla: usize,
    pub layers: usize,
    pub entangler: Entangler,
}

struct Builder {
    gates: Vec<Gate>,
    n_params: usize,
}

impl Builder {
    fn slot(&mut self) -> usize {
        self.n_params += 1;
        self.n_params - 1
    }

    fn push(&mut self, kind: GateKind, sites: &[usize], slot: Option<usize>) -> Result<()> {
        self.gates.push(Gate::new(kind, sites.to_vec(), slot)?);
        Ok(())
    }

    fn ry_layer(&mut self, n: usize) -> Result<()> {
        for q in 0..n {
            let s = self.slot();
            self.push(GateKind::RY, &[q], Some(s))?;
        }
        Ok(())
    }
}

/// Initial RY layer, then `layers` rounds of a linear entangler chain
/// followed by another RY layer.
pub fn build_hea(cfg: &AnsatzConfig) -> Result<Circuit> {
    if cfg.family != AnsatzFamily::Hea {
        return arg("build_hea needs an HEA configuration");
    }
    if cfg.layers == 0 || cfg.n_ancilla == 0 || cfg.n_physical == 0 {
        return arg("HEA needs at least one layer, one physical and one ancilla qubit");
    }
    let n = cfg.n_physical + cfg.n_ancilla;
    let mut b = Builder { gates: Vec::new(), n_params: 0 };
    b.ry_layer(n)?;
    for _ in 0..cfg.layers {
        for q in 0..n - 1 {
            match cfg.entangler {
                Entangler::Cnot => b.push(GateKind::CNOT, &[q, q + 1], None)?,
                Entangler::Rzz => {
                    let s = b.slot();
                    b.push(GateKind::RZZ, &[q, q + 1], Some(s))?
                }
            }
        }
        b.ry_layer(n)?;
    }
    Circuit::new(cfg.n_physical, cfg.n_ancilla, (0..n).collect(), b.gates, b.n_params)
}

/// Bell pairs between physical qubit `p` and ancilla `N + p`, then `layers`
/// rounds of model-shaped evolution on both registers and an RXX coupling
/// between partners. Each gate group in a round shares one parameter.
///
/// `site_layout[s]` is the chain position of lattice site `s`.
pub fn build_tfda(cfg: &AnsatzConfig, model: &HamiltonianSpec, site_layout: &[usize]) -> Result<Circuit> {
    if cfg.family != AnsatzFamily::Tfda {
        return arg("build_tfda needs a TFDA configuration");
    }
    let n = cfg.n_physical;
    if cfg.n_ancilla != n {
        return arg(format!("TFDA needs n_ancilla = n_physical, got {} and {n}", cfg.n_ancilla));
    }
    if model.n_sites() != n {
        return arg(format!("model has {} sites for {n} physical qubits", model.n_sites()));
    }
    crate::models::check_layout(site_layout, n, n)?;
    let bonds: Vec<(usize, usize)> =
        model.lattice.bonds().into_iter().map(|(a, c)| (site_layout[a], site_layout[c])).collect();

    let mut b = Builder { gates: Vec::new(), n_params: 0 };
    for p in 0..n {
        b.push(GateKind::H, &[p], None)?;
        b.push(GateKind::CNOT, &[p, n + p], None)?;
    }
    let bond_group = |b: &mut Builder, kinds: &[GateKind]| -> Result<()> {
        let s = b.slot();
        for off in [0, n] {
            for &(x, y) in &bonds {
                for &k in kinds {
                    b.push(k, &[off + x, off + y], Some(s))?;
                }
            }
        }
        Ok(())
    };
    for _ in 0..cfg.layers {
        match model.kind {
            ModelKind::Tfim { .. } => {
                bond_group(&mut b, &[GateKind::RZZ])?;
                let s = b.slot();
                for q in 0..2 * n {
                    b.push(GateKind::RX, &[q], Some(s))?;
                }
            }
            ModelKind::Xxz { .. } => {
                bond_group(&mut b, &[GateKind::RXX, GateKind::RYY])?;
                bond_group(&mut b, &[GateKind::RZZ])?;
            }
        }
        let s = b.slot();
        for p in 0..n {
            b.push(GateKind::RXX, &[p, n + p], Some(s))?;
        }
    }
    Circuit::new(n, n, (0..2 * n).collect(), b.gates, b.n_params)
}
