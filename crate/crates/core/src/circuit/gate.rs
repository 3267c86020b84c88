use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::tensornet::{gates, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    RZZ,
    RXX,
    RYY,
    H,
    CNOT,
    SWAP,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::H => 1,
            _ => 2,
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RZZ | GateKind::RXX | GateKind::RYY)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::RZZ => "RZZ",
            GateKind::RXX => "RXX",
            GateKind::RYY => "RYY",
            GateKind::H => "H",
            GateKind::CNOT => "CNOT",
            GateKind::SWAP => "SWAP",
        }
    }

    /// Matrix for the rotation angle `theta` (ignored by fixed gates).
    pub fn matrix(self, theta: f64) -> Tensor {
        match self {
            GateKind::RX => gates::rx(theta),
            GateKind::RY => gates::ry(theta),
            GateKind::RZ => gates::rz(theta),
            GateKind::RZZ => gates::rzz(theta),
            GateKind::RXX => gates::rxx(theta),
            GateKind::RYY => gates::ryy(theta),
            GateKind::H => gates::hadamard(),
            GateKind::CNOT => gates::cnot(),
            GateKind::SWAP => gates::swap(),
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "RZZ" => GateKind::RZZ,
            "RXX" => GateKind::RXX,
            "RYY" => GateKind::RYY,
            "H" => GateKind::H,
            "CNOT" => GateKind::CNOT,
            "SWAP" => GateKind::SWAP,
            other => return arg(format!("unknown gate kind {other:?}")),
        })
    }
}

/// One gate of a circuit. `adjoint` marks the inverse gate, produced by
/// folding; for rotations it negates the angle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub sites: Vec<usize>,
    pub param_slot: Option<usize>,
    pub adjoint: bool,
}

impl Gate {
    pub fn new(kind: GateKind, sites: Vec<usize>, param_slot: Option<usize>) -> Result<Self> {
        let g = Gate { kind, sites, param_slot, adjoint: false };
        g.validate()?;
        Ok(g)
    }

    pub fn fixed(kind: GateKind, sites: &[usize]) -> Result<Self> {
        Self::new(kind, sites.to_vec(), None)
    }

    pub fn rotation(kind: GateKind, sites: &[usize], slot: usize) -> Result<Self> {
        Self::new(kind, sites.to_vec(), Some(slot))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites.len() != self.kind.arity() {
            return arg(format!("{} needs {} sites, got {:?}", self.kind.name(), self.kind.arity(), self.sites));
        }
        if self.sites.len() == 2 && self.sites[0] == self.sites[1] {
            return arg(format!("{} on repeated site {}", self.kind.name(), self.sites[0]));
        }
        if self.kind.is_parameterized() != self.param_slot.is_some() {
            return arg(format!("{} parameter slot mismatch", self.kind.name()));
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        self.sites.len() == 2
    }

    pub fn inverse(&self) -> Gate {
        Gate { adjoint: !self.adjoint, ..self.clone() }
    }

    /// Concrete unitary given the parameter vector.
    pub fn matrix(&self, theta: &[f64]) -> Tensor {
        let angle = self.param_slot.map(|s| theta[s]).unwrap_or(0.0);
        if self.kind.is_parameterized() {
            self.kind.matrix(if self.adjoint { -angle } else { angle })
        } else if self.adjoint {
            gates::adjoint(&self.kind.matrix(0.0))
        } else {
            self.kind.matrix(0.0)
        }
    }
}

impl fmt::Display for Gate {
    /// `KIND[_DG] site[,site] [slot]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if self.adjoint {
            f.write_str("_DG")?;
        }
        let sites: Vec<String> = self.sites.iter().map(|s| s.to_string()).collect();
        write!(f, " {}", sites.join(","))?;
        if let Some(s) = self.param_slot {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.split(' ');
        let kind_tok = parts.next().unwrap_or_default();
        let (kind_name, adjoint) = match kind_tok.strip_suffix("_DG") {
            Some(k) => (k, true),
            None => (kind_tok, false),
        };
        let kind: GateKind = kind_name.parse()?;
        let sites = parts
            .next()
            .ok_or_else(|| Error::Argument(format!("gate line {line:?} has no sites")))?
            .split(',')
            .map(|s| s.parse::<usize>().map_err(|e| Error::Argument(format!("bad site in {line:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let param_slot = parts
            .next()
            .map(|s| s.parse::<usize>().map_err(|e| Error::Argument(format!("bad slot in {line:?}: {e}"))))
            .transpose()?;
        if parts.next().is_some() {
            return arg(format!("trailing tokens in gate line {line:?}"));
        }
        let mut g = Gate::new(kind, sites, param_slot)?;
        g.adjoint = adjoint;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn ry_zero_is_identity() {
        let g = Gate::rotation(GateKind::RY, &[0], 0).unwrap();
        assert_eq!(g.matrix(&[0.0]), Tensor::identity(2));
    }

    #[test]
    fn ry_pi_flips() {
        let m = GateKind::RY.matrix(std::f64::consts::PI);
        // RY(π)|0⟩ = |1⟩
        assert!(m.get(&[0, 0]).norm() < 1e-15);
        assert!((m.get(&[1, 0]).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rzz_matches_matrix_exponential() {
        // Oracle: exp(−iθ/2·ZZ) via truncated Taylor series of a diagonal
        // generator, evaluated entry-wise.
        let theta = 0.731;
        let m = GateKind::RZZ.matrix(theta);
        let zz = [1.0, -1.0, -1.0, 1.0];
        for k in 0..4 {
            let x = C64::new(0.0, -theta / 2.0 * zz[k]);
            let mut term = C64::new(1.0, 0.0);
            let mut sum = term;
            for n in 1..40 {
                term = term * x / n as f64;
                sum += term;
            }
            assert!((m.get(&[k, k]) - sum).norm() < 1e-12);
        }
        assert!((m.get(&[0, 0]) - C64::from_polar(1.0, -theta / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn arity_and_slot_checks() {
        assert!(Gate::new(GateKind::CNOT, vec![0], None).is_err());
        assert!(Gate::new(GateKind::CNOT, vec![1, 1], None).is_err());
        assert!(Gate::new(GateKind::RX, vec![0], None).is_err());
        assert!(Gate::new(GateKind::H, vec![0], Some(0)).is_err());
    }

    #[test]
    fn text_form() {
        let mut g = Gate::rotation(GateKind::RZZ, &[3, 4], 7).unwrap();
        g.adjoint = true;
        assert_eq!(g.to_string(), "RZZ_DG 3,4 7");
        assert_eq!("RZZ_DG 3,4 7".parse::<Gate>().unwrap(), g);
        assert_eq!("H 2".parse::<Gate>().unwrap().to_string(), "H 2");
    }
}
