//! Greedy SWAP routing onto the MPS chain.

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use crate::error::Result;

/// Rewrites every non-adjacent two-qubit gate as a SWAP ladder that brings
/// the second qubit next to the first, the gate itself, and the mirrored
/// ladder. The layout is back to its original value after every gate, so
/// the output keeps the input layout and only its gate list changes.
pub fn route_to_chain(circuit: &Circuit) -> Result<Circuit> {
    if circuit.is_chain_local() {
        return Ok(circuit.clone());
    }
    let layout = circuit.layout();
    let mut at = vec![0; layout.len()];
    for (q, &p) in layout.iter().enumerate() {
        at[p] = q;
    }
    let swap = |p: usize| Gate::fixed(GateKind::SWAP, &[at[p], at[p + 1]]);
    let mut out = Vec::with_capacity(circuit.gates().len());
    for g in circuit.gates() {
        if !g.is_two_qubit() {
            out.push(g.clone());
            continue;
        }
        let (pa, pb) = (layout[g.sites[0]], layout[g.sites[1]]);
        if pa.abs_diff(pb) == 1 {
            out.push(g.clone());
            continue;
        }
        // chain positions swapped, in order, while walking b towards a
        let ladder: Vec<usize> = if pb > pa { (pa + 1..pb).rev().collect() } else { (pb..pa - 1).collect() };
        for &p in &ladder {
            out.push(swap(p)?);
        }
        let landed = if pb > pa { pa + 1 } else { pa - 1 };
        out.push(Gate { sites: vec![at[pa], at[landed]], ..g.clone() });
        for &p in ladder.iter().rev() {
            out.push(swap(p)?);
        }
    }
    circuit.with_gates(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(kind: GateKind, a: usize, b: usize, n: usize) -> Circuit {
        let g = Gate::fixed(kind, &[a, b]).unwrap();
        Circuit::new(n, 0, (0..n).collect(), vec![g], 0).unwrap()
    }

    #[test]
    fn adjacent_gates_unchanged() {
        let c = single(GateKind::CNOT, 2, 1, 4);
        assert_eq!(route_to_chain(&c).unwrap(), c);
    }

    #[test]
    fn long_cnot_gets_two_swaps_each_side() {
        let r = route_to_chain(&single(GateKind::CNOT, 0, 3, 4)).unwrap();
        let text: Vec<String> = r.gates().iter().map(|g| g.to_string()).collect();
        assert_eq!(text, ["SWAP 2,3", "SWAP 1,2", "CNOT 0,1", "SWAP 1,2", "SWAP 2,3"]);
    }

    #[test]
    fn backwards_gate() {
        let r = route_to_chain(&single(GateKind::CNOT, 4, 1, 5)).unwrap();
        let text: Vec<String> = r.gates().iter().map(|g| g.to_string()).collect();
        assert_eq!(text, ["SWAP 1,2", "SWAP 2,3", "CNOT 4,3", "SWAP 2,3", "SWAP 1,2"]);
        assert!(r.is_chain_local());
    }
}
