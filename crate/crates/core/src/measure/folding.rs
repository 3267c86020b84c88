//! Local unitary folding of two-qubit gates.

use crate::circuit::{Circuit, Gate};
use crate::error::{arg, Result};

/// Scales the two-qubit gate count by `lambda` without changing the unitary.
///
/// Every two-qubit gate G becomes G (G† G)^k with k = ⌊(λ−1)/2⌋. The
/// remaining fraction of (λ−1)/2 is spent on one more pair for the first
/// two-qubit gates in circuit order, rounded to the nearest gate.
pub fn fold_gates(circuit: &Circuit, lambda: f64) -> Result<Circuit> {
    if !lambda.is_finite() || lambda < 1.0 {
        return arg(format!("noise factor must be ≥ 1, got {lambda}"));
    }
    let n2 = circuit.two_qubit_count();
    let half = (lambda - 1.0) / 2.0;
    let k = half.floor() as usize;
    let extra = ((half - k as f64) * n2 as f64).round() as usize;
    let mut out: Vec<Gate> = Vec::with_capacity(circuit.gates().len() + 2 * (k + 1) * n2);
    let mut seen = 0;
    for g in circuit.gates() {
        out.push(g.clone());
        if !g.is_two_qubit() {
            continue;
        }
        let pairs = k + usize::from(seen < extra);
        seen += 1;
        for _ in 0..pairs {
            out.push(g.inverse());
            out.push(g.clone());
        }
    }
    circuit.with_gates(out)
}
