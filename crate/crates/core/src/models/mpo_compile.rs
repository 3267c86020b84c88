//! Finite-state-machine MPO construction for sums of one- and two-site Pauli
//! strings with arbitrary chain distance.
//!
//! At every cut the virtual index enumerates: a "begin" state (nothing placed
//! yet), one open channel per `(start position, first operator)` whose partner
//! lies beyond the cut, and a "done" state (a full term already placed).
//! Begin and done are dropped only outside the operator's support, which makes
//! both boundary bonds one-dimensional and yields bond dimension 3 for a
//! nearest-neighbour TFIM chain and 5 for XXZ.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;

use super::hamiltonian::{check_layout, HamiltonianSpec, Pauli};
use crate::error::{arg, Result};
use crate::tensornet::{gates, Mpo, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum State {
    Begin,
    Open(usize, Pauli),
    Done,
}

struct Single {
    pos: usize,
    op: Pauli,
    coeff: f64,
}

struct Pair {
    first: usize,
    a: Pauli,
    second: usize,
    b: Pauli,
    coeff: f64,
}

fn pauli_matrix(p: Pauli) -> Tensor {
    match p {
        Pauli::X => gates::pauli_x(),
        Pauli::Y => gates::pauli_y(),
        Pauli::Z => gates::pauli_z(),
    }
}

pub(super) fn compile(spec: &HamiltonianSpec, layout: &[usize], n_total: usize) -> Result<Mpo> {
    check_layout(layout, spec.n_sites(), n_total)?;
    if spec.terms().is_empty() {
        return arg("cannot compile an empty Hamiltonian");
    }
    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    for t in spec.terms() {
        match t.ops.as_slice() {
            [(s, p)] => singles.push(Single { pos: layout[*s], op: *p, coeff: t.coeff }),
            [(s1, p1), (s2, p2)] => {
                let (x, y) = ((layout[*s1], *p1), (layout[*s2], *p2));
                let ((first, a), (second, b)) = if x.0 < y.0 { (x, y) } else { (y, x) };
                pairs.push(Pair { first, a, second, b, coeff: t.coeff });
            }
            _ => return arg("terms must act on one or two sites"),
        }
    }

    let support = singles
        .iter()
        .map(|s| s.pos)
        .chain(pairs.iter().flat_map(|p| [p.first, p.second]));
    let min_pos = support.clone().min().unwrap();
    let max_pos = support.max().unwrap();

    // states living on the bond to the right of position `cut` (cut = -1 is
    // the left boundary, encoded as None)
    let states_at = |cut: Option<usize>| -> Vec<State> {
        let mut v = Vec::new();
        let begin = match cut {
            None => true,
            Some(c) => c < max_pos,
        };
        if begin {
            v.push(State::Begin);
        }
        if let Some(c) = cut {
            let open: BTreeSet<(usize, Pauli)> = pairs
                .iter()
                .filter(|p| p.first <= c && p.second > c)
                .map(|p| (p.first, p.a))
                .collect();
            v.extend(open.into_iter().map(|(s, a)| State::Open(s, a)));
            if c >= min_pos {
                v.push(State::Done);
            }
        }
        v
    };

    let id = Tensor::identity(2);
    let mut sites = Vec::with_capacity(n_total);
    let mut left = states_at(None);
    for pos in 0..n_total {
        let right = states_at(Some(pos));
        let mut w = Tensor::zeros(&[left.len(), 2, 2, right.len()]);
        let add = |w: &mut Tensor, l: usize, r: usize, m: &Tensor, c: f64| {
            for s in 0..2 {
                for t in 0..2 {
                    let v = w.get(&[l, s, t, r]) + m.get(&[s, t]) * C64::new(c, 0.0);
                    w.set(&[l, s, t, r], v);
                }
            }
        };
        for (li, ls) in left.iter().enumerate() {
            for (ri, rs) in right.iter().enumerate() {
                match (*ls, *rs) {
                    (State::Begin, State::Begin) | (State::Done, State::Done) => {
                        add(&mut w, li, ri, &id, 1.0)
                    }
                    (State::Open(a, p), State::Open(b, q)) if a == b && p == q => {
                        add(&mut w, li, ri, &id, 1.0)
                    }
                    (State::Begin, State::Open(s, p)) if s == pos => {
                        add(&mut w, li, ri, &pauli_matrix(p), 1.0)
                    }
                    (State::Begin, State::Done) => {
                        for t in singles.iter().filter(|t| t.pos == pos) {
                            add(&mut w, li, ri, &pauli_matrix(t.op), t.coeff);
                        }
                    }
                    (State::Open(s, p), State::Done) => {
                        for t in pairs.iter().filter(|t| t.first == s && t.a == p && t.second == pos) {
                            add(&mut w, li, ri, &pauli_matrix(t.b), t.coeff);
                        }
                    }
                    _ => {}
                }
            }
        }
        sites.push(w);
        left = right;
    }
    Mpo::new(sites)
}
