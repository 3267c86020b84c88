//! Gate matrices. Rotations follow R_P(θ) = exp(−iθP/2); two-qubit matrices
//! are written in the basis |q0 q1⟩ with the first qubit most significant.

use num_complex::Complex64 as C64;

use super::tensor::Tensor;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat(n: usize, data: Vec<C64>) -> Tensor {
    Tensor::from_vec(&[n, n], data).expect("static gate shape")
}

pub fn identity2() -> Tensor {
    Tensor::identity(2)
}

pub fn pauli_x() -> Tensor {
    mat(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> Tensor {
    mat(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> Tensor {
    mat(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn hadamard() -> Tensor {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat(2, vec![c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)])
}

pub fn rx(theta: f64) -> Tensor {
    let (s, co) = (theta / 2.0).sin_cos();
    mat(2, vec![c(co, 0.), c(0., -s), c(0., -s), c(co, 0.)])
}

pub fn ry(theta: f64) -> Tensor {
    let (s, co) = (theta / 2.0).sin_cos();
    mat(2, vec![c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)])
}

pub fn rz(theta: f64) -> Tensor {
    let (s, co) = (theta / 2.0).sin_cos();
    mat(2, vec![c(co, -s), c(0., 0.), c(0., 0.), c(co, s)])
}

pub fn cnot() -> Tensor {
    let mut t = Tensor::zeros(&[4, 4]);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        t.set(&[r, col], c(1., 0.));
    }
    t
}

pub fn swap() -> Tensor {
    let mut t = Tensor::zeros(&[4, 4]);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        t.set(&[r, col], c(1., 0.));
    }
    t
}

pub fn rzz(theta: f64) -> Tensor {
    let (s, co) = (theta / 2.0).sin_cos();
    let mut t = Tensor::zeros(&[4, 4]);
    for (k, sign) in [(0, 1.0), (1, -1.0), (2, -1.0), (3, 1.0)] {
        t.set(&[k, k], c(co, -sign * s));
    }
    t
}

/// cos(θ/2)·I − i sin(θ/2)·(P⊗P) for a two-qubit Pauli product with real
/// entries `pp` (XX or YY).
fn pauli_pair_rotation(theta: f64, pp: [[f64; 4]; 4]) -> Tensor {
    let (s, co) = (theta / 2.0).sin_cos();
    let mut t = Tensor::zeros(&[4, 4]);
    for r in 0..4 {
        for col in 0..4 {
            let id = if r == col { co } else { 0.0 };
            t.set(&[r, col], c(id, -s * pp[r][col]));
        }
    }
    t
}

pub fn rxx(theta: f64) -> Tensor {
    pauli_pair_rotation(
        theta,
        [[0., 0., 0., 1.], [0., 0., 1., 0.], [0., 1., 0., 0.], [1., 0., 0., 0.]],
    )
}

pub fn ryy(theta: f64) -> Tensor {
    pauli_pair_rotation(
        theta,
        [[0., 0., 0., -1.], [0., 0., 1., 0.], [0., 1., 0., 0.], [-1., 0., 0., 0.]],
    )
}

/// Kronecker product of two 2×2 matrices (first factor acts on the most
/// significant qubit).
pub fn kron2(a: &Tensor, b: &Tensor) -> Tensor {
    let mut t = Tensor::zeros(&[4, 4]);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    t.set(&[2 * i + k, 2 * j + l], a.get(&[i, j]) * b.get(&[k, l]));
                }
            }
        }
    }
    t
}

/// Conjugate transpose of a square matrix tensor.
pub fn adjoint(g: &Tensor) -> Tensor {
    g.permute(&[1, 0]).expect("rank-2 gate").conj()
}
