// SPDX-License-Identifier: Apache-2.0

//! Independent statevector oracle for the noiseless four-qubit chain.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rx(t: f64) -> DMatrix<Complex64> {
    let (s, co) = (t / 2.0).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
}

fn ry(t: f64) -> DMatrix<Complex64> {
    let (s, co) = (t / 2.0).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

fn kron4(ops: [DMatrix<Complex64>; 4]) -> DMatrix<Complex64> {
    let [a, b, cc, d] = ops;
    a.kronecker(&b).kronecker(&cc).kronecker(&d)
}

/// Diagonal CZ between two of the four qubits (qubit 0 is the MSB).
fn cz(p: usize, q: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::identity(16, 16);
    for i in 0..16 {
        if (i >> (3 - p)) & 1 == 1 && (i >> (3 - q)) & 1 == 1 {
            m[(i, i)] = c(-1.0, 0.0);
        }
    }
    m
}

/// Straight-line statevector evaluation of the noiseless chain.
pub fn oracle(phi: f64) -> Vec<f64> {
    let [a, b, ap, bp] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
    // |0⟩ ⊗ (|01⟩ − |10⟩)/√2 ⊗ |0⟩
    let mut psi = DVector::from_element(16, c(0.0, 0.0));
    psi[0b0010] = c(FRAC_1_SQRT_2, 0.0);
    psi[0b0100] = c(-FRAC_1_SQRT_2, 0.0);

    let first = kron4([ry(phi), rx(a), rx(b), ry(phi)]);
    let entangle = cz(1, 0) * cz(2, 3);
    let second = kron4([ry(-FRAC_PI_2), rx(-(ap - a)), rx(-(bp - b)), ry(-FRAC_PI_2)]);
    let out = second * entangle * first * psi;
    out.iter().map(|z| z.norm_sqr()).collect()
}
