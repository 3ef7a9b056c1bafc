// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{Axis, Gate, ProbabilityTable, MAX_QUBITS, NORMALISATION_TOL};
use crate::error::{invalid, Result};

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Density matrix of an `n`-qubit register, stored dense and row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// Product state with qubit `q` in `(1 − p_q)|0⟩⟨0| + p_q|1⟩⟨1|`.
    pub fn thermal(n_qubits: usize, thermal_pops: &[f64]) -> Result<Self> {
        check_register_size(n_qubits)?;
        if thermal_pops.len() != n_qubits {
            return Err(invalid(format!(
                "expected {n_qubits} thermal populations, got {}",
                thermal_pops.len()
            )));
        }
        for (q, &p) in thermal_pops.iter().enumerate() {
            if !(0.0..=0.5).contains(&p) {
                return Err(invalid(format!(
                    "thermal population {p} of qubit {q} outside [0, 0.5]"
                )));
            }
        }
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            let mut w = 1.0;
            for (q, &p) in thermal_pops.iter().enumerate() {
                w *= if bit_of(i, q, n_qubits) { p } else { 1.0 - p };
            }
            data[i * dim + i] = Complex64::new(w, 0.0);
        }
        Ok(Self { n_qubits, data })
    }

    pub fn ground(n_qubits: usize) -> Result<Self> {
        Self::thermal(n_qubits, &vec![0.0; n_qubits])
    }

    /// `|ψ⟩⟨ψ|` for a normalised amplitude vector.
    pub fn from_pure(n_qubits: usize, amplitudes: &[Complex64]) -> Result<Self> {
        check_register_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(invalid(format!(
                "expected {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORMALISATION_TOL {
            return Err(invalid(format!("state vector norm² {norm} is not 1")));
        }
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Ok(Self { n_qubits, data })
    }

    /// Wraps a row-major matrix after checking trace and Hermiticity.
    pub fn from_matrix(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        check_register_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} matrix elements, got {}",
                dim * dim,
                data.len()
            )));
        }
        let rho = Self { n_qubits, data };
        if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > NORMALISATION_TOL {
            return Err(invalid("density matrix trace is not 1"));
        }
        if rho.hermiticity_error() > NORMALISATION_TOL {
            return Err(invalid("density matrix is not Hermitian"));
        }
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.to_nalgebra());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest element-wise distance to another state of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "register size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Conjugates qubit `q` by an arbitrary 2×2 matrix: `ρ → UρU†`.
    pub fn apply_1q_matrix(&mut self, q: usize, u: &Mat2) -> Result<()> {
        self.check_qubit(q)?;
        self.conjugate_unchecked(q, u);
        Ok(())
    }

    /// Conjugates qubit `q` by `exp(−i·angle·σ_axis/2)`.
    pub fn rotate(&mut self, q: usize, axis: Axis, angle: f64) -> Result<()> {
        Gate::Rotation {
            axis,
            qubit: q,
            angle,
        }
        .validate(self.n_qubits)?;
        self.conjugate_unchecked(q, &axis.rotation(angle));
        Ok(())
    }

    /// Conjugates by `diag(1, 1, 1, −1)` on the `(q1, q2)` subspace.
    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        Gate::Cz(q1, q2).validate(self.n_qubits)?;
        let dim = self.dim();
        let mask = bit_mask(q1, self.n_qubits) | bit_mask(q2, self.n_qubits);
        let sign = |i: usize| if i & mask == mask { -1.0 } else { 1.0 };
        for i in 0..dim {
            let si = sign(i);
            for j in 0..dim {
                let s = si * sign(j);
                if s < 0.0 {
                    self.data[i * dim + j] = -self.data[i * dim + j];
                }
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::Rotation { axis, qubit, angle } => self.rotate(qubit, axis, angle),
            Gate::Cz(a, b) => self.apply_cz(a, b),
        }
    }

    /// Applies a single-qubit channel `ρ → Σ_k K_k ρ K_k†` on qubit `q`.
    ///
    /// Completeness of the Kraus set is the caller's responsibility.
    pub fn apply_kraus_1q(&mut self, q: usize, kraus: &[Mat2]) -> Result<()> {
        self.check_qubit(q)?;
        let mut acc = vec![ZERO; self.data.len()];
        for k in kraus {
            let mut branch = self.clone();
            branch.conjugate_unchecked(q, k);
            for (a, b) in acc.iter_mut().zip(&branch.data) {
                *a += b;
            }
        }
        self.data = acc;
        Ok(())
    }

    /// Computational-basis probabilities of the full register.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.get(i, i).re.max(0.0))
            .collect()
    }

    /// Marginal distribution over `qubits`, listed qubit first = most
    /// significant outcome bit.
    pub fn outcome_distribution(&self, qubits: &[usize]) -> Result<ProbabilityTable> {
        self.check_subset(qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, p) in self.probabilities().into_iter().enumerate() {
            probs[self.sub_index(i, qubits)] += p;
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        let roles = qubits.iter().map(|q| format!("q{q}")).collect();
        ProbabilityTable::new(roles, probs)
    }

    /// `⟨Z_q⟩ = 1 − 2·P(q = 1)`.
    pub fn expectation_z(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let p1: f64 = self
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| bit_of(*i, q, self.n_qubits))
            .map(|(_, p)| p)
            .sum();
        Ok((1.0 - 2.0 * p1).clamp(-1.0, 1.0))
    }

    /// Reduced state of `keep`, tracing out every other qubit.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.check_subset(keep)?;
        let dim = self.dim();
        let rest_mask = (0..self.n_qubits)
            .filter(|q| !keep.contains(q))
            .fold(0, |m, q| m | bit_mask(q, self.n_qubits));
        let sub_dim = 1usize << keep.len();
        let mut data = vec![ZERO; sub_dim * sub_dim];
        for i in 0..dim {
            let si = self.sub_index(i, keep);
            for j in 0..dim {
                if i & rest_mask == j & rest_mask {
                    data[si * sub_dim + self.sub_index(j, keep)] += self.get(i, j);
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            data,
        })
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalised pure state.
    pub fn fidelity_to_pure(&self, amplitudes: &[Complex64]) -> Result<f64> {
        let dim = self.dim();
        if amplitudes.len() != dim {
            return Err(invalid(format!(
                "expected {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += amplitudes[i].conj() * self.get(i, j) * amplitudes[j];
            }
        }
        Ok(acc.re)
    }

    /// Wootters concurrence of a two-qubit state.
    pub fn concurrence(&self) -> Result<f64> {
        if self.n_qubits != 2 {
            return Err(invalid(format!(
                "concurrence needs a 2-qubit state, got {} qubits",
                self.n_qubits
            )));
        }
        let rho = self.to_nalgebra();
        let eig = SymmetricEigen::new(rho.clone());
        let sqrt_vals = eig
            .eigenvalues
            .map(|l| Complex64::new(clip_round_off(l).sqrt(), 0.0));
        let v = &eig.eigenvectors;
        let sqrt_rho = v * DMatrix::from_diagonal(&sqrt_vals) * v.adjoint();

        // ρ̃ = (Y⊗Y) ρ* (Y⊗Y); Y⊗Y is real: anti-diagonal (−1, 1, 1, −1).
        let mut yy = DMatrix::<Complex64>::zeros(4, 4);
        for (r, s) in [(0, -1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
            yy[(r, 3 - r)] = Complex64::new(s, 0.0);
        }
        let rho_tilde = &yy * rho.conjugate() * &yy;
        let m = &sqrt_rho * rho_tilde * &sqrt_rho;
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut lambdas: Vec<f64> = SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .map(|&x| clip_round_off(x).sqrt())
            .collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(invalid(format!(
                "qubit index {q} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    fn check_subset(&self, qubits: &[usize]) -> Result<()> {
        if qubits.is_empty() {
            return Err(invalid("qubit list is empty"));
        }
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(invalid(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    fn sub_index(&self, i: usize, qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |acc, &q| {
            (acc << 1) | usize::from(bit_of(i, q, self.n_qubits))
        })
    }

    fn conjugate_unchecked(&mut self, q: usize, u: &Mat2) {
        let dim = self.dim();
        let m = bit_mask(q, self.n_qubits);
        // ρ ← Uρ
        for col in 0..dim {
            for i in (0..dim).filter(|i| i & m == 0) {
                let a = self.data[i * dim + col];
                let b = self.data[(i | m) * dim + col];
                self.data[i * dim + col] = u[0][0] * a + u[0][1] * b;
                self.data[(i | m) * dim + col] = u[1][0] * a + u[1][1] * b;
            }
        }
        // ρ ← ρU†
        let ud = [
            [u[0][0].conj(), u[1][0].conj()],
            [u[0][1].conj(), u[1][1].conj()],
        ];
        for row in 0..dim {
            let base = row * dim;
            for j in (0..dim).filter(|j| j & m == 0) {
                let a = self.data[base + j];
                let b = self.data[base + (j | m)];
                self.data[base + j] = a * ud[0][0] + b * ud[1][0];
                self.data[base + (j | m)] = a * ud[0][1] + b * ud[1][1];
            }
        }
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let m = DMatrix::from_row_slice(dim, dim, &self.data);
        // Symmetrise so round-off never makes the eigensolver see a non-Hermitian input.
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

/// Zeroes eigenvalues that are round-off, so their square roots do not
/// leak ~1e-8 into the result.
fn clip_round_off(x: f64) -> f64 {
    if x < 1e-14 {
        0.0
    } else {
        x
    }
}

fn check_register_size(n_qubits: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(invalid(format!(
            "register size {n_qubits} outside [1, {MAX_QUBITS}]"
        )));
    }
    Ok(())
}

fn bit_mask(q: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - q)
}

fn bit_of(index: usize, q: usize, n_qubits: usize) -> bool {
    index & bit_mask(q, n_qubits) != 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ALGEBRAIC_TOL;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_physical(rho: &DensityMatrix) {
        assert!((rho.trace() - c(1.0)).norm() < ALGEBRAIC_TOL);
        assert!(rho.hermiticity_error() < ALGEBRAIC_TOL);
        assert!(rho.min_eigenvalue() > -super::super::POSITIVITY_TOL);
    }

    #[test]
    fn thermal_register_examples() {
        let rho = DensityMatrix::thermal(1, &[0.0]).unwrap();
        assert_eq!(rho.get(0, 0), c(1.0));
        assert_eq!(rho.get(1, 1), c(0.0));

        let rho = DensityMatrix::thermal(1, &[0.013]).unwrap();
        assert!((rho.get(0, 0).re - 0.987).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.013).abs() < 1e-15);

        // qubit 0 is the most significant bit
        let rho = DensityMatrix::thermal(2, &[0.0, 0.5]).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| rho.get(i, i).re).collect();
        assert_eq!(diag, vec![0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn thermal_register_rejects_bad_input() {
        assert!(DensityMatrix::thermal(0, &[]).is_err());
        assert!(DensityMatrix::thermal(7, &[0.0; 7]).is_err());
        assert!(DensityMatrix::thermal(1, &[0.6]).is_err());
        assert!(DensityMatrix::thermal(1, &[-0.1]).is_err());
        assert!(DensityMatrix::thermal(2, &[0.0]).is_err());
    }

    #[test]
    fn y_rotation_examples() {
        let mut rho = DensityMatrix::ground(1).unwrap();
        rho.rotate(0, Axis::Y, PI).unwrap();
        assert!((rho.get(0, 0).re).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);

        let ground = DensityMatrix::ground(1).unwrap();
        let mut rho = ground.clone();
        rho.rotate(0, Axis::Y, 0.0).unwrap();
        assert_eq!(rho, ground);

        // Hand conjugation: Ry(π/2)|0⟩ = (|0⟩ + |1⟩)/√2.
        let mut rho = DensityMatrix::ground(1).unwrap();
        rho.rotate(0, Axis::Y, FRAC_PI_2).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!((rho.get(0, 1).norm() - 0.5).abs() < 1e-15);
        assert!((rho.get(0, 1) - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn rotation_rejects_out_of_range_qubit() {
        let mut rho = DensityMatrix::ground(2).unwrap();
        assert!(rho.rotate(2, Axis::X, 0.3).is_err());
    }

    #[test]
    fn expectation_after_rotation_is_cosine() {
        for k in 0..20 {
            let phi = 0.17 * k as f64;
            let mut rho = DensityMatrix::ground(1).unwrap();
            rho.rotate(0, Axis::Y, phi).unwrap();
            assert!((rho.expectation_z(0).unwrap() - phi.cos()).abs() < 1e-12);
        }
        let mut one = DensityMatrix::ground(1).unwrap();
        one.rotate(0, Axis::X, PI).unwrap();
        assert!((one.expectation_z(0).unwrap() + 1.0).abs() < 1e-15);
        assert!(one.expectation_z(1).is_err());
    }

    #[test]
    fn cz_examples() {
        let ground = DensityMatrix::ground(2).unwrap();
        let mut rho = ground.clone();
        rho.apply_cz(0, 1).unwrap();
        assert_eq!(rho, ground);

        let mut rho = DensityMatrix::thermal(3, &[0.1, 0.2, 0.3]).unwrap();
        rho.rotate(0, Axis::Y, 0.7).unwrap();
        rho.rotate(2, Axis::X, 1.1).unwrap();
        let before = rho.clone();
        rho.apply_cz(0, 2).unwrap();
        rho.apply_cz(2, 0).unwrap();
        assert!(rho.max_abs_diff(&before) < 1e-12);

        assert!(rho.apply_cz(1, 1).is_err());
        assert!(rho.apply_cz(0, 3).is_err());
    }

    #[test]
    fn cz_on_plus_plus_is_maximally_entangled() {
        let mut rho = DensityMatrix::ground(2).unwrap();
        rho.rotate(0, Axis::Y, FRAC_PI_2).unwrap();
        rho.rotate(1, Axis::Y, FRAC_PI_2).unwrap();
        rho.apply_cz(0, 1).unwrap();
        // (|00⟩ + |01⟩ + |10⟩ − |11⟩)/2
        let target = [c(0.5), c(0.5), c(0.5), c(-0.5)];
        assert!((rho.fidelity_to_pure(&target).unwrap() - 1.0).abs() < 1e-12);
        assert!((rho.concurrence().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn singlet_distribution_and_concurrence() {
        let amps = [c(0.0), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2), c(0.0)];
        let rho = DensityMatrix::from_pure(2, &amps).unwrap();
        let dist = rho.outcome_distribution(&[0, 1]).unwrap();
        let want = [0.0, 0.5, 0.5, 0.0];
        for (p, w) in dist.probs().iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
        assert!((rho.concurrence().unwrap() - 1.0).abs() < 1e-9);

        let product = DensityMatrix::thermal(2, &[0.2, 0.4]).unwrap();
        assert!(product.concurrence().unwrap() < 1e-9);
    }

    #[test]
    fn outcome_distribution_rejects_duplicates() {
        let rho = DensityMatrix::ground(3).unwrap();
        assert!(rho.outcome_distribution(&[0, 0]).is_err());
        assert!(rho.outcome_distribution(&[]).is_err());
        let dist = rho.outcome_distribution(&[2, 0]).unwrap();
        assert_eq!(dist.probs()[0], 1.0);
    }

    #[test]
    fn reduce_matches_marginal() {
        let mut rho = DensityMatrix::thermal(3, &[0.05, 0.1, 0.2]).unwrap();
        rho.rotate(0, Axis::Y, 1.0).unwrap();
        rho.apply_cz(0, 1).unwrap();
        rho.rotate(1, Axis::X, 0.4).unwrap();
        rho.apply_cz(1, 2).unwrap();
        let reduced = rho.reduce(&[2, 0]).unwrap();
        assert_physical(&reduced);
        let a = reduced.outcome_distribution(&[0, 1]).unwrap();
        let b = rho.outcome_distribution(&[2, 0]).unwrap();
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn gates_keep_state_physical() {
        let mut rho = DensityMatrix::thermal(4, &[0.013, 0.007, 0.028, 0.01]).unwrap();
        let gates = [
            Gate::ry(1, FRAC_PI_2),
            Gate::ry(2, -FRAC_PI_2),
            Gate::cz(1, 2),
            Gate::rx(0, FRAC_PI_4),
            Gate::cz(0, 1),
            Gate::rz(3, 0.3),
            Gate::cz(2, 3),
        ];
        for g in &gates {
            rho.apply_gate(g).unwrap();
            assert_physical(&rho);
        }
    }
}
