use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eigen::min_eigenvalue;
use super::matrix::{c, ComplexMatrix, EXACT_TOL};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 3;

/// Lowest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-10;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => Err(Error::QubitCount(dim.max(1).ilog2() as usize)),
    }
}

/// Normalized pure state of 1 to 3 qubits. Qubit 0 is the most significant
/// bit of the amplitude index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[index] = c(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Haar-random pure state from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let amps = (0..1usize << num_qubits)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|²
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Tensor product self ⊗ other; self occupies the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn apply_gate(&self, gate: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        apply_gate(self, gate, targets)
    }
}

/// Applies `gate` to `targets`; `targets[0]` is the most significant bit of
/// the gate's own index.
pub fn apply_gate(state: &StateVector, gate: &ComplexMatrix, targets: &[usize]) -> Result<StateVector> {
    let k = targets.len();
    if k == 0 || !gate.is_square() || gate.rows() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            got: gate.rows(),
        });
    }
    let n = state.num_qubits;
    for (pos, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::QubitOutOfRange {
                index: t,
                num_qubits: n,
            });
        }
        if targets[..pos].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }

    let masks: Vec<usize> = targets.iter().map(|&t| 1 << (n - 1 - t)).collect();
    let target_mask: usize = masks.iter().sum();
    let sub = 1usize << k;
    let index_of = |base: usize, s: usize| -> usize {
        masks
            .iter()
            .enumerate()
            .filter(|&(m, _)| s & (1 << (k - 1 - m)) != 0)
            .fold(base, |acc, (_, &mask)| acc | mask)
    };

    let mut out = vec![c(0.0, 0.0); state.dim()];
    let mut local = vec![c(0.0, 0.0); sub];
    for base in (0..state.dim()).filter(|b| b & target_mask == 0) {
        for (s, slot) in local.iter_mut().enumerate() {
            *slot = state.amplitudes[index_of(base, s)];
        }
        for (r, amp) in gate.apply(&local).into_iter().enumerate() {
            out[index_of(base, r)] = amp;
        }
    }
    StateVector::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];
}

pub fn bell_state(kind: BellKind) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let z = 0.0;
    let amps = match kind {
        BellKind::PhiPlus => [h, z, z, h],
        BellKind::PhiMinus => [h, z, z, -h],
        BellKind::PsiPlus => [z, h, h, z],
        BellKind::PsiMinus => [z, h, -h, z],
    };
    StateVector {
        num_qubits: 2,
        amplitudes: amps.iter().map(|&x| c(x, 0.0)).collect(),
    }
}

/// Mixed state on 1 to 3 qubits: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        qubits_for_dim(matrix.rows())?;
        if !matrix.is_square() {
            return Err(Error::InvalidDensity("not square".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > EXACT_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let lo = min_eigenvalue(&matrix);
        if lo < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Divides by the trace, then validates.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::ZeroTrace);
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let d = 1 << num_qubits;
        Ok(Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().ilog2() as usize
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let v = self.matrix.apply(psi.amplitudes());
        psi.amplitudes()
            .iter()
            .zip(v)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re
    }

    /// U ρ U†
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        u.ensure_unitary()?;
        if u.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.rows(),
            });
        }
        Self::new(&(u * &self.matrix) * &u.adjoint())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits() + other.num_qubits();
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    pub fn purity(&self) -> f64 {
        self.matrix.hs_inner(&self.matrix).re
    }
}
