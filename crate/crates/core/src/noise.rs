//! Depolarizing surrogate noise.
//!
//! One parameter, ρ ↦ (1−p)ρ + p·I/2, brings the simulated process
//! fidelity down to experimental scale: a depolarized unitary channel has
//! process fidelity 1 − 3p/4 against the ideal unitary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DensityMatrix};

/// Where the depolarizing channel acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseTarget {
    /// The output qubit after the heralded Bell measurement.
    #[default]
    Output,
    /// Both qubits of the resource pair, after the oracle query.
    Resource,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub depolarizing_p: f64,
    pub applied_to: NoiseTarget,
}

impl NoiseConfig {
    pub fn new(depolarizing_p: f64, applied_to: NoiseTarget) -> Result<Self> {
        check_p(depolarizing_p)?;
        Ok(Self {
            depolarizing_p,
            applied_to,
        })
    }

    pub fn none() -> Self {
        Self {
            depolarizing_p: 0.0,
            applied_to: NoiseTarget::None,
        }
    }

    pub fn output(p: f64) -> Result<Self> {
        Self::new(p, NoiseTarget::Output)
    }

    /// Depolarizing strength actually applied at `target`.
    pub fn p_at(&self, target: NoiseTarget) -> f64 {
        if self.applied_to == target && target != NoiseTarget::None {
            self.depolarizing_p
        } else {
            0.0
        }
    }

    /// Net depolarizing strength seen by the heralded output. Noise on both
    /// resource qubits composes to 1 − (1 − p)², since a Pauli on the
    /// measured half of the pair teleports onto the output.
    pub fn effective_p(&self) -> f64 {
        let p = self.depolarizing_p;
        match self.applied_to {
            NoiseTarget::Output => p,
            NoiseTarget::Resource => 1.0 - (1.0 - p) * (1.0 - p),
            NoiseTarget::None => 0.0,
        }
    }

    /// Process fidelity of the noisy inverse against the ideal one, 1 − 3p/4.
    pub fn expected_fidelity(&self) -> f64 {
        1.0 - 0.75 * self.effective_p()
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::none()
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "depolarizing_p",
            value: p,
        })
    }
}

/// (1−p)ρ + p·I/2 on a single qubit.
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    let mixed = ComplexMatrix::identity(2).scale_real(0.5 * p);
    DensityMatrix::new(&rho.matrix().scale_real(1.0 - p) + &mixed)
}

/// Depolarizes one qubit of a multi-qubit state, via the Pauli-twirl form
/// (1 − 3p/4)ρ + (p/4)·Σ_P PρP.
pub fn depolarize_qubit(rho: &DensityMatrix, qubit: usize, p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    let n = rho.num_qubits();
    if qubit >= n {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            num_qubits: n,
        });
    }
    if p == 0.0 {
        return Ok(rho.clone());
    }
    let id = ComplexMatrix::identity(2);
    let embed = |pauli: &ComplexMatrix| {
        (0..n)
            .map(|q| if q == qubit { pauli } else { &id })
            .fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f))
    };
    let m = rho.matrix();
    let mut acc = m.scale_real(1.0 - 0.75 * p);
    for pauli in [ComplexMatrix::pauli_x(), ComplexMatrix::pauli_y(), ComplexMatrix::pauli_z()] {
        let full = embed(&pauli);
        acc = &acc + &(&(&full * m) * &full).scale_real(0.25 * p);
    }
    DensityMatrix::new(acc)
}

/// Depolarizing strength whose unitary-channel process fidelity equals
/// `target_fidelity`: p = 4(1 − F)/3. Valid for F in [1/4, 1].
pub fn calibrate_p_for_fidelity(target_fidelity: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&target_fidelity) {
        return Err(Error::OutOfRange {
            name: "target_fidelity",
            value: target_fidelity,
        });
    }
    Ok((4.0 * (1.0 - target_fidelity) / 3.0).clamp(0.0, 1.0))
}
