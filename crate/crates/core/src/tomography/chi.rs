use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{bell_state, c, min_eigenvalue, BellKind, ComplexMatrix, DensityMatrix};

pub const CHI_HERMITIAN_TOL: f64 = 1e-10;
pub const CHI_PSD_TOL: f64 = 1e-8;
pub const CHI_TRACE_TOL: f64 = 1e-10;
/// Reduced input marginal must be within this of I/2 for a trace-preserving χ.
pub const CHI_TP_TOL: f64 = 1e-6;

/// Trace-one Choi matrix χ = (I ⊗ ξ)(|φ⁺⟩⟨φ⁺|) of a single-qubit channel ξ.
/// The first tensor factor is the reference (input) side, the second the
/// channel output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChiEntries", into = "ChiEntries")]
pub struct ChiMatrix {
    matrix: ComplexMatrix,
}

/// Wire form: 16 `[re, im]` pairs, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiEntries {
    pub entries: Vec<[f64; 2]>,
}

impl From<ChiMatrix> for ChiEntries {
    fn from(chi: ChiMatrix) -> Self {
        Self {
            entries: chi.matrix.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<ChiEntries> for ChiMatrix {
    type Error = Error;

    fn try_from(value: ChiEntries) -> Result<Self> {
        let data = value.entries.iter().map(|&[re, im]| c(re, im)).collect();
        ChiMatrix::new(ComplexMatrix::new(4, 4, data)?)
    }
}

impl ChiMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                got: matrix.data().len(),
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > CHI_HERMITIAN_TOL {
            return Err(Error::InvalidChi(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CHI_TRACE_TOL || tr.im.abs() > CHI_TRACE_TOL {
            return Err(Error::InvalidChi(format!("trace {tr}")));
        }
        let lo = min_eigenvalue(&matrix);
        if lo < -CHI_PSD_TOL {
            return Err(Error::InvalidChi(format!("negative eigenvalue {lo:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Divides by the trace before validating.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.abs() < f64::EPSILON || !tr.is_finite() {
            return Err(Error::ZeroTrace);
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    /// I/4, the fully depolarizing channel.
    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(4).scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Partial trace over the output factor; I/2 for trace-preserving maps.
    pub fn input_marginal(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = (0..2).map(|k| self.matrix[(2 * i + k, 2 * j + k)]).sum();
            }
        }
        out
    }

    /// ‖Tr_out χ − I/2‖_max
    pub fn trace_preservation_error(&self) -> f64 {
        self.input_marginal()
            .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preservation_error() < CHI_TP_TOL
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }

    pub fn fidelity(&self, ideal: &ChiMatrix) -> Result<f64> {
        process_fidelity(&self.matrix, &ideal.matrix)
    }
}

/// χ = (I ⊗ V)|φ⁺⟩⟨φ⁺|(I ⊗ V†), rank one and trace one.
pub fn choi_of_unitary(v: &ComplexMatrix) -> Result<ChiMatrix> {
    if v.rows() != 2 || v.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: v.data().len(),
        });
    }
    v.ensure_unitary()?;
    let psi = bell_state(BellKind::PhiPlus).apply_gate(v, &[1])?;
    ChiMatrix::new(psi.density().into_matrix())
}

/// 2·Tr_in[(ρᵀ ⊗ I)χ] for any 4×4 χ. No physicality checks.
pub fn apply_channel_raw(chi: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!((chi.rows(), rho.rows()), (4, 2), "apply_channel_raw shape");
    let mut out = ComplexMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = c(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    acc += rho[(j, i)] * chi[(2 * j + a, 2 * i + b)];
                }
            }
            out[(a, b)] = acc * 2.0;
        }
    }
    out
}

/// ρ_out = 2·Tr_in[(ρᵀ ⊗ I)χ]. The factor 2 undoes the trace-one
/// normalization of χ; non-trace-preserving χ give an `InvalidDensity` error.
pub fn apply_channel(chi: &ChiMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    DensityMatrix::new(apply_channel_raw(&chi.matrix, rho.matrix()))
}

/// Tr[χ χ_ideal] / (Tr[χ]·Tr[χ_ideal]), clamped to [0, 1].
pub fn process_fidelity(chi: &ComplexMatrix, chi_ideal: &ComplexMatrix) -> Result<f64> {
    if chi.rows() != 4 || chi.cols() != 4 || chi_ideal.rows() != 4 || chi_ideal.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            got: chi.data().len().max(chi_ideal.data().len()),
        });
    }
    let (ta, tb) = (chi.trace().re, chi_ideal.trace().re);
    if ta.abs() < f64::MIN_POSITIVE || tb.abs() < f64::MIN_POSITIVE {
        return Err(Error::ZeroTrace);
    }
    // Tr[AB] = Σ A_ij B_ji
    let overlap: f64 = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (chi[(i, j)] * chi_ideal[(j, i)]).re)
        .sum();
    Ok((overlap / (ta * tb)).clamp(0.0, 1.0))
}

/// Exact Choi matrix of a linear single-qubit channel, assembled as
/// ½·Σ_ij |i⟩⟨j| ⊗ ξ(|i⟩⟨j|). The off-diagonal blocks come from the H, V, D
/// and R outputs by linearity:
/// |0⟩⟨1| = |D⟩⟨D| + i|R⟩⟨R| − ½(1+i)(|H⟩⟨H| + |V⟩⟨V|).
pub fn choi_of_channel<F>(channel: F) -> Result<ChiMatrix>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
{
    use super::settings::Probe;
    let out = |p: Probe| channel(&p.state().density()).map(DensityMatrix::into_matrix);
    let (h, v, d, r) = (out(Probe::H)?, out(Probe::V)?, out(Probe::D)?, out(Probe::R)?);
    let half_one_plus_i = c(0.5, 0.5);
    let e01 = &(&d + &r.scale(c(0.0, 1.0))) - &(&h + &v).scale(half_one_plus_i);
    let e10 = e01.adjoint();
    let blocks = [[&h, &e01], [&e10, &v]];
    let mut chi = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    chi[(2 * i + a, 2 * j + b)] = blocks[i][j][(a, b)] * 0.5;
                }
            }
        }
    }
    ChiMatrix::from_unnormalized((&chi + &chi.adjoint()).scale_real(0.5))
}
