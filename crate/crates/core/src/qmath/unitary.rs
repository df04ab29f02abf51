use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{c, ComplexMatrix};
use crate::error::Result;

/// Angles (θ, φ₁, φ₂) of the single-qubit template
///
/// ```text
/// ⎡ cosθ          sinθ·e^{iφ₂}        ⎤
/// ⎣ sinθ·e^{iφ₁}  −cosθ·e^{i(φ₁+φ₂)}  ⎦
/// ```
///
/// Every 2×2 unitary equals one of these up to a global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitaryParams {
    pub theta: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl UnitaryParams {
    pub fn new(theta: f64, phi1: f64, phi2: f64) -> Self {
        Self { theta, phi1, phi2 }
    }

    pub fn realize(&self) -> ComplexMatrix {
        realize_unitary(self)
    }

    /// θ uniform on [0, π/2], phases uniform on [0, 2π). Not Haar.
    pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            theta: rng.random_range(0.0..=FRAC_PI_2),
            phi1: rng.random_range(0.0..2.0 * PI),
            phi2: rng.random_range(0.0..2.0 * PI),
        }
    }

    /// Haar measure on U(2) modulo global phase: θ = arcsin√u.
    pub fn sample_haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        Self {
            theta: u.sqrt().asin(),
            phi1: rng.random_range(0.0..2.0 * PI),
            phi2: rng.random_range(0.0..2.0 * PI),
        }
    }
}

pub fn realize_unitary(p: &UnitaryParams) -> ComplexMatrix {
    let (s, co) = p.theta.sin_cos();
    ComplexMatrix::from_2x2([
        [c(co, 0.0), Complex64::from_polar(s, p.phi2)],
        [
            Complex64::from_polar(s, p.phi1),
            -Complex64::from_polar(co, p.phi1 + p.phi2),
        ],
    ])
}

/// The partner U′ = det(U)·U⁻¹ (the adjugate of U), so that U′U = det(U)·I.
///
/// Acting with U on one half of a singlet equals acting with U′ on the other.
pub fn conjugate_partner(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.ensure_unitary()?;
    let d = u.data();
    Ok(ComplexMatrix::from_2x2([[d[3], -d[1]], [-d[2], d[0]]]))
}

/// Test unitary U₁: a real rotation.
pub fn preset_u1() -> ComplexMatrix {
    let h = 3f64.sqrt() / 2.0;
    ComplexMatrix::from_2x2([[c(0.5, 0.0), c(h, 0.0)], [c(-h, 0.0), c(0.5, 0.0)]])
}

/// Test unitary U₂ = diag(1, e^{i4π/3}).
pub fn preset_u2() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[c(1.0, 0.0), Complex64::from_polar(1.0, 4.0 * PI / 3.0)])
}

/// Test unitary U₃ = ½[[−1−i, 1+i], [−1+i, −1+i]].
pub fn preset_u3() -> ComplexMatrix {
    ComplexMatrix::from_2x2([[c(-1.0, -1.0), c(1.0, 1.0)], [c(-1.0, 1.0), c(-1.0, 1.0)]])
        .scale_real(0.5)
}

/// Inverse of a unitary (its adjoint).
pub fn unitary_inverse(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.ensure_unitary()?;
    Ok(u.adjoint())
}
