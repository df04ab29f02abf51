//! Maximum-likelihood reconstruction of χ.
//!
//! χ = T†T / Tr(T†T) with T lower-triangular (real diagonal, 16 real
//! parameters), so every iterate is Hermitian, positive semidefinite and
//! trace one. The negative log-likelihood
//!
//! ```text
//! NLL(T) = −Σ_k n_k · ln( Tr[M_k T†T] / Tr[T†T] ),   M_k = 2·ρ_probeᵀ ⊗ Π_k
//! ```
//!
//! runs over both projectors of all 18 settings and is minimized by
//! steepest descent with Barzilai–Borwein step proposals and an Armijo
//! backtracking line search. Every accepted step strictly lowers the NLL.

use serde::{Deserialize, Serialize};

use super::chi::ChiMatrix;
use super::counts::CountTable;
use crate::error::{Error, Result};
use crate::qmath::{c, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Stop once accepted steps improve the NLL by less than this, relative,
    /// averaged over the last [`STALL_WINDOW`] steps.
    pub relative_tolerance: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            relative_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MleReport {
    pub chi: ChiMatrix,
    pub nll: f64,
    pub iterations: usize,
    /// NLL at the start and after every accepted step.
    pub nll_history: Vec<f64>,
}

/// Accepted steps averaged by the stopping rule; single short BB steps do
/// not end the search.
pub const STALL_WINDOW: usize = 25;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 80;
const INIT_PERTURBATION: f64 = 0.05;

struct Term {
    op: ComplexMatrix,
    count: f64,
}

struct Objective {
    terms: Vec<Term>,
    total: f64,
}

impl Objective {
    fn new(counts: &CountTable) -> Self {
        let mut terms = Vec::new();
        for row in counts.rows() {
            let rho_t = row.probe.state().density().matrix().transpose();
            for (n, proj) in [(row.n_plus, row.basis.plus()), (row.n_minus, row.basis.minus())] {
                // 0·ln 0 = 0
                if n == 0 {
                    continue;
                }
                let pi = proj.density().into_matrix();
                terms.push(Term {
                    op: rho_t.kron(&pi).scale_real(2.0),
                    count: n as f64,
                });
            }
        }
        let total = terms.iter().map(|t| t.count).sum();
        Self { terms, total }
    }

    fn nll_of_a(&self, a: &ComplexMatrix) -> f64 {
        let tr = a.trace().re;
        let mut nll = self.total * tr.ln();
        for t in &self.terms {
            let q = t.op.hs_inner(a).re;
            if q <= 0.0 {
                return f64::INFINITY;
            }
            nll -= t.count * q.ln();
        }
        nll
    }

    fn value(&self, t: &ComplexMatrix) -> f64 {
        self.nll_of_a(&(&t.adjoint() * t))
    }

    /// NLL and its gradient 2·T·R in the real coordinates of T, written as a
    /// complex matrix and restricted to the parameterization.
    fn value_and_gradient(&self, t: &ComplexMatrix) -> (f64, ComplexMatrix) {
        let a = &t.adjoint() * t;
        let tr = a.trace().re;
        let mut nll = self.total * tr.ln();
        let mut r = ComplexMatrix::identity(4).scale_real(self.total / tr);
        for term in &self.terms {
            let q = term.op.hs_inner(&a).re;
            if q <= 0.0 {
                return (f64::INFINITY, ComplexMatrix::zeros(4, 4));
            }
            nll -= term.count * q.ln();
            r = &r - &term.op.scale_real(term.count / q);
        }
        let mut g = (t * &r).scale_real(2.0);
        project(&mut g);
        (nll, g)
    }
}

/// Zeroes the entries outside the parameterization.
fn project(m: &mut ComplexMatrix) {
    for i in 0..4 {
        for j in i + 1..4 {
            m[(i, j)] = c(0.0, 0.0);
        }
        m[(i, i)].im = 0.0;
    }
}

fn real_dot(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.hs_inner(b).re
}

fn frobenius(a: &ComplexMatrix) -> f64 {
    real_dot(a, a).sqrt()
}

/// Fixed start: T ∝ I + ε·P, i.e. χ close to I/4 with a small Hermitian
/// perturbation, independent of the data and of any seed.
fn initial_factor() -> ComplexMatrix {
    let mut t = ComplexMatrix::identity(4);
    for i in 0..4 {
        for j in 0..i {
            let k = (i * 4 + j) as f64;
            t[(i, j)] = c(INIT_PERTURBATION * (1.0 + 0.1 * k).sin(), INIT_PERTURBATION * (0.7 * k).cos());
        }
    }
    let n = frobenius(&t);
    t.scale_real(1.0 / n)
}

fn chi_of(t: &ComplexMatrix) -> Result<ChiMatrix> {
    let a = &t.adjoint() * t;
    // symmetrize away rounding before validation
    let a = (&a + &a.adjoint()).scale_real(0.5);
    ChiMatrix::from_unnormalized(a)
}

/// Negative log-likelihood of `counts` under a (not necessarily normalized)
/// positive χ.
pub fn negative_log_likelihood(chi: &ComplexMatrix, counts: &CountTable) -> f64 {
    Objective::new(counts).nll_of_a(chi)
}

pub fn mle_reconstruct(counts: &CountTable) -> Result<MleReport> {
    mle_reconstruct_with(counts, MleOptions::default())
}

pub fn mle_reconstruct_with(counts: &CountTable, options: MleOptions) -> Result<MleReport> {
    let obj = Objective::new(counts);
    let mut t = initial_factor();
    let (mut f, mut g) = obj.value_and_gradient(&t);
    let mut history = vec![f];
    let gnorm = frobenius(&g);
    let mut step = if gnorm > 0.0 { 0.1 / gnorm } else { 1.0 };

    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let g2 = real_dot(&g, &g);
        if g2 == 0.0 || !g2.is_finite() {
            converged = true;
            break;
        }

        let mut accepted = None;
        let mut alpha = step;
        for _ in 0..MAX_BACKTRACKS {
            let trial = &t - &g.scale_real(alpha);
            let ft = obj.value(&trial);
            if ft <= f - ARMIJO * alpha * g2 && ft < f {
                accepted = Some((trial, ft, alpha));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, f_new, alpha)) = accepted else {
            // no representable decrease left along the gradient
            converged = true;
            break;
        };

        // NLL is invariant under T → sT; keep ‖T‖ = 1.
        let t_new = trial.scale_real(1.0 / frobenius(&trial));
        let (_, g_new) = obj.value_and_gradient(&t_new);

        let s = &t_new - &t;
        let y = &g_new - &g;
        let sy = real_dot(&s, &y);
        step = if sy > 0.0 { real_dot(&s, &s) / sy } else { alpha * 2.0 };

        t = t_new;
        g = g_new;
        f = f_new;
        history.push(f);
        let improvement = match history.len().checked_sub(STALL_WINDOW + 1) {
            Some(start) => (history[start] - f) / history[start].abs().max(1.0) / STALL_WINDOW as f64,
            None => f64::INFINITY,
        };
        if improvement < options.relative_tolerance {
            converged = true;
            break;
        }
    }

    if !converged {
        let chi = chi_of(&t)?;
        return Err(Error::NotConverged {
            iterations,
            nll: f,
            chi: Box::new(chi.matrix().clone()),
        });
    }
    Ok(MleReport {
        chi: chi_of(&t)?,
        nll: f,
        iterations,
        nll_history: history,
    })
}
