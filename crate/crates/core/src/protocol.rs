//! Gate-teleportation inversion of a black-box single-qubit unitary.
//!
//! Qubit layout of the three-qubit joint state: qubit 0 carries the input
//! |φ⟩, qubits 1 and 2 hold the singlet resource. The oracle acts on qubit 1,
//! the Bell measurement on qubits 0 and 1, and qubit 2 is the output.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{bell_state, c, BellKind, ComplexMatrix, DensityMatrix, StateVector};

/// Default cap on repeat-until-success rounds; (3/4)^64 ≈ 1e−8.
pub const DEFAULT_MAX_ROUNDS: usize = 64;

/// Black-box access to a hidden 2×2 unitary. The only operation is applying
/// it to one qubit of a state, and every application is counted.
#[derive(Clone)]
pub struct UnitaryOracle {
    hidden: ComplexMatrix,
    queries: usize,
}

impl UnitaryOracle {
    pub fn new(unitary: ComplexMatrix) -> Result<Self> {
        if unitary.rows() != 2 || unitary.cols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: unitary.data().len(),
            });
        }
        unitary.ensure_unitary()?;
        Ok(Self {
            hidden: unitary,
            queries: 0,
        })
    }

    pub fn apply(&mut self, state: &StateVector, target: usize) -> Result<StateVector> {
        let out = state.apply_gate(&self.hidden, &[target])?;
        self.queries += 1;
        Ok(out)
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Same black box with the query counter reset.
    pub fn fresh(&self) -> Self {
        Self {
            hidden: self.hidden.clone(),
            queries: 0,
        }
    }
}

impl std::fmt::Debug for UnitaryOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitaryOracle")
            .field("queries", &self.queries)
            .finish_non_exhaustive()
    }
}

/// Bell-measurement result (i, j); the remnant on the output qubit is
/// U⁻¹XⁱZʲ|φ⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellOutcome {
    i: u8,
    j: u8,
}

impl BellOutcome {
    pub const SUCCESS: BellOutcome = BellOutcome { i: 0, j: 0 };

    /// All outcomes, ordered by [`BellOutcome::index`].
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome { i: 0, j: 0 },
        BellOutcome { i: 0, j: 1 },
        BellOutcome { i: 1, j: 0 },
        BellOutcome { i: 1, j: 1 },
    ];

    pub fn new(i: u8, j: u8) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::OutOfRange {
                name: "bell outcome bit",
                value: i.max(j) as f64,
            });
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> u8 {
        self.i
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    /// 2i + j
    pub fn index(&self) -> usize {
        (2 * self.i + self.j) as usize
    }

    pub fn is_success(&self) -> bool {
        *self == Self::SUCCESS
    }

    /// Bell state on qubits 0–1 heralding this outcome.
    pub fn bell_kind(&self) -> BellKind {
        match (self.i, self.j) {
            (0, 0) => BellKind::PsiMinus,
            (0, 1) => BellKind::PsiPlus,
            (1, 0) => BellKind::PhiMinus,
            _ => BellKind::PhiPlus,
        }
    }
}

impl std::fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversionOptions {
    pub max_rounds: usize,
    /// Debug: project onto the success outcome instead of sampling.
    pub force_success: bool,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            max_rounds: DEFAULT_MAX_ROUNDS,
            force_success: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub output_state: StateVector,
    pub rounds: usize,
    pub queries: usize,
    pub outcome_history: Vec<BellOutcome>,
}

/// (U ⊗ I)|ψ⁻⟩, one oracle query.
pub fn prepare_resource(oracle: &mut UnitaryOracle) -> Result<StateVector> {
    oracle.apply(&bell_state(BellKind::PsiMinus), 0)
}

fn ensure_three_qubits(joint: &StateVector) -> Result<()> {
    if joint.num_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: joint.dim(),
        });
    }
    Ok(())
}

/// Unnormalized output-qubit amplitudes after projecting qubits 0–1 onto the
/// Bell state of `outcome`.
fn branch_amplitudes(joint: &StateVector, outcome: BellOutcome) -> [Complex64; 2] {
    let bell = bell_state(outcome.bell_kind());
    let amps = joint.amplitudes();
    let mut out = [c(0.0, 0.0); 2];
    for (a, ba) in bell.amplitudes().iter().enumerate() {
        for (b, slot) in out.iter_mut().enumerate() {
            *slot += ba.conj() * amps[(a << 1) | b];
        }
    }
    out
}

/// Born-rule probabilities of the four outcomes, indexed by [`BellOutcome::index`].
pub fn bsm_probabilities(joint: &StateVector) -> Result<[f64; 4]> {
    ensure_three_qubits(joint)?;
    let mut probs = [0.0; 4];
    for o in BellOutcome::ALL {
        probs[o.index()] = branch_amplitudes(joint, o).iter().map(|z| z.norm_sqr()).sum();
    }
    Ok(probs)
}

/// Projects onto `outcome`, returning its probability and the normalized
/// output-qubit state.
pub fn bsm_project(joint: &StateVector, outcome: BellOutcome) -> Result<(f64, StateVector)> {
    ensure_three_qubits(joint)?;
    let amps = branch_amplitudes(joint, outcome);
    let prob = amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
    Ok((prob, StateVector::normalized(amps.to_vec())?))
}

/// Samples a Bell outcome on qubits 0–1 and returns the collapsed output qubit.
pub fn bsm_sample<R: Rng + ?Sized>(joint: &StateVector, rng: &mut R) -> Result<(BellOutcome, StateVector)> {
    let probs = bsm_probabilities(joint)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = BellOutcome::ALL[3];
    for o in BellOutcome::ALL {
        acc += probs[o.index()];
        if u < acc && probs[o.index()] > 0.0 {
            chosen = o;
            break;
        }
    }
    if probs[chosen.index()] == 0.0 {
        // u landed in the rounding gap above the cumulative sum
        chosen = *BellOutcome::ALL
            .iter()
            .rev()
            .find(|o| probs[o.index()] > 0.0)
            .expect("normalized state has a nonzero branch");
    }
    let (_, remnant) = bsm_project(joint, chosen)?;
    Ok((chosen, remnant))
}

/// Exact probability of the heralding (0, 0) outcome.
pub fn exact_success_probability(joint: &StateVector) -> Result<f64> {
    Ok(bsm_probabilities(joint)?[BellOutcome::SUCCESS.index()])
}

/// Applies Z⁻ʲX⁻ⁱU to the remnant U⁻¹XⁱZʲ|φ⟩, restoring |φ⟩ up to phase.
/// Costs one query.
pub fn correct_remnant(oracle: &mut UnitaryOracle, remnant: &StateVector, outcome: BellOutcome) -> Result<StateVector> {
    let mut s = oracle.apply(remnant, 0)?;
    if outcome.i() == 1 {
        s = s.apply_gate(&ComplexMatrix::pauli_x(), &[0])?;
    }
    if outcome.j() == 1 {
        s = s.apply_gate(&ComplexMatrix::pauli_z(), &[0])?;
    }
    Ok(s)
}

/// Repeat-until-success inversion: teleport through a fresh resource each
/// round, stop on outcome (0, 0), otherwise undo the byproduct and retry.
///
/// Each round costs one query for the resource, each retry one more for the
/// correction, so `queries = 2·(rounds − 1) + 1`.
pub fn run_inversion<R: Rng + ?Sized>(
    oracle: &mut UnitaryOracle,
    input: &StateVector,
    rng: &mut R,
    options: InversionOptions,
) -> Result<ProtocolResult> {
    if options.max_rounds == 0 {
        return Err(Error::OutOfRange {
            name: "max_rounds",
            value: 0.0,
        });
    }
    if input.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: input.dim(),
        });
    }
    let start_queries = oracle.queries();
    let mut current = input.clone();
    let mut history = Vec::new();
    for round in 1..=options.max_rounds {
        let resource = prepare_resource(oracle)?;
        let joint = current.tensor(&resource)?;
        let (outcome, remnant) = if options.force_success {
            let (_, r) = bsm_project(&joint, BellOutcome::SUCCESS)?;
            (BellOutcome::SUCCESS, r)
        } else {
            bsm_sample(&joint, rng)?
        };
        history.push(outcome);
        if outcome.is_success() {
            return Ok(ProtocolResult {
                output_state: remnant,
                rounds: round,
                queries: oracle.queries() - start_queries,
                outcome_history: history,
            });
        }
        if round == options.max_rounds {
            break;
        }
        current = correct_remnant(oracle, &remnant, outcome)?;
    }
    Err(Error::RoundsExhausted {
        rounds: options.max_rounds,
        queries: oracle.queries() - start_queries,
    })
}

/// Density-matrix version of [`bsm_project`]: projects qubits 0–1 of a
/// three-qubit mixed state and returns the probability and the normalized
/// output-qubit state.
pub fn bsm_project_density(joint: &DensityMatrix, outcome: BellOutcome) -> Result<(f64, DensityMatrix)> {
    if joint.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: joint.dim(),
        });
    }
    let bell = bell_state(outcome.bell_kind());
    let ba = bell.amplitudes();
    let m = joint.matrix();
    let mut out = ComplexMatrix::zeros(2, 2);
    for a in 0..4 {
        for a2 in 0..4 {
            let w = ba[a].conj() * ba[a2];
            if w == c(0.0, 0.0) {
                continue;
            }
            for b in 0..2 {
                for b2 in 0..2 {
                    out[(b, b2)] += w * m[((a << 1) | b, (a2 << 1) | b2)];
                }
            }
        }
    }
    let prob = out.trace().re;
    Ok((prob, DensityMatrix::from_unnormalized(out)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{preset_u1, preset_u2, preset_u3, UnitaryParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle(u: ComplexMatrix) -> UnitaryOracle {
        UnitaryOracle::new(u).unwrap()
    }

    #[test]
    fn resource_for_identity_is_singlet() {
        let mut o = oracle(ComplexMatrix::identity(2));
        let r = prepare_resource(&mut o).unwrap();
        assert_eq!(r, bell_state(BellKind::PsiMinus));
        assert_eq!(o.queries(), 1);
    }

    #[test]
    fn resource_carries_inverse_on_other_half() {
        let u1 = preset_u1();
        let r = prepare_resource(&mut oracle(u1.clone())).unwrap();
        let via_inverse = bell_state(BellKind::PsiMinus).apply_gate(&u1.adjoint(), &[1]).unwrap();
        assert!((r.overlap(&via_inverse) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resource_matches_dense_product() {
        let u3 = preset_u3();
        let r = prepare_resource(&mut oracle(u3.clone())).unwrap();
        let dense = u3.kron(&ComplexMatrix::identity(2)).apply(bell_state(BellKind::PsiMinus).amplitudes());
        for (a, b) in r.amplitudes().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn oracle_rejects_non_unitary() {
        assert!(UnitaryOracle::new(ComplexMatrix::zeros(2, 2)).is_err());
        assert!(UnitaryOracle::new(ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn outcome_mapping() {
        assert_eq!(BellOutcome::new(0, 0).unwrap().bell_kind(), BellKind::PsiMinus);
        assert_eq!(BellOutcome::new(0, 1).unwrap().bell_kind(), BellKind::PsiPlus);
        assert_eq!(BellOutcome::new(1, 0).unwrap().bell_kind(), BellKind::PhiMinus);
        assert_eq!(BellOutcome::new(1, 1).unwrap().bell_kind(), BellKind::PhiPlus);
        assert!(BellOutcome::new(2, 0).is_err());
    }

    #[test]
    fn forced_success_with_identity() {
        let mut o = oracle(ComplexMatrix::identity(2));
        let zero = StateVector::basis(1, 0).unwrap();
        let joint = zero.tensor(&prepare_resource(&mut o).unwrap()).unwrap();
        let (p, out) = bsm_project(&joint, BellOutcome::SUCCESS).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
        assert!((out.overlap(&zero) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn forced_01_branch_with_u2() {
        let u2 = preset_u2();
        let mut o = oracle(u2.clone());
        let zero = StateVector::basis(1, 0).unwrap();
        let joint = zero.tensor(&prepare_resource(&mut o).unwrap()).unwrap();
        let (_, out) = bsm_project(&joint, BellOutcome::new(0, 1).unwrap()).unwrap();
        let expected = StateVector::new((&u2.adjoint() * &ComplexMatrix::pauli_z()).apply(zero.amplitudes())).unwrap();
        assert!((out.overlap(&expected) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_have_remnants_of_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u = UnitaryParams::sample_haar(&mut rng).realize();
            let phi = StateVector::random(1, &mut rng).unwrap();
            let joint = phi.tensor(&prepare_resource(&mut oracle(u.clone())).unwrap()).unwrap();
            for o in BellOutcome::ALL {
                let mut byproduct = ComplexMatrix::identity(2);
                if o.i() == 1 {
                    byproduct = &byproduct * &ComplexMatrix::pauli_x();
                }
                if o.j() == 1 {
                    byproduct = &byproduct * &ComplexMatrix::pauli_z();
                }
                let expected = StateVector::new((&u.adjoint() * &byproduct).apply(phi.amplitudes())).unwrap();
                let (p, out) = bsm_project(&joint, o).unwrap();
                assert!((p - 0.25).abs() < 1e-12);
                assert!((out.overlap(&expected) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_state_has_no_singlet_overlap() {
        let joint = StateVector::basis(3, 0).unwrap();
        assert_eq!(exact_success_probability(&joint).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (o, _) = bsm_sample(&joint, &mut rng).unwrap();
        assert!(!o.is_success());
    }

    #[test]
    fn wrong_qubit_count_rejected() {
        let two = StateVector::basis(2, 0).unwrap();
        assert!(exact_success_probability(&two).is_err());
    }

    #[test]
    fn forced_run_costs_one_query() {
        let u = preset_u3();
        let mut o = oracle(u.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = StateVector::random(1, &mut rng).unwrap();
        let opts = InversionOptions {
            force_success: true,
            ..Default::default()
        };
        let res = run_inversion(&mut o, &phi, &mut rng, opts).unwrap();
        assert_eq!((res.rounds, res.queries), (1, 1));
        assert_eq!(res.outcome_history, vec![BellOutcome::SUCCESS]);
        let back = res.output_state.apply_gate(&u, &[0]).unwrap();
        assert!((back.overlap(&phi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_oracle_plus_state() {
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut o = oracle(ComplexMatrix::identity(2));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let res = run_inversion(&mut o, &plus, &mut rng, InversionOptions::default()).unwrap();
        assert!((res.output_state.overlap(&plus) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_runs_obey_accounting() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let u = UnitaryParams::sample_haar(&mut rng).realize();
            let phi = StateVector::random(1, &mut rng).unwrap();
            let mut o = oracle(u.clone());
            let res = run_inversion(&mut o, &phi, &mut rng, InversionOptions::default()).unwrap();
            assert_eq!(res.queries, 2 * (res.rounds - 1) + 1);
            assert_eq!(res.outcome_history.len(), res.rounds);
            assert!(res.outcome_history.last().unwrap().is_success());
            assert!(res.outcome_history[..res.rounds - 1].iter().all(|o| !o.is_success()));
            let back = res.output_state.apply_gate(&u, &[0]).unwrap();
            assert!((back.overlap(&phi) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn exhaustion_reports_progress() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let phi = StateVector::basis(1, 0).unwrap();
        let opts = InversionOptions {
            max_rounds: 1,
            force_success: false,
        };
        // some seed fails on the first round with probability 3/4
        let mut saw_failure = false;
        for s in 0..20 {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let mut o = oracle(preset_u1());
            if let Err(Error::RoundsExhausted { rounds, queries }) = run_inversion(&mut o, &phi, &mut r, opts) {
                assert_eq!((rounds, queries), (1, 1));
                saw_failure = true;
            }
        }
        assert!(saw_failure);
        let zero = InversionOptions {
            max_rounds: 0,
            force_success: false,
        };
        assert!(run_inversion(&mut oracle(preset_u1()), &phi, &mut rng, zero).is_err());
    }

    #[test]
    fn density_projection_matches_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let joint = StateVector::random(3, &mut rng).unwrap();
        for o in BellOutcome::ALL {
            let (p, s) = bsm_project(&joint, o).unwrap();
            let (pd, rho) = bsm_project_density(&joint.density(), o).unwrap();
            assert!((p - pd).abs() < 1e-14);
            assert!(rho.matrix().max_abs_diff(s.density().matrix()) < 1e-13);
        }
    }
}
