use inverse_teleport::parallel::Execution;
use inverse_teleport::protocol::{
    bsm_probabilities, bsm_project, correct_remnant, exact_success_probability, prepare_resource, run_inversion,
    BellOutcome, InversionOptions, UnitaryOracle,
};
use inverse_teleport::qmath::{ComplexMatrix, StateVector, UnitaryParams};
use inverse_teleport::rng::sub_stream;
use inverse_teleport::runner::{cmd_invert, Preset, RunConfig, UnitarySpec};
use inverse_teleport::Error;

#[test]
fn every_branch_has_probability_one_quarter() {
    for k in 0..1000 {
        let mut rng = sub_stream(21, k);
        let u = UnitaryParams::sample_haar(&mut rng).realize();
        let input = StateVector::random(1, &mut rng).unwrap();
        let mut oracle = UnitaryOracle::new(u).unwrap();
        let joint = input.tensor(&prepare_resource(&mut oracle).unwrap()).unwrap();
        for p in bsm_probabilities(&joint).unwrap() {
            assert!((p - 0.25).abs() <= 1e-12);
        }
        assert!((exact_success_probability(&joint).unwrap() - 0.25).abs() <= 1e-12);
    }
}

#[test]
fn each_remnant_is_a_pauli_byproduct_of_the_inverse() {
    // outcome (i, j) leaves U⁻¹XⁱZʲ|φ⟩
    let x = ComplexMatrix::pauli_x();
    let z = ComplexMatrix::pauli_z();
    for k in 0..200 {
        let mut rng = sub_stream(22, k);
        let u = UnitaryParams::sample_uniform(&mut rng).realize();
        let input = StateVector::random(1, &mut rng).unwrap();
        let mut oracle = UnitaryOracle::new(u.clone()).unwrap();
        let joint = input.tensor(&prepare_resource(&mut oracle).unwrap()).unwrap();
        for outcome in BellOutcome::ALL {
            let (_, remnant) = bsm_project(&joint, outcome).unwrap();
            let mut op = u.adjoint();
            if outcome.i() == 1 {
                op = &op * &x;
            }
            if outcome.j() == 1 {
                op = &op * &z;
            }
            let expected = StateVector::new(op.apply(input.amplitudes())).unwrap();
            assert!(expected.overlap(&remnant) >= 1.0 - 1e-12, "{outcome}");
        }
    }
}

#[test]
fn correction_restores_the_input_and_costs_one_query() {
    for k in 0..200 {
        let mut rng = sub_stream(23, k);
        let u = UnitaryParams::sample_haar(&mut rng).realize();
        let input = StateVector::random(1, &mut rng).unwrap();
        let mut oracle = UnitaryOracle::new(u).unwrap();
        let joint = input.tensor(&prepare_resource(&mut oracle).unwrap()).unwrap();
        for outcome in BellOutcome::ALL.into_iter().filter(|o| !o.is_success()) {
            let (_, remnant) = bsm_project(&joint, outcome).unwrap();
            let before = oracle.queries();
            let restored = correct_remnant(&mut oracle, &remnant, outcome).unwrap();
            assert_eq!(oracle.queries(), before + 1);
            assert!(restored.overlap(&input) >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn success_path_output_and_query_identity() {
    for k in 0..500 {
        let mut rng = sub_stream(24, k);
        let u = UnitaryParams::sample_uniform(&mut rng).realize();
        let input = StateVector::random(1, &mut rng).unwrap();
        let mut oracle = UnitaryOracle::new(u.clone()).unwrap();
        let res = run_inversion(&mut oracle, &input, &mut rng, InversionOptions::default()).unwrap();
        assert_eq!(res.queries, 2 * (res.rounds - 1) + 1);
        assert_eq!(res.outcome_history.len(), res.rounds);
        assert!(res.outcome_history.last().unwrap().is_success());
        let expected = StateVector::new(u.adjoint().apply(input.amplitudes())).unwrap();
        assert!(expected.overlap(&res.output_state) >= 1.0 - 1e-10);
    }
}

#[test]
fn round_cap_is_reported() {
    // with one round allowed, roughly three quarters of runs must give up
    let mut exhausted = 0;
    for k in 0..400 {
        let mut rng = sub_stream(25, k);
        let input = StateVector::random(1, &mut rng).unwrap();
        let mut oracle = UnitaryOracle::new(Preset::U2.matrix()).unwrap();
        let options = InversionOptions {
            max_rounds: 1,
            force_success: false,
        };
        match run_inversion(&mut oracle, &input, &mut rng, options) {
            Ok(res) => assert_eq!(res.queries, 1),
            Err(Error::RoundsExhausted { rounds, queries }) => {
                assert_eq!((rounds, queries), (1, 1));
                exhausted += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!((250..350).contains(&exhausted), "{exhausted}");
}

#[test]
fn empirical_outcome_frequencies() {
    for preset in Preset::ALL {
        let cfg = RunConfig {
            unitary: UnitarySpec::Preset(preset),
            trials: 50_000,
            seed: 5,
            ..Default::default()
        };
        let report = cmd_invert(&cfg).unwrap();
        for f in report.outcome_frequencies {
            assert!((f - 0.25).abs() <= 0.01, "{:?}", report.outcome_frequencies);
        }
        assert!(report.fidelity_min >= 1.0 - 1e-10);
    }
}

#[test]
fn force_success_uses_one_query() {
    let cfg = RunConfig {
        unitary: UnitarySpec::Preset(Preset::U3),
        trials: 1000,
        force_success: true,
        ..Default::default()
    };
    let report = cmd_invert(&cfg).unwrap();
    assert_eq!(report.queries.mean, 1.0);
    assert_eq!(report.queries.variance, 0.0);
    assert_eq!(report.outcome_histogram.o00, 1000);
    assert!(report.fidelity_min >= 1.0 - 1e-10);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let base = RunConfig {
        unitary: UnitarySpec::Random { haar: true },
        trials: 5000,
        seed: 77,
        ..Default::default()
    };
    let par = cmd_invert(&RunConfig {
        execution: Execution::Parallel,
        ..base.clone()
    })
    .unwrap();
    let seq = cmd_invert(&RunConfig {
        execution: Execution::Sequential,
        ..base
    })
    .unwrap();
    assert_eq!(par, seq);
    assert_eq!(par.rounds_per_trial, seq.rounds_per_trial);
}
