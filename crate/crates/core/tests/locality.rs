use proptest::prelude::*;

use qsim_core::circuit::library;
use qsim_core::lhv::{
    enumerate_strategies, find_local_model, max_chsh, mermin_correlators, pauli_alphabets,
    quantum_table, simulate_model, strategy_table, CommTopology, CorrelationTable, FindOptions,
    LpOutcome,
};
use qsim_core::statevector::{self, Axis, PureState};

fn ghz3() -> PureState {
    statevector::evolve(&library::ghz(3)).unwrap()
}

fn singlet() -> PureState {
    statevector::evolve(&library::gk_entangler()).unwrap()
}

fn certificate_value(coefficients: &[Vec<f64>], table: &CorrelationTable) -> f64 {
    coefficients
        .iter()
        .zip(&table.probabilities)
        .map(|(c, p)| c.iter().zip(p).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}

#[test]
fn every_pauli_strategy_respects_chsh() {
    let alphabets = pauli_alphabets(2);
    let none = CommTopology::none();
    let strategies = enumerate_strategies(&[3, 3], &none).unwrap();
    assert_eq!(strategies.len(), 64);
    for s in &strategies {
        let t = strategy_table(s, &none, &alphabets).unwrap();
        assert!(max_chsh(&t).unwrap() <= 2.0 + 1e-12);
    }
}

#[test]
fn every_local_strategy_has_mermin_product_plus_one() {
    let alphabets = pauli_alphabets(3);
    let none = CommTopology::none();
    let strategies = enumerate_strategies(&[3, 3, 3], &none).unwrap();
    assert_eq!(strategies.len(), 512);
    for s in &strategies {
        let m = mermin_correlators(&strategy_table(s, &none, &alphabets).unwrap()).unwrap();
        assert_eq!(m.iter().product::<f64>(), 1.0);
    }
    // The quantum product is −1.
    let m = mermin_correlators(&quantum_table(&ghz3(), &alphabets).unwrap()).unwrap();
    assert!((m.iter().product::<f64>() + 1.0).abs() < 1e-12);
}

#[test]
fn certificates_bound_every_strategy() {
    let none = CommTopology::none();
    let rotated = |theta: f64| -> CorrelationTable {
        let axes = vec![
            Axis::bloch(std::f64::consts::FRAC_PI_2, 0.0).unwrap(),
            Axis::bloch(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2).unwrap(),
        ];
        let b = vec![
            Axis::bloch(std::f64::consts::FRAC_PI_2, theta).unwrap(),
            Axis::bloch(std::f64::consts::FRAC_PI_2, -theta).unwrap(),
        ];
        quantum_table(&singlet(), &[axes, b]).unwrap()
    };
    let targets = [
        quantum_table(&ghz3(), &pauli_alphabets(3)).unwrap(),
        rotated(std::f64::consts::FRAC_PI_4),
        rotated(0.6),
    ];
    for target in &targets {
        let LpOutcome::Infeasible(cert) =
            find_local_model(target, &none, FindOptions::default()).unwrap()
        else {
            panic!("expected a violation");
        };
        let mut best = f64::NEG_INFINITY;
        for s in enumerate_strategies(&target.alphabet_sizes(), &none).unwrap() {
            let t = strategy_table(&s, &none, &target.alphabets).unwrap();
            let v = certificate_value(&cert.coefficients, &t);
            assert!(v <= cert.bound + 1e-9);
            best = best.max(v);
        }
        assert!((best - cert.max_local_value).abs() < 1e-9);
        let q = certificate_value(&cert.coefficients, target);
        assert!((q - cert.target_value).abs() < 1e-9);
        assert!(cert.violation() > 1e-6);
    }
}

#[test]
fn ghz_model_sampling_matches_its_table() {
    let target = quantum_table(&ghz3(), &pauli_alphabets(3)).unwrap();
    let topology: CommTopology = "2>1".parse().unwrap();
    let LpOutcome::Feasible(found) =
        find_local_model(&target, &topology, FindOptions::default()).unwrap()
    else {
        panic!("one bit suffices");
    };
    // 27 profiles of 8 outcomes each need about 10^6 shots for a 0.02 TVD.
    let sim = simulate_model(&found.model, 1_000_000, 17).unwrap();
    assert_eq!(sim.bits_used_per_shot, 1);
    assert!(sim.empirical.max_tvd(&target) < 0.02);
}

#[test]
fn dedup_does_not_change_feasibility() {
    let target = quantum_table(&ghz3(), &pauli_alphabets(3)).unwrap();
    for topology in ["", "2>1", "3>1"] {
        let topology: CommTopology = topology.parse().unwrap();
        let plain = find_local_model(&target, &topology, FindOptions::default()).unwrap();
        let merged = find_local_model(
            &target,
            &topology,
            FindOptions {
                dedup: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(plain.is_feasible(), merged.is_feasible());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quantum_tables_do_not_signal(re in prop::collection::vec(-1.0f64..1.0, 8), im in prop::collection::vec(-1.0f64..1.0, 8)) {
        let amps: Vec<num_complex::Complex64> = re.iter().zip(&im).map(|(a, b)| num_complex::Complex64::new(*a, *b)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let psi = PureState::from_amplitudes(amps.into_iter().map(|z| z / norm).collect()).unwrap();
        let table = quantum_table(&psi, &pauli_alphabets(3)).unwrap();
        prop_assert!(table.max_signalling() < 1e-10);
    }

    #[test]
    fn strategy_tables_are_deterministic_and_local(index in 0usize..512) {
        let none = CommTopology::none();
        let s = &enumerate_strategies(&[3, 3, 3], &none).unwrap()[index];
        let t = strategy_table(s, &none, &pauli_alphabets(3)).unwrap();
        prop_assert!(t.probabilities.iter().all(|d| d.iter().filter(|&&p| p == 1.0).count() == 1));
        prop_assert_eq!(t.max_signalling(), 0.0);
    }
}
