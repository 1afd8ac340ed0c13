use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use qsim_core::bench::random_clifford_circuit;
use qsim_core::circuit::{BooleanFunction, Circuit, CircuitOp, GateKind, PauliAxis};
use qsim_core::statevector::{self, equal_up_to_global_phase, MeasurementSpec, PureState};
use qsim_core::{rng, stabilizer};

fn random_state(n: usize, seed: u64) -> PureState {
    let mut r = rng::stream(seed, 99);
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    PureState::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Any unitary op, oracles included.
fn random_unitary_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut r = rng::stream(seed, 0);
    let mut c = Circuit::new(n, 0);
    for _ in 0..depth {
        let kind = GateKind::ALL[r.gen_range(0..GateKind::ALL.len())];
        match kind {
            GateKind::Cnot if n >= 2 => {
                let a = r.gen_range(0..n);
                let b = (a + r.gen_range(1..n)) % n;
                c.push(CircuitOp::gate(kind, &[a, b]));
            }
            GateKind::Cnot => {}
            _ if n >= 2 && r.gen_bool(0.15) => {
                let out = r.gen_range(0..n);
                let inputs: Vec<usize> = (0..n).filter(|&q| q != out).take(2).collect();
                let table = (0..1 << inputs.len()).map(|_| r.gen()).collect();
                c.push(CircuitOp::oracle(
                    BooleanFunction::from_table(table).unwrap(),
                    &inputs,
                    out,
                ));
            }
            _ => {
                c.push(CircuitOp::gate(kind, &[r.gen_range(0..n)]));
            }
        }
    }
    c
}

fn apply(c: &Circuit, mut psi: PureState) -> PureState {
    for op in &c.ops {
        psi.apply_op(op, &[]).unwrap();
    }
    psi
}

fn inner(a: &PureState, b: &PureState) -> Complex64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

#[test]
fn norm_is_preserved_over_random_circuits() {
    for seed in 0..1000 {
        let n = 1 + seed as usize % 6;
        let c = random_unitary_circuit(n, 30, seed);
        let psi = apply(&c, random_state(n, seed));
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12, "seed {seed}");
    }
}

#[test]
fn evolution_is_linear_and_unitary() {
    for seed in 0..50 {
        let n = 1 + seed as usize % 5;
        let c = random_unitary_circuit(n, 25, seed);
        let (a, b) = (random_state(n, 2 * seed), random_state(n, 2 * seed + 1));
        let (alpha, beta) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let mix: Vec<Complex64> = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        let norm = mix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mixed = apply(
            &c,
            PureState::from_amplitudes(mix.iter().map(|z| z / norm).collect()).unwrap(),
        );
        let (ua, ub) = (apply(&c, a.clone()), apply(&c, b.clone()));
        for ((m, x), y) in mixed
            .amplitudes()
            .iter()
            .zip(ua.amplitudes())
            .zip(ub.amplitudes())
        {
            assert!((m * norm - (alpha * x + beta * y)).norm() < 1e-12);
        }
        assert!((inner(&ua, &ub) - inner(&a, &b)).norm() < 1e-12);
    }
}

#[test]
fn oracle_is_a_permutation_matrix() {
    for bits in ["0110", "0001", "1111", "1000"] {
        let f = BooleanFunction::from_bits(bits).unwrap();
        let mut seen = Vec::new();
        for x in 0..8usize {
            let bits: Vec<bool> = (0..3).map(|q| x >> (2 - q) & 1 == 1).collect();
            let mut psi = PureState::basis(&bits).unwrap();
            psi.apply_op(&CircuitOp::oracle(f.clone(), &[0, 1], 2), &[])
                .unwrap();
            let ones: Vec<usize> = (0..8)
                .filter(|&i| psi.amplitudes()[i].norm() > 0.0)
                .collect();
            assert_eq!(ones.len(), 1);
            assert_eq!(psi.amplitudes()[ones[0]], Complex64::new(1.0, 0.0));
            seen.push(ones[0]);
            assert_eq!(ones[0], x ^ f.eval(x >> 1) as usize);
        }
        seen.sort_unstable();
        assert_eq!(seen, (0..8).collect::<Vec<_>>());
    }
}

#[test]
fn sampling_stays_within_five_sigma() {
    let shots = 100_000u64;
    // Amplitudes chosen so each outcome has a distinct probability.
    let mut c = Circuit::new(3, 0);
    c.push(CircuitOp::gate(GateKind::H, &[0]))
        .push(CircuitOp::gate(GateKind::S, &[0]))
        .push(CircuitOp::gate(GateKind::H, &[0]))
        .push(CircuitOp::gate(GateKind::H, &[1]))
        .push(CircuitOp::gate(GateKind::Cnot, &[1, 2]))
        .push(CircuitOp::gate(GateKind::S, &[2]))
        .push(CircuitOp::gate(GateKind::H, &[2]));
    let psi = statevector::evolve(&c).unwrap();
    c.measure_all(PauliAxis::Z);
    let run = statevector::run(&c, shots, 42).unwrap();
    for (i, a) in psi.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        let key: String = (0..3)
            .map(|q| if i >> (2 - q) & 1 == 1 { '1' } else { '0' })
            .collect();
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        let f = run.frequency(&key);
        assert!((f - p).abs() <= 5.0 * sigma + 1e-12, "{key}: {f} vs {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stabilizer_states_match_dense_states(n in 2usize..8, depth in 0usize..60, seed in any::<u64>()) {
        let c = random_clifford_circuit(n, depth, seed);
        let dense = statevector::evolve(&c).unwrap();
        let tab = stabilizer::evolve(&c).unwrap();
        prop_assert!(tab.is_consistent());
        prop_assert!(equal_up_to_global_phase(&dense, &tab.to_statevector().unwrap(), 1e-10));
        for q in 0..n {
            for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                let p = dense.p_plus(MeasurementSpec::new(q, axis)).unwrap();
                prop_assert!((p - tab.p_plus(q, axis).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn runs_are_reproducible(n in 2usize..6, seed in any::<u64>()) {
        let mut c = random_clifford_circuit(n, 20, seed);
        c.measure_all(PauliAxis::X);
        prop_assert_eq!(stabilizer::run(&c, 200, seed).unwrap(), stabilizer::run(&c, 200, seed).unwrap());
        prop_assert_eq!(statevector::run(&c, 200, seed).unwrap(), statevector::run(&c, 200, seed).unwrap());
    }
}
