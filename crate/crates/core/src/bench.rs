//! Random Clifford workloads and wall-clock scaling measurements.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::circuit::{Circuit, CircuitOp, GateKind, PauliAxis};
use crate::{rng, stabilizer, statevector, Backend, SimError};

/// `depth` gates drawn uniformly from {X, Y, Z, R, H on a random qubit, CNOT
/// on a random ordered pair of distinct qubits}.
pub fn random_clifford_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
    assert!(n >= 2, "random Clifford circuits need at least two qubits");
    const SINGLE: [GateKind; 5] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::R,
        GateKind::H,
    ];
    let mut rng = rng::stream(seed, 0);
    let mut c = Circuit::new(n, 0);
    for _ in 0..depth {
        let pick = rng.gen_range(0..SINGLE.len() + 1);
        if pick < SINGLE.len() {
            c.push(CircuitOp::gate(SINGLE[pick], &[rng.gen_range(0..n)]));
        } else {
            let control = rng.gen_range(0..n);
            let mut target = rng.gen_range(0..n - 1);
            if target >= control {
                target += 1;
            }
            c.push(CircuitOp::gate(GateKind::Cnot, &[control, target]));
        }
    }
    c
}

/// How circuit depth follows the qubit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthRule {
    Fixed(usize),
    /// `depth = factor · n`.
    Linear(usize),
}

impl DepthRule {
    pub fn depth(self, n: usize) -> usize {
        match self {
            DepthRule::Fixed(d) => d,
            DepthRule::Linear(f) => f * n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub depth: usize,
    pub shots: u64,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthKind {
    /// Mean of `log2(t(n+1)/t(n))` per added qubit; about 1 for `2^n` cost.
    Log2RatioPerQubit,
    /// Least-squares slope of `ln t` against `ln n`; the polynomial degree.
    LogLogSlope,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Growth {
    pub kind: GrowthKind,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub backend: Backend,
    pub rows: Vec<BenchRow>,
    pub growth: Option<Growth>,
}

/// Qubit counts between `min` and `max`: every value for the dense backend,
/// doublings of `min` for the stabilizer backend.
pub fn n_values(backend: Backend, min: usize, max: usize) -> Vec<usize> {
    match backend {
        Backend::StateVector => (min..=max).collect(),
        Backend::Stabilizer => {
            let mut v = Vec::new();
            let mut n = min.max(1);
            while n <= max {
                v.push(n);
                n *= 2;
            }
            v
        }
    }
}

pub const REPEATS: usize = 3;

/// Times `backend` on a random Clifford circuit followed by a Z measurement of
/// every qubit, at each `n` in `ns` (the median of [`REPEATS`] runs), then
/// fits the backend's growth descriptor. Only the simulation is timed.
pub fn bench_scaling(
    backend: Backend,
    ns: &[usize],
    depth: DepthRule,
    shots: u64,
    seed: u64,
) -> Result<BenchReport, SimError> {
    if backend == Backend::StateVector {
        if let Some(&n) = ns.iter().find(|&&n| n > statevector::MAX_QUBITS) {
            return Err(SimError::TooManyQubits {
                n,
                max: statevector::MAX_QUBITS,
            });
        }
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let d = depth.depth(n);
        let mut circuit = random_clifford_circuit(n, d, seed.wrapping_add(n as u64));
        circuit.measure_all(PauliAxis::Z);
        let mut times = Vec::with_capacity(REPEATS);
        for _ in 0..REPEATS {
            let start = Instant::now();
            match backend {
                Backend::StateVector => statevector::run(&circuit, shots, seed)?,
                Backend::Stabilizer => stabilizer::run(&circuit, shots, seed)?,
            };
            times.push(start.elapsed());
        }
        times.sort_unstable();
        rows.push(BenchRow {
            n,
            depth: d,
            shots,
            seconds: times[REPEATS / 2]
                .max(Duration::from_nanos(1))
                .as_secs_f64(),
        });
    }
    let growth = fit_growth(backend, &rows);
    Ok(BenchReport {
        backend,
        rows,
        growth,
    })
}

/// `None` with fewer than two rows.
pub fn fit_growth(backend: Backend, rows: &[BenchRow]) -> Option<Growth> {
    if rows.len() < 2 {
        return None;
    }
    Some(match backend {
        Backend::StateVector => {
            let ratios: Vec<f64> = rows
                .windows(2)
                .map(|w| (w[1].seconds / w[0].seconds).log2() / (w[1].n - w[0].n) as f64)
                .collect();
            Growth {
                kind: GrowthKind::Log2RatioPerQubit,
                value: ratios.iter().sum::<f64>() / ratios.len() as f64,
            }
        }
        Backend::Stabilizer => {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| ((r.n as f64).ln(), r.seconds.ln()))
                .collect();
            let k = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
            let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
            Growth {
                kind: GrowthKind::LogLogSlope,
                value: sxy / sxx,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::classify_gottesman_knill;

    #[test]
    fn random_circuits_are_deterministic_and_clifford() {
        assert_eq!(
            random_clifford_circuit(2, 5, 7),
            random_clifford_circuit(2, 5, 7)
        );
        assert_ne!(
            random_clifford_circuit(5, 40, 7),
            random_clifford_circuit(5, 40, 8)
        );
        for seed in 0..20 {
            let c = random_clifford_circuit(4, 30, seed);
            assert_eq!(c.len(), 30);
            assert!(classify_gottesman_knill(&c).is_gk);
            crate::circuit::validate(&c).unwrap();
        }
    }

    #[test]
    fn every_gate_kind_appears() {
        let c = random_clifford_circuit(3, 600, 1);
        for kind in [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::R,
            GateKind::H,
            GateKind::Cnot,
        ] {
            assert!(c
                .ops
                .iter()
                .any(|op| matches!(op, CircuitOp::Gate { kind: k, .. } if *k == kind)));
        }
    }

    #[test]
    fn n_value_ladders() {
        assert_eq!(n_values(Backend::StateVector, 3, 6), vec![3, 4, 5, 6]);
        assert_eq!(
            n_values(Backend::Stabilizer, 50, 800),
            vec![50, 100, 200, 400, 800]
        );
        assert!(n_values(Backend::Stabilizer, 9, 4).is_empty());
    }

    #[test]
    fn empty_range_gives_empty_report() {
        let r = bench_scaling(Backend::Stabilizer, &[], DepthRule::Fixed(10), 1, 0).unwrap();
        assert!(r.rows.is_empty() && r.growth.is_none());
    }

    #[test]
    fn dense_cap_is_enforced() {
        assert!(matches!(
            bench_scaling(Backend::StateVector, &[25], DepthRule::Fixed(1), 1, 0),
            Err(SimError::TooManyQubits { n: 25, .. })
        ));
    }

    #[test]
    fn growth_fits_exact_curves() {
        let rows = |f: &dyn Fn(f64) -> f64, ns: &[usize]| -> Vec<BenchRow> {
            ns.iter()
                .map(|&n| BenchRow {
                    n,
                    depth: 1,
                    shots: 1,
                    seconds: f(n as f64),
                })
                .collect()
        };
        let g = fit_growth(
            Backend::StateVector,
            &rows(&|n| 1e-6 * n.exp2(), &[10, 11, 12, 14]),
        )
        .unwrap();
        assert!((g.value - 1.0).abs() < 1e-12);
        let g = fit_growth(
            Backend::Stabilizer,
            &rows(&|n| 1e-9 * n.powi(3), &[50, 100, 200, 400]),
        )
        .unwrap();
        assert!((g.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_benchmark_runs() {
        let r = bench_scaling(Backend::StateVector, &[4, 3], DepthRule::Linear(2), 10, 3).unwrap();
        assert_eq!(
            r.rows.iter().map(|r| (r.n, r.depth)).collect::<Vec<_>>(),
            vec![(3, 6), (4, 8)]
        );
        assert!(r.rows.iter().all(|r| r.seconds > 0.0));
        assert_eq!(r.growth.unwrap().kind, GrowthKind::Log2RatioPerQubit);
    }
}
