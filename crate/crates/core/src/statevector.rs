//! Dense state-vector backend.
//!
//! Amplitudes are stored big-endian: qubit 0 is the most significant bit of
//! the basis index. Gates are applied in place over amplitude pairs selected by
//! bit masks; no 2ⁿ×2ⁿ matrix is ever built.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{validate, BooleanFunction, Circuit, CircuitOp, GateKind, Matrix2, PauliAxis};
use crate::result::tally;
use crate::{rng, Backend, RunResult, SimError};

pub const MAX_QUBITS: usize = 24;

/// Branch probabilities below this are treated as exactly zero.
pub const PROB_EPS: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Measurement axis: a Pauli basis or an arbitrary Bloch-sphere direction.
/// Serialises as `"X"`/`"Y"`/`"Z"` or `{"theta": …, "phi": …}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Pauli(PauliAxis),
    /// Observable `cosθ·Z + sinθ cosφ·X + sinθ sinφ·Y`.
    Bloch {
        theta: f64,
        phi: f64,
    },
}

impl From<PauliAxis> for Axis {
    fn from(p: PauliAxis) -> Self {
        Axis::Pauli(p)
    }
}

impl Axis {
    /// Bloch direction with `θ` in `[0, π]`; `φ` is wrapped into `[0, 2π)`.
    pub fn bloch(theta: f64, phi: f64) -> Result<Self, SimError> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
            return Err(SimError::InvalidAxis(format!("theta={theta}, phi={phi}")));
        }
        Ok(Axis::Bloch {
            theta,
            phi: phi.rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Unit vector `(x, y, z)` of the observable.
    pub fn direction(self) -> [f64; 3] {
        match self {
            Axis::Pauli(PauliAxis::X) => [1.0, 0.0, 0.0],
            Axis::Pauli(PauliAxis::Y) => [0.0, 1.0, 0.0],
            Axis::Pauli(PauliAxis::Z) => [0.0, 0.0, 1.0],
            Axis::Bloch { theta, phi } => [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ],
        }
    }

    fn check(self) -> Result<(), SimError> {
        match self {
            Axis::Pauli(_) => Ok(()),
            Axis::Bloch { theta, phi } => {
                if (0.0..=std::f64::consts::PI).contains(&theta)
                    && (0.0..std::f64::consts::TAU).contains(&phi)
                {
                    Ok(())
                } else {
                    Err(SimError::InvalidAxis(format!("theta={theta}, phi={phi}")))
                }
            }
        }
    }

    /// Unitary whose rows are `⟨+|` and `⟨−|` of the observable, so that after
    /// applying it the ±1 eigenspaces become the qubit's |0⟩/|1⟩ subspaces.
    /// `None` for Z, which needs no rotation.
    fn basis_change(self) -> Option<Matrix2> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Axis::Pauli(PauliAxis::Z) => None,
            Axis::Pauli(PauliAxis::X) => GateKind::H.matrix2(),
            Axis::Pauli(PauliAxis::Y) => Some([
                [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
                [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            ]),
            Axis::Bloch { theta, phi } => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let e = Complex64::from_polar(1.0, phi);
                // |+⟩ = (c, e s), |−⟩ = (s, −e c); rows are their conjugates.
                Some([
                    [Complex64::new(c, 0.0), (e * s).conj()],
                    [Complex64::new(s, 0.0), -(e * c).conj()],
                ])
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub qubit: usize,
    pub axis: Axis,
}

impl MeasurementSpec {
    pub fn new(qubit: usize, axis: impl Into<Axis>) -> Self {
        Self {
            qubit,
            axis: axis.into(),
        }
    }
}

/// Eigenvalue of a single-qubit ±1 observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    /// Classical bit encoding, `(1 − outcome) / 2`.
    pub fn bit(self) -> bool {
        self == Outcome::Minus
    }

    /// Shared sampling rule: one uniform draw per measurement, `+1` iff `u < p_plus`.
    pub(crate) fn sample<R: Rng + ?Sized>(p_plus: f64, rng: &mut R) -> Self {
        let u: f64 = rng.gen();
        if u < p_plus {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measured {
    pub outcome: Outcome,
    pub p_plus: f64,
}

fn clamp_prob(p: f64) -> f64 {
    if p < PROB_EPS {
        0.0
    } else if p > 1.0 - PROB_EPS {
        1.0
    } else {
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, SimError> {
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n, max: MAX_QUBITS });
        }
        if n == 0 {
            return Err(SimError::IndexOutOfRange {
                index: 0,
                n_qubits: 0,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two. The vector is
    /// normalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::IndexOutOfRange {
                index: len,
                n_qubits: 0,
            });
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n, max: MAX_QUBITS });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < PROB_EPS {
            return Err(SimError::DegenerateNorm(norm));
        }
        Ok(Self {
            n_qubits: n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Basis state `|bits⟩` with `bits[0]` the value of qubit 0.
    pub fn basis(bits: &[bool]) -> Result<Self, SimError> {
        let mut s = Self::zero(bits.len())?;
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        s.amps[0] = ZERO;
        s.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(SimError::IndexOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        }
    }

    pub fn apply_matrix(&mut self, q: usize, m: &Matrix2) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let mask = self.mask(q);
        // Walk blocks of size 2*mask: lower half has the bit clear.
        for block in self.amps.chunks_mut(mask << 1) {
            let (lo, hi) = block.split_at_mut(mask);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), SimError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(SimError::DuplicateQubit(control));
        }
        let (cm, tm) = (self.mask(control), self.mask(target));
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
        Ok(())
    }

    /// `|x⟩|y⟩ → |x⟩|y ⊕ f(x)⟩`.
    pub fn apply_oracle(
        &mut self,
        f: &BooleanFunction,
        inputs: &[usize],
        output: usize,
    ) -> Result<(), SimError> {
        for &q in inputs.iter().chain(std::iter::once(&output)) {
            self.check_qubit(q)?;
        }
        if inputs.len() != f.arity() {
            return Err(SimError::UnsupportedOp(format!(
                "oracle of arity {} given {} inputs",
                f.arity(),
                inputs.len()
            )));
        }
        if inputs.contains(&output) {
            return Err(SimError::DuplicateQubit(output));
        }
        let in_masks: Vec<usize> = inputs.iter().map(|&q| self.mask(q)).collect();
        let om = self.mask(output);
        for i in 0..self.amps.len() {
            if i & om != 0 {
                continue;
            }
            let x = in_masks
                .iter()
                .fold(0usize, |acc, &m| (acc << 1) | (i & m != 0) as usize);
            if f.eval(x) {
                self.amps.swap(i, i | om);
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, kind: GateKind, targets: &[usize]) -> Result<(), SimError> {
        if targets.len() != kind.arity() {
            return Err(SimError::UnsupportedOp(format!(
                "{} expects {} target(s)",
                kind.mnemonic(),
                kind.arity()
            )));
        }
        match kind.matrix2() {
            Some(m) => self.apply_matrix(targets[0], &m),
            None => self.apply_cnot(targets[0], targets[1]),
        }
    }

    /// Applies a gate or oracle. A conditioned gate acts only when its bit in
    /// `cbits` is set. Measurements are rejected; use [`PureState::measure`].
    pub fn apply_op(&mut self, op: &CircuitOp, cbits: &[bool]) -> Result<(), SimError> {
        match op {
            CircuitOp::Gate {
                kind,
                targets,
                condition,
            } => {
                if let Some(c) = *condition {
                    match cbits.get(c) {
                        Some(true) => {}
                        Some(false) => return Ok(()),
                        None => {
                            return Err(SimError::UnsupportedOp(format!(
                                "condition bit c{c} not present"
                            )))
                        }
                    }
                }
                self.apply_gate(*kind, targets)
            }
            CircuitOp::Oracle {
                function,
                inputs,
                output,
            } => self.apply_oracle(function, inputs, *output),
            CircuitOp::Measure { .. } => {
                Err(SimError::UnsupportedOp("measure is not unitary".into()))
            }
        }
    }

    /// Born probability of the `+1` outcome.
    pub fn p_plus(&self, spec: MeasurementSpec) -> Result<f64, SimError> {
        self.check_qubit(spec.qubit)?;
        spec.axis.check()?;
        let mask = self.mask(spec.qubit);
        let p = match spec.axis.basis_change() {
            None => plus_weight(&self.amps, mask),
            Some(u) => {
                let mut rotated = self.clone();
                rotated.apply_matrix(spec.qubit, &u)?;
                plus_weight(&rotated.amps, mask)
            }
        };
        Ok(clamp_prob(p))
    }

    /// Projects onto the eigenspace of `outcome` and renormalises. Returns the
    /// branch probability.
    pub fn project(&mut self, spec: MeasurementSpec, outcome: Outcome) -> Result<f64, SimError> {
        self.check_qubit(spec.qubit)?;
        spec.axis.check()?;
        let mask = self.mask(spec.qubit);
        let u = spec.axis.basis_change();
        if let Some(u) = &u {
            self.apply_matrix(spec.qubit, u)?;
        }
        let plus = plus_weight(&self.amps, mask);
        let p = clamp_prob(match outcome {
            Outcome::Plus => plus,
            Outcome::Minus => 1.0 - plus,
        });
        if p < PROB_EPS {
            return Err(SimError::DegenerateNorm(p));
        }
        // Recompute the kept weight directly rather than trusting 1 - plus.
        let keep_set = outcome == Outcome::Minus;
        let kept: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) == keep_set)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let scale = 1.0 / kept.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) == keep_set {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        if let Some(u) = &u {
            self.apply_matrix(spec.qubit, &crate::circuit::gate_adjoint(u))?;
        }
        Ok(p)
    }

    /// Born-rule measurement: samples an outcome and collapses the state.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        spec: MeasurementSpec,
        rng: &mut R,
    ) -> Result<Measured, SimError> {
        let p_plus = self.p_plus(spec)?;
        let outcome = Outcome::sample(p_plus, rng);
        self.project(spec, outcome)?;
        Ok(Measured { outcome, p_plus })
    }

    /// Expectation `⟨ψ|P|ψ⟩` of a tensor product of single-qubit observables.
    pub fn expectation(&self, specs: &[MeasurementSpec]) -> Result<f64, SimError> {
        let dist = joint_probabilities(self, specs)?;
        Ok(dist
            .iter()
            .enumerate()
            .map(|(idx, p)| if idx.count_ones() % 2 == 0 { *p } else { -*p })
            .sum())
    }
}

/// Weight of the `+1` branch relative to the state's actual norm, so rounding
/// in the amplitudes cancels (`H|0⟩` gives exactly 1/2).
fn plus_weight(amps: &[Complex64], mask: usize) -> f64 {
    let (plus, minus) = amps.iter().enumerate().fold((0.0, 0.0), |(p, m), (i, a)| {
        if i & mask == 0 {
            (p + a.norm_sqr(), m)
        } else {
            (p, m + a.norm_sqr())
        }
    });
    plus / (plus + minus)
}

/// Exact joint distribution of measuring each spec's qubit in its axis.
///
/// The result has `2^k` entries indexed big-endian over the specs: bit `j`
/// (counting from the most significant) is 1 when spec `j` yields `−1`.
pub fn joint_probabilities(
    state: &PureState,
    specs: &[MeasurementSpec],
) -> Result<Vec<f64>, SimError> {
    let mut seen = vec![false; state.n_qubits];
    for s in specs {
        state.check_qubit(s.qubit)?;
        s.axis.check()?;
        if std::mem::replace(&mut seen[s.qubit], true) {
            return Err(SimError::DuplicateQubit(s.qubit));
        }
    }
    let mut rotated = state.clone();
    for s in specs {
        if let Some(u) = s.axis.basis_change() {
            rotated.apply_matrix(s.qubit, &u)?;
        }
    }
    let masks: Vec<usize> = specs.iter().map(|s| state.mask(s.qubit)).collect();
    let mut dist = vec![0.0; 1 << specs.len()];
    for (i, a) in rotated.amps.iter().enumerate() {
        let idx = masks
            .iter()
            .fold(0usize, |acc, &m| (acc << 1) | (i & m != 0) as usize);
        dist[idx] += a.norm_sqr();
    }
    Ok(dist)
}

/// True iff some unit `c` gives `max_x |a_x − c·b_x| ≤ tol`. `c` is fixed by
/// the first amplitude of `b` with magnitude above 1e-8.
pub fn equal_up_to_global_phase(a: &PureState, b: &PureState, tol: f64) -> bool {
    if a.n_qubits != b.n_qubits {
        return false;
    }
    let c = match b.amps.iter().position(|x| x.norm() > 1e-8) {
        Some(k) => {
            let r = a.amps[k] / b.amps[k];
            if r.norm() < 1e-12 {
                return false;
            }
            r / r.norm()
        }
        None => Complex64::new(1.0, 0.0),
    };
    a.amps
        .iter()
        .zip(&b.amps)
        .all(|(x, y)| (x - c * y).norm() <= tol)
}

/// Evolves `|0…0⟩` through a measurement-free circuit.
pub fn evolve(circuit: &Circuit) -> Result<PureState, SimError> {
    validate(circuit).map_err(SimError::InvalidCircuit)?;
    let mut state = PureState::zero(circuit.n_qubits)?;
    for op in &circuit.ops {
        state.apply_op(op, &[])?;
    }
    Ok(state)
}

/// Runs `shots` independent executions. Shot `k` draws from RNG stream `k`.
pub fn run(circuit: &Circuit, shots: u64, seed: u64) -> Result<RunResult, SimError> {
    validate(circuit).map_err(SimError::InvalidCircuit)?;
    let mut base = PureState::zero(circuit.n_qubits)?;
    let split = circuit.unitary_prefix_len();
    for op in &circuit.ops[..split] {
        base.apply_op(op, &[])?;
    }
    let rest = &circuit.ops[split..];
    let n_cbits = circuit.n_cbits;

    let counts = if rest.is_empty() {
        tally(std::iter::repeat_n(
            crate::circuit::cbits_key(&vec![false; n_cbits]),
            shots as usize,
        ))
    } else {
        let keys = (0..shots)
            .into_par_iter()
            .map(|shot| {
                let mut rng = rng::stream(seed, shot);
                let mut state = base.clone();
                let mut cbits = vec![false; n_cbits];
                for op in rest {
                    match op {
                        CircuitOp::Measure { qubit, axis, dest } => {
                            let m = state.measure(MeasurementSpec::new(*qubit, *axis), &mut rng)?;
                            cbits[*dest] = m.outcome.bit();
                        }
                        other => state.apply_op(other, &cbits)?,
                    }
                }
                Ok(crate::circuit::cbits_key(&cbits))
            })
            .collect::<Result<Vec<String>, SimError>>()?;
        tally(keys)
    };

    Ok(RunResult {
        backend: Backend::StateVector,
        shots,
        seed,
        rng_id: rng::RNG_ID.to_string(),
        counts,
        final_state_available: split == circuit.ops.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::library;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state(amps: &[Complex64]) -> PureState {
        PureState::from_amplitudes(amps.to_vec()).unwrap()
    }

    fn singlet() -> PureState {
        state(&[
            c(0., 0.),
            c(FRAC_1_SQRT_2, 0.),
            c(-FRAC_1_SQRT_2, 0.),
            c(0., 0.),
        ])
    }

    #[test]
    fn init_state_bounds() {
        assert_eq!(
            PureState::zero(1).unwrap().amplitudes(),
            &[c(1., 0.), c(0., 0.)]
        );
        assert_eq!(
            PureState::zero(2).unwrap().amplitudes(),
            &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]
        );
        assert_eq!(
            PureState::zero(25),
            Err(SimError::TooManyQubits { n: 25, max: 24 })
        );
    }

    #[test]
    fn gate_actions_from_the_gate_table() {
        let mut s = PureState::zero(1).unwrap();
        s.apply_gate(GateKind::H, &[0]).unwrap();
        assert!(equal_up_to_global_phase(
            &s,
            &state(&[c(1., 0.), c(1., 0.)]),
            1e-15
        ));
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);

        let mut s = PureState::zero(1).unwrap();
        s.apply_gate(GateKind::Y, &[0]).unwrap();
        assert_eq!(s.amplitudes(), &[c(0., 0.), c(0., 1.)]);

        let mut s = PureState::basis(&[true, true]).unwrap();
        s.apply_gate(GateKind::Cnot, &[0, 1]).unwrap();
        assert_eq!(s, PureState::basis(&[true, false]).unwrap());

        let mut s = PureState::basis(&[false, true]).unwrap();
        s.apply_gate(GateKind::Cnot, &[1, 0]).unwrap();
        assert_eq!(s, PureState::basis(&[true, true]).unwrap());
    }

    #[test]
    fn oracle_writes_function_into_zeroed_output() {
        let f = BooleanFunction::from_bits("01").unwrap();
        let mut s = PureState::zero(2).unwrap();
        s.apply_gate(GateKind::H, &[0]).unwrap();
        s.apply_oracle(&f, &[0], 1).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_eq!(s.amplitudes(), &[c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]);
    }

    #[test]
    fn oracle_matrix_is_a_permutation() {
        for bits in ["0110", "0001", "1111", "1000"] {
            let f = BooleanFunction::from_bits(bits).unwrap();
            let mut columns = Vec::new();
            for x in 0..8usize {
                let b = [x & 4 != 0, x & 2 != 0, x & 1 != 0];
                let mut s = PureState::basis(&b).unwrap();
                s.apply_oracle(&f, &[0, 1], 2).unwrap();
                let ones: Vec<usize> = s
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a == c(1., 0.))
                    .map(|(i, _)| i)
                    .collect();
                assert_eq!(ones.len(), 1);
                assert!(s.amplitudes().iter().filter(|a| **a != c(0., 0.)).count() == 1);
                columns.push(ones[0]);
            }
            columns.sort_unstable();
            assert_eq!(columns, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn apply_op_respects_condition_and_rejects_measure() {
        let mut s = PureState::zero(1).unwrap();
        let op = CircuitOp::conditioned(GateKind::X, &[0], 0);
        s.apply_op(&op, &[false]).unwrap();
        assert_eq!(s, PureState::zero(1).unwrap());
        s.apply_op(&op, &[true]).unwrap();
        assert_eq!(s, PureState::basis(&[true]).unwrap());
        assert!(s
            .apply_op(&CircuitOp::measure(0, PauliAxis::Z, 0), &[false])
            .is_err());
        assert!(matches!(
            s.apply_op(&CircuitOp::gate(GateKind::X, &[3]), &[]),
            Err(SimError::IndexOutOfRange { index: 3, .. })
        ));
    }

    #[test]
    fn born_rule_on_equal_superposition() {
        let plus = state(&[c(1., 0.), c(1., 0.)]);
        let spec = MeasurementSpec::new(0, PauliAxis::Z);
        assert!((plus.p_plus(spec).unwrap() - 0.5).abs() < 1e-15);
        let mut collapsed = plus.clone();
        collapsed.project(spec, Outcome::Plus).unwrap();
        assert!(equal_up_to_global_phase(
            &collapsed,
            &PureState::zero(1).unwrap(),
            1e-12
        ));

        let x = MeasurementSpec::new(0, PauliAxis::X);
        assert_eq!(plus.p_plus(x).unwrap(), 1.0);
        let mut rng = rng::stream(1, 0);
        for _ in 0..20 {
            let mut s = plus.clone();
            assert_eq!(s.measure(x, &mut rng).unwrap().outcome, Outcome::Plus);
        }
        let mut s = plus.clone();
        assert_eq!(
            s.project(x, Outcome::Minus),
            Err(SimError::DegenerateNorm(0.0))
        );
    }

    #[test]
    fn y_and_bloch_axes() {
        // (|0⟩ + i|1⟩)/√2 is the +1 eigenstate of Y.
        let y_plus = state(&[c(1., 0.), c(0., 1.)]);
        assert_eq!(
            y_plus
                .p_plus(MeasurementSpec::new(0, PauliAxis::Y))
                .unwrap(),
            1.0
        );
        let bloch_y = Axis::bloch(PI / 2.0, PI / 2.0).unwrap();
        assert!((y_plus.p_plus(MeasurementSpec::new(0, bloch_y)).unwrap() - 1.0).abs() < 1e-12);
        // Tilted axis on |0⟩: p_plus = cos²(θ/2).
        let tilt = Axis::bloch(1.0, 0.3).unwrap();
        let p = PureState::zero(1)
            .unwrap()
            .p_plus(MeasurementSpec::new(0, tilt))
            .unwrap();
        assert!((p - (0.5f64).cos().powi(2)).abs() < 1e-12);
        assert!(Axis::bloch(4.0, 0.0).is_err());
        assert_eq!(
            Axis::bloch(1.0, -PI / 4.0).unwrap(),
            Axis::Bloch {
                theta: 1.0,
                phi: 7.0 * PI / 4.0
            }
        );
    }

    #[test]
    fn singlet_outcomes_are_opposite() {
        let mut rng = rng::stream(3, 0);
        for _ in 0..200 {
            let mut s = singlet();
            let a = s
                .measure(MeasurementSpec::new(0, PauliAxis::Z), &mut rng)
                .unwrap();
            let b = s
                .measure(MeasurementSpec::new(1, PauliAxis::Z), &mut rng)
                .unwrap();
            assert_ne!(a.outcome, b.outcome);
            assert!(b.p_plus == 0.0 || b.p_plus == 1.0);
        }
    }

    #[test]
    fn joint_probabilities_singlet_and_ghz() {
        let s = singlet();
        for axis in [PauliAxis::Z, PauliAxis::X, PauliAxis::Y] {
            let d = joint_probabilities(
                &s,
                &[MeasurementSpec::new(0, axis), MeasurementSpec::new(1, axis)],
            )
            .unwrap();
            let expected = [0.0, 0.5, 0.5, 0.0];
            for (p, e) in d.iter().zip(expected) {
                assert!((p - e).abs() < 1e-12, "{axis:?} {d:?}");
            }
        }
        let ghz = evolve(&library::ghz(3)).unwrap();
        let specs: Vec<_> = (0..3)
            .map(|q| MeasurementSpec::new(q, PauliAxis::X))
            .collect();
        let d = joint_probabilities(&ghz, &specs).unwrap();
        for (idx, p) in d.iter().enumerate() {
            let expected = if idx.count_ones() % 2 == 0 { 0.25 } else { 0.0 };
            assert!((p - expected).abs() < 1e-12);
        }
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert_eq!(
            joint_probabilities(
                &ghz,
                &[
                    MeasurementSpec::new(0, PauliAxis::X),
                    MeasurementSpec::new(0, PauliAxis::Z)
                ]
            ),
            Err(SimError::DuplicateQubit(0))
        );
        assert!(matches!(
            joint_probabilities(&ghz, &[MeasurementSpec::new(5, PauliAxis::X)]),
            Err(SimError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn ghz_state_from_builder() {
        let ghz = evolve(&library::ghz(3)).unwrap();
        let mut amps = vec![c(0., 0.); 8];
        amps[0] = c(1., 0.);
        amps[7] = c(1., 0.);
        assert!(equal_up_to_global_phase(&ghz, &state(&amps), 1e-12));
    }

    #[test]
    fn global_phase_comparison() {
        let s = singlet();
        let neg = state(&s.amplitudes().iter().map(|a| -a).collect::<Vec<_>>());
        let rot = state(
            &s.amplitudes()
                .iter()
                .map(|a| a * c(0., 1.))
                .collect::<Vec<_>>(),
        );
        assert!(equal_up_to_global_phase(&s, &neg, 1e-12));
        assert!(equal_up_to_global_phase(&s, &rot, 1e-12));
        assert!(!equal_up_to_global_phase(
            &PureState::basis(&[false, false]).unwrap(),
            &PureState::basis(&[false, true]).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn run_empty_circuit_with_measurement() {
        let mut circ = Circuit::new(1, 1);
        circ.push(CircuitOp::measure(0, PauliAxis::Z, 0));
        let r = run(&circ, 57, 9).unwrap();
        assert_eq!(
            r.counts.into_iter().collect::<Vec<_>>(),
            vec![("0".to_string(), 57)]
        );
    }

    #[test]
    fn run_without_measurements_reports_final_state() {
        let r = run(&library::gk_entangler(), 10, 0).unwrap();
        assert!(r.final_state_available);
        assert_eq!(r.counts.get(""), Some(&10));
    }

    #[test]
    fn run_rejects_invalid_circuits() {
        let mut circ = Circuit::new(1, 0);
        circ.push(CircuitOp::gate(GateKind::Cnot, &[0, 1]));
        assert!(matches!(run(&circ, 1, 0), Err(SimError::InvalidCircuit(_))));
    }
}
