//! Stabilizer tableau backend for Gottesman-Knill circuits.
//!
//! The state is held as `n` destabilizer and `n` stabilizer generators, each a
//! Pauli string with a real sign. Rows are packed into 64-bit words. Gates cost
//! O(n) and measurements O(n²), independent of the 2ⁿ amplitude count.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{
    cbits_key, classify_gottesman_knill, validate, Circuit, CircuitOp, GateKind, PauliAxis,
};
use crate::result::tally;
use crate::statevector::{Measured, Outcome, PureState};
use crate::{rng, Backend, RunResult, SimError};

/// Largest register [`Tableau::to_statevector`] will expand.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;

/// A signed Pauli string, used to read generators out of a tableau.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    pub negative: bool,
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for (&x, &z) in self.x.iter().zip(&self.z) {
            f.write_str(match (x, z) {
                (false, false) => "I",
                (true, false) => "X",
                (true, true) => "Y",
                (false, true) => "Z",
            })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    // (2n + 1) rows of `words` u64 each; row 2n is scratch space.
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<bool>,
}

#[inline]
fn bit(q: usize) -> (usize, u64) {
    (q >> 6, 1u64 << (q & 63))
}

impl Tableau {
    /// The `|0…0⟩` tableau: destabilizer `i` is `+X_i`, stabilizer `i` is `+Z_i`.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Self {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            sign: vec![false; rows],
        };
        for i in 0..n {
            let (w, m) = bit(i);
            t.x[i * words + w] |= m;
            t.z[(n + i) * words + w] |= m;
        }
        t
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Memory held by the generator bits, in bytes.
    pub fn footprint_bytes(&self) -> usize {
        (self.x.len() + self.z.len()) * 8 + self.sign.len()
    }

    #[inline]
    fn xb(&self, row: usize, q: usize) -> bool {
        let (w, m) = bit(q);
        self.x[row * self.words + w] & m != 0
    }

    #[inline]
    fn zb(&self, row: usize, q: usize) -> bool {
        let (w, m) = bit(q);
        self.z[row * self.words + w] & m != 0
    }

    fn row(&self, row: usize) -> PauliString {
        PauliString {
            negative: self.sign[row],
            x: (0..self.n).map(|q| self.xb(row, q)).collect(),
            z: (0..self.n).map(|q| self.zb(row, q)).collect(),
        }
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        self.row(i)
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q < self.n {
            Ok(())
        } else {
            Err(SimError::IndexOutOfRange {
                index: q,
                n_qubits: self.n,
            })
        }
    }

    /// Applies a per-row update to the (x, z) bits of qubit `q` on every generator.
    #[inline]
    fn for_each_row(&mut self, q: usize, mut f: impl FnMut(&mut bool, &mut bool, &mut bool)) {
        let (w, m) = bit(q);
        for row in 0..2 * self.n {
            let idx = row * self.words + w;
            let mut xv = self.x[idx] & m != 0;
            let mut zv = self.z[idx] & m != 0;
            f(&mut xv, &mut zv, &mut self.sign[row]);
            self.x[idx] = if xv {
                self.x[idx] | m
            } else {
                self.x[idx] & !m
            };
            self.z[idx] = if zv {
                self.z[idx] | m
            } else {
                self.z[idx] & !m
            };
        }
    }

    pub fn h(&mut self, q: usize) {
        self.for_each_row(q, |x, z, s| {
            *s ^= *x & *z;
            std::mem::swap(x, z);
        });
    }

    /// Quarter-turn phase gate `|1⟩ → i|1⟩`.
    pub fn r(&mut self, q: usize) {
        self.for_each_row(q, |x, z, s| {
            *s ^= *x & *z;
            *z ^= *x;
        });
    }

    /// Inverse of [`Tableau::r`].
    pub fn r_dagger(&mut self, q: usize) {
        self.for_each_row(q, |x, z, s| {
            *s ^= *x & !*z;
            *z ^= *x;
        });
    }

    pub fn x(&mut self, q: usize) {
        self.for_each_row(q, |_, z, s| *s ^= *z);
    }

    pub fn y(&mut self, q: usize) {
        self.for_each_row(q, |x, z, s| *s ^= *x ^ *z);
    }

    pub fn z(&mut self, q: usize) {
        self.for_each_row(q, |x, _, s| *s ^= *x);
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (cw, cm) = bit(control);
        let (tw, tm) = bit(target);
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xa = self.x[base + cw] & cm != 0;
            let za = self.z[base + cw] & cm != 0;
            let xb = self.x[base + tw] & tm != 0;
            let zb = self.z[base + tw] & tm != 0;
            self.sign[row] ^= xa & zb & !(xb ^ za);
            if xa {
                self.x[base + tw] ^= tm;
            }
            if zb {
                self.z[base + cw] ^= cm;
            }
        }
    }

    pub fn apply_gate(&mut self, kind: GateKind, targets: &[usize]) -> Result<(), SimError> {
        if targets.len() != kind.arity() {
            return Err(SimError::UnsupportedOp(format!(
                "{} expects {} target(s)",
                kind.mnemonic(),
                kind.arity()
            )));
        }
        for &t in targets {
            self.check_qubit(t)?;
        }
        match kind {
            GateKind::I => {}
            GateKind::X => self.x(targets[0]),
            GateKind::Y => self.y(targets[0]),
            GateKind::Z => self.z(targets[0]),
            GateKind::R => self.r(targets[0]),
            GateKind::H => self.h(targets[0]),
            GateKind::Cnot => {
                if targets[0] == targets[1] {
                    return Err(SimError::DuplicateQubit(targets[0]));
                }
                self.cnot(targets[0], targets[1])
            }
            GateKind::S => return Err(SimError::NonClifford { op_index: None }),
        }
        Ok(())
    }

    /// Applies a Clifford gate (identity when its condition bit is 0).
    pub fn apply_clifford(&mut self, op: &CircuitOp, cbits: &[bool]) -> Result<(), SimError> {
        match op {
            CircuitOp::Gate {
                kind,
                targets,
                condition,
            } => {
                if !kind.is_clifford() {
                    return Err(SimError::NonClifford { op_index: None });
                }
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
            CircuitOp::Oracle { .. } => Err(SimError::NonClifford { op_index: None }),
            CircuitOp::Measure { .. } => {
                Err(SimError::UnsupportedOp("measure is not a gate".into()))
            }
        }
    }

    /// Left-multiplies row `h` by row `i`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let (hb, ib) = (h * self.words, i * self.words);
        let mut acc: i64 = 2 * (self.sign[h] as i64 + self.sign[i] as i64);
        for w in 0..self.words {
            let (x1, z1) = (self.x[ib + w], self.z[ib + w]);
            let (x2, z2) = (self.x[hb + w], self.z[hb + w]);
            acc += phase_exponent(x1, z1, x2, z2);
            self.x[hb + w] = x1 ^ x2;
            self.z[hb + w] = z1 ^ z2;
        }
        self.sign[h] = acc.rem_euclid(4) == 2;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.sign[dst] = self.sign[src];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.sign[row] = false;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.x.swap(a * self.words + w, b * self.words + w);
            self.z.swap(a * self.words + w, b * self.words + w);
        }
        self.sign.swap(a, b);
    }

    /// Returns `Some(sign)` when a Z measurement of `q` is deterministic
    /// (`true` meaning outcome −1), `None` when it is a fair coin.
    fn z_determined(&mut self, q: usize) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|row| self.xb(row, q)) {
            return None;
        }
        let scratch = 2 * n;
        self.clear_row(scratch);
        for i in 0..n {
            if self.xb(i, q) {
                self.rowsum(scratch, i + n);
            }
        }
        Some(self.sign[scratch])
    }

    /// Z measurement with a chosen outcome for the random case.
    fn measure_z_with(
        &mut self,
        q: usize,
        choose: impl FnOnce(f64) -> Outcome,
    ) -> Result<Measured, SimError> {
        let n = self.n;
        match (n..2 * n).find(|&row| self.xb(row, q)) {
            Some(p) => {
                let outcome = choose(0.5);
                for row in 0..2 * n {
                    if row != p && self.xb(row, q) {
                        self.rowsum(row, p);
                    }
                }
                self.copy_row(p - n, p);
                self.clear_row(p);
                let (w, m) = bit(q);
                self.z[p * self.words + w] |= m;
                self.sign[p] = outcome.bit();
                Ok(Measured {
                    outcome,
                    p_plus: 0.5,
                })
            }
            None => {
                let negative = self.z_determined(q).unwrap_or(false);
                let p_plus = if negative { 0.0 } else { 1.0 };
                let forced = if negative {
                    Outcome::Minus
                } else {
                    Outcome::Plus
                };
                if choose(p_plus) != forced {
                    return Err(SimError::DegenerateNorm(0.0));
                }
                Ok(Measured {
                    outcome: forced,
                    p_plus,
                })
            }
        }
    }

    /// Conjugates by the Clifford that maps `axis` to Z (H for X, H·R† for Y).
    fn rotate_to_z(&mut self, q: usize, axis: PauliAxis) {
        match axis {
            PauliAxis::X => self.h(q),
            PauliAxis::Y => {
                self.r_dagger(q);
                self.h(q);
            }
            PauliAxis::Z => {}
        }
    }

    fn rotate_from_z(&mut self, q: usize, axis: PauliAxis) {
        match axis {
            PauliAxis::X => self.h(q),
            PauliAxis::Y => {
                self.h(q);
                self.r(q);
            }
            PauliAxis::Z => {}
        }
    }

    fn measure_with(
        &mut self,
        q: usize,
        axis: PauliAxis,
        choose: impl FnOnce(f64) -> Outcome,
    ) -> Result<Measured, SimError> {
        self.check_qubit(q)?;
        self.rotate_to_z(q, axis);
        let result = self.measure_z_with(q, choose);
        self.rotate_from_z(q, axis);
        result
    }

    /// Probability of the `+1` outcome; always 0, 1/2 or 1.
    pub fn p_plus(&self, q: usize, axis: PauliAxis) -> Result<f64, SimError> {
        self.check_qubit(q)?;
        let mut t = self.clone();
        t.rotate_to_z(q, axis);
        Ok(match t.z_determined(q) {
            None => 0.5,
            Some(false) => 1.0,
            Some(true) => 0.0,
        })
    }

    /// Pauli measurement. One uniform draw is consumed whether or not the
    /// outcome is random, matching the dense backend's sampling rule.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        axis: PauliAxis,
        rng: &mut R,
    ) -> Result<Measured, SimError> {
        self.measure_with(q, axis, |p| Outcome::sample(p, rng))
    }

    /// Measures with a prescribed outcome; fails if that outcome has probability 0.
    pub fn project(
        &mut self,
        q: usize,
        axis: PauliAxis,
        outcome: Outcome,
    ) -> Result<Measured, SimError> {
        self.measure_with(q, axis, |_| outcome)
    }

    /// True when all stabilizers commute and each destabilizer anticommutes
    /// with exactly its own stabilizer.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        let sym = |a: usize, b: usize| -> bool {
            let mut acc = 0u32;
            for w in 0..self.words {
                acc += ((self.x[a * self.words + w] & self.z[b * self.words + w])
                    ^ (self.z[a * self.words + w] & self.x[b * self.words + w]))
                    .count_ones();
            }
            acc % 2 == 1
        };
        for i in 0..n {
            for j in 0..n {
                if sym(n + i, n + j) || sym(i, j) || sym(i, n + j) != (i == j) {
                    return false;
                }
            }
        }
        true
    }

    /// Expands to the dense state fixed by every stabilizer (unique up to phase).
    pub fn to_statevector(&self) -> Result<PureState, SimError> {
        let n = self.n;
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(SimError::TooManyQubits {
                n,
                max: MAX_STATEVECTOR_QUBITS,
            });
        }
        // Row-reduce the stabilizers on their X part; rows left with no X are
        // Z-type constraints fixing the parity of the computational support.
        let mut t = self.clone();
        let mut pivot = n;
        for q in 0..n {
            if let Some(r) = (pivot..2 * n).find(|&r| t.xb(r, q)) {
                t.swap_rows(pivot, r);
                for other in n..2 * n {
                    if other != pivot && t.xb(other, q) {
                        t.rowsum(other, pivot);
                    }
                }
                pivot += 1;
            }
        }
        // Solve z·b = sign over GF(2) for one support element b.
        let mut eqs: Vec<(Vec<bool>, bool)> = (pivot..2 * n)
            .map(|r| ((0..n).map(|q| t.zb(r, q)).collect(), t.sign[r]))
            .collect();
        let mut b = vec![false; n];
        let mut pivots = Vec::new();
        let mut row = 0;
        for q in 0..n {
            if let Some(k) = (row..eqs.len()).find(|&k| eqs[k].0[q]) {
                eqs.swap(row, k);
                for k in 0..eqs.len() {
                    if k != row && eqs[k].0[q] {
                        let (src, rhs) = (eqs[row].0.clone(), eqs[row].1);
                        for (d, s) in eqs[k].0.iter_mut().zip(src) {
                            *d ^= s;
                        }
                        eqs[k].1 ^= rhs;
                    }
                }
                pivots.push(q);
                row += 1;
            }
        }
        for (k, &q) in pivots.iter().enumerate() {
            b[q] = eqs[k].1;
        }

        let mut amps = PureState::basis(&b)?.amplitudes().to_vec();
        for i in 0..n {
            let g = self.stabilizer(i);
            let moved = apply_pauli(&g, &amps);
            for (a, m) in amps.iter_mut().zip(moved) {
                *a = (*a + m) * 0.5;
            }
        }
        PureState::from_amplitudes(amps)
    }
}

/// Sum over packed qubits of the exponent of `i` picked up when multiplying
/// Pauli (x1, z1) into (x2, z2).
#[inline]
fn phase_exponent(x1: u64, z1: u64, x2: u64, z2: u64) -> i64 {
    let y1 = x1 & z1;
    let xo = x1 & !z1;
    let zo = !x1 & z1;
    let plus = (y1 & z2 & !x2) | (xo & z2 & x2) | (zo & x2 & !z2);
    let minus = (y1 & x2 & !z2) | (xo & z2 & !x2) | (zo & x2 & z2);
    plus.count_ones() as i64 - minus.count_ones() as i64
}

/// `P|ψ⟩` for a signed Pauli string on dense amplitudes (qubit 0 most significant).
pub(crate) fn apply_pauli(p: &PauliString, amps: &[Complex64]) -> Vec<Complex64> {
    let n = p.x.len();
    let mut xmask = 0usize;
    let mut zmask = 0usize;
    for q in 0..n {
        let m = 1usize << (n - 1 - q);
        if p.x[q] {
            xmask |= m;
        }
        if p.z[q] {
            zmask |= m;
        }
    }
    // Y = iXZ on each qubit where both bits are set.
    let ys = p.x.iter().zip(&p.z).filter(|(x, z)| **x && **z).count();
    let mut prefactor = Complex64::new(1.0, 0.0) * Complex64::i().powu(ys as u32);
    if p.negative {
        prefactor = -prefactor;
    }
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (b, a) in amps.iter().enumerate() {
        let s = if (b & zmask).count_ones() % 2 == 1 {
            -prefactor
        } else {
            prefactor
        };
        out[b ^ xmask] = s * a;
    }
    out
}

/// Runs a Gottesman-Knill circuit. Shot `k` draws from RNG stream `k`.
pub fn run(circuit: &Circuit, shots: u64, seed: u64) -> Result<RunResult, SimError> {
    validate(circuit).map_err(SimError::InvalidCircuit)?;
    if let Some(i) = classify_gottesman_knill(circuit).first_offender {
        return Err(SimError::NonClifford { op_index: Some(i) });
    }
    let split = circuit.unitary_prefix_len();
    let base = evolve_ops(Tableau::new(circuit.n_qubits), &circuit.ops[..split])?;
    let rest = &circuit.ops[split..];
    let n_cbits = circuit.n_cbits;

    let counts = if rest.is_empty() {
        tally(std::iter::repeat_n(
            cbits_key(&vec![false; n_cbits]),
            shots as usize,
        ))
    } else {
        let keys = (0..shots)
            .into_par_iter()
            .map(|shot| {
                let mut rng = rng::stream(seed, shot);
                let mut t = base.clone();
                let mut cbits = vec![false; n_cbits];
                for op in rest {
                    match op {
                        CircuitOp::Measure { qubit, axis, dest } => {
                            cbits[*dest] = t.measure_pauli(*qubit, *axis, &mut rng)?.outcome.bit();
                        }
                        other => t.apply_clifford(other, &cbits)?,
                    }
                }
                Ok(cbits_key(&cbits))
            })
            .collect::<Result<Vec<String>, SimError>>()?;
        tally(keys)
    };

    Ok(RunResult {
        backend: Backend::Stabilizer,
        shots,
        seed,
        rng_id: rng::RNG_ID.to_string(),
        counts,
        final_state_available: split == circuit.ops.len(),
    })
}

fn evolve_ops(mut t: Tableau, ops: &[CircuitOp]) -> Result<Tableau, SimError> {
    for op in ops {
        t.apply_clifford(op, &[])?;
    }
    Ok(t)
}

/// Tableau after a measurement-free Clifford circuit.
pub fn evolve(circuit: &Circuit) -> Result<Tableau, SimError> {
    validate(circuit).map_err(SimError::InvalidCircuit)?;
    if let Some(i) = classify_gottesman_knill(circuit).first_offender {
        return Err(SimError::NonClifford { op_index: Some(i) });
    }
    let mut t = Tableau::new(circuit.n_qubits);
    for (i, op) in circuit.ops.iter().enumerate() {
        if op.is_measurement() {
            return Err(SimError::UnsupportedOp(format!("op {i} is a measurement")));
        }
        t.apply_clifford(op, &[])?;
    }
    Ok(t)
}
