use std::fmt;

use super::{Circuit, CircuitOp, GateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Qubit,
    Cbit,
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Register::Qubit => f.write_str("qubit"),
            Register::Cbit => f.write_str("classical bit"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ViolationKind {
    #[error("expected {expected} operand(s), got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("{register} index {index} out of range (register size {size})")]
    IndexOutOfRange {
        register: Register,
        index: usize,
        size: usize,
    },
    #[error("qubit {qubit} used more than once in one operation")]
    DuplicateQubit { qubit: usize },
    #[error("condition bit c{cbit} is not written by any earlier measurement")]
    UndefinedConditionBit { cbit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub op_index: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op {}: {}", self.op_index, self.kind)
    }
}

/// Checks one op against the register sizes and the set of classical bits
/// already written. Shared by [`validate`] and the parser.
pub(crate) fn check_op(
    op: &CircuitOp,
    n_qubits: usize,
    n_cbits: usize,
    written: &[bool],
) -> Vec<ViolationKind> {
    let mut out = Vec::new();
    let qubit = |q: usize, out: &mut Vec<ViolationKind>| {
        if q >= n_qubits {
            out.push(ViolationKind::IndexOutOfRange {
                register: Register::Qubit,
                index: q,
                size: n_qubits,
            });
        }
    };
    let cbit = |c: usize, out: &mut Vec<ViolationKind>| -> bool {
        if c >= n_cbits {
            out.push(ViolationKind::IndexOutOfRange {
                register: Register::Cbit,
                index: c,
                size: n_cbits,
            });
            false
        } else {
            true
        }
    };
    match op {
        CircuitOp::Gate {
            kind,
            targets,
            condition,
        } => {
            if targets.len() != kind.arity() {
                out.push(ViolationKind::ArityMismatch {
                    expected: kind.arity(),
                    got: targets.len(),
                });
            }
            for &t in targets {
                qubit(t, &mut out);
            }
            if *kind == GateKind::Cnot && targets.len() == 2 && targets[0] == targets[1] {
                out.push(ViolationKind::DuplicateQubit { qubit: targets[0] });
            }
            if let Some(c) = *condition {
                if cbit(c, &mut out) && !written[c] {
                    out.push(ViolationKind::UndefinedConditionBit { cbit: c });
                }
            }
        }
        CircuitOp::Oracle {
            function,
            inputs,
            output,
        } => {
            if inputs.len() != function.arity() {
                out.push(ViolationKind::ArityMismatch {
                    expected: function.arity(),
                    got: inputs.len(),
                });
            }
            for &q in inputs {
                qubit(q, &mut out);
            }
            qubit(*output, &mut out);
            let mut seen = inputs.clone();
            seen.push(*output);
            seen.sort_unstable();
            if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
                out.push(ViolationKind::DuplicateQubit { qubit: w[0] });
            }
        }
        CircuitOp::Measure { qubit: q, dest, .. } => {
            qubit(*q, &mut out);
            cbit(*dest, &mut out);
        }
    }
    out
}

/// Returns every invariant violation in `circuit`, tagged with its op index.
pub fn validate(circuit: &Circuit) -> Result<(), Vec<Violation>> {
    let mut written = vec![false; circuit.n_cbits];
    let mut violations = Vec::new();
    for (i, op) in circuit.ops.iter().enumerate() {
        for kind in check_op(op, circuit.n_qubits, circuit.n_cbits, &written) {
            violations.push(Violation { op_index: i, kind });
        }
        if let CircuitOp::Measure { dest, .. } = op {
            if *dest < written.len() {
                written[*dest] = true;
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GkClass {
    pub is_gk: bool,
    pub first_offender: Option<usize>,
}

/// Decides membership in the Gottesman-Knill set: Clifford gates (optionally
/// classically conditioned) and Pauli-basis measurements. Oracles and S gates
/// are offenders.
pub fn classify_gottesman_knill(circuit: &Circuit) -> GkClass {
    let first_offender = circuit.ops.iter().position(|op| match op {
        CircuitOp::Gate { kind, .. } => !kind.is_clifford(),
        CircuitOp::Oracle { .. } => true,
        CircuitOp::Measure { .. } => false,
    });
    GkClass {
        is_gk: first_offender.is_none(),
        first_offender,
    }
}
