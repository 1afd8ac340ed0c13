//! Named circuits used throughout the tests and the CLI.

use super::{BooleanFunction, Circuit, CircuitOp, GateKind, PauliAxis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LibraryParams {
    None,
    Function(BooleanFunction),
    Qubits(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LibraryError {
    #[error("unknown library circuit `{0}` (expected deutsch, gk_entangler, ghz or oracle_step)")]
    UnknownName(String),
    #[error("bad parameters for `{name}`: {reason}")]
    BadParams { name: String, reason: String },
}

pub const LIBRARY_NAMES: [&str; 4] = ["deutsch", "gk_entangler", "ghz", "oracle_step"];

pub fn build_library_circuit(name: &str, params: &LibraryParams) -> Result<Circuit, LibraryError> {
    let bad = |reason: &str| LibraryError::BadParams {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    match name {
        "deutsch" => match params {
            LibraryParams::Function(f) if f.arity() == 1 => Ok(deutsch(f.clone())),
            LibraryParams::Function(f) => Err(bad(&format!(
                "needs a 1-bit function, got arity {}",
                f.arity()
            ))),
            _ => Err(bad("needs a 1-bit function")),
        },
        "gk_entangler" => match params {
            LibraryParams::None => Ok(gk_entangler()),
            _ => Err(bad("takes no parameters")),
        },
        "ghz" => match params {
            LibraryParams::Qubits(n) if *n >= 2 => Ok(ghz(*n)),
            _ => Err(bad("needs a qubit count n >= 2")),
        },
        "oracle_step" => match params {
            LibraryParams::Function(f) => Ok(oracle_step(f.clone())),
            _ => Err(bad("needs a boolean function")),
        },
        other => Err(LibraryError::UnknownName(other.to_string())),
    }
}

/// Deutsch's algorithm with q0 as oracle input and q1 as oracle output.
///
/// Under XOR oracle semantics the measured bit is 1 for constant `f` and 0 for
/// balanced `f`.
pub fn deutsch(f: BooleanFunction) -> Circuit {
    let mut c = Circuit::new(2, 1);
    c.push(CircuitOp::gate(GateKind::X, &[0]))
        .push(CircuitOp::gate(GateKind::X, &[1]))
        .push(CircuitOp::gate(GateKind::H, &[0]))
        .push(CircuitOp::gate(GateKind::H, &[1]))
        .push(CircuitOp::oracle(f, &[0], 1))
        .push(CircuitOp::gate(GateKind::H, &[0]))
        .push(CircuitOp::measure(0, PauliAxis::Z, 0));
    c
}

/// `X⊗X`, then `H` on q0, then CNOT: prepares `(|01⟩ − |10⟩)/√2` from `|00⟩`.
pub fn gk_entangler() -> Circuit {
    let mut c = Circuit::new(2, 0);
    c.push(CircuitOp::gate(GateKind::X, &[0]))
        .push(CircuitOp::gate(GateKind::X, &[1]))
        .push(CircuitOp::gate(GateKind::H, &[0]))
        .push(CircuitOp::gate(GateKind::Cnot, &[0, 1]));
    c
}

pub fn ghz(n: usize) -> Circuit {
    let mut c = Circuit::new(n, 0);
    c.push(CircuitOp::gate(GateKind::H, &[0]));
    for q in 1..n {
        c.push(CircuitOp::gate(GateKind::Cnot, &[q - 1, q]));
    }
    c
}

/// One query of `f` on a uniform superposition of its inputs, output into q_n.
pub fn oracle_step(f: BooleanFunction) -> Circuit {
    let n = f.arity();
    let mut c = Circuit::new(n + 1, 0);
    for q in 0..n {
        c.push(CircuitOp::gate(GateKind::H, &[q]));
    }
    let inputs: Vec<usize> = (0..n).collect();
    c.push(CircuitOp::oracle(f, &inputs, n));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;

    #[test]
    fn deutsch_op_sequence() {
        let f = BooleanFunction::from_bits("01").unwrap();
        let c = build_library_circuit("deutsch", &LibraryParams::Function(f)).unwrap();
        let text: Vec<String> = c.ops.iter().map(|o| o.to_string()).collect();
        assert_eq!(
            text,
            [
                "x q0",
                "x q1",
                "h q0",
                "h q1",
                "oracle 01 q0 -> q1",
                "h q0",
                "measure q0 Z -> c0"
            ]
        );
    }

    #[test]
    fn gk_entangler_and_ghz_sequences() {
        let c = build_library_circuit("gk_entangler", &LibraryParams::None).unwrap();
        assert_eq!(c.n_qubits, 2);
        assert_eq!(c.to_string(), "qubits 2\nx q0\nx q1\nh q0\ncnot q0 q1\n");
        let g = build_library_circuit("ghz", &LibraryParams::Qubits(3)).unwrap();
        assert_eq!(g.to_string(), "qubits 3\nh q0\ncnot q0 q1\ncnot q1 q2\n");
    }

    #[test]
    fn oracle_step_layout() {
        let f = BooleanFunction::from_bits("0001").unwrap();
        let c = build_library_circuit("oracle_step", &LibraryParams::Function(f)).unwrap();
        assert_eq!(
            c.to_string(),
            "qubits 3\nh q0\nh q1\noracle 0001 q0 q1 -> q2\n"
        );
    }

    #[test]
    fn builders_validate() {
        let f1 = BooleanFunction::from_bits("10").unwrap();
        let f3 = BooleanFunction::from_bits("01101001").unwrap();
        for (name, p) in [
            ("deutsch", LibraryParams::Function(f1)),
            ("gk_entangler", LibraryParams::None),
            ("ghz", LibraryParams::Qubits(2)),
            ("ghz", LibraryParams::Qubits(7)),
            ("oracle_step", LibraryParams::Function(f3)),
        ] {
            let c = build_library_circuit(name, &p).unwrap();
            assert!(validate(&c).is_ok(), "{name}");
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            build_library_circuit("grover", &LibraryParams::None),
            Err(LibraryError::UnknownName("grover".into()))
        );
        let f2 = BooleanFunction::from_bits("0110").unwrap();
        assert!(matches!(
            build_library_circuit("deutsch", &LibraryParams::Function(f2)),
            Err(LibraryError::BadParams { .. })
        ));
        assert!(build_library_circuit("ghz", &LibraryParams::Qubits(1)).is_err());
        assert!(build_library_circuit("gk_entangler", &LibraryParams::Qubits(2)).is_err());
    }
}
