//! Circuit intermediate representation shared by every backend.
//!
//! A [`Circuit`] is an ordered list of [`CircuitOp`]s over `n_qubits` qubits and
//! `n_cbits` classical bits. Qubit 0 is the leftmost tensor factor, so a basis
//! index reads big-endian as `q0 q1 ... q(n-1)`.

mod gate;
pub mod library;
mod parse;
mod validate;

use std::fmt;

pub(crate) use gate::adjoint2 as gate_adjoint;
pub use gate::{GateKind, Matrix2};
pub use library::{build_library_circuit, LibraryError, LibraryParams, LIBRARY_NAMES};
pub use parse::{parse_circuit, ParseError};
pub use validate::{classify_gottesman_knill, validate, GkClass, Violation, ViolationKind};

use serde::{Deserialize, Serialize};

/// Measurement axis restricted to the three Pauli bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A boolean function `{0,1}^arity -> {0,1}` stored as its truth table.
///
/// Entry `x` of the table is `f(x)` where `x` is read big-endian over the
/// function's inputs (first input is the most significant bit).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    arity: usize,
    table: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BooleanFunctionError {
    #[error("boolean function arity must be at least 1")]
    ZeroArity,
    #[error("truth table has {got} entries, arity {arity} needs {expected}")]
    TableLength {
        arity: usize,
        expected: usize,
        got: usize,
    },
}

impl BooleanFunction {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self, BooleanFunctionError> {
        if arity == 0 {
            return Err(BooleanFunctionError::ZeroArity);
        }
        let expected = 1usize << arity;
        if table.len() != expected {
            return Err(BooleanFunctionError::TableLength {
                arity,
                expected,
                got: table.len(),
            });
        }
        Ok(Self { arity, table })
    }

    /// Builds a function from its truth table alone; the length must be a power of two ≥ 2.
    pub fn from_table(table: Vec<bool>) -> Result<Self, BooleanFunctionError> {
        let len = table.len();
        if len < 2 || !len.is_power_of_two() {
            // Report against the nearest arity that could have been meant.
            let arity = (usize::BITS - len.max(1).leading_zeros()) as usize;
            let arity = arity.max(1);
            return Err(BooleanFunctionError::TableLength {
                arity,
                expected: 1 << arity,
                got: len,
            });
        }
        Self::new(len.trailing_zeros() as usize, table)
    }

    /// Parses a bit string such as `"0110"`.
    pub fn from_bits(bits: &str) -> Option<Self> {
        let table = bits
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Self::from_table(table).ok()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn to_bits(&self) -> String {
        self.table
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// One step of a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitOp {
    Gate {
        kind: GateKind,
        targets: Vec<usize>,
        /// Apply only when this classical bit is 1.
        condition: Option<usize>,
    },
    Oracle {
        function: BooleanFunction,
        inputs: Vec<usize>,
        output: usize,
    },
    Measure {
        qubit: usize,
        axis: PauliAxis,
        dest: usize,
    },
}

impl CircuitOp {
    pub fn gate(kind: GateKind, targets: &[usize]) -> Self {
        CircuitOp::Gate {
            kind,
            targets: targets.to_vec(),
            condition: None,
        }
    }

    pub fn conditioned(kind: GateKind, targets: &[usize], cbit: usize) -> Self {
        CircuitOp::Gate {
            kind,
            targets: targets.to_vec(),
            condition: Some(cbit),
        }
    }

    pub fn measure(qubit: usize, axis: PauliAxis, dest: usize) -> Self {
        CircuitOp::Measure { qubit, axis, dest }
    }

    pub fn oracle(function: BooleanFunction, inputs: &[usize], output: usize) -> Self {
        CircuitOp::Oracle {
            function,
            inputs: inputs.to_vec(),
            output,
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, CircuitOp::Measure { .. })
    }
}

impl fmt::Display for CircuitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitOp::Gate {
                kind,
                targets,
                condition,
            } => {
                if let Some(c) = condition {
                    write!(f, "cif c{c} ")?;
                }
                write!(f, "{}", kind.mnemonic())?;
                for t in targets {
                    write!(f, " q{t}")?;
                }
                Ok(())
            }
            CircuitOp::Oracle {
                function,
                inputs,
                output,
            } => {
                write!(f, "oracle {}", function.to_bits())?;
                for q in inputs {
                    write!(f, " q{q}")?;
                }
                write!(f, " -> q{output}")
            }
            CircuitOp::Measure { qubit, axis, dest } => {
                write!(f, "measure q{qubit} {axis} -> c{dest}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_cbits: usize,
    pub ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_cbits: usize) -> Self {
        Self {
            n_qubits,
            n_cbits,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: CircuitOp) -> &mut Self {
        self.ops.push(op);
        self
    }

    /// Appends a measurement of every qubit in `axis`, growing the classical
    /// register so qubit `q` lands in a fresh bit.
    pub fn measure_all(&mut self, axis: PauliAxis) -> &mut Self {
        let base = self.n_cbits;
        self.n_cbits += self.n_qubits;
        for q in 0..self.n_qubits {
            self.ops.push(CircuitOp::measure(q, axis, base + q));
        }
        self
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Index of the first measurement; everything before it is a fixed unitary.
    pub fn unitary_prefix_len(&self) -> usize {
        self.ops
            .iter()
            .position(CircuitOp::is_measurement)
            .unwrap_or(self.ops.len())
    }
}

/// Pretty-prints the circuit in the `.qc` text format accepted by [`parse_circuit`].
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        if self.n_cbits > 0 {
            writeln!(f, "cbits {}", self.n_cbits)?;
        }
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Renders classical bits as a string with bit 0 leftmost.
pub fn cbits_key(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_function_rejects_bad_tables() {
        assert_eq!(
            BooleanFunction::new(0, vec![]),
            Err(BooleanFunctionError::ZeroArity)
        );
        assert!(matches!(
            BooleanFunction::new(2, vec![false; 3]),
            Err(BooleanFunctionError::TableLength {
                expected: 4,
                got: 3,
                ..
            })
        ));
        assert!(BooleanFunction::from_bits("011").is_none());
        assert!(BooleanFunction::from_bits("0a").is_none());
        let f = BooleanFunction::from_bits("0110").unwrap();
        assert_eq!(f.arity(), 2);
        assert!(f.eval(1) && f.eval(2) && !f.eval(3));
        assert_eq!(f.to_bits(), "0110");
    }

    #[test]
    fn display_matches_text_format() {
        let mut c = Circuit::new(3, 1);
        c.push(CircuitOp::gate(GateKind::H, &[0]))
            .push(CircuitOp::measure(0, PauliAxis::Y, 0))
            .push(CircuitOp::conditioned(GateKind::Cnot, &[1, 2], 0))
            .push(CircuitOp::oracle(
                BooleanFunction::from_bits("01").unwrap(),
                &[1],
                2,
            ));
        assert_eq!(
            c.to_string(),
            "qubits 3\ncbits 1\nh q0\nmeasure q0 Y -> c0\ncif c0 cnot q1 q2\noracle 01 q1 -> q2\n"
        );
    }

    #[test]
    fn unitary_prefix_stops_at_first_measurement() {
        let mut c = Circuit::new(2, 0);
        c.push(CircuitOp::gate(GateKind::H, &[0]));
        c.measure_all(PauliAxis::Z);
        assert_eq!(c.unitary_prefix_len(), 1);
        assert_eq!(c.n_cbits, 2);
        assert_eq!(Circuit::new(1, 0).unitary_prefix_len(), 0);
    }
}
