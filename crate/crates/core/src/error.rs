use crate::circuit::Violation;

/// Errors raised by the simulation backends.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the backend limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit {0} selected more than once")]
    DuplicateQubit(usize),
    #[error("measurement branch has vanishing norm ({0:e})")]
    DegenerateNorm(f64),
    #[error("{} is outside the Gottesman-Knill set", match .op_index { Some(i) => format!("op {i}"), None => "operation".to_string() })]
    NonClifford { op_index: Option<usize> },
    #[error("invalid measurement axis: {0}")]
    InvalidAxis(String),
    #[error("operation not supported here: {0}")]
    UnsupportedOp(String),
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidCircuit(Vec<Violation>),
}
