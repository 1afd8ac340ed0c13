//! Line-oriented `.qc` circuit format.
//!
//! ```text
//! qubits 2          # required first
//! cbits 1           # optional second
//! h q0
//! cnot q0 q1
//! oracle 01 q0 -> q1
//! measure q0 Z -> c0
//! cif c0 x q1
//! ```

use super::validate::check_op;
use super::{BooleanFunction, Circuit, CircuitOp, GateKind, PauliAxis, ViolationKind};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(ViolationKind),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn index(token: &str, prefix: char) -> Result<usize, ParseErrorKind> {
    let mut chars = token.chars();
    match chars.next() {
        Some(c) if c.eq_ignore_ascii_case(&prefix) => {}
        _ => {
            return Err(ParseErrorKind::Malformed(format!(
                "expected `{prefix}<index>`, found `{token}`"
            )))
        }
    }
    chars
        .as_str()
        .parse()
        .map_err(|_| ParseErrorKind::Malformed(format!("bad index in `{token}`")))
}

fn header_count(tokens: &[&str], keyword: &str) -> Result<Option<usize>, ParseErrorKind> {
    if !tokens[0].eq_ignore_ascii_case(keyword) {
        return Ok(None);
    }
    match tokens {
        [_, n] => n.parse().map(Some).map_err(|_| {
            ParseErrorKind::MalformedHeader(format!("`{keyword}` needs a count, found `{n}`"))
        }),
        _ => Err(ParseErrorKind::MalformedHeader(format!(
            "expected `{keyword} <count>`"
        ))),
    }
}

fn parse_op(tokens: &[&str]) -> Result<CircuitOp, ParseErrorKind> {
    let head = tokens[0].to_ascii_lowercase();
    match head.as_str() {
        "cif" => {
            if tokens.len() < 3 {
                return Err(ParseErrorKind::Malformed(
                    "expected `cif c<k> <gate> ...`".into(),
                ));
            }
            let cbit = index(tokens[1], 'c')?;
            match parse_op(&tokens[2..])? {
                CircuitOp::Gate {
                    kind,
                    targets,
                    condition: None,
                } => Ok(CircuitOp::Gate {
                    kind,
                    targets,
                    condition: Some(cbit),
                }),
                _ => Err(ParseErrorKind::Malformed(
                    "only gates can be conditioned".into(),
                )),
            }
        }
        "oracle" => {
            let arrow = tokens
                .iter()
                .position(|t| *t == "->")
                .ok_or_else(|| ParseErrorKind::Malformed("oracle needs `-> q<out>`".into()))?;
            if tokens.len() != arrow + 2 || arrow < 2 {
                return Err(ParseErrorKind::Malformed(
                    "expected `oracle <table> q<i>.. -> q<out>`".into(),
                ));
            }
            let function = BooleanFunction::from_bits(tokens[1]).ok_or_else(|| {
                ParseErrorKind::Malformed(format!(
                    "truth table `{}` must be a bit string of length 2^n",
                    tokens[1]
                ))
            })?;
            let inputs = tokens[2..arrow]
                .iter()
                .map(|t| index(t, 'q'))
                .collect::<Result<Vec<_>, _>>()?;
            let output = index(tokens[arrow + 1], 'q')?;
            Ok(CircuitOp::Oracle {
                function,
                inputs,
                output,
            })
        }
        "measure" => match tokens {
            [_, q, axis, "->", c] => {
                let axis = match axis.to_ascii_uppercase().as_str() {
                    "X" => PauliAxis::X,
                    "Y" => PauliAxis::Y,
                    "Z" => PauliAxis::Z,
                    other => {
                        return Err(ParseErrorKind::Malformed(format!(
                            "measurement axis must be X, Y or Z, found `{other}`"
                        )))
                    }
                };
                Ok(CircuitOp::Measure {
                    qubit: index(q, 'q')?,
                    axis,
                    dest: index(c, 'c')?,
                })
            }
            _ => Err(ParseErrorKind::Malformed(
                "expected `measure q<i> X|Y|Z -> c<k>`".into(),
            )),
        },
        "qubits" | "cbits" => Err(ParseErrorKind::MalformedHeader(format!(
            "`{head}` may only appear at the top of the file"
        ))),
        _ => {
            let kind = GateKind::from_mnemonic(&head)
                .ok_or_else(|| ParseErrorKind::UnknownGate(tokens[0].to_string()))?;
            let targets = tokens[1..]
                .iter()
                .map(|t| index(t, 'q'))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CircuitOp::Gate {
                kind,
                targets,
                condition: None,
            })
        }
    }
}

/// Parses `.qc` text. The result always satisfies [`validate`](super::validate).
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut seen_op = false;
    let mut written = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |kind| ParseError { line, kind };
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }

        let Some(c) = circuit.as_mut() else {
            match header_count(&tokens, "qubits").map_err(err)? {
                Some(0) => {
                    return Err(err(ParseErrorKind::MalformedHeader(
                        "a circuit needs at least one qubit".into(),
                    )))
                }
                Some(n) => {
                    circuit = Some(Circuit::new(n, 0));
                    continue;
                }
                None => {
                    return Err(err(ParseErrorKind::MalformedHeader(
                        "first line must be `qubits <n>`".into(),
                    )))
                }
            }
        };

        if !seen_op {
            if let Some(m) = header_count(&tokens, "cbits").map_err(err)? {
                c.n_cbits = m;
                written = vec![false; m];
                seen_op = true;
                continue;
            }
        }
        seen_op = true;

        let op = parse_op(&tokens).map_err(err)?;
        if let Some(v) = check_op(&op, c.n_qubits, c.n_cbits, &written)
            .into_iter()
            .next()
        {
            return Err(err(ParseErrorKind::Invalid(v)));
        }
        if let CircuitOp::Measure { dest, .. } = op {
            written[dest] = true;
        }
        c.ops.push(op);
    }

    circuit.ok_or(ParseError {
        line: text.lines().count().max(1),
        kind: ParseErrorKind::MalformedHeader("missing `qubits <n>` header".into()),
    })
}
