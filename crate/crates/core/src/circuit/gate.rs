use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Row-major 2×2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

/// The fixed gate alphabet.
///
/// `R` is the quarter-turn phase gate `|1⟩ → i|1⟩` and `S` is the eighth-turn
/// gate `|1⟩ → e^{iπ/4}|1⟩` (usually named S and T respectively).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    R,
    H,
    S,
    Cnot,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::R,
        GateKind::H,
        GateKind::S,
        GateKind::Cnot,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// Membership in the Clifford group {I, X, Y, Z, R, H, CNOT}.
    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::S)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::R => "r",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Cnot => "cnot",
        }
    }

    /// Case-insensitive lookup of a gate mnemonic.
    pub fn from_mnemonic(s: &str) -> Option<Self> {
        let lower = s.to_ascii_lowercase();
        GateKind::ALL.into_iter().find(|g| g.mnemonic() == lower)
    }

    /// The 2×2 matrix of a single-qubit gate, `None` for CNOT.
    pub fn matrix2(self) -> Option<Matrix2> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let m = match self {
            GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -I], [I, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::R => [[ONE, ZERO], [ZERO, I]],
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [
                [ONE, ZERO],
                [
                    ZERO,
                    Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
                ],
            ],
            GateKind::Cnot => return None,
        };
        Some(m)
    }

    /// Full unitary as a dense row-major matrix of dimension `2^arity`.
    pub fn unitary(self) -> Vec<Vec<Complex64>> {
        match self.matrix2() {
            Some(m) => m.iter().map(|row| row.to_vec()).collect(),
            None => {
                // Basis order |q0 q1⟩ with q0 the control.
                let mut u = vec![vec![ZERO; 4]; 4];
                u[0][0] = ONE;
                u[1][1] = ONE;
                u[2][3] = ONE;
                u[3][2] = ONE;
                u
            }
        }
    }
}

pub(crate) fn adjoint2(m: &Matrix2) -> Matrix2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}
