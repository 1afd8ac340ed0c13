//! Quantum circuit simulation and locality experiments.
//!
//! - [`circuit`]: the circuit IR, `.qc` text format, validator, Gottesman-Knill
//!   classifier and a small library of named circuits.
//! - [`statevector`]: exact dense simulation with Born-rule measurement.
//! - [`stabilizer`]: polynomial-time tableau simulation of Clifford circuits.
//! - [`lhv`]: correlation tables, CHSH/Mermin evaluators and the search for
//!   (communication-assisted) local hidden-variable models.
//! - [`bench`]: random Clifford workloads and scaling measurements.
//! - [`report`]: byte-stable JSON/CSV output.

pub mod bench;
pub mod circuit;
pub mod lhv;
pub mod report;
pub mod rng;
pub mod stabilizer;
pub mod statevector;

mod error;
mod result;

pub use error::SimError;
pub use result::{Backend, RunResult};
