//! Locality laboratory: quantum correlation tables, Bell-type evaluators and
//! the search for local (optionally communication-assisted) classical models.

mod search;
mod simplex;
mod simulate;
mod strategy;
mod table;

pub use search::{find_local_model, Arithmetic, Certificate, Feasible, FindOptions, LpOutcome};
pub use simulate::{simulate_model, Simulation};
pub use strategy::{
    enumerate_strategies, singlet_pauli_lhv, strategy_count, strategy_table, CommTopology,
    DeterministicStrategy, LocalModel, MAX_STRATEGIES,
};
pub use table::{
    chsh_sweep, chsh_sweep_point, chsh_value, max_chsh, mermin_correlators, pauli_alphabets,
    quantum_table, ChshSweep, CorrelationTable, SweepPoint,
};

use crate::SimError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LhvError {
    #[error("profile {0} is not in the table")]
    UnknownProfile(String),
    #[error("{count} strategies exceeds the enumeration limit of {limit}")]
    TooManyStrategies { count: u128, limit: u128 },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("linear program did not converge: {0}")]
    Solver(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}
