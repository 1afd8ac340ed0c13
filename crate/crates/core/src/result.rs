use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    #[serde(rename = "sv")]
    StateVector,
    #[serde(rename = "stab")]
    Stabilizer,
}

impl Backend {
    pub fn id(self) -> &'static str {
        match self {
            Backend::StateVector => "sv",
            Backend::Stabilizer => "stab",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Outcome counts of a multi-shot run, keyed by the final classical register
/// rendered with bit 0 leftmost.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
    pub rng_id: String,
    pub counts: BTreeMap<String, u64>,
    /// True when the circuit contains no measurement, so a single final state exists.
    #[serde(skip)]
    pub final_state_available: bool,
}

impl RunResult {
    pub fn frequency(&self, key: &str) -> f64 {
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Total variation distance between the empirical distributions of two runs.
    pub fn tvd(&self, other: &RunResult) -> f64 {
        let mut keys: Vec<&String> = self.counts.keys().chain(other.counts.keys()).collect();
        keys.sort();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|k| (self.frequency(k) - other.frequency(k)).abs())
            .sum::<f64>()
    }
}

/// Tallies per-shot keys into sorted counts.
pub(crate) fn tally<I: IntoIterator<Item = String>>(keys: I) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    counts
}
