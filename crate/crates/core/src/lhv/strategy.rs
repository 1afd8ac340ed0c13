use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::{pauli_alphabets, profile_settings, CorrelationTable};
use super::LhvError;
use crate::statevector::Axis;

/// Enumeration guard for [`enumerate_strategies`].
pub const MAX_STRATEGIES: u128 = 1_000_000;

/// Ordered one-bit messages between parties, executed in sequence.
///
/// The text form lists messages as `sender>receiver` with 1-based parties,
/// e.g. `"2>1,3>2"`. The empty string is the communication-free topology.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CommTopology {
    messages: Vec<(usize, usize)>,
}

impl CommTopology {
    pub fn none() -> Self {
        Self::default()
    }

    /// Messages as 0-based `(sender, receiver)` pairs.
    pub fn new(messages: Vec<(usize, usize)>) -> Result<Self, LhvError> {
        if let Some((s, _)) = messages.iter().find(|(s, r)| s == r) {
            return Err(LhvError::InvalidTopology(format!(
                "party {} messages itself",
                s + 1
            )));
        }
        Ok(Self { messages })
    }

    pub fn messages(&self) -> &[(usize, usize)] {
        &self.messages
    }

    /// Bits communicated per run.
    pub fn budget(&self) -> usize {
        self.messages.len()
    }

    pub fn check_parties(&self, parties: usize) -> Result<(), LhvError> {
        match self
            .messages
            .iter()
            .find(|(s, r)| *s >= parties || *r >= parties)
        {
            Some((s, r)) => Err(LhvError::InvalidTopology(format!(
                "message {}>{} for {parties} parties",
                s + 1,
                r + 1
            ))),
            None => Ok(()),
        }
    }

    /// Indices of the messages `party` has received before message `before`.
    fn received_before(&self, party: usize, before: usize) -> Vec<usize> {
        (0..before)
            .filter(|&k| self.messages[k].1 == party)
            .collect()
    }
}

impl FromStr for CommTopology {
    type Err = LhvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::none());
        }
        let messages = s
            .split(',')
            .map(|m| {
                let bad =
                    || LhvError::InvalidTopology(format!("expected sender>receiver, got {m:?}"));
                let (a, b) = m.split_once('>').ok_or_else(bad)?;
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a == 0 || b == 0 {
                    return Err(LhvError::InvalidTopology(
                        "parties are numbered from 1".into(),
                    ));
                }
                Ok((a - 1, b - 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(messages)
    }
}

impl TryFrom<String> for CommTopology {
    type Error = LhvError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CommTopology> for String {
    fn from(t: CommTopology) -> Self {
        t.to_string()
    }
}

impl fmt::Display for CommTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .messages
            .iter()
            .map(|(s, r)| format!("{}>{}", s + 1, r + 1))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Response tables of every party for one value of the shared randomness.
///
/// A table is indexed by `setting << k | received`, where `received` packs the
/// `k` bits the party has seen so far with the earliest message as the most
/// significant bit. A set bit means outcome −1 (for outputs) or a sent 1 (for
/// messages). `outputs[p]` reads all bits `p` receives; `messages[k]` belongs
/// to the sender of message `k` and reads only the bits it received earlier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    #[serde(with = "bitstrings")]
    pub outputs: Vec<Vec<bool>>,
    #[serde(with = "bitstrings")]
    pub messages: Vec<Vec<bool>>,
}

mod bitstrings {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(tables: &[Vec<bool>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(tables.iter().map(|t| {
            t.iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<bool>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| {
                t.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(D::Error::custom(format!("bad table character {c:?}"))),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Sizes of every table in the flattened enumeration order: for each party,
/// its output table followed by the messages it sends in topology order.
struct Layout {
    output_len: Vec<usize>,
    message_len: Vec<usize>,
    /// `(is_output, index)` per block in flattened order.
    order: Vec<(bool, usize)>,
}

impl Layout {
    fn new(sizes: &[usize], topology: &CommTopology) -> Self {
        let n_msgs = topology.budget();
        let output_len: Vec<usize> = sizes
            .iter()
            .enumerate()
            .map(|(p, &s)| s << topology.received_before(p, n_msgs).len())
            .collect();
        let message_len: Vec<usize> = topology
            .messages()
            .iter()
            .enumerate()
            .map(|(k, &(sender, _))| sizes[sender] << topology.received_before(sender, k).len())
            .collect();
        let mut order = Vec::new();
        for p in 0..sizes.len() {
            order.push((true, p));
            order.extend(
                topology
                    .messages()
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.0 == p)
                    .map(|(k, _)| (false, k)),
            );
        }
        Self {
            output_len,
            message_len,
            order,
        }
    }

    fn total_bits(&self) -> usize {
        self.output_len.iter().chain(&self.message_len).sum()
    }

    /// Strategy number `index`, whose binary expansion (most significant bit
    /// first) lists every table entry in flattened order.
    fn decode(&self, index: u64) -> DeterministicStrategy {
        let total = self.total_bits();
        let mut outputs: Vec<Vec<bool>> = self.output_len.iter().map(|&l| vec![false; l]).collect();
        let mut messages: Vec<Vec<bool>> =
            self.message_len.iter().map(|&l| vec![false; l]).collect();
        let mut pos = 0;
        for &(is_output, i) in &self.order {
            let table = if is_output {
                &mut outputs[i]
            } else {
                &mut messages[i]
            };
            for bit in table.iter_mut() {
                *bit = (index >> (total - 1 - pos)) & 1 == 1;
                pos += 1;
            }
        }
        DeterministicStrategy { outputs, messages }
    }
}

impl DeterministicStrategy {
    /// Plays one round. Returns the outcome-tuple index (party 0 most
    /// significant, bit 1 = −1) and the number of bits sent.
    pub fn respond(&self, topology: &CommTopology, settings: &[usize]) -> (usize, usize) {
        let mut received = vec![0usize; settings.len()];
        let mut count = vec![0usize; settings.len()];
        for (k, &(s, r)) in topology.messages().iter().enumerate() {
            let bit = self.messages[k][settings[s] << count[s] | received[s]];
            received[r] = received[r] << 1 | bit as usize;
            count[r] += 1;
        }
        let outcome = settings.iter().enumerate().fold(0usize, |acc, (p, &s)| {
            acc << 1 | self.outputs[p][s << count[p] | received[p]] as usize
        });
        (outcome, topology.budget())
    }

    fn check_shape(&self, sizes: &[usize], topology: &CommTopology) -> Result<(), LhvError> {
        let layout = Layout::new(sizes, topology);
        let lens = |t: &[Vec<bool>]| t.iter().map(Vec::len).collect::<Vec<_>>();
        if lens(&self.outputs) != layout.output_len || lens(&self.messages) != layout.message_len {
            return Err(LhvError::Shape(format!(
                "strategy tables {:?}/{:?} do not fit alphabets {sizes:?} and topology {topology:?}",
                lens(&self.outputs),
                lens(&self.messages)
            )));
        }
        Ok(())
    }

    /// Outcome-tuple index for every profile.
    pub(crate) fn outcomes(&self, sizes: &[usize], topology: &CommTopology) -> Vec<usize> {
        let n_profiles: usize = sizes.iter().product();
        (0..n_profiles)
            .map(|idx| self.respond(topology, &profile_settings(sizes, idx)).0)
            .collect()
    }
}

/// Number of deterministic strategies for the given alphabets and topology.
pub fn strategy_count(alphabet_sizes: &[usize], topology: &CommTopology) -> Result<u128, LhvError> {
    topology.check_parties(alphabet_sizes.len())?;
    let bits = Layout::new(alphabet_sizes, topology).total_bits();
    Ok(if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    })
}

/// Every deterministic strategy, in increasing order of the index whose
/// binary expansion lists all table entries (see [`DeterministicStrategy`]):
/// index 0 answers +1 everywhere and sends only zeros.
pub fn enumerate_strategies(
    alphabet_sizes: &[usize],
    topology: &CommTopology,
) -> Result<Vec<DeterministicStrategy>, LhvError> {
    if alphabet_sizes.contains(&0) {
        return Err(LhvError::Shape(
            "every party needs at least one setting".into(),
        ));
    }
    let count = strategy_count(alphabet_sizes, topology)?;
    if count > MAX_STRATEGIES {
        return Err(LhvError::TooManyStrategies {
            count,
            limit: MAX_STRATEGIES,
        });
    }
    let layout = Layout::new(alphabet_sizes, topology);
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| layout.decode(i))
        .collect())
}

/// The point-distribution table a single strategy produces.
pub fn strategy_table(
    strategy: &DeterministicStrategy,
    topology: &CommTopology,
    alphabets: &[Vec<Axis>],
) -> Result<CorrelationTable, LhvError> {
    let sizes: Vec<usize> = alphabets.iter().map(Vec::len).collect();
    topology.check_parties(sizes.len())?;
    strategy.check_shape(&sizes, topology)?;
    let n_out = 1 << sizes.len();
    let probabilities = strategy
        .outcomes(&sizes, topology)
        .into_iter()
        .map(|o| {
            let mut d = vec![0.0; n_out];
            d[o] = 1.0;
            d
        })
        .collect();
    CorrelationTable::new(alphabets.to_vec(), probabilities)
}

/// A weighted mixture of deterministic strategies sharing one topology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalModel {
    pub alphabets: Vec<Vec<Axis>>,
    pub topology: CommTopology,
    pub strategies: Vec<DeterministicStrategy>,
    pub weights: Vec<f64>,
}

impl LocalModel {
    pub fn new(
        alphabets: Vec<Vec<Axis>>,
        topology: CommTopology,
        strategies: Vec<DeterministicStrategy>,
        weights: Vec<f64>,
    ) -> Result<Self, LhvError> {
        let model = Self {
            alphabets,
            topology,
            strategies,
            weights,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), LhvError> {
        let sizes = self.alphabet_sizes();
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(LhvError::InvalidModel(format!("alphabet sizes {sizes:?}")));
        }
        self.topology.check_parties(sizes.len())?;
        if self.strategies.is_empty() || self.strategies.len() != self.weights.len() {
            return Err(LhvError::InvalidModel(format!(
                "{} strategies with {} weights",
                self.strategies.len(),
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(LhvError::InvalidModel(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(LhvError::InvalidModel(format!("weights sum to {total}")));
        }
        for s in &self.strategies {
            s.check_shape(&sizes, &self.topology)?;
        }
        Ok(())
    }

    pub fn alphabet_sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(Vec::len).collect()
    }

    pub fn bits_per_shot(&self) -> usize {
        self.topology.budget()
    }

    /// The exact statistics of the mixture.
    pub fn induced_table(&self) -> Result<CorrelationTable, LhvError> {
        self.validate()?;
        let sizes = self.alphabet_sizes();
        let n_profiles: usize = sizes.iter().product();
        let mut probabilities = vec![vec![0.0; 1 << sizes.len()]; n_profiles];
        for (s, w) in self.strategies.iter().zip(&self.weights) {
            for (dist, o) in probabilities
                .iter_mut()
                .zip(s.outcomes(&sizes, &self.topology))
            {
                dist[o] += w;
            }
        }
        CorrelationTable::new(self.alphabets.clone(), probabilities)
    }
}

/// Bell's communication-free model of the singlet under Pauli measurements:
/// a uniformly random `λ ∈ {±1}³`, party A answers `λ_setting` and party B
/// answers `−λ_setting`.
pub fn singlet_pauli_lhv() -> LocalModel {
    let strategies = (0..8u8)
        .map(|lambda| {
            let a: Vec<bool> = (0..3).map(|k| (lambda >> (2 - k)) & 1 == 1).collect();
            let b = a.iter().map(|v| !v).collect();
            DeterministicStrategy {
                outputs: vec![a, b],
                messages: vec![],
            }
        })
        .collect();
    LocalModel::new(
        pauli_alphabets(2),
        CommTopology::none(),
        strategies,
        vec![0.125; 8],
    )
    .expect("the singlet model is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{library, PauliAxis};
    use crate::lhv::{chsh_value, max_chsh, mermin_correlators, quantum_table};
    use crate::statevector::evolve;

    fn topo(s: &str) -> CommTopology {
        s.parse().unwrap()
    }

    #[test]
    fn topology_text_round_trip() {
        let t = topo("2>1, 3>2");
        assert_eq!(t.messages(), &[(1, 0), (2, 1)]);
        assert_eq!(t.to_string(), "2>1,3>2");
        assert_eq!(t.budget(), 2);
        assert_eq!(topo("").budget(), 0);
        assert!("1>1".parse::<CommTopology>().is_err());
        assert!("0>1".parse::<CommTopology>().is_err());
        assert!("2-1".parse::<CommTopology>().is_err());
        assert!(topo("4>1").check_parties(3).is_err());
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, "\"2>1,3>2\"");
        assert_eq!(serde_json::from_str::<CommTopology>(&json).unwrap(), t);
    }

    #[test]
    fn strategy_counts() {
        assert_eq!(
            enumerate_strategies(&[3, 3], &CommTopology::none())
                .unwrap()
                .len(),
            64
        );
        assert_eq!(
            enumerate_strategies(&[3, 3, 3], &CommTopology::none())
                .unwrap()
                .len(),
            512
        );
        assert_eq!(strategy_count(&[3, 3, 3], &topo("2>1")).unwrap(), 32768);
        // Receiver 2^(3·2), sender 4^3, silent party 2^3.
        assert_eq!(64 * 64 * 8, 32768);
        assert!(matches!(
            enumerate_strategies(&[3, 3, 3, 3], &topo("2>1,3>1")),
            Err(LhvError::TooManyStrategies { .. })
        ));
    }

    #[test]
    fn enumeration_is_lexicographic_and_duplicate_free() {
        let all = enumerate_strategies(&[2, 2, 1], &topo("2>1")).unwrap();
        // Outputs: 2<<1 + 2 + 1, message: 2 → 9 bits.
        assert_eq!(all.len(), 512);
        assert!(all[0].outputs.iter().flatten().all(|b| !b));
        assert!(all[0].messages.iter().flatten().all(|b| !b));
        // The last entry of the flattened order is party 2's output.
        assert_eq!(all[1].outputs[2], vec![true]);
        // The first is party 0's first output entry.
        assert!(all[256].outputs[0][0]);
        let mut seen = std::collections::HashSet::new();
        assert!(all.iter().all(|s| seen.insert(s.clone())));
    }

    #[test]
    fn all_plus_strategy_table() {
        let alphabets = pauli_alphabets(3);
        let s = &enumerate_strategies(&[3, 3, 3], &CommTopology::none()).unwrap()[0];
        let t = strategy_table(s, &CommTopology::none(), &alphabets).unwrap();
        assert!(t.probabilities.iter().all(|d| d[0] == 1.0));
        let two = strategy_table(
            &enumerate_strategies(&[3, 3], &CommTopology::none()).unwrap()[0],
            &CommTopology::none(),
            &pauli_alphabets(2),
        )
        .unwrap();
        let (x, y) = (Axis::Pauli(PauliAxis::X), Axis::Pauli(PauliAxis::Y));
        assert_eq!(chsh_value(&two, x, y, x, y).unwrap(), 2.0);
    }

    #[test]
    fn messages_reach_the_receiver() {
        // Party 2 (index 1) sends its setting's low bit; party 1 outputs it.
        let t = topo("2>1");
        let s = DeterministicStrategy {
            outputs: vec![vec![false, true, false, true], vec![false, false]],
            messages: vec![vec![false, true]],
        };
        assert_eq!(s.respond(&t, &[0, 0]), (0b00, 1));
        assert_eq!(s.respond(&t, &[0, 1]), (0b10, 1));
        assert_eq!(s.respond(&t, &[1, 1]), (0b10, 1));
        let bad = DeterministicStrategy {
            outputs: vec![vec![false; 2], vec![false; 2]],
            messages: vec![vec![false; 2]],
        };
        let xz = vec![Axis::Pauli(PauliAxis::X), Axis::Pauli(PauliAxis::Z)];
        assert!(strategy_table(&s, &t, &[xz.clone(), xz.clone()]).is_ok());
        assert!(strategy_table(&bad, &t, &[xz.clone(), xz]).is_err());
    }

    #[test]
    fn singlet_model_matches_quantum_table() {
        let model = singlet_pauli_lhv();
        assert_eq!(model.bits_per_shot(), 0);
        let induced = model.induced_table().unwrap();
        let quantum = quantum_table(
            &evolve(&library::gk_entangler()).unwrap(),
            &pauli_alphabets(2),
        )
        .unwrap();
        assert!(induced.max_tvd(&quantum) < 1e-12);
        let (x, z) = (Axis::Pauli(PauliAxis::X), Axis::Pauli(PauliAxis::Z));
        assert_eq!(induced.correlator(&[z, z]).unwrap(), -1.0);
        assert_eq!(induced.correlator(&[x, z]).unwrap(), 0.0);
        for idx in 0..induced.n_profiles() {
            for party in 0..2 {
                assert_eq!(induced.marginal(idx, party), [0.5, 0.5]);
            }
        }
        assert!((max_chsh(&induced).unwrap() - 2.0).abs() < 1e-12);

        let one = strategy_table(
            &model.strategies[5],
            &CommTopology::none(),
            &model.alphabets,
        )
        .unwrap();
        for a in 0..3 {
            let d = &one.probabilities[one.profile_index(&[a, a])];
            assert!(d[0b01] == 1.0 || d[0b10] == 1.0);
        }
    }

    #[test]
    fn mermin_product_is_one_for_every_local_strategy() {
        let alphabets = pauli_alphabets(3);
        for s in enumerate_strategies(&[3, 3, 3], &CommTopology::none()).unwrap() {
            let t = strategy_table(&s, &CommTopology::none(), &alphabets).unwrap();
            let m = mermin_correlators(&t).unwrap();
            assert_eq!(m.iter().product::<f64>(), 1.0);
        }
    }

    #[test]
    fn model_validation() {
        let mut m = singlet_pauli_lhv();
        m.weights[0] = 0.5;
        assert!(m.validate().is_err());
        let mut m = singlet_pauli_lhv();
        m.weights.pop();
        assert!(m.validate().is_err());
        let mut m = singlet_pauli_lhv();
        m.strategies[0].outputs[0].pop();
        assert!(m.validate().is_err());
        let json = serde_json::to_string(&singlet_pauli_lhv()).unwrap();
        let back: LocalModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, singlet_pauli_lhv());
    }
}
