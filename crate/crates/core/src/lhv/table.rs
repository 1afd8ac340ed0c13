use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LhvError;
use crate::circuit::PauliAxis;
use crate::rng;
use crate::statevector::{joint_probabilities, Axis, MeasurementSpec, PureState};

/// Joint outcome statistics for every combination of per-party settings.
///
/// Profiles are indexed in mixed radix over the alphabets with party 0 most
/// significant. Outcome tuples are indexed big-endian with party 0 as the
/// most significant bit, and a set bit meaning outcome −1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub alphabets: Vec<Vec<Axis>>,
    pub probabilities: Vec<Vec<f64>>,
}

pub fn pauli_alphabets(parties: usize) -> Vec<Vec<Axis>> {
    vec![PauliAxis::ALL.iter().map(|&p| Axis::Pauli(p)).collect(); parties]
}

impl CorrelationTable {
    pub fn new(alphabets: Vec<Vec<Axis>>, probabilities: Vec<Vec<f64>>) -> Result<Self, LhvError> {
        let t = Self {
            alphabets,
            probabilities,
        };
        if t.parties() < 2 {
            return Err(LhvError::Shape(
                "a correlation table needs at least two parties".into(),
            ));
        }
        if t.alphabets.iter().any(Vec::is_empty) {
            return Err(LhvError::Shape(
                "every party needs at least one setting".into(),
            ));
        }
        if t.probabilities.len() != t.n_profiles() {
            return Err(LhvError::Shape(format!(
                "{} distributions for {} profiles",
                t.probabilities.len(),
                t.n_profiles()
            )));
        }
        for (i, d) in t.probabilities.iter().enumerate() {
            if d.len() != t.n_outcomes() {
                return Err(LhvError::Shape(format!(
                    "profile {i} has {} outcomes",
                    d.len()
                )));
            }
            let total: f64 = d.iter().sum();
            if (total - 1.0).abs() > 1e-10 || d.iter().any(|p| *p < -1e-12) {
                return Err(LhvError::Shape(format!(
                    "profile {i} is not a distribution (sum {total})"
                )));
            }
        }
        Ok(t)
    }

    pub fn parties(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabet_sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(Vec::len).collect()
    }

    pub fn n_profiles(&self) -> usize {
        self.alphabets.iter().map(Vec::len).product()
    }

    pub fn n_outcomes(&self) -> usize {
        1 << self.parties()
    }

    /// Setting indices of profile `idx`.
    pub fn profile_settings(&self, idx: usize) -> Vec<usize> {
        profile_settings(&self.alphabet_sizes(), idx)
    }

    pub fn profile_index(&self, settings: &[usize]) -> usize {
        profile_index(&self.alphabet_sizes(), settings)
    }

    /// Locates a profile given as one axis per party.
    pub fn find_profile(&self, profile: &[Axis]) -> Result<usize, LhvError> {
        if profile.len() != self.parties() {
            return Err(LhvError::UnknownProfile(format!("{profile:?}")));
        }
        let settings = profile
            .iter()
            .zip(&self.alphabets)
            .map(|(axis, alphabet)| alphabet.iter().position(|a| a == axis))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| LhvError::UnknownProfile(format!("{profile:?}")))?;
        Ok(self.profile_index(&settings))
    }

    pub fn distribution(&self, profile: &[Axis]) -> Result<&[f64], LhvError> {
        Ok(&self.probabilities[self.find_profile(profile)?])
    }

    /// Expectation of the product of all parties' ±1 outcomes.
    pub fn correlator(&self, profile: &[Axis]) -> Result<f64, LhvError> {
        Ok(correlator_of(self.distribution(profile)?))
    }

    /// Outcome distribution of one party, `[P(+1), P(−1)]`, for a profile.
    pub fn marginal(&self, profile_idx: usize, party: usize) -> [f64; 2] {
        let shift = self.parties() - 1 - party;
        let mut m = [0.0; 2];
        for (o, p) in self.probabilities[profile_idx].iter().enumerate() {
            m[(o >> shift) & 1] += p;
        }
        m
    }

    /// Largest change of any party's marginal when only the other parties'
    /// settings vary. Zero for non-signalling tables.
    pub fn max_signalling(&self) -> f64 {
        let sizes = self.alphabet_sizes();
        let mut worst = 0.0f64;
        for party in 0..self.parties() {
            for s in 0..sizes[party] {
                let mut reference: Option<[f64; 2]> = None;
                for idx in 0..self.n_profiles() {
                    if profile_settings(&sizes, idx)[party] != s {
                        continue;
                    }
                    let m = self.marginal(idx, party);
                    match reference {
                        None => reference = Some(m),
                        Some(r) => worst = worst.max((r[0] - m[0]).abs()),
                    }
                }
            }
        }
        worst
    }

    /// Largest per-profile total variation distance to another table with the same shape.
    pub fn max_tvd(&self, other: &CorrelationTable) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| 0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn profile_settings(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &size) in out.iter_mut().zip(sizes).rev() {
        *slot = idx % size;
        idx /= size;
    }
    out
}

pub(crate) fn profile_index(sizes: &[usize], settings: &[usize]) -> usize {
    settings
        .iter()
        .zip(sizes)
        .fold(0, |acc, (&s, &size)| acc * size + s)
}

pub(crate) fn correlator_of(dist: &[f64]) -> f64 {
    dist.iter()
        .enumerate()
        .map(|(o, p)| if o.count_ones() % 2 == 0 { *p } else { -*p })
        .sum()
}

/// Exact quantum statistics of measuring each qubit of `state` in every
/// combination of the given per-qubit settings.
pub fn quantum_table(
    state: &PureState,
    alphabets: &[Vec<Axis>],
) -> Result<CorrelationTable, LhvError> {
    if alphabets.len() != state.n_qubits() {
        return Err(LhvError::Shape(format!(
            "{} alphabets for a {}-qubit state",
            alphabets.len(),
            state.n_qubits()
        )));
    }
    let sizes: Vec<usize> = alphabets.iter().map(Vec::len).collect();
    if sizes.contains(&0) {
        return Err(LhvError::Shape(
            "every party needs at least one setting".into(),
        ));
    }
    let n_profiles: usize = sizes.iter().product();
    let probabilities = (0..n_profiles)
        .map(|idx| {
            let specs: Vec<MeasurementSpec> = profile_settings(&sizes, idx)
                .into_iter()
                .enumerate()
                .map(|(q, s)| MeasurementSpec::new(q, alphabets[q][s]))
                .collect();
            joint_probabilities(state, &specs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    CorrelationTable::new(alphabets.to_vec(), probabilities)
}

/// `S = E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)`.
pub fn chsh_value(
    table: &CorrelationTable,
    a: Axis,
    a2: Axis,
    b: Axis,
    b2: Axis,
) -> Result<f64, LhvError> {
    if table.parties() != 2 {
        return Err(LhvError::Shape("CHSH needs exactly two parties".into()));
    }
    Ok(
        table.correlator(&[a, b])? + table.correlator(&[a, b2])? + table.correlator(&[a2, b])?
            - table.correlator(&[a2, b2])?,
    )
}

/// Largest `|S|` over every choice of `a, a′` from party 0's alphabet and
/// `b, b′` from party 1's.
pub fn max_chsh(table: &CorrelationTable) -> Result<f64, LhvError> {
    let mut best = 0.0f64;
    for &a in &table.alphabets[0] {
        for &a2 in &table.alphabets[0] {
            for &b in &table.alphabets[1] {
                for &b2 in &table.alphabets[1] {
                    best = best.max(chsh_value(table, a, a2, b, b2)?.abs());
                }
            }
        }
    }
    Ok(best)
}

/// `(⟨XXX⟩, ⟨XYY⟩, ⟨YXY⟩, ⟨YYX⟩)`.
pub fn mermin_correlators(table: &CorrelationTable) -> Result<[f64; 4], LhvError> {
    if table.parties() != 3 {
        return Err(LhvError::Shape(
            "Mermin correlators need exactly three parties".into(),
        ));
    }
    let (x, y) = (Axis::Pauli(PauliAxis::X), Axis::Pauli(PauliAxis::Y));
    Ok([
        table.correlator(&[x, x, x])?,
        table.correlator(&[x, y, y])?,
        table.correlator(&[y, x, y])?,
        table.correlator(&[y, y, x])?,
    ])
}

/// Singlet CHSH value with party 0 at azimuths `(0, π/2)` and party 1 at
/// `(t, −t)` in the X–Y plane. `|S(t)| = 2√2 |sin(t + π/4)|`.
pub fn chsh_sweep_point(state: &PureState, t: f64) -> Result<f64, LhvError> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let a = Axis::bloch(half_pi, 0.0)?;
    let a2 = Axis::bloch(half_pi, half_pi)?;
    let b = Axis::bloch(half_pi, t)?;
    let b2 = Axis::bloch(half_pi, -t)?;
    let table = quantum_table(state, &[vec![a, a2], dedup(vec![b, b2])])?;
    chsh_value(&table, a, a2, b, b2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t: f64,
    pub s: f64,
    /// `S` estimated from `shots` samples per correlator.
    pub s_sampled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshSweep {
    pub steps: usize,
    pub shots: u64,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
    pub max_abs_s: f64,
}

/// [`chsh_sweep_point`] on the singlet at `t = kπ/steps`, `k = 0..=steps`.
/// Correlator `j` of point `k` is sampled from RNG stream `4k + j`.
pub fn chsh_sweep(
    state: &PureState,
    steps: usize,
    shots: u64,
    seed: u64,
) -> Result<ChshSweep, LhvError> {
    if steps == 0 {
        return Err(LhvError::Shape("a sweep needs at least one step".into()));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let points = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / steps as f64;
            let a = [Axis::bloch(half_pi, 0.0)?, Axis::bloch(half_pi, half_pi)?];
            let b = [Axis::bloch(half_pi, t)?, Axis::bloch(half_pi, -t)?];
            let pairs = [
                (a[0], b[0], 1.0),
                (a[0], b[1], 1.0),
                (a[1], b[0], 1.0),
                (a[1], b[1], -1.0),
            ];
            let mut s_sampled = 0.0;
            for (j, (x, y, sign)) in pairs.into_iter().enumerate() {
                let dist = joint_probabilities(
                    state,
                    &[MeasurementSpec::new(0, x), MeasurementSpec::new(1, y)],
                )?;
                let mut rng = rng::stream(seed, (4 * k + j) as u64);
                let mut sum = 0i64;
                for _ in 0..shots {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let o = dist.iter().position(|p| {
                        acc += p;
                        u < acc
                    });
                    sum += if o.unwrap_or(dist.len() - 1).count_ones() % 2 == 0 {
                        1
                    } else {
                        -1
                    };
                }
                if shots > 0 {
                    s_sampled += sign * sum as f64 / shots as f64;
                }
            }
            Ok(SweepPoint {
                t,
                s: chsh_sweep_point(state, t)?,
                s_sampled,
            })
        })
        .collect::<Result<Vec<_>, LhvError>>()?;
    let max_abs_s = points.iter().map(|p| p.s.abs()).fold(0.0, f64::max);
    Ok(ChshSweep {
        steps,
        shots,
        seed,
        points,
        max_abs_s,
    })
}

fn dedup(mut v: Vec<Axis>) -> Vec<Axis> {
    v.dedup();
    v
}
