use rand::Rng;
use rayon::prelude::*;

use super::strategy::LocalModel;
use super::table::{profile_settings, CorrelationTable};
use super::LhvError;
use crate::rng;

/// Empirical statistics of running a local model shot by shot.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub empirical: CorrelationTable,
    /// Shots that landed on each profile.
    pub profile_shots: Vec<u64>,
    pub bits_used_per_shot: usize,
}

/// Each shot draws a strategy by weight (the shared randomness) and a
/// uniformly random profile, then plays the strategy's messages in topology
/// order. Shot `k` uses RNG stream `k` of `seed`. Profiles that receive no
/// shot are reported as uniform distributions.
pub fn simulate_model(model: &LocalModel, shots: u64, seed: u64) -> Result<Simulation, LhvError> {
    model.validate()?;
    let sizes = model.alphabet_sizes();
    let n_profiles: usize = sizes.iter().product();
    let n_out = 1usize << sizes.len();
    let cumulative: Vec<f64> = model
        .weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("validated models are nonempty");

    let (counts, bits) = (0..shots)
        .into_par_iter()
        .fold(
            || (vec![0u64; n_profiles * n_out], Vec::<usize>::new()),
            |(mut counts, mut bits), shot| {
                let mut rng = rng::stream(seed, shot);
                let u = rng.gen::<f64>() * total;
                let s = cumulative
                    .partition_point(|&c| c <= u)
                    .min(cumulative.len() - 1);
                let profile = rng.gen_range(0..n_profiles);
                let (outcome, sent) = model.strategies[s]
                    .respond(&model.topology, &profile_settings(&sizes, profile));
                counts[profile * n_out + outcome] += 1;
                if !bits.contains(&sent) {
                    bits.push(sent);
                }
                (counts, bits)
            },
        )
        .reduce(
            || (vec![0u64; n_profiles * n_out], Vec::new()),
            |(mut a, mut ab), (b, bb)| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                ab.extend(
                    bb.into_iter()
                        .filter(|v| !ab.contains(v))
                        .collect::<Vec<_>>(),
                );
                (a, ab)
            },
        );
    let bits_used_per_shot = match bits.as_slice() {
        [] => model.bits_per_shot(),
        [b] => *b,
        _ => {
            return Err(LhvError::InvalidModel(format!(
                "shots used differing bit counts {bits:?}"
            )))
        }
    };

    let profile_shots: Vec<u64> = counts.chunks(n_out).map(|c| c.iter().sum()).collect();
    let probabilities = counts
        .chunks(n_out)
        .zip(&profile_shots)
        .map(|(c, &n)| {
            if n == 0 {
                vec![1.0 / n_out as f64; n_out]
            } else {
                c.iter().map(|&k| k as f64 / n as f64).collect()
            }
        })
        .collect();
    Ok(Simulation {
        empirical: CorrelationTable::new(model.alphabets.clone(), probabilities)?,
        profile_shots,
        bits_used_per_shot,
    })
}
