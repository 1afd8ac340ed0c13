use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::simplex::{dot, lift_multipliers, phase_one, rationalize};
use super::strategy::{enumerate_strategies, CommTopology, DeterministicStrategy, LocalModel};
use super::table::CorrelationTable;
use super::LhvError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arithmetic {
    /// Exact when every target probability is a rational with denominator at
    /// most 2^20 (all Pauli tables of the library states), float otherwise.
    #[default]
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FindOptions {
    pub arithmetic: Arithmetic,
    /// Merge strategies that induce identical tables before solving.
    pub dedup: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feasible {
    /// The support of the solution, in enumeration order.
    pub model: LocalModel,
    /// Enumeration index of each strategy in `model`.
    pub indices: Vec<usize>,
    /// Present when the weights were certified in rational arithmetic.
    pub exact_weights: Option<Vec<BigRational>>,
    /// Largest absolute difference between the model's table and the target.
    pub max_error: f64,
}

/// A Bell-type inequality `Σ coefficients[p][o]·P(o|p) ≤ bound` satisfied by
/// every enumerated strategy but violated by the target.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub coefficients: Vec<Vec<f64>>,
    pub bound: f64,
    pub target_value: f64,
    /// Largest left-hand side over all enumerated strategies.
    pub max_local_value: f64,
    /// Integer coefficients and bound when certified exactly.
    pub exact: Option<(Vec<Vec<BigInt>>, BigInt)>,
}

impl Certificate {
    pub fn violation(&self) -> f64 {
        self.target_value - self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Feasible(Feasible),
    Infeasible(Certificate),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }

    pub fn is_exact(&self) -> bool {
        match self {
            LpOutcome::Feasible(f) => f.exact_weights.is_some(),
            LpOutcome::Infeasible(c) => c.exact.is_some(),
        }
    }
}

const MAX_PIVOTS: usize = 200_000;
const MAX_DENOMINATOR: i64 = 1 << 20;
/// Target entries at or below this are treated as impossible outcomes.
const ZERO_PROBABILITY: f64 = 1e-12;

/// Columns of the LP: one row per (profile, outcome) followed by the
/// normalisation row; column `j` marks the outcome strategy `j` gives on each
/// profile.
struct Program {
    rows: usize,
    columns: Vec<Vec<u32>>,
    /// Enumeration index behind each column.
    origin: Vec<usize>,
    n_out: usize,
}

impl Program {
    fn build(
        strategies: &[DeterministicStrategy],
        sizes: &[usize],
        topology: &CommTopology,
        dedup: bool,
    ) -> Self {
        let n_profiles: usize = sizes.iter().product();
        let n_out = 1usize << sizes.len();
        let norm = (n_profiles * n_out) as u32;
        let all: Vec<Vec<u32>> = strategies
            .par_iter()
            .map(|s| {
                let mut col: Vec<u32> = s
                    .outcomes(sizes, topology)
                    .into_iter()
                    .enumerate()
                    .map(|(p, o)| (p * n_out + o) as u32)
                    .collect();
                col.push(norm);
                col
            })
            .collect();
        let (columns, origin) = if dedup {
            let mut seen = HashMap::new();
            let mut columns = Vec::new();
            let mut origin = Vec::new();
            for (j, col) in all.into_iter().enumerate() {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(col.clone()) {
                    e.insert(j);
                    columns.push(col);
                    origin.push(j);
                }
            }
            (columns, origin)
        } else {
            let origin = (0..all.len()).collect();
            (all, origin)
        };
        Self {
            rows: n_profiles * n_out + 1,
            columns,
            origin,
            n_out,
        }
    }

    fn rhs<F: Clone>(&self, target: &[Vec<F>], one: F) -> Vec<F> {
        let mut b: Vec<F> = target.iter().flatten().cloned().collect();
        b.push(one);
        b
    }

    /// Drops rows whose target is zero together with every column touching
    /// one of them, since such columns must carry zero weight. This removes
    /// most of the degeneracy of perfectly correlated targets.
    fn reduce(&self, zero_row: &[bool]) -> Reduced {
        let mut row_map = vec![u32::MAX; self.rows];
        let mut kept_rows = Vec::new();
        for r in (0..self.rows).filter(|&r| !zero_row[r]) {
            row_map[r] = kept_rows.len() as u32;
            kept_rows.push(r);
        }
        let (kept, columns): (Vec<usize>, Vec<Vec<u32>>) = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, col)| col.iter().all(|&r| !zero_row[r as usize]))
            .map(|(j, col)| (j, col.iter().map(|&r| row_map[r as usize]).collect()))
            .unzip();
        Reduced {
            kept_rows,
            kept_columns: kept,
            columns,
        }
    }
}

struct Reduced {
    kept_rows: Vec<usize>,
    /// Program column behind each reduced column.
    kept_columns: Vec<usize>,
    columns: Vec<Vec<u32>>,
}

/// A phase-one optimum expressed on the full program.
struct Solved<F> {
    feasible: bool,
    /// Value per program column.
    x: Vec<F>,
    /// Multipliers per program row.
    y: Vec<F>,
}

impl Reduced {
    fn solve<F: super::simplex::Scalar>(
        &self,
        program: &Program,
        b: &[F],
    ) -> Result<Solved<F>, LhvError> {
        let b_reduced: Vec<F> = self.kept_rows.iter().map(|&r| b[r].clone()).collect();
        let opt = phase_one(self.kept_rows.len(), &self.columns, &b_reduced, MAX_PIVOTS)
            .map_err(LhvError::Solver)?;
        let mut x = vec![F::zero(); program.columns.len()];
        for (j, v) in opt.solution(self.columns.len()).into_iter().enumerate() {
            x[self.kept_columns[j]] = v;
        }
        let mut kept = vec![false; program.columns.len()];
        self.kept_columns.iter().for_each(|&j| kept[j] = true);
        let dropped = program
            .columns
            .iter()
            .zip(&kept)
            .filter(|(_, k)| !**k)
            .map(|(c, _)| c.as_slice());
        let y = lift_multipliers(&opt.multipliers, &self.kept_rows, program.rows, dropped);
        Ok(Solved {
            feasible: opt.objective.is_zero(),
            x,
            y,
        })
    }
}

/// Searches for weights `w ≥ 0`, `Σ w = 1` with `Σ w_s · table(s) = target`
/// over every deterministic strategy of `topology`.
pub fn find_local_model(
    target: &CorrelationTable,
    topology: &CommTopology,
    options: FindOptions,
) -> Result<LpOutcome, LhvError> {
    let sizes = target.alphabet_sizes();
    topology.check_parties(sizes.len())?;
    let strategies = enumerate_strategies(&sizes, topology)?;
    let program = Program::build(&strategies, &sizes, topology, options.dedup);

    let exact_target = match options.arithmetic {
        Arithmetic::Float => None,
        Arithmetic::Auto => rational_target(target),
        Arithmetic::Exact => Some(rational_target(target).ok_or_else(|| {
            LhvError::Shape("exact search needs rational target probabilities".into())
        })?),
    };

    let clamped: Vec<Vec<f64>> = target
        .probabilities
        .iter()
        .map(|d| d.iter().map(|p| p.max(0.0)).collect())
        .collect();
    let b_float = program.rhs(&clamped, 1.0);
    let zero_rows: Vec<bool> = b_float.iter().map(|&v| v <= ZERO_PROBABILITY).collect();
    let reduced = program.reduce(&zero_rows);
    let float = reduced.solve::<f64>(&program, &b_float);

    let Some(exact_target) = exact_target else {
        return Ok(float_outcome(
            &float?,
            &program,
            &strategies,
            target,
            topology,
        ));
    };

    let b = program.rhs(&exact_target, BigRational::one());
    if let Ok(float) = &float {
        if let Some(outcome) = confirm(float, &program, &strategies, target, topology, &b) {
            return Ok(outcome);
        }
    }
    // The float basis could not be certified; solve again in rational arithmetic.
    let exact = reduced.solve::<BigRational>(&program, &b)?;
    if exact.feasible {
        let weights: Vec<(usize, BigRational)> = exact
            .x
            .into_iter()
            .enumerate()
            .filter(|(_, w)| w.is_positive())
            .collect();
        Ok(LpOutcome::Feasible(feasible(
            weights,
            &program,
            &strategies,
            target,
            topology,
        )))
    } else {
        Ok(LpOutcome::Infeasible(exact_certificate(
            exact.y, &program, target,
        )))
    }
}

fn rational_target(target: &CorrelationTable) -> Option<Vec<Vec<BigRational>>> {
    let t = target
        .probabilities
        .iter()
        .map(|d| {
            d.iter()
                .map(|&p| rationalize(p, MAX_DENOMINATOR, 1e-12))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    let sums_to_one = t.iter().all(|d| {
        d.iter().fold(BigRational::zero(), |a, p| a + p).is_one()
            && d.iter().all(|p| !p.is_negative())
    });
    sums_to_one.then_some(t)
}

/// Turns a float optimum into an exact answer when the rationalised weights
/// or multipliers pass exact verification.
fn confirm(
    float: &Solved<f64>,
    program: &Program,
    strategies: &[DeterministicStrategy],
    target: &CorrelationTable,
    topology: &CommTopology,
    b: &[BigRational],
) -> Option<LpOutcome> {
    if float.feasible {
        let weights: Vec<(usize, BigRational)> = float
            .x
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, w)| *w > 1e-12)
            .map(|(j, w)| Some((j, rationalize(w, MAX_DENOMINATOR, 1e-9)?)))
            .collect::<Option<_>>()?;
        let mut lhs = vec![BigRational::zero(); program.rows];
        for (j, w) in &weights {
            if w.is_negative() {
                return None;
            }
            for &r in &program.columns[*j] {
                lhs[r as usize] += w;
            }
        }
        if lhs != b {
            return None;
        }
        let weights = weights
            .into_iter()
            .filter(|(_, w)| w.is_positive())
            .collect();
        Some(LpOutcome::Feasible(feasible(
            weights, program, strategies, target, topology,
        )))
    } else {
        let y = float
            .y
            .iter()
            .map(|&v| rationalize(v, MAX_DENOMINATOR, 1e-9))
            .collect::<Option<Vec<_>>>()?;
        let (ints, _) = integer_scaled(&y);
        let b_dot: BigRational = y
            .iter()
            .zip(b)
            .map(|(a, c)| a * c)
            .fold(BigRational::zero(), |a, v| a + v);
        let separates = b_dot.is_positive()
            && program.columns.par_iter().all(|col| {
                !col.iter()
                    .fold(BigInt::zero(), |a, &r| a + &ints[r as usize])
                    .is_positive()
            });
        separates.then(|| LpOutcome::Infeasible(exact_certificate(y, program, target)))
    }
}

fn feasible(
    weights: Vec<(usize, BigRational)>,
    program: &Program,
    strategies: &[DeterministicStrategy],
    target: &CorrelationTable,
    topology: &CommTopology,
) -> Feasible {
    let mut support: Vec<(usize, BigRational)> = weights
        .into_iter()
        .map(|(j, w)| (program.origin[j], w))
        .collect();
    support.sort_by_key(|(i, _)| *i);
    let model = LocalModel {
        alphabets: target.alphabets.clone(),
        topology: topology.clone(),
        strategies: support
            .iter()
            .map(|(i, _)| strategies[*i].clone())
            .collect(),
        weights: support
            .iter()
            .map(|(_, w)| w.to_f64().unwrap_or(f64::NAN))
            .collect(),
    };
    let max_error = reconstruction_error(&model, target);
    Feasible {
        model,
        indices: support.iter().map(|(i, _)| *i).collect(),
        exact_weights: Some(support.into_iter().map(|(_, w)| w).collect()),
        max_error,
    }
}

fn reconstruction_error(model: &LocalModel, target: &CorrelationTable) -> f64 {
    match model.induced_table() {
        Ok(t) => t
            .probabilities
            .iter()
            .flatten()
            .zip(target.probabilities.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

/// Scales rationals by a common positive factor to coprime integers.
fn integer_scaled(y: &[BigRational]) -> (Vec<BigInt>, BigRational) {
    let lcm = y.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = y.iter().map(|v| (v * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let gcd = if gcd.is_zero() { BigInt::one() } else { gcd };
    let scale = BigRational::new(lcm, gcd.clone());
    (ints.into_iter().map(|v| v / &gcd).collect(), scale)
}

fn exact_certificate(
    y: Vec<BigRational>,
    program: &Program,
    target: &CorrelationTable,
) -> Certificate {
    let (ints, _) = integer_scaled(&y);
    let norm = program.rows - 1;
    let coefficients: Vec<Vec<BigInt>> = ints[..norm]
        .chunks(program.n_out)
        .map(<[BigInt]>::to_vec)
        .collect();
    let bound = -ints[norm].clone();
    let max_local = program
        .columns
        .par_iter()
        .map(|col| {
            col[..col.len() - 1]
                .iter()
                .fold(BigInt::zero(), |a, &r| a + &ints[r as usize])
        })
        .max()
        .unwrap_or_default();
    let as_f64 = |v: &BigInt| v.to_f64().unwrap_or(f64::NAN);
    let float_coefficients: Vec<Vec<f64>> = coefficients
        .iter()
        .map(|row| row.iter().map(as_f64).collect())
        .collect();
    Certificate {
        target_value: evaluate(&float_coefficients, target),
        bound: as_f64(&bound),
        max_local_value: as_f64(&max_local),
        coefficients: float_coefficients,
        exact: Some((coefficients, bound)),
    }
}

fn evaluate(coefficients: &[Vec<f64>], table: &CorrelationTable) -> f64 {
    coefficients
        .iter()
        .flatten()
        .zip(table.probabilities.iter().flatten())
        .map(|(c, p)| c * p)
        .sum()
}

fn float_outcome(
    float: &Solved<f64>,
    program: &Program,
    strategies: &[DeterministicStrategy],
    target: &CorrelationTable,
    topology: &CommTopology,
) -> LpOutcome {
    if float.feasible {
        let mut support: Vec<(usize, f64)> = float
            .x
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, w)| *w > 1e-12)
            .map(|(j, w)| (program.origin[j], w))
            .collect();
        support.sort_by_key(|(i, _)| *i);
        let total: f64 = support.iter().map(|(_, w)| w).sum();
        let model = LocalModel {
            alphabets: target.alphabets.clone(),
            topology: topology.clone(),
            strategies: support
                .iter()
                .map(|(i, _)| strategies[*i].clone())
                .collect(),
            weights: support.iter().map(|(_, w)| w / total).collect(),
        };
        let max_error = reconstruction_error(&model, target);
        return LpOutcome::Feasible(Feasible {
            model,
            indices: support.iter().map(|(i, _)| *i).collect(),
            exact_weights: None,
            max_error,
        });
    }
    let y = &float.y;
    let scale = y
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let norm = program.rows - 1;
    let coefficients: Vec<Vec<f64>> = y[..norm]
        .chunks(program.n_out)
        .map(|c| c.iter().map(|v| v / scale).collect())
        .collect();
    let max_local_value = program
        .columns
        .par_iter()
        .map(|col| dot(y, &col[..col.len() - 1]) / scale)
        .reduce(|| f64::NEG_INFINITY, f64::max);
    LpOutcome::Infeasible(Certificate {
        target_value: evaluate(&coefficients, target),
        bound: -y[norm] / scale,
        max_local_value,
        coefficients,
        exact: None,
    })
}
