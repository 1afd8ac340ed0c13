//! Phase-one revised simplex for `A λ = b, λ ≥ 0` where every column of `A`
//! has 0/1 entries, given as its sorted list of nonzero rows.
//!
//! One artificial variable per row starts in the basis; minimising their sum
//! either drives it to zero (feasible) or stops at a positive optimum whose
//! simplex multipliers `y` satisfy `y·a_j ≤ 0` for every column and `y·b > 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Scalars the simplex can run over. Float instances compare with a tolerance.
pub(crate) trait Scalar: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_positive(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
    fn to_f64(&self) -> f64;
    fn from_f64(v: f64) -> Self;
    /// Skips work on structurally zero entries.
    fn is_exact_zero(&self) -> bool;
    /// Float arithmetic drifts and needs periodic refactorisation.
    const INEXACT: bool;
}

const FLOAT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_positive(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn lt(&self, o: &Self) -> bool {
        *self < o - FLOAT_TOL
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    const INEXACT: bool = true;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    const INEXACT: bool = false;
}

pub(crate) struct PhaseOne<F> {
    /// Basic variable per row; indices `≥ n_columns` are artificials.
    pub basis: Vec<usize>,
    pub values: Vec<F>,
    /// Simplex multipliers for the artificial cost vector.
    pub multipliers: Vec<F>,
    pub objective: F,
}

impl<F: Scalar> PhaseOne<F> {
    /// Value of every structural column, zero unless basic.
    pub fn solution(&self, n_columns: usize) -> Vec<F> {
        let mut x = vec![F::zero(); n_columns];
        for (&j, v) in self.basis.iter().zip(&self.values) {
            if j < n_columns {
                x[j] = v.clone();
            }
        }
        x
    }
}

/// After this many consecutive degenerate pivots, pricing switches from
/// Dantzig's rule to Bland's rule, which cannot cycle.
const DEGENERATE_STREAK: usize = 50;
const REFACTOR_EVERY: usize = 64;

pub(crate) fn dot<F: Scalar>(y: &[F], column: &[u32]) -> F {
    column
        .iter()
        .fold(F::zero(), |acc, &r| acc.add(&y[r as usize]))
}

pub(crate) fn phase_one<F: Scalar>(
    rows: usize,
    columns: &[Vec<u32>],
    b: &[F],
    max_pivots: usize,
) -> Result<PhaseOne<F>, String> {
    assert_eq!(b.len(), rows);
    let n = columns.len();
    let mut basis: Vec<usize> = (n..n + rows).collect();
    let mut in_basis = vec![false; n];
    let mut binv: Vec<Vec<F>> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|k| if i == k { F::one() } else { F::zero() })
                .collect()
        })
        .collect();
    let mut x: Vec<F> = b.to_vec();
    let mut streak = 0;
    let mut pivots = 0;

    loop {
        let y = multipliers(&basis, &binv, n);
        let bland = streak >= DEGENERATE_STREAK;
        let mut entering: Option<(usize, F)> = None;
        for (j, col) in columns.iter().enumerate() {
            if in_basis[j] {
                continue;
            }
            let score = dot(&y, col);
            if !score.is_positive() {
                continue;
            }
            if bland {
                entering = Some((j, score));
                break;
            }
            if entering.as_ref().is_none_or(|(_, best)| best.lt(&score)) {
                entering = Some((j, score));
            }
        }
        let Some((j, _)) = entering else {
            let objective = basis
                .iter()
                .zip(&x)
                .filter(|(&k, _)| k >= n)
                .fold(F::zero(), |acc, (_, v)| acc.add(v));
            return Ok(PhaseOne {
                basis,
                values: x,
                multipliers: y,
                objective,
            });
        };
        if pivots >= max_pivots {
            return Err(format!("no optimum after {pivots} pivots"));
        }

        let u: Vec<F> = binv.iter().map(|row| dot(row, &columns[j])).collect();
        // Ratio test. Ties go to artificials first, then to the smallest basic
        // index; under Bland's rule only the index counts.
        let mut leave: Option<(usize, F)> = None;
        for i in 0..rows {
            if !u[i].is_positive() {
                continue;
            }
            let ratio = x[i].div(&u[i]);
            let better = match &leave {
                None => true,
                Some((l, best)) => {
                    ratio.lt(best)
                        || (!best.lt(&ratio) && {
                            let (a, c) = (basis[i] >= n, basis[*l] >= n);
                            if bland {
                                basis[i] < basis[*l]
                            } else {
                                (a && !c) || (a == c && basis[i] < basis[*l])
                            }
                        })
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((l, ratio)) = leave else {
            return Err("phase one reported an unbounded direction".into());
        };
        streak = if ratio.is_zero() { streak + 1 } else { 0 };

        let pivot = u[l].clone();
        for v in binv[l].iter_mut() {
            *v = v.div(&pivot);
        }
        x[l] = x[l].div(&pivot);
        let (pivot_row, pivot_x) = (binv[l].clone(), x[l].clone());
        for i in 0..rows {
            if i == l || u[i].is_exact_zero() {
                continue;
            }
            for (v, p) in binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_exact_zero() {
                    *v = v.sub(&u[i].mul(p));
                }
            }
            x[i] = x[i].sub(&u[i].mul(&pivot_x));
        }
        if basis[l] < n {
            in_basis[basis[l]] = false;
        }
        basis[l] = j;
        in_basis[j] = true;
        pivots += 1;

        if F::INEXACT && pivots % REFACTOR_EVERY == 0 {
            refactor(&basis, columns, b, &mut binv, &mut x)?;
        }
    }
}

fn multipliers<F: Scalar>(basis: &[usize], binv: &[Vec<F>], n: usize) -> Vec<F> {
    let rows = binv.len();
    let mut y = vec![F::zero(); rows];
    for (i, &k) in basis.iter().enumerate() {
        if k >= n {
            for (yk, v) in y.iter_mut().zip(&binv[i]) {
                *yk = yk.add(v);
            }
        }
    }
    y
}

/// Recomputes `B⁻¹` and `x_B` from scratch by Gauss-Jordan elimination with
/// partial pivoting, discarding accumulated rounding error.
fn refactor<F: Scalar>(
    basis: &[usize],
    columns: &[Vec<u32>],
    b: &[F],
    binv: &mut [Vec<F>],
    x: &mut [F],
) -> Result<(), String> {
    let rows = basis.len();
    let n = columns.len();
    // Augmented [B | I].
    let mut m: Vec<Vec<f64>> = vec![vec![0.0; 2 * rows]; rows];
    for (c, &k) in basis.iter().enumerate() {
        if k >= n {
            m[k - n][c] = 1.0;
        } else {
            for &r in &columns[k] {
                m[r as usize][c] = 1.0;
            }
        }
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[rows + i] = 1.0;
    }
    for c in 0..rows {
        let p = (c..rows)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .filter(|&p| m[p][c].abs() > 1e-12)
            .ok_or("basis matrix became singular")?;
        m.swap(c, p);
        let inv = 1.0 / m[c][c];
        m[c].iter_mut().for_each(|v| *v *= inv);
        let pivot_row = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            let f = row[c];
            if i != c && f != 0.0 {
                row.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, p)| *v -= f * p);
            }
        }
    }
    // Rows of B⁻¹ are indexed like the basis positions.
    for (i, row) in binv.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = F::from_f64(m[i][rows + k]);
        }
    }
    for (i, xi) in x.iter_mut().enumerate() {
        let v: f64 = (0..rows).map(|k| m[i][rows + k] * b[k].to_f64()).sum();
        *xi = F::from_f64(if v < 0.0 && v > -FLOAT_TOL { 0.0 } else { v });
    }
    Ok(())
}

/// Extends multipliers of a problem restricted to `kept` rows to all `rows`.
///
/// Every dropped row gets the same value `−M`, with `M` the largest
/// multiplier sum any dropped column collects on kept rows (at least 0). A
/// dropped column touches a dropped row by construction, so it still has
/// `y·a ≤ 0`.
pub(crate) fn lift_multipliers<'a, F: Scalar>(
    reduced: &[F],
    kept: &[usize],
    rows: usize,
    dropped_columns: impl Iterator<Item = &'a [u32]>,
) -> Vec<F> {
    let mut is_kept = vec![false; rows];
    let mut y = vec![F::zero(); rows];
    for (&r, v) in kept.iter().zip(reduced) {
        y[r] = v.clone();
        is_kept[r] = true;
    }
    let mut m = F::zero();
    for col in dropped_columns {
        let s = col
            .iter()
            .filter(|&&r| is_kept[r as usize])
            .fold(F::zero(), |acc, &r| acc.add(&y[r as usize]));
        if m.lt(&s) {
            m = s;
        }
    }
    let minus_m = F::zero().sub(&m);
    for (r, v) in y.iter_mut().enumerate() {
        if !is_kept[r] {
            *v = minus_m.clone();
        }
    }
    y
}

/// Best rational approximation with denominator at most `max_den` by
/// continued fractions, accepted only within `tol` of `v`.
pub(crate) fn rationalize(v: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !v.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = v;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if (h1 as f64 / k1 as f64 - v).abs() <= tol * 1e-3 || frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 || (h1 as f64 / k1 as f64 - v).abs() > tol {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}
