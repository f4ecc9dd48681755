//! Reference machinery for validating the perturbation layer.
//!
//! Two realizations of the infinitesimal that share no code with
//! [`crate::sos`]:
//!
//! * [`expand_determinant_reference`] multiplies out the Leibniz formula with
//!   each perturbed entry as the polynomial `x + ε^(2^i)`. No shortcuts.
//! * [`substitute_delta`] replaces `ε` by a concrete small rational `δ` and
//!   evaluates exactly. Only the relative order of the indices inside one
//!   determinant affects the sign of its lowest-order term, so index `i` is
//!   substituted by `δ^(2^rank(i))` where `rank` is its position among the
//!   indices of that determinant. This keeps the numbers finite.
//!
//! [`separating_delta`] picks `δ` from a bound on every coefficient of the
//! ε-expansion: after scaling columns to integers each nonzero coefficient
//! has magnitude at least 1, and by Hadamard's inequality at most
//! `C = Π_rows (L + Σ |entries|)`. With `δ = 1/(2(1 + C))` the lowest-order
//! term dominates the sum of all later ones, so the concrete sign is the
//! symbolic sign. [`concrete_det_sign`] also checks a posteriori that no
//! nonzero unperturbed determinant changed sign, halving `δ` otherwise; with
//! the bound above that never triggers, and it could only trigger finitely
//! often since every sign condition holds for all small enough `δ`.
//!
//! Nothing here is on a hot path.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{Rational, Sign};
use crate::sos::{EpsPolynomial, IndexedPoint2, IndexedPoint3, PerturbIndex, PerturbedScalar};

/// A matrix entry: a perturbed coordinate or an unperturbed constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Perturbed(PerturbedScalar),
    Constant(Rational),
}

impl Entry {
    pub fn value(&self) -> &Rational {
        match self {
            Entry::Perturbed(s) => &s.value,
            Entry::Constant(v) => v,
        }
    }

    fn index(&self) -> Option<PerturbIndex> {
        match self {
            Entry::Perturbed(s) => Some(s.index),
            Entry::Constant(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("δ too large: a nonzero unperturbed determinant changed sign")]
    Inconclusive,
}

/// Rows `(p, 1)` for each point.
pub fn orientation_rows_2d(points: &[&IndexedPoint2]) -> Vec<Vec<Entry>> {
    points
        .iter()
        .map(|p| {
            let mut row: Vec<Entry> = p.coords.iter().cloned().map(Entry::Perturbed).collect();
            row.push(Entry::Constant(Rational::one()));
            row
        })
        .collect()
}

/// Rows `(p, 1)` for each point.
pub fn orientation_rows_3d(points: &[&IndexedPoint3]) -> Vec<Vec<Entry>> {
    points
        .iter()
        .map(|p| {
            let mut row: Vec<Entry> = p.coords.iter().cloned().map(Entry::Perturbed).collect();
            row.push(Entry::Constant(Rational::one()));
            row
        })
        .collect()
}

/// Brute-force Leibniz expansion of the perturbed determinant.
pub fn expand_determinant_reference(rows: &[Vec<Entry>]) -> EpsPolynomial {
    let n = rows.len();
    let polys: Vec<Vec<EpsPolynomial>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| match e {
                    Entry::Perturbed(s) => EpsPolynomial::from_perturbed(s),
                    Entry::Constant(v) => EpsPolynomial::constant(v.clone()),
                })
                .collect()
        })
        .collect();

    let mut total = EpsPolynomial::new();
    for (perm, odd) in permutations(n) {
        let mut term = EpsPolynomial::constant(Rational::one());
        for (r, &c) in perm.iter().enumerate() {
            term = &term * &polys[r][c];
        }
        if odd {
            term = -&term;
        }
        total = &total + &term;
    }
    total
}

/// All permutations of `0..n` with their parity (`true` = odd).
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), odd));
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            prefix.push(v);
            // Picking the k-th remaining element moves it past k others.
            go(prefix, rest, odd ^ (k % 2 == 1), out);
            prefix.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), false, &mut out);
    out
}

/// A concrete stand-in for `ε`: index `i` is replaced by `δ^(2^rank(i))`.
#[derive(Clone, Debug)]
pub struct DeltaAssignment {
    delta: Rational,
    ranks: BTreeMap<PerturbIndex, u32>,
}

impl DeltaAssignment {
    /// Ranks `indices` in increasing order. `delta` must lie in `(0, 1)`.
    pub fn new(delta: Rational, indices: impl IntoIterator<Item = PerturbIndex>) -> Self {
        assert!(delta.sign() == Sign::Positive && delta < Rational::one(), "δ must lie in (0, 1)");
        let mut idx: Vec<PerturbIndex> = indices.into_iter().collect();
        idx.sort();
        idx.dedup();
        let ranks = idx.into_iter().enumerate().map(|(r, i)| (i, r as u32)).collect();
        DeltaAssignment { delta, ranks }
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn rank(&self, index: PerturbIndex) -> Option<u32> {
        self.ranks.get(&index).copied()
    }

    fn exponent(&self, index: PerturbIndex) -> usize {
        1usize << self.rank(index).expect("index not covered by this assignment")
    }

    /// The exact value substituted for `ε^(2^index)`.
    pub fn substitution(&self, index: PerturbIndex) -> Rational {
        self.delta.pow(self.exponent(index) as u32)
    }

    /// `s.value + δ^(2^rank)`.
    pub fn perturbed(&self, s: &PerturbedScalar) -> Rational {
        &s.value + self.substitution(s.index)
    }

    fn max_exponent(&self) -> usize {
        self.ranks.values().max().map_or(0, |&r| 1usize << r)
    }
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn int_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = BigInt::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][c] * int_det(&minor);
        if c % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn indices_of(rows: &[Vec<Entry>]) -> Vec<PerturbIndex> {
    rows.iter().flatten().filter_map(Entry::index).collect()
}

/// Sign of the determinant with every perturbed entry `x + ε^(2^i)` replaced
/// by `x + δ^(2^rank(i))`, evaluated exactly.
///
/// Fails when the unperturbed determinant is nonzero and the substitution
/// changed its sign: `δ` was not small enough for this instance.
pub fn substitute_delta(rows: &[Vec<Entry>], d: &DeltaAssignment) -> Result<Sign, OracleError> {
    let n = rows.len();
    let p = d.delta.numer().clone();
    let q = d.delta.denom().clone();
    let big_e = d.max_exponent();
    let q_pow_e = num_traits::pow(q.clone(), big_e);

    // Scale column c by L_c·q^E (positive), which makes every entry an integer
    // without changing the sign.
    let col_lcm: Vec<BigInt> = (0..n)
        .map(|c| lcm_of_denominators(rows.iter().map(|row| row[c].value())))
        .collect();
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, e)| {
                    let v = e.value();
                    let scaled = &col_lcm[c] / v.denom() * v.numer();
                    let mut out = &scaled * &q_pow_e;
                    if let Entry::Perturbed(s) = e {
                        let k = d.exponent(s.index);
                        out += &col_lcm[c] * num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), big_e - k);
                    }
                    out
                })
                .collect()
        })
        .collect();
    let sign = Sign::of_bigint(&int_det(&m));

    let plain: Vec<Vec<Rational>> = rows.iter().map(|row| row.iter().map(|e| e.value().clone()).collect()).collect();
    let unperturbed = crate::exact::det(&plain).sign();
    if unperturbed != Sign::Zero && unperturbed != sign {
        return Err(OracleError::Inconclusive);
    }
    Ok(sign)
}

/// `δ = 1/(2(1 + C))` with `C` the Hadamard-style bound on the integer-scaled
/// ε-coefficients of this determinant.
pub fn separating_delta(rows: &[Vec<Entry>]) -> Rational {
    let n = rows.len();
    let col_lcm: Vec<BigInt> = (0..n)
        .map(|c| lcm_of_denominators(rows.iter().map(|row| row[c].value())))
        .collect();
    let l_max = col_lcm.iter().max().cloned().unwrap_or_else(BigInt::one);
    let mut bound = BigInt::one();
    for row in rows {
        let mut norm = l_max.clone();
        for (c, e) in row.iter().enumerate() {
            let v = e.value();
            norm += (&col_lcm[c] / v.denom() * v.numer()).abs();
        }
        bound *= norm;
    }
    Rational::new(BigInt::one(), BigInt::from(2) * (bound + BigInt::one())).expect("positive")
}

/// The sign of the perturbed determinant via concrete substitution with a
/// separating `δ`.
///
/// A valid `δ` keeps every nonzero unperturbed sign, so substitution only
/// runs when the unperturbed determinant vanishes.
pub fn concrete_det_sign(rows: &[Vec<Entry>]) -> Sign {
    let plain: Vec<Vec<Rational>> = rows.iter().map(|row| row.iter().map(|e| e.value().clone()).collect()).collect();
    let unperturbed = crate::exact::det(&plain).sign();
    if unperturbed != Sign::Zero {
        return unperturbed;
    }
    let mut delta = separating_delta(rows);
    let indices = indices_of(rows);
    let half = Rational::new(1, 2).expect("nonzero");
    loop {
        let d = DeltaAssignment::new(delta.clone(), indices.iter().copied());
        match substitute_delta(rows, &d) {
            Ok(s) => return s,
            Err(OracleError::Inconclusive) => delta = &delta * &half,
        }
    }
}

/// Concrete realization of `compare_perturbed`.
pub fn concrete_compare(a: &PerturbedScalar, b: &PerturbedScalar) -> Ordering {
    let rows = vec![
        vec![Entry::Perturbed(a.clone()), Entry::Constant(Rational::one())],
        vec![Entry::Perturbed(b.clone()), Entry::Constant(Rational::one())],
    ];
    match concrete_det_sign(&rows) {
        Sign::Negative => Ordering::Less,
        Sign::Zero => Ordering::Equal,
        Sign::Positive => Ordering::Greater,
    }
}

/// Concrete realization of `sos_orient2d`.
pub fn concrete_orient2d(a: &IndexedPoint2, b: &IndexedPoint2, c: &IndexedPoint2) -> Sign {
    concrete_det_sign(&orientation_rows_2d(&[a, b, c]))
}

/// Concrete realization of `sos_orient3d`.
pub fn concrete_orient3d(a: &IndexedPoint3, b: &IndexedPoint3, c: &IndexedPoint3, d: &IndexedPoint3) -> Sign {
    concrete_det_sign(&orientation_rows_3d(&[a, b, c, d]))
}
