//! The symbolic perturbation engine.
//!
//! Every input coordinate gets a globally unique [`PerturbIndex`] `i` and is
//! replaced by `x_i + ε^(2^i)` for a positive infinitesimal `ε`. Point `k` of a
//! 2D input carries indices `(2k, 2k + 1)`; in 3D, `(3k, 3k + 1, 3k + 2)`.
//! Because the exponents `2^i` are distinct powers of two, any product of
//! perturbations of distinct coordinates has a unique exponent, and every
//! determinant becomes a polynomial in `ε` whose lowest-order nonzero term
//! decides the sign. With that, no orientation is ever zero.
//!
//! Predicates evaluate the unperturbed determinant first and only fall back
//! to the symbolic expansion when it is exactly zero.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg};
use std::sync::OnceLock;

use crate::error::{GeomError, Result};
use crate::exact::{det, orient2d_value, orient3d_value, Rational, Sign};

/// Index `i` of a perturbed coordinate, standing for the added `ε^(2^i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerturbIndex(pub usize);

/// A coordinate value together with its perturbation index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PerturbedScalar {
    pub value: Rational,
    pub index: PerturbIndex,
}

impl PerturbedScalar {
    pub fn new(value: Rational, index: usize) -> Self {
        PerturbedScalar {
            value,
            index: PerturbIndex(index),
        }
    }
}

/// Compares two perturbed scalars. Values decide; on a tie the coordinate
/// with the smaller index carries the larger infinitesimal and is greater.
///
/// There is no `Equal` outcome: comparing a coordinate with itself (equal
/// indices) is a contract violation.
pub fn compare_perturbed(a: &PerturbedScalar, b: &PerturbedScalar) -> Result<Ordering> {
    if a.index == b.index {
        return Err(GeomError::DuplicateIndex(a.index.0));
    }
    Ok(match a.value.cmp(&b.value) {
        Ordering::Equal => b.index.cmp(&a.index),
        ord => ord,
    })
}

/// An exponent of `ε` of the form `Σ 2^i` over a set of distinct indices.
///
/// Stored as the sorted index set (the binary digits of the exponent), never
/// as a materialized integer. Ordering is numeric.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EpsExponent(Vec<usize>);

impl EpsExponent {
    pub fn zero() -> Self {
        EpsExponent(Vec::new())
    }

    pub fn single(index: usize) -> Self {
        EpsExponent(vec![index])
    }

    /// The exponent `Σ 2^i` over `indices`; repeated indices carry.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = BTreeSet::new();
        for i in indices {
            add_power(&mut bits, i);
        }
        EpsExponent(bits.into_iter().collect())
    }

    /// Set bits of the exponent, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Exponent of the product `ε^self · ε^other` (binary addition).
    pub fn add(&self, other: &EpsExponent) -> EpsExponent {
        let mut bits: BTreeSet<usize> = self.0.iter().copied().collect();
        for &i in &other.0 {
            add_power(&mut bits, i);
        }
        EpsExponent(bits.into_iter().collect())
    }
}

fn add_power(bits: &mut BTreeSet<usize>, mut i: usize) {
    while bits.remove(&i) {
        i += 1;
    }
    bits.insert(i);
}

impl Ord for EpsExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // Highest differing bit decides.
        let mut a = self.0.iter().rev();
        let mut b = other.0.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(y),
                _ => {}
            }
        }
    }
}

impl PartialOrd for EpsExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite polynomial in `ε` with exact coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpsPolynomial {
    terms: BTreeMap<EpsExponent, Rational>,
}

impl EpsPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: Rational) -> Self {
        let mut p = Self::new();
        p.add_term(EpsExponent::zero(), value);
        p
    }

    /// `value + ε^(2^index)`.
    pub fn from_perturbed(s: &PerturbedScalar) -> Self {
        let mut p = Self::constant(s.value.clone());
        p.add_term(EpsExponent::single(s.index.0), Rational::one());
        p
    }

    pub fn add_term(&mut self, exponent: EpsExponent, coefficient: Rational) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coefficient;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(coefficient);
            }
        }
    }

    /// Coefficient of `ε^0`, the unperturbed value.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&EpsExponent::zero())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, exponent: &EpsExponent) -> Rational {
        self.terms.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&EpsExponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sign for an infinitesimal positive `ε`: the sign of the nonzero
    /// coefficient with the smallest exponent.
    pub fn sign(&self) -> Sign {
        self.terms
            .values()
            .next()
            .map(Rational::sign)
            .unwrap_or(Sign::Zero)
    }
}

pub fn eps_poly_sign(p: &EpsPolynomial) -> Sign {
    p.sign()
}

impl Add for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn add(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Mul for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn mul(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        let mut out = EpsPolynomial::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn neg(self) -> EpsPolynomial {
        EpsPolynomial {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// A 2D point whose coordinates carry perturbation indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexedPoint2 {
    pub coords: [PerturbedScalar; 2],
    pub id: usize,
}

impl IndexedPoint2 {
    /// Point number `id`, with coordinate indices `(2·id, 2·id + 1)`.
    pub fn new(id: usize, x: Rational, y: Rational) -> Self {
        IndexedPoint2 {
            coords: [
                PerturbedScalar::new(x, 2 * id),
                PerturbedScalar::new(y, 2 * id + 1),
            ],
            id,
        }
    }

    pub fn x(&self) -> &Rational {
        &self.coords[0].value
    }

    pub fn y(&self) -> &Rational {
        &self.coords[1].value
    }

    pub fn values(&self) -> [&Rational; 2] {
        [self.x(), self.y()]
    }

    pub fn indices(&self) -> [PerturbIndex; 2] {
        [self.coords[0].index, self.coords[1].index]
    }
}

/// A 3D point whose coordinates carry perturbation indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexedPoint3 {
    pub coords: [PerturbedScalar; 3],
    pub id: usize,
}

impl IndexedPoint3 {
    /// Point number `id`, with coordinate indices `(3·id, 3·id + 1, 3·id + 2)`.
    pub fn new(id: usize, [x, y, z]: [Rational; 3]) -> Self {
        IndexedPoint3 {
            coords: [
                PerturbedScalar::new(x, 3 * id),
                PerturbedScalar::new(y, 3 * id + 1),
                PerturbedScalar::new(z, 3 * id + 2),
            ],
            id,
        }
    }

    pub fn values(&self) -> [&Rational; 3] {
        [
            &self.coords[0].value,
            &self.coords[1].value,
            &self.coords[2].value,
        ]
    }

    pub fn indices(&self) -> [PerturbIndex; 3] {
        [
            self.coords[0].index,
            self.coords[1].index,
            self.coords[2].index,
        ]
    }

    /// Projection onto the xy-plane, keeping the x and y indices.
    pub fn xy(&self) -> IndexedPoint2 {
        IndexedPoint2 {
            coords: [self.coords[0].clone(), self.coords[1].clone()],
            id: self.id,
        }
    }
}

/// Indexes a 2D input in order: point `k` gets indices `(2k, 2k + 1)`.
pub fn assign_indices_2d(points: &[[Rational; 2]]) -> Vec<IndexedPoint2> {
    points
        .iter()
        .enumerate()
        .map(|(k, [x, y])| IndexedPoint2::new(k, x.clone(), y.clone()))
        .collect()
}

/// Indexes a 3D input in order: point `k` gets indices `(3k, 3k + 1, 3k + 2)`.
pub fn assign_indices_3d(points: &[[Rational; 3]]) -> Vec<IndexedPoint3> {
    points
        .iter()
        .enumerate()
        .map(|(k, p)| IndexedPoint3::new(k, p.clone()))
        .collect()
}

/// Sign of a perturbed orientation determinant. Never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Negative,
    Positive,
}

impl Orientation {
    pub fn sign(self) -> Sign {
        match self {
            Orientation::Negative => Sign::Negative,
            Orientation::Positive => Sign::Positive,
        }
    }

    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Negative => Orientation::Positive,
            Orientation::Positive => Orientation::Negative,
        }
    }

    fn from_sign(s: Sign) -> Orientation {
        match s {
            Sign::Negative => Orientation::Negative,
            Sign::Positive => Orientation::Positive,
            Sign::Zero => unreachable!("perturbed orientation cannot vanish"),
        }
    }
}

pub(crate) fn check_distinct(indices: &[PerturbIndex]) -> Result<()> {
    for (k, a) in indices.iter().enumerate() {
        if indices[k + 1..].contains(a) {
            return Err(GeomError::DuplicateIndex(a.0));
        }
    }
    Ok(())
}

/// A partial matching of matrix rows to coordinate columns: choosing the
/// `ε` part of entry `(row, col)` for each pair and the value part elsewhere.
type Matching = Vec<(usize, usize)>;

fn matchings(rows: usize, cols: usize) -> &'static [Matching] {
    static M2: OnceLock<Vec<Matching>> = OnceLock::new();
    static M3: OnceLock<Vec<Matching>> = OnceLock::new();
    let cell = match (rows, cols) {
        (3, 2) => &M2,
        (4, 3) => &M3,
        _ => unreachable!("only 2D and 3D orientations are supported"),
    };
    cell.get_or_init(|| {
        let mut out = Vec::new();
        let mut current = Vec::new();
        enumerate_matchings(0, rows, cols, &mut vec![false; cols], &mut current, &mut out);
        out
    })
}

fn enumerate_matchings(
    row: usize,
    rows: usize,
    cols: usize,
    used: &mut [bool],
    current: &mut Matching,
    out: &mut Vec<Matching>,
) {
    if row == rows {
        out.push(current.clone());
        return;
    }
    enumerate_matchings(row + 1, rows, cols, used, current, out);
    for c in 0..cols {
        if !used[c] {
            used[c] = true;
            current.push((row, c));
            enumerate_matchings(row + 1, rows, cols, used, current, out);
            current.pop();
            used[c] = false;
        }
    }
}

/// Coefficient of the product of the matched perturbations: by
/// multilinearity in rows, the determinant with each matched row replaced by
/// the unit vector of its column.
fn matching_coefficient(points: &[&[PerturbedScalar]], m: &Matching) -> Rational {
    let d = points[0].len();
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .enumerate()
        .map(|(r, p)| match m.iter().find(|(mr, _)| *mr == r) {
            Some(&(_, c)) => (0..=d)
                .map(|k| if k == c { Rational::one() } else { Rational::zero() })
                .collect(),
            None => p
                .iter()
                .map(|s| s.value.clone())
                .chain(std::iter::once(Rational::one()))
                .collect(),
        })
        .collect();
    det(&rows)
}

fn matching_exponent(points: &[&[PerturbedScalar]], m: &Matching) -> EpsExponent {
    EpsExponent::from_indices(m.iter().map(|&(r, c)| points[r][c].index.0))
}

/// Full expansion of the perturbed orientation determinant whose rows are
/// `(p, 1)` for each point.
fn orientation_expansion(points: &[&[PerturbedScalar]]) -> EpsPolynomial {
    let mut poly = EpsPolynomial::new();
    for m in matchings(points.len(), points[0].len()) {
        poly.add_term(matching_exponent(points, m), matching_coefficient(points, m));
    }
    poly
}

/// Sign of the lowest-order nonzero term, evaluating coefficients in
/// increasing exponent order and stopping at the first nonzero one. Distinct
/// indices make every matching's exponent distinct, so this is exactly the
/// sign of [`orientation_expansion`].
fn orientation_sign(points: &[&[PerturbedScalar]], constant: Rational) -> Orientation {
    if !constant.is_zero() {
        return Orientation::from_sign(constant.sign());
    }
    let mut order: Vec<(EpsExponent, &Matching)> = matchings(points.len(), points[0].len())
        .iter()
        .filter(|m| !m.is_empty())
        .map(|m| (matching_exponent(points, m), m))
        .collect();
    order.sort_by(|a, b| a.0.cmp(&b.0));
    for (_, m) in order {
        let c = matching_coefficient(points, m);
        if !c.is_zero() {
            return Orientation::from_sign(c.sign());
        }
    }
    unreachable!("the all-perturbation term of an orientation determinant is ±1")
}

/// Perturbed 2D orientation of `a, b, c`: the sign of the determinant with
/// rows `(a_x, a_y, 1), (b_x, b_y, 1), (c_x, c_y, 1)` after perturbation.
/// Positive means counterclockwise.
pub fn sos_orient2d(a: &IndexedPoint2, b: &IndexedPoint2, c: &IndexedPoint2) -> Result<Orientation> {
    let [a0, a1] = a.indices();
    let [b0, b1] = b.indices();
    let [c0, c1] = c.indices();
    check_distinct(&[a0, a1, b0, b1, c0, c1])?;
    let constant = orient2d_value(a.values(), b.values(), c.values());
    Ok(orientation_sign(&[&a.coords, &b.coords, &c.coords], constant))
}

/// Perturbed 3D orientation of `a, b, c, d`: the sign of the determinant with
/// rows `(p_x, p_y, p_z, 1)` after perturbation.
pub fn sos_orient3d(
    a: &IndexedPoint3,
    b: &IndexedPoint3,
    c: &IndexedPoint3,
    d: &IndexedPoint3,
) -> Result<Orientation> {
    let mut idx = Vec::with_capacity(12);
    for p in [a, b, c, d] {
        idx.extend(p.indices());
    }
    check_distinct(&idx)?;
    let constant = orient3d_value(a.values(), b.values(), c.values(), d.values());
    Ok(orientation_sign(
        &[&a.coords, &b.coords, &c.coords, &d.coords],
        constant,
    ))
}

/// The complete ε-expansion of the 2D orientation determinant.
pub fn orient2d_expansion(
    a: &IndexedPoint2,
    b: &IndexedPoint2,
    c: &IndexedPoint2,
) -> Result<EpsPolynomial> {
    let [a0, a1] = a.indices();
    let [b0, b1] = b.indices();
    let [c0, c1] = c.indices();
    check_distinct(&[a0, a1, b0, b1, c0, c1])?;
    Ok(orientation_expansion(&[&a.coords, &b.coords, &c.coords]))
}

/// The complete ε-expansion of the 3D orientation determinant.
pub fn orient3d_expansion(
    a: &IndexedPoint3,
    b: &IndexedPoint3,
    c: &IndexedPoint3,
    d: &IndexedPoint3,
) -> Result<EpsPolynomial> {
    let mut idx = Vec::with_capacity(12);
    for p in [a, b, c, d] {
        idx.extend(p.indices());
    }
    check_distinct(&idx)?;
    Ok(orientation_expansion(&[&a.coords, &b.coords, &c.coords, &d.coords]))
}
