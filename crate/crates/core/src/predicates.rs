//! Degeneracy-free predicates built on the perturbation rule: half-open
//! point-on-edge in 1D, upward-ray/edge crossing, and segment crossing.

use crate::error::{GeomError, Result};
use crate::exact::{orient2d_value, Rational, Sign};
use crate::sos::{check_distinct, sos_orient2d, IndexedPoint2};

/// A polygon or polyline edge between two distinct indexed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge2 {
    pub v0: IndexedPoint2,
    pub v1: IndexedPoint2,
}

impl Edge2 {
    pub fn new(v0: IndexedPoint2, v1: IndexedPoint2) -> Result<Edge2> {
        if v0.id == v1.id {
            return Err(GeomError::DegenerateEdge(v0.id));
        }
        Ok(Edge2 { v0, v1 })
    }
}

/// Contribution of one edge to a ray-crossing count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Crossing {
    Zero,
    One,
    /// The query point lies on the edge; neither 0 nor 1 is meaningful.
    OnEdge,
}

/// Half-open interval membership `l <= p < r`: the closed test `l <= p <= r`
/// applied to `p + ε`.
pub fn point_on_edge_1d(l: &Rational, p: &Rational, r: &Rational) -> Result<bool> {
    if l > r {
        return Err(GeomError::ReversedInterval {
            l: Box::new(l.clone()),
            r: Box::new(r.clone()),
        });
    }
    Ok(l <= p && p < r)
}

/// Does the upward vertical ray from `p` cross edge `e`?
///
/// Vertical edges never count. Otherwise the edge's x-extent is treated as
/// the half-open interval `[l_x, r_x)`, and inside it the sign of
/// `det[(l, 1), (r, 1), (p, 1)]` says whether `p` is below (crossing), above
/// (no crossing) or on the edge.
pub fn ray_crosses_edge(p: &IndexedPoint2, e: &Edge2) -> Crossing {
    ray_crosses_segment(p, &e.v0, &e.v1)
}

pub(crate) fn ray_crosses_segment(p: &IndexedPoint2, a: &IndexedPoint2, b: &IndexedPoint2) -> Crossing {
    if a.x() == b.x() {
        return Crossing::Zero;
    }
    let (l, r) = if a.x() < b.x() { (a, b) } else { (b, a) };
    if l.x() > p.x() || p.x() >= r.x() {
        return Crossing::Zero;
    }
    match orient2d_value(l.values(), r.values(), p.values()).sign() {
        Sign::Zero => Crossing::OnEdge,
        Sign::Negative => Crossing::One,
        Sign::Positive => Crossing::Zero,
    }
}

/// Whether the two segments cross under perturbation: each segment's
/// endpoints lie strictly on opposite sides of the other's supporting line.
///
/// Touching configurations (endpoint on segment, collinear overlap) resolve
/// to whatever the perturbation dictates, deterministically.
pub fn segments_intersect_sos(s1: &Edge2, s2: &Edge2) -> Result<bool> {
    let mut idx = Vec::with_capacity(8);
    for p in [&s1.v0, &s1.v1, &s2.v0, &s2.v1] {
        idx.extend(p.indices());
    }
    check_distinct(&idx)?;
    let a0 = sos_orient2d(&s1.v0, &s1.v1, &s2.v0)?;
    let a1 = sos_orient2d(&s1.v0, &s1.v1, &s2.v1)?;
    if a0 == a1 {
        return Ok(false);
    }
    let b0 = sos_orient2d(&s2.v0, &s2.v1, &s1.v0)?;
    let b1 = sos_orient2d(&s2.v0, &s2.v1, &s1.v1)?;
    Ok(b0 != b1)
}

/// Exact closed-segment membership of `p` on segment `ab`.
pub fn on_closed_segment(p: [&Rational; 2], a: [&Rational; 2], b: [&Rational; 2]) -> bool {
    if !orient2d_value(a, b, p).is_zero() {
        return false;
    }
    let within = |k: usize| {
        let (lo, hi) = if a[k] <= b[k] { (a[k], b[k]) } else { (b[k], a[k]) };
        lo <= p[k] && p[k] <= hi
    };
    within(0) && within(1)
}
