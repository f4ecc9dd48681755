//! Point in polygon by ray casting, and polyline crossing counts.
//!
//! The ray runs straight up from the query point. Each edge contributes 0 or
//! 1 crossings by [`ray_crosses_edge`]; the point is inside when the total is
//! odd. The half-open x-interval of that predicate makes rays through
//! polygon vertices count consistently, so no vertex case needs special
//! handling. Points exactly on the boundary are reported as such.

use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::exact::Rational;
use crate::oracle::{concrete_compare, concrete_orient2d};
use crate::predicates::{on_closed_segment, ray_crosses_segment, segments_intersect_sos, Crossing, Edge2};
use crate::sos::{assign_indices_2d, IndexedPoint2};
use crate::Sign;

/// Classification of a query point against a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Containment {
    Inside,
    Outside,
    OnBoundary,
}

impl Containment {
    pub fn as_str(self) -> &'static str {
        match self {
            Containment::Inside => "inside",
            Containment::Outside => "outside",
            Containment::OnBoundary => "boundary",
        }
    }
}

/// A closed polygon: the last vertex connects back to the first.
#[derive(Clone, Debug)]
pub struct Polygon {
    vertices: Vec<IndexedPoint2>,
    /// Sorted perturbation indices used by the vertices.
    indices: Vec<usize>,
}

impl Polygon {
    /// At least three vertices, no two consecutive vertices (cyclically) equal
    /// in value, and pairwise distinct point ids.
    pub fn new(vertices: Vec<IndexedPoint2>) -> Result<Polygon> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeomError::InvalidPolygon(format!("needs at least 3 vertices, got {n}")));
        }
        for k in 0..n {
            let (a, b) = (&vertices[k], &vertices[(k + 1) % n]);
            if a.values() == b.values() {
                return Err(GeomError::InvalidPolygon(format!(
                    "consecutive vertices {k} and {} coincide",
                    (k + 1) % n
                )));
            }
        }
        let mut indices: Vec<usize> = vertices.iter().flat_map(|v| v.indices().map(|i| i.0)).collect();
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeomError::DuplicateIndex(w[0]));
        }
        Ok(Polygon { vertices, indices })
    }

    /// Indexes raw vertices as points `0..n`.
    pub fn from_points(points: &[[Rational; 2]]) -> Result<Polygon> {
        Polygon::new(assign_indices_2d(points))
    }

    pub fn vertices(&self) -> &[IndexedPoint2] {
        &self.vertices
    }

    /// Edges `(v_k, v_{k+1})`, closing back to `v_0`.
    pub fn edges(&self) -> impl Iterator<Item = (&IndexedPoint2, &IndexedPoint2)> {
        let n = self.vertices.len();
        (0..n).map(move |k| (&self.vertices[k], &self.vertices[(k + 1) % n]))
    }

    /// A query point indexed after every polygon vertex, so the polygon's
    /// perturbations are the larger ones.
    pub fn query_point(&self, x: Rational, y: Rational) -> IndexedPoint2 {
        let next_id = self.vertices.iter().map(|v| v.id).max().map_or(0, |m| m + 1);
        IndexedPoint2::new(next_id, x, y)
    }

    fn uses_index(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Classifies `p` by the parity of upward-ray crossings.
///
/// Returns `OnBoundary` when `p` lies on the closed boundary: either some
/// edge reports [`Crossing::OnEdge`], or `p` sits on a vertical edge or on
/// an endpoint that the half-open rule skips.
pub fn point_in_polygon(p: &IndexedPoint2, poly: &Polygon) -> Result<Containment> {
    for i in p.indices() {
        if poly.uses_index(i.0) {
            return Err(GeomError::DuplicateIndex(i.0));
        }
    }
    let mut odd = false;
    for (a, b) in poly.edges() {
        match ray_crosses_segment(p, a, b) {
            Crossing::OnEdge => return Ok(Containment::OnBoundary),
            Crossing::One => odd = !odd,
            Crossing::Zero => {
                if (p.x() == a.x() || p.x() == b.x()) && on_closed_segment(p.values(), a.values(), b.values()) {
                    return Ok(Containment::OnBoundary);
                }
            }
        }
    }
    Ok(if odd { Containment::Inside } else { Containment::Outside })
}

/// Classifies many raw query points, in parallel, preserving input order.
pub fn classify_points(poly: &Polygon, points: &[[Rational; 2]]) -> Result<Vec<Containment>> {
    points
        .par_iter()
        .map(|[x, y]| point_in_polygon(&poly.query_point(x.clone(), y.clone()), poly))
        .collect()
}

/// Reference classification: exact boundary test, then a plain crossing
/// count on concretely perturbed coordinates. Polygon vertex `k` is point
/// `k`, the query is point `n`.
pub fn concrete_delta_oracle_pip(p: &[Rational; 2], poly: &[[Rational; 2]]) -> Containment {
    let n = poly.len();
    let pv = [&p[0], &p[1]];
    for k in 0..n {
        let (a, b) = (&poly[k], &poly[(k + 1) % n]);
        if on_closed_segment(pv, [&a[0], &a[1]], [&b[0], &b[1]]) {
            return Containment::OnBoundary;
        }
    }
    let verts = assign_indices_2d(poly);
    let q = IndexedPoint2::new(n, p[0].clone(), p[1].clone());
    let mut crossings = 0usize;
    for k in 0..n {
        let (a, b) = (&verts[k], &verts[(k + 1) % n]);
        let (l, r) = match concrete_compare(&a.coords[0], &b.coords[0]) {
            std::cmp::Ordering::Less => (a, b),
            _ => (b, a),
        };
        let strictly_between = concrete_compare(&l.coords[0], &q.coords[0]).is_lt()
            && concrete_compare(&q.coords[0], &r.coords[0]).is_lt();
        if strictly_between && concrete_orient2d(l, r, &q) == Sign::Negative {
            crossings += 1;
        }
    }
    if crossings % 2 == 1 {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// An open or closed chain of indexed vertices.
#[derive(Clone, Debug)]
pub struct Polyline {
    vertices: Vec<IndexedPoint2>,
    closed: bool,
}

impl Polyline {
    /// No two vertices may share a value; a closed polyline is given without
    /// repeating its first vertex.
    pub fn new(vertices: Vec<IndexedPoint2>, closed: bool) -> Result<Polyline> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(GeomError::InvalidPolyline(format!(
                "needs at least {min} vertices, got {}",
                vertices.len()
            )));
        }
        let mut values: Vec<[&Rational; 2]> = vertices.iter().map(|v| v.values()).collect();
        values.sort();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(GeomError::InvalidPolyline("two vertices coincide".into()));
        }
        Ok(Polyline { vertices, closed })
    }

    /// Builds a polyline from raw points numbered from `first_id`. A final
    /// point equal to the first closes the chain.
    pub fn from_points(points: &[[Rational; 2]], first_id: usize) -> Result<Polyline> {
        let closed = points.len() >= 4 && points.first() == points.last();
        let body = if closed { &points[..points.len() - 1] } else { points };
        let vertices = body
            .iter()
            .enumerate()
            .map(|(k, [x, y])| IndexedPoint2::new(first_id + k, x.clone(), y.clone()))
            .collect();
        Polyline::new(vertices, closed)
    }

    pub fn vertices(&self) -> &[IndexedPoint2] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn edges(&self) -> Vec<Edge2> {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count)
            .map(|k| Edge2 {
                v0: self.vertices[k].clone(),
                v1: self.vertices[(k + 1) % n].clone(),
            })
            .collect()
    }
}

/// Number of edge pairs `(e, f)`, `e` from `l0` and `f` from `l1`, that cross
/// under perturbation. Brute force over all pairs.
pub fn polyline_intersection_count(l0: &Polyline, l1: &Polyline) -> Result<usize> {
    let mut ids: Vec<usize> = l0
        .vertices
        .iter()
        .chain(&l1.vertices)
        .flat_map(|v| v.indices().map(|i| i.0))
        .collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(GeomError::DuplicateIndex(w[0]));
    }
    let (e0, e1) = (l0.edges(), l1.edges());
    let mut count = 0;
    for e in &e0 {
        for f in &e1 {
            if segments_intersect_sos(e, f)? {
                count += 1;
            }
        }
    }
    Ok(count)
}
