//! Point location in a closed triangle mesh by vertical ray casting.
//!
//! A ray goes up (+z) from the query point and crossings are counted: odd
//! means inside. Perturbation decides rays through vertices and edges and
//! queries in a triangle's plane, so the count is always consistent. A query
//! exactly on the surface is reported before any perturbation is applied.
//!
//! A uniform grid of xy-columns limits each query to the triangles whose
//! projected bounding rectangle meets the query's column.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::exact::{orient2d_value, orient3d_value, Rational, Sign};
use crate::oracle::{concrete_orient2d, concrete_orient3d};
use crate::sos::{assign_indices_3d, sos_orient2d, sos_orient3d, IndexedPoint3};

/// A triangle mesh. Vertex `k` is indexed point `k`.
#[derive(Clone, Debug)]
pub struct TriMesh {
    vertices: Vec<IndexedPoint3>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Triangles must reference existing vertices, each at most once.
    /// Closedness is checked separately by [`validate_watertight`].
    pub fn new(points: &[[Rational; 3]], triangles: Vec<[usize; 3]>) -> Result<TriMesh> {
        let n = points.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= n) {
                return Err(GeomError::InvalidMesh(format!(
                    "triangle {t} references vertex {v}, but there are {n} vertices"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(GeomError::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
        }
        Ok(TriMesh {
            vertices: assign_indices_3d(points),
            triangles,
        })
    }

    pub fn vertices(&self) -> &[IndexedPoint3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [&IndexedPoint3; 3] {
        self.triangles[t].map(|v| &self.vertices[v])
    }

    /// A query point indexed after every mesh vertex.
    pub fn query_point(&self, p: [Rational; 3]) -> IndexedPoint3 {
        IndexedPoint3::new(self.vertices.len(), p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocateResult {
    Inside,
    Outside,
    OnSurface,
}

impl LocateResult {
    pub fn as_str(self) -> &'static str {
        match self {
            LocateResult::Inside => "inside",
            LocateResult::Outside => "outside",
            LocateResult::OnSurface => "surface",
        }
    }
}

/// Contribution of one triangle to a ray-crossing count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RayHit {
    Zero,
    One,
    OnSurface,
}

/// Exact test for `p` on the closed triangle `abc`. A triangle with
/// collinear corners is treated as the union of its sides.
pub fn on_closed_triangle(p: [&Rational; 3], a: [&Rational; 3], b: [&Rational; 3], c: [&Rational; 3]) -> bool {
    if !orient3d_value(a, b, c, p).is_zero() {
        return false;
    }
    let sub = |u: [&Rational; 3], v: [&Rational; 3]| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let (ab, ac) = (sub(b, a), sub(c, a));
    let normal = [
        &ab[1] * &ac[2] - &ab[2] * &ac[1],
        &ab[2] * &ac[0] - &ab[0] * &ac[2],
        &ab[0] * &ac[1] - &ab[1] * &ac[0],
    ];
    match normal.iter().position(|n| !n.is_zero()) {
        Some(k) => {
            // Drop the axis the plane is not parallel to.
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            fn pr(q: [&Rational; 3], i: usize, j: usize) -> [&Rational; 2] {
                [q[i], q[j]]
            }
            let s = [
                orient2d_value(pr(a, i, j), pr(b, i, j), pr(p, i, j)).sign(),
                orient2d_value(pr(b, i, j), pr(c, i, j), pr(p, i, j)).sign(),
                orient2d_value(pr(c, i, j), pr(a, i, j), pr(p, i, j)).sign(),
            ];
            !(s.contains(&Sign::Positive) && s.contains(&Sign::Negative))
        }
        None => on_segment_3d(p, a, b) || on_segment_3d(p, b, c) || on_segment_3d(p, c, a),
    }
}

fn on_segment_3d(p: [&Rational; 3], a: [&Rational; 3], b: [&Rational; 3]) -> bool {
    let collinear = (0..3).all(|i| {
        let j = (i + 1) % 3;
        (b[i] - a[i]) * (p[j] - a[j]) == (b[j] - a[j]) * (p[i] - a[i])
    });
    collinear && (0..3).all(|i| (a[i].min(b[i])) <= p[i] && p[i] <= a[i].max(b[i]))
}

fn strictly_outside_xy(p: &IndexedPoint3, tri: [&IndexedPoint3; 3]) -> bool {
    (0..2).any(|k| {
        let v = tri.map(|q| &q.coords[k].value);
        let t = &p.coords[k].value;
        (t < v[0] && t < v[1] && t < v[2]) || (t > v[0] && t > v[1] && t > v[2])
    })
}

/// Does the upward ray from `p` cross triangle `tri`?
///
/// The perturbed `p` projects strictly inside or outside the perturbed
/// triangle's xy-projection; inside, all three edge orientations share the
/// triangle's projected orientation `s`, and the ray crosses iff `p` lies
/// below the plane, which for that orientation means `orient3d = s`.
pub fn ray_crosses_triangle_sos(p: &IndexedPoint3, tri: [&IndexedPoint3; 3]) -> Result<RayHit> {
    let mesh_max = tri.iter().flat_map(|q| q.indices()).map(|i| i.0).max().unwrap_or(0);
    let query_min = p.indices().iter().map(|i| i.0).min().unwrap_or(0);
    if query_min <= mesh_max {
        return Err(GeomError::QueryIndexOrder {
            query: query_min,
            mesh: mesh_max,
        });
    }
    if strictly_outside_xy(p, tri) {
        return Ok(RayHit::Zero);
    }
    let [a, b, c] = tri;
    if on_closed_triangle(p.values(), a.values(), b.values(), c.values()) {
        return Ok(RayHit::OnSurface);
    }
    let (a2, b2, c2, p2) = (a.xy(), b.xy(), c.xy(), p.xy());
    let s = sos_orient2d(&a2, &b2, &p2)?;
    if sos_orient2d(&b2, &c2, &p2)? != s || sos_orient2d(&c2, &a2, &p2)? != s {
        return Ok(RayHit::Zero);
    }
    Ok(if sos_orient3d(a, b, c, p)? == s {
        RayHit::One
    } else {
        RayHit::Zero
    })
}

/// Columns of equal xy-cells over the mesh's bounding box grown by one cell
/// on every side; each column lists the triangles whose projected bounding
/// rectangle meets it.
#[derive(Clone, Debug)]
pub struct UniformGrid {
    origin: [Rational; 2],
    cell: [Rational; 2],
    resolution: usize,
    /// Column `(i, j)` holds `items[start[i * w + j]..start[i * w + j + 1]]`.
    start: Vec<usize>,
    items: Vec<u32>,
}

impl UniformGrid {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    fn width(&self) -> usize {
        self.resolution + 2
    }

    fn column_of(&self, axis: usize, t: &Rational) -> Option<usize> {
        let f: BigInt = ((t - &self.origin[axis]) / &self.cell[axis]).floor();
        f.to_usize().filter(|&i| i < self.width())
    }

    /// Triangle ids stored for the column containing `(x, y)`, ascending.
    pub fn candidates(&self, x: &Rational, y: &Rational) -> &[u32] {
        match (self.column_of(0, x), self.column_of(1, y)) {
            (Some(i), Some(j)) => {
                let c = i * self.width() + j;
                &self.items[self.start[c]..self.start[c + 1]]
            }
            _ => &[],
        }
    }

    pub fn column_count(&self) -> usize {
        self.width() * self.width()
    }
}

/// A reasonable resolution for `n` triangles: about one triangle per column
/// for a surface seen from above.
pub fn default_resolution(n_triangles: usize) -> usize {
    ((n_triangles as f64).sqrt().ceil() as usize).max(1)
}

pub fn build_grid(mesh: &TriMesh, g: usize) -> Result<UniformGrid> {
    if mesh.triangles.is_empty() {
        return Err(GeomError::InvalidMesh("cannot index a mesh without triangles".into()));
    }
    if g == 0 {
        return Err(GeomError::InvalidMesh("grid resolution must be positive".into()));
    }
    let mut lo = [mesh.vertices[0].values()[0].clone(), mesh.vertices[0].values()[1].clone()];
    let mut hi = lo.clone();
    for v in &mesh.vertices {
        for k in 0..2 {
            let t = &v.coords[k].value;
            if *t < lo[k] {
                lo[k] = t.clone();
            }
            if *t > hi[k] {
                hi[k] = t.clone();
            }
        }
    }
    let cell = [0, 1].map(|k| {
        let extent = &hi[k] - &lo[k];
        if extent.is_zero() {
            Rational::one()
        } else {
            extent / Rational::from(g as i64)
        }
    });
    let origin = [&lo[0] - &cell[0], &lo[1] - &cell[1]];
    let mut grid = UniformGrid {
        origin,
        cell,
        resolution: g,
        start: Vec::new(),
        items: Vec::new(),
    };
    let w = grid.width();
    let spans: Vec<[(usize, usize); 2]> = mesh
        .triangles
        .par_iter()
        .map(|tri| {
            [0, 1].map(|k| {
                let vals = tri.map(|v| &mesh.vertices[v].coords[k].value);
                let (mut a, mut b) = (vals[0], vals[0]);
                for t in &vals[1..] {
                    a = a.min(t);
                    b = b.max(t);
                }
                let col = |t: &Rational| grid.column_of(k, t).expect("vertex lies within the grid");
                (col(a), col(b))
            })
        })
        .collect();
    let mut count = vec![0usize; w * w + 1];
    for s in &spans {
        for i in s[0].0..=s[0].1 {
            for j in s[1].0..=s[1].1 {
                count[i * w + j + 1] += 1;
            }
        }
    }
    for c in 1..count.len() {
        count[c] += count[c - 1];
    }
    let mut fill = count.clone();
    let mut items = vec![0u32; count[w * w]];
    for (t, s) in spans.iter().enumerate() {
        for i in s[0].0..=s[0].1 {
            for j in s[1].0..=s[1].1 {
                let c = i * w + j;
                items[fill[c]] = t as u32;
                fill[c] += 1;
            }
        }
    }
    grid.start = count;
    grid.items = items;
    Ok(grid)
}

/// Classifies `p` against the closed mesh. `p` must be indexed after every
/// mesh vertex (see [`TriMesh::query_point`]).
pub fn locate_point(mesh: &TriMesh, grid: &UniformGrid, p: &IndexedPoint3) -> Result<LocateResult> {
    let min_query = p.indices().iter().map(|i| i.0).min().unwrap_or(0);
    if min_query < 3 * mesh.vertices.len() {
        return Err(GeomError::QueryIndexOrder {
            query: min_query,
            mesh: (3 * mesh.vertices.len()).saturating_sub(1),
        });
    }
    let mut odd = false;
    for &t in grid.candidates(p.values()[0], p.values()[1]) {
        match ray_crosses_triangle_sos(p, mesh.triangle(t as usize))? {
            RayHit::OnSurface => return Ok(LocateResult::OnSurface),
            RayHit::One => odd = !odd,
            RayHit::Zero => {}
        }
    }
    Ok(if odd { LocateResult::Inside } else { LocateResult::Outside })
}

/// Classifies many raw points in parallel, preserving input order.
pub fn locate_points(mesh: &TriMesh, grid: &UniformGrid, points: &[[Rational; 3]]) -> Result<Vec<LocateResult>> {
    points
        .par_iter()
        .map(|p| locate_point(mesh, grid, &mesh.query_point(p.clone())))
        .collect()
}

/// An undirected edge used by an odd number of triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeViolation {
    pub a: usize,
    pub b: usize,
    pub incidence: usize,
}

/// Edges with odd triangle incidence, ordered by vertex pair. Empty for a
/// closed mesh.
pub fn validate_watertight(mesh: &TriMesh) -> Vec<EdgeViolation> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            *count.entry((u.min(v), u.max(v))).or_default() += 1;
        }
    }
    count
        .into_iter()
        .filter(|&(_, c)| c % 2 == 1)
        .map(|((a, b), incidence)| EdgeViolation { a, b, incidence })
        .collect()
}

/// Reference classification by brute force over all triangles: an exact
/// barycentric surface test, then crossings decided by concretely perturbed
/// orientations. Vertex `k` is point `k`, the query is point `n`.
pub fn concrete_delta_oracle_locate(p: &[Rational; 3], vertices: &[[Rational; 3]], triangles: &[[usize; 3]]) -> LocateResult {
    let in_box = |t: &[usize; 3]| {
        (0..3).all(|k| {
            let vals = t.map(|v| &vertices[v][k]);
            vals.iter().any(|v| **v <= p[k]) && vals.iter().any(|v| **v >= p[k])
        })
    };
    if triangles
        .iter()
        .any(|t| in_box(t) && barycentric_on_triangle(p, &vertices[t[0]], &vertices[t[1]], &vertices[t[2]]))
    {
        return LocateResult::OnSurface;
    }
    let verts = assign_indices_3d(vertices);
    let q = IndexedPoint3::new(vertices.len(), p.clone());
    let q2 = q.xy();
    let mut crossings = 0usize;
    for t in triangles {
        let [a, b, c] = t.map(|v| &verts[v]);
        let outside = (0..2).any(|k| {
            let vals = [a, b, c].map(|v| &v.coords[k].value);
            vals.iter().all(|v| p[k] < **v) || vals.iter().all(|v| p[k] > **v)
        });
        if outside {
            continue;
        }
        let (a2, b2, c2) = (a.xy(), b.xy(), c.xy());
        let s = concrete_orient2d(&a2, &b2, &q2);
        if concrete_orient2d(&b2, &c2, &q2) != s || concrete_orient2d(&c2, &a2, &q2) != s {
            continue;
        }
        if concrete_orient3d(a, b, c, &q) == s {
            crossings += 1;
        }
    }
    if crossings % 2 == 1 {
        LocateResult::Inside
    } else {
        LocateResult::Outside
    }
}

fn cross(u: &[Rational; 3], v: &[Rational; 3]) -> [Rational; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

fn dot(u: &[Rational; 3], v: &[Rational; 3]) -> Rational {
    &u[0] * &v[0] + &u[1] * &v[1] + &u[2] * &v[2]
}

fn minus(u: &[Rational; 3], v: &[Rational; 3]) -> [Rational; 3] {
    [&u[0] - &v[0], &u[1] - &v[1], &u[2] - &v[2]]
}

fn barycentric_on_triangle(p: &[Rational; 3], a: &[Rational; 3], b: &[Rational; 3], c: &[Rational; 3]) -> bool {
    let n = cross(&minus(b, a), &minus(c, a));
    if dot(&n, &n).is_zero() {
        return [(a, b), (b, c), (c, a)].iter().any(|(u, v)| {
            let (d, w) = (minus(v, u), minus(p, u));
            let t = dot(&w, &d);
            dot(&cross(&d, &w), &cross(&d, &w)).is_zero() && t.sign() != Sign::Negative && t <= dot(&d, &d)
        });
    }
    if !dot(&n, &minus(p, a)).is_zero() {
        return false;
    }
    [(a, b), (b, c), (c, a)]
        .iter()
        .all(|(u, v)| dot(&n, &cross(&minus(v, u), &minus(p, u))).sign() != Sign::Negative)
}
