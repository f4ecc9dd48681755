//! Volume, surface area and edge length of a union of identical axis-aligned
//! cubes.
//!
//! The union is described by its vertices. Every face plane gets its own
//! perturbation index, so under perturbation no vertex lies on a foreign
//! face and each candidate vertex is cleanly inside or outside every other
//! cube. The measures are then sums over the surviving vertices, evaluated
//! at the real (unperturbed) coordinates.
//!
//! High faces are indexed before all low faces, which makes every high face
//! move outward further than any low face at the same value. Cubes that touch
//! along a face therefore overlap slightly instead of leaving a gap.

#![allow(clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::exact::Rational;
use crate::sos::{compare_perturbed, PerturbedScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceSide {
    Low,
    High,
}

impl FaceSide {
    fn from_bit(bit: usize) -> FaceSide {
        if bit == 0 {
            FaceSide::Low
        } else {
            FaceSide::High
        }
    }

    fn bit(self) -> usize {
        match self {
            FaceSide::Low => 0,
            FaceSide::High => 1,
        }
    }
}

/// One face of one cube, with its perturbation index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceIndex {
    pub cube_id: usize,
    pub axis: usize,
    pub side: FaceSide,
    index: usize,
}

impl FaceIndex {
    /// High faces take `3k + a`, low faces `3n + 3k + a` for `n` cubes.
    fn new(cube_id: usize, axis: usize, side: FaceSide, n_cubes: usize) -> FaceIndex {
        let base = match side {
            FaceSide::High => 0,
            FaceSide::Low => 3 * n_cubes,
        };
        FaceIndex {
            cube_id,
            axis,
            side,
            index: base + 3 * cube_id + axis,
        }
    }

    pub fn perturbation_index(&self) -> usize {
        self.index
    }
}

#[derive(Clone, Debug)]
pub struct Cube {
    low: [Rational; 3],
    high: [Rational; 3],
    side: Rational,
    cube_id: usize,
    faces: [[FaceIndex; 2]; 3],
}

impl Cube {
    pub fn cube_id(&self) -> usize {
        self.cube_id
    }

    pub fn low(&self) -> &[Rational; 3] {
        &self.low
    }

    pub fn high(&self) -> &[Rational; 3] {
        &self.high
    }

    pub fn side(&self) -> &Rational {
        &self.side
    }

    pub fn face(&self, axis: usize, side: FaceSide) -> FaceIndex {
        self.faces[axis][side.bit()]
    }

    pub fn coordinate(&self, axis: usize, side: FaceSide) -> &Rational {
        match side {
            FaceSide::Low => &self.low[axis],
            FaceSide::High => &self.high[axis],
        }
    }

    fn perturbed(&self, axis: usize, side: FaceSide) -> PerturbedScalar {
        PerturbedScalar::new(self.coordinate(axis, side).clone(), self.face(axis, side).index)
    }
}

/// Cubes of one shared side length, numbered `0..n` in input order.
#[derive(Clone, Debug)]
pub struct CubeSet {
    cubes: Vec<Cube>,
    side: Rational,
}

impl CubeSet {
    pub fn new(side: Rational, lows: Vec<[Rational; 3]>) -> Result<CubeSet> {
        if side.sign() != crate::Sign::Positive {
            return Err(GeomError::InvalidCubes(format!("side must be positive, got {side}")));
        }
        let n = lows.len();
        let cubes = lows
            .into_iter()
            .enumerate()
            .map(|(k, low)| {
                let high = [&low[0] + &side, &low[1] + &side, &low[2] + &side];
                let faces = [0, 1, 2].map(|a| {
                    [
                        FaceIndex::new(k, a, FaceSide::Low, n),
                        FaceIndex::new(k, a, FaceSide::High, n),
                    ]
                });
                Cube {
                    low,
                    high,
                    side: side.clone(),
                    cube_id: k,
                    faces,
                }
            })
            .collect();
        Ok(CubeSet { cubes, side })
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn side(&self) -> &Rational {
        &self.side
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }
}

/// A vertex of the perturbed union.
///
/// `occupancy` has bit `o` set when the octant `o` around the vertex is
/// solid; bit `a` of `o` set means the positive direction along axis `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionVertex {
    pub position: [Rational; 3],
    pub provenance: [FaceIndex; 3],
    pub occupancy: u8,
}

impl UnionVertex {
    /// The direction of solid material along each axis, when exactly one
    /// octant is solid (always the case for a cube corner).
    pub fn octant(&self) -> Option<[i8; 3]> {
        if self.occupancy.count_ones() != 1 {
            return None;
        }
        let o = self.occupancy.trailing_zeros();
        Some([0, 1, 2].map(|a| octant_sign(o, a) as i8))
    }
}

fn octant_sign(o: u32, axis: usize) -> i64 {
    if o >> axis & 1 == 1 {
        1
    } else {
        -1
    }
}

/// Is `v` strictly inside `c` once every coordinate is perturbed by the
/// face it came from? A vertex on one of `c`'s own faces is not inside.
pub fn point_in_cube_sos(v: &UnionVertex, c: &Cube) -> bool {
    (0..3).all(|a| {
        let f = v.provenance[a];
        if f.index == c.faces[a][0].index || f.index == c.faces[a][1].index {
            return false;
        }
        let p = PerturbedScalar::new(v.position[a].clone(), f.index);
        let below = compare_perturbed(&c.perturbed(a, FaceSide::Low), &p) == Ok(Ordering::Less);
        below && compare_perturbed(&p, &c.perturbed(a, FaceSide::High)) == Ok(Ordering::Less)
    })
}

/// Face planes replaced by their rank in the perturbed order along each axis.
/// Every comparison the vertex search needs is then an integer comparison.
struct Ranked<'a> {
    set: &'a CubeSet,
    rank: Vec<[[u32; 2]; 3]>,
    neighbors: Vec<Vec<usize>>,
}

impl<'a> Ranked<'a> {
    fn new(set: &'a CubeSet) -> Result<Ranked<'a>> {
        let n = set.len();
        let mut rank = vec![[[0u32; 2]; 3]; n];
        for a in 0..3 {
            let mut faces: Vec<(PerturbedScalar, usize, usize)> = (0..n)
                .flat_map(|k| (0..2).map(move |s| (k, s)))
                .map(|(k, s)| (set.cubes[k].perturbed(a, FaceSide::from_bit(s)), k, s))
                .collect();
            faces.sort_by(|x, y| compare_perturbed(&x.0, &y.0).expect("face indices are distinct"));
            for (r, (_, k, s)) in faces.iter().enumerate() {
                rank[*k][a][*s] = r as u32;
            }
        }
        let mut ranked = Ranked {
            set,
            rank,
            neighbors: Vec::new(),
        };
        ranked.neighbors = ranked.find_neighbors()?;
        Ok(ranked)
    }

    /// Cubes whose perturbed boxes overlap. Overlapping cubes of side `s`
    /// have low corners less than `s` apart, so hashing low corners into
    /// cells of size `s` and scanning adjacent cells finds them all.
    fn find_neighbors(&self) -> Result<Vec<Vec<usize>>> {
        let side = self.set.side();
        let cell_of = |c: &Cube| -> Result<[i64; 3]> {
            let mut cell = [0i64; 3];
            for a in 0..3 {
                let f = (&c.low[a] / side).floor();
                cell[a] = i64::try_from(f)
                    .map_err(|_| GeomError::InvalidCubes("coordinates too large relative to side".into()))?;
            }
            Ok(cell)
        };
        let cells: Vec<[i64; 3]> = self.set.cubes.iter().map(cell_of).collect::<Result<_>>()?;
        let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (k, cell) in cells.iter().enumerate() {
            grid.entry(*cell).or_default().push(k);
        }
        Ok((0..self.set.len())
            .into_par_iter()
            .map(|i| {
                let c = cells[i];
                let mut out = Vec::new();
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for dz in -1..=1 {
                            if let Some(list) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                                out.extend(list.iter().copied().filter(|&j| j != i && self.overlaps(i, j)));
                            }
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect())
    }

    fn overlaps(&self, i: usize, j: usize) -> bool {
        let (ri, rj) = (&self.rank[i], &self.rank[j]);
        (0..3).all(|a| ri[a][0] < rj[a][1] && rj[a][0] < ri[a][1])
    }

    fn within(&self, k: usize, axis: usize, r: u32) -> bool {
        let [lo, hi] = self.rank[k][axis];
        lo < r && r < hi
    }

    fn contains(&self, k: usize, r: [u32; 3]) -> bool {
        (0..3).all(|a| self.within(k, a, r[a]))
    }

    /// No neighbor of `i` other than the provenance cubes strictly contains
    /// the point. A cube containing a point of `i`'s boundary overlaps `i`.
    fn exposed(&self, i: usize, r: [u32; 3], skip: [usize; 2]) -> bool {
        self.neighbors[i]
            .iter()
            .all(|&j| skip.contains(&j) || !self.contains(j, r))
    }

    fn vertex(&self, cubes: [usize; 3], sides: [usize; 3]) -> UnionVertex {
        let faces = [0, 1, 2].map(|a| self.set.cubes[cubes[a]].faces[a][sides[a]]);
        let position = [0, 1, 2].map(|a| self.set.cubes[cubes[a]].coordinate(a, FaceSide::from_bit(sides[a])).clone());
        UnionVertex {
            position,
            provenance: faces,
            occupancy: occupancy(cubes, sides),
        }
    }

    /// Vertices whose x face belongs to cube `i`, plus all corners of `i` and
    /// all vertices on edges of `i`. Each union vertex is produced by exactly
    /// one cube.
    fn vertices_of(&self, i: usize) -> Vec<UnionVertex> {
        let mut out = Vec::new();
        let rank = &self.rank;
        let nb = &self.neighbors[i];

        for s in 0..8 {
            let sides = [s & 1, s >> 1 & 1, s >> 2 & 1];
            let r = [0, 1, 2].map(|a| rank[i][a][sides[a]]);
            if self.exposed(i, r, [i, i]) {
                out.push(self.vertex([i; 3], sides));
            }
        }

        for c in 0..3 {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            for &m in nb {
                for sc in 0..2 {
                    let rc = rank[m][c][sc];
                    if !self.within(i, c, rc) {
                        continue;
                    }
                    for sa in 0..2 {
                        if !self.within(m, a, rank[i][a][sa]) {
                            continue;
                        }
                        for sb in 0..2 {
                            if !self.within(m, b, rank[i][b][sb]) {
                                continue;
                            }
                            let mut r = [0; 3];
                            r[a] = rank[i][a][sa];
                            r[b] = rank[i][b][sb];
                            r[c] = rc;
                            if self.exposed(i, r, [m, m]) {
                                let mut cubes = [i; 3];
                                cubes[c] = m;
                                let mut sides = [0; 3];
                                sides[a] = sa;
                                sides[b] = sb;
                                sides[c] = sc;
                                out.push(self.vertex(cubes, sides));
                            }
                        }
                    }
                }
            }
        }

        for sx in 0..2 {
            let rx = rank[i][0][sx];
            let through: Vec<usize> = nb.iter().copied().filter(|&j| self.within(j, 0, rx)).collect();
            for &j in &through {
                for sy in 0..2 {
                    let ry = rank[j][1][sy];
                    if !self.within(i, 1, ry) {
                        continue;
                    }
                    for &k in &through {
                        if k == j || !self.within(k, 1, ry) {
                            continue;
                        }
                        for sz in 0..2 {
                            let rz = rank[k][2][sz];
                            if self.within(i, 2, rz) && self.within(j, 2, rz) && self.exposed(i, [rx, ry, rz], [j, k]) {
                                out.push(self.vertex([i, j, k], [sx, sy, sz]));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Solid octants around a vertex. Each provenance cube fills the octants on
/// the inner side of each of its faces through the vertex, and both sides
/// along axes where the vertex lies strictly within it.
fn occupancy(cubes: [usize; 3], sides: [usize; 3]) -> u8 {
    let mut mask = 0u8;
    for p in cubes {
        for o in 0..8u32 {
            let fits = (0..3).all(|a| cubes[a] != p || (o >> a & 1 == 1) == (sides[a] == 0));
            if fits {
                mask |= 1 << o;
            }
        }
    }
    mask
}

fn occupied(mask: u8, o: u32) -> bool {
    mask >> o & 1 == 1
}

/// Vertices of the union, grouped by the cube that generates them.
pub fn union_vertices(s: &CubeSet) -> Result<Vec<UnionVertex>> {
    let ranked = Ranked::new(s)?;
    Ok((0..s.len())
        .into_par_iter()
        .flat_map_iter(|i| ranked.vertices_of(i))
        .collect())
}

/// Volume, surface area and total edge length of a union.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnionMeasures {
    pub volume: Rational,
    pub area: Rational,
    pub edge_length: Rational,
}

fn volume_weight(mask: u8) -> i64 {
    (0..8u32)
        .filter(|&o| occupied(mask, o))
        .map(|o| octant_sign(o, 0) * octant_sign(o, 1) * octant_sign(o, 2))
        .sum()
}

/// Octant number for quadrant `q` (bit 0 along `a`, bit 1 along `b`) on the
/// `up` side of axis `c`.
fn octant_of(c: usize, q: u32, up: bool) -> u32 {
    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
    (q & 1) << a | (q >> 1 & 1) << b | (up as u32) << c
}

fn quadrant_sign(q: u32) -> i64 {
    octant_sign(q, 0) * octant_sign(q, 1)
}

/// Area weight of the faces perpendicular to `c` at a vertex.
fn area_weight(mask: u8, c: usize) -> i64 {
    (0..4u32)
        .filter(|&q| occupied(mask, octant_of(c, q, true)) != occupied(mask, octant_of(c, q, false)))
        .map(quadrant_sign)
        .sum()
}

/// Change, crossing the vertex in direction `+c`, of the corner charge of
/// the cross-section perpendicular to `c`.
fn edge_charge(mask: u8, c: usize) -> i64 {
    let charge = |up: bool| -> i64 {
        (0..4u32)
            .filter(|&q| occupied(mask, octant_of(c, q, up)))
            .map(quadrant_sign)
            .sum()
    };
    charge(true) - charge(false)
}

fn sum_par(items: Vec<Rational>) -> Rational {
    items.into_par_iter().reduce(Rational::zero, |a, b| a + b)
}

/// Total length of union edges parallel to `c`.
///
/// Perturbation can split one real edge into several nearby parallel edges,
/// so charges are accumulated per real line before lengths are taken. A line
/// segment is an edge wherever the accumulated charge is nonzero.
fn edge_length_along(vertices: &[UnionVertex], c: usize) -> Rational {
    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
    let mut events: Vec<(&Rational, &Rational, &Rational, i64)> = vertices
        .iter()
        .filter_map(|v| {
            let d = edge_charge(v.occupancy, c);
            (d != 0).then(|| (&v.position[a], &v.position[b], &v.position[c], d))
        })
        .collect();
    events.par_sort_unstable();
    let mut total = Rational::zero();
    let mut charge = 0i64;
    for (k, e) in events.iter().enumerate() {
        charge += e.3;
        if let Some(next) = events.get(k + 1) {
            let same_line = next.0 == e.0 && next.1 == e.1;
            if same_line && charge != 0 && next.2 != e.2 {
                total += next.2 - e.2;
            }
            if !same_line {
                debug_assert_eq!(charge, 0);
                charge = 0;
            }
        }
    }
    total
}

/// Measures of the union from a vertex set.
pub fn measures_from_vertices(vertices: &[UnionVertex]) -> UnionMeasures {
    let volume = -sum_par(
        vertices
            .par_iter()
            .filter_map(|v| {
                let w = volume_weight(v.occupancy);
                let [x, y, z] = &v.position;
                (w != 0).then(|| Rational::from(w) * x * y * z)
            })
            .collect(),
    );
    let area = sum_par(
        vertices
            .par_iter()
            .flat_map_iter(|v| {
                (0..3).filter_map(move |c| {
                    let w = area_weight(v.occupancy, c);
                    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
                    (w != 0).then(|| Rational::from(w) * &v.position[a] * &v.position[b])
                })
            })
            .collect(),
    );
    let edge_length = (0..3).map(|c| edge_length_along(vertices, c)).sum();
    UnionMeasures {
        volume,
        area,
        edge_length,
    }
}

pub fn union_measures(s: &CubeSet) -> Result<UnionMeasures> {
    Ok(measures_from_vertices(&union_vertices(s)?))
}

pub fn union_volume(s: &CubeSet) -> Result<Rational> {
    Ok(union_measures(s)?.volume)
}

pub fn union_area(s: &CubeSet) -> Result<Rational> {
    Ok(union_measures(s)?.area)
}

pub fn union_edge_length(s: &CubeSet) -> Result<Rational> {
    Ok(union_measures(s)?.edge_length)
}

/// Reference measures by cell decomposition, with no perturbation.
///
/// The distinct face coordinates cut space into boxes, each fully covered
/// or fully empty. Boxes are visited one x-slab at a time, comparing each
/// slab with its predecessor for the faces and edges between them.
pub fn compressed_cell_oracle(s: &CubeSet) -> UnionMeasures {
    let axis_coords = |a: usize| -> Vec<Rational> {
        let mut v: Vec<Rational> = s
            .cubes
            .iter()
            .flat_map(|c| [c.low[a].clone(), c.high[a].clone()])
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let (xs, ys, zs) = (axis_coords(0), axis_coords(1), axis_coords(2));
    let zero = UnionMeasures {
        volume: Rational::zero(),
        area: Rational::zero(),
        edge_length: Rational::zero(),
    };
    if xs.is_empty() {
        return zero;
    }
    let lens = |v: &[Rational]| -> Vec<Rational> { v.windows(2).map(|w| &w[1] - &w[0]).collect() };
    let (dx, dy, dz) = (lens(&xs), lens(&ys), lens(&zs));
    let pos = |v: &[Rational], t: &Rational| v.binary_search(t).expect("face coordinate is listed");

    // Cell (j, k) of a slab lives at (j + 1, k + 1); the border stays empty.
    let (ny, nz) = (dy.len() + 2, dz.len() + 2);
    let at = |j: usize, k: usize| j * nz + k;
    let ranges: Vec<[(usize, usize); 3]> = s
        .cubes
        .iter()
        .map(|c| {
            [(&xs, 0), (&ys, 1), (&zs, 2)].map(|(v, a)| (pos(v, &c.low[a]), pos(v, &c.high[a])))
        })
        .collect();
    let slab = |i: usize| -> Vec<bool> {
        let mut cov = vec![false; ny * nz];
        if i < dx.len() {
            for r in ranges.iter().filter(|r| r[0].0 <= i && i < r[0].1) {
                for j in r[1].0..r[1].1 {
                    for k in r[2].0..r[2].1 {
                        cov[at(j + 1, k + 1)] = true;
                    }
                }
            }
        }
        cov
    };
    let is_edge = |c00: bool, c01: bool, c10: bool, c11: bool| {
        let n = c00 as u8 + c01 as u8 + c10 as u8 + c11 as u8;
        n == 1 || n == 3 || (n == 2 && c00 == c11)
    };

    let per_slab: Vec<UnionMeasures> = (0..=dx.len())
        .into_par_iter()
        .map(|i| {
            let cur = slab(i);
            let prev = if i == 0 { vec![false; ny * nz] } else { slab(i - 1) };
            let mut m = zero.clone();
            // Cell counts keyed by their (j, k) lengths keep the rational
            // work proportional to distinct products, not cells.
            let mut vol_cells = vec![0i64; ny * nz];
            let mut xface = vec![0i64; ny * nz];
            let (mut yface, mut zface) = (vec![0i64; nz], vec![0i64; ny]);
            let (mut xedge, mut yedge, mut zedge) = (0i64, vec![0i64; ny], vec![0i64; nz]);
            for j in 0..ny {
                for k in 0..nz {
                    let c = cur[at(j, k)];
                    if c {
                        vol_cells[at(j, k)] += 1;
                    }
                    if c != prev[at(j, k)] {
                        xface[at(j, k)] += 1;
                    }
                    if j > 0 && c != cur[at(j - 1, k)] {
                        yface[k] += 1;
                    }
                    if k > 0 && c != cur[at(j, k - 1)] {
                        zface[j] += 1;
                    }
                    if j > 0 && k > 0 {
                        if is_edge(cur[at(j - 1, k - 1)], cur[at(j - 1, k)], cur[at(j, k - 1)], c) {
                            xedge += 1;
                        }
                        // y-edges run through cell row j along the x-plane i.
                        if is_edge(prev[at(j, k - 1)], prev[at(j, k)], cur[at(j, k - 1)], c) {
                            yedge[j] += 1;
                        }
                        // z-edges run through cell column k along the x-plane i.
                        if is_edge(prev[at(j - 1, k)], prev[at(j, k)], cur[at(j - 1, k)], c) {
                            zedge[k] += 1;
                        }
                    }
                }
            }
            for j in 0..ny {
                for k in 0..nz {
                    let (Some(ly), Some(lz)) = (cell_len(&dy, j), cell_len(&dz, k)) else { continue };
                    let yz = ly * lz;
                    if vol_cells[at(j, k)] != 0 {
                        m.volume += &yz * &dx[i];
                    }
                    if xface[at(j, k)] != 0 {
                        m.area += &yz;
                    }
                }
            }
            if i < dx.len() {
                for k in 0..nz {
                    if let Some(lz) = cell_len(&dz, k) {
                        m.area += Rational::from(yface[k]) * lz * &dx[i];
                    }
                }
                for j in 0..ny {
                    if let Some(ly) = cell_len(&dy, j) {
                        m.area += Rational::from(zface[j]) * ly * &dx[i];
                    }
                }
                m.edge_length += Rational::from(xedge) * &dx[i];
            }
            for j in 0..ny {
                if let Some(ly) = cell_len(&dy, j) {
                    m.edge_length += Rational::from(yedge[j]) * ly;
                }
            }
            for k in 0..nz {
                if let Some(lz) = cell_len(&dz, k) {
                    m.edge_length += Rational::from(zedge[k]) * lz;
                }
            }
            m
        })
        .collect();
    per_slab.into_iter().fold(zero, |acc, m| UnionMeasures {
        volume: acc.volume + m.volume,
        area: acc.area + m.area,
        edge_length: acc.edge_length + m.edge_length,
    })
}

/// Length of padded cell `idx`; the border cells have none.
fn cell_len(d: &[Rational], idx: usize) -> Option<&Rational> {
    idx.checked_sub(1).and_then(|t| d.get(t))
}
