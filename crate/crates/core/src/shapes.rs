//! Closed triangle meshes with exact rational vertices.
//!
//! Curved shapes use rational points on the unit circle,
//! `((1 - t²) / (1 + t²), 2t / (1 + t²))`, so every vertex lies exactly on
//! the ideal surface.

use crate::exact::Rational;

pub type Mesh = (Vec<[Rational; 3]>, Vec<[usize; 3]>);

fn r(v: i64) -> Rational {
    Rational::from(v)
}

/// The unit cube `[0, 1]³`, two triangles per face.
pub fn cube() -> Mesh {
    let pts = (0..8).map(|k| [k & 1, k >> 1 & 1, k >> 2 & 1].map(r)).collect();
    let tris = vec![
        [0, 2, 1],
        [1, 2, 3],
        [4, 5, 6],
        [5, 7, 6],
        [0, 1, 4],
        [1, 5, 4],
        [2, 6, 3],
        [3, 6, 7],
        [0, 4, 2],
        [2, 4, 6],
        [1, 3, 5],
        [3, 7, 5],
    ];
    (pts, tris)
}

/// A tetrahedron with one face in `z = 0` and the apex above it.
pub fn tetrahedron() -> Mesh {
    let pts = vec![[0, 0, 0], [4, 0, 0], [0, 4, 0], [1, 1, 4]]
        .into_iter()
        .map(|p| p.map(r))
        .collect();
    (pts, vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]])
}

/// A rational point on the unit circle near angle `theta`, with
/// `tan(theta / 2)` rounded to a multiple of `1 / denom`.
pub fn circle_point(theta: f64, denom: i64) -> [Rational; 2] {
    let half = theta / 2.0;
    if (half.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
        return [r(-1), r(0)];
    }
    let t = Rational::new((half.tan() * denom as f64).round() as i64, denom).expect("nonzero denominator");
    let t2 = &t * &t;
    let d = Rational::one() + &t2;
    [(Rational::one() - &t2) / &d, (Rational::from(2) * &t) / &d]
}

/// `n_lon` points around the circle, starting at angle 0.
fn ring(n_lon: usize, denom: i64) -> Vec<[Rational; 2]> {
    (0..n_lon)
        .map(|k| {
            let mut theta = std::f64::consts::TAU * k as f64 / n_lon as f64;
            if theta > std::f64::consts::PI {
                theta -= std::f64::consts::TAU;
            }
            circle_point(theta, denom)
        })
        .collect()
}

/// A latitude/longitude sphere of radius 1: two poles and `n_lat - 1`
/// rings of `n_lon` vertices, `2 · n_lon · (n_lat - 1)` triangles.
pub fn uv_sphere(n_lon: usize, n_lat: usize) -> Mesh {
    assert!(n_lon >= 3 && n_lat >= 2);
    let denom = 64 * (n_lon.max(n_lat) as i64);
    let around = ring(n_lon, denom);
    let mut pts = vec![[r(0), r(0), r(-1)]];
    for j in 1..n_lat {
        let phi = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * j as f64 / n_lat as f64;
        let [c, s] = circle_point(phi, denom);
        for [x, y] in &around {
            pts.push([x * &c, y * &c, s.clone()]);
        }
    }
    let top = pts.len();
    pts.push([r(0), r(0), r(1)]);
    let at = |j: usize, k: usize| 1 + (j - 1) * n_lon + k % n_lon;
    let mut tris = Vec::with_capacity(2 * n_lon * (n_lat - 1));
    for k in 0..n_lon {
        tris.push([0, at(1, k + 1), at(1, k)]);
        tris.push([top, at(n_lat - 1, k), at(n_lat - 1, k + 1)]);
    }
    for j in 1..n_lat - 1 {
        for k in 0..n_lon {
            tris.push([at(j, k), at(j, k + 1), at(j + 1, k + 1)]);
            tris.push([at(j, k), at(j + 1, k + 1), at(j + 1, k)]);
        }
    }
    (pts, tris)
}

/// A torus around the z-axis with radii 2 and 1, `2 · n_major · n_minor`
/// triangles.
pub fn torus(n_major: usize, n_minor: usize) -> Mesh {
    assert!(n_major >= 3 && n_minor >= 3);
    let denom = 64 * (n_major.max(n_minor) as i64);
    let (major, minor) = (ring(n_major, denom), ring(n_minor, denom));
    let mut pts = Vec::with_capacity(n_major * n_minor);
    for [cu, su] in &major {
        for [cv, sv] in &minor {
            let radius = r(2) + cv;
            pts.push([cu * &radius, su * &radius, sv.clone()]);
        }
    }
    let at = |i: usize, j: usize| (i % n_major) * n_minor + j % n_minor;
    let mut tris = Vec::with_capacity(2 * n_major * n_minor);
    for i in 0..n_major {
        for j in 0..n_minor {
            tris.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            tris.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    (pts, tris)
}
