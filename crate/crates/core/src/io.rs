//! Text input formats. Coordinates use the exact rational syntax of
//! [`parse_exact`]; `#` starts a comment that runs to the end of the line.
//!
//! * points: one `x y` (or `x y z`) per line.
//! * polygon: one vertex `x y` per line.
//! * polylines: vertex lines as for polygons; a blank line ends a polyline.
//! * cubes: a `side s` header, then one low corner `x y z` per line.
//! * OFF: `OFF`, then `nv nf [ne]`, `nv` vertex lines and `nf` faces
//!   `3 a b c`. Only triangles are accepted.

use thiserror::Error;

use crate::exact::{parse_exact, Rational};
use crate::shapes::Mesh;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Non-empty, comment-stripped lines with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((k + 1, body))
    })
}

fn coords<const N: usize>(line: usize, body: &str) -> Result<[Rational; N], ParseError> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != N {
        return Err(err(line, format!("expected {N} coordinates, found {}", fields.len())));
    }
    let mut out: [Rational; N] = std::array::from_fn(|_| Rational::zero());
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = parse_exact(f).map_err(|e| err(line, e.to_string()))?;
    }
    Ok(out)
}

pub fn parse_points2(text: &str) -> Result<Vec<[Rational; 2]>, ParseError> {
    content_lines(text).map(|(n, body)| coords::<2>(n, body)).collect()
}

pub fn parse_points3(text: &str) -> Result<Vec<[Rational; 3]>, ParseError> {
    content_lines(text).map(|(n, body)| coords::<3>(n, body)).collect()
}

/// Polyline blocks separated by blank lines. Comment-only lines do not
/// separate.
pub fn parse_polylines(text: &str) -> Result<Vec<Vec<[Rational; 2]>>, ParseError> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            continue;
        }
        let body = raw.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            current.push(coords::<2>(k + 1, body)?);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    Ok(out)
}

/// The shared side and the low corners.
pub fn parse_cubes(text: &str) -> Result<(Rational, Vec<[Rational; 3]>), ParseError> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| err(1, "missing `side <rational>` header"))?;
    let side = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["side", s] => parse_exact(s).map_err(|e| err(n, e.to_string()))?,
        _ => return Err(err(n, "expected header `side <rational>`")),
    };
    let lows = lines.map(|(n, body)| coords::<3>(n, body)).collect::<Result<_, _>>()?;
    Ok((side, lows))
}

fn count(line: usize, field: &str, what: &str) -> Result<usize, ParseError> {
    field
        .parse()
        .map_err(|_| err(line, format!("{what} must be a non-negative integer, found `{field}`")))
}

pub fn parse_off(text: &str) -> Result<Mesh, ParseError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "OFF")) => {}
        Some((n, _)) => return Err(err(n, "expected `OFF` header")),
        None => return Err(err(1, "empty file")),
    }
    let (n, counts) = lines.next().ok_or_else(|| err(1, "missing vertex and face counts"))?;
    let fields: Vec<&str> = counts.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 3 {
        return Err(err(n, "expected `vertices faces [edges]`"));
    }
    let nv = count(n, fields[0], "vertex count")?;
    let nf = count(n, fields[1], "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, body) = lines.next().ok_or_else(|| err(n, format!("expected {nv} vertices")))?;
        vertices.push(coords::<3>(n, body)?);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, body) = lines.next().ok_or_else(|| err(n, format!("expected {nf} faces")))?;
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.first() != Some(&"3") {
            return Err(err(n, "only triangular faces are supported"));
        }
        if fields.len() != 4 {
            return Err(err(n, "a triangle needs exactly 3 vertex indices"));
        }
        let mut tri = [0usize; 3];
        for (slot, f) in tri.iter_mut().zip(&fields[1..]) {
            *slot = count(n, f, "vertex index")?;
            if *slot >= nv {
                return Err(err(n, format!("vertex index {slot} out of range (have {nv})")));
            }
        }
        faces.push(tri);
    }
    if let Some((n, _)) = lines.next() {
        return Err(err(n, "unexpected content after the last face"));
    }
    Ok((vertices, faces))
}
