//! `sos`: batch front end for the exact geometry kernel.
//!
//! Exit status 0 on success, 1 when the input is well formed but
//! geometrically unusable (an invalid polygon, an open mesh), 2 on usage,
//! I/O and parse errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sos_kernel::cubes::{compressed_cell_oracle, union_measures, CubeSet, UnionMeasures};
use sos_kernel::io::{parse_cubes, parse_off, parse_points2, parse_points3, parse_polylines, ParseError};
use sos_kernel::mesh3d::{build_grid, default_resolution, locate_points, validate_watertight, TriMesh};
use sos_kernel::planar::{classify_points, polyline_intersection_count, Polygon, Polyline};
use sos_kernel::{GeomError, Rational};

#[derive(Parser)]
#[command(name = "sos", version, about = "Exact, degeneracy-free geometric queries")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,
    /// Worker threads; 0 uses one per core. Output does not depend on it.
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify points against a polygon: inside, outside or boundary.
    Pip {
        #[arg(long)]
        polygon: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Count crossings between the polylines of two files.
    #[command(name = "polyline-x")]
    PolylineX {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Volume, area and edge length of a union of cubes.
    Cubes {
        #[arg(long)]
        file: PathBuf,
        /// Also run the cell-decomposition reference and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Classify points against a closed OFF mesh: inside, outside or surface.
    Locate {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Grid columns per axis; chosen from the mesh size when omitted.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Report edges of an OFF mesh with odd triangle incidence.
    Validate {
        #[arg(long)]
        mesh: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn parse(path: &Path, e: ParseError) -> Failure {
        Failure::Usage(format!("{}:{}: {}", path.display(), e.line, e.message))
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Failure {
        Failure::Domain(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn measures_plain(m: &UnionMeasures) -> String {
    format!("volume={} area={} edge={}", m.volume, m.area, m.edge_length)
}

fn measures_json(m: &UnionMeasures) -> Value {
    json!({ "volume": rational(&m.volume), "area": rational(&m.area), "edge": rational(&m.edge_length) })
}

fn lines(items: impl IntoIterator<Item = &'static str>) -> String {
    items.into_iter().fold(String::new(), |mut out, s| {
        out.push_str(s);
        out.push('\n');
        out
    })
}

fn load_mesh(path: &Path) -> Result<TriMesh, Failure> {
    let (vertices, faces) = parse_off(&read(path)?).map_err(|e| Failure::parse(path, e))?;
    Ok(TriMesh::new(&vertices, faces)?)
}

fn run(command: &Command, format: Format) -> Result<String, Failure> {
    let json = format == Format::Json;
    match command {
        Command::Pip { polygon, points } => {
            let verts = parse_points2(&read(polygon)?).map_err(|e| Failure::parse(polygon, e))?;
            let queries = parse_points2(&read(points)?).map_err(|e| Failure::parse(points, e))?;
            let poly = Polygon::from_points(&verts)?;
            let labels: Vec<&str> = classify_points(&poly, &queries)?.into_iter().map(|c| c.as_str()).collect();
            Ok(if json { json!({ "results": labels }).to_string() + "\n" } else { lines(labels) })
        }
        Command::PolylineX { a, b } => {
            let la = parse_polylines(&read(a)?).map_err(|e| Failure::parse(a, e))?;
            let lb = parse_polylines(&read(b)?).map_err(|e| Failure::parse(b, e))?;
            // Vertices are numbered across both files in order.
            let mut next = 0;
            let mut build = |raw: &Vec<[Rational; 2]>| -> Result<Polyline, GeomError> {
                let line = Polyline::from_points(raw, next)?;
                next += line.vertices().len();
                Ok(line)
            };
            let la: Vec<Polyline> = la.iter().map(&mut build).collect::<Result<_, _>>()?;
            let lb: Vec<Polyline> = lb.iter().map(&mut build).collect::<Result<_, _>>()?;
            let mut total = 0;
            for x in &la {
                for y in &lb {
                    total += polyline_intersection_count(x, y)?;
                }
            }
            Ok(if json { json!({ "count": total }).to_string() + "\n" } else { format!("{total}\n") })
        }
        Command::Cubes { file, oracle } => {
            let (side, lows) = parse_cubes(&read(file)?).map_err(|e| Failure::parse(file, e))?;
            let set = CubeSet::new(side, lows)?;
            let m = union_measures(&set)?;
            let reference = oracle.then(|| compressed_cell_oracle(&set));
            if json {
                let mut out = measures_json(&m);
                if let Some(r) = &reference {
                    out["oracle"] = measures_json(r);
                    out["match"] = Value::Bool(*r == m);
                }
                Ok(out.to_string() + "\n")
            } else {
                let mut out = measures_plain(&m) + "\n";
                if let Some(r) = &reference {
                    let _ = writeln!(out, "oracle {}", measures_plain(r));
                    let _ = writeln!(out, "match={}", *r == m);
                }
                Ok(out)
            }
        }
        Command::Locate { mesh, points, grid } => {
            let m = load_mesh(mesh)?;
            let queries = parse_points3(&read(points)?).map_err(|e| Failure::parse(points, e))?;
            let open = validate_watertight(&m);
            if !open.is_empty() {
                return Err(Failure::Domain(format!(
                    "{}: mesh is not watertight ({} edges with odd incidence)",
                    mesh.display(),
                    open.len()
                )));
            }
            let g = grid.unwrap_or_else(|| default_resolution(m.triangles().len()));
            let index = build_grid(&m, g)?;
            let labels: Vec<&str> = locate_points(&m, &index, &queries)?.into_iter().map(|r| r.as_str()).collect();
            Ok(if json { json!({ "results": labels }).to_string() + "\n" } else { lines(labels) })
        }
        Command::Validate { mesh } => {
            let m = load_mesh(mesh)?;
            let open = validate_watertight(&m);
            if json {
                let edges: Vec<Value> = open
                    .iter()
                    .map(|e| json!({ "a": e.a, "b": e.b, "incidence": e.incidence }))
                    .collect();
                Ok(json!({ "watertight": open.is_empty(), "violations": edges }).to_string() + "\n")
            } else if open.is_empty() {
                Ok("watertight\n".to_string())
            } else {
                let mut out = format!("not watertight: {} edges with odd incidence\n", open.len());
                for e in &open {
                    let _ = writeln!(out, "edge {} {} incidence={}", e.a, e.b, e.incidence);
                }
                Ok(out)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("sos: cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli.command, cli.format)) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("sos: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("sos: {msg}");
            ExitCode::from(1)
        }
    }
}
