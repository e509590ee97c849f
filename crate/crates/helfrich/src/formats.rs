//! OBJ meshes and polylines, CSV tables.
//!
//! Reals in CSV files are written with 17 significant digits, so they read
//! back bit for bit.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use helfrich_core::curve::SampledCurve;
use helfrich_core::delaunay::DelaunayProfile;
use helfrich_core::flow::FlowTrace;
use helfrich_core::geometry::CurvatureField;
use helfrich_core::mesh::TriMesh;
use helfrich_core::Vec3;

use crate::error::{CliError, Result};

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

pub fn write_obj<W: Write>(mesh: &TriMesh, mut w: W) -> std::io::Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", real(v.x), real(v.y), real(v.z))?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()
}

pub fn save_obj(mesh: &TriMesh, path: &Path) -> Result<()> {
    write_obj(mesh, create(path)?).map_err(|e| CliError::io(path, e))
}

/// Reads `v` and `f` records. Polygons are fanned into triangles, texture and
/// normal indices are dropped, negative indices count from the end.
pub fn read_obj<R: Read>(r: R, path: &Path) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in BufReader::new(r).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let bad = |what: &str| CliError::format(path, format!("line {}: {what}", n + 1));
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let c: Vec<f64> = tok.take(3).map(|t| t.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad vertex"))?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tok {
                    let i: i64 = t.split('/').next().unwrap_or("").parse().map_err(|_| bad("bad face index"))?;
                    let i = if i < 0 { vertices.len() as i64 + i } else { i - 1 };
                    if i < 0 || i as usize >= vertices.len() {
                        return Err(bad("face index out of range"));
                    }
                    idx.push(i as usize);
                }
                if idx.len() < 3 {
                    return Err(bad("face needs three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriMesh::new(vertices, faces)?)
}

pub fn load_obj(path: &Path) -> Result<TriMesh> {
    read_obj(open(path)?, path)
}

/// Curve as `v` records and a single `l` element, closed curves returning to
/// their first vertex.
pub fn save_polyline_obj(curve: &SampledCurve, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let n = curve.distinct_len();
    let body = (|| {
        for p in &curve.points[..n] {
            writeln!(w, "v {} {} {}", real(p.x), real(p.y), real(p.z))?;
        }
        let mut ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        if curve.closed {
            ids.push("1".into());
        }
        writeln!(w, "l {}", ids.join(" "))?;
        w.flush()
    })();
    body.map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::format(path, e.to_string())
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `s,x,y,z,kappa,tau`, one row per stored sample.
pub fn save_curve_csv(curve: &SampledCurve, path: &Path) -> Result<()> {
    let rows = (0..curve.len()).map(|i| {
        let p = curve.points[i];
        let s = i as f64 * curve.arclength_step;
        vec![real(s), real(p.x), real(p.y), real(p.z), real(curve.kappa[i]), real(curve.tau[i])]
    });
    write_rows(path, &["s", "x", "y", "z", "kappa", "tau"], rows)
}

/// Positions from a curve CSV. Only the `x,y,z` columns are used; Frenet data
/// is recomputed from them.
pub fn read_curve_points<R: Read>(r: R, path: &Path) -> Result<Vec<Vec3>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers().map_err(|e| csv_err(path, e))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| CliError::format(path, format!("missing column {name}")))
    };
    let (ix, iy, iz) = (col("x")?, col("y")?, col("z")?);
    let mut out = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| CliError::format(path, format!("row {}: bad number", n + 2)))
        };
        out.push(Vec3::new(get(ix)?, get(iy)?, get(iz)?));
    }
    Ok(out)
}

/// Closed curve from a curve CSV.
pub fn load_closed_curve(path: &Path) -> Result<SampledCurve> {
    let points = read_curve_points(open(path)?, path)?;
    Ok(SampledCurve::from_points(&points, true)?)
}

/// `u,r,z,w`.
pub fn save_profile_csv(profile: &DelaunayProfile, path: &Path) -> Result<()> {
    let rows = profile.samples.iter().map(|s| vec![real(s.u), real(s.r), real(s.z), real(s.w)]);
    write_rows(path, &["u", "r", "z", "w"], rows)
}

/// `vertex_index,H,K_defect`. Boundary vertices carry their extrapolated `H`
/// and the boundary defect `π - Σθ`.
pub fn save_vertex_csv(field: &CurvatureField, path: &Path) -> Result<()> {
    let rows = (0..field.mean.len()).map(|i| vec![i.to_string(), real(field.mean[i]), real(field.defects[i])]);
    write_rows(path, &["vertex_index", "H", "K_defect"], rows)
}

/// `iter,maxH,maxdisp,area`.
pub fn save_trace_csv(trace: &FlowTrace, path: &Path) -> Result<()> {
    let rows = trace.steps.iter().map(|s| {
        vec![s.iteration.to_string(), real(s.max_h_deviation), real(s.max_displacement), real(s.area)]
    });
    write_rows(path, &["iter", "maxH", "maxdisp", "area"], rows)
}

pub fn save_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::format(path, e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}
