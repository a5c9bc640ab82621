use super::{validate_mesh_with, MeshError, TriMesh, ValidateOptions};
use crate::geom;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormat {
    StlBinary,
    ObjAscii,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::StlBinary => "stl",
            MeshFormat::ObjAscii => "obj",
        }
    }
}

const STL_HEADER: &[u8] = b"metaori binary stl";

/// Serializes a mesh after checking it is closed, consistently wound and
/// encloses positive volume. The self-intersection scan is left to
/// `validate_mesh` since it dominates the cost on large meshes.
pub fn export_mesh(mesh: &TriMesh, format: MeshFormat) -> Result<Vec<u8>, MeshError> {
    if mesh.triangles.is_empty() {
        return Err(MeshError::EmptyMesh);
    }
    let report = validate_mesh_with(mesh, ValidateOptions { self_intersections: false, ..Default::default() });
    if !report.is_valid() {
        return Err(MeshError::InvalidMesh(report.problems().join("; ")));
    }
    Ok(match format {
        MeshFormat::StlBinary => write_stl(mesh),
        MeshFormat::ObjAscii => write_obj(mesh).into_bytes(),
    })
}

pub fn read_mesh(bytes: &[u8], format: MeshFormat) -> Result<TriMesh, MeshError> {
    match format {
        MeshFormat::StlBinary => read_stl(bytes),
        MeshFormat::ObjAscii => read_obj(bytes),
    }
}

fn write_stl(mesh: &TriMesh) -> Vec<u8> {
    let n = mesh.triangles.len();
    let mut out = Vec::with_capacity(84 + 50 * n);
    let mut header = [0u8; 80];
    header[..STL_HEADER.len()].copy_from_slice(STL_HEADER);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for i in 0..n {
        let tri = mesh.tri(i);
        // Normals come from the f32-rounded corners so that re-exporting a
        // read-back mesh reproduces the same bytes.
        let r: Vec<[f64; 3]> =
            tri.iter().map(|p| [p[0] as f32 as f64, p[1] as f32 as f64, p[2] as f32 as f64]).collect();
        let mut nrm = geom::normalize(geom::tri_normal(r[0], r[1], r[2]));
        if geom::norm(nrm) == 0.0 {
            nrm = geom::normalize(geom::tri_normal(tri[0], tri[1], tri[2]));
        }
        for c in nrm {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
        for p in &r {
            for &c in p {
                out.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

fn read_stl(bytes: &[u8]) -> Result<TriMesh, MeshError> {
    if bytes.len() < 84 {
        return Err(MeshError::TruncatedFile { expected: 84, found: bytes.len() });
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + 50 * n;
    if bytes.len() < expected {
        return Err(MeshError::TruncatedFile { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(MeshError::ParseError {
            offset: expected,
            line: None,
            message: format!("{} trailing bytes after {n} triangles", bytes.len() - expected),
        });
    }
    let f = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let mut mesh = TriMesh::default();
    let mut index: HashMap<[u32; 3], u32> = HashMap::new();
    for i in 0..n {
        let base = 84 + 50 * i;
        let mut tri = [0u32; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let off = base + 12 + 12 * k;
            let c = [f(off), f(off + 4), f(off + 8)];
            if c.iter().any(|x| !x.is_finite()) {
                return Err(MeshError::ParseError {
                    offset: off,
                    line: None,
                    message: "non-finite vertex coordinate".into(),
                });
            }
            let key = [c[0].to_bits(), c[1].to_bits(), c[2].to_bits()];
            *slot = *index.entry(key).or_insert_with(|| mesh.push_vertex([c[0] as f64, c[1] as f64, c[2] as f64]));
        }
        mesh.triangles.push(tri);
    }
    Ok(mesh)
}

fn write_obj(mesh: &TriMesh) -> String {
    let mut s = String::with_capacity(40 * (mesh.vertices.len() + mesh.triangles.len()));
    s.push_str("# metaori\n");
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {:?} {:?} {:?}", v[0], v[1], v[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

fn read_obj(bytes: &[u8]) -> Result<TriMesh, MeshError> {
    let text = std::str::from_utf8(bytes).map_err(|e| MeshError::ParseError {
        offset: e.valid_up_to(),
        line: None,
        message: "invalid UTF-8".into(),
    })?;
    let mut mesh = TriMesh::default();
    let mut faces: Vec<([i64; 3], usize, usize)> = Vec::new();
    let mut offset = 0;
    for (ln, raw) in text.split_inclusive('\n').enumerate() {
        let line_no = ln + 1;
        let line = raw.trim();
        let err = |m: String| MeshError::ParseError { offset, line: Some(line_no), message: m };
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for slot in c.iter_mut() {
                    let tok = it.next().ok_or_else(|| err("vertex needs 3 coordinates".into()))?;
                    *slot = tok.parse::<f64>().map_err(|_| err(format!("bad coordinate '{tok}'")))?;
                }
                mesh.vertices.push(c);
            }
            Some("f") => {
                let idx: Vec<i64> = it
                    .map(|tok| {
                        let head = tok.split('/').next().unwrap_or("");
                        head.parse::<i64>().map_err(|_| err(format!("bad index '{tok}'")))
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(err("face needs at least 3 vertices".into()));
                }
                let nv = mesh.vertices.len() as i64;
                let resolve = |i: i64| if i < 0 { nv + i + 1 } else { i };
                // Polygons are fanned from their first corner.
                for k in 1..idx.len() - 1 {
                    faces.push(([resolve(idx[0]), resolve(idx[k]), resolve(idx[k + 1])], line_no, offset));
                }
            }
            _ => {}
        }
        offset += raw.len();
    }
    let nv = mesh.vertices.len() as i64;
    for (f, line_no, off) in faces {
        let mut t = [0u32; 3];
        for k in 0..3 {
            if f[k] < 1 || f[k] > nv {
                return Err(MeshError::ParseError {
                    offset: off,
                    line: Some(line_no),
                    message: format!("vertex index {} out of range 1..={nv}", f[k]),
                });
            }
            t[k] = (f[k] - 1) as u32;
        }
        mesh.triangles.push(t);
    }
    Ok(mesh)
}
