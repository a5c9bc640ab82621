//! Indexed triangle meshes: construction helpers, welding, stitching,
//! validation and file formats.

mod io;
mod tritri;
mod validate;

pub use io::{export_mesh, read_mesh, MeshFormat};
pub use tritri::triangles_intersect;
pub use validate::{
    count_self_intersections, intersecting_pairs, validate_mesh, validate_mesh_with, ValidateOptions, ValidityReport,
    MAX_SELF_INTERSECTIONS,
};

use crate::geom::{self, P3};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Vertex merge tolerance in millimetres.
pub const WELD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("mesh failed validation: {0}")]
    InvalidMesh(String),
    #[error("parse error at byte {offset}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    ParseError { offset: usize, line: Option<usize>, message: String },
    #[error("truncated file: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<P3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<P3>, triangles: Vec<[u32; 3]>) -> Self {
        TriMesh { vertices, triangles }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn push_vertex(&mut self, p: P3) -> u32 {
        self.vertices.push(p);
        (self.vertices.len() - 1) as u32
    }

    pub fn tri(&self, i: usize) -> [P3; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    /// Unit outward normal of triangle `i` (zero for degenerate triangles).
    pub fn normal(&self, i: usize) -> P3 {
        let [a, b, c] = self.tri(i);
        geom::normalize(geom::tri_normal(a, b, c))
    }

    pub fn normals(&self) -> Vec<P3> {
        (0..self.triangles.len()).map(|i| self.normal(i)).collect()
    }

    pub fn area(&self, i: usize) -> f64 {
        let [a, b, c] = self.tri(i);
        geom::tri_area(a, b, c)
    }

    /// Signed enclosed volume by the divergence theorem (mm³).
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0] as usize];
                let b = self.vertices[t[1] as usize];
                let c = self.vertices[t[2] as usize];
                geom::dot(a, geom::cross(b, c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn bbox(&self) -> (P3, P3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Appends `other`, offsetting its indices.
    pub fn append(&mut self, other: &TriMesh) {
        let off = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
    }

    /// Reverses the orientation of every triangle.
    pub fn flip(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }

    pub fn map_vertices<F: Fn(P3) -> P3>(&mut self, f: F) {
        for v in &mut self.vertices {
            *v = f(*v);
        }
    }

    /// Merges vertices closer than `tol`, keeping the first occurrence as
    /// representative, and drops unreferenced vertices.
    pub fn weld(&mut self, tol: f64) {
        let cell = 4.0 * tol;
        let key = |p: P3| -> [i64; 3] {
            [(p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64, (p[2] / cell).floor() as i64]
        };
        let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        let mut remap = vec![0u32; self.vertices.len()];
        let mut out: Vec<P3> = Vec::with_capacity(self.vertices.len());
        let mut used = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &v in t {
                used[v as usize] = true;
            }
        }
        for (i, &p) in self.vertices.iter().enumerate() {
            if !used[i] {
                continue;
            }
            let k = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                            for &j in list {
                                if geom::dist(out[j as usize], p) <= tol {
                                    found = Some(j);
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
            let idx = match found {
                Some(j) => j,
                None => {
                    out.push(p);
                    let j = (out.len() - 1) as u32;
                    grid.entry(k).or_default().push(j);
                    j
                }
            };
            remap[i] = idx;
        }
        for t in &mut self.triangles {
            for v in t.iter_mut() {
                *v = remap[*v as usize];
            }
        }
        self.vertices = out;
    }

    /// Drops vertices no triangle references, keeping order.
    pub fn compact(&mut self) {
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut out = Vec::new();
        for t in &mut self.triangles {
            for v in t.iter_mut() {
                let r = &mut remap[*v as usize];
                if *r == u32::MAX {
                    *r = out.len() as u32;
                    out.push(self.vertices[*v as usize]);
                }
                *v = *r;
            }
        }
        self.vertices = out;
    }

    /// Removes pairs of coincident triangles with opposite orientation.
    /// This is how touching contact faces of welded components disappear
    /// when parts are stitched together.
    pub fn cancel_opposite_pairs(&mut self) -> usize {
        fn canon(t: [u32; 3]) -> ([u32; 3], bool) {
            // Rotate so the smallest index comes first; the parity of the
            // remaining two tells the orientation.
            let m = (0..3).min_by_key(|&i| t[i]).unwrap();
            let r = [t[m], t[(m + 1) % 3], t[(m + 2) % 3]];
            if r[1] < r[2] {
                (r, true)
            } else {
                ([r[0], r[2], r[1]], false)
            }
        }
        let mut by_key: HashMap<[u32; 3], (Vec<usize>, Vec<usize>)> = HashMap::new();
        for (i, &t) in self.triangles.iter().enumerate() {
            let (k, pos) = canon(t);
            let e = by_key.entry(k).or_default();
            if pos {
                e.0.push(i);
            } else {
                e.1.push(i);
            }
        }
        let mut drop = vec![false; self.triangles.len()];
        let mut removed = 0;
        for (pos, neg) in by_key.values() {
            for (&a, &b) in pos.iter().zip(neg.iter()) {
                drop[a] = true;
                drop[b] = true;
                removed += 2;
            }
        }
        let mut i = 0;
        self.triangles.retain(|_| {
            let keep = !drop[i];
            i += 1;
            keep
        });
        removed
    }

    /// Drops triangles with zero area in index space (repeated vertex).
    pub fn remove_collapsed(&mut self) {
        self.triangles.retain(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
    }

    /// Welds, then cancels touching opposite faces.
    pub fn stitch(parts: &[&TriMesh]) -> TriMesh {
        let mut m = TriMesh::default();
        for p in parts {
            m.append(p);
        }
        m.weld(WELD_TOL);
        m.remove_collapsed();
        m.cancel_opposite_pairs();
        m.weld(WELD_TOL);
        m
    }

    /// Axis-aligned unit cube [0,1]³ with outward winding.
    pub fn unit_cube() -> TriMesh {
        let v = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let t = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        TriMesh::new(v, t)
    }

    /// Closed prism over a convex or star-shaped polygon given
    /// counter-clockwise in the xy plane, spanning z ∈ [z0, z1].
    pub fn prism(polygon: &[[f64; 2]], z0: f64, z1: f64) -> TriMesh {
        let n = polygon.len() as u32;
        let mut m = TriMesh::default();
        for p in polygon {
            m.vertices.push([p[0], p[1], z0]);
        }
        for p in polygon {
            m.vertices.push([p[0], p[1], z1]);
        }
        let (cx, cy) = polygon.iter().fold((0.0, 0.0), |a, p| (a.0 + p[0], a.1 + p[1]));
        let c0 = m.push_vertex([cx / n as f64, cy / n as f64, z0]);
        let c1 = m.push_vertex([cx / n as f64, cy / n as f64, z1]);
        for i in 0..n {
            let j = (i + 1) % n;
            m.triangles.push([c0, j, i]);
            m.triangles.push([c1, n + i, n + j]);
            m.triangles.push([i, j, n + j]);
            m.triangles.push([i, n + j, n + i]);
        }
        m
    }
}

/// A closed vertex loop with an angular parameter per vertex (ascending,
/// within one turn), used to triangulate bands between rings.
#[derive(Clone, Debug)]
pub struct Ring {
    pub ids: Vec<u32>,
    pub params: Vec<f64>,
}

impl Ring {
    pub fn new(ids: Vec<u32>, params: Vec<f64>) -> Self {
        assert_eq!(ids.len(), params.len());
        Ring { ids, params }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Triangulates the band between two closed rings by merging their
/// angular parameters. Triangles are wound a→a'→b / a→b'→b so that, for an
/// inner ring `a` and outer ring `b` ordered counter-clockwise about +z, the
/// normals point towards −z.
pub fn zip_rings(a: &Ring, b: &Ring) -> Vec<[u32; 3]> {
    use std::f64::consts::TAU;
    let na = a.len();
    let nb = b.len();
    let mut out = Vec::with_capacity(na + nb);
    let a0 = a.params[0];
    // Start b at the vertex angularly closest to a[0].
    let jb = (0..nb)
        .min_by(|&x, &y| ang_diff(b.params[x], a0).abs().total_cmp(&ang_diff(b.params[y], a0).abs()))
        .unwrap_or(0);
    let b0 = a0 + ang_diff(b.params[jb], a0);
    let pa = |i: usize| if i >= na { a0 + TAU } else { a0 + (a.params[i] - a0).rem_euclid(TAU) };
    let pb = |k: usize| {
        if k >= nb {
            b0 + TAU
        } else {
            b0 + (b.params[(jb + k) % nb] - b.params[jb]).rem_euclid(TAU)
        }
    };
    let (mut i, mut k) = (0usize, 0usize);
    while i < na || k < nb {
        let ai = a.ids[i % na];
        let bk = b.ids[(jb + k) % nb];
        let adv_a = if i == na {
            false
        } else if k == nb {
            true
        } else {
            pa(i + 1) <= pb(k + 1)
        };
        if adv_a {
            out.push([ai, a.ids[(i + 1) % na], bk]);
            i += 1;
        } else {
            out.push([ai, b.ids[(jb + k + 1) % nb], bk]);
            k += 1;
        }
    }
    out
}

fn ang_diff(x: f64, y: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut d = (x - y) % TAU;
    if d > PI {
        d -= TAU;
    }
    if d < -PI {
        d += TAU;
    }
    d
}

/// Fan triangulation of a closed ring around an extra centre vertex,
/// wound so the normal points towards −z for a counter-clockwise ring.
pub fn fan(center: u32, ring: &[u32]) -> Vec<[u32; 3]> {
    let n = ring.len();
    (0..n).map(|i| [center, ring[(i + 1) % n], ring[i]]).collect()
}
