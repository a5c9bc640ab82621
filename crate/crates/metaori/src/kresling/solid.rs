use super::{KreslingError, KreslingState};
use crate::geom::{self, P3};
use crate::mesh::{fan, intersecting_pairs, TriMesh};
use crate::par::Exec;
use serde::Serialize;
use std::collections::HashMap;

/// Thickened origami. `wall_mesh` is the printed sheet; `outer_mesh` and
/// `cavity_mesh` are its outer and inner skins closed by flat caps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrigamiSolid {
    pub outer_mesh: TriMesh,
    pub cavity_mesh: TriMesh,
    pub wall_mesh: TriMesh,
    /// End faces of the wall at `z = 0` and at the top, facing down and up.
    pub bottom_band: TriMesh,
    pub top_band: TriMesh,
    /// Offset rings in counter-clockwise order.
    pub bottom_outer: Vec<P3>,
    pub bottom_inner: Vec<P3>,
    pub top_outer: Vec<P3>,
    pub top_inner: Vec<P3>,
}

impl OrigamiSolid {
    /// Largest radius reached by the outer skin.
    pub fn outer_radius(&self) -> f64 {
        self.outer_mesh.vertices.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max)
    }

    pub fn height(&self) -> f64 {
        let (lo, hi) = self.wall_mesh.bbox();
        hi[2] - lo[2]
    }
}

struct Offsets {
    outer: Vec<P3>,
    inner: Vec<P3>,
    boundary: Vec<(u32, u32)>,
}

/// Offsets each vertex by `±t/2` along its averaged normal, stretched so
/// that the flattest incident face still clears `t/2`. Vertices for which
/// `flatten` returns true move horizontally only.
fn offsets(surface: &TriMesh, t: f64, flatten: impl Fn(P3) -> bool) -> Offsets {
    let nv = surface.vertices.len();
    let normals: Vec<P3> = surface.normals();
    let mut acc = vec![[0.0; 3]; nv];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (f, tri) in surface.triangles.iter().enumerate() {
        let w = geom::scale(normals[f], surface.area(f));
        for &v in tri {
            acc[v as usize] = geom::add(acc[v as usize], w);
            incident[v as usize].push(f);
        }
    }
    let mut outer = surface.vertices.clone();
    let mut inner = surface.vertices.clone();
    for v in 0..nv {
        if incident[v].is_empty() {
            continue;
        }
        let p = surface.vertices[v];
        let mut dir = geom::normalize(acc[v]);
        if flatten(p) {
            dir = geom::normalize([dir[0], dir[1], 0.0]);
        }
        let worst = incident[v].iter().map(|&f| geom::dot(dir, normals[f])).fold(f64::INFINITY, f64::min);
        let d = 0.5 * t / worst.max(0.2);
        outer[v] = geom::add(p, geom::scale(dir, d));
        inner[v] = geom::sub(p, geom::scale(dir, d));
    }
    let mut edges: HashMap<(u32, u32), i32> = HashMap::new();
    for tri in &surface.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut boundary = Vec::new();
    for tri in &surface.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if edges[&(a.min(b), a.max(b))] == 1 {
                boundary.push((a, b));
            }
        }
    }
    Offsets { outer, inner, boundary }
}

/// Side wall closing boundary edge `a → b` between the outer copy (ids as
/// in the surface) and the inner copy (ids shifted by `shift`).
fn side_wall(a: u32, b: u32, shift: u32) -> [[u32; 3]; 2] {
    [[b, a, a + shift], [b, a + shift, b + shift]]
}

/// Extrudes an open surface symmetrically by `t/2` to each side and closes
/// the rim with side walls.
pub fn thicken_surface(surface: &TriMesh, t: f64) -> Result<TriMesh, KreslingError> {
    if !(t > 0.0) {
        return Err(KreslingError::InvalidParams(format!("thickness {t} must be positive")));
    }
    let off = offsets(surface, t, |_| false);
    Ok(slab(surface, &off))
}

fn slab(surface: &TriMesh, off: &Offsets) -> TriMesh {
    let shift = surface.vertices.len() as u32;
    let mut m = TriMesh::new(off.outer.clone(), surface.triangles.clone());
    m.vertices.extend_from_slice(&off.inner);
    m.triangles.extend(surface.triangles.iter().map(|t| [t[0] + shift, t[2] + shift, t[1] + shift]));
    for &(a, b) in &off.boundary {
        m.triangles.extend(side_wall(a, b, shift));
    }
    m
}

/// Thickens the folded sheet of `state` into the printed wall and its
/// skins. End rings stay in their planes so that lids can sit flush.
pub fn thicken_faces(state: &KreslingState, t_face: f64) -> Result<OrigamiSolid, KreslingError> {
    if !(t_face > 0.0) {
        return Err(KreslingError::InvalidParams(format!("t_face {t_face} must be positive")));
    }
    let sheet = state.sheet();
    let top_z = state.total_height();
    let n = state.n;
    let tiers = state.tiers();
    let on_end = |p: P3| p[2] == 0.0 || p[2] == top_z;
    let off = offsets(&sheet, t_face, on_end);
    let wall = slab(&sheet, &off);

    let shift = sheet.vertices.len() as u32;
    let ring = |j: usize| -> Vec<u32> {
        let mut ids: Vec<u32> = (0..n).map(|i| (j * n + i) as u32).collect();
        if ring_area(&ids, &sheet.vertices) < 0.0 {
            ids[1..].reverse();
        }
        ids
    };
    let (bottom, top) = (ring(0), ring(tiers));
    let pick = |pts: &[P3], ids: &[u32]| ids.iter().map(|&i| pts[i as usize]).collect::<Vec<P3>>();

    let band = |up: bool| {
        let mut m = TriMesh::new(wall.vertices.clone(), Vec::new());
        for &(a, b) in &off.boundary {
            let z = sheet.vertices[a as usize][2];
            if (z == top_z) == up {
                m.triangles.extend(side_wall(a, b, shift));
            }
        }
        m.compact();
        m
    };

    let capped = |pts: &[P3]| {
        let mut m = TriMesh::new(pts.to_vec(), sheet.triangles.clone());
        for (ids, up) in [(&bottom, false), (&top, true)] {
            let z = sheet.vertices[ids[0] as usize][2];
            let c = m.push_vertex([0.0, 0.0, z]);
            let mut tris = fan(c, ids);
            if up {
                tris.iter_mut().for_each(|t| t.swap(1, 2));
            }
            m.triangles.extend(tris);
        }
        m
    };
    let outer_mesh = capped(&off.outer);
    let cavity_mesh = capped(&off.inner);

    let pairs = intersecting_pairs(&wall, Exec::default());
    if !pairs.is_empty() {
        return Err(KreslingError::SelfIntersection { pairs });
    }
    Ok(OrigamiSolid {
        bottom_band: band(false),
        top_band: band(true),
        bottom_outer: pick(&off.outer, &bottom),
        bottom_inner: pick(&off.inner, &bottom),
        top_outer: pick(&off.outer, &top),
        top_inner: pick(&off.inner, &top),
        outer_mesh,
        cavity_mesh,
        wall_mesh: wall,
    })
}

fn ring_area(ids: &[u32], pts: &[P3]) -> f64 {
    let mut s = 0.0;
    for k in 0..ids.len() {
        let p = pts[ids[k] as usize];
        let q = pts[ids[(k + 1) % ids.len()] as usize];
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s
}
