use super::{triangles_intersect, TriMesh};
use crate::geom::P3;
use crate::par::Exec;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Triangles with area below this are counted as degenerate (mm²).
pub const DEGENERATE_AREA: f64 = 1e-12;
/// Above this many intersecting pairs a mesh is rejected.
pub const MAX_SELF_INTERSECTIONS: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    pub self_intersections: bool,
    pub exec: Exec,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { self_intersections: true, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub vertex_count: usize,
    pub triangle_count: usize,
    pub edge_count: usize,
    /// Edges with a single incident triangle.
    pub boundary_edges: usize,
    /// Edges with three or more incident triangles.
    pub nonmanifold_edges: usize,
    /// Interior edges traversed in the same direction by both triangles.
    pub misoriented_edges: usize,
    pub degenerate_triangles: usize,
    /// `None` when the check was skipped.
    pub self_intersections: Option<usize>,
    pub signed_volume: f64,
    pub euler_characteristic: i64,
    /// Connected components (by shared vertices).
    pub shells: usize,
    pub closed_manifold: bool,
    pub winding_consistent: bool,
}

impl ValidityReport {
    /// Total genus implied by χ = 2·shells − 2·genus, for closed meshes.
    pub fn genus(&self) -> i64 {
        (2 * self.shells as i64 - self.euler_characteristic) / 2
    }

    /// Printable: closed, consistently wound, no degenerate faces, positive
    /// volume and few self-intersections.
    pub fn is_valid(&self) -> bool {
        self.closed_manifold
            && self.winding_consistent
            && self.degenerate_triangles == 0
            && self.signed_volume > 0.0
            && self.self_intersections.is_none_or(|n| n <= MAX_SELF_INTERSECTIONS)
    }

    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.triangle_count == 0 {
            p.push("no triangles".to_string());
        }
        if self.boundary_edges > 0 {
            p.push(format!("{} boundary edges", self.boundary_edges));
        }
        if self.nonmanifold_edges > 0 {
            p.push(format!("{} non-manifold edges", self.nonmanifold_edges));
        }
        if self.misoriented_edges > 0 {
            p.push(format!("{} edges with inconsistent winding", self.misoriented_edges));
        }
        if self.degenerate_triangles > 0 {
            p.push(format!("{} degenerate triangles", self.degenerate_triangles));
        }
        if self.signed_volume <= 0.0 {
            p.push(format!("non-positive volume {:.6e}", self.signed_volume));
        }
        if let Some(n) = self.self_intersections {
            if n > MAX_SELF_INTERSECTIONS {
                p.push(format!("{n} self-intersecting triangle pairs"));
            }
        }
        p
    }
}

pub fn validate_mesh(mesh: &TriMesh) -> ValidityReport {
    validate_mesh_with(mesh, ValidateOptions::default())
}

pub fn validate_mesh_with(mesh: &TriMesh, opts: ValidateOptions) -> ValidityReport {
    let mut edges: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let e = edges.entry((a.min(b), a.max(b))).or_insert((0, 0));
            if a < b {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    let mut boundary = 0;
    let mut nonmanifold = 0;
    let mut misoriented = 0;
    for &(f, r) in edges.values() {
        match f + r {
            1 => boundary += 1,
            2 => {
                if f != 1 {
                    misoriented += 1;
                }
            }
            _ => nonmanifold += 1,
        }
    }
    let degenerate = (0..mesh.triangles.len()).filter(|&i| mesh.area(i) <= DEGENERATE_AREA).count();

    let mut referenced = vec![false; mesh.vertices.len()];
    for t in &mesh.triangles {
        for &v in t {
            referenced[v as usize] = true;
        }
    }
    let nv = referenced.iter().filter(|&&r| r).count();
    let euler = nv as i64 - edges.len() as i64 + mesh.triangles.len() as i64;

    let shells = count_components(mesh, &referenced);
    let self_intersections =
        if opts.self_intersections { Some(count_self_intersections(mesh, opts.exec)) } else { None };

    ValidityReport {
        vertex_count: nv,
        triangle_count: mesh.triangles.len(),
        edge_count: edges.len(),
        boundary_edges: boundary,
        nonmanifold_edges: nonmanifold,
        misoriented_edges: misoriented,
        degenerate_triangles: degenerate,
        self_intersections,
        signed_volume: mesh.signed_volume(),
        euler_characteristic: euler,
        shells,
        closed_manifold: boundary == 0 && nonmanifold == 0 && !mesh.triangles.is_empty(),
        winding_consistent: misoriented == 0,
    }
}

fn count_components(mesh: &TriMesh, referenced: &[bool]) -> usize {
    let mut parent: Vec<u32> = (0..mesh.vertices.len() as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    for t in &mesh.triangles {
        for k in 1..3 {
            let a = find(&mut parent, t[0]);
            let b = find(&mut parent, t[k]);
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    (0..mesh.vertices.len()).filter(|&i| referenced[i] && find(&mut parent, i as u32) == i as u32).count()
}

/// Counts intersecting pairs of triangles that share no vertex.
pub fn count_self_intersections(mesh: &TriMesh, exec: Exec) -> usize {
    intersecting_pairs(mesh, exec).len()
}

/// Intersecting pairs `(i, j)` with `i < j`, sorted.
pub fn intersecting_pairs(mesh: &TriMesh, exec: Exec) -> Vec<(u32, u32)> {
    let n = mesh.triangles.len();
    if n < 2 {
        return Vec::new();
    }
    let boxes: Vec<(P3, P3)> = (0..n)
        .map(|i| {
            let [a, b, c] = mesh.tri(i);
            let lo = [a[0].min(b[0]).min(c[0]), a[1].min(b[1]).min(c[1]), a[2].min(b[2]).min(c[2])];
            let hi = [a[0].max(b[0]).max(c[0]), a[1].max(b[1]).max(c[1]), a[2].max(b[2]).max(c[2])];
            (lo, hi)
        })
        .collect();
    let mean_extent: f64 =
        boxes.iter().map(|(lo, hi)| (hi[0] - lo[0]).max(hi[1] - lo[1]).max(hi[2] - lo[2])).sum::<f64>() / n as f64;
    let cell = (2.0 * mean_extent).max(1e-9);
    let cell_of = |x: f64| (x / cell).floor() as i64;
    let range = |b: &(P3, P3)| -> ([i64; 3], [i64; 3]) {
        ([cell_of(b.0[0]), cell_of(b.0[1]), cell_of(b.0[2])], [cell_of(b.1[0]), cell_of(b.1[1]), cell_of(b.1[2])])
    };
    let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    for (i, b) in boxes.iter().enumerate() {
        let (lo, hi) = range(b);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    grid.entry([x, y, z]).or_default().push(i as u32);
                }
            }
        }
    }
    let overlaps = |a: &(P3, P3), b: &(P3, P3)| (0..3).all(|k| a.0[k] <= b.1[k] && b.0[k] <= a.1[k]);
    let per_tri: Vec<Vec<(u32, u32)>> = exec.map_range(n, |i| {
        let bi = &boxes[i];
        let (lo, hi) = range(bi);
        let ti = mesh.triangles[i];
        let pi = mesh.tri(i);
        let mut hits = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    let Some(list) = grid.get(&[x, y, z]) else { continue };
                    for &j in list {
                        let j = j as usize;
                        if j <= i {
                            continue;
                        }
                        let bj = &boxes[j];
                        if !overlaps(bi, bj) {
                            continue;
                        }
                        // Report each pair only from the first cell both share.
                        let (lj, _) = range(bj);
                        let first = [lo[0].max(lj[0]), lo[1].max(lj[1]), lo[2].max(lj[2])];
                        if first != [x, y, z] {
                            continue;
                        }
                        let tj = mesh.triangles[j];
                        if ti.iter().any(|v| tj.contains(v)) {
                            continue;
                        }
                        if triangles_intersect(pi, mesh.tri(j)) {
                            hits.push((i as u32, j as u32));
                        }
                    }
                }
            }
        }
        hits
    });
    per_tri.into_iter().flatten().collect()
}
