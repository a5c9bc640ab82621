//! Marching squares over a rectilinear grid, producing a triangulated
//! region `{f ≤ 0}`.

use std::collections::HashMap;

/// Scalar samples on an `nu × nv` node grid, row-major in `v`. With
/// `periodic` set, the last column connects back to the first.
pub(crate) struct Field {
    pub nu: usize,
    pub nv: usize,
    pub periodic: bool,
    pub values: Vec<f64>,
}

impl Field {
    pub fn sample(nu: usize, nv: usize, periodic: bool, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                values.push(f(i, j));
            }
        }
        Field { nu, nv, periodic, values }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nu + i % self.nu]
    }
}

/// A contour vertex in grid coordinates: fractional column and row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct GridPoint {
    pub u: f64,
    pub v: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Node(usize, usize),
    Horizontal(usize, usize),
    Vertical(usize, usize),
}

pub(crate) struct Region {
    pub points: Vec<GridPoint>,
    /// Counter-clockwise in `(u, v)`.
    pub triangles: Vec<[u32; 3]>,
    /// Vertex id of each used grid node, `u32::MAX` otherwise.
    pub node_ids: Vec<u32>,
}

impl Region {
    pub fn node(&self, nu: usize, i: usize, j: usize) -> Option<u32> {
        let id = self.node_ids[j * nu + i];
        (id != u32::MAX).then_some(id)
    }

    /// Directed edges used by exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<(u32, u32)> {
        let mut count: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut out = Vec::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if count[&(a.min(b), a.max(b))] == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

const MIN_FRACTION: f64 = 1e-3;

struct Builder<'a> {
    field: &'a Field,
    ids: HashMap<Key, u32>,
    points: Vec<GridPoint>,
    node_ids: Vec<u32>,
}

impl Builder<'_> {
    fn node(&mut self, i: usize, j: usize) -> u32 {
        let i = i % self.field.nu;
        let next = self.points.len() as u32;
        let id = *self.ids.entry(Key::Node(i, j)).or_insert(next);
        if id == next {
            self.points.push(GridPoint { u: i as f64, v: j as f64 });
            self.node_ids[j * self.field.nu + i] = id;
        }
        id
    }

    /// Crossing on the edge from node `(i, j)` to its neighbour in `u`
    /// (`horizontal`) or in `v`. Exact zeros snap to the node.
    fn crossing(&mut self, i: usize, j: usize, horizontal: bool) -> u32 {
        let i = i % self.field.nu;
        let (i2, j2) = if horizontal { (i + 1, j) } else { (i, j + 1) };
        let (fa, fb) = (self.field.at(i, j), self.field.at(i2, j2));
        if fa == 0.0 {
            return self.node(i, j);
        }
        if fb == 0.0 {
            return self.node(i2, j2);
        }
        let key = if horizontal { Key::Horizontal(i, j) } else { Key::Vertical(i, j) };
        let next = self.points.len() as u32;
        let id = *self.ids.entry(key).or_insert(next);
        if id == next {
            let tau = (fa / (fa - fb)).clamp(MIN_FRACTION, 1.0 - MIN_FRACTION);
            let p = if horizontal {
                GridPoint { u: i as f64 + tau, v: j as f64 }
            } else {
                GridPoint { u: i as f64, v: j as f64 + tau }
            };
            self.points.push(p);
        }
        id
    }
}

/// Triangulates `{f ≤ 0}`. Every cell contributes one convex polygon, or
/// two triangles for a saddle whose centre lies outside.
pub(crate) fn solid_region(field: &Field) -> Region {
    let mut b =
        Builder { field, ids: HashMap::new(), points: Vec::new(), node_ids: vec![u32::MAX; field.nu * field.nv] };
    let mut triangles = Vec::new();
    let cols = if field.periodic { field.nu } else { field.nu - 1 };
    let mut poly: Vec<u32> = Vec::with_capacity(8);
    for j in 0..field.nv - 1 {
        for i in 0..cols {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let f = corners.map(|(a, c)| field.at(a, c));
            let inside = f.map(|x| x <= 0.0);
            if !inside.iter().any(|&x| x) {
                continue;
            }
            // Edge k joins corner k to corner k + 1.
            let edge = |b: &mut Builder, k: usize| match k {
                0 => b.crossing(i, j, true),
                1 => b.crossing(i + 1, j, false),
                2 => b.crossing(i, j + 1, true),
                _ => b.crossing(i, j, false),
            };
            let saddle = inside[0] == inside[2] && inside[1] == inside[3] && inside[0] != inside[1];
            let centre_inside = f.iter().sum::<f64>() <= 0.0;
            if saddle && !centre_inside {
                let pairs: [(usize, usize, usize); 2] =
                    if inside[0] { [(0, 0, 3), (2, 2, 1)] } else { [(1, 1, 0), (3, 3, 2)] };
                for (c, e1, e2) in pairs {
                    let n = b.node(corners[c].0, corners[c].1);
                    let (p, q) = (edge(&mut b, e1), edge(&mut b, e2));
                    push_polygon(&mut triangles, &mut vec![n, p, q]);
                }
                continue;
            }
            poly.clear();
            for k in 0..4 {
                if inside[k] {
                    poly.push(b.node(corners[k].0, corners[k].1));
                }
                if inside[k] != inside[(k + 1) % 4] {
                    poly.push(edge(&mut b, k));
                }
            }
            push_polygon(&mut triangles, &mut poly);
        }
    }
    Region { points: b.points, triangles, node_ids: b.node_ids }
}

fn push_polygon(out: &mut Vec<[u32; 3]>, poly: &mut Vec<u32>) {
    poly.dedup();
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    for k in 1..poly.len().saturating_sub(1) {
        out.push([poly[0], poly[k], poly[k + 1]]);
    }
}
