//! Exact triangle–triangle intersection on top of adaptive-precision
//! orientation predicates. Triangles are treated as closed sets, so
//! touching counts as intersecting.

use crate::geom::P3;
use robust::{orient2d, orient3d, Coord, Coord3D};

#[inline]
fn c3(p: P3) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

#[inline]
fn o3(a: P3, b: P3, c: P3, d: P3) -> f64 {
    orient3d(c3(a), c3(b), c3(c), c3(d))
}

#[inline]
fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Does the closed segment `pq` meet the closed triangle `abc`? Assumes
/// the segment is not contained in the triangle's plane.
fn segment_hits_triangle(p: P3, q: P3, a: P3, b: P3, c: P3) -> bool {
    let sp = sgn(o3(a, b, c, p));
    let sq = sgn(o3(a, b, c, q));
    if sp == sq && sp != 0 {
        return false;
    }
    let s1 = sgn(o3(p, q, a, b));
    let s2 = sgn(o3(p, q, b, c));
    let s3 = sgn(o3(p, q, c, a));
    let has_pos = s1 > 0 || s2 > 0 || s3 > 0;
    let has_neg = s1 < 0 || s2 < 0 || s3 < 0;
    !(has_pos && has_neg)
}

fn project(p: P3, drop: usize) -> Coord<f64> {
    match drop {
        0 => Coord { x: p[1], y: p[2] },
        1 => Coord { x: p[2], y: p[0] },
        _ => Coord { x: p[0], y: p[1] },
    }
}

fn seg_seg_2d(p: Coord<f64>, q: Coord<f64>, r: Coord<f64>, s: Coord<f64>) -> bool {
    let d1 = sgn(orient2d(p, q, r));
    let d2 = sgn(orient2d(p, q, s));
    let d3 = sgn(orient2d(r, s, p));
    let d4 = sgn(orient2d(r, s, q));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    let on = |a: Coord<f64>, b: Coord<f64>, c: Coord<f64>| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    (d1 == 0 && on(p, q, r)) || (d2 == 0 && on(p, q, s)) || (d3 == 0 && on(r, s, p)) || (d4 == 0 && on(r, s, q))
}

fn point_in_tri_2d(p: Coord<f64>, a: Coord<f64>, b: Coord<f64>, c: Coord<f64>) -> bool {
    let s1 = sgn(orient2d(a, b, p));
    let s2 = sgn(orient2d(b, c, p));
    let s3 = sgn(orient2d(c, a, p));
    let has_pos = s1 > 0 || s2 > 0 || s3 > 0;
    let has_neg = s1 < 0 || s2 < 0 || s3 < 0;
    !(has_pos && has_neg)
}

fn coplanar_intersect(t1: [P3; 3], t2: [P3; 3]) -> bool {
    let n = crate::geom::tri_normal(t1[0], t1[1], t1[2]);
    let drop = (0..3).max_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs())).unwrap_or(2);
    let a: Vec<Coord<f64>> = t1.iter().map(|&p| project(p, drop)).collect();
    let b: Vec<Coord<f64>> = t2.iter().map(|&p| project(p, drop)).collect();
    for i in 0..3 {
        for j in 0..3 {
            if seg_seg_2d(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_tri_2d(a[0], b[0], b[1], b[2]) || point_in_tri_2d(b[0], a[0], a[1], a[2])
}

/// Exact intersection test for two closed triangles.
pub fn triangles_intersect(t1: [P3; 3], t2: [P3; 3]) -> bool {
    let d: Vec<i8> = t2.iter().map(|&p| sgn(o3(t1[0], t1[1], t1[2], p))).collect();
    if d.iter().all(|&s| s > 0) || d.iter().all(|&s| s < 0) {
        return false;
    }
    if d.iter().all(|&s| s == 0) {
        return coplanar_intersect(t1, t2);
    }
    let e: Vec<i8> = t1.iter().map(|&p| sgn(o3(t2[0], t2[1], t2[2], p))).collect();
    if e.iter().all(|&s| s > 0) || e.iter().all(|&s| s < 0) {
        return false;
    }
    for i in 0..3 {
        let (p, q) = (t1[i], t1[(i + 1) % 3]);
        if !(e[i] == 0 && e[(i + 1) % 3] == 0) && segment_hits_triangle(p, q, t2[0], t2[1], t2[2]) {
            return true;
        }
        let (p, q) = (t2[i], t2[(i + 1) % 3]);
        if !(d[i] == 0 && d[(i + 1) % 3] == 0) && segment_hits_triangle(p, q, t1[0], t1[1], t1[2]) {
            return true;
        }
    }
    // An edge lying in the other triangle's plane: test it in 2-D.
    for i in 0..3 {
        if e[i] == 0 && e[(i + 1) % 3] == 0 && coplanar_edge_hits(t1[i], t1[(i + 1) % 3], t2) {
            return true;
        }
        if d[i] == 0 && d[(i + 1) % 3] == 0 && coplanar_edge_hits(t2[i], t2[(i + 1) % 3], t1) {
            return true;
        }
    }
    false
}

fn coplanar_edge_hits(p: P3, q: P3, t: [P3; 3]) -> bool {
    let n = crate::geom::tri_normal(t[0], t[1], t[2]);
    let drop = (0..3).max_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs())).unwrap_or(2);
    let (pp, qq) = (project(p, drop), project(q, drop));
    let tt: Vec<Coord<f64>> = t.iter().map(|&x| project(x, drop)).collect();
    (0..3).any(|j| seg_seg_2d(pp, qq, tt[j], tt[(j + 1) % 3])) || point_in_tri_2d(pp, tt[0], tt[1], tt[2])
}
