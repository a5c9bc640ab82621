//! Plain `[f64; 3]` vector helpers used by the mesh and origami code.

pub type P3 = [f64; 3];

#[inline]
pub fn add(a: P3, b: P3) -> P3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: P3, b: P3) -> f64 {
    norm(sub(a, b))
}

pub fn normalize(a: P3) -> P3 {
    let n = norm(a);
    if n == 0.0 {
        a
    } else {
        scale(a, 1.0 / n)
    }
}

pub fn lerp(a: P3, b: P3, t: f64) -> P3 {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t]
}

/// Rotation of `p` about the line through `origin` with unit direction
/// `axis` by `angle` (right-hand rule), via Rodrigues' formula.
pub fn rotate_about(p: P3, origin: P3, axis: P3, angle: f64) -> P3 {
    let v = sub(p, origin);
    let (s, c) = angle.sin_cos();
    let k = axis;
    let kv = cross(k, v);
    let kdv = dot(k, v);
    let r = [
        v[0] * c + kv[0] * s + k[0] * kdv * (1.0 - c),
        v[1] * c + kv[1] * s + k[1] * kdv * (1.0 - c),
        v[2] * c + kv[2] * s + k[2] * kdv * (1.0 - c),
    ];
    add(origin, r)
}

/// Rotation about the z axis.
pub fn rot_z(p: P3, angle: f64) -> P3 {
    let (s, c) = angle.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

/// Twice the signed area normal of triangle (a, b, c).
pub fn tri_normal(a: P3, b: P3, c: P3) -> P3 {
    cross(sub(b, a), sub(c, a))
}

pub fn tri_area(a: P3, b: P3, c: P3) -> f64 {
    0.5 * norm(tri_normal(a, b, c))
}

/// Interior dihedral angle along edge (e0, e1) between triangles whose
/// third vertices are `w1` and `w2`. Returns π for coplanar unfolded wings.
pub fn dihedral(e0: P3, e1: P3, w1: P3, w2: P3) -> f64 {
    let e = normalize(sub(e1, e0));
    let u1 = sub(w1, e0);
    let u2 = sub(w2, e0);
    let p1 = sub(u1, scale(e, dot(u1, e)));
    let p2 = sub(u2, scale(e, dot(u2, e)));
    let c = dot(p1, p2);
    let s = dot(cross(p1, p2), e);
    s.abs().atan2(c)
}
