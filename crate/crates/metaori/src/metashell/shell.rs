use super::contour::{solid_region, Field};
use super::{cell_divisions, levels, pattern_field, MetashellError, MetashellParams};
use crate::mechanics::beam::second_stable_stroke;
use crate::mesh::TriMesh;
use serde::Serialize;
use std::f64::consts::TAU;
use std::ops::Range;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetashellSolid {
    pub mesh: TriMesh,
    /// As printed (mm).
    pub open_height: f64,
    /// With every row at its closed stable state, or at its travel stop
    /// if that comes first (mm).
    pub closed_height: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Triangles of the inner skin.
    pub inner_faces: Range<usize>,
    /// Inner-skin vertex rings at the requested axial levels, counter-
    /// clockwise, each paired with its `z`.
    pub inner_rings: Vec<(f64, Vec<u32>)>,
    /// Angular position of the ring vertices.
    pub ring_angles: Vec<f64>,
}

impl MetashellSolid {
    pub fn ring_at(&self, z: f64) -> Option<&[u32]> {
        self.inner_rings.iter().find(|(zr, _)| (zr - z).abs() < 1e-9).map(|(_, ids)| ids.as_slice())
    }
}

pub fn assemble_metashell(params: &MetashellParams) -> Result<MetashellSolid, MetashellError> {
    assemble_metashell_with(params, &[])
}

/// Like [`assemble_metashell`], with extra axial levels at which the grid
/// places full vertex rings. Levels inside the solid end walls yield
/// complete rings, reported in `inner_rings` together with both ends.
pub fn assemble_metashell_with(
    params: &MetashellParams,
    ring_levels: &[f64],
) -> Result<MetashellSolid, MetashellError> {
    params.validate()?;
    params.check_geometry()?;
    let radius = params.mid_radius();
    if params.depth >= radius {
        return Err(MetashellError::WrapFailure { depth: params.depth, radius });
    }
    let height = params.overall_height();
    let n = cell_divisions(params);
    let nu = n * params.cols;
    let du = params.pitch() / n as f64;
    let local_u = |i: usize| ((i % n) as f64 - (n / 2) as f64) * du;

    let mut breaks: Vec<f64> = vec![params.wall_height, height - params.wall_height];
    for k in 0..params.rows {
        breaks.push(params.row_base(k));
        breaks.push(params.row_base(k) + params.row_height());
    }
    breaks.extend_from_slice(ring_levels);
    let vs = levels(0.0, height, params.mesh_size, &breaks);
    let field = Field::sample(nu, vs.len(), true, |i, j| pattern_field(params, local_u(i).abs(), vs[j]));
    let region = solid_region(&field);

    let ro = radius + 0.5 * params.depth;
    let ri = radius - 0.5 * params.depth;
    let angle = |fu: f64| TAU * fu / nu as f64;
    let z_of = |fv: f64| {
        let j = fv.floor() as usize;
        if fv == j as f64 {
            vs[j]
        } else {
            vs[j] + (fv - j as f64) * (vs[j + 1] - vs[j])
        }
    };
    let np = region.points.len();
    let mut vertices = Vec::with_capacity(2 * np);
    for rho in [ro, ri] {
        for g in &region.points {
            let (s, c) = angle(g.u).sin_cos();
            vertices.push([rho * c, rho * s, z_of(g.v)]);
        }
    }
    let shift = np as u32;
    let mut triangles = region.triangles.clone();
    let inner_start = triangles.len();
    triangles.extend(region.triangles.iter().map(|t| [t[0] + shift, t[2] + shift, t[1] + shift]));
    let inner_faces = inner_start..triangles.len();
    for (a, b) in region.boundary_edges() {
        triangles.push([b, a, a + shift]);
        triangles.push([b, a + shift, b + shift]);
    }

    let mut wanted: Vec<f64> = vec![0.0, height];
    wanted.extend(ring_levels.iter().copied().filter(|&z| z > 0.0 && z < height));
    let mut inner_rings = Vec::new();
    for z in wanted {
        let Some(j) = vs.iter().position(|&v| (v - z).abs() < 1e-9) else { continue };
        let ids: Option<Vec<u32>> = (0..nu).map(|i| region.node(nu, i, j).map(|id| id + shift)).collect();
        if let Some(ids) = ids {
            inner_rings.push((vs[j], ids));
        }
    }

    let stroke = second_stable_stroke(params).unwrap_or(f64::INFINITY).min(params.travel_stop());
    Ok(MetashellSolid {
        mesh: TriMesh::new(vertices, triangles),
        open_height: height,
        closed_height: height - params.rows as f64 * stroke,
        inner_radius: ri,
        outer_radius: ro,
        inner_faces,
        inner_rings,
        ring_angles: (0..nu).map(|i| angle(i as f64)).collect(),
    })
}
