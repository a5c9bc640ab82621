//! Merges the origami and the metashell into the monolithic actuator:
//! co-axial placement, inset lids and the pressure port.
//!
//! The parts meet on shared rings and coincident faces, so the union is
//! formed by stitching. Each lid is built as a closed solid whose faces
//! against the shell and the origami wall repeat theirs with opposite
//! winding; stitching then cancels those pairs.

use crate::geom::{self, P3};
use crate::kresling::{assemble_origami, thicken_faces, KreslingError, KreslingParams, OrigamiSolid};
use crate::mesh::{fan, zip_rings, Ring, TriMesh, WELD_TOL};
use crate::metashell::{assemble_metashell_with, MetashellError, MetashellParams, MetashellSolid};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrateError {
    #[error("invalid integration settings: {0}")]
    InvalidParams(String),
    #[error("origami does not fit the shell: {0}")]
    FitError(String),
    #[error("origami axis cannot be aligned with the shell axis: {0}")]
    AlignmentError(String),
    #[error(transparent)]
    Shell(#[from] MetashellError),
    #[error(transparent)]
    Origami(#[from] KreslingError),
}

/// Lid and port settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationParams {
    /// Bottom lid thickness (mm). The top lid takes up whatever height the
    /// origami leaves, and is at least this thick.
    pub lid_thickness: f64,
    /// Diameter of the port through the bottom lid (mm); 0 seals the
    /// cavity.
    pub port_diameter: f64,
    /// Smallest radial gap between the origami and the shell (mm).
    pub clearance: f64,
    /// Polygon sides of the port.
    pub port_segments: usize,
}

impl Default for IntegrationParams {
    fn default() -> Self {
        IntegrationParams { lid_thickness: 2.0, port_diameter: 4.0, clearance: 0.5, port_segments: 32 }
    }
}

impl IntegrationParams {
    pub fn validate(&self) -> Result<(), IntegrateError> {
        let bad = |m: String| Err(IntegrateError::InvalidParams(m));
        if !(self.lid_thickness.is_finite() && self.lid_thickness > 0.0) {
            return bad(format!("lid_thickness = {} must be positive", self.lid_thickness));
        }
        if !(self.port_diameter.is_finite() && self.port_diameter >= 0.0) {
            return bad(format!("port_diameter = {} must be non-negative", self.port_diameter));
        }
        if !(self.clearance.is_finite() && self.clearance >= 0.0) {
            return bad(format!("clearance = {} must be non-negative", self.clearance));
        }
        if self.port_segments < 3 {
            return bad(format!("port_segments = {} must be at least 3", self.port_segments));
        }
        Ok(())
    }
}

/// Axial extent of a lid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lid {
    pub z0: f64,
    pub z1: f64,
}

impl Lid {
    pub fn thickness(&self) -> f64 {
        self.z1 - self.z0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetaOriAssembly {
    pub shell: MetashellSolid,
    /// The origami as placed in the shell.
    pub origami: OrigamiSolid,
    pub bottom_lid: Lid,
    pub top_lid: Lid,
    pub port_diameter: f64,
    /// False for the sealed variant without a port.
    pub inflatable: bool,
    /// Closed lid solids, each sharing faces with the shell and the wall.
    pub lid_meshes: [TriMesh; 2],
    pub mesh: TriMesh,
}

impl MetaOriAssembly {
    /// Volume enclosed by the origami cavity (mm³).
    pub fn cavity_volume(&self) -> f64 {
        self.origami.cavity_mesh.signed_volume()
    }
}

/// Builds shell and origami from parameters and integrates them.
pub fn build_meta_ori(
    shell: &MetashellParams,
    origami: &KreslingParams,
    settings: &IntegrationParams,
) -> Result<MetaOriAssembly, IntegrateError> {
    settings.validate()?;
    let o = assemble_origami(origami)?;
    let solid = thicken_faces(&o.state, origami.t_face)?;
    let lid = settings.lid_thickness;
    let shell_solid = assemble_metashell_with(shell, &[lid, lid + solid.height()])?;
    integrate(&shell_solid, &solid, settings)
}

/// Places `origami` co-axially inside `shell` on a bottom lid, closes it
/// with a top lid and drills the port. The shell must carry inner vertex
/// rings at both lid faces; [`build_meta_ori`] arranges that.
pub fn integrate(
    shell: &MetashellSolid,
    origami: &OrigamiSolid,
    settings: &IntegrationParams,
) -> Result<MetaOriAssembly, IntegrateError> {
    settings.validate()?;
    let lid = settings.lid_thickness;
    let origami = align(origami, lid)?;

    let outer = origami.outer_radius();
    if outer + settings.clearance > shell.inner_radius {
        return Err(IntegrateError::FitError(format!(
            "origami radius {outer:.4} mm plus clearance {} mm exceeds the shell inner radius {:.4} mm",
            settings.clearance, shell.inner_radius
        )));
    }
    let top = lid + origami.height();
    if top + lid > shell.open_height + 1e-9 {
        return Err(IntegrateError::FitError(format!(
            "origami height {:.4} mm and two {lid} mm lids exceed the shell height {:.4} mm",
            origami.height(),
            shell.open_height
        )));
    }
    let ring = |z: f64| {
        shell.ring_at(z).ok_or_else(|| {
            IntegrateError::FitError(format!("lid face at z = {z:.4} mm does not meet a solid shell wall"))
        })
    };
    let h = shell.open_height;
    let (r0, r_bottom, r_top, r_h) = (ring(0.0)?, ring(lid)?, ring(top)?, ring(h)?);
    let inscribed = origami.bottom_inner.iter().map(|p| p[0].hypot(p[1])).fold(f64::INFINITY, f64::min)
        * (std::f64::consts::PI / origami.bottom_inner.len() as f64).cos();
    let port_r = 0.5 * settings.port_diameter;
    if port_r > 0.0 && port_r + settings.clearance >= inscribed {
        return Err(IntegrateError::FitError(format!(
            "port radius {port_r} mm does not fit inside the origami floor (inscribed radius {inscribed:.4} mm)"
        )));
    }

    let mut lids = LidBuilder { shell, mesh: TriMesh::default() };
    let bottom = lids.bottom(&origami, r0, r_bottom, lid, port_r, settings.port_segments);
    let top_mesh = lids.top(&origami, r_top, r_h, top, h);

    let mesh = TriMesh::stitch(&[&shell.mesh, &origami.wall_mesh, &bottom, &top_mesh]);
    Ok(MetaOriAssembly {
        shell: shell.clone(),
        origami,
        bottom_lid: Lid { z0: 0.0, z1: lid },
        top_lid: Lid { z0: top, z1: h },
        port_diameter: settings.port_diameter,
        inflatable: port_r > 0.0,
        lid_meshes: [bottom, top_mesh],
        mesh,
    })
}

/// Moves the origami so that its axis is the `z` axis and its bottom end
/// lies in the plane `z = base`.
fn align(origami: &OrigamiSolid, base: f64) -> Result<OrigamiSolid, IntegrateError> {
    let centroid = |ring: &[P3]| {
        if ring.len() < 3 {
            return None;
        }
        let s = ring.iter().fold([0.0; 3], |a, &p| geom::add(a, p));
        Some(geom::scale(s, 1.0 / ring.len() as f64))
    };
    let (Some(c0), Some(c1)) = (centroid(&origami.bottom_inner), centroid(&origami.top_inner)) else {
        return Err(IntegrateError::AlignmentError("end rings are missing".into()));
    };
    let axis = geom::sub(c1, c0);
    let len = geom::norm(axis);
    if !(len > 1e-9) {
        return Err(IntegrateError::AlignmentError("end rings coincide".into()));
    }
    let a = geom::scale(axis, 1.0 / len);
    let k = geom::cross(a, [0.0, 0.0, 1.0]);
    let (sin, cos) = (geom::norm(k), a[2]);
    let map = |p: P3| {
        let q = if sin > 1e-15 { geom::rotate_about(p, c0, k, sin.atan2(cos)) } else { p };
        [q[0] - c0[0], q[1] - c0[1], q[2] - c0[2] + base]
    };
    let mut out = origami.clone();
    for m in [&mut out.outer_mesh, &mut out.cavity_mesh, &mut out.wall_mesh, &mut out.bottom_band, &mut out.top_band] {
        m.map_vertices(map);
    }
    for r in [&mut out.bottom_outer, &mut out.bottom_inner, &mut out.top_outer, &mut out.top_inner] {
        r.iter_mut().for_each(|p| *p = map(*p));
    }
    let flat = |ring: &[P3], z: f64| ring.iter().all(|p| (p[2] - z).abs() < 1e-6);
    if !flat(&out.bottom_outer, base) || !flat(&out.bottom_inner, base) {
        return Err(IntegrateError::AlignmentError("bottom end is not perpendicular to the axis".into()));
    }
    let z_top = out.top_inner[0][2];
    if !flat(&out.top_outer, z_top) || !flat(&out.top_inner, z_top) {
        return Err(IntegrateError::AlignmentError("top end is not perpendicular to the axis".into()));
    }
    Ok(out)
}

struct LidBuilder<'a> {
    shell: &'a MetashellSolid,
    mesh: TriMesh,
}

impl LidBuilder<'_> {
    fn begin(&mut self) {
        self.mesh = TriMesh::default();
    }

    fn finish(&mut self) -> TriMesh {
        let mut m = std::mem::take(&mut self.mesh);
        m.weld(WELD_TOL);
        m
    }

    /// A copy of the shell's inner ring as a parametrized ring of this mesh.
    fn shell_ring(&mut self, ids: &[u32]) -> Ring {
        let base = self.mesh.vertices.len() as u32;
        for &i in ids {
            self.mesh.vertices.push(self.shell.mesh.vertices[i as usize]);
        }
        Ring::new((0..ids.len() as u32).map(|k| base + k).collect(), self.shell.ring_angles.clone())
    }

    fn ring(&mut self, pts: &[P3]) -> Ring {
        let base = self.mesh.vertices.len() as u32;
        self.mesh.vertices.extend_from_slice(pts);
        let params = pts.iter().map(|p| p[1].atan2(p[0]).rem_euclid(TAU)).collect();
        Ring::new((0..pts.len() as u32).map(|k| base + k).collect(), params)
    }

    fn circle(&mut self, r: f64, z: f64, n: usize) -> Ring {
        let pts: Vec<P3> = (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                [r * a.cos(), r * a.sin(), z]
            })
            .collect();
        self.ring(&pts)
    }

    /// The shell's inner skin between two levels, reversed.
    fn shell_band(&mut self, z0: f64, z1: f64) {
        let base = self.mesh.vertices.len() as u32;
        self.mesh.vertices.extend_from_slice(&self.shell.mesh.vertices);
        let v = &self.shell.mesh.vertices;
        for t in &self.shell.mesh.triangles[self.shell.inner_faces.clone()] {
            if t.iter().all(|&i| v[i as usize][2] >= z0 - 1e-9 && v[i as usize][2] <= z1 + 1e-9) {
                self.mesh.triangles.push([t[0] + base, t[2] + base, t[1] + base]);
            }
        }
    }

    /// An origami end band, reversed.
    fn wall_band(&mut self, band: &TriMesh) {
        let mut b = band.clone();
        b.flip();
        self.mesh.append(&b);
    }

    fn push(&mut self, tris: Vec<[u32; 3]>, flip: bool) {
        self.mesh.triangles.extend(tris.into_iter().map(|t| if flip { [t[0], t[2], t[1]] } else { t }));
    }

    fn bottom(&mut self, o: &OrigamiSolid, r0: &[u32], r1: &[u32], lid: f64, port_r: f64, segs: usize) -> TriMesh {
        self.begin();
        let floor = self.shell_ring(r0);
        let face = self.shell_ring(r1);
        let o_out = self.ring(&o.bottom_outer);
        let o_in = self.ring(&o.bottom_inner);
        self.shell_band(0.0, lid);
        self.wall_band(&o.bottom_band);
        let t = zip_rings(&o_out, &face);
        self.push(t, true);
        if port_r > 0.0 {
            let p0 = self.circle(port_r, 0.0, segs);
            let p1 = self.circle(port_r, lid, segs);
            let t = zip_rings(&p0, &floor);
            self.push(t, false);
            let t = zip_rings(&p1, &o_in);
            self.push(t, true);
            for i in 0..segs {
                let j = (i + 1) % segs;
                let (a, b, c, d) = (p0.ids[i], p0.ids[j], p1.ids[j], p1.ids[i]);
                self.mesh.triangles.push([a, c, b]);
                self.mesh.triangles.push([a, d, c]);
            }
        } else {
            let c0 = self.mesh.push_vertex([0.0, 0.0, 0.0]);
            let c1 = self.mesh.push_vertex([0.0, 0.0, lid]);
            self.push(fan(c0, &floor.ids), false);
            self.push(fan(c1, &o_in.ids), true);
        }
        self.finish()
    }

    fn top(&mut self, o: &OrigamiSolid, r0: &[u32], r1: &[u32], z0: f64, z1: f64) -> TriMesh {
        self.begin();
        let face = self.shell_ring(r0);
        let roof = self.shell_ring(r1);
        let o_out = self.ring(&o.top_outer);
        let o_in = self.ring(&o.top_inner);
        self.shell_band(z0, z1);
        self.wall_band(&o.top_band);
        let t = zip_rings(&o_out, &face);
        self.push(t, false);
        let c0 = self.mesh.push_vertex([0.0, 0.0, z0]);
        let c1 = self.mesh.push_vertex([0.0, 0.0, z1]);
        self.push(fan(c0, &o_in.ids), false);
        self.push(fan(c1, &roof.ids), true);
        self.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{validate_mesh, validate_mesh_with, ValidateOptions};

    fn origami() -> KreslingParams {
        KreslingParams::design(6, 15.0, 19.25, 20f64.to_radians(), 1.0, 1).unwrap()
    }

    #[test]
    fn lids_are_closed_solids() {
        let a = build_meta_ori(&MetashellParams::paper(), &origami(), &IntegrationParams::default()).unwrap();
        for lid in &a.lid_meshes {
            let r = validate_mesh_with(lid, ValidateOptions { self_intersections: false, ..Default::default() });
            assert!(r.is_valid(), "{:?}", r.problems());
        }
        assert!((a.top_lid.thickness() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn paper_assembly_is_watertight() {
        let p = MetashellParams::paper();
        let a = build_meta_ori(&p, &origami(), &IntegrationParams::default()).unwrap();
        let r = validate_mesh(&a.mesh);
        assert!(r.is_valid(), "{:?}", r.problems());
        let windows = (2 * p.cols * p.rows) as i64;
        assert_eq!(r.shells, 1);
        assert_eq!(r.euler_characteristic, 2 - 2 * windows);
        assert!(a.inflatable && a.cavity_volume() > 0.0);
    }

    #[test]
    fn sealed_variant_has_a_separate_cavity() {
        let p = MetashellParams::paper();
        let s = IntegrationParams { port_diameter: 0.0, ..Default::default() };
        let a = build_meta_ori(&p, &origami(), &s).unwrap();
        let r = validate_mesh_with(&a.mesh, ValidateOptions { self_intersections: false, ..Default::default() });
        assert!(r.is_valid(), "{:?}", r.problems());
        assert_eq!(r.shells, 2);
        let windows = (2 * p.cols * p.rows) as i64;
        assert_eq!(r.euler_characteristic, 4 - 2 * windows);
        assert!(!a.inflatable);
    }

    #[test]
    fn volumes_add_up() {
        let a = build_meta_ori(&MetashellParams::paper(), &origami(), &IntegrationParams::default()).unwrap();
        let parts = a.shell.mesh.signed_volume()
            + a.origami.wall_mesh.signed_volume()
            + a.lid_meshes.iter().map(TriMesh::signed_volume).sum::<f64>();
        let merged = a.mesh.signed_volume();
        assert!((merged - parts).abs() <= 1e-3 * merged, "{merged} vs {parts}");
    }

    #[test]
    fn wide_origami_does_not_fit() {
        let wide = KreslingParams::design(6, 19.0, 19.25, 20f64.to_radians(), 1.0, 1).unwrap();
        let r = build_meta_ori(&MetashellParams::paper(), &wide, &IntegrationParams::default());
        assert!(matches!(r, Err(IntegrateError::FitError(_))), "{r:?}");
    }

    #[test]
    fn tall_origami_does_not_fit() {
        let tall = KreslingParams::design(6, 15.0, 21.0, 20f64.to_radians(), 1.0, 1).unwrap();
        let r = build_meta_ori(&MetashellParams::paper(), &tall, &IntegrationParams::default());
        assert!(matches!(r, Err(IntegrateError::FitError(_))), "{r:?}");
    }
}
