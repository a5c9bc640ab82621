//! Bar-and-hinge reduction of one Kresling tier.

use crate::geom::{self, P3};
use crate::numeric::brent_minimize;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bar {
    pub nodes: [usize; 2],
    /// Rest length (mm).
    pub rest: f64,
    /// Axial stiffness `E·A/L0` (N/mm).
    pub k: f64,
}

/// Rotational spring on the crease `nodes[0]–nodes[1]` between the faces
/// whose third vertices are `nodes[2]` and `nodes[3]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hinge {
    pub nodes: [usize; 4],
    pub rest: f64,
    /// N·mm/rad.
    pub k: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrussModel {
    pub nodes: Vec<P3>,
    pub bars: Vec<Bar>,
    pub hinges: Vec<Hinge>,
    /// Closed facet set used for cavity volume.
    pub facets: Vec<[usize; 3]>,
}

impl TrussModel {
    /// Strain energy (N·mm) with nodes at `x`.
    pub fn energy_at(&self, x: &[P3]) -> f64 {
        let bars: f64 = self
            .bars
            .iter()
            .map(|b| {
                let d = geom::dist(x[b.nodes[0]], x[b.nodes[1]]) - b.rest;
                0.5 * b.k * d * d
            })
            .sum();
        let hinges: f64 = self
            .hinges
            .iter()
            .filter(|h| h.k != 0.0)
            .map(|h| {
                let [e0, e1, w1, w2] = h.nodes.map(|i| x[i]);
                let d = geom::dihedral(e0, e1, w1, w2) - h.rest;
                0.5 * h.k * d * d
            })
            .sum();
        bars + hinges
    }

    pub fn energy(&self) -> f64 {
        self.energy_at(&self.nodes)
    }

    pub fn scale_stiffness(&mut self, s: f64) {
        self.bars.iter_mut().for_each(|b| b.k *= s);
        self.hinges.iter_mut().for_each(|h| h.k *= s);
    }

    /// Signed volume enclosed by the facets at positions `x` (mm³).
    pub fn volume_at(&self, x: &[P3]) -> f64 {
        self.facets.iter().map(|f| geom::dot(x[f[0]], geom::cross(x[f[1]], x[f[2]]))).sum::<f64>() / 6.0
    }
}

/// Truss of one tier: regular `n`-gons of circumradius `radius` at `z = 0`
/// and `z = h`, the upper one turned by `phi`. Nodes `0..n` are the bottom
/// polygon and `n..2n` the top one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TierTruss {
    pub n: usize,
    pub radius: f64,
    pub model: TrussModel,
}

impl TierTruss {
    /// Builds the tier at its stress-free height `h0` and twist `phi0`,
    /// with bar stiffness `E·A/L0` and crease hinges of stiffness `hinge_k`.
    pub fn new(n: usize, radius: f64, h0: f64, phi0: f64, youngs_modulus: f64, bar_area: f64, hinge_k: f64) -> Self {
        let nodes = tier_nodes(n, radius, h0, phi0);
        let (b, t) = (|i: usize| i % n, |i: usize| n + i % n);
        let mut bars = Vec::with_capacity(4 * n);
        let mut push = |i: usize, j: usize| {
            let rest = geom::dist(nodes[i], nodes[j]);
            bars.push(Bar { nodes: [i, j], rest, k: youngs_modulus * bar_area / rest });
        };
        for i in 0..n {
            push(b(i), b(i + 1));
            push(t(i), t(i + 1));
            push(b(i), t(i + 1));
            push(b(i), t(i));
        }
        let mut hinges = Vec::with_capacity(2 * n);
        for i in 0..n {
            let a = [b(i), t(i + 1), b(i + 1), t(i)];
            let c = [b(i), t(i), t(i + 1), b(i + n - 1)];
            for h in [a, c] {
                let [e0, e1, w1, w2] = h.map(|k| nodes[k]);
                hinges.push(Hinge { nodes: h, rest: geom::dihedral(e0, e1, w1, w2), k: hinge_k });
            }
        }
        let mut facets = Vec::with_capacity(4 * n);
        for i in 0..n {
            facets.push([b(i), b(i + 1), t(i + 1)]);
            facets.push([b(i), t(i + 1), t(i)]);
        }
        for i in 1..n - 1 {
            facets.push([b(0), b(i + 1), b(i)]);
            facets.push([t(0), t(i), t(i + 1)]);
        }
        TierTruss { n, radius, model: TrussModel { nodes, bars, hinges, facets } }
    }

    pub fn nodes(&self, h: f64, phi: f64) -> Vec<P3> {
        tier_nodes(self.n, self.radius, h, phi)
    }

    pub fn energy(&self, h: f64, phi: f64) -> f64 {
        self.model.energy_at(&self.nodes(h, phi))
    }

    pub fn volume(&self, h: f64, phi: f64) -> f64 {
        self.model.volume_at(&self.nodes(h, phi))
    }

    /// Twists for which neither diagonal family crosses the polygon
    /// edges.
    pub fn twist_domain(&self) -> (f64, f64) {
        (0.0, PI - 2.0 * PI / self.n as f64)
    }

    /// Twist minimizing the tier energy at height `h`, and that energy.
    pub fn relax(&self, h: f64) -> (f64, f64) {
        const GRID: usize = 256;
        let (lo, hi) = self.twist_domain();
        let step = (hi - lo) / GRID as f64;
        let at = |k: usize| lo + step * (k as f64 + 0.5);
        let (best, _) = (0..GRID).map(|k| (k, self.energy(h, at(k)))).fold((0, f64::INFINITY), |acc, (k, e)| {
            if e < acc.1 {
                (k, e)
            } else {
                acc
            }
        });
        let a = if best == 0 { lo + 1e-12 } else { at(best - 1) };
        let b = if best + 1 == GRID { hi - 1e-12 } else { at(best + 1) };
        brent_minimize(|p| self.energy(h, p), a, b, 1e-12)
    }
}

pub fn tier_nodes(n: usize, radius: f64, h: f64, phi: f64) -> Vec<P3> {
    let step = 2.0 * PI / n as f64;
    let bottom = (0..n).map(|i| {
        let ang = step * i as f64;
        [radius * ang.cos(), radius * ang.sin(), 0.0]
    });
    let top = (0..n).map(|i| {
        let ang = step * i as f64 + phi;
        [radius * ang.cos(), radius * ang.sin(), h]
    });
    bottom.chain(top).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tier() -> TierTruss {
        TierTruss::new(6, 15.0, 19.25, 20f64.to_radians(), 12.0, 7.5, 0.0)
    }

    #[test]
    fn rest_state_is_stress_free() {
        let t = tier();
        assert!(t.model.energy() < 1e-20);
        let (phi, u) = t.relax(19.25);
        assert!((phi - 20f64.to_radians()).abs() < 1e-6, "{phi}");
        assert!(u < 1e-12);
    }

    #[test]
    fn prism_volume() {
        let t = TierTruss::new(6, 20.0, 10.0, 0.0, 1.0, 1.0, 0.0);
        let v = t.volume(10.0, 0.0);
        assert!((v - 1.5 * 3f64.sqrt() * 400.0 * 10.0).abs() < 1e-9);
    }

    #[test]
    fn stiffness_scaling_is_linear() {
        let mut t = tier();
        let e1 = t.energy(15.0, 0.5);
        t.model.scale_stiffness(2.0);
        assert!((t.energy(15.0, 0.5) - 2.0 * e1).abs() < 1e-12 * e1);
    }

    #[test]
    fn hinges_rest_at_build_geometry() {
        let t = TierTruss::new(6, 15.0, 19.25, 0.35, 12.0, 7.5, 3.0);
        assert!(t.model.energy() < 1e-20);
        assert!(t.energy(18.0, 0.35) > 0.0);
    }
}
