use std::collections::{HashMap, HashSet};

use super::energy::fold_angle;
use super::StructuralError;
use crate::geometry::TubeGeometry;
use crate::material::OgdenParams;
use crate::Vec3;

/// Panel thickness used when none is configured, mm.
pub const DEFAULT_THICKNESS_MM: f64 = 1.0;
/// Creases are this much softer than panel bending per unit length.
pub const DEFAULT_CREASE_SCALE: f64 = 0.01;
/// Incompressible material.
pub const POISSON_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarKind {
    /// Lies on an edge of an original panel.
    Edge,
    /// Runs through the inside of a panel.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub a: usize,
    pub b: usize,
    pub rest_length: f64,
    /// Axial stiffness, N/mm.
    pub stiffness: f64,
    pub kind: BarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HingeKind {
    Crease,
    Panel,
}

/// Reflection `p[axis] -> 2 * offset - p[axis]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mirror {
    pub axis: usize,
    pub offset: f64,
}

impl Mirror {
    pub fn apply(&self, mut p: Vec3) -> Vec3 {
        p[self.axis] = 2.0 * self.offset - p[self.axis];
        p
    }
}

/// Rotational spring about the edge `nodes[1]-nodes[2]`, with wings
/// `nodes[0]` and `nodes[3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hinge {
    pub nodes: [usize; 4],
    pub rest_angle: f64,
    /// N·mm/rad.
    pub stiffness: f64,
    pub kind: HingeKind,
    /// If set, the second wing is the mirror image of `nodes[3]` rather than
    /// the node itself. Used by symmetry-reduced models.
    pub mirrored_wing: Option<Mirror>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Triangulation {
    /// One diagonal per panel, the same split the tube uses for export.
    #[default]
    Diagonal,
    /// Each panel refined 2×2 with all diagonals meeting at the panel
    /// centre. Invariant under every mirror symmetry of the tube.
    UnionJack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarHingeModel {
    /// Reference positions, mm.
    pub nodes: Vec<Vec3>,
    pub bars: Vec<Bar>,
    pub hinges: Vec<Hinge>,
    pub triangles: Vec<[usize; 3]>,
    /// Nodes on the first and last cross-section ring.
    pub end_rings: [Vec<usize>; 2],
    /// Unit tube axis.
    pub axis: Vec3,
}

impl BarHingeModel {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn bar_count(&self, kind: BarKind) -> usize {
        self.bars.iter().filter(|b| b.kind == kind).count()
    }

    pub fn hinge_count(&self, kind: HingeKind) -> usize {
        self.hinges.iter().filter(|h| h.kind == kind).count()
    }
}

/// Single-diagonal model of `tube`.
pub fn build_bar_hinge(
    tube: &TubeGeometry,
    material: &OgdenParams,
    thickness: f64,
    crease_scale: f64,
) -> Result<BarHingeModel, StructuralError> {
    build_bar_hinge_with(tube, material, thickness, crease_scale, Triangulation::Diagonal)
}

pub fn build_bar_hinge_with(
    tube: &TubeGeometry,
    material: &OgdenParams,
    thickness: f64,
    crease_scale: f64,
    triangulation: Triangulation,
) -> Result<BarHingeModel, StructuralError> {
    if !(material.mu1 > 0.0 && material.mu1.is_finite()) {
        return Err(StructuralError::InvalidMaterial(format!(
            "shear modulus must be positive, got {} Pa",
            material.mu1
        )));
    }
    if !(crease_scale > 0.0 && crease_scale <= 1.0) {
        return Err(StructuralError::InvalidMaterial(format!(
            "crease stiffness scale must lie in (0, 1], got {crease_scale}"
        )));
    }
    if !(thickness > 0.0 && thickness.is_finite()) {
        return Err(StructuralError::InvalidParameter(format!("thickness must be positive, got {thickness} mm")));
    }
    let mesh = match triangulation {
        Triangulation::Diagonal => diagonal_mesh(tube),
        Triangulation::UnionJack => union_jack_mesh(tube),
    };
    // N/mm² from Pa
    let modulus = material.initial_modulus() * 1e-6;
    Ok(assemble(mesh, modulus, thickness, crease_scale))
}

struct PanelMesh {
    nodes: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    /// Triangle edges lying on original panel edges.
    panel_edges: HashSet<(usize, usize)>,
    end_rings: [Vec<usize>; 2],
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn diagonal_mesh(tube: &TubeGeometry) -> PanelMesh {
    let mut panel_edges = HashSet::new();
    for f in &tube.faces {
        for i in 0..4 {
            panel_edges.insert(key(f[i], f[(i + 1) % 4]));
        }
    }
    PanelMesh {
        nodes: tube.vertices.clone(),
        triangles: tube.surface_triangles(),
        panel_edges,
        end_rings: [tube.ring(0), tube.ring(tube.n_rings() - 1)],
    }
}

fn union_jack_mesh(tube: &TubeGeometry) -> PanelMesh {
    let mut nodes = tube.vertices.clone();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |nodes: &mut Vec<Vec3>, a: usize, b: usize| -> usize {
        *midpoint.entry(key(a, b)).or_insert_with(|| {
            nodes.push(0.5 * (nodes[a] + nodes[b]));
            nodes.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(tube.faces.len() * 8);
    let mut panel_edges = HashSet::new();
    let mut ring_mid: Vec<(usize, usize, usize)> = Vec::new();
    for f in &tube.faces {
        let m: Vec<usize> = (0..4).map(|i| mid(&mut nodes, f[i], f[(i + 1) % 4])).collect();
        for i in 0..4 {
            ring_mid.push((f[i], f[(i + 1) % 4], m[i]));
        }
        let centre = f.iter().map(|&v| tube.vertices[v]).sum::<Vec3>() / 4.0;
        nodes.push(centre);
        let c = nodes.len() - 1;
        for i in 0..4 {
            let prev = m[(i + 3) % 4];
            triangles.push([f[i], m[i], c]);
            triangles.push([f[i], c, prev]);
            panel_edges.insert(key(f[i], m[i]));
            panel_edges.insert(key(f[i], prev));
        }
    }
    let mut end_rings = [tube.ring(0), tube.ring(tube.n_rings() - 1)];
    for ring in end_rings.iter_mut() {
        let corners = ring.clone();
        for &(a, b, m) in &ring_mid {
            if corners.contains(&a) && corners.contains(&b) && !ring.contains(&m) {
                ring.push(m);
            }
        }
    }
    PanelMesh { nodes, triangles, panel_edges, end_rings }
}

fn triangle_area(nodes: &[Vec3], t: &[usize; 3]) -> f64 {
    0.5 * (nodes[t[1]] - nodes[t[0]]).cross(&(nodes[t[2]] - nodes[t[0]])).norm()
}

/// Edges in order of first appearance with their adjacent triangles.
pub(crate) fn edge_triangles(triangles: &[[usize; 3]]) -> Vec<((usize, usize), Vec<usize>)> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out: Vec<((usize, usize), Vec<usize>)> = Vec::new();
    for (ti, t) in triangles.iter().enumerate() {
        for i in 0..3 {
            let k = key(t[i], t[(i + 1) % 3]);
            let slot = *index.entry(k).or_insert_with(|| {
                out.push((k, Vec::new()));
                out.len() - 1
            });
            out[slot].1.push(ti);
        }
    }
    out
}

/// The vertex of `t` that is neither `a` nor `b`, and whether `t` runs
/// `a -> b` in its winding.
fn wing(t: &[usize; 3], a: usize, b: usize) -> (usize, bool) {
    let w = t.iter().copied().find(|&v| v != a && v != b).expect("edge of triangle");
    let forward = (0..3).any(|i| t[i] == a && t[(i + 1) % 3] == b);
    (w, forward)
}

fn assemble(mesh: PanelMesh, modulus: f64, thickness: f64, crease_scale: f64) -> BarHingeModel {
    let nodes = &mesh.nodes;
    let areas: Vec<f64> = mesh.triangles.iter().map(|t| triangle_area(nodes, t)).collect();
    let plate = modulus * thickness.powi(3) / (12.0 * (1.0 - POISSON_RATIO * POISSON_RATIO));
    let mut bars = Vec::new();
    let mut hinges = Vec::new();
    for ((a, b), tris) in edge_triangles(&mesh.triangles) {
        let length = (nodes[b] - nodes[a]).norm();
        // each triangle lends a third of its volume to each of its edges
        let volume = thickness * tris.iter().map(|&t| areas[t] / 3.0).sum::<f64>();
        let on_panel_edge = mesh.panel_edges.contains(&(a, b));
        bars.push(Bar {
            a,
            b,
            rest_length: length,
            stiffness: modulus * volume / (length * length),
            kind: if on_panel_edge { BarKind::Edge } else { BarKind::Diagonal },
        });
        if tris.len() != 2 {
            continue;
        }
        let (t1, t2) = (&mesh.triangles[tris[0]], &mesh.triangles[tris[1]]);
        let (w1, fwd) = wing(t1, a, b);
        let (p, q) = if fwd { (a, b) } else { (b, a) };
        let (w2, _) = wing(t2, a, b);
        let hinge_nodes = [w1, p, q, w2];
        let altitude = (areas[tris[0]] + areas[tris[1]]) / length;
        let kind = if on_panel_edge { HingeKind::Crease } else { HingeKind::Panel };
        let scale = if kind == HingeKind::Crease { crease_scale } else { 1.0 };
        let positions = hinge_nodes.map(|i| nodes[i]);
        hinges.push(Hinge {
            nodes: hinge_nodes,
            rest_angle: fold_angle(&positions),
            stiffness: scale * plate * length / altitude,
            kind,
            mirrored_wing: None,
        });
    }
    BarHingeModel {
        bars,
        hinges,
        triangles: mesh.triangles,
        end_rings: mesh.end_rings,
        axis: Vec3::z(),
        nodes: mesh.nodes,
    }
}
