use std::collections::HashMap;

use super::section::{check_admissible, CrossSection, DEFAULT_LENGTH_TOL};
use super::{CreaseKind, GeometryError};
use crate::mesh::TriMesh;
use crate::{Vec2, Vec3};

/// Parameters of a single zigzag tube.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpec {
    pub cross_section: CrossSection,
    /// Projection angle between each zigzag segment and the tube axis, degrees.
    pub alpha_deg: f64,
    /// Length of one zigzag segment (the longitudinal panel edge), mm.
    pub unit_length: f64,
    /// Number of repeating units; each unit holds two zigzag segments.
    pub n_units: usize,
}

impl TubeSpec {
    pub const DEFAULT_ALPHA_DEG: f64 = 45.0;

    pub fn new(cross_section: CrossSection, alpha_deg: f64, unit_length: f64, n_units: usize) -> Self {
        Self { cross_section, alpha_deg, unit_length, n_units }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.alpha_deg > 0.0 && self.alpha_deg < 90.0) {
            return Err(GeometryError::DegenerateSpec(format!(
                "alpha must lie strictly inside (0°, 90°), got {}°",
                self.alpha_deg
            )));
        }
        if !(self.unit_length > 0.0 && self.unit_length.is_finite()) {
            return Err(GeometryError::DegenerateSpec(format!(
                "unit_length must be positive, got {}",
                self.unit_length
            )));
        }
        if self.n_units == 0 {
            return Err(GeometryError::DegenerateSpec("n_units must be at least 1".into()));
        }
        Ok(())
    }
}

/// A mesh edge with its fold assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crease {
    pub a: usize,
    pub b: usize,
    pub kind: CreaseKind,
}

/// Closed-form description of the rigid folding family of a tube.
///
/// Every section edge keeps its length and stays in a plane normal to the
/// axis. With `zeta` the fold coordinate, edge `j` is
/// `(p_j * sqrt(1 - zeta²), y_j(zeta), 0)` where `p_j` is its deployed
/// projection on the zigzag direction. Edges parallel to the zigzag direction
/// pick up `y = dir_j * zeta * |e_j|`; every other edge keeps the sign of its
/// deployed `y`. The zigzag segment is `L (±sinβ, 0, cosβ)` with
/// `sinβ = sin α / sqrt(1 - zeta²)`. Panel angles (`e_j · v`) are invariant
/// along the family, so all panels stay congruent parallelograms.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Kinematics {
    lengths: Vec<f64>,
    proj: Vec<f64>,
    /// `Some(dir)` for edges in the zigzag-direction group, else `None`.
    branch_dir: Vec<Option<f64>>,
    y_sign: Vec<f64>,
    sin_alpha: f64,
    unit_length: f64,
    n_segments: usize,
}

impl Kinematics {
    pub fn is_branch(&self, edge: usize) -> bool {
        self.branch_dir[edge].is_some()
    }

    /// Half-width of the fold coordinate range: `zeta ∈ [-cos α, cos α]`.
    pub fn zeta_max(&self) -> f64 {
        (1.0 - self.sin_alpha * self.sin_alpha).sqrt()
    }

    pub fn section_edges(&self, zeta: f64) -> Vec<Vec3> {
        let q = (1.0 - zeta * zeta).max(0.0).sqrt();
        (0..self.lengths.len())
            .map(|j| {
                let x = self.proj[j] * q;
                let y = match self.branch_dir[j] {
                    Some(dir) => dir * zeta * self.lengths[j],
                    None => self.y_sign[j] * (self.lengths[j] * self.lengths[j] - x * x).max(0.0).sqrt(),
                };
                Vec3::new(x, y, 0.0)
            })
            .collect()
    }

    /// Zigzag segment vectors `(+, -)`.
    pub fn segments(&self, zeta: f64) -> (Vec3, Vec3) {
        let q2 = (1.0 - zeta * zeta).max(f64::MIN_POSITIVE);
        let sin_b = (self.sin_alpha / q2.sqrt()).min(1.0);
        let cos_b = (1.0 - self.sin_alpha * self.sin_alpha / q2).max(0.0).sqrt();
        let l = self.unit_length;
        (Vec3::new(l * sin_b, 0.0, l * cos_b), Vec3::new(-l * sin_b, 0.0, l * cos_b))
    }

    pub fn positions(&self, zeta: f64) -> Vec<Vec3> {
        let edges = self.section_edges(zeta);
        let (vp, vm) = self.segments(zeta);
        let ns = edges.len();
        let mut ring0 = Vec::with_capacity(ns);
        let mut acc = Vec3::zeros();
        for e in &edges {
            ring0.push(acc);
            acc += e;
        }
        let mut out = Vec::with_capacity(ns * (self.n_segments + 1));
        let mut offset = Vec3::zeros();
        for k in 0..=self.n_segments {
            out.extend(ring0.iter().map(|p| p + offset));
            offset += if k % 2 == 0 { vp } else { vm };
        }
        out
    }
}

/// Deployed tube with its panels and tagged creases.
///
/// Vertex `(ring k, section vertex j)` lives at index `k * ring_size + j`.
/// The tube axis is `+z`, the zigzag runs along `x`, and the cross-section
/// (normalized to counter-clockwise order with edge 0 along `+x`) lies in
/// planes of constant `z`. Panel `(k, j)` is
/// `[ (k,j), (k,j+1), (k+1,j+1), (k+1,j) ]` with an outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeGeometry {
    pub spec: TubeSpec,
    /// Normalized cross-section used to build the tube.
    pub section: CrossSection,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 4]>,
    pub creases: Vec<Crease>,
    /// Axial distance between the two end rings, mm.
    pub deployed_length: f64,
    /// Creases whose panels are coplanar in the deployed state. Their
    /// assignment is the one taken on the `t < t_deployed` half of the motion
    /// and flips on the other half.
    pub branch_creases: Vec<usize>,
    /// Per panel: `true` if split along the `(k,j)-(k+1,j+1)` diagonal.
    pub(crate) split_main: Vec<bool>,
    pub(crate) kin: Kinematics,
}

impl TubeGeometry {
    pub fn ring_size(&self) -> usize {
        self.section.len()
    }

    pub fn n_rings(&self) -> usize {
        2 * self.spec.n_units + 1
    }

    pub fn vertex_index(&self, ring: usize, j: usize) -> usize {
        ring * self.ring_size() + (j % self.ring_size())
    }

    pub fn ring(&self, ring: usize) -> Vec<usize> {
        (0..self.ring_size()).map(|j| self.vertex_index(ring, j)).collect()
    }

    /// Creases that are neither boundary edges.
    pub fn interior_creases(&self) -> impl Iterator<Item = &Crease> {
        self.creases.iter().filter(|c| c.kind != CreaseKind::Boundary)
    }

    pub(crate) fn kinematics(&self) -> &Kinematics {
        &self.kin
    }

    /// Lateral surface triangulated along the stored diagonals.
    pub fn surface_triangles(&self) -> Vec<[usize; 3]> {
        let mut tris = Vec::with_capacity(self.faces.len() * 2);
        for (f, main) in self.faces.iter().zip(&self.split_main) {
            if *main {
                tris.push([f[0], f[1], f[2]]);
                tris.push([f[0], f[2], f[3]]);
            } else {
                tris.push([f[0], f[1], f[3]]);
                tris.push([f[1], f[2], f[3]]);
            }
        }
        tris
    }

    /// Open lateral surface of the deployed tube.
    pub fn surface_mesh(&self) -> TriMesh {
        TriMesh::new(self.vertices.clone(), self.surface_triangles())
    }

    /// Closed surface at arbitrary vertex positions: lateral panels plus a
    /// triangle fan from each end ring's centroid. Outward oriented.
    pub fn closed_mesh_at(&self, positions: &[Vec3]) -> TriMesh {
        let ns = self.ring_size();
        let mut verts = positions.to_vec();
        let mut tris = self.surface_triangles();
        let last = self.n_rings() - 1;
        for (ring, flip) in [(0, true), (last, false)] {
            let idx = self.ring(ring);
            let centroid = idx.iter().map(|&i| positions[i]).sum::<Vec3>() / ns as f64;
            let c = verts.len();
            verts.push(centroid);
            for j in 0..ns {
                let (a, b) = (idx[j], idx[(j + 1) % ns]);
                tris.push(if flip { [c, b, a] } else { [c, a, b] });
            }
        }
        TriMesh::new(verts, tris)
    }

    pub fn closed_mesh(&self) -> TriMesh {
        self.closed_mesh_at(&self.vertices)
    }

    /// All unique panel edges with their reference lengths.
    pub fn edge_lengths(&self) -> Vec<((usize, usize), f64)> {
        self.creases.iter().map(|c| ((c.a, c.b), (self.vertices[c.a] - self.vertices[c.b]).norm())).collect()
    }
}

/// Sweeps an admissible cross-section along a zigzag of `2 * n_units`
/// segments alternating at `±alpha` to the axis.
pub fn generate_tube(spec: &TubeSpec) -> Result<TubeGeometry, GeometryError> {
    spec.validate()?;
    let report = check_admissible(&spec.cross_section, DEFAULT_LENGTH_TOL)?;
    if !report.admissible {
        return Err(GeometryError::InadmissibleSection(report.violations));
    }

    let section = normalize_section(&spec.cross_section);
    let ns = section.len();
    let report = check_admissible(&section, DEFAULT_LENGTH_TOL)?;
    let branch_group = report.group_of(0).expect("edge 0 belongs to a group");

    let edges: Vec<Vec2> = section.edges().collect();
    let e0 = edges[0];
    let kin = Kinematics {
        lengths: edges.iter().map(|e| e.norm()).collect(),
        proj: edges.iter().map(|e| e.x).collect(),
        branch_dir: (0..ns)
            .map(|j| {
                (report.group_of(j) == Some(branch_group)).then(|| if edges[j].dot(&e0) > 0.0 { 1.0 } else { -1.0 })
            })
            .collect(),
        y_sign: edges.iter().map(|e| if e.y >= 0.0 { 1.0 } else { -1.0 }).collect(),
        sin_alpha: spec.alpha_deg.to_radians().sin(),
        unit_length: spec.unit_length,
        n_segments: 2 * spec.n_units,
    };
    let vertices = kin.positions(0.0);
    let n_rings = 2 * spec.n_units + 1;
    let deployed_length = vertices[(n_rings - 1) * ns].z - vertices[0].z;

    let mut faces = Vec::with_capacity(ns * (n_rings - 1));
    let mut split_main = Vec::with_capacity(faces.capacity());
    for k in 0..n_rings - 1 {
        for j in 0..ns {
            let f = [k * ns + j, k * ns + (j + 1) % ns, (k + 1) * ns + (j + 1) % ns, (k + 1) * ns + j];
            let d_main = (vertices[f[0]] - vertices[f[2]]).norm();
            let d_other = (vertices[f[1]] - vertices[f[3]]).norm();
            split_main.push(d_main <= d_other);
            faces.push(f);
        }
    }

    let mut tube = TubeGeometry {
        spec: spec.clone(),
        section,
        vertices,
        faces,
        creases: Vec::new(),
        deployed_length,
        branch_creases: Vec::new(),
        split_main,
        kin,
    };
    assign_creases(&mut tube);
    Ok(tube)
}

/// Counter-clockwise, vertex 0 at the origin, edge 0 along `+x`.
fn normalize_section(cs: &CrossSection) -> CrossSection {
    let ccw = cs.to_ccw();
    let origin = ccw.vertices()[0];
    let e0 = ccw.edge(0);
    let rot = nalgebra::Rotation2::new(-e0.y.atan2(e0.x));
    let mut verts: Vec<Vec2> = ccw.vertices().iter().map(|v| rot * (v - origin)).collect();
    verts[0] = Vec2::zeros();
    verts[1].y = 0.0;
    CrossSection::new(verts).expect("rigid motion preserves validity")
}

/// Edge-to-face incidence for quad faces. Keys are `(min, max)` vertex pairs.
pub(crate) fn edge_faces(faces: &[[usize; 4]]) -> Vec<((usize, usize), Vec<usize>)> {
    let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut order = Vec::new();
    for (fi, f) in faces.iter().enumerate() {
        for i in 0..4 {
            let (a, b) = (f[i], f[(i + 1) % 4]);
            let key = (a.min(b), a.max(b));
            map.entry(key)
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(fi);
        }
    }
    order
        .into_iter()
        .map(|k| {
            let v = map.remove(&k).unwrap();
            (k, v)
        })
        .collect()
}

/// Signed convexity of the edge `(a, b)` between two outward-oriented quads:
/// positive when the surface bends away from the outside (mountain seen
/// from outside), negative for a valley, ~0 when the panels are coplanar.
pub(crate) fn edge_convexity(positions: &[Vec3], f1: &[usize; 4], f2: &[usize; 4], a: usize, b: usize) -> f64 {
    let n1 = quad_normal(positions, f1);
    let wing = f2.iter().copied().filter(|&v| v != a && v != b).map(|v| positions[v]).sum::<Vec3>() / 2.0;
    -n1.dot(&(wing - positions[a]))
}

pub(crate) fn quad_normal(positions: &[Vec3], f: &[usize; 4]) -> Vec3 {
    let d1 = positions[f[2]] - positions[f[0]];
    let d2 = positions[f[3]] - positions[f[1]];
    d1.cross(&d2).normalize()
}

fn assign_creases(tube: &mut TubeGeometry) {
    let deployed = tube.vertices.clone();
    let half_branch = tube.kin.positions(-0.5 * tube.kin.zeta_max());
    let scale = tube.spec.unit_length.max(tube.section.perimeter());
    let flat_tol = 1e-9 * scale;

    let mut creases = Vec::new();
    let mut branch = Vec::new();
    for ((a, b), fs) in edge_faces(&tube.faces) {
        let kind = if fs.len() == 1 {
            CreaseKind::Boundary
        } else {
            let (f1, f2) = (&tube.faces[fs[0]], &tube.faces[fs[1]]);
            let mut conv = edge_convexity(&deployed, f1, f2, a, b);
            if conv.abs() <= flat_tol {
                branch.push(creases.len());
                conv = edge_convexity(&half_branch, f1, f2, a, b);
            }
            if conv > 0.0 {
                CreaseKind::Mountain
            } else {
                CreaseKind::Valley
            }
        };
        creases.push(Crease { a, b, kind });
    }
    tube.creases = creases;
    tube.branch_creases = branch;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_quad_section;

    fn square_tube(n_units: usize) -> TubeGeometry {
        let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).unwrap();
        generate_tube(&TubeSpec::new(cs, 45.0, 15.0, n_units)).unwrap()
    }

    /// Deployed length by direct construction of the two zigzag segments.
    fn oracle_length(l: f64, alpha_deg: f64, n_units: usize) -> f64 {
        let a = alpha_deg.to_radians();
        let up = Vec3::new(l * a.sin(), 0.0, l * a.cos());
        let down = Vec3::new(-l * a.sin(), 0.0, l * a.cos());
        let axis = Vec3::z();
        n_units as f64 * (up + down).dot(&axis)
    }

    #[test]
    fn single_unit_square_tube() {
        let t = square_tube(1);
        assert_eq!(t.faces.len(), 8);
        assert_eq!(t.vertices.len(), 12);
        assert!((t.deployed_length - oracle_length(15.0, 45.0, 1)).abs() < 1e-12);
        assert!((t.deployed_length - 21.213203435596427).abs() < 1e-9);
    }

    #[test]
    fn length_is_additive_over_units() {
        let one = square_tube(1).deployed_length;
        let three = square_tube(3);
        assert_eq!(three.faces.len(), 24);
        assert!((three.deployed_length - 3.0 * one).abs() < 1e-12);
    }

    #[test]
    fn alpha_bounds_rejected() {
        let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).unwrap();
        for alpha in [0.0, 90.0, 120.0] {
            assert!(matches!(
                generate_tube(&TubeSpec::new(cs.clone(), alpha, 15.0, 1)),
                Err(GeometryError::DegenerateSpec(_))
            ));
        }
        assert!(matches!(
            generate_tube(&TubeSpec::new(cs.clone(), 45.0, 15.0, 0)),
            Err(GeometryError::DegenerateSpec(_))
        ));
    }

    #[test]
    fn inadmissible_section_rejected() {
        let kite = CrossSection::from_points(&[(0., 0.), (2., 0.), (3., 2.), (0., 1.)]).unwrap();
        assert!(matches!(
            generate_tube(&TubeSpec::new(kite, 45.0, 15.0, 1)),
            Err(GeometryError::InadmissibleSection(_))
        ));
    }

    #[test]
    fn panels_are_planar_parallelograms() {
        let cs = make_quad_section(12.0, 9.0, 20.0, 75.0).unwrap();
        let t = generate_tube(&TubeSpec::new(cs, 35.0, 11.0, 2)).unwrap();
        for f in &t.faces {
            let p: Vec<Vec3> = f.iter().map(|&i| t.vertices[i]).collect();
            // opposite sides equal as vectors
            assert!(((p[1] - p[0]) - (p[2] - p[3])).norm() < 1e-12);
            assert!(((p[3] - p[0]) - (p[2] - p[1])).norm() < 1e-12);
            let n = (p[1] - p[0]).cross(&(p[3] - p[0])).normalize();
            assert!(n.dot(&(p[2] - p[0])).abs() < 1e-9);
        }
    }

    #[test]
    fn interior_edges_shared_by_two_faces() {
        let t = square_tube(2);
        for (_, fs) in edge_faces(&t.faces) {
            assert!(fs.len() == 1 || fs.len() == 2);
        }
        let boundary = t.creases.iter().filter(|c| c.kind == CreaseKind::Boundary).count();
        assert_eq!(boundary, 8);
        // 4 longitudinal per segment + 4 per interior ring
        assert_eq!(t.interior_creases().count(), 4 * 4 + 4 * 3);
    }

    #[test]
    fn ring_creases_alternate_per_ring() {
        let t = square_tube(2);
        let ns = t.ring_size();
        // Non-branch ring crease on section edge 1 at rings 1, 2, 3.
        let kinds: Vec<CreaseKind> = (1..4)
            .map(|k| {
                let (a, b) = (t.vertex_index(k, 1), t.vertex_index(k, 2));
                t.creases.iter().find(|c| (c.a, c.b) == (a.min(b), a.max(b))).unwrap().kind
            })
            .collect();
        assert_ne!(kinds[0], kinds[1]);
        assert_eq!(kinds[0], kinds[2]);
        // Square section: edges 0 and 2 lie along the zigzag, their ring
        // creases are flat at deployment.
        assert_eq!(t.branch_creases.len(), 2 * 3);
        // Longitudinal creases of a convex section are all mountains.
        for k in 0..4 {
            for j in 0..ns {
                let (a, b) = (t.vertex_index(k, j), t.vertex_index(k + 1, j));
                let c = t.creases.iter().find(|c| (c.a, c.b) == (a.min(b), a.max(b))).unwrap();
                assert_eq!(c.kind, CreaseKind::Mountain);
            }
        }
    }

    #[test]
    fn closed_mesh_is_watertight_and_outward() {
        let t = square_tube(1);
        let m = t.closed_mesh();
        assert!(m.is_watertight());
        let v = m.signed_volume();
        // section area times axial length
        assert!((v - 225.0 * t.deployed_length).abs() < 1e-9, "{v}");
    }
}
