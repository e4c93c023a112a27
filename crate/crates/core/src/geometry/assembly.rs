use std::collections::HashMap;

use nalgebra::Matrix3;

use super::tube::Crease;
use super::{generate_tube, CreaseKind, GeometryError, TubeGeometry, TubeSpec};
use crate::mesh::{bounding_box, TriMesh};
use crate::Vec3;

/// Vertices closer than this are the same point, mm.
pub const MERGE_TOL: f64 = 1e-6;

/// Pneumatic channel a tube belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    /// Tubes with their axis along `z`.
    Direction1,
    /// Tubes with their axis along `x`.
    Direction2,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Direction1 => "direction-1",
            Channel::Direction2 => "direction-2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySpec {
    pub tube: TubeSpec,
    pub n_vertical: usize,
    /// Zero gives a bare stack of vertical tubes.
    pub n_horizontal: usize,
    /// Unit-cell repetitions along `x`, `y`, `z`.
    pub pattern: (usize, usize, usize),
}

impl AssemblySpec {
    pub fn validate(&self) -> Result<(), GeometryError> {
        self.tube.validate()?;
        let (nx, ny, nz) = self.pattern;
        if self.n_vertical == 0 || nx == 0 || ny == 0 || nz == 0 {
            return Err(GeometryError::DegenerateSpec("n_vertical and pattern counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// One placed copy of the base tube: `world = rotation * local + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeInstance {
    pub channel: Channel,
    pub rotation: Matrix3<f64>,
    pub offset: Vec3,
    /// Merged vertex id of every base-tube vertex.
    pub vertex_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyGeometry {
    pub base: TubeGeometry,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 4]>,
    /// Owning tube of every face. A wall shared by two tubes of the same
    /// channel is kept once, owned by the first tube.
    pub face_tube: Vec<usize>,
    pub tubes: Vec<TubeInstance>,
    pub creases: Vec<Crease>,
    /// Edges where two tubes disagree on the fold assignment. The first
    /// tube's assignment is kept in `creases`.
    pub ambiguous_creases: Vec<(usize, usize)>,
}

impl AssemblyGeometry {
    pub fn face_channel(&self, face: usize) -> Channel {
        self.tubes[self.face_tube[face]].channel
    }

    pub fn channel_faces(&self, channel: Channel) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.face_channel(f) == channel).collect()
    }

    fn place(&self, inst: &TubeInstance, p: &Vec3) -> Vec3 {
        inst.rotation * p + inst.offset
    }

    /// Closed, outward-oriented surface of tube `i` in world coordinates.
    pub fn tube_closed_mesh(&self, i: usize) -> TriMesh {
        let inst = &self.tubes[i];
        let mut m = self.base.closed_mesh();
        for v in m.vertices.iter_mut() {
            *v = self.place(inst, v);
        }
        m
    }

    /// Runs the merge pass again. A no-op on an already merged assembly.
    pub fn remerge(&self) -> AssemblyGeometry {
        let (vertices, map) = merge_coincident(&self.vertices, MERGE_TOL);
        let mut tubes = self.tubes.clone();
        for t in tubes.iter_mut() {
            for v in t.vertex_map.iter_mut() {
                *v = map[*v];
            }
        }
        let faces: Vec<[usize; 4]> = self.faces.iter().map(|f| f.map(|v| map[v])).collect();
        let creases: Vec<Crease> = self
            .creases
            .iter()
            .map(|c| {
                let (a, b) = (map[c.a], map[c.b]);
                Crease { a: a.min(b), b: a.max(b), kind: c.kind }
            })
            .collect();
        let mut out = collapse(self.base.clone(), vertices, tubes, faces, self.face_tube.clone(), creases);
        out.ambiguous_creases
            .extend(self.ambiguous_creases.iter().map(|&(a, b)| (map[a].min(map[b]), map[a].max(map[b]))));
        out.ambiguous_creases.sort_unstable();
        out.ambiguous_creases.dedup();
        out
    }
}

/// Merges points closer than `tol`. Returns the kept points (in first-seen
/// order) and the new index of every input point. Kept points are pairwise at
/// least `tol` apart, so a second pass is the identity.
pub fn merge_coincident(points: &[Vec3], tol: f64) -> (Vec<Vec3>, Vec<usize>) {
    let cell = |p: &Vec3| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64, (p.z / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut kept: Vec<Vec3> = Vec::new();
    let mut map = Vec::with_capacity(points.len());
    for p in points {
        let (cx, cy, cz) = cell(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        if let Some(&id) = ids.iter().find(|&&id| (kept[id] - p).norm() < tol) {
                            found = Some(id);
                            break 'search;
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            kept.push(*p);
            grid.entry((cx, cy, cz)).or_default().push(kept.len() - 1);
            kept.len() - 1
        });
        map.push(id);
    }
    (kept, map)
}

fn face_key(f: &[usize; 4]) -> [usize; 4] {
    let mut k = *f;
    k.sort_unstable();
    k
}

/// Drops duplicate faces within a channel and duplicate crease records.
fn collapse(
    base: TubeGeometry,
    vertices: Vec<Vec3>,
    tubes: Vec<TubeInstance>,
    faces: Vec<[usize; 4]>,
    face_tube: Vec<usize>,
    creases: Vec<Crease>,
) -> AssemblyGeometry {
    let mut seen = HashMap::new();
    let (mut out_faces, mut out_owner) = (Vec::new(), Vec::new());
    for (f, owner) in faces.into_iter().zip(face_tube) {
        let key = (tubes[owner].channel, face_key(&f));
        if seen.insert(key, ()).is_none() {
            out_faces.push(f);
            out_owner.push(owner);
        }
    }
    let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out_creases: Vec<Crease> = Vec::new();
    let mut ambiguous = Vec::new();
    for c in creases {
        match by_edge.get(&(c.a, c.b)) {
            Some(&i) => {
                let prev = &mut out_creases[i];
                if prev.kind == CreaseKind::Boundary {
                    prev.kind = c.kind;
                } else if c.kind != CreaseKind::Boundary && c.kind != prev.kind {
                    ambiguous.push((c.a, c.b));
                }
            }
            None => {
                by_edge.insert((c.a, c.b), out_creases.len());
                out_creases.push(c);
            }
        }
    }
    ambiguous.sort_unstable();
    ambiguous.dedup();
    AssemblyGeometry {
        base,
        vertices,
        faces: out_faces,
        face_tube: out_owner,
        tubes,
        creases: out_creases,
        ambiguous_creases: ambiguous,
    }
}

/// Column whose edge runs opposite to edge 0 with the same length: the wall
/// a stacked copy shares with its neighbour.
fn opposite_wall(tube: &TubeGeometry) -> Option<usize> {
    let e0 = tube.section.edge(0);
    (1..tube.ring_size()).find(|&j| (tube.section.edge(j) + e0).norm() < MERGE_TOL)
}

/// Checks that `a` and `b` (lists of world points) match pointwise as sets.
fn congruent(a: &[Vec3], b: &[Vec3]) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| (p - q).norm() < MERGE_TOL))
}

fn column_points(tube: &TubeGeometry, inst: (&Matrix3<f64>, &Vec3), col: usize) -> Vec<Vec3> {
    let ns = tube.ring_size();
    (0..tube.n_rings())
        .flat_map(|k| [k * ns + col, k * ns + (col + 1) % ns])
        .map(|i| inst.0 * tube.vertices[i] + inst.1)
        .collect()
}

/// Builds the two-channel lattice.
///
/// Vertical tubes (axis `z`) are stacked along `y`, each sharing its wall
/// opposite edge 0 with the next tube's edge-0 wall. Horizontal tubes (axis
/// `x`) are laid flat against the bottom and top of the stack in
/// alternation, their zigzag running along `z`. The resulting unit cell is
/// repeated by its bounding-box extents.
pub fn assemble_bidirectional(spec: &AssemblySpec) -> Result<AssemblyGeometry, GeometryError> {
    spec.validate()?;
    let base = generate_tube(&spec.tube)?;
    let id = Matrix3::identity();

    let mut placements: Vec<(Channel, Matrix3<f64>, Vec3)> = Vec::new();
    if spec.n_vertical > 1 || spec.n_horizontal > 0 {
        let wall = opposite_wall(&base).ok_or_else(|| {
            GeometryError::InterfaceMismatch(
                "cross-section has no single edge opposite edge 0 to share between stacked tubes".into(),
            )
        })?;
        let step = base.vertices[(wall + 1) % base.ring_size()];
        for i in 0..spec.n_vertical {
            placements.push((Channel::Direction1, id, step * i as f64));
        }
        for i in 1..spec.n_vertical {
            let (lo, hi) = (&placements[i - 1], &placements[i]);
            let a = column_points(&base, (&lo.1, &lo.2), wall);
            let b = column_points(&base, (&hi.1, &hi.2), 0);
            if !congruent(&a, &b) {
                return Err(GeometryError::InterfaceMismatch(format!(
                    "vertical tubes {} and {i} do not share a wall",
                    i - 1
                )));
            }
        }
        // local (zigzag, section height, axis) -> world (z, -y, x)
        let rot = Matrix3::new(0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0);
        let height = step.y;
        let top = height * spec.n_vertical as f64;
        for i in 0..spec.n_horizontal {
            let layer = (i / 2) as f64;
            let offset = if i % 2 == 0 {
                Vec3::new(0.0, -layer * height, 0.0)
            } else {
                Vec3::new(0.0, top + (layer + 1.0) * height, 0.0)
            };
            placements.push((Channel::Direction2, rot, offset));
        }
        check_horizontal_contacts(&base, &placements, wall, top)?;
    } else {
        placements.push((Channel::Direction1, id, Vec3::zeros()));
    }

    // unit cell repetition
    let cell_points: Vec<Vec3> =
        placements.iter().flat_map(|(_, r, o)| base.vertices.iter().map(move |p| r * p + o)).collect();
    let (lo, hi) = bounding_box(&cell_points).expect("non-empty tube");
    let ext = hi - lo;
    let (nx, ny, nz) = spec.pattern;
    let mut all = Vec::with_capacity(placements.len() * nx * ny * nz);
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                let shift = Vec3::new(ext.x * ix as f64, ext.y * iy as f64, ext.z * iz as f64);
                all.extend(placements.iter().map(|(c, r, o)| (*c, *r, o + shift)));
            }
        }
    }

    let nv = base.vertices.len();
    let raw: Vec<Vec3> = all.iter().flat_map(|(_, r, o)| base.vertices.iter().map(move |p| r * p + o)).collect();
    let (vertices, map) = merge_coincident(&raw, MERGE_TOL);
    let tubes: Vec<TubeInstance> = all
        .iter()
        .enumerate()
        .map(|(t, (c, r, o))| TubeInstance {
            channel: *c,
            rotation: *r,
            offset: *o,
            vertex_map: map[t * nv..(t + 1) * nv].to_vec(),
        })
        .collect();
    let mut faces = Vec::new();
    let mut owner = Vec::new();
    let mut creases = Vec::new();
    for (t, inst) in tubes.iter().enumerate() {
        faces.extend(base.faces.iter().map(|f| f.map(|v| inst.vertex_map[v])));
        owner.extend(std::iter::repeat_n(t, base.faces.len()));
        creases.extend(base.creases.iter().map(|c| {
            let (a, b) = (inst.vertex_map[c.a], inst.vertex_map[c.b]);
            Crease { a: a.min(b), b: a.max(b), kind: c.kind }
        }));
    }
    Ok(collapse(base, vertices, tubes, faces, owner, creases))
}

/// Horizontal tubes must lie flat against the stack: every vertex of their
/// contact wall on the stack's outer plane.
fn check_horizontal_contacts(
    base: &TubeGeometry,
    placements: &[(Channel, Matrix3<f64>, Vec3)],
    wall: usize,
    top: f64,
) -> Result<(), GeometryError> {
    let mut below = 0.0;
    let mut above = top;
    let height = top / placements.iter().filter(|p| p.0 == Channel::Direction1).count() as f64;
    for (i, (_, r, o)) in placements.iter().filter(|p| p.0 == Channel::Direction2).enumerate() {
        let (col, plane) = if i % 2 == 0 {
            let y = below;
            below -= height;
            (0, y)
        } else {
            let y = above;
            above += height;
            (wall, y)
        };
        let pts = column_points(base, (r, o), col);
        if let Some(p) = pts.iter().find(|p| (p.y - plane).abs() >= MERGE_TOL) {
            return Err(GeometryError::InterfaceMismatch(format!(
                "horizontal tube {i} leaves its contact plane y = {plane} at {p:?}"
            )));
        }
    }
    Ok(())
}
