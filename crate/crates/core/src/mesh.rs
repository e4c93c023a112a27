//! Triangle meshes with volume and watertightness checks.

use std::collections::HashMap;

use crate::Vec3;

/// Indexed triangle mesh, mm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        Self { vertices, triangles }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let t = self.triangles[i];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    /// Unit normal by the right-hand rule; zero for degenerate triangles.
    pub fn normal(&self, i: usize) -> Vec3 {
        let [a, b, c] = self.triangle(i);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vec3::zeros()
        }
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    /// Divergence-theorem volume: `Σ a · (b × c) / 6`. Positive for an
    /// outward-oriented closed surface.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Number of triangles using each undirected edge.
    pub fn edge_use_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Every edge bounds exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        !self.triangles.is_empty() && self.edge_use_counts().values().all(|&c| c == 2)
    }

    pub fn bounding_box(&self) -> Option<(Vec3, Vec3)> {
        bounding_box(&self.vertices)
    }

    /// Appends `other`, offsetting its indices.
    pub fn append(&mut self, other: &TriMesh) {
        let off = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
    }

    /// Closes every boundary loop with a triangle fan around the loop's
    /// centroid, keeping the orientation of the surrounding triangles.
    pub fn capped(&self) -> TriMesh {
        let mut directed = std::collections::HashSet::new();
        for t in &self.triangles {
            for i in 0..3 {
                directed.insert((t[i], t[(i + 1) % 3]));
            }
        }
        let mut next: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                if !directed.contains(&(b, a)) {
                    next.insert(a, b);
                }
            }
        }
        let mut out = self.clone();
        while let Some((&first, _)) = next.iter().next() {
            let mut ring = Vec::new();
            let mut a = first;
            while let Some(b) = next.remove(&a) {
                ring.push((a, b));
                a = b;
            }
            let centroid = ring.iter().map(|&(a, _)| self.vertices[a]).sum::<Vec3>() / ring.len() as f64;
            let c = out.vertices.len();
            out.vertices.push(centroid);
            out.triangles.extend(ring.iter().map(|&(a, b)| [c, b, a]));
        }
        out
    }
}

pub fn bounding_box(points: &[Vec3]) -> Option<(Vec3, Vec3)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))))
}

/// Volume of the convex hull of `points` (incremental hull). Returns 0 for
/// fewer than four points or a (numerically) flat point set.
pub fn convex_hull_volume(points: &[Vec3]) -> f64 {
    let Some((lo, hi)) = bounding_box(points) else {
        return 0.0;
    };
    let eps = 1e-12 * (hi - lo).norm().max(1.0);

    // initial tetrahedron
    let n = points.len();
    if n < 4 {
        return 0.0;
    }
    let i0 = 0;
    let Some(i1) = (0..n).max_by(|&a, &b| (points[a] - points[i0]).norm().total_cmp(&(points[b] - points[i0]).norm()))
    else {
        return 0.0;
    };
    let dir = points[i1] - points[i0];
    if dir.norm() <= eps {
        return 0.0;
    }
    let line_dist = |p: &Vec3| (p - points[i0]).cross(&dir).norm();
    let i2 = (0..n).max_by(|&a, &b| line_dist(&points[a]).total_cmp(&line_dist(&points[b]))).unwrap();
    let plane_n = dir.cross(&(points[i2] - points[i0]));
    if plane_n.norm() <= eps * dir.norm() {
        return 0.0;
    }
    let plane_dist = |p: &Vec3| (p - points[i0]).dot(&plane_n);
    let i3 = (0..n).max_by(|&a, &b| plane_dist(&points[a]).abs().total_cmp(&plane_dist(&points[b]).abs())).unwrap();
    if plane_dist(&points[i3]).abs() <= eps * plane_n.norm() {
        return 0.0;
    }

    let mut faces: Vec<[usize; 3]> = vec![[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]];
    let centroid = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    let orient = |f: [usize; 3]| -> [usize; 3] {
        let n = (points[f[1]] - points[f[0]]).cross(&(points[f[2]] - points[f[0]]));
        if n.dot(&(points[f[0]] - centroid)) < 0.0 {
            [f[0], f[2], f[1]]
        } else {
            f
        }
    };
    faces = faces.into_iter().map(orient).collect();

    for (pi, p) in points.iter().enumerate() {
        if [i0, i1, i2, i3].contains(&pi) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| {
                let n = (points[f[1]] - points[f[0]]).cross(&(points[f[2]] - points[f[0]]));
                n.dot(&(p - points[f[0]])) > eps * n.norm()
            })
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        // horizon: directed edges of visible faces whose twin is not visible
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
            for i in 0..3 {
                *edges.entry((f[i], f[(i + 1) % 3])).or_insert(0) += 1;
            }
        }
        let horizon: Vec<(usize, usize)> =
            edges.keys().filter(|(a, b)| !edges.contains_key(&(*b, *a))).copied().collect();
        let mut kept: Vec<[usize; 3]> = faces.iter().zip(&visible).filter(|(_, v)| !**v).map(|(f, _)| *f).collect();
        kept.extend(horizon.into_iter().map(|(a, b)| [a, b, pi]));
        faces = kept;
    }

    TriMesh::new(points.to_vec(), faces).signed_volume().abs()
}

#[cfg(test)]
pub(crate) fn unit_cube() -> TriMesh {
    let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
    let vertices = vec![
        v(0., 0., 0.),
        v(1., 0., 0.),
        v(1., 1., 0.),
        v(0., 1., 0.),
        v(0., 0., 1.),
        v(1., 0., 1.),
        v(1., 1., 1.),
        v(0., 1., 1.),
    ];
    let triangles = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriMesh::new(vertices, triangles)
}
