use super::tube::edge_faces;
use super::{CreaseKind, GeometryError, TubeGeometry};
use crate::{Vec2, Vec3};

/// A panel of the unrolled pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternPanel {
    /// 2D vertex ids, same winding as the 3D face.
    pub corners: [usize; 4],
    /// Index of the 3D face this panel comes from.
    pub face: usize,
    pub row: usize,
    pub col: usize,
}

/// A line of the unrolled pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternEdge {
    pub a: usize,
    pub b: usize,
    /// `Boundary` for every edge on the rim of a pattern piece.
    pub kind: CreaseKind,
    /// Fold assignment of the 3D crease this line was cut from, if it was cut.
    pub cut_from: Option<CreaseKind>,
}

/// Flat crease pattern, mm.
///
/// A closed zigzag tube has a nonzero angle defect at every interior ring
/// vertex, so it does not develop into a single sheet. The pattern is cut along
/// the longitudinal seam through section vertex 0 and along every interior
/// ring: each zigzag segment (a prism band) unrolls exactly into one row of
/// panels, one column per section edge. Rows are stacked along `+y` with a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct CreasePattern2D {
    pub vertices: Vec<Vec2>,
    /// 3D vertex id for every 2D vertex.
    pub source: Vec<usize>,
    pub panels: Vec<PatternPanel>,
    pub edges: Vec<PatternEdge>,
    pub rows: usize,
    pub cols: usize,
}

impl CreasePattern2D {
    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn panel_area(&self, p: &PatternPanel) -> f64 {
        let c: Vec<Vec2> = p.corners.iter().map(|&i| self.vertices[i]).collect();
        0.5 * (0..4).map(|i| c[i].perp(&c[(i + 1) % 4])).sum::<f64>().abs()
    }

    pub fn area(&self) -> f64 {
        self.panels.iter().map(|p| self.panel_area(p)).sum()
    }

    pub fn bounding_box(&self) -> Option<(Vec2, Vec2)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))))
    }

    /// Lines that are folds of the pattern (not on the rim of a piece).
    pub fn fold_lines(&self) -> impl Iterator<Item = &PatternEdge> {
        self.edges.iter().filter(|e| e.kind != CreaseKind::Boundary)
    }
}

/// Maps points of a planar 3D quad into 2D, given where its edge `q0 -> q3`
/// lands. The quad is laid to the right of that edge.
fn place_quad(q: [Vec3; 4], a0: Vec2, a3: Vec2) -> [Vec2; 4] {
    let u3 = (q[3] - q[0]).normalize();
    let side = q[1] - q[0];
    let w3 = (side - u3 * side.dot(&u3)).normalize();
    let u2 = (a3 - a0).normalize();
    let w2 = Vec2::new(u2.y, -u2.x);
    q.map(|p| {
        let d = p - q[0];
        a0 + u2 * d.dot(&u3) + w2 * d.dot(&w3)
    })
}

pub fn unroll_crease_pattern(tube: &TubeGeometry) -> Result<CreasePattern2D, GeometryError> {
    let incidence = edge_faces(&tube.faces);
    if let Some(((a, b), fs)) = incidence.iter().find(|(_, fs)| fs.len() > 2) {
        return Err(GeometryError::NonUnrollable(format!("edge ({a}, {b}) is shared by {} faces", fs.len())));
    }
    if tube.faces.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    let ns = tube.ring_size();
    let rows = tube.n_rings() - 1;
    let gap = 0.25 * tube.spec.unit_length;
    let crease_kind = |a: usize, b: usize| {
        tube.creases.iter().find(|c| (c.a, c.b) == (a.min(b), a.max(b))).map(|c| c.kind).unwrap_or(CreaseKind::Boundary)
    };

    let mut pat = CreasePattern2D {
        vertices: Vec::new(),
        source: Vec::new(),
        panels: Vec::new(),
        edges: Vec::new(),
        rows,
        cols: ns,
    };
    let mut y_floor = 0.0;
    for k in 0..rows {
        let mut band: Vec<Vec2> = Vec::with_capacity(2 * (ns + 1));
        let mut band_src = Vec::with_capacity(2 * (ns + 1));
        // left edge of the band: (k,0) -> (k+1,0), pointing up
        let f0 = tube.faces[k * ns];
        let h = (tube.vertices[f0[3]] - tube.vertices[f0[0]]).norm();
        let (mut a0, mut a3) = (Vec2::zeros(), Vec2::new(0.0, h));
        band.push(a0);
        band.push(a3);
        band_src.push(f0[0]);
        band_src.push(f0[3]);
        let mut panel_ids = Vec::with_capacity(ns);
        for j in 0..ns {
            let fi = k * ns + j;
            let f = tube.faces[fi];
            let q = f.map(|i| tube.vertices[i]);
            let placed = place_quad(q, a0, a3);
            let base = band.len() - 2;
            band.push(placed[1]);
            band.push(placed[2]);
            band_src.push(f[1]);
            band_src.push(f[2]);
            // local ids: bottom-left, bottom-right, top-right, top-left
            panel_ids.push(([base, base + 2, base + 3, base + 1], fi));
            a0 = placed[1];
            a3 = placed[2];
        }
        let y_min = band.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let y_max = band.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let shift = Vec2::new(0.0, y_floor - y_min);
        y_floor += (y_max - y_min) + gap;

        let offset = pat.vertices.len();
        pat.vertices.extend(band.iter().map(|p| p + shift));
        pat.source.extend(band_src);
        for (j, (corners, face)) in panel_ids.into_iter().enumerate() {
            pat.panels.push(PatternPanel { corners: corners.map(|c| c + offset), face, row: k, col: j });
        }
        // lines: bottom ring, top ring, then the ns+1 verticals
        let id = |local: usize| local + offset;
        for j in 0..ns {
            let (b0, b1) = (id(2 * j), id(2 * j + 2));
            let (t0, t1) = (id(2 * j + 1), id(2 * j + 3));
            for (a, b) in [(b0, b1), (t0, t1)] {
                let kind3d = crease_kind(pat.source[a], pat.source[b]);
                pat.edges.push(PatternEdge {
                    a,
                    b,
                    kind: CreaseKind::Boundary,
                    cut_from: (kind3d != CreaseKind::Boundary).then_some(kind3d),
                });
            }
        }
        for j in 0..=ns {
            let (a, b) = (id(2 * j), id(2 * j + 1));
            let kind3d = crease_kind(pat.source[a], pat.source[b]);
            let seam = j == 0 || j == ns;
            pat.edges.push(PatternEdge {
                a,
                b,
                kind: if seam { CreaseKind::Boundary } else { kind3d },
                cut_from: seam.then_some(kind3d),
            });
        }
    }
    Ok(pat)
}
