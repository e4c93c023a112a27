use std::f64::consts::PI;

use super::GeometryError;
use crate::Vec2;

/// Angular tolerance (radians) used to decide that two edges share a slope.
pub const SLOPE_TOL: f64 = 1e-9;
/// Default tolerance (mm) on the two partition lengths of an edge group.
pub const DEFAULT_LENGTH_TOL: f64 = 1e-6;

const MIN_EDGE: f64 = 1e-9;

/// Closed simple polygon in the plane, vertices in order (mm).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    vertices: Vec<Vec2>,
}

impl CrossSection {
    /// Validates the polygon: at least three vertices, no zero-length edge,
    /// no self-intersection.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::DegeneratePolygon(format!("{n} vertices, need at least 3")));
        }
        for i in 0..n {
            let len = (vertices[(i + 1) % n] - vertices[i]).norm();
            if !len.is_finite() || len <= MIN_EDGE {
                return Err(GeometryError::DegeneratePolygon(format!("edge {i} has length {len:e} mm")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // adjacent edges share a vertex by construction
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a0, a1) = (vertices[i], vertices[(i + 1) % n]);
                let (b0, b1) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(a0, a1, b0, b1) {
                    return Err(GeometryError::DegeneratePolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(points.iter().map(|&(x, y)| Vec2::new(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Directed edge `i`, from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        self.vertices[(i + 1) % n] - self.vertices[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.len()).map(move |i| self.edge(i))
    }

    /// Slope angle of edge `i` in `[0, π)`.
    pub fn slope(&self, i: usize) -> f64 {
        slope_of(self.edge(i))
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.norm()).sum()
    }

    /// Shoelace signed area; positive for counter-clockwise order.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                a.x * b.y - a.y * b.x
            })
            .sum::<f64>()
            * 0.5
    }

    /// Same polygon with counter-clockwise vertex order, starting at the same vertex.
    pub fn to_ccw(&self) -> Self {
        if self.signed_area() >= 0.0 {
            return self.clone();
        }
        let mut v = Vec::with_capacity(self.len());
        v.push(self.vertices[0]);
        v.extend(self.vertices[1..].iter().rev());
        Self { vertices: v }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { vertices: self.vertices.iter().map(|v| v * factor).collect() }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let rot = nalgebra::Rotation2::new(angle);
        Self { vertices: self.vertices.iter().map(|v| rot * v).collect() }
    }
}

pub(crate) fn slope_of(e: Vec2) -> f64 {
    let mut s = e.y.atan2(e.x);
    if s < 0.0 {
        s += PI;
    }
    if s >= PI {
        s -= PI;
    }
    s
}

fn slope_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % PI;
    d.min(PI - d)
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).perp(&(c - a))
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> bool {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(b0, b1, a0))
        || (d2 == 0.0 && on_segment(b0, b1, a1))
        || (d3 == 0.0 && on_segment(a0, a1, b0))
        || (d4 == 0.0 && on_segment(a0, a1, b1))
}

/// Edges sharing one slope, split by direction relative to the group's first edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGroup {
    /// Slope angle of the group's first edge, in `[0, π)`.
    pub slope: f64,
    /// Edge indices pointing the same way as the first member.
    pub forward: Vec<usize>,
    /// Edge indices pointing the opposite way.
    pub backward: Vec<usize>,
    pub forward_length: f64,
    pub backward_length: f64,
}

impl EdgeGroup {
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.forward.iter().chain(self.backward.iter()).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGroupReport {
    pub groups: Vec<EdgeGroup>,
    pub admissible: bool,
    pub violations: Vec<String>,
}

impl EdgeGroupReport {
    /// Index of the group containing edge `edge`.
    pub fn group_of(&self, edge: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.members().any(|m| m == edge))
    }
}

impl std::fmt::Display for EdgeGroupReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            writeln!(
                f,
                "group {i}: slope {:.6} deg, forward {:?} ({:.6} mm), backward {:?} ({:.6} mm)",
                g.slope.to_degrees(),
                g.forward,
                g.forward_length,
                g.backward,
                g.backward_length
            )?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        write!(f, "verdict: {}", if self.admissible { "admissible" } else { "inadmissible" })
    }
}

/// Groups the edges of `cs` by slope and checks that each group's two
/// direction partitions have equal total length within `tol` (mm).
///
/// Slope classes use the angular tolerance [`SLOPE_TOL`].
pub fn check_admissible(cs: &CrossSection, tol: f64) -> Result<EdgeGroupReport, GeometryError> {
    let cs = CrossSection::new(cs.vertices.clone())?;
    let tol = if tol > 0.0 { tol } else { DEFAULT_LENGTH_TOL };

    let mut groups: Vec<(Vec2, EdgeGroup)> = Vec::new();
    for (i, e) in cs.edges().enumerate() {
        let slope = slope_of(e);
        let len = e.norm();
        match groups.iter_mut().find(|(_, g)| slope_distance(g.slope, slope) <= SLOPE_TOL) {
            Some((reference, g)) => {
                if reference.dot(&e) > 0.0 {
                    g.forward.push(i);
                    g.forward_length += len;
                } else {
                    g.backward.push(i);
                    g.backward_length += len;
                }
            }
            None => groups.push((
                e,
                EdgeGroup { slope, forward: vec![i], backward: Vec::new(), forward_length: len, backward_length: 0.0 },
            )),
        }
    }

    let groups: Vec<EdgeGroup> = groups.into_iter().map(|(_, g)| g).collect();
    let mut violations = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        if g.backward.is_empty() {
            violations.push(format!(
                "group {gi} (slope {:.6} deg, edges {:?}) has no opposing edge",
                g.slope.to_degrees(),
                g.forward
            ));
        } else if (g.forward_length - g.backward_length).abs() > tol {
            violations.push(format!(
                "group {gi} (slope {:.6} deg): partition lengths {:.9} mm vs {:.9} mm differ by more than {tol:e} mm",
                g.slope.to_degrees(),
                g.forward_length,
                g.backward_length
            ));
        }
    }
    Ok(EdgeGroupReport { admissible: violations.is_empty(), groups, violations })
}

/// Quadrilateral with side pairs `a` (slope `theta1`) and `b` (slope `theta2`),
/// angles in degrees. The result is counter-clockwise and starts at the origin.
pub fn make_quad_section(a: f64, b: f64, theta1_deg: f64, theta2_deg: f64) -> Result<CrossSection, GeometryError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(GeometryError::DegeneratePolygon(format!("side lengths must be positive (a = {a}, b = {b})")));
    }
    let t1 = theta1_deg.to_radians();
    let t2 = theta2_deg.to_radians();
    let d1 = Vec2::new(t1.cos(), t1.sin());
    let mut d2 = Vec2::new(t2.cos(), t2.sin());
    let cross = d1.perp(&d2);
    if cross.abs() < SLOPE_TOL {
        return Err(GeometryError::DegenerateAngles { theta1_deg, theta2_deg });
    }
    if cross < 0.0 {
        d2 = -d2;
    }
    let p0 = Vec2::zeros();
    let p1 = d1 * a;
    let p2 = p1 + d2 * b;
    let p3 = d2 * b;
    CrossSection::new(vec![p0, p1, p2, p3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(points: &[(f64, f64)]) -> CrossSection {
        CrossSection::from_points(points).unwrap()
    }

    #[test]
    fn unit_square_is_admissible() {
        let r = check_admissible(&cs(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]), 1e-6).unwrap();
        assert!(r.admissible);
        assert_eq!(r.groups.len(), 2);
        for g in &r.groups {
            assert_eq!(g.forward_length, 1.0);
            assert_eq!(g.backward_length, 1.0);
        }
    }

    #[test]
    fn parallelogram_is_admissible() {
        let r = check_admissible(&cs(&[(0., 0.), (2., 0.), (3., 1.), (1., 1.)]), 1e-6).unwrap();
        assert!(r.admissible);
        assert_eq!(r.groups.len(), 2);
    }

    #[test]
    fn kite_is_inadmissible() {
        // Slopes 0, atan2(2,1), atan2(-1,-3), 90°: four distinct classes,
        // none with an opposing partner.
        let r = check_admissible(&cs(&[(0., 0.), (2., 0.), (3., 2.), (0., 1.)]), 1e-6).unwrap();
        assert!(!r.admissible);
        assert_eq!(r.groups.len(), 4);
        assert_eq!(r.violations.len(), 4);
    }

    #[test]
    fn every_edge_in_exactly_one_group() {
        let c = cs(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)]);
        let r = check_admissible(&c, 1e-6).unwrap();
        let mut seen: Vec<usize> = r.groups.iter().flat_map(|g| g.members()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        // L-shaped hexagon: x-edges 2 | 1 + 1, y-edges 1 + 1 | 2
        assert!(r.admissible);
    }

    #[test]
    fn degenerate_polygons_rejected() {
        assert!(matches!(CrossSection::from_points(&[(0., 0.), (1., 0.)]), Err(GeometryError::DegeneratePolygon(_))));
        // bow tie
        assert!(matches!(
            CrossSection::from_points(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]),
            Err(GeometryError::DegeneratePolygon(_))
        ));
        assert!(matches!(
            CrossSection::from_points(&[(0., 0.), (0., 0.), (1., 0.), (0., 1.)]),
            Err(GeometryError::DegeneratePolygon(_))
        ));
    }

    #[test]
    fn quad_section_examples() {
        let sq = make_quad_section(1.0, 1.0, 0.0, 90.0).unwrap();
        let expected = [(0., 0.), (1., 0.), (1., 1.), (0., 1.)];
        for (v, e) in sq.vertices().iter().zip(expected) {
            assert!((v.x - e.0).abs() < 1e-15 && (v.y - e.1).abs() < 1e-15);
        }
        let para = make_quad_section(2.0, 1.0, 0.0, 60.0).unwrap();
        assert!(check_admissible(&para, 1e-6).unwrap().admissible);
        assert!(para.signed_area() > 0.0);
        assert!(matches!(make_quad_section(1.0, 1.0, 0.0, 0.0), Err(GeometryError::DegenerateAngles { .. })));
        assert!(matches!(make_quad_section(1.0, 1.0, 30.0, 210.0), Err(GeometryError::DegenerateAngles { .. })));
    }

    #[test]
    fn clockwise_input_normalizes() {
        let c = cs(&[(0., 0.), (0., 1.), (1., 1.), (1., 0.)]);
        assert!(c.signed_area() < 0.0);
        let ccw = c.to_ccw();
        assert!(ccw.signed_area() > 0.0);
        assert_eq!(ccw.vertices()[0], c.vertices()[0]);
    }
}
