//! One-degree-of-freedom rigid folding of a zigzag tube.
//!
//! The fold parameter `t ∈ [0, 1]` is the driving dihedral angle normalized
//! linearly between its two flat-state values. The driving crease is the
//! longitudinal crease at the first ring-0 vertex where the section leaves the
//! zigzag-direction edge group.

use std::io::Write;

use thiserror::Error;

use crate::geometry::TubeGeometry;
use crate::mesh::{bounding_box, convex_hull_volume};
use crate::Vec3;

const MAX_BISECTIONS: usize = 200;
const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FoldError {
    #[error("fold solve did not converge: residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("tube is not a one-degree-of-freedom mechanism: {0}")]
    NotOneDof(String),
    #[error("invalid fold parameter: {0}")]
    InvalidParameter(String),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Tube configuration at one fold parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedState {
    pub t: f64,
    /// Internal fold coordinate; 0 at the deployed state.
    pub zeta: f64,
    pub vertices: Vec<Vec3>,
    /// Axial distance between the end rings, mm.
    pub axial_length: f64,
    /// Extent of the tube normal to its first panel, mm.
    pub transverse_height: f64,
    pub enclosed_volume: f64,
    /// Set when the end caps could not be built and the volume is the convex
    /// hull of the vertices instead.
    pub volume_from_hull: bool,
}

impl FoldedState {
    /// Largest deviation of any crease length from the tube's reference.
    pub fn edge_length_residual(&self, tube: &TubeGeometry) -> f64 {
        tube.edge_lengths()
            .iter()
            .map(|((a, b), l)| ((self.vertices[*a] - self.vertices[*b]).norm() - l).abs())
            .fold(0.0, f64::max)
    }

    /// Largest distance of a panel corner from the plane of the other three.
    pub fn planarity_residual(&self, tube: &TubeGeometry) -> f64 {
        tube.faces
            .iter()
            .map(|f| {
                let p = f.map(|i| self.vertices[i]);
                let n = (p[1] - p[0]).cross(&(p[3] - p[0]));
                if n.norm() == 0.0 {
                    0.0
                } else {
                    n.normalize().dot(&(p[2] - p[0])).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Driving-crease geometry for a tube.
struct Driver {
    vertex: usize,
    flat_lo: f64,
    flat_hi: f64,
}

fn dihedral(tube: &TubeGeometry, vertex: usize, zeta: f64) -> f64 {
    let kin = tube.kinematics();
    let edges = kin.section_edges(zeta);
    let (vp, _) = kin.segments(zeta);
    let axis = vp.normalize();
    let ns = edges.len();
    let perp = |v: Vec3| v - axis * v.dot(&axis);
    let a = perp(-edges[(vertex + ns - 1) % ns]);
    let b = perp(edges[vertex]);
    a.cross(&b).norm().atan2(a.dot(&b))
}

fn driver(tube: &TubeGeometry) -> Result<Driver, FoldError> {
    let kin = tube.kinematics();
    let vertex = (1..tube.ring_size())
        .find(|&j| kin.is_branch(j - 1) && !kin.is_branch(j))
        .ok_or_else(|| FoldError::NotOneDof("no crease leaves the zigzag edge group".into()))?;
    let c = kin.zeta_max();
    let d = Driver { vertex, flat_lo: dihedral(tube, vertex, -c), flat_hi: dihedral(tube, vertex, c) };
    // the angle must be strictly monotone in zeta for t to be a coordinate
    let samples: Vec<f64> = (0..=64).map(|i| dihedral(tube, vertex, -c + 2.0 * c * i as f64 / 64.0)).collect();
    let rising = d.flat_hi > d.flat_lo;
    let monotone = samples.windows(2).all(|w| if rising { w[1] > w[0] } else { w[1] < w[0] });
    if !monotone || (d.flat_hi - d.flat_lo).abs() < ANGLE_TOL {
        return Err(FoldError::NotOneDof("driving dihedral is not monotone over the fold range".into()));
    }
    Ok(d)
}

fn t_of_zeta(tube: &TubeGeometry, d: &Driver, zeta: f64) -> f64 {
    (dihedral(tube, d.vertex, zeta) - d.flat_lo) / (d.flat_hi - d.flat_lo)
}

fn zeta_of_t(tube: &TubeGeometry, d: &Driver, t: f64) -> Result<f64, FoldError> {
    let c = tube.kinematics().zeta_max();
    if t <= 0.0 {
        return Ok(-c);
    }
    if t >= 1.0 {
        return Ok(c);
    }
    let (mut lo, mut hi) = (-c, c);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if t_of_zeta(tube, d, mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * c {
            break;
        }
    }
    let zeta = 0.5 * (lo + hi);
    let residual = (t_of_zeta(tube, d, zeta) - t).abs() * (d.flat_hi - d.flat_lo).abs();
    if residual > ANGLE_TOL {
        return Err(FoldError::NoConvergence { residual });
    }
    Ok(zeta)
}

/// Fold parameter of the deployed (as-generated) configuration.
pub fn deployed_t(tube: &TubeGeometry) -> Result<f64, FoldError> {
    let d = driver(tube)?;
    Ok(t_of_zeta(tube, &d, 0.0))
}

fn state_at(tube: &TubeGeometry, t: f64, zeta: f64) -> FoldedState {
    let vertices = tube.kinematics().positions(zeta);
    let last = (tube.n_rings() - 1) * tube.ring_size();
    let axial_length = vertices[last].z - vertices[0].z;
    let f0 = tube.faces[0];
    let n = (vertices[f0[1]] - vertices[f0[0]]).cross(&(vertices[f0[3]] - vertices[f0[0]]));
    let transverse_height = if n.norm() == 0.0 {
        0.0
    } else {
        let n = n.normalize();
        let proj: Vec<f64> = vertices.iter().map(|p| n.dot(p)).collect();
        let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let (enclosed_volume, volume_from_hull) = enclosed_volume_of(tube, &vertices);
    FoldedState { t, zeta, vertices, axial_length, transverse_height, enclosed_volume, volume_from_hull }
}

/// Rigid configuration at fold parameter `t`.
pub fn fold_configuration(tube: &TubeGeometry, t: f64) -> Result<FoldedState, FoldError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(FoldError::InvalidParameter(format!("t = {t} outside [0, 1]")));
    }
    let d = driver(tube)?;
    let zeta = zeta_of_t(tube, &d, t)?;
    Ok(state_at(tube, t, zeta))
}

/// States at `t = i / (n_steps - 1)`.
pub fn fold_sweep(tube: &TubeGeometry, n_steps: usize) -> Result<Vec<FoldedState>, FoldError> {
    if n_steps < 2 {
        return Err(FoldError::InvalidParameter(format!("n_steps must be at least 2, got {n_steps}")));
    }
    let d = driver(tube)?;
    (0..n_steps)
        .map(|i| {
            let t = i as f64 / (n_steps - 1) as f64;
            Ok(state_at(tube, t, zeta_of_t(tube, &d, t)?))
        })
        .collect()
}

/// Volume of the capped surface at `positions`, with the convex hull as a
/// fallback when an end ring is not planar.
fn enclosed_volume_of(tube: &TubeGeometry, positions: &[Vec3]) -> (f64, bool) {
    let scale = bounding_box(positions).map(|(lo, hi)| (hi - lo).norm()).unwrap_or(0.0).max(1.0);
    let last = tube.n_rings() - 1;
    let planar = [0, last].iter().all(|&r| {
        let ring: Vec<Vec3> = tube.ring(r).iter().map(|&i| positions[i]).collect();
        ring_is_planar(&ring, 1e-9 * scale)
    });
    if planar {
        let v = tube.closed_mesh_at(positions).signed_volume();
        (v.max(0.0), false)
    } else {
        log::warn!("end ring not planar; using convex hull volume");
        (convex_hull_volume(positions), true)
    }
}

fn ring_is_planar(ring: &[Vec3], tol: f64) -> bool {
    let c = ring.iter().sum::<Vec3>() / ring.len() as f64;
    // Newell normal
    let n: Vec3 = (0..ring.len()).map(|i| (ring[i] - c).cross(&(ring[(i + 1) % ring.len()] - c))).sum();
    if n.norm() == 0.0 {
        return true;
    }
    let n = n.normalize();
    ring.iter().all(|p| n.dot(&(p - c)).abs() <= tol)
}

/// Volume of the capped tube in `state`, mm³.
pub fn enclosed_volume(tube: &TubeGeometry, state: &FoldedState) -> f64 {
    enclosed_volume_of(tube, &state.vertices).0
}

/// Axial length relative to the deployed length.
pub fn extension_ratio(state: &FoldedState, tube: &TubeGeometry) -> f64 {
    state.axial_length / tube.deployed_length
}

/// Writes `t, axial_length_mm, transverse_height_mm, volume_mm3` rows.
pub fn write_sweep_csv<W: Write>(states: &[FoldedState], out: W) -> Result<(), FoldError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "axial_length_mm", "transverse_height_mm", "volume_mm3"]).map_err(csv_io)?;
    for s in states {
        w.write_record([
            format!("{:.6}", s.t),
            format!("{:.9}", s.axial_length),
            format!("{:.9}", s.transverse_height),
            format!("{:.9}", s.enclosed_volume),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> FoldError {
    FoldError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_tube, make_quad_section, TubeSpec};

    fn square() -> TubeGeometry {
        let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).unwrap();
        generate_tube(&TubeSpec::new(cs, 45.0, 15.0, 1)).unwrap()
    }

    #[test]
    fn flat_states_have_no_height_or_volume() {
        let t = square();
        for s in [0.0, 1.0] {
            let st = fold_configuration(&t, s).unwrap();
            assert!(st.transverse_height.abs() < 1e-9);
            assert!(st.enclosed_volume.abs() < 1e-9);
            assert!(!st.volume_from_hull);
        }
    }

    #[test]
    fn deployed_state_round_trip() {
        let t = square();
        let td = deployed_t(&t).unwrap();
        assert!((td - 0.5).abs() < 1e-12);
        let st = fold_configuration(&t, td).unwrap();
        for (a, b) in st.vertices.iter().zip(&t.vertices) {
            assert!((a - b).norm() < 1e-6);
        }
        assert!((st.axial_length - t.deployed_length).abs() < 1e-6);
        assert!((extension_ratio(&st, &t) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn square_closed_form() {
        // For the square section the fold coordinate is -cos(alpha) cos(pi t).
        let t = square();
        let c = 45f64.to_radians().cos();
        for s in [0.1, 0.25, 0.6, 0.9] {
            let st = fold_configuration(&t, s).unwrap();
            assert!((st.zeta + c * (std::f64::consts::PI * s).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn rigid_and_planar_along_sweep() {
        let cs = make_quad_section(12.0, 8.0, 0.0, 65.0).unwrap();
        let t = generate_tube(&TubeSpec::new(cs, 35.0, 10.0, 2)).unwrap();
        for st in fold_sweep(&t, 31).unwrap() {
            assert!(st.edge_length_residual(&t) < 1e-9);
            assert!(st.planarity_residual(&t) < 1e-9);
            assert!(st.transverse_height >= 0.0 && st.enclosed_volume >= 0.0);
            assert!(t.closed_mesh_at(&st.vertices).is_watertight());
        }
    }

    #[test]
    fn sweep_shape() {
        let t = square();
        let two = fold_sweep(&t, 2).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|s| s.enclosed_volume.abs() < 1e-9));
        let v: Vec<f64> = fold_sweep(&t, 21).unwrap().iter().map(|s| s.enclosed_volume).collect();
        assert!(v[1..20].iter().all(|&x| x > 0.0));
        let peak = v.iter().cloned().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
        assert!(v[..=peak].windows(2).all(|w| w[1] > w[0]));
        assert!(v[peak..].windows(2).all(|w| w[1] < w[0]));
        for i in 0..21 {
            assert!((v[i] - v[20 - i]).abs() < 1e-6 * v[peak]);
        }
    }

    #[test]
    fn bad_parameters() {
        let t = square();
        assert!(matches!(fold_configuration(&t, 1.5), Err(FoldError::InvalidParameter(_))));
        assert!(matches!(fold_sweep(&t, 1), Err(FoldError::InvalidParameter(_))));
    }

    #[test]
    fn continuity() {
        let t = square();
        for s in [0.1, 0.5, 0.8] {
            let a = fold_configuration(&t, s).unwrap();
            let b = fold_configuration(&t, s + 1e-4).unwrap();
            let d = a.vertices.iter().zip(&b.vertices).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(d < 1e-2);
        }
    }

    #[test]
    fn csv_columns() {
        let t = square();
        let mut buf = Vec::new();
        write_sweep_csv(&fold_sweep(&t, 3).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,axial_length_mm,transverse_height_mm,volume_mm3\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
