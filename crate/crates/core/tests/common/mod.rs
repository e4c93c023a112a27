//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use oritube::geometry::stl::{export_stl, read_stl, weld, StlTriangle};
use oritube::structural::{energy, BarHingeModel};
use oritube::{generate_tube, make_quad_section, TriMesh, TubeGeometry, TubeSpec, Vec2, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Square tube with 15 mm sides, 45° zigzag and 15 mm segments.
pub fn square_tube(n_units: usize) -> TubeGeometry {
    let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).unwrap();
    generate_tube(&TubeSpec::new(cs, 45.0, 15.0, n_units)).unwrap()
}

/// Brute-force slope grouping: every pair of edges is compared directly and
/// each class of parallel edges must have zero net extent along its
/// direction.
pub fn admissible_by_pairs(points: &[Vec2], length_tol: f64) -> bool {
    let n = points.len();
    let edges: Vec<Vec2> = (0..n).map(|i| points[(i + 1) % n] - points[i]).collect();
    let mut class: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (edges[i].normalize(), edges[j].normalize());
            if a.perp(&b).abs() <= 1e-9 {
                let old = class[i];
                let new = class[j];
                for c in class.iter_mut() {
                    if *c == old {
                        *c = new;
                    }
                }
            }
        }
    }
    (0..n).all(|c| {
        let members: Vec<usize> = (0..n).filter(|&i| class[i] == c).collect();
        let Some(&first) = members.first() else { return true };
        let dir = edges[first].normalize();
        let net: f64 = members.iter().map(|&i| edges[i].dot(&dir)).sum();
        net.abs() <= length_tol
    })
}

/// Random parallelogram with random pose.
pub fn random_parallelogram(rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let a = rng.random_range(2.0..40.0);
    let b = rng.random_range(2.0..40.0);
    let t1: f64 = rng.random_range(0.0..180.0f64).to_radians();
    let t2 = t1 + rng.random_range(15.0..165.0f64).to_radians();
    let d1 = Vec2::new(t1.cos(), t1.sin()) * a;
    let d2 = Vec2::new(t2.cos(), t2.sin()) * b;
    let o = Vec2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
    vec![o, o + d1, o + d1 + d2, o + d2]
}

/// A parallelogram with one vertex moved by 0.01 to 2 mm.
pub fn perturbed_quad(rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let mut q = random_parallelogram(rng);
    let k = rng.random_range(0..4);
    let r = rng.random_range(0.01..2.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    q[k] += Vec2::new(phi.cos(), phi.sin()) * r;
    q
}

/// Möller-Trumbore hit distance along `dir`, if the ray hits.
fn ray_hit(origin: &Vec3, dir: &Vec3, tri: &[Vec3; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > 0.0).then_some(t)
}

/// Point-in-mesh by ray-crossing parity.
pub fn inside(mesh: &TriMesh, p: &Vec3) -> bool {
    // an irrational-looking direction avoids grazing edges and vertices
    let dir = Vec3::new(0.5377, 0.3091, 0.7861).normalize();
    let hits = (0..mesh.triangles.len()).filter(|&i| ray_hit(p, &dir, &mesh.triangle(i)).is_some()).count();
    hits % 2 == 1
}

/// Monte-Carlo volume in the bounding box: `(estimate, standard error)`.
pub fn monte_carlo_volume(mesh: &TriMesh, samples: usize, seed: u64) -> (f64, f64) {
    let (lo, hi) = mesh.bounding_box().unwrap();
    let size = hi - lo;
    let box_volume = size.x * size.y * size.z;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0usize;
    for _ in 0..samples {
        let p =
            lo + Vec3::new(rng.random::<f64>() * size.x, rng.random::<f64>() * size.y, rng.random::<f64>() * size.z);
        if inside(mesh, &p) {
            count += 1;
        }
    }
    let frac = count as f64 / samples as f64;
    let err = (frac * (1.0 - frac) / samples as f64).sqrt();
    (frac * box_volume, err * box_volume)
}

/// Jacobian of the rigid-panel constraints at `x`: squared lengths of every
/// crease and of one diagonal per panel, and the corner triple product of
/// every panel.
pub fn rigid_panel_jacobian(tube: &TubeGeometry, x: &[Vec3]) -> DMatrix<f64> {
    let mut rows: Vec<Vec<(usize, Vec3)>> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = tube.creases.iter().map(|c| (c.a, c.b)).collect();
    pairs.extend(tube.faces.iter().map(|f| (f[0], f[2])));
    for (a, b) in pairs {
        let d = x[a] - x[b];
        rows.push(vec![(a, 2.0 * d), (b, -2.0 * d)]);
    }
    for f in &tube.faces {
        let [p0, p1, p2, p3] = f.map(|i| x[i]);
        let (u, v, w) = (p1 - p0, p2 - p0, p3 - p0);
        // d/dp of u·(v×w)
        let gu = v.cross(&w);
        let gv = w.cross(&u);
        let gw = u.cross(&v);
        rows.push(vec![(f[0], -(gu + gv + gw)), (f[1], gu), (f[2], gv), (f[3], gw)]);
    }
    let mut j = DMatrix::zeros(rows.len(), 3 * x.len());
    for (r, entries) in rows.iter().enumerate() {
        for (node, g) in entries {
            for k in 0..3 {
                j[(r, 3 * node + k)] += g[k];
            }
        }
    }
    j
}

/// Dimension of the constraint null space (rigid motions included).
pub fn mobility(tube: &TubeGeometry, x: &[Vec3]) -> usize {
    let j = rigid_panel_jacobian(tube, x);
    let sv = j.svd(false, false).singular_values;
    let max = sv.max();
    let rank = sv.iter().filter(|&&s| s > 1e-8 * max).count();
    3 * x.len() - rank
}

/// Central finite-difference energy gradient.
pub fn fd_gradient(model: &BarHingeModel, x: &[Vec3], h: f64) -> Vec<Vec3> {
    let mut x = x.to_vec();
    let mut g = vec![Vec3::zeros(); x.len()];
    for i in 0..x.len() {
        for k in 0..3 {
            let v = x[i][k];
            x[i][k] = v + h;
            let ep = energy(model, &x);
            x[i][k] = v - h;
            let em = energy(model, &x);
            x[i][k] = v;
            g[i][k] = (ep - em) / (2.0 * h);
        }
    }
    g
}

/// Re-encodes decoded triangles with the original header.
fn encode(header: &[u8], tris: &[StlTriangle]) -> Vec<u8> {
    let mut out = header[..80].to_vec();
    out.extend_from_slice(&(tris.len() as u32).to_le_bytes());
    for t in tris {
        for v in std::iter::once(&t.normal).chain(t.vertices.iter()) {
            for c in v {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        out.extend_from_slice(&[0, 0]);
    }
    out
}

/// Checks the STL contract for `mesh`: byte count `84 + 50 n`, watertight
/// after welding, vertices equal to the mesh's rounded to `f32`, and
/// identical bytes when decoded and encoded again.
pub fn stl_contract(mesh: &TriMesh) -> Result<usize, String> {
    let mut bytes = Vec::new();
    let n = export_stl(mesh, &mut bytes).map_err(|e| e.to_string())?;
    if n != bytes.len() || bytes.len() != 84 + 50 * mesh.triangles.len() {
        return Err(format!("{} bytes for {} triangles", bytes.len(), mesh.triangles.len()));
    }
    let tris = read_stl(&mut bytes.as_slice()).map_err(|e| e.to_string())?;
    for (i, t) in tris.iter().enumerate() {
        let expect = mesh.triangle(i).map(|v| [v.x as f32, v.y as f32, v.z as f32]);
        if t.vertices != expect {
            return Err(format!("triangle {i} vertices changed"));
        }
    }
    if !weld(&tris).is_watertight() {
        return Err("not watertight".into());
    }
    if encode(&bytes, &tris) != bytes {
        return Err("bytes differ after decode and encode".into());
    }
    Ok(bytes.len())
}
