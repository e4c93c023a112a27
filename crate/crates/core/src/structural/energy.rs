use std::f64::consts::PI;

use super::model::{BarHingeModel, Hinge};
use crate::Vec3;

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Signed fold angle of the hinge `[wing, axis0, axis1, wing]`, zero when
/// flat. Positive when the wings rotate towards the side of the first
/// triangle's normal.
pub fn fold_angle(p: &[Vec3; 4]) -> f64 {
    fold_angle_and_gradient(p).0
}

/// Fold angle and its gradient with respect to the four points.
pub(crate) fn fold_angle_and_gradient(p: &[Vec3; 4]) -> (f64, [Vec3; 4]) {
    let f = p[0] - p[1];
    let g = p[1] - p[2];
    let h = p[3] - p[2];
    let a = f.cross(&g);
    let b = h.cross(&g);
    let (aa, bb, gn) = (a.norm_squared(), b.norm_squared(), g.norm());
    // torsion angle is π when flat; shift it so flat is zero
    let sin = b.cross(&a).dot(&g) / gn;
    let cos = a.dot(&b);
    let psi = (-sin).atan2(-cos);

    let d0 = -gn / aa * a;
    let d3 = gn / bb * b;
    let fg = f.dot(&g) / (aa * gn);
    let hg = h.dot(&g) / (bb * gn);
    let d1 = gn / aa * a + fg * a - hg * b;
    let d2 = -gn / bb * b - fg * a + hg * b;
    (psi, [d0, d1, d2, d3])
}

fn hinge_points(h: &Hinge, x: &[Vec3]) -> [Vec3; 4] {
    let mut p = h.nodes.map(|i| x[i]);
    if let Some(m) = h.mirrored_wing {
        p[3] = m.apply(p[3]);
    }
    p
}

/// Total elastic energy, N·mm.
pub fn energy(model: &BarHingeModel, x: &[Vec3]) -> f64 {
    assert_eq!(x.len(), model.nodes.len(), "position count");
    let mut e = 0.0;
    for bar in &model.bars {
        let stretch = (x[bar.b] - x[bar.a]).norm() - bar.rest_length;
        e += 0.5 * bar.stiffness * stretch * stretch;
    }
    for h in &model.hinges {
        let d = wrap(fold_angle(&hinge_points(h, x)) - h.rest_angle);
        e += 0.5 * h.stiffness * d * d;
    }
    e
}

/// Energy gradient per node, N. The internal elastic force on a node is its
/// negative.
pub fn gradient(model: &BarHingeModel, x: &[Vec3]) -> Vec<Vec3> {
    energy_and_gradient(model, x).1
}

pub fn energy_and_gradient(model: &BarHingeModel, x: &[Vec3]) -> (f64, Vec<Vec3>) {
    assert_eq!(x.len(), model.nodes.len(), "position count");
    let mut e = 0.0;
    let mut g = vec![Vec3::zeros(); x.len()];
    for bar in &model.bars {
        let d = x[bar.b] - x[bar.a];
        let len = d.norm();
        let stretch = len - bar.rest_length;
        e += 0.5 * bar.stiffness * stretch * stretch;
        let f = d * (bar.stiffness * stretch / len);
        g[bar.b] += f;
        g[bar.a] -= f;
    }
    for h in &model.hinges {
        let (psi, dpsi) = fold_angle_and_gradient(&hinge_points(h, x));
        let d = wrap(psi - h.rest_angle);
        e += 0.5 * h.stiffness * d * d;
        let s = h.stiffness * d;
        for i in 0..3 {
            g[h.nodes[i]] += s * dpsi[i];
        }
        let mut last = s * dpsi[3];
        if let Some(m) = h.mirrored_wing {
            last[m.axis] = -last[m.axis];
        }
        g[h.nodes[3]] += last;
    }
    (e, g)
}
