//! Symmetry-reduced tube model.
//!
//! A tube whose model is mirror symmetric about the mid-plane of its
//! cross-section (`y`) and about its mid-length (`z`) is cut to the quarter
//! with `y <= c_y` and `z <= c_z`. Elements lying in a symmetry plane keep
//! half their stiffness, hinges whose axis lies in a plane see their missing
//! wing as the mirror image of the kept one, and nodes in a plane slide on
//! it. For symmetric deformations the reduced energy is exactly a quarter of
//! the full energy.

use super::energy::fold_angle;
use super::model::{Bar, BarHingeModel, Hinge, Mirror};
use super::scenario::{sweep, Loading, SweepPoint};
use super::solver::{SolverOptions, Support};
use super::StructuralError;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct QuarterModel {
    pub model: BarHingeModel,
    /// Full-model index of each quarter node.
    pub full_index: Vec<usize>,
    /// Cross-section and mid-length planes.
    pub mirrors: [Mirror; 2],
    /// Per full node: its quarter representative and which mirrors map the
    /// representative onto it (bit 0 = cross-section, bit 1 = mid-length).
    pub images: Vec<(usize, u8)>,
    /// Nodes lying in a symmetry plane, held in it.
    pub plane_supports: Vec<Support>,
    /// Quarter nodes on the first end ring.
    pub end_nodes: Vec<usize>,
}

fn mirror_map(nodes: &[Vec3], m: &Mirror, tol: f64) -> Result<Vec<usize>, StructuralError> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let q = m.apply(*p);
            nodes.iter().position(|r| (r - q).norm() <= tol).ok_or_else(|| {
                StructuralError::NotSymmetric(format!("node {i} has no mirror image about axis {}", m.axis))
            })
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

fn check_elements(full: &BarHingeModel, maps: &[Vec<usize>; 2]) -> Result<(), StructuralError> {
    for map in maps {
        for bar in &full.bars {
            let (a, b) = (map[bar.a], map[bar.b]);
            let found = full
                .bars
                .iter()
                .any(|o| ((o.a, o.b) == (a, b) || (o.a, o.b) == (b, a)) && close(o.stiffness, bar.stiffness));
            if !found {
                return Err(StructuralError::NotSymmetric(format!("bar {}-{} has no mirror image", bar.a, bar.b)));
            }
        }
        for h in &full.hinges {
            let (a, b) = (map[h.nodes[1]], map[h.nodes[2]]);
            let found = full.hinges.iter().any(|o| {
                let axis = (o.nodes[1], o.nodes[2]);
                (axis == (a, b) || axis == (b, a)) && close(o.stiffness, h.stiffness)
            });
            if !found {
                return Err(StructuralError::NotSymmetric(format!(
                    "hinge on {}-{} has no mirror image",
                    h.nodes[1], h.nodes[2]
                )));
            }
        }
    }
    Ok(())
}

impl QuarterModel {
    pub fn new(full: &BarHingeModel) -> Result<Self, StructuralError> {
        let nodes = &full.nodes;
        let (lo, hi) = crate::mesh::bounding_box(nodes)
            .ok_or_else(|| StructuralError::InvalidParameter("model has no nodes".into()))?;
        let tol = 1e-9 * (hi - lo).norm().max(1.0);
        let mirrors =
            [Mirror { axis: 1, offset: 0.5 * (lo.y + hi.y) }, Mirror { axis: 2, offset: 0.5 * (lo.z + hi.z) }];
        let maps = [mirror_map(nodes, &mirrors[0], tol)?, mirror_map(nodes, &mirrors[1], tol)?];
        check_elements(full, &maps)?;

        let on_plane = |i: usize, m: usize| (nodes[i][mirrors[m].axis] - mirrors[m].offset).abs() <= tol;
        let inside = |i: usize| (0..2).all(|m| nodes[i][mirrors[m].axis] <= mirrors[m].offset + tol);
        let full_index: Vec<usize> = (0..nodes.len()).filter(|&i| inside(i)).collect();
        let mut local = vec![usize::MAX; nodes.len()];
        for (q, &i) in full_index.iter().enumerate() {
            local[i] = q;
        }
        let images = (0..nodes.len())
            .map(|i| {
                (0u8..4)
                    .find_map(|flags| {
                        let mut j = i;
                        for (m, map) in maps.iter().enumerate() {
                            if flags & (1 << m) != 0 {
                                j = map[j];
                            }
                        }
                        (local[j] != usize::MAX).then_some((local[j], flags))
                    })
                    .expect("every node has an image in the quarter")
            })
            .collect();
        // halves per plane containing all the given nodes
        let weight = |ids: &[usize]| (0..2).filter(|&m| ids.iter().all(|&i| on_plane(i, m))).fold(1.0, |w, _| w * 0.5);

        let bars = full
            .bars
            .iter()
            .filter(|b| inside(b.a) && inside(b.b))
            .map(|b| Bar { a: local[b.a], b: local[b.b], stiffness: b.stiffness * weight(&[b.a, b.b]), ..*b })
            .collect();

        let mut hinges = Vec::new();
        for h in &full.hinges {
            let [w0, p, q, w3] = h.nodes;
            if !(inside(p) && inside(q)) {
                continue;
            }
            let (nodes4, mirror) = match (inside(w0), inside(w3)) {
                (true, true) => ([w0, p, q, w3], None),
                (true, false) | (false, true) => {
                    let (kept, lost, order) =
                        if inside(w0) { (w0, w3, [w0, p, q, w0]) } else { (w3, w0, [w3, q, p, w3]) };
                    let Some(m) = (0..2).find(|&m| on_plane(p, m) && on_plane(q, m) && maps[m][kept] == lost) else {
                        return Err(StructuralError::NotSymmetric(format!("hinge on {p}-{q} straddles the quarter")));
                    };
                    (order, Some(mirrors[m]))
                }
                (false, false) => continue,
            };
            let w = if mirror.is_some() { weight(&[p, q]) } else { weight(&nodes4) };
            let mut pts = nodes4.map(|i| nodes[i]);
            if let Some(m) = mirror {
                pts[3] = m.apply(pts[3]);
            }
            hinges.push(Hinge {
                nodes: nodes4.map(|i| local[i]),
                rest_angle: fold_angle(&pts),
                stiffness: h.stiffness * w,
                mirrored_wing: mirror,
                ..*h
            });
        }

        let triangles =
            full.triangles.iter().filter(|t| t.iter().all(|&i| inside(i))).map(|t| t.map(|i| local[i])).collect();
        let end_nodes: Vec<usize> = full.end_rings[0].iter().filter(|&&i| inside(i)).map(|&i| local[i]).collect();
        let plane_supports = full_index
            .iter()
            .enumerate()
            .filter_map(|(qi, &i)| {
                let fixed = [false, on_plane(i, 0), on_plane(i, 1)];
                fixed.iter().any(|&f| f).then(|| {
                    let mut position = Vec3::zeros();
                    position.y = mirrors[0].offset;
                    position.z = mirrors[1].offset;
                    Support { node: qi, position, fixed }
                })
            })
            .collect();
        let model = BarHingeModel {
            nodes: full_index.iter().map(|&i| nodes[i]).collect(),
            bars,
            hinges,
            triangles,
            end_rings: [end_nodes.clone(), Vec::new()],
            axis: full.axis,
        };
        Ok(Self { model, full_index, mirrors, images, plane_supports, end_nodes })
    }

    /// Full-model positions generated from quarter positions.
    pub fn expand(&self, quarter: &[Vec3]) -> Vec<Vec3> {
        self.images
            .iter()
            .map(|&(q, flags)| {
                let mut p = quarter[q];
                for m in 0..2 {
                    if flags & (1 << m) != 0 {
                        p = self.mirrors[m].apply(p);
                    }
                }
                p
            })
            .collect()
    }

    /// Tension matching the full model pulled by `d` at its far end: the
    /// quarter's end ring moves by `-d/2` towards the mid-length plane and
    /// the reported force is the work conjugate of `d`.
    pub fn tensile_loading(&self) -> Loading {
        let mut supports = Vec::new();
        let mut rates = Vec::new();
        for &i in &self.end_nodes {
            supports.push(Support::pinned(i, self.model.nodes[i]));
            rates.push(-0.5 * self.model.axis);
        }
        for s in &self.plane_supports {
            if !self.end_nodes.contains(&s.node) {
                supports.push(*s);
                rates.push(Vec3::zeros());
            }
        }
        Loading { supports, rates }
    }

    pub fn tensile_sweep(
        &self,
        displacements: &[f64],
        options: &SolverOptions,
    ) -> Result<Vec<SweepPoint>, StructuralError> {
        sweep(&self.model, &self.tensile_loading(), displacements, options)
    }
}
