use std::io::Write;
use std::path::{Path, PathBuf};

use super::model::{BarHingeModel, DEFAULT_CREASE_SCALE, DEFAULT_THICKNESS_MM};
use super::solver::{minimize_energy_from, Equilibrium, SolverOptions, Support};
use super::StructuralError;
use crate::config::Config;
use crate::geometry::stl::export_stl;
use crate::mesh::TriMesh;
use crate::Vec3;

/// Supports whose targets move linearly with a load parameter `d`:
/// `target(d) = position + d * rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct Loading {
    pub supports: Vec<Support>,
    pub rates: Vec<Vec3>,
}

impl Loading {
    pub fn at(&self, d: f64) -> Vec<Support> {
        self.supports.iter().zip(&self.rates).map(|(s, r)| Support { position: s.position + d * r, ..*s }).collect()
    }

    /// Generalized force conjugate to `d`, i.e. `dE/dd` at equilibrium.
    pub fn force(&self, eq: &Equilibrium) -> f64 {
        eq.reactions.iter().zip(&self.rates).map(|((_, r), rate)| r.dot(rate)).sum()
    }
}

impl BarHingeModel {
    /// First end ring held, last end ring pulled along the axis.
    pub fn tensile_loading(&self) -> Loading {
        let mut supports = Vec::new();
        let mut rates = Vec::new();
        for &i in &self.end_rings[0] {
            supports.push(Support::pinned(i, self.nodes[i]));
            rates.push(Vec3::zeros());
        }
        for &i in &self.end_rings[1] {
            supports.push(Support::pinned(i, self.nodes[i]));
            rates.push(self.axis);
        }
        Loading { supports, rates }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// mm.
    pub displacement: f64,
    /// N.
    pub force: f64,
    /// N·mm.
    pub energy: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub positions: Vec<Vec3>,
}

/// Equilibria along ascending load parameters, each warm-started from the
/// previous one.
pub fn sweep(
    model: &BarHingeModel,
    loading: &Loading,
    displacements: &[f64],
    options: &SolverOptions,
) -> Result<Vec<SweepPoint>, StructuralError> {
    if displacements.iter().any(|d| !d.is_finite()) {
        return Err(StructuralError::InvalidParameter("non-finite displacement".into()));
    }
    if displacements.windows(2).any(|w| w[1] < w[0]) {
        return Err(StructuralError::InvalidParameter("displacements must be sorted ascending".into()));
    }
    let mut start = model.nodes.clone();
    let mut out = Vec::with_capacity(displacements.len());
    for &d in displacements {
        let eq = minimize_energy_from(model, &loading.at(d), &start, options)?;
        log::info!("displacement {d:.4} mm: energy {:.6e} N·mm, {} iterations", eq.energy, eq.iterations);
        start.clone_from(&eq.positions);
        out.push(SweepPoint {
            displacement: d,
            force: loading.force(&eq),
            energy: eq.energy,
            iterations: eq.iterations,
            gradient_norm: eq.gradient_norm,
            positions: eq.positions,
        });
    }
    Ok(out)
}

/// Axial tension: first ring held, last ring pulled by each displacement.
pub fn tensile_sweep(model: &BarHingeModel, displacements: &[f64]) -> Result<Vec<SweepPoint>, StructuralError> {
    sweep(model, &model.tensile_loading(), displacements, &SolverOptions::default())
}

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<(), StructuralError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| StructuralError::Io(std::io::Error::other(e));
    w.write_record(["displacement_mm", "force_N", "energy_Nmm"]).map_err(io)?;
    for p in points {
        w.write_record([format!("{:.6}", p.displacement), format!("{:.9e}", p.force), format!("{:.9e}", p.energy)])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one closed STL per sweep point as `{stem}_{index:03}.stl`.
pub fn write_sweep_frames(
    model: &BarHingeModel,
    points: &[SweepPoint],
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>, StructuralError> {
    let mut paths = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let mesh = TriMesh::new(p.positions.clone(), model.triangles.clone()).capped();
        let path = dir.join(format!("{stem}_{i:03}.stl"));
        let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        export_stl(&mesh, &mut file)?;
        file.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

/// Settings read from a scenario config file.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationScenario {
    pub thickness_mm: f64,
    pub crease_scale: f64,
    pub displacement_start_mm: f64,
    pub displacement_stop_mm: f64,
    /// Number of displacement points, both ends included.
    pub displacement_steps: usize,
}

impl Default for SimulationScenario {
    fn default() -> Self {
        Self {
            thickness_mm: DEFAULT_THICKNESS_MM,
            crease_scale: DEFAULT_CREASE_SCALE,
            displacement_start_mm: 0.0,
            displacement_stop_mm: 1.0,
            displacement_steps: 11,
        }
    }
}

impl SimulationScenario {
    pub const KEYS: [&'static str; 5] =
        ["thickness_mm", "crease_scale", "displacement_start_mm", "displacement_stop_mm", "displacement_steps"];

    pub fn from_config(cfg: &Config) -> Result<Self, StructuralError> {
        let d = Self::default();
        let bad = |e: crate::config::ConfigError| StructuralError::InvalidParameter(e.to_string());
        let s = Self {
            thickness_mm: cfg.get_or("thickness_mm", d.thickness_mm).map_err(bad)?,
            crease_scale: cfg.get_or("crease_scale", d.crease_scale).map_err(bad)?,
            displacement_start_mm: cfg.get_or("displacement_start_mm", d.displacement_start_mm).map_err(bad)?,
            displacement_stop_mm: cfg.get_or("displacement_stop_mm", d.displacement_stop_mm).map_err(bad)?,
            displacement_steps: cfg.get_or("displacement_steps", d.displacement_steps).map_err(bad)?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), StructuralError> {
        if self.displacement_steps == 0 {
            return Err(StructuralError::InvalidParameter("displacement_steps must be at least 1".into()));
        }
        if !(self.displacement_start_mm.is_finite() && self.displacement_stop_mm.is_finite()) {
            return Err(StructuralError::InvalidParameter("displacements must be finite".into()));
        }
        if self.displacement_stop_mm < self.displacement_start_mm {
            return Err(StructuralError::InvalidParameter(
                "displacement_stop_mm is below displacement_start_mm".into(),
            ));
        }
        if self.displacement_steps == 1 && self.displacement_stop_mm != self.displacement_start_mm {
            return Err(StructuralError::InvalidParameter(
                "a single step needs displacement_start_mm == displacement_stop_mm".into(),
            ));
        }
        Ok(())
    }

    pub fn displacements(&self) -> Vec<f64> {
        let n = self.displacement_steps;
        if n == 1 {
            return vec![self.displacement_start_mm];
        }
        let span = self.displacement_stop_mm - self.displacement_start_mm;
        (0..n).map(|i| self.displacement_start_mm + span * i as f64 / (n - 1) as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_tube, make_quad_section, TubeSpec};
    use crate::material::OgdenParams;
    use crate::structural::model::{build_bar_hinge, build_bar_hinge_with, Triangulation};
    use crate::structural::quarter::QuarterModel;

    fn tube(n: usize) -> crate::geometry::TubeGeometry {
        let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).unwrap();
        generate_tube(&TubeSpec::new(cs, 45.0, 15.0, n)).unwrap()
    }

    #[test]
    fn zero_displacement_zero_force() {
        let m = build_bar_hinge(&tube(3), &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).unwrap();
        let pts = tensile_sweep(&m, &[0.0]).unwrap();
        assert!(pts[0].force.abs() < 1e-8);
        assert_eq!(pts[0].energy, 0.0);
    }

    #[test]
    fn force_grows_before_buckling() {
        let m = build_bar_hinge(&tube(3), &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).unwrap();
        let pts = tensile_sweep(&m, &[0.0, 0.1, 0.2, 0.3, 0.4]).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].force >= w[0].force, "{} then {}", w[0].force, w[1].force);
            assert!(w[1].energy > w[0].energy);
        }
        // force is the energy slope
        let slope = (pts[4].energy - pts[2].energy) / 0.2;
        assert!((slope - pts[3].force).abs() < 0.02 * pts[3].force);
    }

    #[test]
    fn unsorted_displacements_rejected() {
        let m = build_bar_hinge(&tube(1), &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).unwrap();
        assert!(matches!(tensile_sweep(&m, &[0.2, 0.1]), Err(StructuralError::InvalidParameter(_))));
    }

    #[test]
    fn quarter_force_matches_full() {
        let full =
            build_bar_hinge_with(&tube(3), &OgdenParams::ELASTIC_RESIN, 1.0, 0.01, Triangulation::UnionJack).unwrap();
        let q = QuarterModel::new(&full).unwrap();
        let d = [0.0, 0.25, 0.5];
        let f = tensile_sweep(&full, &d).unwrap();
        let r = q.tensile_sweep(&d, &SolverOptions::default()).unwrap();
        assert!(r[0].force.abs() < 1e-8);
        for (a, b) in f.iter().zip(&r).skip(1) {
            assert!((b.force - a.force / 4.0).abs() < 0.02 * a.force / 4.0, "{} vs {}", b.force, a.force);
            assert!((b.energy - a.energy / 4.0).abs() < 0.02 * a.energy / 4.0);
        }
    }

    #[test]
    fn csv_and_frames() {
        let m = build_bar_hinge(&tube(1), &OgdenParams::ELASTIC_RESIN, 1.0, 0.01).unwrap();
        let pts = tensile_sweep(&m, &[0.0, 0.2]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("displacement_mm,force_N,energy_Nmm\n"));
        assert_eq!(text.lines().count(), 3);
        let dir = std::env::temp_dir().join(format!("oritube-frames-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let paths = write_sweep_frames(&m, &pts, &dir, "frame").unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            let tris = crate::geometry::stl::read_stl(&mut std::fs::File::open(p).unwrap()).unwrap();
            assert!(crate::geometry::stl::weld(&tris).is_watertight());
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn scenario_config() {
        let cfg = Config::parse("thickness_mm = 2\ndisplacement_stop_mm = 2\ndisplacement_steps = 5").unwrap();
        let s = SimulationScenario::from_config(&cfg).unwrap();
        assert_eq!(s.thickness_mm, 2.0);
        assert_eq!(s.displacements(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let zero = SimulationScenario { displacement_stop_mm: 0.0, displacement_steps: 1, ..s.clone() };
        assert_eq!(zero.displacements(), vec![0.0]);
        let bad = Config::parse("displacement_steps = 0").unwrap();
        assert!(SimulationScenario::from_config(&bad).is_err());
        let back = Config::parse("displacement_start_mm = 1\ndisplacement_stop_mm = 0").unwrap();
        assert!(SimulationScenario::from_config(&back).is_err());
    }
}
