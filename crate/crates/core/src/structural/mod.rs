//! Bar-and-hinge elastic model of a single tube.
//!
//! Every quad panel is triangulated. Triangle edges become axial bars and
//! every edge shared by two triangles becomes a rotational spring. Springs on
//! the original panel edges are creases, springs inside a panel resist panel
//! bending. The energy convention is
//!
//! ```text
//! E = Σ_bars ½ k (ℓ − ℓ₀)² + Σ_hinges ½ κ (ψ − ψ₀)²
//! ```
//!
//! with `k` in N/mm, `κ` in N·mm/rad and `ψ` the signed fold angle of a hinge
//! (zero when its two triangles are coplanar).

mod energy;
mod model;
mod quarter;
mod scenario;
mod solver;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use energy::{energy, energy_and_gradient, fold_angle, gradient};
pub use model::{
    build_bar_hinge, build_bar_hinge_with, Bar, BarHingeModel, BarKind, Hinge, HingeKind, Mirror, Triangulation,
    DEFAULT_CREASE_SCALE, DEFAULT_THICKNESS_MM, POISSON_RATIO,
};
pub use quarter::QuarterModel;
pub use scenario::{
    sweep, tensile_sweep, write_sweep_csv, write_sweep_frames, Loading, SimulationScenario, SweepPoint,
};
pub use solver::{minimize_energy, minimize_energy_from, Equilibrium, SolverOptions, Support};

#[derive(Debug, Error)]
pub enum StructuralError {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("under-constrained: {0}")]
    UnderConstrained(String),
    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:.3e} N)")]
    NoConvergence { iterations: usize, gradient_norm: f64 },
    #[error("model is not mirror symmetric: {0}")]
    NotSymmetric(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}
