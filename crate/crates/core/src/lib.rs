//! Parametric toolkit for bi-directional origami-tube actuators.
//!
//! The crate covers the whole pipeline from a planar cross-section to the
//! characterization of a printed actuator:
//!
//! * [`geometry`] builds admissible cross-sections, sweeps them into
//!   Miura-style zigzag tubes, assembles the two-channel lattice, unrolls
//!   crease patterns and writes STL / SVG.
//! * [`folding`] evaluates the one-degree-of-freedom rigid folding motion and
//!   the enclosed volume along it.
//! * [`structural`] is a bar-and-hinge elastic model with an L-BFGS energy
//!   minimizer for displacement-controlled loading.
//! * [`material`] implements the one-term Ogden law and its least-squares fit
//!   to uniaxial tensile data.
//! * [`characterization`] extracts force, step-response, pressure and
//!   trajectory metrics from experiment traces and renders SVG plots.
//!
//! All lengths are millimetres unless a name says otherwise.

// `!(x > 0.0)` style checks are kept so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characterization;
pub mod config;
pub mod folding;
pub mod geometry;
pub mod material;
pub mod mesh;
pub mod structural;

pub use characterization::{ExperimentRecord, MaterialEntry, TrajectoryRound};
pub use folding::{fold_configuration, fold_sweep, FoldError, FoldedState};
pub use geometry::{
    assemble_bidirectional, check_admissible, generate_tube, make_quad_section, unroll_crease_pattern,
    AssemblyGeometry, AssemblySpec, CreaseKind, CreasePattern2D, CrossSection, EdgeGroupReport, GeometryError,
    TubeGeometry, TubeSpec,
};
pub use material::{fit_ogden, FitResult, OgdenParams, StressStrainCurve};
pub use mesh::TriMesh;
pub use structural::{build_bar_hinge, minimize_energy, BarHingeModel, Equilibrium};

/// 3D point / vector type used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 2D point / vector type used for cross-sections and crease patterns.
pub type Vec2 = nalgebra::Vector2<f64>;
