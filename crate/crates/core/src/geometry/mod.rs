//! Cross-sections and the tubes swept from them, with STL and SVG export.

mod assembly;
mod pattern;
mod section;
pub mod stl;
pub mod svg;
mod tube;

use thiserror::Error;

pub use assembly::{assemble_bidirectional, merge_coincident, AssemblyGeometry, AssemblySpec, Channel};
pub use pattern::{unroll_crease_pattern, CreasePattern2D, PatternEdge, PatternPanel};
pub use section::{
    check_admissible, make_quad_section, CrossSection, EdgeGroup, EdgeGroupReport, DEFAULT_LENGTH_TOL, SLOPE_TOL,
};
pub use tube::{generate_tube, Crease, TubeGeometry, TubeSpec};

/// Fold assignment of a mesh edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CreaseKind {
    Mountain,
    Valley,
    /// Edge on the open rim of the surface (one incident panel).
    Boundary,
}

impl CreaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CreaseKind::Mountain => "mountain",
            CreaseKind::Valley => "valley",
            CreaseKind::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("degenerate angles: slope angles {theta1_deg}° and {theta2_deg}° coincide modulo 180°")]
    DegenerateAngles { theta1_deg: f64, theta2_deg: f64 },
    #[error("cross-section is not admissible: {}", .0.join("; "))]
    InadmissibleSection(Vec<String>),
    #[error("degenerate tube specification: {0}")]
    DegenerateSpec(String),
    #[error("surface cannot be unrolled: {0}")]
    NonUnrollable(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("mesh is empty")]
    EmptyMesh,
    #[error("I/O failure: {0}")]
    IoFailure(#[from] std::io::Error),
}
