//! Metrics and SVG plots for experiment traces. Also holds the materials catalog.

mod catalog;
mod metrics;
pub mod plot;
mod record;
mod trajectory;

use thiserror::Error;

pub use catalog::{material_catalog, parse_catalog, serialize_catalog, MaterialEntry, ValueRange, BUNDLED_CATALOG};
pub use metrics::{
    force_summary, pressure_displacement, split_steady_segments, step_response_metrics, ForceSummary, PressureCurve,
    StepMetrics, JOIN_WINDOW_S,
};
pub use plot::{render_plot, Series, SeriesStyle};
pub use record::{ExperimentRecord, Sample};
pub use trajectory::{
    load_trajectories, resample_by_arc_length, trajectory_dependency, DirectionDependency, TrajectoryRound,
    RESAMPLE_POINTS,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("no plateau: {0}")]
    NoPlateau(String),
    #[error("duplicate steady pressure {0} kPa")]
    DuplicatePressure(f64),
    #[error("direction {direction} has {rounds} round(s); at least 2 are needed")]
    InsufficientRounds { direction: u8, rounds: usize },
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("nothing to plot")]
    EmptySeries,
    #[error("empty input: {0}")]
    Empty(String),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Bundled synthetic traces of the printed actuator, values ±5 %.
pub mod bundled {
    pub const FORCE_TRACE: &str = include_str!("../../data/force_trace.csv");
    pub const STEP_RESPONSE: &str = include_str!("../../data/step_response.csv");
    pub const PRESSURE_SWEEP: &str = include_str!("../../data/pressure_sweep.csv");
    pub const TRAJECTORIES: &str = include_str!("../../data/trajectories.csv");
    pub const UTM_SYNTHETIC: &str = include_str!("../../data/utm_synthetic.csv");
}
