//! Noise coefficients `Q = (Q_k)` and temporal drivers `Z`.
//!
//! Drivers are piecewise-linear paths on a node grid. Brownian samples,
//! smooth trigonometric paths and their dyadic Wong–Zakai interpolations all
//! share this representation, which makes the second-level lift exact.

mod lift;
mod path;
mod qfield;

pub use lift::{geometric_defect, lift_geometric, GeometricLift};
pub use path::{
    derivative_steps, mollify, sample_brownian, sample_brownian_realization, smooth_driver, uniform_time,
    DriverComponent, DriverPath, DriverTerm, StepFunction,
};
pub use qfield::{make_constant_q, make_streamfunction_q, QField, StreamMode};

#[derive(Debug, thiserror::Error)]
pub enum NoiseError {
    #[error("noise needs at least one coefficient")]
    Empty,
    #[error("stream-function noise requires dimension 2, got {0}")]
    StreamDimension(usize),
    #[error("constant noise vectors must have {expected} components, got {found}")]
    VectorLength { expected: usize, found: usize },
    #[error("path times must be strictly increasing and finite")]
    Times,
    #[error("path values must be finite and have {0} components")]
    Values(usize),
    #[error("segment {0} has zero length")]
    DegenerateSegment(usize),
    #[error("Q_{k} has divergence {div:e}")]
    NotSolenoidal { k: usize, div: f64 },
    #[error(transparent)]
    Table(#[from] crate::io::TableError),
}
