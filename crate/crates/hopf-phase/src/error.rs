//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by motion validation, geometry, topology and the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A closed motion must return to its start: theta(1) - theta(0) = 2*pi*n
    /// and beta(1) = beta(0).
    #[error("closure violation: {0}")]
    ClosureViolation(String),

    /// beta left the allowed band [0, pi].
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// Radii of both discs must be strictly positive.
    #[error("disc radius must be positive: {name} = {value}")]
    NonPositiveRadius { name: &'static str, value: f64 },

    /// Grid size constraints: at least 256 nodes and an even interval count.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Regularization cut-off must lie in (0, pi/8).
    #[error("epsilon out of range (0, pi/8): {0}")]
    EpsilonOutOfRange(f64),

    /// The frame is undefined where the Gauss vector sits at a pole.
    #[error("degenerate frame: sin(beta) = {0:.3e} below threshold")]
    DegenerateFrame(f64),

    /// Stereographic projection was asked to project its own singular point.
    #[error("curve passes within {tol:.1e} of the projection pole (node {node})")]
    PoleHit { node: usize, tol: f64 },

    /// Winding number query point sits on the polyline.
    #[error("query point lies on the curve (distance {dist:.3e} at segment {segment})")]
    PointOnCurve { segment: usize, dist: f64 },

    /// The curve self-intersects; area/index routes need a simple curve.
    #[error("curve is not simple: segments {0} and {1} intersect")]
    NotSimple(usize, usize),

    /// Chart evaluation outside its domain (excluded homogeneous coordinate
    /// vanishes).
    #[error("chart {chart} undefined here: |z{chart}| = {modulus:.3e}")]
    ChartDomain { chart: u8, modulus: f64 },

    /// A vector claimed tangent to S^3 fails Re<z, v> = 0.
    #[error("vector not tangent to S^3: Re<z,v> = {0:.3e}")]
    TangencyViolation(f64),

    /// The Gauss curve never moves; arclength machinery has nothing to do.
    #[error("degenerate curve: total length {0:.3e}")]
    DegenerateCurve(f64),

    /// Lift of a non-closed motion was requested.
    #[error("motion is not closed: {0}")]
    NotClosed(String),

    /// Loop composition requires a common base point on the sphere.
    #[error("base point mismatch: distance {0:.3e}")]
    BasePointMismatch(f64),

    /// Compass angle moved more than pi/2 between neighbouring nodes; the
    /// grid is too coarse for continuous unwrapping.
    #[error("compass angle jump {jump:.3} rad at node {node}; refine the grid")]
    CompassJump { node: usize, jump: f64 },

    /// Corner (piecewise-linear) motions are outside the smooth-curve
    /// corollary machinery.
    #[error("operation requires a smooth motion; table corners present")]
    CornersUnsupported,

    /// Configuration file / flag problems, with location context.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
