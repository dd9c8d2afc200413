use thiserror::Error;

/// Failure modes of the geometric kernel and the metric computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("polar angle undefined at the origin")]
    DegenerateOrigin,
    #[error("point lies on the optical axis (r = {r:e})")]
    DegenerateOnAxis { r: f64 },
    #[error("line passes through the focus; its perspective degenerates")]
    DegenerateLineThroughFocus,
    #[error("segment crosses the optical axis above the focus; its perspective is unbounded")]
    UnboundedImage,
    #[error("section is not an ellipse (|n| = {n_abs})")]
    NotElliptic { n_abs: f64 },
    #[error("point is off the section plane by {distance:e}")]
    NotOnPlane { distance: f64 },
    #[error("parametric span {span} is not below 2*pi")]
    SpanTooLarge { span: f64 },
    #[error("abscissa {u} lies outside [{lo}, {hi}]")]
    OutOfRange { u: f64, lo: f64, hi: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("region inverted: {0}")]
    RegionInverted(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
