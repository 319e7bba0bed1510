use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coincident points: direction is undefined")]
    CoincidentPoints,
    #[error("step length must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("stretch must be at least 1, got {0}")]
    InvalidStretch(f64),
    #[error("point lies inside the aggregate (distance {distance} <= radius {radius})")]
    InsideAggregate { distance: f64, radius: f64 },
    #[error("world radius must be positive, got {0}")]
    EmptyWorld(f64),
    #[error("scale factor must exceed 1, got {0}")]
    DegenerateScale(f64),
    #[error("base radius r0 must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("world radius R = {world} is smaller than base radius r0 = {r0}; need R >= r0")]
    WorldBelowBase { world: f64, r0: f64 },
    #[error("point ({x}, {y}) lies outside the world ball of radius {radius}")]
    OutsideWorld { x: f64, y: f64, radius: f64 },
    #[error("angular size must lie strictly inside (0, pi/2), got {0}")]
    DegenerateAngle(f64),
    #[error("invalid routing parameters: {0}")]
    InvalidParams(String),
    #[error("routing hole: no usable aggregate contains ({x}, {y})")]
    RoutingHole { x: f64, y: f64 },
    #[error("route exceeded {0} steps")]
    StepLimitExceeded(usize),
    #[error("invalid experiment configuration: {0}")]
    InvalidExperiment(String),
    #[error("malformed record on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
