use thiserror::Error;

use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no input points")]
    EmptyInput,
    #[error("duplicate generator at ({}, {})", .0.x, .0.y)]
    DuplicateGenerator(Point),
    #[error("point ({}, {}) lies outside the window", .0.x, .0.y)]
    OutOfWindow(Point),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("death {death} precedes birth {birth}")]
    NegativePersistence { birth: f64, death: f64 },
    #[error("invalid interaction thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("persistence diagram is empty")]
    EmptyDiagram,
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("Fisher information is singular")]
    Singular,
    #[error("IRLS did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
}
