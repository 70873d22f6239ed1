//! Adjunction-inequality prohibitions for mutual arrangements of two real
//! projective curves.

pub mod adjunction;
pub mod cli;
pub mod engine;
pub mod geometry;
pub mod index;
pub mod scenario;
pub mod scheme;
pub mod smoothing;
pub mod surface;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Curve(#[from] geometry::CurveProblem),
    #[error(transparent)]
    Smoothing(#[from] smoothing::SmoothingError),
    #[error(transparent)]
    Region(#[from] surface::RegionError),
    #[error(transparent)]
    Structure(#[from] surface::StructureError),
    #[error(transparent)]
    Index(#[from] index::IndexError),
    #[error(transparent)]
    Bound(#[from] adjunction::BoundError),
    #[error(transparent)]
    Scheme(#[from] scheme::SchemeError),
    #[error(transparent)]
    Scenario(#[from] scenario::ScenarioError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of invariants that valid input can never trigger.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Region(_) | Error::Structure(_) | Error::Index(_) => true,
            Error::Smoothing(e) => matches!(e, smoothing::SmoothingError::MalformedCrossing(_)),
            _ => false,
        }
    }
}
