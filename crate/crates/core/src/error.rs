use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a Young function: {0}")]
    NonYoung(String),

    #[error("complementary maximizer not attained for t = {t} (bracket grew to {bracket:e})")]
    MaximizerDiverged { t: f64, bracket: f64 },

    #[error("liminf decision inconclusive: {0}")]
    Inconclusive(String),

    #[error("domain has zero measure")]
    EmptyDomain,

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("inscribed radius {radius} is below 4 cell widths (h = {h})")]
    TooCoarse { radius: f64, h: f64 },

    #[error("integrand is not integrable near the diagonal (fitted exponent {exponent:.3}, dimension {dim})")]
    NonIntegrableSingularity { exponent: f64, dim: usize },

    #[error("point {point:?} is within one cell width of the boundary (distance {distance:e}, h = {h:e})")]
    OnBoundary { point: Vec<f64>, distance: f64, h: f64 },

    #[error("difference {difference:e} is within the error bound {error:e}")]
    Indistinguishable { difference: f64, error: f64 },

    #[error("comparison hypothesis fails: {0}")]
    CaseHypothesisFails(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDimension(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
