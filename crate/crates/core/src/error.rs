//! Crate-wide error type.

use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between reading a CSV and printing a report.
///
/// Row numbers count from 1 and include the header row, so the first data
/// row is row 2 — matching what a spreadsheet shows.
#[derive(Debug, Error)]
pub enum Error {
    // -- data ingestion ------------------------------------------------
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("`{path}`: malformed CSV: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("`{path}`: column `{column}` not found in header")]
    MissingColumn { path: PathBuf, column: String },

    #[error("`{path}` row {row}: unparseable date `{value}` (expected YYYY-MM-DD)")]
    InvalidDate {
        path: PathBuf,
        row: usize,
        value: String,
    },

    #[error("`{path}` row {row}: unparseable price `{value}`")]
    InvalidPrice {
        path: PathBuf,
        row: usize,
        value: String,
    },

    #[error("`{path}` row {row}: empty price cell (pass the skip-empty option to drop such rows)")]
    EmptyPrice { path: PathBuf, row: usize },

    #[error("`{path}` row {row}: duplicate date {date}")]
    DuplicateDate {
        path: PathBuf,
        row: usize,
        date: NaiveDate,
    },

    #[error("`{path}` row {row}: non-positive price {value}")]
    NonPositivePrice {
        path: PathBuf,
        row: usize,
        value: f64,
    },

    #[error("price series `{id}`: need at least 2 observations, got {len}")]
    SeriesTooShort { id: String, len: usize },

    #[error("price series `{id}`: dates not strictly increasing at index {index}")]
    NonIncreasingDates { id: String, index: usize },

    #[error("price series `{id}`: price {value} at index {index} is not positive and finite")]
    InvalidSeriesPrice {
        id: String,
        index: usize,
        value: f64,
    },

    #[error("aligned series share only {common} dates; need at least 3")]
    InsufficientOverlap { common: usize },

    #[error("series have different date vectors and cannot form an aligned pair")]
    MisalignedPair,

    // -- estimation ----------------------------------------------------
    #[error("length mismatch: {left} vs {right} observations")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {required} observations, got {actual}")]
    TooFewObservations { required: usize, actual: usize },

    #[error("non-finite value in input series")]
    NonFiniteInput,

    #[error("{series} has zero variance; slope is undefined")]
    ZeroVariance { series: String },

    // -- distributions ---------------------------------------------------
    #[error("domain error: {what}")]
    Domain { what: String },

    #[error("{function} did not converge within {iterations} iterations")]
    NonConvergence {
        function: &'static str,
        iterations: usize,
    },

    // -- diagnostics ---------------------------------------------------
    #[error("residuals have zero variance; {test} is undefined")]
    ZeroVarianceResiduals { test: &'static str },

    #[error("auxiliary design matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },

    // -- capm ------------------------------------------------------------
    #[error("rolling window of {window} exceeds the {sample} available returns")]
    WindowTooLarge { window: usize, sample: usize },

    #[error("rolling window must cover at least {min} returns, got {got}")]
    WindowTooSmall { min: usize, got: usize },

    #[error(
        "{kind} beta is negative ({value:.6}); the hedge-ratio convention only \
         covers non-negative betas, so no futures position is recommended"
    )]
    NegativeBeta { kind: &'static str, value: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Unwraps `Stage` wrappers down to the originating error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
