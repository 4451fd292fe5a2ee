//! Position-dependent market risk estimation.
//!
//! The standard CAPM beta treats rising and falling markets alike. This crate
//! additionally estimates an upside beta from the positive return components
//! `max(R, 0)` and a downside beta from the negative components `min(R, 0)`,
//! so that the risk of a long position (hurt by falling prices) and of a
//! short position (hurt by rising prices) can be priced separately.
//!
//! The pipeline:
//!
//! 1. [`ingest`] loads and date-aligns adjusted-close CSV files.
//! 2. [`returns`] turns prices into per-period returns and splits them into
//!    positive/negative components.
//! 3. [`regression`] runs the single-regressor least-squares fits with
//!    classical inference; [`distributions`] supplies the tail probabilities.
//! 4. [`diagnostics`] checks each regression's residuals (Jarque-Bera,
//!    Breusch-Godfrey, Breusch-Pagan).
//! 5. [`capm`] assembles the three betas, risk classifications, and hedge
//!    ratios into a [`capm::CapmReport`]; [`report`] renders it as text or
//!    deterministic JSON.

pub mod capm;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod ingest;
pub mod regression;
pub mod report;
pub mod returns;

pub use error::{Error, Result};
