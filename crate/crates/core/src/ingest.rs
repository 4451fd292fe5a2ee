//! CSV price loading, validation, and date alignment.
//!
//! Input files are UTF-8 comma-separated with one header row, an ISO-8601
//! (`YYYY-MM-DD`) date column and a decimal price column (`.` separator
//! only). Column names default to `date` and `adj_close` but can be
//! remapped. Prices are taken as already split/dividend-adjusted; no
//! corporate-action handling happens here.
//!
//! Dates are matched exactly when aligning two series — monthly data makes
//! exact matching unambiguous, and fuzzy matching invites silent errors.

use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// One dated adjusted-close observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceObservation {
    pub date: NaiveDate,
    pub price: f64,
}

/// Dated adjusted closing prices for one instrument.
///
/// Invariants, enforced on construction: dates strictly increasing, every
/// price positive and finite, at least two observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    instrument_id: String,
    observations: Vec<PriceObservation>,
}

impl PriceSeries {
    pub fn new(instrument_id: impl Into<String>, observations: Vec<PriceObservation>) -> Result<Self> {
        let instrument_id = instrument_id.into();
        if observations.len() < 2 {
            return Err(Error::SeriesTooShort {
                id: instrument_id,
                len: observations.len(),
            });
        }
        for (i, obs) in observations.iter().enumerate() {
            if !(obs.price > 0.0) || !obs.price.is_finite() {
                return Err(Error::InvalidSeriesPrice {
                    id: instrument_id,
                    index: i,
                    value: obs.price,
                });
            }
            if i > 0 && observations[i - 1].date >= obs.date {
                return Err(Error::NonIncreasingDates {
                    id: instrument_id,
                    index: i,
                });
            }
        }
        Ok(Self {
            instrument_id,
            observations,
        })
    }

    pub fn instrument_id(&self) -> &str {
        &self.instrument_id
    }

    pub fn observations(&self) -> &[PriceObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.observations.iter().map(|o| o.date)
    }

    pub fn prices(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.price)
    }

    pub fn first_date(&self) -> NaiveDate {
        self.observations[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.observations[self.observations.len() - 1].date
    }
}

/// Column mapping for price CSVs.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub date_column: String,
    pub price_column: String,
    /// Drop rows whose price cell is empty instead of rejecting the file.
    pub skip_empty_prices: bool,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_column: "date".to_string(),
            price_column: "adj_close".to_string(),
            skip_empty_prices: false,
        }
    }
}

/// Loads a price series from a CSV file.
///
/// Rows may arrive in any order; the result is sorted ascending by date.
/// Every defect — unreadable file, missing column, bad date or price,
/// duplicate date, non-positive price — is reported with its row number
/// (header = row 1).
pub fn load_prices_csv(path: &Path, schema: &CsvSchema) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| {
            if e.is_io_error() {
                match e.into_kind() {
                    csv::ErrorKind::Io(source) => Error::Io {
                        path: path.to_path_buf(),
                        source,
                    },
                    _ => unreachable!("is_io_error guarantees an Io kind"),
                }
            } else {
                Error::Csv {
                    path: path.to_path_buf(),
                    source: e,
                }
            }
        })?;

    let headers = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    let date_idx = headers
        .iter()
        .position(|h| h == schema.date_column)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: schema.date_column.clone(),
        })?;
    let price_idx = headers
        .iter()
        .position(|h| h == schema.price_column)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: schema.price_column.clone(),
        })?;

    // (date, price, original row number); row numbers survive the sort so
    // errors can point back at the file.
    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;

        let date_cell = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_cell, "%Y-%m-%d").map_err(|_| {
            Error::InvalidDate {
                path: path.to_path_buf(),
                row,
                value: date_cell.to_string(),
            }
        })?;

        let price_cell = record.get(price_idx).unwrap_or("");
        if price_cell.is_empty() {
            if schema.skip_empty_prices {
                continue;
            }
            return Err(Error::EmptyPrice {
                path: path.to_path_buf(),
                row,
            });
        }
        let price: f64 = price_cell.parse().map_err(|_| Error::InvalidPrice {
            path: path.to_path_buf(),
            row,
            value: price_cell.to_string(),
        })?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(Error::NonPositivePrice {
                path: path.to_path_buf(),
                row,
                value: price,
            });
        }
        rows.push((date, price, row));
    }

    rows.sort_by_key(|(date, _, _)| *date);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::DuplicateDate {
                path: path.to_path_buf(),
                row: pair[1].2,
                date: pair[1].0,
            });
        }
    }

    let instrument_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    PriceSeries::new(
        instrument_id,
        rows.into_iter()
            .map(|(date, price, _)| PriceObservation { date, price })
            .collect(),
    )
}

/// Renders a price series back to CSV text using the schema's column names.
///
/// Prices are written with the shortest representation that round-trips
/// through `f64`, so load → serialize → load reproduces the series exactly.
pub fn prices_to_csv(series: &PriceSeries, schema: &CsvSchema) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{},{}", schema.date_column, schema.price_column);
    for obs in series.observations() {
        let _ = writeln!(out, "{},{}", obs.date.format("%Y-%m-%d"), obs.price);
    }
    out
}

/// Writes a price series to a CSV file. See [`prices_to_csv`].
pub fn write_prices_csv(series: &PriceSeries, path: &Path, schema: &CsvSchema) -> Result<()> {
    std::fs::write(path, prices_to_csv(series, schema)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// An asset/market pair restricted to identical date vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    asset: PriceSeries,
    market: PriceSeries,
}

impl AlignedPair {
    /// Pairs two series that already share an identical date vector.
    pub fn new(asset: PriceSeries, market: PriceSeries) -> Result<Self> {
        if asset.len() != market.len() || !asset.dates().eq(market.dates()) {
            return Err(Error::MisalignedPair);
        }
        Ok(Self { asset, market })
    }

    pub fn asset(&self) -> &PriceSeries {
        &self.asset
    }

    pub fn market(&self) -> &PriceSeries {
        &self.market
    }

    pub fn len(&self) -> usize {
        self.asset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.asset.is_empty()
    }
}

/// Result of [`align`], with the number of observations dropped per side.
#[derive(Debug, Clone)]
pub struct Alignment {
    pub pair: AlignedPair,
    pub dropped_asset: usize,
    pub dropped_market: usize,
}

/// Restricts both series to the intersection of their date sets,
/// preserving order.
///
/// Errors if fewer than 3 dates remain — differencing would then leave
/// fewer than 2 returns, too few to regress.
pub fn align(asset: &PriceSeries, market: &PriceSeries) -> Result<Alignment> {
    let mut asset_obs = Vec::new();
    let mut market_obs = Vec::new();

    // Both sides are sorted and duplicate-free, so a two-pointer sweep
    // finds the intersection.
    let a = asset.observations();
    let m = market.observations();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < m.len() {
        match a[i].date.cmp(&m[j].date) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                asset_obs.push(a[i]);
                market_obs.push(m[j]);
                i += 1;
                j += 1;
            }
        }
    }

    let common = asset_obs.len();
    if common < 3 {
        return Err(Error::InsufficientOverlap { common });
    }

    let dropped_asset = asset.len() - common;
    let dropped_market = market.len() - common;
    let pair = AlignedPair::new(
        PriceSeries::new(asset.instrument_id(), asset_obs)?,
        PriceSeries::new(market.instrument_id(), market_obs)?,
    )?;
    Ok(Alignment {
        pair,
        dropped_asset,
        dropped_market,
    })
}
