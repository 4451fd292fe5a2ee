//! Per-period returns and their positive/negative decomposition.
//!
//! The decomposition keeps full-length censored series: `plus[t] =
//! max(r[t], 0)` and `minus[t] = min(r[t], 0)`, zeros staying in place.
//! Downside and upside betas are then estimated over all T observations
//! rather than over a subsample of down or up months.

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;

/// Return convention used when differencing prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMethod {
    /// `P[t]/P[t−1] − 1`
    Simple,
    /// `ln(P[t]/P[t−1])`
    Log,
}

impl std::fmt::Display for ReturnMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReturnMethod::Simple => f.write_str("simple"),
            ReturnMethod::Log => f.write_str("log"),
        }
    }
}

/// One dated per-period return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnObservation {
    pub date: NaiveDate,
    pub value: f64,
}

/// Dated per-period returns for one instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    instrument_id: String,
    method: ReturnMethod,
    /// Constant per-period risk-free rate already subtracted (0 when none).
    risk_free: f64,
    observations: Vec<ReturnObservation>,
}

impl ReturnSeries {
    pub fn new(
        instrument_id: impl Into<String>,
        method: ReturnMethod,
        observations: Vec<ReturnObservation>,
    ) -> Result<Self> {
        if observations.iter().any(|o| !o.value.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self {
            instrument_id: instrument_id.into(),
            method,
            risk_free: 0.0,
            observations,
        })
    }

    pub fn instrument_id(&self) -> &str {
        &self.instrument_id
    }

    pub fn method(&self) -> ReturnMethod {
        self.method
    }

    /// The constant rate subtracted so far via [`excess_returns`].
    pub fn risk_free(&self) -> f64 {
        self.risk_free
    }

    pub fn observations(&self) -> &[ReturnObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.observations.iter().map(|o| o.date)
    }
}

/// Elementwise positive and negative components of a return series.
///
/// For every t: `plus[t] + minus[t] = ret[t]` (bitwise — one addend is
/// always zero), `plus[t] · minus[t] = 0`, `plus[t] ≥ 0 ≥ minus[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedReturns {
    pub source: ReturnSeries,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Differences a price series into returns, dated by the later observation.
pub fn compute_returns(prices: &PriceSeries, method: ReturnMethod) -> ReturnSeries {
    let obs = prices.observations();
    let observations = obs
        .windows(2)
        .map(|w| {
            let ratio = w[1].price / w[0].price;
            let value = match method {
                ReturnMethod::Simple => ratio - 1.0,
                ReturnMethod::Log => ratio.ln(),
            };
            ReturnObservation {
                date: w[1].date,
                value,
            }
        })
        .collect();
    ReturnSeries {
        instrument_id: prices.instrument_id().to_string(),
        method,
        risk_free: 0.0,
        observations,
    }
}

/// Splits a return series into its positive and negative components.
pub fn decompose(returns: &ReturnSeries) -> DecomposedReturns {
    let mut plus = Vec::with_capacity(returns.len());
    let mut minus = Vec::with_capacity(returns.len());
    for obs in returns.observations() {
        if obs.value > 0.0 {
            plus.push(obs.value);
            minus.push(0.0);
        } else {
            plus.push(0.0);
            minus.push(obs.value);
        }
    }
    DecomposedReturns {
        source: returns.clone(),
        plus,
        minus,
    }
}

/// Subtracts a constant per-period risk-free rate from every observation.
///
/// The rate is recorded on the result (accumulating across calls) so a
/// report can state what was subtracted.
pub fn excess_returns(returns: &ReturnSeries, risk_free: f64) -> Result<ReturnSeries> {
    if !risk_free.is_finite() {
        return Err(Error::Domain {
            what: format!("risk-free rate must be finite, got {risk_free}"),
        });
    }
    Ok(ReturnSeries {
        instrument_id: returns.instrument_id.clone(),
        method: returns.method,
        risk_free: returns.risk_free + risk_free,
        observations: returns
            .observations
            .iter()
            .map(|o| ReturnObservation {
                date: o.date,
                value: o.value - risk_free,
            })
            .collect(),
    })
}
