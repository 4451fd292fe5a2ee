//! The asymmetric CAPM analysis: three betas, classifications, hedges.
//!
//! Alongside the standard beta (all returns), an upside beta is estimated
//! from the positive components and a downside beta from the negative
//! components, each by regressing the asset's censored series on the
//! market's censored series over the full sample length.
//!
//! Position-dependent hedging follows the risk attribution of the model:
//! falling prices are the risk of a long position, so its asymmetric hedge
//! ratio is the downside beta; rising prices are the risk of a short
//! position, so its ratio is the upside beta. The report always carries
//! both asymmetric betas, so the opposite pairing can be read off if a
//! user prefers it.

use chrono::NaiveDate;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::diagnostics::{
    breusch_godfrey, breusch_pagan, jarque_bera, DiagnosticOutcome, DiagnosticReport, TestName,
};
use crate::distributions::TailProbability;
use crate::error::{Error, Result};
use crate::ingest::AlignedPair;
use crate::regression::{ols_fit, OlsFit};
use crate::returns::{compute_returns, decompose, excess_returns, ReturnMethod, ReturnSeries};

/// Which beta a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKind {
    Symmetric,
    Upside,
    Downside,
}

impl BetaKind {
    pub fn label(self) -> &'static str {
        match self {
            BetaKind::Symmetric => "symmetric",
            BetaKind::Upside => "upside",
            BetaKind::Downside => "downside",
        }
    }

    /// Row/column label used in reports: `beta`, `beta_plus`, `beta_minus`.
    pub fn model_label(self) -> &'static str {
        match self {
            BetaKind::Symmetric => "beta",
            BetaKind::Upside => "beta_plus",
            BetaKind::Downside => "beta_minus",
        }
    }

    fn market_series_label(self) -> &'static str {
        match self {
            BetaKind::Symmetric => "market return",
            BetaKind::Upside => "positive market component",
            BetaKind::Downside => "negative market component",
        }
    }
}

/// How a beta value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMethod {
    Ols,
    Moment,
}

/// A beta estimate with its inference.
#[derive(Debug, Clone)]
pub struct BetaEstimate {
    pub kind: BetaKind,
    pub value: f64,
    pub se: f64,
    pub t_stat: f64,
    pub p_value: TailProbability,
    pub n: usize,
    pub method: EstimationMethod,
}

impl Serialize for BetaEstimate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // `value` keeps full binary precision; `display` mirrors the
        // six-decimal text rendering.
        let mut s = serializer.serialize_struct("BetaEstimate", 8)?;
        s.serialize_field("kind", &self.kind)?;
        s.serialize_field("value", &self.value)?;
        s.serialize_field("display", &format!("{:.6}", self.value))?;
        s.serialize_field("se", &self.se)?;
        s.serialize_field("t_stat", &self.t_stat)?;
        s.serialize_field("p_value", &self.p_value)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("method", &self.method)?;
        s.end()
    }
}

/// The three betas of one analysis.
#[derive(Debug, Clone, Serialize)]
pub struct BetaSet {
    pub symmetric: BetaEstimate,
    pub upside: BetaEstimate,
    pub downside: BetaEstimate,
}

impl BetaSet {
    pub fn get(&self, kind: BetaKind) -> &BetaEstimate {
        match kind {
            BetaKind::Symmetric => &self.symmetric,
            BetaKind::Upside => &self.upside,
            BetaKind::Downside => &self.downside,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &BetaEstimate> {
        [&self.symmetric, &self.upside, &self.downside].into_iter()
    }
}

/// Risk relative to the market, where the market's own beta is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MarketRelation {
    RiskierThanMarket,
    AsRiskyAsMarket,
    LessRiskyThanMarket,
}

impl MarketRelation {
    pub fn describe(self) -> &'static str {
        match self {
            MarketRelation::RiskierThanMarket => "riskier than the market",
            MarketRelation::AsRiskyAsMarket => "as risky as the market",
            MarketRelation::LessRiskyThanMarket => "less risky than the market",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RiskClassification {
    pub kind: BetaKind,
    pub relation: MarketRelation,
}

/// Spot position held by the trader.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Long,
    Short,
}

/// Futures side that offsets the spot position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FuturesSide {
    ShortFutures,
    LongFutures,
}

/// Which beta feeds the hedge ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeBasis {
    Symmetric,
    Asymmetric,
}

/// Futures units per unit of spot, and on which side.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HedgeRecommendation {
    pub position: Position,
    pub futures_side: FuturesSide,
    /// Futures units per unit of spot exposure.
    pub ratio: f64,
    /// The beta the ratio came from.
    pub basis_beta: BetaKind,
}

/// Where the constant risk-free rate enters relative to the min/max split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcessConvention {
    /// Decompose the raw returns. The constant rate then only shifts the
    /// censored series, which moves neither slope nor residuals, so the
    /// asymmetric betas are estimated from the raw components directly.
    AfterDecomposition,
    /// Subtract the rate from returns first and decompose the excess
    /// series. This moves the censoring boundary and changes the betas.
    BeforeDecomposition,
}

/// Settings for [`run_analysis`].
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisConfig {
    pub return_method: ReturnMethod,
    /// Constant per-period risk-free rate; zero means raw returns.
    pub risk_free: f64,
    pub excess_convention: ExcessConvention,
    /// Breusch-Godfrey lag order.
    pub bg_lags: usize,
    /// Half-width of the "as risky as the market" band around beta = 1.
    pub classification_tolerance: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            return_method: ReturnMethod::Simple,
            risk_free: 0.0,
            excess_convention: ExcessConvention::AfterDecomposition,
            bg_lags: 1,
            classification_tolerance: 1e-9,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.risk_free.is_finite() {
            return Err(Error::Domain {
                what: format!("risk-free rate must be finite, got {}", self.risk_free),
            });
        }
        if self.bg_lags == 0 {
            return Err(Error::Domain {
                what: "Breusch-Godfrey lag order must be at least 1".to_string(),
            });
        }
        if !(self.classification_tolerance > 0.0) {
            return Err(Error::Domain {
                what: format!(
                    "classification tolerance must be positive, got {}",
                    self.classification_tolerance
                ),
            });
        }
        Ok(())
    }
}

/// First and last date of the aligned sample.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

/// Everything one analysis produces.
#[derive(Debug, Clone, Serialize)]
pub struct CapmReport {
    pub schema_version: u32,
    pub asset_id: String,
    pub market_id: String,
    pub window: DateWindow,
    pub n_observations: usize,
    pub n_returns: usize,
    pub return_method: ReturnMethod,
    pub risk_free: f64,
    pub excess_convention: ExcessConvention,
    pub betas: BetaSet,
    pub classifications: Vec<RiskClassification>,
    pub diagnostics: Vec<DiagnosticReport>,
    pub hedges: Vec<HedgeRecommendation>,
}

/// Schema version stamped into every report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

fn check_aligned_returns(r_i: &ReturnSeries, r_m: &ReturnSeries) -> Result<()> {
    if r_i.len() != r_m.len() {
        return Err(Error::LengthMismatch {
            left: r_i.len(),
            right: r_m.len(),
        });
    }
    if !r_i.dates().eq(r_m.dates()) {
        return Err(Error::MisalignedPair);
    }
    Ok(())
}

fn beta_from_fit(kind: BetaKind, y: &[f64], x: &[f64]) -> Result<(BetaEstimate, OlsFit)> {
    let fit = ols_fit(y, x).map_err(|e| match e {
        Error::ZeroVariance { .. } => Error::ZeroVariance {
            series: kind.market_series_label().to_string(),
        },
        other => other,
    })?;
    let estimate = BetaEstimate {
        kind,
        value: fit.slope,
        se: fit.se_slope,
        t_stat: fit.t_slope,
        p_value: fit.p_slope,
        n: fit.n,
        method: EstimationMethod::Ols,
    };
    Ok((estimate, fit))
}

/// Standard beta: (optionally excess) asset returns regressed on market
/// returns.
pub fn estimate_symmetric(
    r_i: &ReturnSeries,
    r_m: &ReturnSeries,
    risk_free: f64,
) -> Result<(BetaEstimate, OlsFit)> {
    check_aligned_returns(r_i, r_m)?;
    let y = excess_returns(r_i, risk_free)?.values();
    let x = excess_returns(r_m, risk_free)?.values();
    beta_from_fit(BetaKind::Symmetric, &y, &x)
}

/// Upside and downside betas from the censored component series.
///
/// Under [`ExcessConvention::AfterDecomposition`] (the default) the raw
/// returns are decomposed and the rate does not enter the estimation at
/// all; under `BeforeDecomposition` the excess returns are decomposed.
/// A market component with zero variance — e.g. a window with no down
/// months — is reported as an error naming that side.
pub fn estimate_asymmetric(
    r_i: &ReturnSeries,
    r_m: &ReturnSeries,
    risk_free: f64,
    convention: ExcessConvention,
) -> Result<(BetaEstimate, BetaEstimate)> {
    let (up, down) = estimate_asymmetric_fits(r_i, r_m, risk_free, convention)?;
    Ok((up.0, down.0))
}

fn decomposed_components(
    r_i: &ReturnSeries,
    r_m: &ReturnSeries,
    risk_free: f64,
    convention: ExcessConvention,
) -> Result<(crate::returns::DecomposedReturns, crate::returns::DecomposedReturns)> {
    Ok(match convention {
        ExcessConvention::AfterDecomposition => (decompose(r_i), decompose(r_m)),
        ExcessConvention::BeforeDecomposition => (
            decompose(&excess_returns(r_i, risk_free)?),
            decompose(&excess_returns(r_m, risk_free)?),
        ),
    })
}

#[allow(clippy::type_complexity)]
fn estimate_asymmetric_fits(
    r_i: &ReturnSeries,
    r_m: &ReturnSeries,
    risk_free: f64,
    convention: ExcessConvention,
) -> Result<((BetaEstimate, OlsFit), (BetaEstimate, OlsFit))> {
    check_aligned_returns(r_i, r_m)?;
    let (d_i, d_m) = decomposed_components(r_i, r_m, risk_free, convention)?;
    let up = beta_from_fit(BetaKind::Upside, &d_i.plus, &d_m.plus)?;
    let down = beta_from_fit(BetaKind::Downside, &d_i.minus, &d_m.minus)?;
    Ok((up, down))
}

/// Places a beta relative to the market's definitional beta of one.
///
/// `tolerance` is the half-width of the equality band and must be
/// positive.
pub fn classify_risk(beta: &BetaEstimate, tolerance: f64) -> RiskClassification {
    debug_assert!(tolerance > 0.0, "classification tolerance must be positive");
    let relation = if (beta.value - 1.0).abs() <= tolerance {
        MarketRelation::AsRiskyAsMarket
    } else if beta.value > 1.0 {
        MarketRelation::RiskierThanMarket
    } else {
        MarketRelation::LessRiskyThanMarket
    };
    RiskClassification {
        kind: beta.kind,
        relation,
    }
}

/// Hedge ratio for a spot position: futures units per unit of spot.
///
/// A long position is hedged with short futures and a short position with
/// long futures. The symmetric basis uses the standard beta for both
/// positions; the asymmetric basis uses the beta of the returns that
/// actually threaten the position — downside for long, upside for short.
/// Negative betas are rejected: the convention covers non-negative betas
/// only.
pub fn hedge_recommendation(
    position: Position,
    betas: &BetaSet,
    basis: HedgeBasis,
) -> Result<HedgeRecommendation> {
    let basis_kind = match basis {
        HedgeBasis::Symmetric => BetaKind::Symmetric,
        HedgeBasis::Asymmetric => match position {
            Position::Long => BetaKind::Downside,
            Position::Short => BetaKind::Upside,
        },
    };
    let estimate = betas.get(basis_kind);
    if estimate.value < 0.0 {
        return Err(Error::NegativeBeta {
            kind: basis_kind.label(),
            value: estimate.value,
        });
    }
    let futures_side = match position {
        Position::Long => FuturesSide::ShortFutures,
        Position::Short => FuturesSide::LongFutures,
    };
    Ok(HedgeRecommendation {
        position,
        futures_side,
        ratio: estimate.value,
        basis_beta: basis_kind,
    })
}

/// Expected per-period return for a given beta, risk-free rate, and market
/// risk premium.
pub fn expected_return(beta: f64, risk_free: f64, market_premium: f64) -> f64 {
    risk_free + beta * market_premium
}

/// One rolling-window estimate. `None` marks a window whose censored
/// market component (or the market itself) was degenerate — an explicit
/// gap, not a silent skip.
#[derive(Debug, Clone, Serialize)]
pub struct RollingPoint {
    pub date: NaiveDate,
    pub beta: Option<f64>,
    pub beta_plus: Option<f64>,
    pub beta_minus: Option<f64>,
}

/// Re-estimates all three betas over sliding windows of `window` returns,
/// advancing by `step`. Windows are dated by their last return.
pub fn rolling_betas(
    r_i: &ReturnSeries,
    r_m: &ReturnSeries,
    window: usize,
    step: usize,
    risk_free: f64,
    convention: ExcessConvention,
) -> Result<Vec<RollingPoint>> {
    check_aligned_returns(r_i, r_m)?;
    if step == 0 {
        return Err(Error::Domain {
            what: "rolling step must be at least 1".to_string(),
        });
    }
    if window < 8 {
        return Err(Error::WindowTooSmall {
            min: 8,
            got: window,
        });
    }
    let n = r_i.len();
    if window > n {
        return Err(Error::WindowTooLarge { window, sample: n });
    }

    let y_all = excess_returns(r_i, risk_free)?.values();
    let x_all = excess_returns(r_m, risk_free)?.values();
    let (d_i, d_m) = decomposed_components(r_i, r_m, risk_free, convention)?;
    let dates: Vec<NaiveDate> = r_i.dates().collect();

    let slope_or_gap = |y: &[f64], x: &[f64]| -> Result<Option<f64>> {
        match ols_fit(y, x) {
            Ok(fit) => Ok(Some(fit.slope)),
            Err(Error::ZeroVariance { .. }) => Ok(None),
            Err(other) => Err(other),
        }
    };

    let mut points = Vec::new();
    let mut start = 0;
    while start + window <= n {
        let end = start + window;
        points.push(RollingPoint {
            date: dates[end - 1],
            beta: slope_or_gap(&y_all[start..end], &x_all[start..end])?,
            beta_plus: slope_or_gap(&d_i.plus[start..end], &d_m.plus[start..end])?,
            beta_minus: slope_or_gap(&d_i.minus[start..end], &d_m.minus[start..end])?,
        });
        start += step;
    }
    Ok(points)
}

fn diagnostic_battery(
    model_label: &str,
    fit: &OlsFit,
    x: &[f64],
    bg_lags: usize,
) -> DiagnosticReport {
    let jb = match jarque_bera(&fit.residuals) {
        Ok(result) => DiagnosticOutcome::Computed { result },
        Err(e) => DiagnosticOutcome::Skipped {
            test: TestName::JarqueBera,
            reason: e.to_string(),
        },
    };
    let bg = match breusch_godfrey(fit, x, bg_lags) {
        Ok(result) => DiagnosticOutcome::Computed { result },
        Err(e) => DiagnosticOutcome::Skipped {
            test: TestName::BreuschGodfrey,
            reason: e.to_string(),
        },
    };
    let bp = match breusch_pagan(fit, x) {
        Ok(result) => DiagnosticOutcome::Computed { result },
        Err(e) => DiagnosticOutcome::Skipped {
            test: TestName::BreuschPagan,
            reason: e.to_string(),
        },
    };
    DiagnosticReport::new(model_label, vec![jb, bg, bp])
        .expect("battery is constructed in canonical order")
}

/// End-to-end analysis of an aligned price pair: returns, decomposition,
/// three regressions with inference, per-regression diagnostics,
/// classifications, and the hedge table.
///
/// Diagnostics that cannot run on the sample (too few observations,
/// degenerate residuals) appear as explicit skipped markers; estimation
/// failures abort with the failing stage named.
pub fn run_analysis(pair: &AlignedPair, config: &AnalysisConfig) -> Result<CapmReport> {
    config.validate()?;

    let r_i = compute_returns(pair.asset(), config.return_method);
    let r_m = compute_returns(pair.market(), config.return_method);

    let y_sym = excess_returns(&r_i, config.risk_free)
        .map_err(|e| e.at_stage("returns"))?
        .values();
    let x_sym = excess_returns(&r_m, config.risk_free)
        .map_err(|e| e.at_stage("returns"))?
        .values();
    let (beta_sym, fit_sym) = beta_from_fit(BetaKind::Symmetric, &y_sym, &x_sym)
        .map_err(|e| e.at_stage("symmetric estimation"))?;

    let (d_i, d_m) = decomposed_components(&r_i, &r_m, config.risk_free, config.excess_convention)
        .map_err(|e| e.at_stage("decomposition"))?;
    let (beta_up, fit_up) = beta_from_fit(BetaKind::Upside, &d_i.plus, &d_m.plus)
        .map_err(|e| e.at_stage("asymmetric estimation"))?;
    let (beta_down, fit_down) = beta_from_fit(BetaKind::Downside, &d_i.minus, &d_m.minus)
        .map_err(|e| e.at_stage("asymmetric estimation"))?;

    let betas = BetaSet {
        symmetric: beta_sym,
        upside: beta_up,
        downside: beta_down,
    };

    let diagnostics = vec![
        diagnostic_battery(BetaKind::Symmetric.model_label(), &fit_sym, &x_sym, config.bg_lags),
        diagnostic_battery(BetaKind::Upside.model_label(), &fit_up, &d_m.plus, config.bg_lags),
        diagnostic_battery(BetaKind::Downside.model_label(), &fit_down, &d_m.minus, config.bg_lags),
    ];

    let classifications = betas
        .iter()
        .map(|b| classify_risk(b, config.classification_tolerance))
        .collect();

    let mut hedges = Vec::with_capacity(4);
    for (position, basis) in [
        (Position::Long, HedgeBasis::Symmetric),
        (Position::Short, HedgeBasis::Symmetric),
        (Position::Long, HedgeBasis::Asymmetric),
        (Position::Short, HedgeBasis::Asymmetric),
    ] {
        hedges.push(
            hedge_recommendation(position, &betas, basis).map_err(|e| e.at_stage("hedging"))?,
        );
    }

    Ok(CapmReport {
        schema_version: REPORT_SCHEMA_VERSION,
        asset_id: pair.asset().instrument_id().to_string(),
        market_id: pair.market().instrument_id().to_string(),
        window: DateWindow {
            start: pair.asset().first_date(),
            end: pair.asset().last_date(),
        },
        n_observations: pair.len(),
        n_returns: pair.len() - 1,
        return_method: config.return_method,
        risk_free: config.risk_free,
        excess_convention: config.excess_convention,
        betas,
        classifications,
        diagnostics,
        hedges,
    })
}
