//! Report rendering: human-readable text and deterministic JSON.
//!
//! JSON output is byte-stable for identical inputs: struct field order is
//! fixed, floats carry their shortest round-trip representation, and the
//! six-decimal display strings mirror the text tables. Text numbers print
//! with six decimals; p-values below 1e-5 print as `<0.00001`.

use std::fmt::Write as _;

use crate::capm::{CapmReport, Position, RollingPoint};
use crate::diagnostics::DiagnosticOutcome;

/// Display threshold under which a p-value is shown as `<0.00001`.
const P_DISPLAY_FLOOR: f64 = 1e-5;

/// Six-decimal rendering used across all text tables.
pub fn format_value(v: f64) -> String {
    format!("{v:.6}")
}

/// Renders a p-value for text output.
pub fn format_p(p: f64) -> String {
    if p < P_DISPLAY_FLOOR {
        "<0.00001".to_string()
    } else {
        format!("{p:.6}")
    }
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json(report: &CapmReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    out.push('\n');
    out
}

/// Renders the estimation block, optionally followed by the diagnostics
/// block.
pub fn to_text(report: &CapmReport, include_diagnostics: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Asymmetric CAPM report");
    let _ = writeln!(
        out,
        "  asset: {}   market: {}",
        report.asset_id, report.market_id
    );
    let _ = writeln!(
        out,
        "  window: {} .. {}  ({} observations, {} returns)",
        report.window.start, report.window.end, report.n_observations, report.n_returns
    );
    let _ = writeln!(
        out,
        "  returns: {}   risk-free per period: {}",
        report.return_method,
        format_value(report.risk_free)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Betas");
    let _ = writeln!(
        out,
        "  {:<12} {:>10} {:>10} {:>12} {:>10}   {}",
        "kind", "estimate", "std.err", "t-stat", "p-value", "vs market"
    );
    for (beta, classification) in report.betas.iter().zip(&report.classifications) {
        let _ = writeln!(
            out,
            "  {:<12} {:>10} {:>10} {:>12} {:>10}   {}",
            beta.kind.model_label(),
            format_value(beta.value),
            format_value(beta.se),
            format_value(beta.t_stat),
            format_p(beta.p_value.value()),
            classification.relation.describe()
        );
    }

    if include_diagnostics {
        let _ = writeln!(out);
        let _ = writeln!(out, "Diagnostics (p-values)");
        let _ = write!(out, "  {:<18}", "test");
        for battery in &report.diagnostics {
            let _ = write!(out, " {:>12}", battery.model_label);
        }
        let _ = writeln!(out);

        let mut skipped: Vec<String> = Vec::new();
        for row in 0..3 {
            let name = report.diagnostics[0].results[row].test_name();
            let _ = write!(out, "  {:<18}", name.to_string());
            for battery in &report.diagnostics {
                match &battery.results[row] {
                    DiagnosticOutcome::Computed { result } => {
                        let _ = write!(out, " {:>12}", format_p(result.p_value.value()));
                    }
                    DiagnosticOutcome::Skipped { reason, .. } => {
                        let _ = write!(out, " {:>12}", "n/a");
                        skipped.push(format!(
                            "  ({} skipped for {}: {})",
                            name, battery.model_label, reason
                        ));
                    }
                }
            }
            let _ = writeln!(out);
        }
        for line in skipped {
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

/// Renders the hedge table, optionally restricted to one position.
pub fn hedge_text(report: &CapmReport, position: Option<Position>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Hedge ratios (futures units per unit of spot)");
    let _ = writeln!(
        out,
        "  {:<9} {:<11} {:<14} {:>10}   {}",
        "position", "basis", "futures side", "ratio", "from"
    );
    for hedge in &report.hedges {
        if position.is_some_and(|p| p != hedge.position) {
            continue;
        }
        let basis = match hedge.basis_beta {
            crate::capm::BetaKind::Symmetric => "symmetric",
            _ => "asymmetric",
        };
        let position_label = match hedge.position {
            Position::Long => "long",
            Position::Short => "short",
        };
        let side = match hedge.futures_side {
            crate::capm::FuturesSide::ShortFutures => "short_futures",
            crate::capm::FuturesSide::LongFutures => "long_futures",
        };
        let _ = writeln!(
            out,
            "  {:<9} {:<11} {:<14} {:>10}   {}",
            position_label,
            basis,
            side,
            format_value(hedge.ratio),
            hedge.basis_beta.model_label()
        );
    }
    out
}

/// Expected-return convenience block: R = R_F + beta · premium for each
/// reported beta.
pub fn expected_return_text(report: &CapmReport, market_premium: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Expected per-period return at market premium {}",
        format_value(market_premium)
    );
    for beta in report.betas.iter() {
        let r = crate::capm::expected_return(beta.value, report.risk_free, market_premium);
        let _ = writeln!(
            out,
            "  {:<12} {:>10}",
            beta.kind.model_label(),
            format_value(r)
        );
    }
    out
}

/// Rolling betas as CSV with full-precision values; gaps are empty cells.
pub fn rolling_to_csv(points: &[RollingPoint]) -> String {
    let mut out = String::from("date,beta,beta_plus,beta_minus\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.date,
            cell(p.beta),
            cell(p.beta_plus),
            cell(p.beta_minus)
        );
    }
    out
}

/// Rolling betas as a JSON array; gaps are explicit nulls.
pub fn rolling_to_json(points: &[RollingPoint]) -> String {
    let mut out =
        serde_json::to_string_pretty(points).expect("rolling serialization is infallible");
    out.push('\n');
    out
}
