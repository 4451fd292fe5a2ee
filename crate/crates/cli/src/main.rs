//! Command-line front end for the asymmetric CAPM library.
//!
//! Three subcommands: `estimate` (betas with inference, optionally the
//! diagnostic battery), `hedge` (the position/basis hedge table), and
//! `rolling` (windowed re-estimation). Results go to stdout (or `--out`);
//! everything else — alignment notes, errors — goes to stderr.
//!
//! Exit codes are script-friendly: 0 success, 1 usage error, 2 data error,
//! 3 estimation error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use asymcapm::capm::{
    rolling_betas, run_analysis, AnalysisConfig, ExcessConvention, Position,
};
use asymcapm::ingest::{align, load_prices_csv, AlignedPair, CsvSchema};
use asymcapm::report;
use asymcapm::returns::{compute_returns, ReturnMethod};
use asymcapm::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_ESTIMATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "asymcapm",
    version,
    about = "Position-dependent market risk: symmetric and asymmetric CAPM betas, \
             residual diagnostics, and hedge ratios from adjusted-close CSVs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate beta, beta_plus, and beta_minus with full inference
    Estimate(EstimateArgs),
    /// Print hedge ratios per position and basis
    Hedge(HedgeArgs),
    /// Re-estimate all three betas over rolling windows
    Rolling(RollingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReturnMethodArg {
    Simple,
    Log,
}

impl From<ReturnMethodArg> for ReturnMethod {
    fn from(arg: ReturnMethodArg) -> Self {
        match arg {
            ReturnMethodArg::Simple => ReturnMethod::Simple,
            ReturnMethodArg::Log => ReturnMethod::Log,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PositionArg {
    Long,
    Short,
}

impl From<PositionArg> for Position {
    fn from(arg: PositionArg) -> Self {
        match arg {
            PositionArg::Long => Position::Long,
            PositionArg::Short => Position::Short,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Asset price CSV
    #[arg(long, value_name = "PATH")]
    asset: PathBuf,

    /// Market index price CSV
    #[arg(long, value_name = "PATH")]
    market: PathBuf,

    /// Return convention
    #[arg(long, value_enum, default_value_t = ReturnMethodArg::Simple)]
    return_method: ReturnMethodArg,

    /// Constant per-period risk-free rate
    #[arg(long, default_value_t = 0.0)]
    risk_free: f64,

    /// Subtract the risk-free rate before the +/- decomposition
    /// (moves the censoring boundary; default subtracts only where it
    /// cannot affect the betas)
    #[arg(long)]
    excess_before_decompose: bool,

    /// Breusch-Godfrey lag order
    #[arg(long, default_value_t = 1, value_name = "N")]
    bg_lags: usize,

    /// Half-width of the "as risky as the market" band around beta = 1
    #[arg(long, default_value_t = 1e-9, value_name = "TOL")]
    classification_tolerance: f64,

    /// Name of the date column
    #[arg(long, default_value = "date")]
    date_column: String,

    /// Name of the price column
    #[arg(long, default_value = "adj_close")]
    price_column: String,

    /// Drop rows with an empty price cell instead of rejecting the file
    #[arg(long)]
    skip_empty: bool,

    /// Output format
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    output: OutputArg,

    /// Write the result to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Also print the diagnostic battery (text mode)
    #[arg(long)]
    diagnostics: bool,

    /// Also print expected per-period returns for this market risk premium
    #[arg(long, value_name = "PREMIUM")]
    market_premium: Option<f64>,
}

#[derive(Args)]
struct HedgeArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Restrict the table to one position (default: both)
    #[arg(long, value_enum)]
    position: Option<PositionArg>,
}

#[derive(Args)]
struct RollingArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Window length in returns (at least 8)
    #[arg(long, value_name = "N")]
    window: usize,

    /// Step between window starts
    #[arg(long, default_value_t = 1, value_name = "N")]
    step: usize,
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lib(e) => match e.root() {
                Error::Io { .. }
                | Error::Csv { .. }
                | Error::MissingColumn { .. }
                | Error::InvalidDate { .. }
                | Error::InvalidPrice { .. }
                | Error::EmptyPrice { .. }
                | Error::DuplicateDate { .. }
                | Error::NonPositivePrice { .. }
                | Error::SeriesTooShort { .. }
                | Error::NonIncreasingDates { .. }
                | Error::InvalidSeriesPrice { .. }
                | Error::InsufficientOverlap { .. }
                | Error::MisalignedPair => EXIT_DATA,
                // An oversized or undersized window is a request problem,
                // not a data or estimation problem.
                Error::WindowTooLarge { .. } | Error::WindowTooSmall { .. } => EXIT_USAGE,
                _ => EXIT_ESTIMATION,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Hedge(args) => cmd_hedge(args),
        Command::Rolling(args) => cmd_rolling(args),
    }
}

/// Flag validation that must not depend on any file contents.
fn validate_common(common: &CommonArgs) -> Result<(), CliError> {
    if !common.risk_free.is_finite() {
        return Err(CliError::Usage(format!(
            "--risk-free must be finite, got {}",
            common.risk_free
        )));
    }
    if common.bg_lags == 0 {
        return Err(CliError::Usage("--bg-lags must be at least 1".to_string()));
    }
    if !(common.classification_tolerance > 0.0) {
        return Err(CliError::Usage(format!(
            "--classification-tolerance must be positive, got {}",
            common.classification_tolerance
        )));
    }
    Ok(())
}

fn config_from(common: &CommonArgs) -> AnalysisConfig {
    AnalysisConfig {
        return_method: common.return_method.into(),
        risk_free: common.risk_free,
        excess_convention: if common.excess_before_decompose {
            ExcessConvention::BeforeDecomposition
        } else {
            ExcessConvention::AfterDecomposition
        },
        bg_lags: common.bg_lags,
        classification_tolerance: common.classification_tolerance,
    }
}

fn load_pair(common: &CommonArgs) -> Result<AlignedPair, CliError> {
    let schema = CsvSchema {
        date_column: common.date_column.clone(),
        price_column: common.price_column.clone(),
        skip_empty_prices: common.skip_empty,
    };
    let asset = load_prices_csv(&common.asset, &schema)?;
    let market = load_prices_csv(&common.market, &schema)?;
    let alignment = align(&asset, &market)?;
    if alignment.dropped_asset > 0 || alignment.dropped_market > 0 {
        eprintln!(
            "aligned on {} shared dates (dropped {} asset rows, {} market rows)",
            alignment.pair.len(),
            alignment.dropped_asset,
            alignment.dropped_market
        );
    }
    Ok(alignment.pair)
}

fn emit(common: &CommonArgs, content: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, content).map_err(|source| {
            CliError::Lib(Error::Io {
                path: path.clone(),
                source,
            })
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    validate_common(&args.common)?;
    if let Some(premium) = args.market_premium {
        if !premium.is_finite() {
            return Err(CliError::Usage(format!(
                "--market-premium must be finite, got {premium}"
            )));
        }
    }
    let pair = load_pair(&args.common)?;
    let analysis = run_analysis(&pair, &config_from(&args.common))?;

    let content = match args.common.output {
        OutputArg::Json => report::to_json(&analysis),
        OutputArg::Text => {
            let mut text = report::to_text(&analysis, args.diagnostics);
            if let Some(premium) = args.market_premium {
                text.push('\n');
                text.push_str(&report::expected_return_text(&analysis, premium));
            }
            text
        }
    };
    emit(&args.common, &content)
}

fn cmd_hedge(args: HedgeArgs) -> Result<(), CliError> {
    validate_common(&args.common)?;
    let pair = load_pair(&args.common)?;
    let analysis = run_analysis(&pair, &config_from(&args.common))?;

    let content = match args.common.output {
        OutputArg::Json => report::to_json(&analysis),
        OutputArg::Text => report::hedge_text(&analysis, args.position.map(Into::into)),
    };
    emit(&args.common, &content)
}

fn cmd_rolling(args: RollingArgs) -> Result<(), CliError> {
    validate_common(&args.common)?;
    if args.window < 8 {
        return Err(CliError::Usage(format!(
            "--window must be at least 8 returns, got {}",
            args.window
        )));
    }
    if args.step == 0 {
        return Err(CliError::Usage("--step must be at least 1".to_string()));
    }
    let pair = load_pair(&args.common)?;
    let config = config_from(&args.common);
    let r_i = compute_returns(pair.asset(), config.return_method);
    let r_m = compute_returns(pair.market(), config.return_method);
    let points = rolling_betas(
        &r_i,
        &r_m,
        args.window,
        args.step,
        config.risk_free,
        config.excess_convention,
    )?;

    let content = match args.common.output {
        OutputArg::Json => report::rolling_to_json(&points),
        OutputArg::Text => report::rolling_to_csv(&points),
    };
    emit(&args.common, &content)
}
