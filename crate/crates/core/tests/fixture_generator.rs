//! The bundled synthetic fixture: 43 monthly closes for a made-up asset
//! and market index (2020-09-30 through 2024-03-31), standing in for data
//! that cannot be redistributed.
//!
//! The generator below is the single source of truth. It uses a fixed-seed
//! LCG and an Irwin-Hall normal approximation (sum of 12 uniforms minus 6)
//! so that regeneration is bit-identical across platforms — no libm calls.
//! The committed files are checked against it here; to rewrite them run
//!
//! ```text
//! ASYMCAPM_REGEN_FIXTURES=1 cargo test -p asymcapm --test fixture_generator
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

const SEED: u64 = 20_200_930;
const MONTHS: usize = 43;

struct Lcg(u64);

impl Lcg {
    fn next_u64(&mut self) -> u64 {
        // Knuth MMIX constants
        self.0 = self
            .0
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        self.0
    }

    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Approximately standard normal: mean 0, variance 1 exactly.
    fn normal(&mut self) -> f64 {
        (0..12).map(|_| self.uniform()).sum::<f64>() - 6.0
    }
}

fn month_end_dates() -> Vec<String> {
    let mut dates = Vec::with_capacity(MONTHS);
    let (mut year, mut month) = (2020, 9);
    for _ in 0..MONTHS {
        let last_day = match month {
            1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
            4 | 6 | 9 | 11 => 30,
            2 => {
                if year % 4 == 0 {
                    29
                } else {
                    28
                }
            }
            _ => unreachable!(),
        };
        dates.push(format!("{year:04}-{month:02}-{last_day:02}"));
        month += 1;
        if month > 12 {
            month = 1;
            year += 1;
        }
    }
    dates
}

/// Generates the (asset_csv, market_csv) contents.
fn generate() -> (String, String) {
    let mut rng = Lcg(SEED);
    let dates = month_end_dates();

    let mut asset_price = 100.0_f64;
    let mut market_price = 10_000.0_f64;
    let mut asset_csv = String::from("date,adj_close\n");
    let mut market_csv = String::from("date,adj_close\n");

    let _ = writeln!(asset_csv, "{},{:.6}", dates[0], asset_price);
    let _ = writeln!(market_csv, "{},{:.6}", dates[0], market_price);

    for date in &dates[1..] {
        let market_ret = 0.009 + 0.045 * rng.normal();
        let asset_ret = 0.004 + 1.15 * market_ret + 0.035 * rng.normal();
        market_price *= 1.0 + market_ret;
        asset_price *= 1.0 + asset_ret;
        let _ = writeln!(asset_csv, "{},{:.6}", date, asset_price);
        let _ = writeln!(market_csv, "{},{:.6}", date, market_price);
    }
    (asset_csv, market_csv)
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn committed_fixture_matches_generator() {
    let (asset_csv, market_csv) = generate();
    let dir = fixture_dir();
    let asset_path = dir.join("asset.csv");
    let market_path = dir.join("market.csv");

    if std::env::var_os("ASYMCAPM_REGEN_FIXTURES").is_some() {
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(&asset_path, &asset_csv).unwrap();
        std::fs::write(&market_path, &market_csv).unwrap();
        return;
    }

    let committed_asset = std::fs::read_to_string(&asset_path)
        .expect("fixtures/asset.csv missing; regenerate with ASYMCAPM_REGEN_FIXTURES=1");
    let committed_market = std::fs::read_to_string(&market_path)
        .expect("fixtures/market.csv missing; regenerate with ASYMCAPM_REGEN_FIXTURES=1");
    assert_eq!(committed_asset, asset_csv, "asset fixture drifted from its generator");
    assert_eq!(committed_market, market_csv, "market fixture drifted from its generator");
}

#[test]
fn fixture_loads_and_spans_the_expected_window() {
    let dir = fixture_dir();
    if std::env::var_os("ASYMCAPM_REGEN_FIXTURES").is_some() {
        return;
    }
    let schema = asymcapm::ingest::CsvSchema::default();
    let asset = asymcapm::ingest::load_prices_csv(&dir.join("asset.csv"), &schema).unwrap();
    let market = asymcapm::ingest::load_prices_csv(&dir.join("market.csv"), &schema).unwrap();
    assert_eq!(asset.len(), 43);
    assert_eq!(market.len(), 43);
    assert_eq!(asset.first_date().to_string(), "2020-09-30");
    assert_eq!(asset.last_date().to_string(), "2024-03-31");
    let aligned = asymcapm::ingest::align(&asset, &market).unwrap();
    assert_eq!(aligned.dropped_asset, 0);
    assert_eq!(aligned.dropped_market, 0);
}
