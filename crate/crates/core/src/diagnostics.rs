//! Residual diagnostics: Jarque-Bera, Breusch-Godfrey, Breusch-Pagan.
//!
//! All three are LM-style tests whose statistic is referred to a chi-square
//! distribution. The serial-correlation and heteroscedasticity tests run an
//! auxiliary regression through [`mls_fit`], a small multivariate
//! least-squares helper backed by Householder QR.
//!
//! Conventions, chosen where the usual software defaults diverge:
//! - Breusch-Godfrey keeps all n observations and zero-fills the pre-sample
//!   lagged residuals.
//! - Breusch-Pagan uses the Koenker studentized n·R² form, not the original
//!   SSR/2 form.
//! - Jarque-Bera kurtosis is raw, without small-sample correction.

use serde::Serialize;

use crate::distributions::{chi2_sf, TailProbability};
use crate::error::{Error, Result};
use crate::regression::OlsFit;

/// Which diagnostic produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    JarqueBera,
    BreuschGodfrey,
    BreuschPagan,
}

impl std::fmt::Display for TestName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestName::JarqueBera => f.write_str("jarque_bera"),
            TestName::BreuschGodfrey => f.write_str("breusch_godfrey"),
            TestName::BreuschPagan => f.write_str("breusch_pagan"),
        }
    }
}

/// A computed diagnostic: statistic, degrees of freedom, chi-square p-value.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticResult {
    #[serde(rename = "test")]
    pub test_name: TestName,
    pub statistic: f64,
    pub df: u32,
    pub p_value: TailProbability,
    pub null_hypothesis: &'static str,
}

/// One entry of a [`DiagnosticReport`]: either a computed result or an
/// explicit marker for a test that could not run on this sample.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DiagnosticOutcome {
    Computed {
        #[serde(flatten)]
        result: DiagnosticResult,
    },
    Skipped {
        test: TestName,
        reason: String,
    },
}

impl DiagnosticOutcome {
    pub fn test_name(&self) -> TestName {
        match self {
            DiagnosticOutcome::Computed { result } => result.test_name,
            DiagnosticOutcome::Skipped { test, .. } => *test,
        }
    }

    pub fn as_computed(&self) -> Option<&DiagnosticResult> {
        match self {
            DiagnosticOutcome::Computed { result } => Some(result),
            DiagnosticOutcome::Skipped { .. } => None,
        }
    }
}

/// The three-test battery for one regression's residuals.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticReport {
    /// Which regression these residuals came from.
    pub model_label: String,
    /// Exactly three entries, in Jarque-Bera / Breusch-Godfrey /
    /// Breusch-Pagan order.
    pub results: Vec<DiagnosticOutcome>,
}

impl DiagnosticReport {
    pub fn new(model_label: impl Into<String>, results: Vec<DiagnosticOutcome>) -> Result<Self> {
        let expected = [
            TestName::JarqueBera,
            TestName::BreuschGodfrey,
            TestName::BreuschPagan,
        ];
        if results.len() != 3 || results.iter().map(|r| r.test_name()).ne(expected) {
            return Err(Error::Domain {
                what: "diagnostic report must hold exactly the three tests in order".to_string(),
            });
        }
        Ok(Self {
            model_label: model_label.into(),
            results,
        })
    }
}

/// Coefficients, residuals, and centered R² from a multivariate fit.
#[derive(Debug, Clone)]
pub struct MlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
}

/// Least squares of `y` on the given regressor columns (pass an explicit
/// ones column for an intercept), solved by Householder QR.
pub fn mls_fit(y: &[f64], columns: &[Vec<f64>]) -> Result<MlsFit> {
    let n = y.len();
    let k = columns.len();
    if k == 0 {
        return Err(Error::Domain {
            what: "need at least one regressor column".to_string(),
        });
    }
    if n < k + 1 {
        return Err(Error::TooFewObservations {
            required: k + 1,
            actual: n,
        });
    }
    for col in columns {
        if col.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: col.len(),
            });
        }
    }
    if y.iter().any(|v| !v.is_finite())
        || columns.iter().flatten().any(|v| !v.is_finite())
    {
        return Err(Error::NonFiniteInput);
    }

    // Column-major working copy; Householder reflections are applied to the
    // remaining columns and to qty simultaneously.
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut qty = y.to_vec();

    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient { column: j });
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            for target in a.iter_mut().skip(j + 1) {
                let dot: f64 = v.iter().zip(&target[j..]).map(|(vi, ti)| vi * ti).sum();
                let scale = 2.0 * dot / vtv;
                for (vi, ti) in v.iter().zip(target[j..].iter_mut()) {
                    *ti -= scale * vi;
                }
            }
            let dot: f64 = v.iter().zip(&qty[j..]).map(|(vi, ti)| vi * ti).sum();
            let scale = 2.0 * dot / vtv;
            for (vi, ti) in v.iter().zip(qty[j..].iter_mut()) {
                *ti -= scale * vi;
            }
        }
        a[j][j] = alpha;
    }

    // R's diagonal reveals (near-)collinear columns.
    let max_diag = (0..k).map(|j| a[j][j].abs()).fold(0.0_f64, f64::max);
    let tol = max_diag * (n as f64) * f64::EPSILON;
    for j in 0..k {
        if a[j][j].abs() <= tol {
            return Err(Error::RankDeficient { column: j });
        }
    }

    // Back substitution on R coef = (Qᵀy)[..k]; r[i][j] lives in a[j][i].
    let mut coefficients = vec![0.0; k];
    for j in (0..k).rev() {
        let mut acc = qty[j];
        for l in (j + 1)..k {
            acc -= a[l][j] * coefficients[l];
        }
        coefficients[j] = acc / a[j][j];
    }

    // Residuals from the original columns, not the factorization.
    let mut residuals = y.to_vec();
    for (coef, col) in coefficients.iter().zip(columns) {
        for (r, &c) in residuals.iter_mut().zip(col) {
            *r -= coef * c;
        }
    }

    let y_bar = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - y_bar) * (v - y_bar)).sum();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let r_squared = if sst == 0.0 {
        0.0
    } else {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    };

    Ok(MlsFit {
        coefficients,
        residuals,
        r_squared,
    })
}

/// Jarque-Bera normality test.
///
/// With central moments `m_k = Σ(e−ē)^k / n`, skewness `S = m₃/m₂^{3/2}`
/// and kurtosis `K = m₄/m₂²`, the statistic is `n(S²/6 + (K−3)²/24)`,
/// chi-square with 2 degrees of freedom under normality.
pub fn jarque_bera(residuals: &[f64]) -> Result<DiagnosticResult> {
    let n = residuals.len();
    if n < 4 {
        return Err(Error::TooFewObservations {
            required: 4,
            actual: n,
        });
    }
    if residuals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &e in residuals {
        let d = e - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    if m2 == 0.0 {
        return Err(Error::ZeroVarianceResiduals {
            test: "jarque_bera",
        });
    }

    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let statistic = nf * (skewness * skewness / 6.0 + (kurtosis - 3.0).powi(2) / 24.0);

    Ok(DiagnosticResult {
        test_name: TestName::JarqueBera,
        statistic,
        df: 2,
        p_value: chi2_sf(statistic, 2)?,
        null_hypothesis: "normality",
    })
}

/// Breusch-Godfrey LM test for serial correlation up to `lags`.
///
/// Auxiliary regression of the residuals on `[1, x, e_{t−1}, …, e_{t−lags}]`
/// over all n observations, pre-sample lagged residuals zero-filled.
/// Statistic n·R², chi-square with `lags` degrees of freedom.
pub fn breusch_godfrey(fit: &OlsFit, x: &[f64], lags: usize) -> Result<DiagnosticResult> {
    if lags == 0 {
        return Err(Error::Domain {
            what: "Breusch-Godfrey needs at least one lag".to_string(),
        });
    }
    if x.len() != fit.n {
        return Err(Error::LengthMismatch {
            left: fit.n,
            right: x.len(),
        });
    }
    if fit.n <= lags + 2 {
        return Err(Error::TooFewObservations {
            required: lags + 3,
            actual: fit.n,
        });
    }

    let n = fit.n;
    let e = &fit.residuals;
    let df = lags as u32;

    // A perfectly fitting model has nothing left to correlate; the lagged
    // columns would also be all-zero, so short-circuit instead of feeding a
    // singular design to the QR.
    if centered_ss(e) == 0.0 {
        return Ok(DiagnosticResult {
            test_name: TestName::BreuschGodfrey,
            statistic: 0.0,
            df,
            p_value: chi2_sf(0.0, df)?,
            null_hypothesis: "no serial correlation",
        });
    }

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(lags + 2);
    columns.push(vec![1.0; n]);
    columns.push(x.to_vec());
    for lag in 1..=lags {
        let mut col = vec![0.0; n];
        for t in lag..n {
            col[t] = e[t - lag];
        }
        columns.push(col);
    }

    let aux = mls_fit(e, &columns)?;
    let statistic = n as f64 * aux.r_squared;
    Ok(DiagnosticResult {
        test_name: TestName::BreuschGodfrey,
        statistic,
        df,
        p_value: chi2_sf(statistic, df)?,
        null_hypothesis: "no serial correlation",
    })
}

/// Breusch-Pagan heteroscedasticity test, Koenker studentized form.
///
/// Auxiliary regression of e² on `[1, x]`; statistic n·R², chi-square with
/// one degree of freedom (one non-constant auxiliary regressor).
pub fn breusch_pagan(fit: &OlsFit, x: &[f64]) -> Result<DiagnosticResult> {
    if x.len() != fit.n {
        return Err(Error::LengthMismatch {
            left: fit.n,
            right: x.len(),
        });
    }
    if fit.n < 4 {
        return Err(Error::TooFewObservations {
            required: 4,
            actual: fit.n,
        });
    }

    let n = fit.n;
    let e2: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();

    // Squared residuals of constant magnitude are exactly homoscedastic.
    if centered_ss(&e2) == 0.0 {
        return Ok(DiagnosticResult {
            test_name: TestName::BreuschPagan,
            statistic: 0.0,
            df: 1,
            p_value: chi2_sf(0.0, 1)?,
            null_hypothesis: "homoscedasticity",
        });
    }

    let columns = vec![vec![1.0; n], x.to_vec()];
    let aux = mls_fit(&e2, &columns)?;
    let statistic = n as f64 * aux.r_squared;
    Ok(DiagnosticResult {
        test_name: TestName::BreuschPagan,
        statistic,
        df: 1,
        p_value: chi2_sf(statistic, 1)?,
        null_hypothesis: "homoscedasticity",
    })
}

fn centered_ss(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum()
}
