//! Simple least-squares regression with classical inference.
//!
//! One regressor plus an intercept is all the beta estimators need. Two
//! routes to the slope are provided on purpose: [`ols_fit`] solves the
//! normal equations and carries full inference, while [`beta_moment`] is
//! the direct Cov/Var ratio. They agree to floating-point accuracy and the
//! test suite holds them to that.
//!
//! All sums are centered two-pass computations; raw-moment one-pass
//! formulas lose digits on near-constant return series.

use serde::Serialize;

use crate::distributions::{student_t_sf_two_sided, TailProbability};
use crate::error::{Error, Result};

/// Result of a single-regressor least-squares fit.
#[derive(Debug, Clone, Serialize)]
pub struct OlsFit {
    pub n: usize,
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    pub t_slope: f64,
    pub p_slope: TailProbability,
    /// Residual variance estimate Σe²/(n−2).
    pub sigma2_hat: f64,
    pub r_squared: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl OlsFit {
    /// Residual degrees of freedom, n − 2.
    pub fn dof(&self) -> usize {
        self.n - 2
    }
}

fn check_pair(y: &[f64], x: &[f64], min_n: usize) -> Result<usize> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: x.len(),
        });
    }
    if y.len() < min_n {
        return Err(Error::TooFewObservations {
            required: min_n,
            actual: y.len(),
        });
    }
    if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(y.len())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Least squares of `y` on `[1, x]`.
///
/// Returns slope and intercept with homoscedastic standard errors, the
/// slope t-statistic and its two-sided Student-t p-value on n − 2 degrees
/// of freedom, residuals, and centered R².
pub fn ols_fit(y: &[f64], x: &[f64]) -> Result<OlsFit> {
    let n = check_pair(y, x, 3)?;
    let nf = n as f64;

    let x_bar = mean(x);
    let y_bar = mean(y);

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - x_bar;
        let dy = yi - y_bar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance {
            series: "regressor".to_string(),
        });
    }

    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;

    let residuals: Vec<f64> = y
        .iter()
        .zip(x)
        .map(|(&yi, &xi)| yi - intercept - slope * xi)
        .collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();

    let dof = (n - 2) as f64;
    let sigma2_hat = sse / dof;
    let se_slope = (sigma2_hat / sxx).sqrt();
    let se_intercept = (sigma2_hat * (1.0 / nf + x_bar * x_bar / sxx)).sqrt();

    // A perfect fit makes the standard error vanish; take the limiting
    // t-statistic so the p-value stays defined.
    let t_slope = if se_slope == 0.0 {
        if slope == 0.0 {
            0.0
        } else {
            slope.signum() * f64::INFINITY
        }
    } else {
        slope / se_slope
    };
    let p_slope = student_t_sf_two_sided(t_slope, (n - 2) as u32)?;

    // Zero-variance response: the flat line fits exactly and explains
    // nothing, so report R² = 0 rather than 0/0.
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };

    Ok(OlsFit {
        n,
        intercept,
        slope,
        se_intercept,
        se_slope,
        t_slope,
        p_slope,
        sigma2_hat,
        r_squared,
        residuals,
    })
}

/// The moment-ratio beta Cov(r_i, r_m) / Var(r_m).
///
/// Covariance and variance both use the sample (n − 1) normalization, so
/// the ratio is independent of that choice.
pub fn beta_moment(r_i: &[f64], r_m: &[f64]) -> Result<f64> {
    let n = check_pair(r_i, r_m, 2)?;
    let nf = (n - 1) as f64;

    let i_bar = mean(r_i);
    let m_bar = mean(r_m);
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&ri, &rm) in r_i.iter().zip(r_m) {
        let dm = rm - m_bar;
        cov += (ri - i_bar) * dm;
        var += dm * dm;
    }
    cov /= nf;
    var /= nf;

    if var == 0.0 {
        return Err(Error::ZeroVariance {
            series: "market return".to_string(),
        });
    }
    Ok(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_fit_is_exact() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let fit = ols_fit(&v, &v).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-15);
        assert!(fit.intercept.abs() < 1e-15);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-15));
        assert_eq!(fit.r_squared, 1.0);
        assert_eq!(fit.t_slope, f64::INFINITY);
        assert_eq!(fit.p_slope.value(), 0.0);
    }

    #[test]
    fn constant_response() {
        let fit = ols_fit(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!((fit.intercept - 2.0).abs() < 1e-15);
        assert_eq!(fit.r_squared, 0.0);
        assert_eq!(fit.t_slope, 0.0);
        assert_eq!(fit.p_slope.value(), 1.0);
    }

    #[test]
    fn hand_solved_normal_equations() {
        // Normal equations: slope = (nΣxy − ΣxΣy)/(nΣx² − (Σx)²)
        //   Σxy = 29.7, Σx = Σy = 10, Σx² = 30
        //   slope = (118.8 − 100)/(120 − 100) = 0.94
        //   intercept = (10 − 0.94·10)/4 = 0.15
        let y = [1.1, 1.9, 3.2, 3.8];
        let x = [1.0, 2.0, 3.0, 4.0];
        let fit = ols_fit(&y, &x).unwrap();
        assert!((fit.slope - 0.94).abs() < 1e-12);
        assert!((fit.intercept - 0.15).abs() < 1e-12);
    }

    #[test]
    fn residual_orthogonality() {
        let y = [0.3, -1.2, 2.4, 0.9, -0.4, 1.7];
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let fit = ols_fit(&y, &x).unwrap();
        let sum: f64 = fit.residuals.iter().sum();
        let dot: f64 = fit.residuals.iter().zip(&x).map(|(e, xi)| e * xi).sum();
        assert!(sum.abs() < 1e-9 * 6.0);
        assert!(dot.abs() < 1e-9 * 6.0 * 6.0);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            ols_fit(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            ols_fit(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewObservations { .. })
        ));
        assert!(matches!(
            ols_fit(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(Error::ZeroVariance { .. })
        ));
        assert!(matches!(
            ols_fit(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn market_self_beta_is_one() {
        let m = [0.02, -0.01, 0.04, -0.03, 0.01];
        assert!((beta_moment(&m, &m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_scaling() {
        let m = [0.02, -0.01, 0.04, -0.03, 0.01];
        let double: Vec<f64> = m.iter().map(|r| 2.0 * r).collect();
        assert!((beta_moment(&double, &m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constructed_uncorrelated_pair() {
        let r_i = [1.0, -1.0, 1.0, -1.0];
        let r_m = [1.0, 1.0, -1.0, -1.0];
        assert!(beta_moment(&r_i, &r_m).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zero_market_variance_rejected() {
        assert!(matches!(
            beta_moment(&[0.1, 0.2, 0.3], &[0.0, 0.0, 0.0]),
            Err(Error::ZeroVariance { .. })
        ));
    }

    #[test]
    fn p_value_decreasing_in_abs_t() {
        let mut last = 1.0;
        for i in 0..40 {
            let t = 0.25 * i as f64;
            let p = student_t_sf_two_sided(t, 8).unwrap().value();
            assert!(p <= last);
            last = p;
        }
    }

    proptest! {
        #[test]
        fn slope_matches_moment_ratio(
            data in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 3..80)
        ) {
            let y: Vec<f64> = data.iter().map(|(a, _)| *a).collect();
            let x: Vec<f64> = data.iter().map(|(_, b)| *b).collect();
            if let (Ok(fit), Ok(bm)) = (ols_fit(&y, &x), beta_moment(&y, &x)) {
                let tol = 1e-10 * fit.slope.abs().max(1.0);
                prop_assert!((fit.slope - bm).abs() <= tol);
            }
        }

        #[test]
        fn scale_equivariance(
            data in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 4..60),
            a in 0.1f64..10.0,
        ) {
            let y: Vec<f64> = data.iter().map(|(v, _)| *v).collect();
            let x: Vec<f64> = data.iter().map(|(_, v)| *v).collect();
            let ya: Vec<f64> = y.iter().map(|v| a * v).collect();
            if let (Ok(b), Ok(ba)) = (beta_moment(&y, &x), beta_moment(&ya, &x)) {
                prop_assert!((ba - a * b).abs() <= 1e-10 * (a * b).abs().max(1.0));
            }
        }

        #[test]
        fn shift_invariance(
            data in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 4..60),
            c in -5.0f64..5.0,
            d in -5.0f64..5.0,
        ) {
            let y: Vec<f64> = data.iter().map(|(v, _)| *v).collect();
            let x: Vec<f64> = data.iter().map(|(_, v)| *v).collect();
            let ys: Vec<f64> = y.iter().map(|v| v + c).collect();
            let xs: Vec<f64> = x.iter().map(|v| v + d).collect();
            if let (Ok(b), Ok(bs)) = (beta_moment(&y, &x), beta_moment(&ys, &xs)) {
                prop_assert!((bs - b).abs() <= 1e-10 * b.abs().max(1.0));
            }
        }
    }
}
