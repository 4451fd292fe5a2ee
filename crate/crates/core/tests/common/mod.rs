//! Test-only oracles, independent of the library's implementation path.
//!
//! The tail-probability oracles integrate the densities directly with
//! adaptive Simpson quadrature; normalization constants come from exact
//! half-integer gamma recursions, not from the library's Lanczos code.

/// Adaptive Simpson integration to an absolute tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, m: f64, fm: f64, b: f64, fb: f64) -> f64 {
        debug_assert!(a <= m && m <= b);
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, lm, flm, m, fm);
        let right = simpson(m, fm, rm, frm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
    }

    let m = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fm = f(m);
    recurse(f, a, fa, b, fb, m, fm, simpson(a, fa, m, fm, b, fb), tol, 60)
}

/// Exact Γ(a) for a positive multiple of 1/2, by product recursion from
/// Γ(1) = 1 or Γ(1/2) = √π.
pub fn gamma_half_integer(a: f64) -> f64 {
    let doubled = (2.0 * a).round();
    assert!(
        (2.0 * a - doubled).abs() < 1e-12 && a > 0.0,
        "oracle gamma only covers positive multiples of 1/2"
    );
    let mut value;
    let mut arg;
    if (doubled as u64) % 2 == 1 {
        value = std::f64::consts::PI.sqrt();
        arg = 0.5;
    } else {
        value = 1.0;
        arg = 1.0;
    }
    while arg + 0.25 < a {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// Chi-square survival function by quadrature of the density on [x, U],
/// with U far enough out that the remaining tail is below 1e-30.
pub fn chi2_sf_oracle(x: f64, df: u32) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let k = f64::from(df);
    let half_k = k / 2.0;
    let norm = 2.0_f64.powf(half_k) * gamma_half_integer(half_k);
    let pdf = move |t: f64| t.powf(half_k - 1.0) * (-t / 2.0).exp() / norm;
    let upper = x + 6.0 * k + 300.0;
    adaptive_simpson(&pdf, x, upper, 1e-12).clamp(0.0, 1.0)
}

/// Two-sided Student-t tail by quadrature of the density under the
/// substitution u = tan θ, which maps [|t|, ∞) to a finite interval and
/// keeps the integrand bounded even for df = 1.
pub fn student_t_sf_two_sided_oracle(t: f64, df: u32) -> f64 {
    let d = f64::from(df);
    let c = gamma_half_integer((d + 1.0) / 2.0)
        / ((d * std::f64::consts::PI).sqrt() * gamma_half_integer(d / 2.0));
    let integrand = move |theta: f64| {
        let u = theta.tan();
        let sec2 = 1.0 + u * u;
        c * (1.0 + u * u / d).powf(-(d + 1.0) / 2.0) * sec2
    };
    let lower = t.abs().atan();
    let p = 2.0 * adaptive_simpson(&integrand, lower, std::f64::consts::FRAC_PI_2, 1e-12);
    p.clamp(0.0, 1.0)
}

/// Regularized lower incomplete gamma by quadrature of its defining
/// integral.
pub fn reg_inc_gamma_lower_oracle(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let norm = gamma_half_integer(s);
    let integrand = move |t: f64| t.powf(s - 1.0) * (-t).exp() / norm;
    adaptive_simpson(&integrand, 0.0, x, 1e-12)
}
