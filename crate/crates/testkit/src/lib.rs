//! Independent numerical oracles for the test suites.
//!
//! Everything here deliberately avoids the production code paths it is used
//! to check: integrals are evaluated by adaptive quadrature on the density as
//! a black box, moments by the naive textbook formulas, and distribution
//! checks by their own special-function approximations. This crate must only
//! ever appear as a dev-dependency.

/// Adaptive Simpson quadrature with relative error control.
///
/// The tolerance is applied relative to a rough composite estimate of the
/// integral's magnitude, so small integrals are resolved as sharply as large
/// ones.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Rough composite pass to set the absolute scale.
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut rough = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        rough += simpson(f, lo, lo + h);
    }
    let eps = rel_tol * rough.abs().max(f64::MIN_POSITIVE);
    let whole = simpson(f, a, b);
    adaptive_step(f, a, b, whole, eps, 64)
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, left, eps * 0.5, depth - 1)
        + adaptive_step(f, m, b, right, eps * 0.5, depth - 1)
}

/// `integral of f over [a, infinity)` via the substitution `x = 1/t`,
/// assuming `x^2 f(x) -> 0` as `x -> infinity`.
pub fn adaptive_simpson_to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, rel_tol: f64) -> f64 {
    assert!(a > 0.0, "substitution requires a positive lower limit");
    let g = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            f(1.0 / t) / (t * t)
        }
    };
    adaptive_simpson(&g, 0.0, 1.0 / a, rel_tol)
}

/// Naive textbook mean.
pub fn reference_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Naive textbook population central moment, `powf` form.
pub fn reference_central_moment(values: &[f64], order: u32) -> f64 {
    let mu = reference_mean(values);
    values
        .iter()
        .map(|x| (x - mu).abs().powf(order as f64) * sign_pow(x - mu, order))
        .sum::<f64>()
        / values.len() as f64
}

fn sign_pow(d: f64, order: u32) -> f64 {
    if order % 2 == 1 && d < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Naive standardized moment built from [`reference_central_moment`].
pub fn reference_standardized_moment(values: &[f64], order: u32) -> f64 {
    let m2 = reference_central_moment(values, 2);
    reference_central_moment(values, order) / m2.powf(order as f64 / 2.0)
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erfc approximation
/// (absolute error below 1.5e-7).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    let negative = x < 0.0;
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let e = poly * (-x * x).exp();
    if negative {
        2.0 - e
    } else {
        e
    }
}

/// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Hill estimator of the survival-function tail index `alpha` (for a density
/// decaying like `x^-gamma`, alpha = gamma - 1), using the top `k` absolute
/// order statistics.
pub fn hill_tail_index(values: &[f64], top_fraction: f64) -> f64 {
    let mut magnitudes: Vec<f64> = values
        .iter()
        .map(|v| v.abs())
        .filter(|v| *v > 0.0)
        .collect();
    magnitudes.sort_by(|a, b| b.total_cmp(a));
    let k = ((magnitudes.len() as f64 * top_fraction) as usize)
        .clamp(2, magnitudes.len().saturating_sub(1));
    let x_k = magnitudes[k];
    let sum_log: f64 = magnitudes[..k].iter().map(|x| (x / x_k).ln()).sum();
    k as f64 / sum_log
}
