//! Per-window standardized moments and their gaussian reference values.
//!
//! For a window of returns the n-th standardized moment is
//! `gamma_n = <(x - mu)^n> / <(x - mu)^2>^(n/2)` with population (1/N)
//! normalization and no bias correction. `gamma_4` is the kurtosis; a
//! gaussian sample has `gamma_n = (n-1)!!` for even n (3, 15, 105, 945,
//! 10395 for n = 4..12).
//!
//! Central moments are computed in two passes (mean first, then centered
//! powers): one-pass raw-moment expansions cancel catastrophically at the
//! high orders used here (up to n = 12).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use thiserror::Error;

use crate::series::{build_windows, PlanError, ReturnSeries, Window, WindowPlan};

#[derive(Debug, Error, PartialEq)]
pub enum MomentError {
    #[error("empty window")]
    EmptyWindow,
    #[error("order {0} unsupported: only even orders >= 2 are defined here")]
    OddOrderUnsupported(u32),
    #[error("zero variance: all window values are equal")]
    ZeroVariance,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

fn require_even(order: u32) -> Result<(), MomentError> {
    if order < 2 || !order.is_multiple_of(2) {
        return Err(MomentError::OddOrderUnsupported(order));
    }
    Ok(())
}

/// Arithmetic mean, population convention.
pub fn mean(values: &[f64]) -> Result<f64, MomentError> {
    if values.is_empty() {
        return Err(MomentError::EmptyWindow);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Population central moment `<(x - mu)^n>` for even `order >= 2`.
pub fn central_moment(values: &[f64], order: u32) -> Result<f64, MomentError> {
    require_even(order)?;
    let mu = mean(values)?;
    Ok(centered_power_mean(values, mu, order))
}

fn centered_power_mean(values: &[f64], mu: f64, order: u32) -> f64 {
    let sum: f64 = values.iter().map(|x| (x - mu).powi(order as i32)).sum();
    sum / values.len() as f64
}

/// A window whose variance sits at the float rounding noise of its own scale
/// is constant for every practical purpose (stale prices); standardizing by
/// that pseudo-variance would only amplify rounding dust.
fn effectively_zero_variance(variance: f64, values: &[f64]) -> bool {
    let mean_square = values.iter().map(|x| x * x).sum::<f64>() / values.len() as f64;
    variance <= 1e-24 * mean_square
}

/// Standardized moment `gamma_n = <(x-mu)^n> / <(x-mu)^2>^(n/2)`.
///
/// A window of identical values has no scale to standardize by; callers must
/// skip such windows rather than substitute a value.
pub fn standardized_moment(values: &[f64], order: u32) -> Result<f64, MomentError> {
    require_even(order)?;
    let mu = mean(values)?;
    let variance = centered_power_mean(values, mu, 2);
    if effectively_zero_variance(variance, values) {
        return Err(MomentError::ZeroVariance);
    }
    let central = centered_power_mean(values, mu, order);
    Ok(central / variance.powf(order as f64 / 2.0))
}

/// Gaussian standardized moment: `(n - 1)!!` for even n.
pub fn gaussian_moment(order: u32) -> Result<f64, MomentError> {
    require_even(order)?;
    let mut acc = 1.0;
    let mut k = 3;
    while k < order {
        acc *= k as f64;
        k += 2;
    }
    Ok(acc)
}

/// Ratio of the gaussian moment to the empirical one:
/// `R_n = gamma_n_gaussian / gamma_n`. Below 1 signals heavier-than-gaussian
/// tails at that order.
pub fn gaussian_ratio(values: &[f64], order: u32) -> Result<f64, MomentError> {
    Ok(gaussian_moment(order)? / standardized_moment(values, order)?)
}

/// Scalar form of [`gaussian_ratio`] for an already-computed `gamma_n`.
pub fn gaussian_ratio_value(gamma_n: f64, order: u32) -> Result<f64, MomentError> {
    Ok(gaussian_moment(order)? / gamma_n)
}

/// Reference table of gaussian standardized moments for even orders 2..=12.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMomentTable {
    pub values: BTreeMap<u32, f64>,
}

impl GaussianMomentTable {
    pub fn standard() -> Self {
        let values = (1..=6)
            .map(|k| {
                let n = 2 * k;
                (n, gaussian_moment(n).unwrap())
            })
            .collect();
        Self { values }
    }
}

/// Moments of one window: mean, central moments and standardized moments per
/// requested order. Degenerate (zero-variance) windows are flagged and carry
/// an empty `gamma` map; fits must exclude them.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRecord {
    pub t0: NaiveDate,
    pub len: usize,
    pub mu: f64,
    pub central: BTreeMap<u32, f64>,
    pub gamma: BTreeMap<u32, f64>,
    pub zero_variance: bool,
}

impl MomentRecord {
    /// Computes a record over one window for the given even orders.
    pub fn compute(window: &Window<'_>, orders: &[u32]) -> Result<Self, MomentError> {
        for &n in orders {
            require_even(n)?;
        }
        let values = window.values;
        let mu = mean(values)?;
        let variance = centered_power_mean(values, mu, 2);
        let mut central = BTreeMap::new();
        central.insert(2, variance);
        for &n in orders {
            central
                .entry(n)
                .or_insert_with(|| centered_power_mean(values, mu, n));
        }
        let zero_variance = effectively_zero_variance(variance, values);
        let gamma = if zero_variance {
            BTreeMap::new()
        } else {
            central
                .iter()
                .map(|(&n, &m)| (n, m / variance.powf(n as f64 / 2.0)))
                .collect()
        };
        Ok(Self {
            t0: window.t0,
            len: window.len(),
            mu,
            central,
            gamma,
            zero_variance,
        })
    }
}

/// One [`MomentRecord`] per window of the plan, in window order.
pub fn moment_profile(
    returns: &ReturnSeries,
    plan: &WindowPlan,
    orders: &[u32],
) -> Result<Vec<MomentRecord>, ProfileError> {
    for &n in orders {
        require_even(n).map_err(ProfileError::Moment)?;
    }
    let windows = build_windows(returns, plan)?;
    windows
        .iter()
        .map(|w| MomentRecord::compute(w, orders).map_err(ProfileError::Moment))
        .collect()
}

/// CSV export: `t0,N,mu,gamma_<n>...` with empty gamma cells on degenerate
/// windows.
pub fn records_to_csv(records: &[MomentRecord], orders: &[u32]) -> String {
    let mut out = String::new();
    out.push_str("t0,N,mu");
    for n in orders {
        let _ = write!(out, ",gamma_{n}");
    }
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{},{}", r.t0.format("%Y-%m-%d"), r.len, r.mu);
        for n in orders {
            match r.gamma.get(n) {
                Some(g) => {
                    let _ = write!(out, ",{g}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// JSON export with the same field names as the CSV columns; degenerate
/// gammas serialize as null.
pub fn records_to_json(records: &[MomentRecord], orders: &[u32]) -> serde_json::Value {
    serde_json::Value::Array(
        records
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("t0".into(), r.t0.format("%Y-%m-%d").to_string().into());
                obj.insert("N".into(), r.len.into());
                obj.insert("mu".into(), r.mu.into());
                for n in orders {
                    let key = format!("gamma_{n}");
                    match r.gamma.get(n) {
                        Some(&g) => obj.insert(key, g.into()),
                        None => obj.insert(key, serde_json::Value::Null),
                    };
                }
                obj.insert("zero_variance".into(), r.zero_variance.into());
                serde_json::Value::Object(obj)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_hand_values() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(mean(&[-0.7, 0.7]).unwrap(), 0.0);
        assert_relative_eq!(mean(&[4.2; 17]).unwrap(), 4.2, epsilon = 1e-15);
        assert_eq!(mean(&[]), Err(MomentError::EmptyWindow));
    }

    #[test]
    fn central_moment_hand_values() {
        assert_relative_eq!(
            central_moment(&[1.0, 2.0, 3.0], 2).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            central_moment(&[-1.0, 1.0, -1.0, 1.0], 4).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(central_moment(&[3.3; 4], 6).unwrap(), 0.0);
    }

    #[test]
    fn odd_orders_are_rejected() {
        assert_eq!(
            central_moment(&[1.0, 2.0], 3),
            Err(MomentError::OddOrderUnsupported(3))
        );
        assert_eq!(
            standardized_moment(&[1.0, 2.0], 5),
            Err(MomentError::OddOrderUnsupported(5))
        );
        assert_eq!(gaussian_moment(7), Err(MomentError::OddOrderUnsupported(7)));
        assert_eq!(gaussian_moment(0), Err(MomentError::OddOrderUnsupported(0)));
    }

    #[test]
    fn standardized_moment_two_point_symmetric() {
        assert_relative_eq!(
            standardized_moment(&[-1.0, 1.0, -1.0, 1.0], 4).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn constant_window_is_zero_variance() {
        assert_eq!(
            standardized_moment(&[0.25; 8], 4),
            Err(MomentError::ZeroVariance)
        );
    }

    #[test]
    fn gaussian_moments_are_double_factorials() {
        let expect = [
            (2, 1.0),
            (4, 3.0),
            (6, 15.0),
            (8, 105.0),
            (10, 945.0),
            (12, 10395.0),
        ];
        for (n, v) in expect {
            assert_eq!(gaussian_moment(n).unwrap(), v);
        }
        let table = GaussianMomentTable::standard();
        assert_eq!(table.values[&4], 3.0);
        assert_eq!(table.values[&12], 10395.0);
    }

    #[test]
    fn ratio_against_stored_reference_moments() {
        // Stored full-history and 3-year fourth-moment levels for one bank
        // stock, kept as regression anchors for the ratio arithmetic.
        let r = gaussian_ratio_value(26.02, 4).unwrap();
        assert_relative_eq!(r, 0.1153, epsilon = 5e-4);
        let r3 = gaussian_ratio_value(3.369, 4).unwrap();
        assert_relative_eq!(r3, 0.8905, epsilon = 5e-4);
    }

    #[test]
    fn profile_flags_constant_series() {
        let returns = ReturnSeries::from_values("t", vec![0.0; 200]);
        let plan = WindowPlan {
            start_fraction: 0.05,
            step_fraction: 0.05,
            ..WindowPlan::default()
        };
        let records = moment_profile(&returns, &plan, &[4, 6]).unwrap();
        assert!(!records.is_empty());
        assert!(records.iter().all(|r| r.zero_variance));
        assert!(records.iter().all(|r| r.gamma.is_empty()));
    }

    #[test]
    fn profile_records_follow_window_order() {
        let values: Vec<f64> = (0..500)
            .map(|i| ((i * 37 % 101) as f64 - 50.0) / 500.0)
            .collect();
        let returns = ReturnSeries::from_values("t", values);
        let plan = WindowPlan::default();
        let records = moment_profile(&returns, &plan, &[4, 6]).unwrap();
        assert!(records.windows(2).all(|r| r[0].len < r[1].len));
        assert_eq!(records.last().unwrap().len, 500);
        // gamma_2 is identically one on non-degenerate windows.
        for r in &records {
            assert!(!r.zero_variance);
            assert_relative_eq!(r.gamma[&2], 1.0, epsilon = 1e-12);
        }
    }
}
