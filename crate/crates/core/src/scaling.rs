//! Log-log scaling fits: `ln(gamma_m) = B ln(gamma_4) + ln(A)` by ordinary
//! least squares, plus the two-regime split that fits separate lines to the
//! short-window and long-window ends of the ladder.
//!
//! The split is the exhaustive single-breakpoint segmented fit: every
//! admissible partition of the N-ordered points is scored by pooled SSE and
//! the minimizer is returned (ties toward the smaller split). The per-segment
//! optimum can only improve on a global line restricted to the segment, so
//! `total_sse <= single-line sse` holds by construction.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::MomentRecord;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("no usable points: every record was degenerate or lacked the requested orders")]
    NoUsablePoints,
    #[error("degenerate design: all abscissae equal, slope undefined")]
    DegenerateDesign,
    #[error("too few points: {have} available, {need} required")]
    TooFewPoints { have: usize, need: usize },
}

/// One window's coordinates in (ln gamma_4, ln gamma_m) space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogPoint {
    /// Window length the point came from.
    pub len: usize,
    pub lx: f64,
    pub ly: f64,
}

/// Points extracted from a moment profile plus the count of records that had
/// to be skipped (zero variance or non-positive moments).
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogPoints {
    pub points: Vec<LogLogPoint>,
    pub excluded: usize,
}

/// Builds the fit input for the pair `(x_order, y_order)`, ordered by window
/// length. Degenerate records are skipped and counted, never substituted.
pub fn loglog_points(
    records: &[MomentRecord],
    x_order: u32,
    y_order: u32,
) -> Result<LogLogPoints, FitError> {
    let mut points = Vec::with_capacity(records.len());
    let mut excluded = 0usize;
    for r in records {
        let pair = (r.gamma.get(&x_order), r.gamma.get(&y_order));
        match pair {
            (Some(&gx), Some(&gy)) if gx > 0.0 && gy > 0.0 => points.push(LogLogPoint {
                len: r.len,
                lx: gx.ln(),
                ly: gy.ln(),
            }),
            _ => excluded += 1,
        }
    }
    if points.is_empty() {
        return Err(FitError::NoUsablePoints);
    }
    points.sort_by_key(|p| p.len);
    Ok(LogLogPoints { points, excluded })
}

/// A fitted line `ly = B lx + lnA` with its sum of squared residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLine {
    /// Logarithmic gradient B (the scaling exponent).
    pub gradient: f64,
    /// Intercept ln(A).
    pub intercept: f64,
    pub sse: f64,
    pub n_points: usize,
}

impl ScalingLine {
    pub fn predict(&self, lx: f64) -> f64 {
        self.gradient * lx + self.intercept
    }

    /// Standard error of the gradient under the usual OLS noise model.
    /// Used only to warn when two regimes are statistically indistinguishable.
    pub fn gradient_se(&self, points: &[LogLogPoint]) -> f64 {
        if self.n_points < 3 {
            return f64::INFINITY;
        }
        let mx = points.iter().map(|p| p.lx).sum::<f64>() / points.len() as f64;
        let sxx: f64 = points.iter().map(|p| (p.lx - mx).powi(2)).sum();
        if sxx <= 0.0 {
            return f64::INFINITY;
        }
        (self.sse / (self.n_points - 2) as f64 / sxx).sqrt()
    }
}

/// Ordinary least squares for `ly = B lx + lnA`, centered two-pass form.
pub fn fit_line(points: &[LogLogPoint]) -> Result<ScalingLine, FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints {
            have: points.len(),
            need: 2,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.lx).sum::<f64>() / n;
    let my = points.iter().map(|p| p.ly).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for p in points {
        let dx = p.lx - mx;
        sxx += dx * dx;
        sxy += dx * (p.ly - my);
    }
    if sxx <= 0.0 {
        return Err(FitError::DegenerateDesign);
    }
    let gradient = sxy / sxx;
    let intercept = my - gradient * mx;
    let sse = points
        .iter()
        .map(|p| {
            let r = p.ly - gradient * p.lx - intercept;
            r * r
        })
        .sum();
    Ok(ScalingLine {
        gradient,
        intercept,
        sse,
        n_points: points.len(),
    })
}

/// The best single-breakpoint segmentation of an N-ordered point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoRegimeFit {
    pub short_line: ScalingLine,
    pub long_line: ScalingLine,
    /// Window length of the first point in the long-window segment.
    pub split_len: usize,
    pub total_sse: f64,
}

impl TwoRegimeFit {
    /// True when the data cannot support two distinct scaling lines: either
    /// the gradients differ by less than twice the sum of their standard
    /// errors, or the points barely move along the ln(gamma_4) axis (less
    /// than half a nat of span, as for i.i.d. gaussian data, where any
    /// fitted gradient is a noise artifact). The CLI surfaces this as a
    /// warning that a single regime describes the series as well.
    pub fn slopes_indistinguishable(&self, points: &[LogLogPoint]) -> bool {
        let mut pts = points.to_vec();
        pts.sort_by_key(|p| p.len);
        let k = self.short_line.n_points.min(pts.len());
        let se = self.short_line.gradient_se(&pts[..k]) + self.long_line.gradient_se(&pts[k..]);
        if (self.short_line.gradient - self.long_line.gradient).abs() < 2.0 * se {
            return true;
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo = lo.min(p.lx);
            hi = hi.max(p.lx);
        }
        hi - lo < 0.5
    }
}

/// Scans every split index leaving at least `min_segment` points per side and
/// returns the partition minimizing pooled SSE; ties break toward the smaller
/// split length. Points are re-sorted by window length, so input order does
/// not matter.
pub fn fit_two_regimes(
    points: &[LogLogPoint],
    min_segment: usize,
) -> Result<TwoRegimeFit, FitError> {
    let min_segment = min_segment.max(2);
    if points.len() < 2 * min_segment {
        return Err(FitError::TooFewPoints {
            have: points.len(),
            need: 2 * min_segment,
        });
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.len);
    let n = pts.len();

    // Prefix sums make each candidate split O(1); the winning split is then
    // refitted with the centered routine for the returned lines.
    let mut sx = vec![0.0; n + 1];
    let mut sy = vec![0.0; n + 1];
    let mut sxx = vec![0.0; n + 1];
    let mut syy = vec![0.0; n + 1];
    let mut sxy = vec![0.0; n + 1];
    for (i, p) in pts.iter().enumerate() {
        sx[i + 1] = sx[i] + p.lx;
        sy[i + 1] = sy[i] + p.ly;
        sxx[i + 1] = sxx[i] + p.lx * p.lx;
        syy[i + 1] = syy[i] + p.ly * p.ly;
        sxy[i + 1] = sxy[i] + p.lx * p.ly;
    }
    let segment_sse = |a: usize, b: usize| -> Option<f64> {
        let m = (b - a) as f64;
        let dx = sx[b] - sx[a];
        let dy = sy[b] - sy[a];
        let cxx = (sxx[b] - sxx[a]) - dx * dx / m;
        let cyy = (syy[b] - syy[a]) - dy * dy / m;
        let cxy = (sxy[b] - sxy[a]) - dx * dy / m;
        if cxx <= 0.0 {
            return None; // all abscissae equal in this segment
        }
        Some((cyy - cxy * cxy / cxx).max(0.0))
    };

    let mut best: Option<(f64, usize)> = None;
    for k in min_segment..=(n - min_segment) {
        let (Some(s1), Some(s2)) = (segment_sse(0, k), segment_sse(k, n)) else {
            continue;
        };
        let total = s1 + s2;
        if best.is_none_or(|(b, _)| total < b) {
            best = Some((total, k));
        }
    }
    let (_, k) = best.ok_or(FitError::DegenerateDesign)?;

    let short_line = fit_line(&pts[..k])?;
    let long_line = fit_line(&pts[k..])?;
    Ok(TwoRegimeFit {
        short_line,
        long_line,
        split_len: pts[k].len,
        total_sse: short_line.sse + long_line.sse,
    })
}

/// The fit report emitted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub pair: [u32; 2],
    #[serde(rename = "B_short")]
    pub b_short: f64,
    #[serde(rename = "lnA_short")]
    pub ln_a_short: f64,
    #[serde(rename = "B_long")]
    pub b_long: f64,
    #[serde(rename = "lnA_long")]
    pub ln_a_long: f64,
    #[serde(rename = "split_N")]
    pub split_n: usize,
    pub sse_short: f64,
    pub sse_long: f64,
    pub excluded_points: usize,
    pub indistinguishable: bool,
}

impl FitReport {
    pub fn new(pair: [u32; 2], points: &LogLogPoints, fit: &TwoRegimeFit) -> Self {
        Self {
            pair,
            b_short: fit.short_line.gradient,
            ln_a_short: fit.short_line.intercept,
            b_long: fit.long_line.gradient,
            ln_a_long: fit.long_line.intercept,
            split_n: fit.split_len,
            sse_short: fit.short_line.sse,
            sse_long: fit.long_line.sse,
            excluded_points: points.excluded,
            indistinguishable: fit.slopes_indistinguishable(&points.points),
        }
    }
}

/// Plot-ready CSV: `lx,ly,regime,fitted_ly`, one row per point.
pub fn plot_data_csv(points: &[LogLogPoint], fit: &TwoRegimeFit) -> String {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.len);
    let mut out = String::from("lx,ly,regime,fitted_ly\n");
    for p in &pts {
        let (regime, line) = if p.len < fit.split_len {
            ("short", &fit.short_line)
        } else {
            ("long", &fit.long_line)
        };
        let _ = writeln!(out, "{},{},{},{}", p.lx, p.ly, regime, line.predict(p.lx));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use chrono::NaiveDate;
    use std::collections::BTreeMap;

    fn record(len: usize, g4: f64, g6: f64) -> MomentRecord {
        let mut gamma = BTreeMap::new();
        gamma.insert(2u32, 1.0);
        gamma.insert(4, g4);
        gamma.insert(6, g6);
        MomentRecord {
            t0: NaiveDate::from_ymd_opt(2000, 1, 3).unwrap(),
            len,
            mu: 0.0,
            central: BTreeMap::new(),
            gamma,
            zero_variance: false,
        }
    }

    fn degenerate(len: usize) -> MomentRecord {
        MomentRecord {
            t0: NaiveDate::from_ymd_opt(2000, 1, 3).unwrap(),
            len,
            mu: 0.0,
            central: BTreeMap::new(),
            gamma: BTreeMap::new(),
            zero_variance: true,
        }
    }

    #[test]
    fn points_take_logs_of_powers() {
        let recs = vec![record(10, std::f64::consts::E, std::f64::consts::E.powi(3))];
        let pts = loglog_points(&recs, 4, 6).unwrap();
        assert_eq!(pts.excluded, 0);
        assert_relative_eq!(pts.points[0].lx, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pts.points[0].ly, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_records_are_counted_not_substituted() {
        let recs = vec![degenerate(10), record(20, 3.0, 15.0), degenerate(30)];
        let pts = loglog_points(&recs, 4, 6).unwrap();
        assert_eq!(pts.points.len(), 1);
        assert_eq!(pts.excluded, 2);
    }

    #[test]
    fn all_degenerate_is_an_error() {
        let recs = vec![degenerate(10), degenerate(20)];
        assert_eq!(loglog_points(&recs, 4, 6), Err(FitError::NoUsablePoints));
    }

    #[test]
    fn exact_line_recovered_with_zero_sse() {
        let pts: Vec<LogLogPoint> = (0..20)
            .map(|i| {
                let lx = i as f64 * 0.1;
                LogLogPoint {
                    len: i + 10,
                    lx,
                    ly: 3.0 * lx + 1.0,
                }
            })
            .collect();
        let line = fit_line(&pts).unwrap();
        assert_relative_eq!(line.gradient, 3.0, epsilon = 1e-12);
        assert_relative_eq!(line.intercept, 1.0, epsilon = 1e-12);
        assert!(line.sse < 1e-24);
    }

    #[test]
    fn two_point_fit() {
        let pts = vec![
            LogLogPoint {
                len: 10,
                lx: 0.0,
                ly: 0.0,
            },
            LogLogPoint {
                len: 20,
                lx: 1.0,
                ly: 7.4,
            },
        ];
        let line = fit_line(&pts).unwrap();
        assert_relative_eq!(line.gradient, 7.4, epsilon = 1e-12);
        assert_relative_eq!(line.intercept, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn stored_long_window_reference_line_recovered() {
        // Regression anchor: points generated on the stored long-window
        // reference line y = 7.4x - 9.8 must fit back to its coefficients.
        let pts: Vec<LogLogPoint> = (0..25)
            .map(|i| {
                let lx = 1.3 + 0.02 * i as f64;
                LogLogPoint {
                    len: 25 + i,
                    lx,
                    ly: 7.4 * lx - 9.8,
                }
            })
            .collect();
        let line = fit_line(&pts).unwrap();
        assert_relative_eq!(line.gradient, 7.4, epsilon = 1e-9);
        assert_relative_eq!(line.intercept, -9.8, epsilon = 1e-9);
    }

    #[test]
    fn vertical_design_is_degenerate() {
        let pts = vec![
            LogLogPoint {
                len: 10,
                lx: 2.0,
                ly: 0.0,
            },
            LogLogPoint {
                len: 20,
                lx: 2.0,
                ly: 1.0,
            },
        ];
        assert_eq!(fit_line(&pts), Err(FitError::DegenerateDesign));
    }

    #[test]
    fn residuals_satisfy_normal_equations() {
        let pts: Vec<LogLogPoint> = (0..50)
            .map(|i| {
                let lx = (i as f64 * 0.731).sin();
                LogLogPoint {
                    len: i + 10,
                    lx,
                    ly: 2.0 * lx - 0.5 + ((i * i) as f64 * 0.17).sin() * 0.1,
                }
            })
            .collect();
        let line = fit_line(&pts).unwrap();
        let sum_r: f64 = pts.iter().map(|p| p.ly - line.predict(p.lx)).sum();
        let sum_rx: f64 = pts.iter().map(|p| (p.ly - line.predict(p.lx)) * p.lx).sum();
        assert!(sum_r.abs() < 1e-9, "residual sum {sum_r}");
        assert!(sum_rx.abs() < 1e-9, "residual-regressor product {sum_rx}");
    }

    #[test]
    fn too_few_points_for_two_regimes() {
        let pts: Vec<LogLogPoint> = (0..10)
            .map(|i| LogLogPoint {
                len: i + 2,
                lx: i as f64,
                ly: i as f64,
            })
            .collect();
        match fit_two_regimes(&pts, 10) {
            Err(FitError::TooFewPoints { need: 20, .. }) => {}
            other => panic!("expected TooFewPoints, got {other:?}"),
        }
    }

    #[test]
    fn single_line_data_keeps_total_sse_at_single_fit_level() {
        let pts: Vec<LogLogPoint> = (0..40)
            .map(|i| {
                let lx = i as f64 * 0.05;
                LogLogPoint {
                    len: i + 10,
                    lx,
                    ly: 2.5 * lx + 0.3,
                }
            })
            .collect();
        let single = fit_line(&pts).unwrap();
        let two = fit_two_regimes(&pts, 10).unwrap();
        assert!(two.total_sse <= single.sse + 1e-12);
        assert!((two.short_line.gradient - two.long_line.gradient).abs() < 1e-9);
        assert!(two.slopes_indistinguishable(&pts));
    }

    #[test]
    fn reordering_points_does_not_change_the_fit() {
        let mut pts: Vec<LogLogPoint> = (0..60)
            .map(|i| {
                let lx = i as f64 * 0.03;
                let ly = if i < 30 {
                    6.0 * lx - 3.7
                } else {
                    8.3 * lx - 5.8
                };
                LogLogPoint {
                    len: i + 10,
                    lx,
                    ly,
                }
            })
            .collect();
        let fit1 = fit_two_regimes(&pts, 10).unwrap();
        pts.reverse();
        pts.swap(3, 40);
        let fit2 = fit_two_regimes(&pts, 10).unwrap();
        assert_eq!(fit1, fit2);
    }
}
