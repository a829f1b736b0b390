//! Historical Value-at-Risk per window and the VaR-versus-window-length curve.
//!
//! The VaR at confidence `q` is the empirical `(1 - q)` quantile of a
//! window's returns, sign-flipped so a loss reports positive. The quantile
//! uses linear interpolation between order statistics with plotting position
//! `(k - 1) / (n - 1)` (the common "type 7" convention), which is continuous
//! in the data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{build_windows, PlanError, ReturnSeries, WindowPlan};

#[derive(Debug, Error, PartialEq)]
pub enum VarError {
    #[error("confidence must be strictly between 0 and 1, got {0}")]
    InvalidConfidence(f64),
    #[error(
        "window of {len} day(s) too small for confidence {confidence}: need at least {required}"
    )]
    WindowTooSmall {
        len: usize,
        confidence: f64,
        required: usize,
    },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Smallest window admissible at a confidence level:
/// `ceil(1 / (1 - confidence))`, evaluated with a small guard so exact
/// decimal levels (0.90 -> 10) do not round up through float error.
pub fn min_window_for(confidence: f64) -> usize {
    ((1.0 / (1.0 - confidence)) - 1e-9).ceil() as usize
}

/// Type-7 empirical quantile of `values` at probability `p`.
fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let w = h - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

/// Historical VaR of one window: the `(1 - confidence)` return quantile
/// reported as a positive loss magnitude.
pub fn historical_var(values: &[f64], confidence: f64) -> Result<f64, VarError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(VarError::InvalidConfidence(confidence));
    }
    let required = min_window_for(confidence);
    if values.len() < required.max(2) {
        return Err(VarError::WindowTooSmall {
            len: values.len(),
            confidence,
            required: required.max(2),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(-quantile_type7(&sorted, 1.0 - confidence))
}

/// One point of the curve; `loss` is None when the window was too small for
/// the requested confidence (flagged, then skipped by downstream analysis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarPoint {
    /// Position of the window in the plan's ladder.
    pub window_index: usize,
    pub len: usize,
    pub loss: Option<f64>,
}

/// Historical VaR through the plan's whole window ladder, ordered by window
/// length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarCurve {
    pub points: Vec<VarPoint>,
    pub confidence: f64,
    pub plan: WindowPlan,
}

pub fn var_curve(
    returns: &ReturnSeries,
    plan: &WindowPlan,
    confidence: f64,
) -> Result<VarCurve, VarError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(VarError::InvalidConfidence(confidence));
    }
    let windows = build_windows(returns, plan)?;
    let points = windows
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let loss = match historical_var(w.values, confidence) {
                Ok(loss) => Some(loss),
                Err(VarError::WindowTooSmall { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(VarPoint {
                window_index: i,
                len: w.len(),
                loss,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VarCurve {
        points,
        confidence,
        plan: *plan,
    })
}

impl VarCurve {
    /// CSV export: `N,var_loss,flag,window_index`. The flag is `ok` or
    /// `too_small`; too-small rows leave the loss cell empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,var_loss,flag,window_index\n");
        for p in &self.points {
            match p.loss {
                Some(loss) => {
                    let _ = writeln!(out, "{},{},ok,{}", p.len, loss, p.window_index);
                }
                None => {
                    let _ = writeln!(out, "{},,too_small,{}", p.len, p.window_index);
                }
            }
        }
        out
    }
}
