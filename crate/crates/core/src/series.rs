//! Price/return series ingestion and the growing-window truncation scheme.
//!
//! A [`PriceSeries`] holds dated closing prices; [`log_returns`] turns it into
//! the [`ReturnSeries`] that every downstream analysis consumes. A
//! [`WindowPlan`] describes the truncation ladder (start at a fraction of the
//! series, grow in fractional increments up to the full length) and
//! [`build_windows`] materializes it as contiguous slices that all share one
//! anchor day.

use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised while loading or constructing series.
///
/// Row numbers are 1-based indices into the *data* rows (the header line is
/// row 0, the first record below it is row 1).
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at row {row}: {reason}")]
    ParseError { row: usize, reason: String },
    #[error("non-positive close at row {0}")]
    NonPositivePrice(usize),
    #[error("dates not strictly increasing at row {0}")]
    NonMonotonicDates(usize),
    #[error("series too short: at least 2 observations are required")]
    SeriesTooShort,
}

/// Errors raised when a [`WindowPlan`] cannot be applied to a series.
#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("invalid window plan: {0}")]
    InvalidPlan(String),
    #[error(
        "plan infeasible: first window of {first_len} day(s) is below the minimum of {min_length}"
    )]
    Infeasible { first_len: usize, min_length: usize },
}

/// Dated closing prices for one instrument.
///
/// Invariants (enforced at construction): strictly increasing dates, every
/// close finite and > 0, at least two observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    label: String,
    observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    pub fn new(
        label: impl Into<String>,
        observations: Vec<(NaiveDate, f64)>,
    ) -> Result<Self, IngestError> {
        if observations.len() < 2 {
            return Err(IngestError::SeriesTooShort);
        }
        for (i, (date, close)) in observations.iter().enumerate() {
            let row = i + 1;
            if !close.is_finite() {
                return Err(IngestError::ParseError {
                    row,
                    reason: format!("non-finite close {close}"),
                });
            }
            if *close <= 0.0 {
                return Err(IngestError::NonPositivePrice(row));
            }
            if i > 0 && observations[i - 1].0 >= *date {
                return Err(IngestError::NonMonotonicDates(row));
            }
        }
        Ok(Self {
            label: label.into(),
            observations,
        })
    }

    /// Parses the `date,close` CSV schema: required header, ISO-8601 dates,
    /// decimal closes, UTF-8, LF or CRLF. Leading `#` comment lines are
    /// skipped. Bad rows abort the load; nothing is skipped silently.
    pub fn from_csv_str(label: impl Into<String>, text: &str) -> Result<Self, IngestError> {
        let rows = parse_two_column_csv(text, "date", "close")?;
        Self::new(label, rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = read_to_string(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::from_csv_str(label, &text)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 2 by construction
    }
}

/// Loads a `date,close` CSV from disk.
pub fn load_prices(path: impl AsRef<Path>) -> Result<PriceSeries, IngestError> {
    PriceSeries::from_csv_path(path)
}

/// Dated log returns, usually derived from a [`PriceSeries`].
///
/// The date attached to each return is the date of the *later* of the two
/// closes it spans.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    source_label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(
        source_label: impl Into<String>,
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self, IngestError> {
        if dates.len() != values.len() {
            return Err(IngestError::ParseError {
                row: 0,
                reason: "date/value length mismatch".into(),
            });
        }
        if values.is_empty() {
            return Err(IngestError::SeriesTooShort);
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(IngestError::ParseError {
                    row: i + 1,
                    reason: format!("non-finite log return {v}"),
                });
            }
            if i > 0 && dates[i - 1] >= dates[i] {
                return Err(IngestError::NonMonotonicDates(i + 1));
            }
        }
        Ok(Self {
            source_label: source_label.into(),
            dates,
            values,
        })
    }

    /// Wraps raw values with synthetic trading-day dates (consecutive
    /// weekdays) counted from a fixed epoch, so simulated or model-generated
    /// series run through the same pipeline as empirical ones.
    pub fn from_values(source_label: impl Into<String>, values: Vec<f64>) -> Self {
        let dates = synthetic_trading_days(values.len());
        Self::new(source_label, dates, values).expect("synthetic dates are strictly increasing")
    }

    /// Parses the `date,log_return` CSV schema (same conventions as the price
    /// schema).
    pub fn from_csv_str(label: impl Into<String>, text: &str) -> Result<Self, IngestError> {
        let rows = parse_two_column_csv(text, "date", "log_return")?;
        let (dates, values) = rows.into_iter().unzip();
        Self::new(label, dates, values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = read_to_string(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::from_csv_str(label, &text)
    }

    /// Emits the `date,log_return` CSV with 17 significant digits, enough for
    /// every 64-bit float to round-trip exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32 + 16);
        out.push_str("date,log_return\n");
        for (date, v) in self.dates.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{:.16e}", date.format("%Y-%m-%d"), v);
        }
        out
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Log returns of consecutive closes: `x[i] = ln(close[i+1] / close[i])`.
///
/// The output has one element fewer than the input; its invariants are
/// guaranteed by the `PriceSeries` invariants.
pub fn log_returns(prices: &PriceSeries) -> ReturnSeries {
    let obs = prices.observations();
    let mut dates = Vec::with_capacity(obs.len() - 1);
    let mut values = Vec::with_capacity(obs.len() - 1);
    for pair in obs.windows(2) {
        dates.push(pair[1].0);
        values.push((pair[1].1 / pair[0].1).ln());
    }
    ReturnSeries::new(prices.label(), dates, values)
        .expect("price invariants guarantee valid returns")
}

/// Which trading day every window in a plan shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// All windows begin on the first day of the series.
    SeriesStart,
    /// All windows end on the last day of the series.
    SeriesEnd,
}

/// The growing-window truncation scheme: window lengths are
/// `round(f * L)` for `f = start_fraction, start_fraction + step_fraction,
/// ..., 1.0`, deduplicated after rounding, all sharing one anchor.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WindowPlan {
    pub start_fraction: f64,
    pub step_fraction: f64,
    pub anchor: Anchor,
    /// Smallest admissible window, in trading days. The plan is infeasible
    /// when its first window rounds below this.
    pub min_length: usize,
}

impl Default for WindowPlan {
    fn default() -> Self {
        Self {
            start_fraction: 0.01,
            step_fraction: 0.001,
            anchor: Anchor::SeriesStart,
            min_length: 2,
        }
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

impl WindowPlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if !(self.start_fraction > 0.0 && self.start_fraction <= 1.0) {
            return Err(PlanError::InvalidPlan(format!(
                "start_fraction must be in (0, 1], got {}",
                self.start_fraction
            )));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(PlanError::InvalidPlan(format!(
                "step_fraction must be in (0, 1], got {}",
                self.step_fraction
            )));
        }
        Ok(())
    }

    /// The deduplicated, strictly increasing ladder of window lengths for a
    /// series of `series_len` returns. The final window is always the whole
    /// series.
    pub fn window_lengths(&self, series_len: usize) -> Result<Vec<usize>, PlanError> {
        self.validate()?;
        let min_length = self.min_length.max(2);
        let first = round_half_up(self.start_fraction * series_len as f64);
        if first < min_length {
            return Err(PlanError::Infeasible {
                first_len: first,
                min_length,
            });
        }
        let steps = ((1.0 - self.start_fraction) / self.step_fraction).ceil() as usize;
        let mut lengths = Vec::with_capacity(steps + 2);
        for k in 0..=steps {
            let f = (self.start_fraction + k as f64 * self.step_fraction).min(1.0);
            let len = round_half_up(f * series_len as f64).min(series_len);
            if lengths.last() != Some(&len) {
                lengths.push(len);
            }
        }
        if lengths.last() != Some(&series_len) {
            lengths.push(series_len);
        }
        Ok(lengths)
    }
}

/// One truncated sub-series: a verbatim contiguous slice of the returns it
/// was cut from, at least two days long.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    /// Date of the first trading day inside the window.
    pub t0: NaiveDate,
    pub values: &'a [f64],
}

impl Window<'_> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Materializes the plan's window ladder over a return series.
pub fn build_windows<'a>(
    returns: &'a ReturnSeries,
    plan: &WindowPlan,
) -> Result<Vec<Window<'a>>, PlanError> {
    let len = returns.len();
    let lengths = plan.window_lengths(len)?;
    let values = returns.values();
    let dates = returns.dates();
    Ok(lengths
        .into_iter()
        .map(|n| {
            let start = match plan.anchor {
                Anchor::SeriesStart => 0,
                Anchor::SeriesEnd => len - n,
            };
            Window {
                t0: dates[start],
                values: &values[start..start + n],
            }
        })
        .collect())
}

/// Synthetic trading-day calendar: consecutive weekdays from 2000-01-03.
pub fn synthetic_trading_days(count: usize) -> Vec<NaiveDate> {
    use chrono::Datelike;
    let epoch = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    let mut dates = Vec::with_capacity(count);
    let mut day = epoch;
    while dates.len() < count {
        if day.weekday().number_from_monday() <= 5 {
            dates.push(day);
        }
        day = day.succ_opt().unwrap();
    }
    dates
}

/// What a `date,*` CSV turned out to contain, based on its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Prices,
    Returns,
}

/// Loads either schema by sniffing the header: `date,close` is ingested as
/// prices and converted to log returns, `date,log_return` is taken as-is.
pub fn load_input_series(
    path: impl AsRef<Path>,
) -> Result<(ReturnSeries, SeriesKind), IngestError> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    sniff_input_series(label, &text)
}

/// Header-sniffing core of [`load_input_series`], parsing from memory.
pub fn sniff_input_series(
    label: impl Into<String>,
    text: &str,
) -> Result<(ReturnSeries, SeriesKind), IngestError> {
    let label = label.into();
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| l.trim().trim_end_matches('\r').to_string())
        .unwrap_or_default();
    match header.as_str() {
        "date,close" => {
            let prices = PriceSeries::from_csv_str(label, text)?;
            Ok((log_returns(&prices), SeriesKind::Prices))
        }
        "date,log_return" => Ok((
            ReturnSeries::from_csv_str(label, text)?,
            SeriesKind::Returns,
        )),
        other => Err(IngestError::ParseError {
            row: 0,
            reason: format!(
                "unrecognized header {other:?}: expected \"date,close\" or \"date,log_return\""
            ),
        }),
    }
}

fn read_to_string(path: &Path) -> Result<String, IngestError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(IngestError::FileNotFound(path.display().to_string()))
        }
        Err(e) => Err(IngestError::Io {
            path: path.display().to_string(),
            source: e,
        }),
    }
}

fn parse_two_column_csv(
    text: &str,
    col0: &str,
    col1: &str,
) -> Result<Vec<(NaiveDate, f64)>, IngestError> {
    let expected = format!("{col0},{col1}");
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim_start().starts_with('#'));

    let header = lines
        .next()
        .ok_or_else(|| IngestError::ParseError {
            row: 0,
            reason: "empty file".into(),
        })?
        .trim();
    if header != expected {
        return Err(IngestError::ParseError {
            row: 0,
            reason: format!("expected header {expected:?}, found {header:?}"),
        });
    }

    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            // Tolerate a trailing blank line only.
            continue;
        }
        let mut fields = line.split(',');
        let (date_field, value_field) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(v), None) => (d.trim(), v.trim()),
            _ => {
                return Err(IngestError::ParseError {
                    row,
                    reason: format!("expected 2 comma-separated fields, got {line:?}"),
                })
            }
        };
        let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d").map_err(|e| {
            IngestError::ParseError {
                row,
                reason: format!("bad date {date_field:?}: {e}"),
            }
        })?;
        let value: f64 = value_field.parse().map_err(|e| IngestError::ParseError {
            row,
            reason: format!("bad {col1} {value_field:?}: {e}"),
        })?;
        rows.push((date, value));
    }
    Ok(rows)
}
