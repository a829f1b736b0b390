//! Windowed higher-order moment analysis of financial return series.
//!
//! The pipeline: ingest dated closes ([`series`]), take log returns, grow a
//! ladder of truncation windows, compute standardized moments per window
//! ([`moments`]), and fit the two-regime scaling law
//! `gamma_6 = A * gamma_4^B` in log-log space ([`scaling`]). Alongside the
//! empirical path sit a seedable GARCH-double-normal simulator ([`garch`]),
//! historical Value-at-Risk curves over the same window ladder ([`var`]),
//! and the hierarchical Pareto tail model that predicts the two scaling
//! exponents analytically ([`tail`]).
//!
//! All randomness flows through explicitly seeded ChaCha12 generators:
//! identical inputs give bit-identical outputs within this implementation.

pub mod config;
pub mod garch;
pub mod moments;
pub mod scaling;
pub mod series;
pub mod tail;
pub mod var;

pub use config::{OutputFormat, PartialConfig, RunConfig};
pub use garch::{simulate, GarchSpec, InitVar, MixtureSpec};
pub use moments::{
    gaussian_moment, gaussian_ratio, moment_profile, standardized_moment, MomentRecord,
};
pub use scaling::{fit_line, fit_two_regimes, loglog_points, FitReport, TwoRegimeFit};
pub use series::{
    build_windows, load_input_series, load_prices, log_returns, Anchor, PriceSeries, ReturnSeries,
    Window, WindowPlan,
};
pub use tail::{TailModel, TailPrediction, TailSpec};
pub use var::{historical_var, var_curve, VarCurve};
