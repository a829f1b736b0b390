//! Run configuration shared by the CLI and JSON config files.
//!
//! [`PartialConfig`] is the JSON-file schema (every field optional);
//! [`RunConfig`] is the fully resolved form after layering
//! defaults < config file < command-line flags. The resolved config is
//! echoed into every output file header for provenance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::garch::{GarchSpec, InitVar, MixtureSpec};
use crate::series::{Anchor, WindowPlan};
use crate::tail::TailSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("bad config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Output format for tabular results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?}: expected csv or json")),
        }
    }
}

/// JSON config-file schema: any subset of the run parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub input: Option<String>,
    pub output: Option<String>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,

    // Window plan.
    pub start_fraction: Option<f64>,
    pub step_fraction: Option<f64>,
    pub anchor: Option<Anchor>,
    pub min_window: Option<usize>,

    // Moment engine / scaling fit.
    pub orders: Option<Vec<u32>>,
    pub ratio_orders: Option<Vec<u32>>,
    pub pair: Option<[u32; 2]>,
    pub min_segment: Option<usize>,

    // VaR.
    pub confidence: Option<f64>,

    // GARCH + mixture.
    pub alpha0: Option<f64>,
    pub alpha1: Option<f64>,
    pub beta1: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub var1: Option<f64>,
    pub var2: Option<f64>,
    pub burn_in: Option<usize>,
    pub init_var: Option<InitVar>,
    pub steps: Option<usize>,

    // Tail model.
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub n_points: Option<usize>,
    pub sample_count: Option<usize>,
}

impl PartialConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Later layers win field by field.
    pub fn overlay(self, over: PartialConfig) -> PartialConfig {
        macro_rules! pick {
            ($field:ident) => {
                over.$field.or(self.$field)
            };
        }
        PartialConfig {
            input: pick!(input),
            output: pick!(output),
            format: pick!(format),
            seed: pick!(seed),
            start_fraction: pick!(start_fraction),
            step_fraction: pick!(step_fraction),
            anchor: pick!(anchor),
            min_window: pick!(min_window),
            orders: pick!(orders),
            ratio_orders: pick!(ratio_orders),
            pair: pick!(pair),
            min_segment: pick!(min_segment),
            confidence: pick!(confidence),
            alpha0: pick!(alpha0),
            alpha1: pick!(alpha1),
            beta1: pick!(beta1),
            a: pick!(a),
            b: pick!(b),
            var1: pick!(var1),
            var2: pick!(var2),
            burn_in: pick!(burn_in),
            init_var: pick!(init_var),
            steps: pick!(steps),
            x0: pick!(x0),
            x1: pick!(x1),
            gamma1: pick!(gamma1),
            gamma2: pick!(gamma2),
            c: pick!(c),
            n_min: pick!(n_min),
            n_max: pick!(n_max),
            n_points: pick!(n_points),
            sample_count: pick!(sample_count),
        }
    }
}

/// Fully resolved run parameters; every owning module revalidates its own
/// section before execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<String>,
    pub output: String,
    pub format: OutputFormat,
    pub seed: u64,
    pub plan: WindowPlan,
    pub orders: Vec<u32>,
    pub ratio_orders: Vec<u32>,
    pub pair: [u32; 2],
    pub min_segment: usize,
    pub confidence: f64,
    pub garch: GarchSpec,
    pub mixture: MixtureSpec,
    pub steps: usize,
    pub tail: TailSpec,
    pub n_min: usize,
    pub n_max: usize,
    pub n_points: usize,
    pub sample_count: usize,
}

impl RunConfig {
    /// Defaults for a command, before any file or flag overlays.
    pub fn defaults(command: &str) -> Self {
        Self {
            command: command.to_string(),
            input: None,
            output: ".".to_string(),
            format: OutputFormat::Csv,
            seed: 1,
            plan: WindowPlan::default(),
            orders: vec![4, 6],
            ratio_orders: vec![4, 6, 8, 10, 12],
            pair: [4, 6],
            min_segment: 10,
            confidence: 0.90,
            garch: GarchSpec::default(),
            mixture: MixtureSpec::default(),
            steps: 4536,
            tail: TailSpec::default(),
            n_min: 25,
            n_max: 1_000_000,
            n_points: 200,
            sample_count: 0,
        }
    }

    /// Applies a partial layer on top of this config.
    pub fn apply(mut self, layer: &PartialConfig) -> Self {
        if let Some(v) = &layer.input {
            self.input = Some(v.clone());
        }
        if let Some(v) = &layer.output {
            self.output = v.clone();
        }
        if let Some(v) = layer.format {
            self.format = v;
        }
        if let Some(v) = layer.seed {
            self.seed = v;
        }
        if let Some(v) = layer.start_fraction {
            self.plan.start_fraction = v;
        }
        if let Some(v) = layer.step_fraction {
            self.plan.step_fraction = v;
        }
        if let Some(v) = layer.anchor {
            self.plan.anchor = v;
        }
        if let Some(v) = layer.min_window {
            self.plan.min_length = v;
        }
        if let Some(v) = &layer.orders {
            self.orders = v.clone();
        }
        if let Some(v) = &layer.ratio_orders {
            self.ratio_orders = v.clone();
        }
        if let Some(v) = layer.pair {
            self.pair = v;
        }
        if let Some(v) = layer.min_segment {
            self.min_segment = v;
        }
        if let Some(v) = layer.confidence {
            self.confidence = v;
        }
        if let Some(v) = layer.alpha0 {
            self.garch.alpha0 = v;
        }
        if let Some(v) = layer.alpha1 {
            self.garch.alpha1 = v;
        }
        if let Some(v) = layer.beta1 {
            self.garch.beta1 = v;
        }
        if let Some(v) = layer.burn_in {
            self.garch.burn_in = v;
        }
        if let Some(v) = layer.init_var {
            self.garch.init_var = v;
        }
        if let Some(v) = layer.a {
            self.mixture.weight1 = v;
        }
        if let Some(v) = layer.b {
            self.mixture.weight2 = v;
        }
        if let Some(v) = layer.var1 {
            self.mixture.var1 = v;
        }
        if let Some(v) = layer.var2 {
            self.mixture.var2 = v;
        }
        if let Some(v) = layer.steps {
            self.steps = v;
        }
        if let Some(v) = layer.x0 {
            self.tail.x0 = v;
        }
        if let Some(v) = layer.x1 {
            self.tail.x1 = v;
        }
        if let Some(v) = layer.gamma1 {
            self.tail.gamma1 = v;
        }
        if let Some(v) = layer.gamma2 {
            self.tail.gamma2 = v;
        }
        if let Some(v) = layer.c {
            self.tail.c = v;
        }
        if let Some(v) = layer.n_min {
            self.n_min = v;
        }
        if let Some(v) = layer.n_max {
            self.n_max = v;
        }
        if let Some(v) = layer.n_points {
            self.n_points = v;
        }
        if let Some(v) = layer.sample_count {
            self.sample_count = v;
        }
        self
    }

    /// Cross-field checks that do not belong to any single module.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for &n in self.orders.iter().chain(&self.ratio_orders) {
            if n < 2 || !n.is_multiple_of(2) {
                return Err(ConfigError::Invalid(format!(
                    "orders must be even and >= 2, got {n}"
                )));
            }
        }
        if !self.pair[0].is_multiple_of(2)
            || !self.pair[1].is_multiple_of(2)
            || self.pair[0] < 2
            || self.pair[1] < 2
        {
            return Err(ConfigError::Invalid(format!(
                "pair orders must be even and >= 2, got {:?}",
                self.pair
            )));
        }
        if self.orders.is_empty() {
            return Err(ConfigError::Invalid("orders must be non-empty".into()));
        }
        if self.n_min < 1 || self.n_max < self.n_min || self.n_points < 2 {
            return Err(ConfigError::Invalid(format!(
                "tail sweep needs 1 <= n_min <= n_max and n_points >= 2, got {} {} {}",
                self.n_min, self.n_max, self.n_points
            )));
        }
        Ok(())
    }

    /// Compact single-line JSON used as the provenance echo in file headers.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
