//! Command-line front end: moments, scaling, garch, var and tail
//! subcommands over the momentscale library.
//!
//! Flag precedence is command line > `--config` JSON file > built-in
//! defaults. Every output file embeds the fully resolved configuration in
//! its header, and seeded commands are bit-reproducible run to run.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momentscale::config::{OutputFormat, PartialConfig, RunConfig};
use momentscale::series::Anchor;

#[derive(Parser)]
#[command(
    name = "momentscale",
    about = "Windowed higher-order moment scaling, GARCH simulation, historical VaR and Pareto-tail analysis for return series",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-window standardized moments and gaussian-to-empirical ratio table.
    Moments(MomentsArgs),
    /// Two-regime scaling fit of ln(gamma_m) against ln(gamma_4).
    Scaling(ScalingArgs),
    /// Simulate the GARCH-double-normal(1,1) process to a series CSV.
    Garch(GarchArgs),
    /// Historical VaR curve over the window ladder.
    Var(VarArgs),
    /// Analytic tail-model curve, predicted exponents, optional sampling.
    Tail(TailArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Output format for tabular results (csv or json).
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Seed for any randomness in the command.
    #[arg(long)]
    seed: Option<u64>,
    /// On failure, print a machine-readable error JSON to stderr.
    #[arg(long, default_value_t = false)]
    error_json: bool,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

#[derive(Args, Clone)]
struct PlanArgs {
    /// First window length as a fraction of the series.
    #[arg(long)]
    start_fraction: Option<f64>,
    /// Ladder increment as a fraction of the series.
    #[arg(long)]
    step_fraction: Option<f64>,
    /// Whether windows share the first or the last trading day (start/end).
    #[arg(long, value_parser = parse_anchor)]
    anchor: Option<Anchor>,
    /// Smallest admissible window in trading days.
    #[arg(long)]
    min_window: Option<usize>,
}

fn parse_anchor(s: &str) -> Result<Anchor, String> {
    match s {
        "start" | "series_start" => Ok(Anchor::SeriesStart),
        "end" | "series_end" => Ok(Anchor::SeriesEnd),
        other => Err(format!("unknown anchor {other:?}: expected start or end")),
    }
}

#[derive(Args, Clone)]
struct MomentsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    plan: PlanArgs,
    /// Input CSV, either date,close or date,log_return.
    #[arg(long)]
    input: String,
    /// Even moment orders for the per-window table.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    /// Even orders for the full-series gaussian-ratio table.
    #[arg(long, value_delimiter = ',')]
    ratio_orders: Option<Vec<u32>>,
}

#[derive(Args, Clone)]
struct ScalingArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    plan: PlanArgs,
    /// Input CSV, either date,close or date,log_return.
    #[arg(long)]
    input: String,
    /// Moment pair to fit, e.g. 4,6 or 4,8.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pair: Option<Vec<u32>>,
    /// Minimum points per regime segment.
    #[arg(long)]
    min_segment: Option<usize>,
}

#[derive(Args, Clone)]
struct GarchArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    /// Weight of the narrow mixture component.
    #[arg(long)]
    a: Option<f64>,
    /// Weight of the wide mixture component.
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    var1: Option<f64>,
    #[arg(long)]
    var2: Option<f64>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Simulated series length after burn-in.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args, Clone)]
struct VarArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    plan: PlanArgs,
    /// Input CSV, either date,close or date,log_return.
    #[arg(long)]
    input: String,
    /// VaR confidence level in (0, 1).
    #[arg(long)]
    confidence: Option<f64>,
}

#[derive(Args, Clone)]
struct TailArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    x1: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    /// Rare-event count constant of the cutoff condition.
    #[arg(long = "c")]
    c: Option<f64>,
    /// Smallest window length of the analytic sweep.
    #[arg(long)]
    n_min: Option<usize>,
    /// Largest window length of the analytic sweep.
    #[arg(long)]
    n_max: Option<usize>,
    /// Number of log-spaced sweep points.
    #[arg(long)]
    n_points: Option<usize>,
    /// Also emit a sampled synthetic series of this many draws.
    #[arg(long)]
    sample_count: Option<usize>,
    /// Minimum points per regime when fitting the curve's prefactors.
    #[arg(long)]
    min_segment: Option<usize>,
}

fn common_layer(common: &CommonArgs, plan: Option<&PlanArgs>) -> PartialConfig {
    PartialConfig {
        output: common.out.clone(),
        format: common.format,
        seed: common.seed,
        start_fraction: plan.and_then(|p| p.start_fraction),
        step_fraction: plan.and_then(|p| p.step_fraction),
        anchor: plan.and_then(|p| p.anchor),
        min_window: plan.and_then(|p| p.min_window),
        ..PartialConfig::default()
    }
}

/// defaults < config file < flags
fn resolve(command: &str, common: &CommonArgs, flags: PartialConfig) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {path}: {e}"))?;
        let file_layer = PartialConfig::from_json_str(&text)?;
        cfg = cfg.apply(&file_layer);
    }
    cfg = cfg.apply(&flags);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Moments(args) => {
            let mut layer = common_layer(&args.common, Some(&args.plan));
            layer.input = Some(args.input.clone());
            layer.orders = args.orders.clone();
            layer.ratio_orders = args.ratio_orders.clone();
            let cfg = resolve("moments", &args.common, layer)?;
            commands::cmd_moments(&cfg)
        }
        Command::Scaling(args) => {
            let mut layer = common_layer(&args.common, Some(&args.plan));
            layer.input = Some(args.input.clone());
            if let Some(p) = &args.pair {
                if p.len() != 2 {
                    anyhow::bail!("--pair expects exactly two orders, e.g. --pair 4,6");
                }
                layer.pair = Some([p[0], p[1]]);
            }
            layer.min_segment = args.min_segment;
            let cfg = resolve("scaling", &args.common, layer)?;
            commands::cmd_scaling(&cfg)
        }
        Command::Garch(args) => {
            let mut layer = common_layer(&args.common, None);
            layer.alpha0 = args.alpha0;
            layer.alpha1 = args.alpha1;
            layer.beta1 = args.beta1;
            layer.a = args.a;
            layer.b = args.b;
            layer.var1 = args.var1;
            layer.var2 = args.var2;
            layer.burn_in = args.burn_in;
            layer.steps = args.steps;
            let cfg = resolve("garch", &args.common, layer)?;
            commands::cmd_garch(&cfg)
        }
        Command::Var(args) => {
            let mut layer = common_layer(&args.common, Some(&args.plan));
            layer.input = Some(args.input.clone());
            layer.confidence = args.confidence;
            let cfg = resolve("var", &args.common, layer)?;
            commands::cmd_var(&cfg)
        }
        Command::Tail(args) => {
            let mut layer = common_layer(&args.common, None);
            layer.x0 = args.x0;
            layer.x1 = args.x1;
            layer.gamma1 = args.gamma1;
            layer.gamma2 = args.gamma2;
            layer.c = args.c;
            layer.n_min = args.n_min;
            layer.n_max = args.n_max;
            layer.n_points = args.n_points;
            layer.sample_count = args.sample_count;
            layer.min_segment = args.min_segment;
            let cfg = resolve("tail", &args.common, layer)?;
            commands::cmd_tail(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let error_json = match &cli.command {
        Command::Moments(a) => a.common.error_json,
        Command::Scaling(a) => a.common.error_json,
        Command::Garch(a) => a.common.error_json,
        Command::Var(a) => a.common.error_json,
        Command::Tail(a) => a.common.error_json,
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if error_json {
                let obj = serde_json::json!({ "error": format!("{err:#}") });
                eprintln!("{obj}");
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::FAILURE
        }
    }
}
