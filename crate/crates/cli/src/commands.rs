//! The five subcommand implementations and their file writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use momentscale::config::{OutputFormat, RunConfig};
use momentscale::garch::simulate;
use momentscale::moments::{
    gaussian_moment, moment_profile, records_to_csv, records_to_json, MomentRecord,
};
use momentscale::scaling::{fit_two_regimes, loglog_points, plot_data_csv, FitReport};
use momentscale::series::{load_input_series, ReturnSeries};
use momentscale::tail::curve_to_csv;
use momentscale::var::var_curve;

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    Path::new(&cfg.output).join(name)
}

/// Writes a CSV with the resolved config echoed as a leading comment line.
fn write_csv(cfg: &RunConfig, name: &str, body: &str) -> anyhow::Result<()> {
    let path = out_path(cfg, name);
    fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
    let content = format!("# config {}\n{}", cfg.echo(), body);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes a JSON object with the resolved config under a `config` key.
fn write_json(cfg: &RunConfig, name: &str, mut value: serde_json::Value) -> anyhow::Result<()> {
    let path = out_path(cfg, name);
    fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
    if let Some(obj) = value.as_object_mut() {
        obj.insert("config".into(), serde_json::to_value(cfg)?);
    }
    let content = format!("{:#}\n", value);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_series(cfg: &RunConfig) -> anyhow::Result<ReturnSeries> {
    let input = cfg
        .input
        .as_ref()
        .context("an --input series CSV is required")?;
    let (series, kind) = load_input_series(input)?;
    println!(
        "loaded {} ({} returns, {:?} input)",
        input,
        series.len(),
        kind
    );
    Ok(series)
}

/// Full-series gaussian-to-empirical ratio rows: order, empirical gamma_n,
/// gaussian gamma_n, ratio.
fn ratio_rows(full: &MomentRecord, orders: &[u32]) -> Vec<(u32, Option<f64>, f64, Option<f64>)> {
    orders
        .iter()
        .map(|&n| {
            let gaussian = gaussian_moment(n).expect("validated order");
            let empirical = full.gamma.get(&n).copied();
            let ratio = empirical.map(|g| gaussian / g);
            (n, empirical, gaussian, ratio)
        })
        .collect()
}

pub fn cmd_moments(cfg: &RunConfig) -> anyhow::Result<()> {
    let series = load_series(cfg)?;
    // The ratio table needs the full-series window even when the profile
    // orders differ.
    let mut orders = cfg.orders.clone();
    for &n in &cfg.ratio_orders {
        if !orders.contains(&n) {
            orders.push(n);
        }
    }
    let records = moment_profile(&series, &cfg.plan, &orders)?;
    let full = records.last().context("empty profile")?;
    let rows = ratio_rows(full, &cfg.ratio_orders);

    match cfg.format {
        OutputFormat::Csv => {
            write_csv(cfg, "moments.csv", &records_to_csv(&records, &cfg.orders))?;
            let mut body = String::from("n,gamma_n,gamma_gaussian,ratio\n");
            for (n, emp, gauss, ratio) in &rows {
                match (emp, ratio) {
                    (Some(e), Some(r)) => {
                        let _ = writeln!(body, "{n},{e},{gauss},{r}");
                    }
                    _ => {
                        let _ = writeln!(body, "{n},,{gauss},");
                    }
                }
            }
            write_csv(cfg, "ratios.csv", &body)?;
        }
        OutputFormat::Json => {
            write_json(
                cfg,
                "moments.json",
                serde_json::json!({ "records": records_to_json(&records, &cfg.orders) }),
            )?;
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, emp, gauss, ratio)| {
                    serde_json::json!({
                        "n": n,
                        "gamma_n": emp,
                        "gamma_gaussian": gauss,
                        "ratio": ratio,
                    })
                })
                .collect();
            write_json(cfg, "ratios.json", serde_json::json!({ "rows": rows }))?;
        }
    }
    Ok(())
}

pub fn cmd_scaling(cfg: &RunConfig) -> anyhow::Result<()> {
    let series = load_series(cfg)?;
    let orders = vec![cfg.pair[0], cfg.pair[1]];
    let records = moment_profile(&series, &cfg.plan, &orders)?;
    let points = loglog_points(&records, cfg.pair[0], cfg.pair[1])?;
    let fit = fit_two_regimes(&points.points, cfg.min_segment)?;
    let report = FitReport::new(cfg.pair, &points, &fit);
    if report.indistinguishable {
        eprintln!(
            "warning: short- and long-window gradients are statistically indistinguishable \
             ({:.3} vs {:.3}); a single scaling regime describes this series",
            report.b_short, report.b_long
        );
    }
    write_json(cfg, "scaling_report.json", serde_json::to_value(&report)?)?;
    write_csv(
        cfg,
        "scaling_points.csv",
        &plot_data_csv(&points.points, &fit),
    )?;
    Ok(())
}

pub fn cmd_garch(cfg: &RunConfig) -> anyhow::Result<()> {
    let series = simulate(&cfg.garch, &cfg.mixture, cfg.steps, cfg.seed)?;
    write_csv(cfg, "garch_series.csv", &series.to_csv())?;
    Ok(())
}

pub fn cmd_var(cfg: &RunConfig) -> anyhow::Result<()> {
    let series = load_series(cfg)?;
    let curve = var_curve(&series, &cfg.plan, cfg.confidence)?;
    match cfg.format {
        OutputFormat::Csv => write_csv(cfg, "var_curve.csv", &curve.to_csv())?,
        OutputFormat::Json => write_json(
            cfg,
            "var_curve.json",
            serde_json::json!({
                "confidence": curve.confidence,
                "points": serde_json::to_value(&curve.points)?,
            }),
        )?,
    }
    Ok(())
}

pub fn cmd_tail(cfg: &RunConfig) -> anyhow::Result<()> {
    let model = cfg.tail.normalize()?;
    let mut prediction = cfg.tail.predicted_exponents()?;

    // Log-spaced sweep of window lengths.
    let (lo, hi) = (cfg.n_min as f64, cfg.n_max as f64);
    let mut lens: Vec<usize> = (0..cfg.n_points)
        .map(|i| {
            let t = i as f64 / (cfg.n_points - 1) as f64;
            (lo * (hi / lo).powf(t)).round() as usize
        })
        .collect();
    lens.dedup();
    // Drop lengths below the solvability bound N > C.
    lens.retain(|&n| (n as f64) > cfg.tail.c);
    anyhow::ensure!(!lens.is_empty(), "no window length in the sweep exceeds C");

    let curve = model.gamma_curve(&lens)?;
    write_csv(cfg, "tail_curve.csv", &curve_to_csv(&curve))?;

    // Fit the analytic curve to fill the regime-line prefactors exp(lnA).
    let pts: Vec<momentscale::scaling::LogLogPoint> = curve
        .iter()
        .map(|p| momentscale::scaling::LogLogPoint {
            len: p.len,
            lx: p.gamma4.ln(),
            ly: p.gamma6.ln(),
        })
        .collect();
    let fitted = fit_two_regimes(&pts, cfg.min_segment).ok();
    if let Some(fit) = &fitted {
        prediction.prefactor_short = Some(fit.short_line.intercept.exp());
        prediction.prefactor_long = Some(fit.long_line.intercept.exp());
    }
    let mut report = serde_json::json!({
        "spec": serde_json::to_value(cfg.tail)?,
        "amplitude": model.amplitude(),
        "prediction": serde_json::to_value(prediction)?,
    });
    if let Some(fit) = &fitted {
        report["curve_fit"] = serde_json::json!({
            "B_short": fit.short_line.gradient,
            "B_long": fit.long_line.gradient,
            "split_N": fit.split_len,
        });
    }
    write_json(cfg, "tail_report.json", report)?;

    if cfg.sample_count > 0 {
        let draws = model.sample(cfg.sample_count, cfg.seed);
        let series = ReturnSeries::from_values(format!("tail-sample-seed{}", cfg.seed), draws);
        write_csv(cfg, "tail_sample.csv", &series.to_csv())?;
    }
    Ok(())
}
