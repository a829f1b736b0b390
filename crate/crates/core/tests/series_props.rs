//! Properties of ingestion and the window ladder.

use chrono::NaiveDate;
use momentscale::series::{
    build_windows, log_returns, Anchor, PriceSeries, ReturnSeries, WindowPlan,
};
use proptest::prelude::*;

fn price_series(closes: &[f64]) -> PriceSeries {
    let base = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    let obs = closes
        .iter()
        .enumerate()
        .map(|(i, c)| (base + chrono::Days::new(i as u64), *c))
        .collect();
    PriceSeries::new("prop", obs).unwrap()
}

proptest! {
    #[test]
    fn returns_telescope_to_log_price_ratio(
        closes in prop::collection::vec(0.5f64..500.0, 2..300)
    ) {
        let prices = price_series(&closes);
        let returns = log_returns(&prices);
        let sum: f64 = returns.values().iter().sum();
        let expect = (closes.last().unwrap() / closes.first().unwrap()).ln();
        prop_assert!((sum - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn cumulative_returns_reconstruct_every_close(
        closes in prop::collection::vec(0.5f64..500.0, 2..300)
    ) {
        let prices = price_series(&closes);
        let returns = log_returns(&prices);
        let mut acc = 0.0;
        for (i, x) in returns.values().iter().enumerate() {
            acc += x;
            let rebuilt = acc.exp() * closes[0];
            let truth = closes[i + 1];
            prop_assert!(
                ((rebuilt - truth) / truth).abs() <= 1e-9,
                "close {} rebuilt as {} vs {}", i + 1, rebuilt, truth
            );
        }
    }

    #[test]
    fn window_ladder_is_strictly_increasing_and_verbatim(
        len in 50usize..2000,
        start in 0.01f64..0.5,
        step in 0.001f64..0.2,
        anchor_end in any::<bool>(),
    ) {
        let values: Vec<f64> = (0..len).map(|i| ((i * 2654435761) % 1000) as f64 / 1e4).collect();
        let returns = ReturnSeries::from_values("prop", values.clone());
        let plan = WindowPlan {
            start_fraction: start,
            step_fraction: step,
            anchor: if anchor_end { Anchor::SeriesEnd } else { Anchor::SeriesStart },
            min_length: 2,
        };
        match build_windows(&returns, &plan) {
            Ok(windows) => {
                prop_assert!(windows.windows(2).all(|w| w[0].len() < w[1].len()));
                prop_assert_eq!(windows.last().unwrap().len(), len);
                for w in &windows {
                    let n = w.len();
                    let expect: &[f64] = match plan.anchor {
                        Anchor::SeriesStart => &values[..n],
                        Anchor::SeriesEnd => &values[len - n..],
                    };
                    prop_assert_eq!(w.values, expect);
                }
            }
            Err(_) => {
                // Only the tiny-first-window case may fail.
                prop_assert!(((start * len as f64) + 0.5).floor() < 2.0);
            }
        }
    }
}
