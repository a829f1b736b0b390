//! Distributional checks of the mixture sampler and the GARCH recursion
//! against analytic oracles.

use momentscale::garch::{simulate, GarchSpec, InitVar, MixtureSpec};
use momentscale::moments::{moment_profile, standardized_moment};
use momentscale::scaling::{fit_two_regimes, loglog_points};
use momentscale::series::WindowPlan;
use momentscale_testkit as testkit;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn sample_mixture(m: &MixtureSpec, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n).map(|_| m.sample(&mut rng)).collect()
}

fn sample_variance(values: &[f64]) -> f64 {
    let mu = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / values.len() as f64
}

#[test]
fn degenerate_mixture_sample_variance() {
    let m = MixtureSpec::new(1.0, 0.0, 0.7, 3.0).unwrap();
    let draws = sample_mixture(&m, 1_000_000, 4);
    let v = sample_variance(&draws);
    assert!((v / 0.7 - 1.0).abs() < 0.005, "variance {v}");
}

#[test]
fn default_mixture_sample_variance_matches_analytic() {
    let m = MixtureSpec::default();
    let draws = sample_mixture(&m, 1_000_000, 5);
    let v = sample_variance(&draws);
    assert!(
        (v - m.variance()).abs() < 0.01,
        "variance {v} vs {}",
        m.variance()
    );
}

#[test]
fn mixture_sample_kurtosis_matches_closed_form() {
    let m = MixtureSpec::default();
    let draws = sample_mixture(&m, 1_000_000, 6);
    let g4 = standardized_moment(&draws, 4).unwrap();
    let expect = m.kurtosis();
    assert!(
        (g4 / expect - 1.0).abs() < 0.05,
        "sampled {g4} vs closed form {expect}"
    );
}

#[test]
fn iid_limit_passes_kolmogorov_smirnov() {
    // With alpha1 = beta1 = 0 the returns are i.i.d. draws from the mixture
    // scaled by sqrt(alpha0); the KS distance to the analytic mixture CDF
    // must stay below the 1% critical value 1.628 / sqrt(n).
    let garch = GarchSpec {
        alpha0: 1.0, // unit scale so the mixture CDF applies directly
        alpha1: 0.0,
        beta1: 0.0,
        burn_in: 0,
        init_var: InitVar::Unconditional,
    };
    let m = MixtureSpec::default();
    let series = simulate(&garch, &m, 100_000, 12).unwrap();
    let d = testkit::ks_statistic(series.values(), |x| m.cdf(x));
    let critical = 1.628 / (series.len() as f64).sqrt();
    assert!(d < critical, "KS = {d}, critical = {critical}");
}

#[test]
fn unconditional_second_moment_matches_analytic() {
    // E[x^2] = alpha0 V / (1 - alpha1 V) for beta1 = 0, V the mixture
    // variance.
    let garch = GarchSpec::default(); // alpha0=1e-5, alpha1=0.5, beta1=0
    let m = MixtureSpec::default();
    let series = simulate(&garch, &m, 1_000_000, 13).unwrap();
    let v = m.variance();
    let expect = garch.alpha0 * v / (1.0 - garch.alpha1 * v);
    let measured = series.values().iter().map(|x| x * x).sum::<f64>() / series.len() as f64;
    assert!(
        (measured / expect - 1.0).abs() < 0.03,
        "E[x^2] = {measured} vs {expect}"
    );
}

#[test]
fn sigma_floor_assertion_holds_through_long_runs() {
    let garch = GarchSpec {
        alpha1: 0.4,
        beta1: 0.55,
        ..GarchSpec::default()
    };
    // The recursion asserts sigma^2 >= alpha0 internally at every step.
    let series = simulate(&garch, &MixtureSpec::default(), 200_000, 17).unwrap();
    assert_eq!(series.len(), 200_000);
}

fn median_b_short(alpha1: f64, beta1: f64, seeds: std::ops::Range<u64>) -> f64 {
    let garch = GarchSpec {
        alpha1,
        beta1,
        ..GarchSpec::default()
    };
    let m = MixtureSpec::default();
    let mut shorts = Vec::new();
    for seed in seeds {
        let series = simulate(&garch, &m, 4536, seed).unwrap();
        let records = moment_profile(&series, &WindowPlan::default(), &[4, 6]).unwrap();
        let pts = loglog_points(&records, 4, 6).unwrap();
        let fit = fit_two_regimes(&pts.points, 10).unwrap();
        shorts.push(fit.short_line.gradient);
    }
    shorts.sort_by(|a, b| a.total_cmp(b));
    shorts[shorts.len() / 2]
}

#[test]
fn stronger_return_feedback_steepens_short_window_scaling() {
    // Median short-window gradient over 20 seeds, high-alpha1 process vs
    // high-beta1 process at equal persistence.
    let high_alpha = median_b_short(0.6, 0.1, 0..20);
    let high_beta = median_b_short(0.1, 0.8, 0..20);
    assert!(
        high_alpha > high_beta,
        "median B_short: alpha1=0.6 gives {high_alpha}, alpha1=0.1 gives {high_beta}"
    );
}
