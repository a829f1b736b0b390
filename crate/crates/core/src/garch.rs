//! GARCH(1,1) simulation with two-component gaussian-mixture innovations.
//!
//! The process is `x_t = chi_t * sigma_t` with the conditional-variance
//! recursion `sigma_t^2 = alpha0 + alpha1 * x_{t-1}^2 + beta1 * sigma_{t-1}^2`
//! and `chi_t` drawn i.i.d. from a zero-mean mixture of two gaussians whose
//! total variance is (approximately) one.
//!
//! Randomness is a ChaCha12 stream seeded from a `u64`, so a given
//! `(spec, steps, seed)` triple is bit-reproducible on every platform within
//! this implementation; across implementations only statistical equivalence
//! is meaningful.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::ReturnSeries;

#[derive(Debug, Error, PartialEq)]
pub enum GarchError {
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("invalid garch parameters: {0}")]
    InvalidGarch(String),
    #[error(
        "non-stationary init: alpha1 + beta1 = {persistence} >= 1, unconditional variance undefined"
    )]
    NonStationaryInit { persistence: f64 },
}

/// Zero-mean two-component gaussian mixture for the innovation `chi_t`.
///
/// `weight1 + weight2` must equal 1 within 1e-12 and both variances must be
/// positive. Serialized field names are `a`, `b`, `var1`, `var2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    #[serde(rename = "a")]
    pub weight1: f64,
    #[serde(rename = "b")]
    pub weight2: f64,
    pub var1: f64,
    pub var2: f64,
}

impl Default for MixtureSpec {
    /// The double-normal innovation used throughout: a dominant narrow
    /// component and a rare wide one, with total variance 0.99959.
    fn default() -> Self {
        Self {
            weight1: 0.9818,
            weight2: 0.0182,
            var1: 0.833,
            var2: 9.986,
        }
    }
}

impl MixtureSpec {
    pub fn new(weight1: f64, weight2: f64, var1: f64, var2: f64) -> Result<Self, GarchError> {
        let spec = Self {
            weight1,
            weight2,
            var1,
            var2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GarchError> {
        if !(self.weight1 >= 0.0 && self.weight2 >= 0.0) {
            return Err(GarchError::InvalidMixture(format!(
                "weights must be non-negative, got a={} b={}",
                self.weight1, self.weight2
            )));
        }
        if ((self.weight1 + self.weight2) - 1.0).abs() > 1e-12 {
            return Err(GarchError::InvalidMixture(format!(
                "weights must sum to 1, got {}",
                self.weight1 + self.weight2
            )));
        }
        if !(self.var1 > 0.0 && self.var2 > 0.0) {
            return Err(GarchError::InvalidMixture(format!(
                "variances must be positive, got var1={} var2={}",
                self.var1, self.var2
            )));
        }
        Ok(())
    }

    /// Mixture variance `a*var1 + b*var2`.
    pub fn variance(&self) -> f64 {
        self.weight1 * self.var1 + self.weight2 * self.var2
    }

    /// Closed-form mixture kurtosis
    /// `3(a*var1^2 + b*var2^2) / (a*var1 + b*var2)^2`.
    pub fn kurtosis(&self) -> f64 {
        let v = self.variance();
        3.0 * (self.weight1 * self.var1 * self.var1 + self.weight2 * self.var2 * self.var2)
            / (v * v)
    }

    /// One draw: component 1 with probability `a`, else component 2, then a
    /// zero-mean gaussian with that component's variance.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let var = if rng.random::<f64>() < self.weight1 {
            self.var1
        } else {
            self.var2
        };
        let normal = Normal::new(0.0, var.sqrt()).expect("validated variance");
        normal.sample(rng)
    }

    /// CDF of the mixture at `x`, for distributional tests.
    pub fn cdf(&self, x: f64) -> f64 {
        self.weight1 * standard_normal_cdf(x / self.var1.sqrt())
            + self.weight2 * standard_normal_cdf(x / self.var2.sqrt())
    }
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc_approx(-z / std::f64::consts::SQRT_2)
}

// Abramowitz-Stegun 7.1.26 rational approximation, |error| < 1.5e-7.
fn erfc_approx(x: f64) -> f64 {
    let sign_negative = x < 0.0;
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erfc = poly * (-x * x).exp();
    if sign_negative {
        2.0 - erfc
    } else {
        erfc
    }
}

/// How the recursion's sigma_0^2 is chosen. Serializes as the string
/// `"unconditional"` or a bare number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitVar {
    /// `alpha0 / (1 - alpha1 - beta1)`; requires `alpha1 + beta1 < 1`.
    Unconditional,
    Fixed(f64),
}

impl Serialize for InitVar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            InitVar::Unconditional => s.serialize_str("unconditional"),
            InitVar::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for InitVar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct InitVarVisitor;

        impl serde::de::Visitor<'_> for InitVarVisitor {
            type Value = InitVar;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("\"unconditional\" or a number")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<InitVar, E> {
                if v == "unconditional" {
                    Ok(InitVar::Unconditional)
                } else {
                    Err(E::custom(format!(
                        "expected \"unconditional\" or a number, got {v:?}"
                    )))
                }
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<InitVar, E> {
                Ok(InitVar::Fixed(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<InitVar, E> {
                Ok(InitVar::Fixed(v as f64))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<InitVar, E> {
                Ok(InitVar::Fixed(v as f64))
            }
        }

        d.deserialize_any(InitVarVisitor)
    }
}

/// GARCH(1,1) parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchSpec {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    /// Steps simulated and discarded before the reported series starts.
    pub burn_in: usize,
    pub init_var: InitVar,
}

impl Default for GarchSpec {
    fn default() -> Self {
        Self {
            alpha0: 1e-5,
            alpha1: 0.5,
            beta1: 0.0,
            burn_in: 500,
            init_var: InitVar::Unconditional,
        }
    }
}

impl GarchSpec {
    pub fn validate(&self) -> Result<(), GarchError> {
        if !self.alpha0.is_finite() || self.alpha0 <= 0.0 {
            return Err(GarchError::InvalidGarch(format!(
                "alpha0 must be > 0, got {}",
                self.alpha0
            )));
        }
        if !(self.alpha1 >= 0.0 && self.beta1 >= 0.0) {
            return Err(GarchError::InvalidGarch(format!(
                "alpha1 and beta1 must be >= 0, got {} and {}",
                self.alpha1, self.beta1
            )));
        }
        if let InitVar::Fixed(v) = self.init_var {
            if !v.is_finite() || v <= 0.0 {
                return Err(GarchError::InvalidGarch(format!(
                    "fixed init_var must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Resolves sigma_0^2, failing for the unconditional choice when
    /// `alpha1 + beta1 >= 1`.
    pub fn initial_variance(&self) -> Result<f64, GarchError> {
        match self.init_var {
            InitVar::Fixed(v) => Ok(v),
            InitVar::Unconditional => {
                let persistence = self.alpha1 + self.beta1;
                if persistence >= 1.0 {
                    return Err(GarchError::NonStationaryInit { persistence });
                }
                Ok(self.alpha0 / (1.0 - persistence))
            }
        }
    }
}

/// Simulates `steps` returns of the GARCH-double-normal process.
///
/// The first draw is `x_0 = chi_0 * sigma_0` with sigma_0^2 from
/// [`GarchSpec::initial_variance`]; `burn_in` steps are then discarded.
/// Identical `(garch, mixture, steps, seed)` yields a bit-identical series.
pub fn simulate(
    garch: &GarchSpec,
    mixture: &MixtureSpec,
    steps: usize,
    seed: u64,
) -> Result<ReturnSeries, GarchError> {
    garch.validate()?;
    mixture.validate()?;
    if steps == 0 {
        return Err(GarchError::InvalidGarch("steps must be >= 1".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sigma2 = garch.initial_variance()?;
    let total = garch.burn_in + steps;
    let mut out = Vec::with_capacity(steps);
    let mut prev_x = 0.0;
    for t in 0..total {
        if t > 0 {
            sigma2 = garch.alpha0 + garch.alpha1 * prev_x * prev_x + garch.beta1 * sigma2;
        }
        assert!(
            sigma2 >= garch.alpha0,
            "conditional variance fell below alpha0"
        );
        let x = mixture.sample(&mut rng) * sigma2.sqrt();
        prev_x = x;
        if t >= garch.burn_in {
            out.push(x);
        }
    }
    Ok(ReturnSeries::from_values(
        format!("garch-sim-seed{seed}"),
        out,
    ))
}
