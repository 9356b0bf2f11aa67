use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::descriptive::{mean, variance};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams<T = f64> {
    pub mean: T,
    pub std: T,
}

impl<T: Real> NormalParams<T> {
    pub fn new(mean: T, std: T) -> Result<Self> {
        if !(std > T::zero()) || !mean.is_finite() || !std.is_finite() {
            return Err(Error::invalid(format!("normal law needs finite mean and std > 0, got {mean}, {std}")));
        }
        Ok(NormalParams { mean, std })
    }

    fn law(&self) -> Normal {
        Normal::new(self.mean.as_f64(), self.std.as_f64()).expect("validated parameters")
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean.as_f64()) / self.std.as_f64();
        (-0.5 * z * z).exp() / (self.std.as_f64() * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.law().cdf(x)
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.law().sf(x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.law().inverse_cdf(p)
    }
}

/// Sample mean and unbiased sample standard deviation.
pub fn fit_normal<T: Real>(samples: &[T]) -> Result<NormalParams<T>> {
    if samples.len() < 2 {
        return Err(Error::fit(format!("normal fit needs at least 2 samples, got {}", samples.len())));
    }
    let xs: Vec<f64> = samples.iter().map(|x| x.as_f64()).collect();
    let std = variance(&xs).sqrt();
    if !(std > 0.0) {
        return Err(Error::fit("normal fit of a sample with zero variance"));
    }
    Ok(NormalParams {
        mean: T::of(mean(&xs)),
        std: T::of(std),
    })
}
