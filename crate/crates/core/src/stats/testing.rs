//! Null distributions, p-values and Q-Q comparisons.

use serde::{Deserialize, Serialize};

use super::descriptive::{correlation, sorted};
use super::normal::NormalParams;
use super::stable::{StableDistribution, StableParams};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A fitted continuous law used as the null hypothesis of a test.
pub trait NullDistribution {
    fn location(&self) -> f64;
    fn scale(&self) -> f64;
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
    fn quantile(&self, p: f64) -> f64;
}

impl<T: Real> NullDistribution for NormalParams<T> {
    fn location(&self) -> f64 {
        self.mean.as_f64()
    }
    fn scale(&self) -> f64 {
        self.std.as_f64()
    }
    fn pdf(&self, x: f64) -> f64 {
        NormalParams::pdf(self, x)
    }
    fn cdf(&self, x: f64) -> f64 {
        NormalParams::cdf(self, x)
    }
    fn sf(&self, x: f64) -> f64 {
        NormalParams::sf(self, x)
    }
    fn quantile(&self, p: f64) -> f64 {
        NormalParams::quantile(self, p)
    }
}

impl NullDistribution for StableDistribution {
    fn location(&self) -> f64 {
        self.params().location
    }
    fn scale(&self) -> f64 {
        self.params().scale
    }
    fn pdf(&self, x: f64) -> f64 {
        StableDistribution::pdf(self, x)
    }
    fn cdf(&self, x: f64) -> f64 {
        StableDistribution::cdf(self, x)
    }
    fn sf(&self, x: f64) -> f64 {
        StableDistribution::sf(self, x)
    }
    fn quantile(&self, p: f64) -> f64 {
        StableDistribution::quantile(self, p)
    }
}

/// Serializable description of a fitted null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum NullParams {
    Normal(NormalParams<f64>),
    Stable(StableParams<f64>),
}

impl NullParams {
    pub fn distribution(&self) -> Result<Box<dyn NullDistribution + Send + Sync>> {
        Ok(match self {
            NullParams::Normal(n) => Box::new(NormalParams::new(n.mean, n.std)?),
            NullParams::Stable(s) => Box::new(StableDistribution::new(s)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    /// `2 min(F(x), 1 - F(x))`, clamped to `[0, 1]`.
    pub two_sided: f64,
    /// `F(x)`.
    pub lower: f64,
    /// `1 - F(x)`.
    pub upper: f64,
}

pub fn p_value<D: NullDistribution + ?Sized>(observed: f64, null: &D) -> PValue {
    let lower = null.cdf(observed).clamp(0.0, 1.0);
    let upper = null.sf(observed).clamp(0.0, 1.0);
    PValue {
        two_sided: (2.0 * lower.min(upper)).clamp(0.0, 1.0),
        lower,
        upper,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical: f64,
    pub empirical: f64,
}

/// Standardized Q-Q pairs at plotting positions `(i - 1/2) / n`.
pub fn qq_data<T: Real, D: NullDistribution + ?Sized>(samples: &[T], null: &D) -> Result<Vec<QqPoint>> {
    if samples.len() < 10 {
        return Err(Error::fit(format!("Q-Q data needs at least 10 samples, got {}", samples.len())));
    }
    let xs = sorted(&samples.iter().map(|x| x.as_f64()).collect::<Vec<_>>());
    let n = xs.len() as f64;
    let (loc, scale) = (null.location(), null.scale());
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, x)| QqPoint {
            theoretical: (null.quantile((i as f64 + 0.5) / n) - loc) / scale,
            empirical: (x - loc) / scale,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqSummary {
    pub correlation: f64,
    /// Largest `|empirical - theoretical|`.
    pub max_abs_deviation: f64,
    /// Largest `empirical - theoretical` (upper-tail excess when positive).
    pub max_positive_deviation: f64,
}

pub fn qq_summary(points: &[QqPoint]) -> QqSummary {
    let th: Vec<f64> = points.iter().map(|p| p.theoretical).collect();
    let em: Vec<f64> = points.iter().map(|p| p.empirical).collect();
    let dev = points.iter().map(|p| p.empirical - p.theoretical);
    QqSummary {
        correlation: correlation(&th, &em),
        max_abs_deviation: dev.clone().map(f64::abs).fold(0.0, f64::max),
        max_positive_deviation: dev.fold(f64::NEG_INFINITY, f64::max),
    }
}
