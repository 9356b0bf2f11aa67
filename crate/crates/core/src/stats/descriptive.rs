//! Summary statistics, histograms and box-plot summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Moment skewness `m3 / m2^(3/2)`.
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Linearly interpolated quantile of sorted data (Hyndman-Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(xs: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted(xs), p)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Box-plot summary with whiskers at the most extreme data within
/// 1.5 IQR of the quartiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

pub fn box_summary(xs: &[f64]) -> Result<BoxSummary> {
    if xs.is_empty() {
        return Err(Error::fit("box summary of an empty sample"));
    }
    let s = sorted(xs);
    let (q1, median, q3) = (
        quantile_sorted(&s, 0.25),
        quantile_sorted(&s, 0.5),
        quantile_sorted(&s, 0.75),
    );
    let (lo, hi) = (q1 - 1.5 * (q3 - q1), q3 + 1.5 * (q3 - q1));
    let inside = |x: &&f64| **x >= lo && **x <= hi;
    Ok(BoxSummary {
        q1,
        median,
        q3,
        lower_whisker: *s.iter().find(inside).expect("median lies inside"),
        upper_whisker: *s.iter().rev().find(inside).expect("median lies inside"),
        outliers: s.iter().copied().filter(|x| *x < lo || *x > hi).collect(),
    })
}

/// Histogram with equal-width bins; `edges` has one more entry than
/// `counts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts normalized to a probability density.
    pub fn densities(&self) -> Vec<f64> {
        let norm = self.total() as f64 * self.bin_width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }
}

/// Histogram with Freedman-Diaconis bin width `2 IQR n^(-1/3)`. Falls back
/// to Sturges' rule when the IQR vanishes and to a single unit bin for
/// constant data.
pub fn histogram(xs: &[f64]) -> Result<Histogram> {
    if xs.is_empty() {
        return Err(Error::fit("histogram of an empty sample"));
    }
    let s = sorted(xs);
    let (lo, hi) = (s[0], s[s.len() - 1]);
    let n = s.len() as f64;
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    let mut width = 2.0 * iqr / n.cbrt();
    if !(width > 0.0) {
        width = (hi - lo) / (n.log2().ceil() + 1.0);
    }
    if !(width > 0.0) {
        width = 1.0;
    }
    let bins = (((hi - lo) / width).floor() as usize + 1).max(1);
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for x in &s {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
