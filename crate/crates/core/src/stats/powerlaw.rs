//! Discrete power-law tails.

use serde::{Deserialize, Serialize};

use crate::complex::DegreeDistribution;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Maximum-likelihood power-law fit of the values `>= x_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T = f64> {
    pub x_min: u64,
    /// Exponent `a` of the probability mass `p(k) ~ k^-a`.
    pub a_hat: T,
    pub n_tail: u64,
}

impl<T: Real> PowerLawFit<T> {
    /// Tail exponent `1 - a_hat` of the complementary distribution.
    pub fn tail_exponent(&self) -> T {
        T::one() - self.a_hat
    }
}

/// Fits `a_hat = 1 + n / sum ln(x_i / (x_min - 1/2))` over the `n` values
/// with `x_i >= x_min`.
pub fn fit_power_law<T: Real>(values: &[u64], x_min: u64) -> Result<PowerLawFit<T>> {
    fit_weighted(values.iter().map(|&v| (v, 1)), x_min)
}

/// Same estimator on a value -> frequency table.
pub fn fit_power_law_counts<T: Real>(dist: &DegreeDistribution, x_min: u64) -> Result<PowerLawFit<T>> {
    fit_weighted(dist.counts.iter().map(|(&v, &c)| (v, c)), x_min)
}

fn fit_weighted<T: Real>(pairs: impl Iterator<Item = (u64, u64)>, x_min: u64) -> Result<PowerLawFit<T>> {
    if x_min < 1 {
        return Err(Error::invalid("x_min must be at least 1"));
    }
    let shift = x_min as f64 - 0.5;
    let mut n = 0u64;
    let mut sum = 0.0f64;
    for (x, c) in pairs.filter(|&(x, _)| x >= x_min) {
        n += c;
        sum += c as f64 * (x as f64 / shift).ln();
    }
    if n == 0 {
        return Err(Error::fit(format!("no values at or above x_min = {x_min}")));
    }
    Ok(PowerLawFit {
        x_min,
        a_hat: T::of(1.0 + n as f64 / sum),
        n_tail: n,
    })
}

/// Asymptotic log-log slope of `P(deg_{m'}(typical m-simplex) >= k)`.
///
/// Unthinned: `m - (m+1)/gamma`. Thinned with exponent `eta`: `-1/(gamma-eta)`
/// for `m = 0` and `1 - 2/gamma` for `m = 1`; higher `m` has no known value.
pub fn theoretical_exponent<T: Real>(m: usize, m_prime: usize, gamma: T, thinned: bool, eta: T) -> Result<T> {
    if m > m_prime {
        return Err(Error::invalid(format!("need m <= m', got m={m}, m'={m_prime}")));
    }
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let one = T::one();
    if !thinned {
        let m = T::of_usize(m);
        return Ok(m - (m + one) / gamma);
    }
    if !(eta >= T::zero() && eta < gamma) {
        return Err(Error::invalid(format!("eta must lie in [0, gamma), got {eta}")));
    }
    match m {
        0 => Ok(-one / (gamma - eta)),
        1 => Ok(one - T::of(2.0) / gamma),
        _ => Err(Error::invalid(format!(
            "no thinned exponent is available for m = {m}"
        ))),
    }
}

/// Probability-mass exponent `1 + |tail|` matching a tail exponent.
pub fn pdf_exponent<T: Real>(tail_exponent: T) -> T {
    T::one() + tail_exponent.abs()
}

/// `gamma` implied by a vertex-degree mass exponent: `1 / (a_hat - 1)`.
pub fn gamma_from_vertex_exponent<T: Real>(a_hat: T) -> Result<T> {
    let gamma = T::one() / (a_hat - T::one());
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::fit(format!(
            "vertex exponent {a_hat} implies gamma = {gamma}, outside (0,1)"
        )));
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_sample() {
        let fit: PowerLawFit = fit_power_law(&[59; 17], 30).unwrap();
        assert_relative_eq!(fit.a_hat, 1.0 + 1.0 / 2f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(fit.a_hat, 2.4427, epsilon = 1e-4);
        assert_eq!(fit.n_tail, 17);
        let single: PowerLawFit = fit_power_law(&[30], 30).unwrap();
        assert_relative_eq!(single.a_hat, 60.50, epsilon = 5e-3);
    }

    #[test]
    fn values_below_x_min_are_ignored() {
        let a: PowerLawFit = fit_power_law(&[31, 45, 120], 30).unwrap();
        let b: PowerLawFit = fit_power_law(&[1, 2, 29, 31, 45, 120], 30).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_tail_and_bad_x_min() {
        assert!(matches!(fit_power_law::<f64>(&[1, 2, 3], 30), Err(Error::Fit(_))));
        assert!(fit_power_law::<f64>(&[1, 2, 3], 0).unwrap_err().is_validation());
    }

    #[test]
    fn counts_match_values() {
        let values = [30, 30, 31, 50, 77, 200, 4];
        let dist = DegreeDistribution::from_values(0, 1, values);
        let a: PowerLawFit = fit_power_law(&values, 30).unwrap();
        let b: PowerLawFit = fit_power_law_counts(&dist, 30).unwrap();
        assert_relative_eq!(a.a_hat, b.a_hat, epsilon = 1e-12);
        assert_eq!(a.n_tail, b.n_tail);
    }

    #[test]
    fn exponents() {
        let t = |m, mp, g, th, e| theoretical_exponent::<f64>(m, mp, g, th, e).unwrap();
        assert_relative_eq!(t(0, 1, 0.7, false, 0.0), -1.4286, epsilon = 1e-4);
        assert_relative_eq!(t(1, 2, 0.7, false, 0.0), -1.857, epsilon = 1e-3);
        assert_relative_eq!(t(0, 1, 0.8, true, 0.1), -1.4286, epsilon = 1e-4);
        assert_relative_eq!(t(1, 2, 0.8, true, 0.1), 1.0 - 2.0 / 0.8, epsilon = 1e-12);
        assert_relative_eq!(pdf_exponent(t(0, 1, 0.7, false, 0.0)), 2.4286, epsilon = 1e-4);
        assert_relative_eq!(pdf_exponent(t(2, 3, 0.7, false, 0.0)), 3.2857, epsilon = 1e-4);
        assert!(theoretical_exponent::<f64>(2, 1, 0.7, false, 0.0).is_err());
        assert!(theoretical_exponent::<f64>(2, 3, 0.8, true, 0.1).is_err());
    }

    #[test]
    fn gamma_inversion() {
        assert_relative_eq!(gamma_from_vertex_exponent(3.0f64).unwrap(), 0.5);
        assert_relative_eq!(gamma_from_vertex_exponent(2.39f64).unwrap(), 0.72, epsilon = 5e-3);
        assert!(gamma_from_vertex_exponent(1.5f64).is_err());
    }
}
