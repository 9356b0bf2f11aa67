//! Marked Poisson point process of the age-dependent random connection
//! model: finite-window sampling, the Palm neighbourhood of a typical
//! vertex, and closed-form moments.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of the (possibly thinned, possibly general-kernel) model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T = f64> {
    /// Edge density.
    pub beta: T,
    /// Age exponent in `(0, 1)`.
    pub gamma: T,
    /// Half-width multiplier of the general kernel; `1/2` is the
    /// deterministic kernel.
    pub profile_a: T,
    /// Thinning exponent; `0` disables thinning.
    pub eta: T,
    /// Length `n` of the window `[0, n]`, equal to the expected vertex count.
    pub window_length: T,
    /// Periodic boundary on `[0, n)`. Off unless asked for.
    #[serde(default)]
    pub torus: bool,
}

impl<T: Real> ModelParams<T> {
    /// Deterministic-kernel, unthinned parameters on a flat window.
    pub fn new(beta: T, gamma: T, window_length: T) -> Result<Self> {
        let p = ModelParams {
            beta,
            gamma,
            profile_a: T::of(0.5),
            eta: T::zero(),
            window_length,
            torus: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_profile_a(mut self, a: T) -> Result<Self> {
        self.profile_a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: T) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    /// Sets `eta` skipping the admissibility constraint on `(gamma, eta)`.
    pub fn with_eta_unchecked(mut self, eta: T) -> Result<Self> {
        self.eta = eta;
        self.validate_relaxed()?;
        Ok(self)
    }

    pub fn with_torus(mut self, torus: bool) -> Self {
        self.torus = torus;
        self
    }

    pub fn with_window_length(mut self, n: T) -> Result<Self> {
        self.window_length = n;
        self.validate_relaxed()?;
        Ok(self)
    }

    /// Full validation including the thinning admissibility constraint.
    pub fn validate(&self) -> Result<()> {
        self.validate_relaxed()?;
        check_thinning(self.gamma, self.eta)
    }

    /// Validation of every range constraint except thinning admissibility.
    pub fn validate_relaxed(&self) -> Result<()> {
        if !(self.beta > T::zero()) || !self.beta.is_finite() {
            return Err(Error::invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.gamma > T::zero() && self.gamma < T::one()) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if !(self.profile_a >= T::of(0.5)) || !self.profile_a.is_finite() {
            return Err(Error::invalid(format!(
                "profile_a must be at least 1/2, got {}",
                self.profile_a
            )));
        }
        if !(self.eta >= T::zero()) || !self.eta.is_finite() {
            return Err(Error::invalid(format!("eta must be non-negative, got {}", self.eta)));
        }
        if !(self.window_length >= T::zero()) || !self.window_length.is_finite() {
            return Err(Error::invalid(format!(
                "window length must be non-negative, got {}",
                self.window_length
            )));
        }
        Ok(())
    }

    /// Connection radius between an older vertex born at `u` and a younger
    /// one born at `v` (candidate radius for the general kernel).
    #[inline]
    pub fn connection_radius(&self, u: T, v: T) -> T {
        self.profile_a * self.beta * u.powf(-self.gamma) * v.powf(self.gamma - T::one())
    }

    /// Probability that a candidate pair is connected: `1 / (2a)`.
    #[inline]
    pub fn retention_probability(&self) -> T {
        T::one() / (T::of(2.0) * self.profile_a)
    }

    /// True when the kernel is the deterministic indicator (`a = 1/2`).
    #[inline]
    pub fn is_deterministic_kernel(&self) -> bool {
        self.profile_a == T::of(0.5)
    }
}

/// Checks `eta < gamma` and `2/gamma - 1 > 1/(gamma - eta)`; `eta = 0` is
/// always admissible.
pub fn check_thinning<T: Real>(gamma: T, eta: T) -> Result<()> {
    if eta == T::zero() {
        return Ok(());
    }
    if !(eta < gamma) {
        return Err(Error::invalid(format!(
            "thinning exponent eta={eta} must be smaller than gamma={gamma}"
        )));
    }
    let lhs = T::of(2.0) / gamma - T::one();
    let rhs = T::one() / (gamma - eta);
    if !(lhs > rhs) {
        return Err(Error::invalid(format!(
            "inadmissible thinning: 2/gamma - 1 = {lhs} must exceed 1/(gamma - eta) = {rhs}"
        )));
    }
    Ok(())
}

/// A point of the process: spatial position and birth time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex<T = f64> {
    pub id: u32,
    pub position: T,
    pub birth: T,
}

impl<T: Real> Vertex<T> {
    /// Age order: earlier birth is older; equal births fall back to the
    /// lower id being older.
    #[inline]
    pub fn is_older_than(&self, other: &Vertex<T>) -> bool {
        self.birth < other.birth || (self.birth == other.birth && self.id < other.id)
    }
}

/// Neighbourhood of a typical vertex placed at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalmSample<T = f64> {
    pub center_birth: T,
    /// Neighbours born before the centre; the centre connects to them.
    pub older: Vec<Vertex<T>>,
    /// Neighbours born after the centre; they connect to the centre.
    pub younger: Vec<Vertex<T>>,
}

impl<T: Real> PalmSample<T> {
    /// Id of the centre in [`PalmSample::vertices`].
    pub const CENTER_ID: u32 = 0;

    pub fn degree(&self) -> usize {
        self.older.len() + self.younger.len()
    }

    /// All vertices including the centre (id 0, position 0), sorted by
    /// birth.
    pub fn vertices(&self) -> Vec<Vertex<T>> {
        let mut all = Vec::with_capacity(self.degree() + 1);
        all.push(Vertex {
            id: Self::CENTER_ID,
            position: T::zero(),
            birth: self.center_birth,
        });
        all.extend_from_slice(&self.older);
        all.extend_from_slice(&self.younger);
        sort_by_age(&mut all);
        all
    }
}

/// Sorts vertices from oldest to youngest.
pub fn sort_by_age<T: Real>(vertices: &mut [Vertex<T>]) {
    vertices.sort_by(|a, b| {
        a.birth
            .partial_cmp(&b.birth)
            .expect("finite births")
            .then(a.id.cmp(&b.id))
    });
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // rand_distr's Poisson is exact for any positive mean.
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// Uniform draw in `(0, 1]`.
#[inline]
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Samples the process on `[0, n] x (0, 1]`: a Poisson(n) number of
/// vertices with iid uniform positions and births, returned oldest first
/// with ids `0..N` in that order.
pub fn sample_finite<T: Real, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    rng: &mut R,
) -> Result<Vec<Vertex<T>>> {
    params.validate_relaxed()?;
    let n = params.window_length.as_f64();
    let count = poisson_count(n, rng);
    let mut raw: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let birth = open_unit(rng);
            let position = rng.gen::<f64>() * n;
            (birth, position)
        })
        .collect();
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(i, (birth, position))| Vertex {
            id: i as u32,
            position: T::of(position),
            birth: T::of(birth),
        })
        .collect())
}

/// Samples the neighbourhood of a typical vertex born at `u` (uniform on
/// `(0, 1]` when `None`).
///
/// Older neighbours: a Poisson process on `[0, u^(1-gamma)]` with intensity
/// `beta u^(gamma-1) / (1-gamma)` mapped through `w -> w^(1/(1-gamma))`.
/// Younger neighbours: a Poisson process on `[u^gamma, 1]` with intensity
/// `beta u^(-gamma) / gamma` mapped through `w -> w^(1/gamma)`. Positions
/// are uniform within the connection radius. For the general kernel the
/// radius widens by `2a` and the intensity is unchanged, which is the
/// `1/(2a)`-thinned candidate process.
///
/// Ids: the centre is 0, older neighbours follow, then younger ones.
pub fn sample_palm<T: Real, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    u: Option<T>,
    rng: &mut R,
) -> Result<PalmSample<T>> {
    params.validate_relaxed()?;
    let u = match u {
        Some(u) => {
            if !(u > T::zero() && u <= T::one()) {
                return Err(Error::domain(format!("centre birth must lie in (0, 1], got {u}")));
            }
            u.as_f64()
        }
        None => open_unit(rng),
    };
    let beta = params.beta.as_f64();
    let gamma = params.gamma.as_f64();
    let a = params.profile_a.as_f64();

    let mut next_id = 1u32;
    let mut older = Vec::new();
    let older_extent = u.powf(1.0 - gamma);
    let older_rate = beta * u.powf(gamma - 1.0) / (1.0 - gamma);
    for _ in 0..poisson_count(older_rate * older_extent, rng) {
        let w = open_unit(rng) * older_extent;
        let v = w.powf(1.0 / (1.0 - gamma));
        let radius = a * beta * v.powf(-gamma) * u.powf(gamma - 1.0);
        let y = (2.0 * rng.gen::<f64>() - 1.0) * radius;
        older.push(Vertex {
            id: next_id,
            position: T::of(y),
            birth: T::of(v.min(u)),
        });
        next_id += 1;
    }

    let mut younger = Vec::new();
    let lower = u.powf(gamma);
    let younger_rate = beta * u.powf(-gamma) / gamma;
    for _ in 0..poisson_count(younger_rate * (1.0 - lower), rng) {
        let w = lower + rng.gen::<f64>() * (1.0 - lower);
        let v = w.powf(1.0 / gamma);
        let radius = a * beta * u.powf(-gamma) * v.powf(gamma - 1.0);
        let y = (2.0 * rng.gen::<f64>() - 1.0) * radius;
        younger.push(Vertex {
            id: next_id,
            position: T::of(y),
            birth: T::of(v.clamp(u, 1.0)),
        });
        next_id += 1;
    }

    Ok(PalmSample {
        center_birth: T::of(u),
        older,
        younger,
    })
}

/// Expected in-degree of a vertex born at `u`: `(beta/gamma)(u^-gamma - 1)`.
pub fn expected_in_degree<T: Real>(u: T, params: &ModelParams<T>) -> Result<T> {
    if !(u > T::zero() && u <= T::one()) {
        return Err(Error::domain(format!("birth time must lie in (0, 1], got {u}")));
    }
    Ok(params.beta / params.gamma * (u.powf(-params.gamma) - T::one()))
}

/// Expected out-degree of any vertex: `beta / (1 - gamma)`.
///
/// This is also the value used to calibrate `beta` from an observed mean
/// degree.
pub fn expected_out_degree<T: Real>(params: &ModelParams<T>) -> T {
    params.beta / (T::one() - params.gamma)
}

/// Expected total degree of the typical vertex: `2 beta / (1 - gamma)`.
pub fn expected_total_degree<T: Real>(params: &ModelParams<T>) -> T {
    T::of(2.0) * expected_out_degree(params)
}

/// Expected edge count on the window: `n beta / (1 - gamma)`.
pub fn expected_edge_count<T: Real>(params: &ModelParams<T>) -> T {
    params.window_length * expected_out_degree(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn params(beta: f64, gamma: f64, n: f64) -> ModelParams<f64> {
        ModelParams::new(beta, gamma, n).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ModelParams::new(0.0, 0.5, 10.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 10.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 10.0).is_err());
        assert!(ModelParams::new(1.0, 0.5, -1.0).is_err());
        let p = params(1.0, 0.5, 10.0);
        assert!(p.with_profile_a(0.4).is_err());
        assert!(p.with_eta(-0.1).is_err());
    }

    #[test]
    fn thinning_admissibility() {
        assert!(check_thinning(0.8, 0.1).is_ok());
        assert!(check_thinning(0.8, 0.8).is_err());
        // 2/0.8 - 1 = 1.5 <= 1/(0.8 - 0.3) = 2
        assert!(check_thinning(0.8, 0.3).is_err());
        assert!(check_thinning(0.7, 0.0).is_ok());
        let p = params(1.0, 0.8, 10.0);
        assert!(p.with_eta(0.3).is_err());
        assert!(p.with_eta_unchecked(0.3).is_ok());
    }

    #[test]
    fn empty_window_has_no_vertices() {
        let p = params(1.0, 0.5, 0.0);
        assert!(sample_finite(&p, &mut seeded(1)).unwrap().is_empty());
    }

    #[test]
    fn finite_sample_is_sorted_and_in_range() {
        let p = params(1.0, 0.5, 1e5);
        let vs = sample_finite(&p, &mut seeded(9)).unwrap();
        assert!(!vs.is_empty());
        for (i, w) in vs.windows(2).enumerate() {
            assert!(w[0].birth <= w[1].birth);
            assert_eq!(w[0].id as usize, i);
        }
        for v in &vs {
            assert!(v.birth > 0.0 && v.birth <= 1.0);
            assert!(v.position >= 0.0 && v.position <= 1e5);
        }
    }

    #[test]
    fn finite_sample_count_is_poisson() {
        let p = params(1.0, 0.5, 1e4);
        let mut rng = seeded(2);
        let reps = 1000;
        let mean = (0..reps)
            .map(|_| sample_finite(&p, &mut rng).unwrap().len() as f64)
            .sum::<f64>()
            / reps as f64;
        // sd of the mean is 100 / sqrt(1000)
        assert!((mean - 1e4).abs() < 3.0 * 100.0 / (reps as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn finite_sample_replays_from_seed() {
        let p = params(1.0, 0.7, 500.0);
        let a = sample_finite(&p, &mut seeded(11)).unwrap();
        let b = sample_finite(&p, &mut seeded(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn f32_sampling_works() {
        let p = ModelParams::<f32>::new(1.0, 0.5, 100.0).unwrap();
        let vs = sample_finite(&p, &mut seeded(3)).unwrap();
        assert!(vs.iter().all(|v| v.birth > 0.0 && v.birth <= 1.0));
    }

    #[test]
    fn palm_rejects_bad_birth() {
        let p = params(1.0, 0.5, 1.0);
        assert!(sample_palm(&p, Some(0.0), &mut seeded(1)).is_err());
        assert!(sample_palm(&p, Some(1.5), &mut seeded(1)).is_err());
    }

    #[test]
    fn palm_at_unit_birth_has_no_younger_neighbours() {
        let p = params(1.0, 0.5, 1.0);
        let mut rng = seeded(4);
        for _ in 0..100 {
            assert!(sample_palm(&p, Some(1.0), &mut rng).unwrap().younger.is_empty());
        }
    }

    #[test]
    fn palm_neighbours_respect_connection_regions() {
        let p = params(1.3, 0.6, 1.0);
        let mut rng = seeded(5);
        for _ in 0..500 {
            let s = sample_palm(&p, None, &mut rng).unwrap();
            let u = s.center_birth;
            for o in &s.older {
                assert!(o.birth <= u);
                assert!(o.position.abs() <= 0.5 * p.beta * o.birth.powf(-p.gamma) * u.powf(p.gamma - 1.0) * (1.0 + 1e-12));
            }
            for y in &s.younger {
                assert!(y.birth >= u);
                assert!(y.position.abs() <= 0.5 * p.beta * u.powf(-p.gamma) * y.birth.powf(p.gamma - 1.0) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn palm_older_count_mean_at_unit_birth() {
        // Poisson(beta/(1-gamma)) = Poisson(2)
        let p = params(1.0, 0.5, 1.0);
        let mut rng = seeded(6);
        let draws = 100_000;
        let total: usize = (0..draws)
            .map(|_| sample_palm(&p, Some(1.0), &mut rng).unwrap().older.len())
            .sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - 2.0).abs() < 0.04, "mean {mean}");
    }

    #[test]
    fn palm_younger_count_mean_over_uniform_birth() {
        // E[(beta/gamma)(U^-gamma - 1)] = beta/(1-gamma) = 2
        let p = params(1.0, 0.5, 1.0);
        let mut rng = seeded(7);
        let draws = 100_000;
        let total: usize = (0..draws)
            .map(|_| sample_palm(&p, None, &mut rng).unwrap().younger.len())
            .sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - 2.0).abs() < 0.04, "mean {mean}");
    }

    #[test]
    fn in_degree_closed_form() {
        assert_eq!(expected_in_degree(1.0, &params(1.0, 0.5, 1.0)).unwrap(), 0.0);
        approx::assert_relative_eq!(expected_in_degree(0.25, &params(1.0, 0.5, 1.0)).unwrap(), 2.0);
        approx::assert_relative_eq!(expected_in_degree(0.0625, &params(2.0, 0.5, 1.0)).unwrap(), 12.0);
        assert!(expected_in_degree(0.0, &params(1.0, 0.5, 1.0)).is_err());
        assert!(expected_in_degree(1.01, &params(1.0, 0.5, 1.0)).is_err());
    }

    #[test]
    fn edge_count_closed_form() {
        approx::assert_relative_eq!(expected_edge_count(&params(1.0, 0.25, 1e5)), 133_333.333_333, epsilon = 1e-3);
        approx::assert_relative_eq!(expected_edge_count(&params(1.0, 0.5, 1e5)), 200_000.0);
        assert_eq!(expected_edge_count(&params(1.0, 0.5, 0.0)), 0.0);
        approx::assert_relative_eq!(expected_total_degree(&params(1.0, 0.7, 1.0)), 2.0 / 0.3);
    }
}
